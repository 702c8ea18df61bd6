//! Yee-lattice leapfrog engine, generic over real/complex field storage.
//!
//! Arrays are node-allocated: every component uses the full
//! `(nx+1)(ny+1)(nz+1)` lattice in x-fastest order, indexed
//! `(k*gy + j)*gx + i`; entries outside a component's valid Yee range are
//! never updated. The outermost backing is PEC (tangential E pinned to
//! zero), which also backs the PML layers.
//!
//! Boundary handling:
//! - wrapped axes (periodic/Bloch) keep phase-multiplied copies of the two
//!   integer-offset E components at index `n`, refreshed after each E sweep,
//!   and read the `-1` neighbor from `n-1` with the inverse phase;
//! - a `Parity::Minus` mirror is arithmetically identical to PEC;
//! - a `Parity::Plus` mirror (magnetic wall) updates the on-plane E
//!   components with a doubled inner H difference (the ghost value is the
//!   negated first interior sample).

use super::pml::AxisPml;
use super::scalar::FieldScalar;
use super::{
    tangential_axes, AxisKind, Component, Face, MonitorResult, Parity, PlanError,
    PlaneRect, ProbeResult, RingdownWindow, RunError, RunResult, SimulationPlan, VolumeDftResult,
};
use crate::geometry::{GridSpec, PermittivityGrid};
use num_complex::Complex64;
use std::sync::Arc;

/// Neighbor descriptor for the backward difference along one axis.
#[derive(Clone, Copy)]
struct Neigh {
    off: isize,
    factor: Option<(f64, f64)>,
}

impl Neigh {
    #[inline(always)]
    fn normal(stride: usize) -> Self {
        Neigh { off: -(stride as isize), factor: None }
    }

    #[inline(always)]
    fn get<S: FieldScalar>(&self, arr: &[S], c: usize) -> S {
        let v = arr[(c as isize + self.off) as usize];
        match self.factor {
            None => v,
            Some(f) => v.mul_phase(f),
        }
    }
}

#[derive(Clone, Copy)]
enum ResolvedAxis {
    Faces { lo_pmc: bool },
    Wrap { phase: (f64, f64), phase_inv: (f64, f64) },
}

impl ResolvedAxis {
    fn wrapped(&self) -> bool {
        matches!(self, ResolvedAxis::Wrap { .. })
    }
}

struct ResolvedSource {
    idx: usize,
    comp: Component,
    spec: super::SourceSpec,
}

struct ResolvedProbe {
    idx: usize,
    comp: Component,
    spec: super::ProbeSpec,
    position: [f64; 3],
    series: Vec<Complex64>,
}

/// One co-located flux term: `sign * w * E * (Ha + Hb) / 2`.
struct FluxTerm {
    e_idx: u32,
    ha_idx: u32,
    hb_idx: u32,
    /// sign * pixel weight * dA
    w: f64,
    e_comp: Component,
    h_comp: Component,
}

struct ResolvedFlux {
    terms: Vec<FluxTerm>,
}

struct ResolvedMonitor {
    name: String,
    freqs: Vec<f64>,
    flux: ResolvedFlux,
    /// Per freq, per term: accumulated E and averaged-H DFTs.
    acc_e: Vec<Vec<Complex64>>,
    acc_h: Vec<Vec<Complex64>>,
}

struct RingdownState {
    spec: super::RingdownSpec,
    faces: [Option<ResolvedFlux>; 6],
    energy_sum: Vec<f64>,
    power_sum: Vec<[f64; 6]>,
    samples: Vec<usize>,
}

struct VolumeDftState {
    spec: super::VolumeDftSpec,
    /// [freq][comp] full-lattice accumulators.
    acc: Vec<[Vec<Complex64>; 3]>,
}

pub struct Simulation<S: FieldScalar> {
    nx: usize,
    ny: usize,
    nz: usize,
    gx: usize,
    gy: usize,
    gz: usize,
    sy: usize,
    sz: usize,
    dx: f64,
    dt: f64,
    eps: Arc<PermittivityGrid>,

    ex: Vec<S>,
    ey: Vec<S>,
    ez: Vec<S>,
    hx: Vec<S>,
    hy: Vec<S>,
    hz: Vec<S>,

    cbx: Vec<f64>,
    cby: Vec<f64>,
    cbz: Vec<f64>,
    db: f64,

    axes: [ResolvedAxis; 3],
    mirror_lo: [Option<Parity>; 3],
    pml: [Option<AxisPml>; 3],

    psi_ex_y: Vec<S>,
    psi_ex_z: Vec<S>,
    psi_ey_x: Vec<S>,
    psi_ey_z: Vec<S>,
    psi_ez_x: Vec<S>,
    psi_ez_y: Vec<S>,
    psi_hx_y: Vec<S>,
    psi_hx_z: Vec<S>,
    psi_hy_x: Vec<S>,
    psi_hy_z: Vec<S>,
    psi_hz_x: Vec<S>,
    psi_hz_y: Vec<S>,

    sources: Vec<ResolvedSource>,
    probes: Vec<ResolvedProbe>,
    monitors: Vec<ResolvedMonitor>,
    ringdown: Option<RingdownState>,
    vdft: Option<VolumeDftState>,

    run_time: f64,
    check_interval: usize,
    dft_stride: usize,
    step: usize,
    warnings: Vec<String>,
}

impl<S: FieldScalar> Simulation<S> {
    pub fn new(plan: &SimulationPlan) -> Result<Self, RunError> {
        plan.validate()?;
        let g = plan.eps.grid;
        let [nx, ny, nz] = g.dims;
        let (gx, gy, gz) = (nx + 1, ny + 1, nz + 1);
        let n = gx * gy * gz;
        let dx = g.dx;
        let dt = plan.dt();

        let mut axes = [ResolvedAxis::Faces { lo_pmc: false }; 3];
        let mut mirror_lo = [None; 3];
        let mut pml: [Option<AxisPml>; 3] = [None, None, None];
        for a in 0..3 {
            match plan.axis(a) {
                AxisKind::Periodic => axes[a] = ResolvedAxis::Wrap {
                    phase: (1.0, 0.0),
                    phase_inv: (1.0, 0.0),
                },
                AxisKind::Bloch { k } => {
                    let length = g.dims[a] as f64 * dx;
                    let (s, c) = (k * length).sin_cos();
                    axes[a] = ResolvedAxis::Wrap { phase: (c, s), phase_inv: (c, -s) };
                }
                AxisKind::Faces { lo, hi } => {
                    let lo_pmc = matches!(lo, Face::Mirror { parity: Parity::Plus });
                    if let Face::Mirror { parity } = lo {
                        mirror_lo[a] = Some(*parity);
                    }
                    axes[a] = ResolvedAxis::Faces { lo_pmc };
                    let cells = |f: &Face| match f {
                        Face::Pml { thickness } => (thickness / dx).round() as usize,
                        _ => 0,
                    };
                    let (lc, hc) = (cells(lo), cells(hi));
                    if lc > 0 || hc > 0 {
                        pml[a] = Some(AxisPml::new(g.dims[a], lc, hc, dx, dt));
                    }
                }
            }
        }

        let mk_cb = |eps: &[f64]| -> Vec<f64> {
            eps.iter().map(|&e| dt / (e * dx)).collect()
        };

        let zeros = || vec![S::ZERO; n];
        let has_pml = [pml[0].is_some(), pml[1].is_some(), pml[2].is_some()];
        let psi_on = |axis: usize| has_pml[axis];

        let mut sim = Simulation {
            nx,
            ny,
            nz,
            gx,
            gy,
            gz,
            sy: gx,
            sz: gx * gy,
            dx,
            dt,
            eps: plan.eps.clone(),
            ex: zeros(),
            ey: zeros(),
            ez: zeros(),
            hx: zeros(),
            hy: zeros(),
            hz: zeros(),
            cbx: mk_cb(&plan.eps.eps_ex),
            cby: mk_cb(&plan.eps.eps_ey),
            cbz: mk_cb(&plan.eps.eps_ez),
            db: dt / dx,
            axes,
            mirror_lo,
            pml,
            psi_ex_y: if psi_on(1) { zeros() } else { Vec::new() },
            psi_ex_z: if psi_on(2) { zeros() } else { Vec::new() },
            psi_ey_x: if psi_on(0) { zeros() } else { Vec::new() },
            psi_ey_z: if psi_on(2) { zeros() } else { Vec::new() },
            psi_ez_x: if psi_on(0) { zeros() } else { Vec::new() },
            psi_ez_y: if psi_on(1) { zeros() } else { Vec::new() },
            psi_hx_y: if psi_on(1) { zeros() } else { Vec::new() },
            psi_hx_z: if psi_on(2) { zeros() } else { Vec::new() },
            psi_hy_x: if psi_on(0) { zeros() } else { Vec::new() },
            psi_hy_z: if psi_on(2) { zeros() } else { Vec::new() },
            psi_hz_x: if psi_on(0) { zeros() } else { Vec::new() },
            psi_hz_y: if psi_on(1) { zeros() } else { Vec::new() },
            sources: Vec::new(),
            probes: Vec::new(),
            monitors: Vec::new(),
            ringdown: None,
            vdft: None,
            run_time: plan.run_time,
            check_interval: plan.check_interval,
            dft_stride: plan.dft_stride.max(1),
            step: 0,
            warnings: Vec::new(),
        };

        for s in &plan.sources {
            let (idx, _) = sim.snap(s.position, s.component);
            sim.sources.push(ResolvedSource { idx, comp: s.component, spec: s.clone() });
        }
        for p in &plan.probes {
            let (idx, position) = sim.snap(p.position, p.component);
            sim.probes.push(ResolvedProbe {
                idx,
                comp: p.component,
                spec: *p,
                position,
                series: Vec::new(),
            });
        }
        for m in &plan.monitors {
            let flux = sim.build_flux(&m.surface);
            let terms = flux.terms.len();
            sim.monitors.push(ResolvedMonitor {
                name: m.name.clone(),
                freqs: m.frequencies.clone(),
                flux,
                acc_e: vec![vec![Complex64::default(); terms]; m.frequencies.len()],
                acc_h: vec![vec![Complex64::default(); terms]; m.frequencies.len()],
            });
        }
        if let Some(r) = &plan.ringdown {
            let faces = sim.build_budget_faces(plan, r.face_inset);
            sim.ringdown = Some(RingdownState {
                spec: r.clone(),
                faces,
                energy_sum: vec![0.0; r.count],
                power_sum: vec![[0.0; 6]; r.count],
                samples: vec![0; r.count],
            });
        }
        if let Some(v) = &plan.volume_dft {
            sim.vdft = Some(VolumeDftState {
                spec: v.clone(),
                acc: v
                    .frequencies
                    .iter()
                    .map(|_| {
                        [
                            vec![Complex64::default(); n],
                            vec![Complex64::default(); n],
                            vec![Complex64::default(); n],
                        ]
                    })
                    .collect(),
            });
        }
        Ok(sim)
    }

    /// Snap a position to the nearest valid sample of a component; returns
    /// the linear index and actual position.
    fn snap(&self, pos: [f64; 3], comp: Component) -> (usize, [f64; 3]) {
        let off = comp.offset();
        let g = &self.eps.grid;
        let mut ijk = [0usize; 3];
        let mut actual = [0.0; 3];
        for a in 0..3 {
            let max = match off[a] {
                o if o > 0.0 => g.dims[a].saturating_sub(1),
                _ => g.dims[a],
            };
            let raw = ((pos[a] - g.origin[a]) / g.dx - off[a]).round();
            let i = raw.max(0.0).min(max as f64) as usize;
            ijk[a] = i;
            actual[a] = g.origin[a] + (i as f64 + off[a]) * g.dx;
        }
        ((ijk[2] * self.gy + ijk[1]) * self.gx + ijk[0], actual)
    }

    fn field(&self, comp: Component) -> &Vec<S> {
        match comp {
            Component::Ex => &self.ex,
            Component::Ey => &self.ey,
            Component::Ez => &self.ez,
            Component::Hx => &self.hx,
            Component::Hy => &self.hy,
            Component::Hz => &self.hz,
        }
    }

    /// Read-only access to a component array (tests, snapshots).
    pub fn component(&self, comp: Component) -> &[S] {
        self.field(comp)
    }

    /// Overwrite one sample (test initialization).
    pub fn set_sample(&mut self, comp: Component, i: usize, j: usize, k: usize, v: S) {
        let c = (k * self.gy + j) * self.gx + i;
        match comp {
            Component::Ex => self.ex[c] = v,
            Component::Ey => self.ey[c] = v,
            Component::Ez => self.ez[c] = v,
            Component::Hx => self.hx[c] = v,
            Component::Hy => self.hy[c] = v,
            Component::Hz => self.hz[c] = v,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    // ---- boundary helpers -------------------------------------------------

    /// Start index of E-component updates along a transverse (integer) axis.
    fn e_start(&self, axis: usize) -> usize {
        match self.axes[axis] {
            ResolvedAxis::Wrap { .. } => 0,
            ResolvedAxis::Faces { lo_pmc } => {
                if lo_pmc {
                    0
                } else {
                    1
                }
            }
        }
    }

    /// Neighbor descriptor for a backward difference at index 0 of an axis.
    fn lo_neigh(&self, axis: usize, stride: usize, n: usize) -> Neigh {
        match self.axes[axis] {
            ResolvedAxis::Wrap { phase_inv, .. } => Neigh {
                off: ((n - 1) * stride) as isize,
                factor: Some(phase_inv),
            },
            ResolvedAxis::Faces { lo_pmc } => {
                debug_assert!(lo_pmc);
                Neigh { off: 0, factor: Some((-1.0, 0.0)) }
            }
        }
    }

    /// End of H-component updates along its integer axis.
    fn h_end(&self, axis: usize, n: usize) -> usize {
        if self.axes[axis].wrapped() {
            n
        } else {
            n + 1
        }
    }

    // ---- E sweep ----------------------------------------------------------

    fn update_e(&mut self) {
        self.update_ex();
        self.update_ey();
        self.update_ez();
    }

    fn update_ex(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let (gx, gy) = (self.gx, self.gy);
        let (sy, sz) = (self.sy, self.sz);
        let j0 = self.e_start(1);
        let k0 = self.e_start(2);
        let pml_y = self.pml[1].as_ref();
        let pml_z = self.pml[2].as_ref();
        let neigh_j0 = if j0 == 0 { Some(self.lo_neigh(1, sy, ny)) } else { None };
        let neigh_k0 = if k0 == 0 { Some(self.lo_neigh(2, sz, nz)) } else { None };

        let ex = &mut self.ex;
        let (hz, hy) = (&self.hz, &self.hy);
        let cb = &self.cbx;
        let (psi_y, psi_z) = (&mut self.psi_ex_y, &mut self.psi_ex_z);

        for k in k0..nz {
            let km = if k == 0 { neigh_k0.unwrap() } else { Neigh::normal(sz) };
            let (bz, cz) = pml_z
                .as_ref()
                .map(|p| (p.b_node[k], p.c_node[k]))
                .unwrap_or((1.0, 0.0));
            for j in j0..ny {
                let jm = if j == 0 { neigh_j0.unwrap() } else { Neigh::normal(sy) };
                let (by, cy) = pml_y
                    .as_ref()
                    .map(|p| (p.b_node[j], p.c_node[j]))
                    .unwrap_or((1.0, 0.0));
                let base = (k * gy + j) * gx;
                let plain =
                    jm.factor.is_none() && km.factor.is_none() && cy == 0.0 && cz == 0.0;
                if plain {
                    let ex_r = &mut ex[base..base + nx];
                    let cb_r = &cb[base..base + nx];
                    let hz_r = &hz[base..base + nx];
                    let hzm_r = &hz[base - sy..base - sy + nx];
                    let hy_r = &hy[base..base + nx];
                    let hym_r = &hy[base - sz..base - sz + nx];
                    for i in 0..nx {
                        let d = (hz_r[i] - hzm_r[i]) - (hy_r[i] - hym_r[i]);
                        ex_r[i] += d.scale(cb_r[i]);
                    }
                } else {
                    for i in 0..nx {
                        let c = base + i;
                        let mut dhz = hz[c] - jm.get(hz, c);
                        let mut dhy = hy[c] - km.get(hy, c);
                        if cy != 0.0 {
                            let v = psi_y[c].scale(by) + dhz.scale(cy);
                            psi_y[c] = v;
                            dhz += v;
                        }
                        if cz != 0.0 {
                            let v = psi_z[c].scale(bz) + dhy.scale(cz);
                            psi_z[c] = v;
                            dhy += v;
                        }
                        ex[c] += (dhz - dhy).scale(cb[c]);
                    }
                }
            }
        }
    }

    fn update_ey(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let (gx, gy) = (self.gx, self.gy);
        let sz = self.sz;
        let i0 = self.e_start(0);
        let k0 = self.e_start(2);
        let pml_x = self.pml[0].as_ref();
        let pml_z = self.pml[2].as_ref();
        let neigh_i0 = if i0 == 0 { Some(self.lo_neigh(0, 1, nx)) } else { None };
        let neigh_k0 = if k0 == 0 { Some(self.lo_neigh(2, sz, nz)) } else { None };

        let ey = &mut self.ey;
        let (hx, hz) = (&self.hx, &self.hz);
        let cb = &self.cby;
        let (psi_x, psi_z) = (&mut self.psi_ey_x, &mut self.psi_ey_z);

        for k in k0..nz {
            let km = if k == 0 { neigh_k0.unwrap() } else { Neigh::normal(sz) };
            let (bz, cz) = pml_z
                .as_ref()
                .map(|p| (p.b_node[k], p.c_node[k]))
                .unwrap_or((1.0, 0.0));
            for j in 0..ny {
                let base = (k * gy + j) * gx;
                // Special column i = 0 (wrap or magnetic wall).
                if let Some(im) = neigh_i0 {
                    let c = base;
                    let mut dhx = hx[c] - km.get(hx, c);
                    let dhz = hz[c] - im.get(hz, c);
                    if cz != 0.0 {
                        let v = psi_z[c].scale(bz) + dhx.scale(cz);
                        psi_z[c] = v;
                        dhx += v;
                    }
                    ey[c] += (dhx - dhz).scale(cb[c]);
                }
                let i_lo = i0.max(1);
                let plain = km.factor.is_none() && cz == 0.0 && pml_x.is_none();
                if plain {
                    let r = base + i_lo..base + nx;
                    let ey_r = &mut ey[r.clone()];
                    let cb_r = &cb[r.clone()];
                    let hx_r = &hx[r.clone()];
                    let hxm_r = &hx[base + i_lo - sz..base + nx - sz];
                    let hz_r = &hz[r.clone()];
                    let hzm_r = &hz[base + i_lo - 1..base + nx - 1];
                    for i in 0..ey_r.len() {
                        let d = (hx_r[i] - hxm_r[i]) - (hz_r[i] - hzm_r[i]);
                        ey_r[i] += d.scale(cb_r[i]);
                    }
                } else {
                    for i in i_lo..nx {
                        let c = base + i;
                        let mut dhx = hx[c] - km.get(hx, c);
                        let mut dhz = hz[c] - hz[c - 1];
                        if cz != 0.0 {
                            let v = psi_z[c].scale(bz) + dhx.scale(cz);
                            psi_z[c] = v;
                            dhx += v;
                        }
                        if let Some(p) = pml_x.as_ref() {
                            if p.c_node[i] != 0.0 {
                                let v = psi_x[c].scale(p.b_node[i]) + dhz.scale(p.c_node[i]);
                                psi_x[c] = v;
                                dhz += v;
                            }
                        }
                        ey[c] += (dhx - dhz).scale(cb[c]);
                    }
                }
            }
        }
    }

    fn update_ez(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let (gx, gy) = (self.gx, self.gy);
        let sy = self.sy;
        let i0 = self.e_start(0);
        let j0 = self.e_start(1);
        let pml_x = self.pml[0].as_ref();
        let pml_y = self.pml[1].as_ref();
        let neigh_i0 = if i0 == 0 { Some(self.lo_neigh(0, 1, nx)) } else { None };
        let neigh_j0 = if j0 == 0 { Some(self.lo_neigh(1, sy, ny)) } else { None };

        let ez = &mut self.ez;
        let (hy, hx) = (&self.hy, &self.hx);
        let cb = &self.cbz;
        let (psi_x, psi_y) = (&mut self.psi_ez_x, &mut self.psi_ez_y);

        for k in 0..nz {
            for j in j0..ny {
                let jm = if j == 0 { neigh_j0.unwrap() } else { Neigh::normal(sy) };
                let (by, cy) = pml_y
                    .as_ref()
                    .map(|p| (p.b_node[j], p.c_node[j]))
                    .unwrap_or((1.0, 0.0));
                let base = (k * gy + j) * gx;
                if let Some(im) = neigh_i0 {
                    let c = base;
                    let dhy = hy[c] - im.get(hy, c);
                    let mut dhx = hx[c] - jm.get(hx, c);
                    if cy != 0.0 {
                        let v = psi_y[c].scale(by) + dhx.scale(cy);
                        psi_y[c] = v;
                        dhx += v;
                    }
                    ez[c] += (dhy - dhx).scale(cb[c]);
                }
                let i_lo = i0.max(1);
                let plain = jm.factor.is_none() && cy == 0.0 && pml_x.is_none();
                if plain {
                    let r = base + i_lo..base + nx;
                    let ez_r = &mut ez[r.clone()];
                    let cb_r = &cb[r.clone()];
                    let hy_r = &hy[r.clone()];
                    let hym_r = &hy[base + i_lo - 1..base + nx - 1];
                    let hx_r = &hx[r.clone()];
                    let hxm_r = &hx[base + i_lo - sy..base + nx - sy];
                    for i in 0..ez_r.len() {
                        let d = (hy_r[i] - hym_r[i]) - (hx_r[i] - hxm_r[i]);
                        ez_r[i] += d.scale(cb_r[i]);
                    }
                } else {
                    for i in i_lo..nx {
                        let c = base + i;
                        let mut dhy = hy[c] - hy[c - 1];
                        let mut dhx = hx[c] - jm.get(hx, c);
                        if let Some(p) = pml_x.as_ref() {
                            if p.c_node[i] != 0.0 {
                                let v = psi_x[c].scale(p.b_node[i]) + dhy.scale(p.c_node[i]);
                                psi_x[c] = v;
                                dhy += v;
                            }
                        }
                        if cy != 0.0 {
                            let v = psi_y[c].scale(by) + dhx.scale(cy);
                            psi_y[c] = v;
                            dhx += v;
                        }
                        ez[c] += (dhy - dhx).scale(cb[c]);
                    }
                }
            }
        }
    }

    // ---- H sweep ----------------------------------------------------------

    fn update_h(&mut self) {
        self.update_hx();
        self.update_hy();
        self.update_hz();
    }

    fn update_hx(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let (gx, gy) = (self.gx, self.gy);
        let (sy, sz) = (self.sy, self.sz);
        let i_end = self.h_end(0, nx);
        let db = self.db;
        let pml_y = self.pml[1].as_ref();
        let pml_z = self.pml[2].as_ref();

        let hx = &mut self.hx;
        let (ez, ey) = (&self.ez, &self.ey);
        let (psi_y, psi_z) = (&mut self.psi_hx_y, &mut self.psi_hx_z);

        for k in 0..nz {
            let (bz, cz) = pml_z
                .as_ref()
                .map(|p| (p.b_half[k], p.c_half[k]))
                .unwrap_or((1.0, 0.0));
            for j in 0..ny {
                let (by, cy) = pml_y
                    .as_ref()
                    .map(|p| (p.b_half[j], p.c_half[j]))
                    .unwrap_or((1.0, 0.0));
                let base = (k * gy + j) * gx;
                if cy == 0.0 && cz == 0.0 {
                    let r = base..base + i_end;
                    let hx_r = &mut hx[r.clone()];
                    let ez_r = &ez[r.clone()];
                    let ezp_r = &ez[base + sy..base + sy + i_end];
                    let ey_r = &ey[r.clone()];
                    let eyp_r = &ey[base + sz..base + sz + i_end];
                    for i in 0..i_end {
                        let d = (ezp_r[i] - ez_r[i]) - (eyp_r[i] - ey_r[i]);
                        hx_r[i] += d.scale(-db);
                    }
                } else {
                    for i in 0..i_end {
                        let c = base + i;
                        let mut dez = ez[c + sy] - ez[c];
                        let mut dey = ey[c + sz] - ey[c];
                        if cy != 0.0 {
                            let v = psi_y[c].scale(by) + dez.scale(cy);
                            psi_y[c] = v;
                            dez += v;
                        }
                        if cz != 0.0 {
                            let v = psi_z[c].scale(bz) + dey.scale(cz);
                            psi_z[c] = v;
                            dey += v;
                        }
                        hx[c] += (dez - dey).scale(-db);
                    }
                }
            }
        }
    }

    fn update_hy(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let (gx, gy) = (self.gx, self.gy);
        let sz = self.sz;
        let j_end = self.h_end(1, ny);
        let db = self.db;
        let pml_x = self.pml[0].as_ref();
        let pml_z = self.pml[2].as_ref();

        let hy = &mut self.hy;
        let (ex, ez) = (&self.ex, &self.ez);
        let (psi_x, psi_z) = (&mut self.psi_hy_x, &mut self.psi_hy_z);

        for k in 0..nz {
            let (bz, cz) = pml_z
                .as_ref()
                .map(|p| (p.b_half[k], p.c_half[k]))
                .unwrap_or((1.0, 0.0));
            for j in 0..j_end {
                let base = (k * gy + j) * gx;
                if cz == 0.0 && pml_x.is_none() {
                    let r = base..base + nx;
                    let hy_r = &mut hy[r.clone()];
                    let ex_r = &ex[r.clone()];
                    let exp_r = &ex[base + sz..base + sz + nx];
                    let ez_r = &ez[r.clone()];
                    let ezp_r = &ez[base + 1..base + 1 + nx];
                    for i in 0..nx {
                        let d = (exp_r[i] - ex_r[i]) - (ezp_r[i] - ez_r[i]);
                        hy_r[i] += d.scale(-db);
                    }
                } else {
                    for i in 0..nx {
                        let c = base + i;
                        let mut dex = ex[c + sz] - ex[c];
                        let mut dez = ez[c + 1] - ez[c];
                        if cz != 0.0 {
                            let v = psi_z[c].scale(bz) + dex.scale(cz);
                            psi_z[c] = v;
                            dex += v;
                        }
                        if let Some(p) = pml_x.as_ref() {
                            if p.c_half[i] != 0.0 {
                                let v = psi_x[c].scale(p.b_half[i]) + dez.scale(p.c_half[i]);
                                psi_x[c] = v;
                                dez += v;
                            }
                        }
                        hy[c] += (dex - dez).scale(-db);
                    }
                }
            }
        }
    }

    fn update_hz(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let (gx, gy) = (self.gx, self.gy);
        let sy = self.sy;
        let k_end = self.h_end(2, nz);
        let db = self.db;
        let pml_x = self.pml[0].as_ref();
        let pml_y = self.pml[1].as_ref();

        let hz = &mut self.hz;
        let (ey, ex) = (&self.ey, &self.ex);
        let (psi_x, psi_y) = (&mut self.psi_hz_x, &mut self.psi_hz_y);

        for k in 0..k_end {
            for j in 0..ny {
                let (by, cy) = pml_y
                    .as_ref()
                    .map(|p| (p.b_half[j], p.c_half[j]))
                    .unwrap_or((1.0, 0.0));
                let base = (k * gy + j) * gx;
                if cy == 0.0 && pml_x.is_none() {
                    let r = base..base + nx;
                    let hz_r = &mut hz[r.clone()];
                    let ey_r = &ey[r.clone()];
                    let eyp_r = &ey[base + 1..base + 1 + nx];
                    let ex_r = &ex[r.clone()];
                    let exp_r = &ex[base + sy..base + sy + nx];
                    for i in 0..nx {
                        let d = (eyp_r[i] - ey_r[i]) - (exp_r[i] - ex_r[i]);
                        hz_r[i] += d.scale(-db);
                    }
                } else {
                    for i in 0..nx {
                        let c = base + i;
                        let mut dey = ey[c + 1] - ey[c];
                        let mut dex = ex[c + sy] - ex[c];
                        if let Some(p) = pml_x.as_ref() {
                            if p.c_half[i] != 0.0 {
                                let v = psi_x[c].scale(p.b_half[i]) + dey.scale(p.c_half[i]);
                                psi_x[c] = v;
                                dey += v;
                            }
                        }
                        if cy != 0.0 {
                            let v = psi_y[c].scale(by) + dex.scale(cy);
                            psi_y[c] = v;
                            dex += v;
                        }
                        hz[c] += (dey - dex).scale(-db);
                    }
                }
            }
        }
    }

    // ---- wrap copies, sources, accumulation --------------------------------

    /// Refresh the phase-multiplied copies of integer-offset E components at
    /// index n of each wrapped axis.
    fn wrap_copies(&mut self) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let (gx, gy, gz) = (self.gx, self.gy, self.gz);
        if let ResolvedAxis::Wrap { phase, .. } = self.axes[0] {
            for arr in [&mut self.ey, &mut self.ez] {
                for k in 0..gz {
                    for j in 0..gy {
                        let base = (k * gy + j) * gx;
                        arr[base + nx] = arr[base].mul_phase(phase);
                    }
                }
            }
        }
        if let ResolvedAxis::Wrap { phase, .. } = self.axes[1] {
            for arr in [&mut self.ex, &mut self.ez] {
                for k in 0..gz {
                    let lo = (k * gy) * gx;
                    let hi = (k * gy + ny) * gx;
                    for i in 0..gx {
                        arr[hi + i] = arr[lo + i].mul_phase(phase);
                    }
                }
            }
        }
        if let ResolvedAxis::Wrap { phase, .. } = self.axes[2] {
            for arr in [&mut self.ex, &mut self.ey] {
                let hi = (nz * gy) * gx;
                for c in 0..gy * gx {
                    arr[hi + c] = arr[c].mul_phase(phase);
                }
            }
        }
    }

    fn inject_sources(&mut self, t: f64) {
        for s in &self.sources {
            let w = s.spec.waveform(t);
            if w == 0.0 {
                continue;
            }
            // Soft current source: E += dt/eps * J, with dt/eps = cb * dx.
            let (arr, cb): (&mut Vec<S>, &Vec<f64>) = match s.comp {
                Component::Ex => (&mut self.ex, &self.cbx),
                Component::Ey => (&mut self.ey, &self.cby),
                Component::Ez => (&mut self.ez, &self.cbz),
                // Magnetic sources are additive with db.
                Component::Hx => (&mut self.hx, &self.cbx),
                Component::Hy => (&mut self.hy, &self.cby),
                Component::Hz => (&mut self.hz, &self.cbz),
            };
            match s.comp {
                Component::Hx | Component::Hy | Component::Hz => {
                    arr[s.idx] += S::from_real(w * self.db * self.dx);
                }
                _ => {
                    arr[s.idx] += S::from_real(w * cb[s.idx] * self.dx);
                }
            }
        }
    }

    /// Total source cutoff time.
    fn sources_end(&self) -> f64 {
        self.sources
            .iter()
            .map(|s| s.spec.t_end())
            .fold(0.0, f64::max)
    }

    /// Field energy over the non-PML interior, with half weights on mirror
    /// planes. For complex fields this is the cycle-mean energy.
    pub fn interior_energy(&self) -> f64 {
        let g = self.eps.grid.dims;
        let mut lo = [0usize; 3];
        let mut hi = [g[0], g[1], g[2]];
        for a in 0..3 {
            if let Some(p) = &self.pml[a] {
                lo[a] = p.lo_cells;
                hi[a] = g[a] - p.hi_cells;
            }
        }
        let mirror = self.mirror_lo;
        let mut acc = 0.0;
        let idx = |i: usize, j: usize, k: usize| (k * self.gy + j) * self.gx + i;
        for k in lo[2]..hi[2] {
            let wz = if mirror[2].is_some() && k == 0 { 0.5 } else { 1.0 };
            for j in lo[1]..hi[1] {
                let wy = if mirror[1].is_some() && j == 0 { 0.5 } else { 1.0 };
                for i in lo[0]..hi[0] {
                    let wx = if mirror[0].is_some() && i == 0 { 0.5 } else { 1.0 };
                    let c = idx(i, j, k);
                    // Integer-offset axes decide plane sharing per component.
                    let ex = self.ex[c].norm_sqr() * self.eps.eps_ex[c] * wy * wz;
                    let ey = self.ey[c].norm_sqr() * self.eps.eps_ey[c] * wx * wz;
                    let ez = self.ez[c].norm_sqr() * self.eps.eps_ez[c] * wx * wy;
                    let hx = self.hx[c].norm_sqr() * wx;
                    let hy = self.hy[c].norm_sqr() * wy;
                    let hz = self.hz[c].norm_sqr() * wz;
                    acc += ex + ey + ez + hx + hy + hz;
                }
            }
        }
        0.5 * acc * self.dx * self.dx * self.dx
    }

    fn flux_value(&self, flux: &ResolvedFlux) -> f64 {
        let mut acc = 0.0;
        for t in &flux.terms {
            let e = self.field(t.e_comp)[t.e_idx as usize];
            let h = self.field(t.h_comp)[t.ha_idx as usize]
                + self.field(t.h_comp)[t.hb_idx as usize];
            acc += e.prod_re(h.scale(0.5)) * t.w;
        }
        acc
    }

    fn accumulate_monitors(&mut self, t_e: f64, t_h: f64, weight: f64) {
        // Split borrows: monitors hold accumulators, fields are read-only.
        let (ex, ey, ez) = (&self.ex, &self.ey, &self.ez);
        let (hx, hy, hz) = (&self.hx, &self.hy, &self.hz);
        let pick = |comp: Component| -> &[S] {
            match comp {
                Component::Ex => ex,
                Component::Ey => ey,
                Component::Ez => ez,
                Component::Hx => hx,
                Component::Hy => hy,
                Component::Hz => hz,
            }
        };
        for m in &mut self.monitors {
            for (fi, &f) in m.freqs.iter().enumerate() {
                let w = 2.0 * std::f64::consts::PI * f;
                let ph_e = Complex64::from_polar(weight, w * t_e);
                let ph_h = Complex64::from_polar(weight, w * t_h);
                let (acc_e, acc_h) = (&mut m.acc_e[fi], &mut m.acc_h[fi]);
                for (ti, term) in m.flux.terms.iter().enumerate() {
                    let e = pick(term.e_comp)[term.e_idx as usize].to_complex();
                    let h = (pick(term.h_comp)[term.ha_idx as usize]
                        + pick(term.h_comp)[term.hb_idx as usize])
                    .scale(0.5)
                    .to_complex();
                    acc_e[ti] += e * ph_e;
                    acc_h[ti] += h * ph_h;
                }
            }
        }
    }

    fn accumulate_vdft(&mut self, t: f64, weight: f64) {
        let Some(v) = &mut self.vdft else { return };
        for (fi, &f) in v.spec.frequencies.iter().enumerate() {
            let w = 2.0 * std::f64::consts::PI * f;
            let ph = Complex64::from_polar(weight, w * t);
            let [ax, ay, az] = &mut v.acc[fi];
            for (a, e) in ax.iter_mut().zip(self.ex.iter()) {
                *a += e.to_complex() * ph;
            }
            for (a, e) in ay.iter_mut().zip(self.ey.iter()) {
                *a += e.to_complex() * ph;
            }
            for (a, e) in az.iter_mut().zip(self.ez.iter()) {
                *a += e.to_complex() * ph;
            }
        }
    }

    fn scan_finite(&self) -> Result<(), RunError> {
        for (name, arr) in [
            ("Ex", &self.ex),
            ("Ey", &self.ey),
            ("Ez", &self.ez),
            ("Hx", &self.hx),
            ("Hy", &self.hy),
            ("Hz", &self.hz),
        ] {
            if let Some(c) = arr.iter().position(|v| !v.is_finite()) {
                let i = c % self.gx;
                let j = (c / self.gx) % self.gy;
                let k = c / (self.gx * self.gy);
                return Err(RunError::NonFinite {
                    component: name,
                    i,
                    j,
                    k,
                    step: self.step,
                });
            }
        }
        Ok(())
    }

    /// Advance one leapfrog step (H then E, then bookkeeping).
    pub fn step_once(&mut self) -> Result<(), RunError> {
        self.update_h();
        self.update_e();
        let t_src = (self.step as f64 + 0.5) * self.dt;
        self.inject_sources(t_src);
        self.wrap_copies();
        self.step += 1;

        let t_e = self.step as f64 * self.dt;
        let t_h = t_e - 0.5 * self.dt;
        for p in &mut self.probes {
            let v = match p.comp {
                Component::Ex => self.ex[p.idx],
                Component::Ey => self.ey[p.idx],
                Component::Ez => self.ez[p.idx],
                Component::Hx => self.hx[p.idx],
                Component::Hy => self.hy[p.idx],
                Component::Hz => self.hz[p.idx],
            };
            p.series.push(v.to_complex());
        }
        if !self.monitors.is_empty() && self.step % self.dft_stride == 0 {
            let w = self.dt * self.dft_stride as f64;
            self.accumulate_monitors(t_e, t_h, w);
        }
        if let Some(v) = &self.vdft {
            if t_e >= v.spec.t_start && self.step % v.spec.stride == 0 {
                let w = self.dt * v.spec.stride as f64;
                self.accumulate_vdft(t_e, w);
            }
        }
        if let Some(r) = &self.ringdown {
            let spec = r.spec.clone();
            if t_e >= spec.t_start {
                let win = ((t_e - spec.t_start) / spec.window) as usize;
                if win < spec.count {
                    let mut powers = [0.0; 6];
                    let rd = self.ringdown.as_ref().unwrap();
                    for (fi, f) in rd.faces.iter().enumerate() {
                        if let Some(f) = f {
                            powers[fi] = self.flux_value(f);
                        }
                    }
                    let energy = self.interior_energy();
                    let rd = self.ringdown.as_mut().unwrap();
                    rd.energy_sum[win] += energy;
                    for (a, p) in rd.power_sum[win].iter_mut().zip(powers.iter()) {
                        *a += p;
                    }
                    rd.samples[win] += 1;
                }
            }
        }
        if self.check_interval > 0 && self.step % self.check_interval == 0 {
            self.scan_finite()?;
        }
        Ok(())
    }

    /// Run the whole plan and collect results.
    pub fn run(mut self) -> Result<RunResult, RunError> {
        let steps = (self.run_time / self.dt).ceil() as usize;
        for _ in 0..steps {
            self.step_once()?;
        }
        self.scan_finite()?;
        self.finish(steps)
    }

    fn finish(self, steps: usize) -> Result<RunResult, RunError> {
        let dt = self.dt;
        let source_off_time = self.sources_end();
        let symmetry_factor = self
            .mirror_lo
            .iter()
            .map(|m| if m.is_some() { 2.0 } else { 1.0 })
            .product();
        let probes = self
            .probes
            .into_iter()
            .map(|p| ProbeResult { spec: p.spec, position: p.position, series: p.series })
            .collect();
        let monitors = self
            .monitors
            .into_iter()
            .map(|m| {
                let flux = m
                    .freqs
                    .iter()
                    .enumerate()
                    .map(|(fi, _)| {
                        let mut p = 0.0;
                        for (ti, term) in m.flux.terms.iter().enumerate() {
                            p += 0.5 * (m.acc_e[fi][ti] * m.acc_h[fi][ti].conj()).re * term.w;
                        }
                        p
                    })
                    .collect();
                MonitorResult { name: m.name, frequencies: m.freqs, flux }
            })
            .collect();
        let ringdown = match self.ringdown {
            None => Vec::new(),
            Some(r) => (0..r.spec.count)
                .filter(|&w| r.samples[w] > 0)
                .map(|w| {
                    let n = r.samples[w] as f64;
                    let mut fp = r.power_sum[w];
                    for p in fp.iter_mut() {
                        *p /= n;
                    }
                    RingdownWindow {
                        t_start: r.spec.t_start + w as f64 * r.spec.window,
                        t_end: r.spec.t_start + (w as f64 + 1.0) * r.spec.window,
                        energy: r.energy_sum[w] / n,
                        face_power: fp,
                    }
                })
                .collect(),
        };
        let volume_dft = self.vdft.map(|v| VolumeDftResult {
            frequencies: v.spec.frequencies.clone(),
            fields: v.acc,
        });
        Ok(RunResult {
            dt,
            steps,
            source_off_time,
            probes,
            monitors,
            ringdown,
            volume_dft,
            symmetry_factor,
            warnings: self.warnings,
        })
    }

    // ---- flux plane construction -------------------------------------------

    fn build_flux(&self, s: &PlaneRect) -> ResolvedFlux {
        let g = &self.eps.grid;
        let dx = g.dx;
        let da = dx * dx;
        let (t1a, t2a) = tangential_axes(s.normal);
        let orient = s.orientation as f64;
        // Component pairs (E, H, sign) such that
        // S_n = sum(sign * E_t1 * H_t2).
        let pairs: [(Component, Component, f64); 2] = match s.normal {
            0 => [
                (Component::Ey, Component::Hz, 1.0),
                (Component::Ez, Component::Hy, -1.0),
            ],
            1 => [
                (Component::Ez, Component::Hx, 1.0),
                (Component::Ex, Component::Hz, -1.0),
            ],
            _ => [
                (Component::Ex, Component::Hy, 1.0),
                (Component::Ey, Component::Hx, -1.0),
            ],
        };
        let n_idx =
            (((s.coordinate - g.origin[s.normal]) / dx).round() as isize).clamp(1, g.dims[s.normal] as isize - 1) as usize;
        let strides = [1usize, self.sy, self.sz];
        let mut terms = Vec::new();
        for (e_comp, h_comp, sign) in pairs {
            let e_off = e_comp.offset();
            // Index ranges of the E sub-lattice within the rectangle.
            let range = |axis: usize, bounds: (f64, f64)| -> (usize, usize) {
                let off = e_off[axis];
                let lo = ((bounds.0 - g.origin[axis]) / dx - off - 1e-9).ceil().max(0.0) as usize;
                let hi_f = ((bounds.1 - g.origin[axis]) / dx - off + 1e-9).floor();
                let max = if off > 0.0 { g.dims[axis] - 1 } else { g.dims[axis] };
                let hi = hi_f.max(-1.0).min(max as f64) as isize;
                (lo, (hi + 1).max(lo as isize) as usize)
            };
            let (t1_lo, t1_hi) = range(t1a, s.t1);
            let (t2_lo, t2_hi) = range(t2a, s.t2);
            for u in t1_lo..t1_hi {
                for v in t2_lo..t2_hi {
                    let mut ijk = [0usize; 3];
                    ijk[s.normal] = n_idx;
                    ijk[t1a] = u;
                    ijk[t2a] = v;
                    let c = (ijk[2] * self.gy + ijk[1]) * self.gx + ijk[0];
                    // Mirror-plane samples are shared between half-domains.
                    let mut w = sign * orient * da;
                    for (axis, &idx) in [t1a, t2a].iter().zip([u, v].iter()) {
                        if self.mirror_lo[*axis].is_some() && idx == 0 && e_off[*axis] == 0.0 {
                            w *= 0.5;
                        }
                    }
                    terms.push(FluxTerm {
                        e_idx: c as u32,
                        ha_idx: (c - strides[s.normal]) as u32,
                        hb_idx: c as u32,
                        w,
                        e_comp,
                        h_comp,
                    });
                }
            }
        }
        ResolvedFlux { terms }
    }

    /// Builds the six budget faces inset from the non-PML box; faces on
    /// wrapped axes or on a mirror plane are absent.
    fn build_budget_faces(
        &self,
        plan: &SimulationPlan,
        inset: f64,
    ) -> [Option<ResolvedFlux>; 6] {
        let bx = plan.non_pml_box();
        let mut out: [Option<ResolvedFlux>; 6] = Default::default();
        for a in 0..3 {
            if self.axes[a].wrapped() {
                continue;
            }
            let (t1a, t2a) = tangential_axes(a);
            let t1 = (bx[t1a].0, bx[t1a].1);
            let t2 = (bx[t2a].0, bx[t2a].1);
            for (side, coord, orientation) in [
                (0usize, bx[a].0 + inset, -1i8),
                (1usize, bx[a].1 - inset, 1i8),
            ] {
                if side == 0 && self.mirror_lo[a].is_some() {
                    continue;
                }
                // Only measure through faces backed by PML (open sides).
                let open = match plan.axis(a) {
                    AxisKind::Faces { lo, hi } => {
                        let f = if side == 0 { lo } else { hi };
                        matches!(f, Face::Pml { .. })
                    }
                    _ => false,
                };
                if !open {
                    continue;
                }
                let rect = PlaneRect { normal: a, coordinate: coord, t1, t2, orientation };
                out[2 * a + side] = Some(self.build_flux(&rect));
            }
        }
        out
    }
}

/// See [`super::impose_mirror_symmetry`].
pub fn impose_mirror_symmetry(
    plan: &SimulationPlan,
    axis: usize,
    parity: Parity,
) -> Result<SimulationPlan, PlanError> {
    let g = plan.eps.grid;
    let dx = g.dx;
    let n = g.dims[axis];
    if plan.axis(axis).is_wrapped() {
        return Err(PlanError::Invalid(
            "cannot impose a mirror on a periodic axis".into(),
        ));
    }
    // The plane must fall on a node of this axis.
    let i0f = (0.0 - g.origin[axis]) / dx;
    let i0 = i0f.round() as isize;
    if (i0f - i0 as f64).abs() > 1e-6 || i0 <= 0 || i0 as usize >= n {
        return Err(PlanError::Invalid(format!(
            "mirror plane x{axis} = 0 does not fall on an interior grid plane (index {i0f})"
        )));
    }
    let i0 = i0 as usize;

    // Geometry symmetry check on all four sampled lattices.
    let half_off = |comp: usize| -> f64 {
        // x-offset of eps arrays along `axis`: eps_e<axis> is half-offset.
        match comp {
            0 => [0.5, 0.0, 0.0][axis],
            1 => [0.0, 0.5, 0.0][axis],
            2 => [0.0, 0.0, 0.5][axis],
            _ => 0.5,
        }
    };
    let arrays = [&plan.eps.eps_ex, &plan.eps.eps_ey, &plan.eps.eps_ez, &plan.eps.eps_cell];
    let (gx, gy, gz) = (g.dims[0] + 1, g.dims[1] + 1, g.dims[2] + 1);
    let reach = i0.min(n - i0);
    for (ci, arr) in arrays.iter().enumerate() {
        let off = half_off(ci);
        for m in 0..reach {
            // Sample index i0+m mirrors to i0-m (node) or i0-m-1 (half).
            let mirror = if off == 0.0 {
                i0 as isize - m as isize
            } else {
                i0 as isize - m as isize - 1
            };
            if mirror < 0 {
                break;
            }
            // Spot-check a coarse subsample of the transverse plane.
            let (t1a, t2a) = tangential_axes(axis);
            let dims_t = [gx, gy, gz];
            let step1 = (dims_t[t1a] / 16).max(1);
            let step2 = (dims_t[t2a] / 16).max(1);
            let mut u = 0;
            while u < dims_t[t1a] {
                let mut v = 0;
                while v < dims_t[t2a] {
                    let mut a_ijk = [0usize; 3];
                    a_ijk[axis] = i0 + m;
                    a_ijk[t1a] = u;
                    a_ijk[t2a] = v;
                    let mut b_ijk = a_ijk;
                    b_ijk[axis] = mirror as usize;
                    let lin = |p: [usize; 3]| (p[2] * gy + p[1]) * gx + p[0];
                    let (va, vb) = (arr[lin(a_ijk)], arr[lin(b_ijk)]);
                    if (va - vb).abs() > 1e-9 * (1.0 + va.abs()) {
                        return Err(PlanError::AsymmetricUnderMirror(format!(
                            "permittivity differs across the plane at offset {m} cells"
                        )));
                    }
                    v += step2;
                }
                u += step1;
            }
        }
    }

    // Sources must sit on the plane and survive the parity.
    for s in &plan.sources {
        if s.position[axis].abs() > dx / 2.0 + 1e-9 {
            return Err(PlanError::AsymmetricUnderMirror(format!(
                "source at {:?} is off the mirror plane",
                s.position
            )));
        }
        let on_plane = s.component.offset()[axis] == 0.0;
        if on_plane {
            // On-plane components are forced to zero by Minus parity when
            // they are electric-tangential, i.e. exactly the PEC-pinned set.
            let e_tangential = matches!(
                (axis, s.component),
                (0, Component::Ey) | (0, Component::Ez) | (1, Component::Ex) | (1, Component::Ez) | (2, Component::Ex) | (2, Component::Ey)
            );
            if e_tangential && parity == Parity::Minus {
                return Err(PlanError::AsymmetricUnderMirror(format!(
                    "{} on the plane is forced to zero by Minus parity",
                    s.component.name()
                )));
            }
        }
    }

    // Slice the permittivity arrays to the kept half.
    let keep = n - i0;
    let mut dims = g.dims;
    dims[axis] = keep;
    let mut origin = g.origin;
    origin[axis] = 0.0;
    let new_grid = GridSpec { origin, dims, dx };
    let (ngx, ngy, ngz) = (dims[0] + 1, dims[1] + 1, dims[2] + 1);
    let slice = |arr: &Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; ngx * ngy * ngz];
        for k in 0..ngz {
            for j in 0..ngy {
                for i in 0..ngx {
                    let mut src = [i, j, k];
                    src[axis] += i0;
                    let sc = (src[2] * gy + src[1]) * gx + src[0];
                    out[(k * ngy + j) * ngx + i] = arr[sc];
                }
            }
        }
        out
    };
    let eps = PermittivityGrid {
        grid: new_grid,
        resolution: plan.eps.resolution,
        eps_ex: slice(&plan.eps.eps_ex),
        eps_ey: slice(&plan.eps.eps_ey),
        eps_ez: slice(&plan.eps.eps_ez),
        eps_cell: slice(&plan.eps.eps_cell),
    };

    let mut out = plan.clone();
    out.eps = Arc::new(eps);
    let hi = match plan.axis(axis) {
        AxisKind::Faces { hi, .. } => *hi,
        _ => unreachable!(),
    };
    let kind = AxisKind::Faces { lo: Face::Mirror { parity }, hi };
    match axis {
        0 => out.x = kind,
        1 => out.y = kind,
        _ => out.z = kind,
    }
    // The negative side of a symmetric source pair is represented by the
    // mirror boundary itself; keep only the non-negative side.
    out.sources.retain(|s| s.position[axis] >= 0.0);
    out.probes.retain(|p| p.position[axis] >= -dx / 2.0);
    out.monitors.retain(|m| {
        if m.surface.normal == axis {
            m.surface.coordinate >= 0.0
        } else {
            true
        }
    });
    for m in &mut out.monitors {
        if m.surface.normal != axis {
            let (t1a, _) = tangential_axes(m.surface.normal);
            let r = if t1a == axis { &mut m.surface.t1 } else { &mut m.surface.t2 };
            r.0 = r.0.max(0.0);
        }
    }
    Ok(out)
}
