//! Solver invariants: stability at the Courant bound, reciprocity, Bloch
//! consistency, mirror-symmetry equivalence, monitor linearity, PML quality.

use nwfd_core::fdtd::{
    impose_mirror_symmetry, run, AxisKind, Component, Face, MonitorSpec, Parity, PlaneRect,
    ProbeSpec, PulseKind, SimulationPlan, Simulation, SourceSpec,
};
use nwfd_core::geometry::{
    build_periodic_layout, sample_structure, DeviceSpec, GridSpec, Material, MaterialStack,
    PermittivityGrid, StructureKind,
};
use num_complex::Complex64;
use std::sync::Arc;

fn uniform_eps(dims: [usize; 3], dx: f64, material: Material) -> Arc<PermittivityGrid> {
    let grid = GridSpec { origin: [0.0, 0.0, 0.0], dims, dx };
    Arc::new(
        sample_structure(
            &StructureKind::Uniform(material),
            &MaterialStack::default(),
            grid,
            160.0 / dx,
            false,
            None,
        )
        .unwrap()
        .eps,
    )
}

#[test]
fn zero_fields_stay_zero_without_sources() {
    let eps = uniform_eps([8, 8, 8], 10.0, Material::Air);
    let mut plan = SimulationPlan::new(eps);
    plan.run_time = 500.0;
    plan.monitors.push(MonitorSpec {
        name: "m".into(),
        surface: PlaneRect {
            normal: 2,
            coordinate: 40.0,
            t1: (10.0, 70.0),
            t2: (10.0, 70.0),
            orientation: 1,
        },
        frequencies: vec![1.0 / 640.0],
    });
    let res = run(&plan).unwrap();
    assert!(res.monitors[0].flux.iter().all(|&p| p == 0.0));
}

/// Discrete leapfrog energy `(E^n, eps E^n) + (H^{n-1/2}, H^{n+1/2})` is
/// conserved in a lossless PEC box arbitrarily close to the Courant bound.
#[test]
fn energy_bounded_at_courant_limit() {
    let dims = [14, 14, 14];
    let eps = uniform_eps(dims, 10.0, Material::Air);
    let mut plan = SimulationPlan::new(eps.clone());
    plan.courant = 0.9999 / 3f64.sqrt();
    plan.run_time = 0.0;
    let mut sim = Simulation::<f64>::new(&plan).unwrap();
    // Deterministic pseudo-random interior fields.
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut rnd = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for comp in [
        Component::Ex,
        Component::Ey,
        Component::Ez,
        Component::Hx,
        Component::Hy,
        Component::Hz,
    ] {
        for k in 2..dims[2] - 2 {
            for j in 2..dims[1] - 2 {
                for i in 2..dims[0] - 2 {
                    sim.set_sample(comp, i, j, k, rnd());
                }
            }
        }
    }
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    // Conserved leapfrog form: (E^n, eps E^n) + (H^{n-1/2}, H^{n+1/2}),
    // i.e. E before the step paired with the H straddle across it.
    let mut u0 = None;
    let mut max_dev = 0.0f64;
    for step in 0..10_000 {
        if step % 20 == 0 {
            let e_now = [
                sim.component(Component::Ex).to_vec(),
                sim.component(Component::Ey).to_vec(),
                sim.component(Component::Ez).to_vec(),
            ];
            let h_prev = [
                sim.component(Component::Hx).to_vec(),
                sim.component(Component::Hy).to_vec(),
                sim.component(Component::Hz).to_vec(),
            ];
            sim.step_once().unwrap();
            let mut u = 0.0;
            for (e, eps_arr) in e_now.iter().zip([&eps.eps_ex, &eps.eps_ey, &eps.eps_ez]) {
                u += e.iter().zip(eps_arr.iter()).map(|(v, ep)| ep * v * v).sum::<f64>();
            }
            u += dot(sim.component(Component::Hx), &h_prev[0]);
            u += dot(sim.component(Component::Hy), &h_prev[1]);
            u += dot(sim.component(Component::Hz), &h_prev[2]);
            u *= 0.5;
            match u0 {
                None => u0 = Some(u),
                Some(u0) => max_dev = max_dev.max((u / u0 - 1.0).abs()),
            }
        } else {
            sim.step_once().unwrap();
        }
    }
    assert!(
        max_dev < 1e-6,
        "discrete energy drifted by {max_dev:.3e} over 1e4 steps"
    );
}

#[test]
fn vacuum_reciprocity_source_probe_swap() {
    let eps = uniform_eps([36, 30, 30], 10.0, Material::Air);
    let a = [90.0, 110.0, 150.0];
    let b = [260.0, 170.0, 130.0];
    let mk = |src: [f64; 3], prb: [f64; 3]| -> Vec<Complex64> {
        let mut plan = SimulationPlan::new(eps.clone());
        plan.x = AxisKind::pml_faces(80.0);
        plan.y = AxisKind::pml_faces(80.0);
        plan.z = AxisKind::pml_faces(80.0);
        let f0 = 1.0 / 400.0;
        plan.sources.push(SourceSpec {
            position: src,
            component: Component::Ez,
            center_freq: f0,
            bandwidth: 0.4 * f0,
            amplitude: 1.0,
            kind: PulseKind::Broadband,
        });
        plan.probes.push(ProbeSpec { position: prb, component: Component::Ez });
        plan.run_time = 1200.0;
        run(&plan).unwrap().probes[0].series.clone()
    };
    let ab = mk(a, b);
    let ba = mk(b, a);
    let peak = ab.iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(peak > 0.0);
    let max_diff = ab
        .iter()
        .zip(ba.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(
        max_diff / peak < 1e-6,
        "reciprocity violated: {:.3e} relative",
        max_diff / peak
    );
}

fn slab_unit_cell(dx: f64, spacing: f64) -> Arc<PermittivityGrid> {
    let spec = DeviceSpec::default();
    let nx = (spacing / dx).round() as usize;
    let ny = (700.0 / dx).round() as usize;
    let grid = GridSpec {
        origin: [0.0, -(ny as f64) * dx / 2.0, 0.0],
        dims: [nx, ny, 1],
        dx,
    };
    let layout = build_periodic_layout(&spec, spacing, 1).unwrap();
    let kind = StructureKind::VerticalSlab { layout, width: spec.width };
    Arc::new(
        sample_structure(&kind, &MaterialStack::default(), grid, spacing / dx, true, Some(spacing))
            .unwrap()
            .eps,
    )
}

fn bloch_slab_plan(eps: Arc<PermittivityGrid>, k: f64, f0: f64) -> SimulationPlan {
    let mut plan = SimulationPlan::new(eps);
    plan.courant = 0.45;
    plan.x = AxisKind::Bloch { k };
    plan.y = AxisKind::pml_faces(120.0);
    plan.z = AxisKind::Periodic;
    plan.sources.push(SourceSpec {
        position: [37.0, 11.0, 0.0],
        component: Component::Ey,
        center_freq: f0,
        bandwidth: 0.35 * f0,
        amplitude: 1.0,
        kind: PulseKind::Broadband,
    });
    plan.probes.push(ProbeSpec { position: [61.0, 17.0, 0.0], component: Component::Ey });
    plan.probes.push(ProbeSpec { position: [12.0, -41.0, 0.0], component: Component::Ey });
    plan.run_time = 70_000.0;
    plan
}

fn dominant_freq(plan: &SimulationPlan, f_lo: f64, f_hi: f64) -> f64 {
    let res = run(plan).unwrap();
    let start = (res.source_off_time / res.dt).ceil() as usize;
    let series = &res.probes[0].series[start..];
    let out = nwfd_core::analysis::harmonic_inversion(
        series,
        res.dt,
        (f_lo, f_hi),
        &nwfd_core::analysis::HarminvOptions::default(),
    )
    .unwrap();
    assert!(!out.modes.is_empty(), "no mode found");
    out.modes[0].frequency
}

#[test]
fn bloch_spectra_periodic_in_reciprocal_lattice() {
    let spacing = 160.0;
    let eps = slab_unit_cell(8.0, spacing);
    let f0 = 0.26 / spacing;
    let band = (0.15 / spacing, 0.35 / spacing);
    // k = 0 vs k = 2 pi / a.
    let f_zero = dominant_freq(&bloch_slab_plan(eps.clone(), 0.0, f0), band.0, band.1);
    let k_full = 2.0 * std::f64::consts::PI / spacing;
    let f_wrap = dominant_freq(&bloch_slab_plan(eps.clone(), k_full, f0), band.0, band.1);
    assert!(
        (f_zero - f_wrap).abs() / f_zero < 1e-6,
        "Brillouin periodicity violated: {f_zero} vs {f_wrap}"
    );
    // Time reversal: k and -k degenerate.
    let k = 0.3 * k_full;
    let f_fwd = dominant_freq(&bloch_slab_plan(eps.clone(), k, f0), band.0, band.1);
    let f_bwd = dominant_freq(&bloch_slab_plan(eps, -k, f0), band.0, band.1);
    assert!(
        (f_fwd - f_bwd).abs() / f_fwd < 1e-6,
        "time-reversal degeneracy violated: {f_fwd} vs {f_bwd}"
    );
}

#[test]
fn monitor_power_is_quadratic_in_amplitude() {
    let eps = uniform_eps([20, 20, 24], 10.0, Material::Air);
    let mk = |amp: f64| -> Vec<f64> {
        let mut plan = SimulationPlan::new(eps.clone());
        plan.z = AxisKind::pml_faces(50.0);
        plan.x = AxisKind::pml_faces(50.0);
        plan.y = AxisKind::pml_faces(50.0);
        let f0 = 1.0 / 320.0;
        plan.sources.push(SourceSpec {
            position: [100.0, 100.0, 80.0],
            component: Component::Ex,
            center_freq: f0,
            bandwidth: 0.3 * f0,
            amplitude: amp,
            kind: PulseKind::Broadband,
        });
        plan.monitors.push(MonitorSpec {
            name: "up".into(),
            surface: PlaneRect {
                normal: 2,
                coordinate: 180.0,
                t1: (60.0, 140.0),
                t2: (60.0, 140.0),
                orientation: 1,
            },
            frequencies: vec![f0, 1.1 * f0],
        });
        plan.run_time = 900.0;
        run(&plan).unwrap().monitors[0].flux.clone()
    };
    let p1 = mk(1.0);
    let p2 = mk(2.0);
    for (a, b) in p1.iter().zip(p2.iter()) {
        assert!(a.abs() > 0.0);
        assert!(((b / a) - 4.0).abs() < 1e-10, "flux ratio {}", b / a);
    }
}

/// Full-domain run vs the half-domain run produced by
/// `impose_mirror_symmetry` about y = 0 (electric-wall parity for an Ey
/// source): probe series must agree to roundoff.
#[test]
fn mirror_symmetry_halves_domain_exactly() {
    let spec = DeviceSpec::default();
    let dx = 8.0;
    let layout = build_periodic_layout(&spec, 160.0, 3).unwrap();
    let ny = 50;
    let grid = GridSpec {
        origin: [-100.0, -(ny as f64) * dx / 2.0, 0.0],
        dims: [85, ny, 1],
        dx,
    };
    let kind = StructureKind::VerticalSlab { layout, width: spec.width };
    let eps = Arc::new(
        sample_structure(&kind, &MaterialStack::default(), grid, 160.0 / dx, true, None)
            .unwrap()
            .eps,
    );
    let mut plan = SimulationPlan::new(eps);
    plan.courant = 0.45;
    plan.x = AxisKind::pml_faces(96.0);
    plan.y = AxisKind::Faces { lo: Face::Pec, hi: Face::Pec };
    plan.z = AxisKind::Periodic;
    let f0 = 0.25 / 160.0;
    // Symmetric pair of Ey sources at y = +/- dx/2 (Ey is even about y = 0
    // under Minus parity).
    for ys in [dx / 2.0, -dx / 2.0] {
        plan.sources.push(SourceSpec {
            position: [43.0, ys, 0.0],
            component: Component::Ey,
            center_freq: f0,
            bandwidth: 0.3 * f0,
            amplitude: 1.0,
            kind: PulseKind::Broadband,
        });
    }
    plan.probes.push(ProbeSpec { position: [120.0, dx / 2.0, 0.0], component: Component::Ey });
    plan.probes.push(ProbeSpec { position: [-60.0, 3.0 * dx, 0.0], component: Component::Ey });
    plan.run_time = 1000.0;

    let full = run(&plan).unwrap();
    let half_plan = impose_mirror_symmetry(&plan, 1, Parity::Minus).unwrap();
    assert_eq!(half_plan.sources.len(), 1);
    let half = run(&half_plan).unwrap();

    for (pf, ph) in full.probes.iter().zip(half.probes.iter()) {
        let peak = pf.series.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(peak > 0.0);
        let max_diff = pf
            .series
            .iter()
            .zip(ph.series.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(
            max_diff / peak < 1e-9,
            "half-domain mismatch {:.3e} relative",
            max_diff / peak
        );
    }
    assert_eq!(half.symmetry_factor, 2.0);
}

#[test]
fn mirror_rejects_asymmetric_sources() {
    let eps = uniform_eps([16, 16, 16], 10.0, Material::Air);
    let mut plan = SimulationPlan::new(eps);
    let f0 = 1.0 / 320.0;
    plan.sources.push(SourceSpec {
        position: [80.0, 45.0, 80.0],
        component: Component::Ey,
        center_freq: f0,
        bandwidth: 0.3 * f0,
        amplitude: 1.0,
        kind: PulseKind::Broadband,
    });
    // Grid origin is 0: the y = 0 plane is the domain edge, not interior.
    assert!(impose_mirror_symmetry(&plan, 1, Parity::Minus).is_err());
}

#[test]
fn plus_parity_mirror_matches_magnetic_wall_pair() {
    // A z-polarized source pair with opposite signs at +/- dx/2 about x = 0
    // is the Plus-parity sector (Ez even function of x? No: under Plus
    // parity Ez(-x) = +Ez(x)); use the equivalence run to pin the engine
    // arithmetic rather than the sign convention.
    let dx = 10.0;
    let dims = [40, 30, 1];
    let grid = GridSpec { origin: [-200.0, 0.0, 0.0], dims, dx };
    let eps = Arc::new(
        sample_structure(
            &StructureKind::Uniform(Material::Substrate),
            &MaterialStack::default(),
            grid,
            160.0 / dx,
            false,
            None,
        )
        .unwrap()
        .eps,
    );
    let mut plan = SimulationPlan::new(eps);
    plan.courant = 0.45;
    plan.x = AxisKind::Faces { lo: Face::Pec, hi: Face::Pec };
    plan.y = AxisKind::pml_faces(60.0);
    plan.z = AxisKind::Periodic;
    let f0 = 1.0 / 500.0;
    // Ez at x = +/- dx/2, same sign: even function of x = Plus parity.
    for xs in [dx / 2.0, -dx / 2.0] {
        plan.sources.push(SourceSpec {
            position: [xs, 140.0, 0.0],
            component: Component::Ez,
            center_freq: f0,
            bandwidth: 0.3 * f0,
            amplitude: 1.0,
            kind: PulseKind::Broadband,
        });
    }
    plan.probes.push(ProbeSpec { position: [dx / 2.0, 170.0, 0.0], component: Component::Ez });
    plan.run_time = 800.0;
    let full = run(&plan).unwrap();
    let half_plan = impose_mirror_symmetry(&plan, 0, Parity::Plus).unwrap();
    let half = run(&half_plan).unwrap();
    let pf = &full.probes[0].series;
    let ph = &half.probes[0].series;
    let peak = pf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_diff = pf
        .iter()
        .zip(ph.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(
        max_diff / peak < 1e-9,
        "magnetic-wall mismatch {:.3e}",
        max_diff / peak
    );
}
