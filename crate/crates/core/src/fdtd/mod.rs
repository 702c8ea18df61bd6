//! Time-domain Maxwell solver on a Yee lattice.
//!
//! Cubic cells, nonmagnetic materials, natural units (`c = 1`, lengths and
//! times in nm). Per axis the boundary is one of: PEC faces, stretched
//! coordinate PML (CPML) faces, a mirror-symmetry plane on the low face,
//! plain periodic wrap, or Bloch-periodic wrap with phase `e^{ik L}`.
//! Any Bloch axis with a genuinely complex phase forces complex field
//! storage; everything else runs on real fields.
//!
//! A [`SimulationPlan`] bundles the sampled permittivity, boundaries,
//! sources, probes, flux monitors and measurement windows; [`run`] executes
//! it and returns probe series, monitor spectra, ring-down energy/flux
//! windows and optional volume DFT field profiles.

mod engine;
mod pml;
mod scalar;
pub mod snapshot;

pub use engine::Simulation;
pub use scalar::FieldScalar;

use crate::geometry::PermittivityGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

/// Field component identifiers (Yee sub-lattices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Ex,
    Ey,
    Ez,
    Hx,
    Hy,
    Hz,
}

impl Component {
    pub const ELECTRIC: [Component; 3] = [Component::Ex, Component::Ey, Component::Ez];

    /// Position offset of this component inside a cell, in units of dx.
    pub fn offset(self) -> [f64; 3] {
        match self {
            Component::Ex => [0.5, 0.0, 0.0],
            Component::Ey => [0.0, 0.5, 0.0],
            Component::Ez => [0.0, 0.0, 0.5],
            Component::Hx => [0.0, 0.5, 0.5],
            Component::Hy => [0.5, 0.0, 0.5],
            Component::Hz => [0.5, 0.5, 0.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Ex => "Ex",
            Component::Ey => "Ey",
            Component::Ez => "Ez",
            Component::Hx => "Hx",
            Component::Hy => "Hy",
            Component::Hz => "Hz",
        }
    }
}

/// Mirror parity, defined by the field transform `E(Mr) = p * M E(r)`,
/// `H(Mr) = -p * M H(r)` where `M` is the reflection matrix of the plane.
///
/// `Minus` makes the plane an electric wall (tangential E odd, zero on the
/// plane; the arithmetic is identical to PEC). `Plus` makes it a magnetic
/// wall. For the `Ey`-dominant modes of this device the correct choice is
/// `Plus` about `x = 0` and `Minus` about `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Plus,
    Minus,
}

/// One face of the domain on a non-periodic axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Face {
    /// Perfect electric conductor (default outermost backing).
    Pec,
    /// Absorbing layer of the given thickness in nm, inside the domain.
    Pml { thickness: f64 },
    /// Mirror-symmetry plane; only supported on the low face.
    Mirror { parity: Parity },
}

/// Boundary treatment of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AxisKind {
    Faces { lo: Face, hi: Face },
    /// Plain periodic wrap (Bloch with zero phase).
    Periodic,
    /// Bloch-periodic wrap with wavenumber `k` in rad/nm.
    Bloch { k: f64 },
}

impl AxisKind {
    pub fn pml_faces(thickness: f64) -> Self {
        AxisKind::Faces {
            lo: Face::Pml { thickness },
            hi: Face::Pml { thickness },
        }
    }

    fn is_wrapped(&self) -> bool {
        matches!(self, AxisKind::Periodic | AxisKind::Bloch { .. })
    }
}

/// Temporal envelope of a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseKind {
    Broadband,
    Narrowband,
}

/// A point dipole source: Gaussian-envelope sinusoid injected additively
/// into one electric field component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    /// Position in nm.
    pub position: [f64; 3],
    pub component: Component,
    /// Carrier frequency in 1/nm (reciprocal vacuum wavelength).
    pub center_freq: f64,
    /// Gaussian bandwidth in 1/nm; the envelope is
    /// `exp(-(t-t0)^2 / (2 tau^2))` with `tau = 1/(2 pi bandwidth)`.
    pub bandwidth: f64,
    pub amplitude: f64,
    pub kind: PulseKind,
}

impl SourceSpec {
    pub fn tau(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * self.bandwidth)
    }

    /// Envelope delay; the pulse is cut off at `2 * t_start_delay`.
    pub fn t_peak(&self) -> f64 {
        5.0 * self.tau()
    }

    pub fn t_end(&self) -> f64 {
        10.0 * self.tau()
    }

    pub fn waveform(&self, t: f64) -> f64 {
        if t >= self.t_end() {
            return 0.0;
        }
        let tau = self.tau();
        let x = (t - self.t_peak()) / tau;
        let w = 2.0 * std::f64::consts::PI * self.center_freq;
        self.amplitude * (-0.5 * x * x).exp() * (w * (t - self.t_peak())).cos()
    }
}

/// A point probe recording one field component every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub position: [f64; 3],
    pub component: Component,
}

/// Axis-aligned rectangle used by flux monitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneRect {
    /// Normal axis: 0 = x, 1 = y, 2 = z.
    pub normal: usize,
    /// Plane coordinate along the normal axis, nm.
    pub coordinate: f64,
    /// Bounds (lo, hi) in nm along the two tangential axes, in axis order.
    pub t1: (f64, f64),
    pub t2: (f64, f64),
    /// +1 for flux counted positive along +normal, -1 otherwise.
    pub orientation: i8,
}

/// Running discrete-frequency transform of the tangential fields on a
/// rectangle; yields the power spectrum through the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSpec {
    pub name: String,
    pub surface: PlaneRect,
    /// Frequencies in 1/nm.
    pub frequencies: Vec<f64>,
}

/// Volume DFT of the electric field at a handful of frequencies,
/// accumulated from `t_start` on (typically the ring-down, so the profile
/// is mode-dominated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeDftSpec {
    pub frequencies: Vec<f64>,
    pub t_start: f64,
    /// Accumulate every this many steps.
    pub stride: usize,
}

/// Ring-down measurement: consecutive windows over which the total field
/// energy and the instantaneous outward power through the six budget faces
/// are averaged. `Q_i = omega * <U> / <P_i>` once the field is
/// single-mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingdownSpec {
    pub t_start: f64,
    /// Window length in nm (choose an integer number of optical periods so
    /// the 2-omega oscillation of real-field energies averages out).
    pub window: f64,
    pub count: usize,
    /// Budget faces are inset this far (nm) from the inner PML boundary.
    pub face_inset: f64,
}

/// Index of a budget face in ring-down measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetFace {
    XLo = 0,
    XHi = 1,
    YLo = 2,
    YHi = 3,
    ZLo = 4,
    ZHi = 5,
}

/// Complete description of one FDTD run.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub eps: Arc<PermittivityGrid>,
    /// Courant factor `S`, with `dt = S * dx`; must satisfy
    /// `S <= 1/sqrt(D)` for `D` active spatial dimensions.
    pub courant: f64,
    pub x: AxisKind,
    pub y: AxisKind,
    pub z: AxisKind,
    pub sources: Vec<SourceSpec>,
    pub probes: Vec<ProbeSpec>,
    pub monitors: Vec<MonitorSpec>,
    pub volume_dft: Option<VolumeDftSpec>,
    pub ringdown: Option<RingdownSpec>,
    /// Total run time in nm.
    pub run_time: f64,
    /// Steps between NaN scans (0 disables).
    pub check_interval: usize,
    /// Steps between monitor DFT accumulations.
    pub dft_stride: usize,
}

impl SimulationPlan {
    pub fn new(eps: Arc<PermittivityGrid>) -> Self {
        Self {
            eps,
            courant: 0.5 / 3f64.sqrt(),
            x: AxisKind::Faces { lo: Face::Pec, hi: Face::Pec },
            y: AxisKind::Faces { lo: Face::Pec, hi: Face::Pec },
            z: AxisKind::Faces { lo: Face::Pec, hi: Face::Pec },
            sources: Vec::new(),
            probes: Vec::new(),
            monitors: Vec::new(),
            volume_dft: None,
            ringdown: None,
            run_time: 0.0,
            check_interval: 256,
            dft_stride: 4,
        }
    }

    pub fn axis(&self, a: usize) -> &AxisKind {
        match a {
            0 => &self.x,
            1 => &self.y,
            _ => &self.z,
        }
    }

    /// Number of dimensions that constrain the Courant bound: axes with
    /// more than one cell, or a Bloch wrap with nonzero wavenumber.
    pub fn active_dims(&self) -> usize {
        (0..3)
            .filter(|&a| {
                self.eps.grid.dims[a] > 1
                    || matches!(self.axis(a), AxisKind::Bloch { k } if *k != 0.0)
            })
            .count()
            .max(1)
    }

    pub fn dt(&self) -> f64 {
        self.courant * self.eps.grid.dx
    }

    /// True when any axis carries a phase that cannot be represented on
    /// real fields (anything except 0 and pi/L wavenumbers).
    pub fn needs_complex(&self) -> bool {
        (0..3).any(|a| {
            if let AxisKind::Bloch { k } = self.axis(a) {
                let length = self.eps.grid.dims[a] as f64 * self.eps.grid.dx;
                let phase = k * length;
                phase.sin().abs() > 1e-12
            } else {
                false
            }
        })
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let dims = self.eps.grid.dims;
        if dims.iter().any(|&d| d == 0) {
            return Err(PlanError::Invalid("grid has a zero dimension".into()));
        }
        let bound = 1.0 / (self.active_dims() as f64).sqrt();
        if !(self.courant > 0.0) || self.courant > bound + 1e-12 {
            return Err(PlanError::CourantBound { courant: self.courant, bound });
        }
        for a in 0..3 {
            if let AxisKind::Faces { lo, hi } = self.axis(a) {
                if matches!(hi, Face::Mirror { .. }) {
                    return Err(PlanError::Invalid(format!(
                        "mirror face on the high side of axis {a} is not supported"
                    )));
                }
                for f in [lo, hi] {
                    if let Face::Pml { thickness } = f {
                        let cells = (thickness / self.eps.grid.dx).round() as usize;
                        if cells < 4 {
                            return Err(PlanError::Invalid(format!(
                                "PML on axis {a} thinner than 4 cells ({thickness} nm)"
                            )));
                        }
                        if 2 * cells >= dims[a] {
                            return Err(PlanError::Invalid(format!(
                                "PML layers fill axis {a} entirely"
                            )));
                        }
                    }
                }
            }
        }
        let interior = self.non_pml_box();
        for s in &self.sources {
            if s.bandwidth <= 0.0 || s.center_freq <= 0.0 {
                return Err(PlanError::Invalid(format!(
                    "source needs positive center frequency and bandwidth, got {} / {}",
                    s.center_freq, s.bandwidth
                )));
            }
            if !inside(&interior, s.position) {
                return Err(PlanError::SourceInPml(s.position));
            }
        }
        for m in &self.monitors {
            if m.surface.normal > 2 {
                return Err(PlanError::Invalid("monitor normal axis out of range".into()));
            }
            if !monitor_inside(&interior, &m.surface) {
                return Err(PlanError::MonitorInPml(m.name.clone()));
            }
        }
        Ok(())
    }

    /// The interior (non-PML) box in nm: [(lo, hi); 3].
    pub fn non_pml_box(&self) -> [(f64, f64); 3] {
        let g = &self.eps.grid;
        let mut out = [(0.0, 0.0); 3];
        for a in 0..3 {
            let lo_edge = g.origin[a];
            let hi_edge = g.origin[a] + g.dims[a] as f64 * g.dx;
            let (mut lo, mut hi) = (lo_edge, hi_edge);
            if let AxisKind::Faces { lo: fl, hi: fh } = self.axis(a) {
                if let Face::Pml { thickness } = fl {
                    lo += thickness;
                }
                if let Face::Pml { thickness } = fh {
                    hi -= thickness;
                }
            }
            out[a] = (lo, hi);
        }
        out
    }
}

fn inside(bx: &[(f64, f64); 3], p: [f64; 3]) -> bool {
    (0..3).all(|a| p[a] >= bx[a].0 - 1e-9 && p[a] <= bx[a].1 + 1e-9)
}

fn monitor_inside(bx: &[(f64, f64); 3], s: &PlaneRect) -> bool {
    let (t1a, t2a) = tangential_axes(s.normal);
    s.coordinate >= bx[s.normal].0 - 1e-9
        && s.coordinate <= bx[s.normal].1 + 1e-9
        && s.t1.0 >= bx[t1a].0 - 1e-9
        && s.t1.1 <= bx[t1a].1 + 1e-9
        && s.t2.0 >= bx[t2a].0 - 1e-9
        && s.t2.1 <= bx[t2a].1 + 1e-9
}

/// Tangential axes of a plane, in axis order.
pub fn tangential_axes(normal: usize) -> (usize, usize) {
    match normal {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Errors raised when building or validating a plan.
#[derive(Debug, Error)]
pub enum PlanError {
    #[error("invalid plan: {0}")]
    Invalid(String),
    #[error("Courant factor {courant} exceeds the stability bound {bound}")]
    CourantBound { courant: f64, bound: f64 },
    #[error("source at {0:?} lies inside a PML region")]
    SourceInPml([f64; 3]),
    #[error("monitor '{0}' extends into a PML region")]
    MonitorInPml(String),
    #[error("source or geometry is not symmetric about the requested mirror plane: {0}")]
    AsymmetricUnderMirror(String),
}

/// Errors raised during stepping.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("non-finite {component} sample at cell ({i}, {j}, {k}) on step {step}")]
    NonFinite {
        component: &'static str,
        i: usize,
        j: usize,
        k: usize,
        step: usize,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// One ring-down measurement window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingdownWindow {
    pub t_start: f64,
    pub t_end: f64,
    /// Mean total field energy over the window (natural units).
    pub energy: f64,
    /// Mean outward power through each budget face, indexed by
    /// [`BudgetFace`]; faces on mirror/periodic axes carry 0.
    pub face_power: [f64; 6],
}

/// Per-monitor power spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonitorResult {
    pub name: String,
    pub frequencies: Vec<f64>,
    /// Power through the surface, positive along the declared orientation.
    pub flux: Vec<f64>,
}

/// Probe output; the series holds the raw sample every step (imaginary part
/// zero for real runs).
#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub spec: ProbeSpec,
    /// Actual (snapped) sample position in nm.
    pub position: [f64; 3],
    pub series: Vec<Complex64>,
}

/// Volume DFT output: per frequency, the three E-component arrays on the
/// full node lattice.
#[derive(Debug, Clone)]
pub struct VolumeDftResult {
    pub frequencies: Vec<f64>,
    pub fields: Vec<[Vec<Complex64>; 3]>,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub dt: f64,
    pub steps: usize,
    /// Time at which the last source has finished.
    pub source_off_time: f64,
    pub probes: Vec<ProbeResult>,
    pub monitors: Vec<MonitorResult>,
    pub ringdown: Vec<RingdownWindow>,
    pub volume_dft: Option<VolumeDftResult>,
    /// Multiplicity factor for volume integrals implied by mirror planes
    /// (2 per active mirror).
    pub symmetry_factor: f64,
    pub warnings: Vec<String>,
}

/// Executes a plan, choosing real or complex field storage as needed.
pub fn run(plan: &SimulationPlan) -> Result<RunResult, RunError> {
    plan.validate()?;
    if plan.needs_complex() {
        Simulation::<Complex64>::new(plan)?.run()
    } else {
        Simulation::<f64>::new(plan)?.run()
    }
}

/// Restricts a plan to the half domain `axis >= plane_coordinate`, replacing
/// the low face by a mirror with the given parity.
///
/// Preconditions: the permittivity must be mirror-symmetric about the plane,
/// every source must sit on the plane (within half a cell), and no source
/// component may be one that the chosen parity forces to zero on the plane.
/// Probes and monitors on the kept side are preserved; monitors crossing the
/// plane are clipped to it.
pub fn impose_mirror_symmetry(
    plan: &SimulationPlan,
    axis: usize,
    parity: Parity,
) -> Result<SimulationPlan, PlanError> {
    engine::impose_mirror_symmetry(plan, axis, parity)
}
