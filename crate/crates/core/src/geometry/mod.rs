//! Parametric device geometry: material stack, device spec, hole layouts.
//!
//! The device is a high-index film ridge (width `w`, thickness `d`) sitting
//! on a substrate, with a row of circular air holes along the ridge axis.
//! The ridge sidewalls and the holes are extended a depth `h` into the
//! substrate. Coordinates: `x` along the waveguide axis, `y` lateral, `z`
//! vertical with `z = 0` at the film-substrate interface.
//!
//! Layouts are specified by gap widths between adjacent hole centers; hole
//! positions are cumulative sums. For a cavity the innermost gap straddles
//! `x = 0` and the gaps grow parabolically outwards.

mod permittivity;

pub use permittivity::{
    build_vertical_slab, sample_permittivity, sample_structure, sample_unit_cell, GridSpec,
    Material, PermittivityGrid, SampledPermittivity, StructureKind,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Refractive indices of the three materials involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialStack {
    /// Film (waveguiding layer) index.
    #[serde(alias = "n_gap")]
    pub n_film: f64,
    /// Substrate index.
    #[serde(alias = "n_dia", alias = "n_diamond")]
    pub n_substrate: f64,
    /// Top cladding index (air).
    pub n_air: f64,
}

impl Default for MaterialStack {
    fn default() -> Self {
        // GaP film on a diamond substrate under air.
        Self { n_film: 3.3, n_substrate: 2.4, n_air: 1.0 }
    }
}

impl MaterialStack {
    /// Guiding requires the index ordering film > substrate > air >= 1.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.n_film > self.n_substrate && self.n_substrate > self.n_air && self.n_air >= 1.0 {
            Ok(())
        } else {
            Err(GeometryError::InvalidStack {
                n_film: self.n_film,
                n_substrate: self.n_substrate,
                n_air: self.n_air,
            })
        }
    }

    pub fn eps_film(&self) -> f64 {
        self.n_film * self.n_film
    }

    pub fn eps_substrate(&self) -> f64 {
        self.n_substrate * self.n_substrate
    }

    pub fn eps_air(&self) -> f64 {
        self.n_air * self.n_air
    }
}

/// All geometric parameters of the hybrid structure. Lengths in nm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    /// Film ridge width `w`.
    #[serde(alias = "w")]
    pub width: f64,
    /// Film thickness `d`.
    #[serde(alias = "d")]
    pub thickness: f64,
    /// Substrate etch depth `h`.
    #[serde(alias = "h")]
    pub etch_depth: f64,
    /// Bulk hole pitch `a_o`.
    #[serde(alias = "a_o")]
    pub pitch: f64,
    /// Center (cavity) hole pitch `a_c`.
    #[serde(alias = "a_c")]
    pub cavity_pitch: f64,
    /// Hole radius `r`.
    #[serde(alias = "r")]
    pub hole_radius: f64,
    /// Number of graded gaps per side of a cavity.
    #[serde(alias = "n_grading")]
    pub grading_periods: u32,
    /// Number of unperturbed bulk gaps beyond the grading, per side.
    #[serde(alias = "n_mirror")]
    pub mirror_periods: u32,
    /// Pitch/radius scale factors applied in order in a taper termination.
    #[serde(default = "default_termination_scalings")]
    pub termination_scalings: Vec<f64>,
}

fn default_termination_scalings() -> Vec<f64> {
    vec![0.95, 0.86, 0.8, 0.75]
}

impl Default for DeviceSpec {
    fn default() -> Self {
        Self {
            width: 192.0,
            thickness: 128.0,
            etch_depth: 640.0,
            pitch: 160.0,
            cavity_pitch: 141.0,
            hole_radius: 43.0,
            grading_periods: 6,
            mirror_periods: 8,
            termination_scalings: default_termination_scalings(),
        }
    }
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.cavity_pitch > 0.0 && self.cavity_pitch <= self.pitch) {
            return Err(GeometryError::InvalidSpec(format!(
                "need 0 < cavity_pitch <= pitch, got {} and {}",
                self.cavity_pitch, self.pitch
            )));
        }
        if 2.0 * self.hole_radius >= self.cavity_pitch {
            return Err(GeometryError::OverlappingHoles {
                gap: self.cavity_pitch,
                diameter: 2.0 * self.hole_radius,
            });
        }
        if !(self.width > 0.0 && self.thickness > 0.0 && self.etch_depth >= 0.0) {
            return Err(GeometryError::InvalidSpec(format!(
                "ridge dimensions must be positive, got w={} d={} h={}",
                self.width, self.thickness, self.etch_depth
            )));
        }
        if self
            .termination_scalings
            .iter()
            .any(|&s| !(s > 0.0 && s <= 1.0))
        {
            return Err(GeometryError::InvalidSpec(format!(
                "termination scalings must lie in (0, 1], got {:?}",
                self.termination_scalings
            )));
        }
        Ok(())
    }

    /// Gap width at side index `i` (0 = innermost) of the parabolic grading:
    /// `a(i) = a_c + (a_o - a_c) * (i / n_grading)^2`, clamped to `a_o` for
    /// `i >= n_grading`.
    pub fn graded_gap(&self, i: u32) -> f64 {
        if self.grading_periods == 0 || i >= self.grading_periods {
            return self.pitch;
        }
        let t = f64::from(i) / f64::from(self.grading_periods);
        self.cavity_pitch + (self.pitch - self.cavity_pitch) * t * t
    }
}

/// A single circular hole: center position along the waveguide axis and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub center: f64,
    pub radius: f64,
}

/// An ordered row of holes along the waveguide axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleLayout {
    /// Holes with strictly increasing centers.
    pub holes: Vec<Hole>,
    /// Patterned span along x, covering each hole's unit cell.
    pub span: (f64, f64),
}

impl HoleLayout {
    /// Total patterned length.
    pub fn extent(&self) -> f64 {
        self.span.1 - self.span.0
    }

    fn check_ordering(&self) -> Result<(), GeometryError> {
        for pair in self.holes.windows(2) {
            let gap = pair[1].center - pair[0].center;
            if gap <= 0.0 {
                return Err(GeometryError::InvalidSpec(format!(
                    "hole centers not strictly increasing near x = {}",
                    pair[0].center
                )));
            }
            if gap <= pair[0].radius + pair[1].radius {
                return Err(GeometryError::OverlappingHoles {
                    gap,
                    diameter: pair[0].radius + pair[1].radius,
                });
            }
        }
        Ok(())
    }

    /// True when reflecting hole positions about `x = 0` reproduces the
    /// layout to within a few ulps of the coordinate type.
    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.holes.len();
        (0..n).all(|i| {
            let a = self.holes[i];
            let b = self.holes[n - 1 - i];
            (a.center + b.center).abs() <= 1e-12 * (1.0 + a.center.abs())
                && (a.radius - b.radius).abs() <= 1e-12 * a.radius.abs()
        })
    }

    /// CSV export: one `center_nm,radius_nm` row per hole with a `#` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# hole center (nm), radius (nm)\n");
        for h in &self.holes {
            out.push_str(&format!("{:.6},{:.6}\n", h.center, h.radius));
        }
        out
    }
}

/// Errors produced while building layouts or sampling permittivity.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("refractive indices must satisfy n_film > n_substrate > n_air >= 1, got {n_film}, {n_substrate}, {n_air}")]
    InvalidStack {
        n_film: f64,
        n_substrate: f64,
        n_air: f64,
    },
    #[error("invalid device spec: {0}")]
    InvalidSpec(String),
    #[error("holes overlap: gap {gap} nm <= combined radii/diameter {diameter} nm")]
    OverlappingHoles { gap: f64, diameter: f64 },
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
}

/// Builds the symmetric heterostructure cavity layout.
///
/// The innermost gap has width `a_c` centered on `x = 0`; per side, gaps
/// `i = 1..=n_grading` follow the parabolic grading and land exactly on
/// `a_o` at `i = n_grading`, after which `n_mirror` more gaps of `a_o`
/// follow. The result is mirror symmetric about `x = 0`.
pub fn build_cavity_layout(spec: &DeviceSpec) -> Result<HoleLayout, GeometryError> {
    spec.validate()?;
    let mut right = Vec::new();
    let mut x = spec.cavity_pitch / 2.0;
    right.push(Hole { center: x, radius: spec.hole_radius });
    let gaps_per_side = spec.grading_periods + spec.mirror_periods;
    for i in 1..=gaps_per_side {
        x += spec.graded_gap(i);
        right.push(Hole { center: x, radius: spec.hole_radius });
    }
    let mut holes: Vec<Hole> = right
        .iter()
        .rev()
        .map(|h| Hole { center: -h.center, radius: h.radius })
        .collect();
    holes.extend(right.iter().copied());
    let half_span = x + spec.pitch / 2.0;
    let layout = HoleLayout { holes, span: (-half_span, half_span) };
    layout.check_ordering()?;
    debug_assert!(layout.is_mirror_symmetric());
    Ok(layout)
}

/// Builds a uniform periodic layout: `n_cells` holes at spacing `a`, one hole
/// centered in each unit cell, spanning `[0, n_cells * a]`.
pub fn build_periodic_layout(
    spec: &DeviceSpec,
    spacing: f64,
    n_cells: u32,
) -> Result<HoleLayout, GeometryError> {
    if 2.0 * spec.hole_radius >= spacing {
        return Err(GeometryError::OverlappingHoles {
            gap: spacing,
            diameter: 2.0 * spec.hole_radius,
        });
    }
    let holes = (0..n_cells)
        .map(|i| Hole {
            center: spacing / 2.0 + f64::from(i) * spacing,
            radius: spec.hole_radius,
        })
        .collect();
    let layout = HoleLayout { holes, span: (0.0, f64::from(n_cells) * spacing) };
    layout.check_ordering()?;
    Ok(layout)
}

/// Builds the asymmetric collector layout used for dipole-emission runs.
///
/// Gaps of `a_o` to the left of the origin (the "mirror" region), gaps of
/// `a_c` to the right (the "waveguide" region), followed by a termination in
/// which both the gap and the radius are scaled by `termination_scalings` in
/// order, then an unpatterned section. The nominal emitter site is `x = 0`.
pub fn build_asymmetric_layout(
    spec: &DeviceSpec,
    n_mirror_left: u32,
    n_wg_right: u32,
) -> Result<HoleLayout, GeometryError> {
    spec.validate()?;
    if n_mirror_left < 1 || n_wg_right < 1 {
        return Err(GeometryError::InvalidSpec(
            "asymmetric layout needs at least one hole per side".into(),
        ));
    }
    let mut holes = Vec::new();
    for i in (0..n_mirror_left).rev() {
        holes.push(Hole {
            center: -spec.pitch / 2.0 - f64::from(i) * spec.pitch,
            radius: spec.hole_radius,
        });
    }
    let mut x = spec.cavity_pitch / 2.0;
    for i in 0..n_wg_right {
        if i > 0 {
            x += spec.cavity_pitch;
        }
        holes.push(Hole { center: x, radius: spec.hole_radius });
    }
    for &s in &spec.termination_scalings {
        x += spec.cavity_pitch * s;
        holes.push(Hole { center: x, radius: spec.hole_radius * s });
    }
    let span = (
        holes[0].center - spec.pitch / 2.0,
        x + spec.cavity_pitch * spec.termination_scalings.last().copied().unwrap_or(1.0) / 2.0,
    );
    let layout = HoleLayout { holes, span };
    layout.check_ordering()?;
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_spec() -> DeviceSpec {
        DeviceSpec::default()
    }

    #[test]
    fn degenerate_grading_gives_uniform_gaps() {
        let spec = DeviceSpec { cavity_pitch: 160.0, ..paper_spec() };
        let layout = build_cavity_layout(&spec).unwrap();
        for pair in layout.holes.windows(2) {
            assert!((pair[1].center - pair[0].center - 160.0).abs() < 1e-9);
        }
    }

    #[test]
    fn paper_grading_sequence() {
        // a(i) = 141 + 19 * (i/6)^2 for i = 0..6, evaluated by hand.
        let spec = paper_spec();
        let expected = [141.0, 141.0 + 19.0 / 36.0, 143.11111111111111, 145.75, 149.44444444444446, 154.19444444444446, 160.0];
        for (i, want) in expected.iter().enumerate() {
            assert!(
                (spec.graded_gap(i as u32) - want).abs() < 1e-9,
                "gap {i}: got {} want {want}",
                spec.graded_gap(i as u32)
            );
        }
        // Innermost gap 141 nm, seventh gap from center onward exactly 160 nm.
        let layout = build_cavity_layout(&spec).unwrap();
        let center = layout.holes.len() / 2;
        let innermost = layout.holes[center].center - layout.holes[center - 1].center;
        assert!((innermost - 141.0).abs() < 1e-9);
        let g7 = layout.holes[center + 6].center - layout.holes[center + 5].center;
        assert!((g7 - 160.0).abs() < 1e-9);
    }

    #[test]
    fn cavity_layout_is_mirror_symmetric() {
        let layout = build_cavity_layout(&paper_spec()).unwrap();
        assert!(layout.is_mirror_symmetric());
    }

    #[test]
    fn gaps_monotone_from_center() {
        let layout = build_cavity_layout(&paper_spec()).unwrap();
        let n = layout.holes.len();
        let mut prev = 0.0;
        for i in n / 2..n - 1 {
            let gap = layout.holes[i + 1].center - layout.holes[i].center;
            assert!(gap + 1e-12 >= prev, "gap shrank moving outward");
            prev = gap;
        }
    }

    #[test]
    fn periodic_layout_places_holes_at_cell_centers() {
        let layout = build_periodic_layout(&paper_spec(), 160.0, 8).unwrap();
        assert!((layout.extent() - 1280.0).abs() < 1e-12);
        for (i, h) in layout.holes.iter().enumerate() {
            assert!((h.center - (80.0 + 160.0 * i as f64)).abs() < 1e-12);
        }
        let single = build_periodic_layout(&paper_spec(), 160.0, 1).unwrap();
        assert_eq!(single.holes.len(), 1);
        assert!((single.holes[0].center - 80.0).abs() < 1e-12);
    }

    #[test]
    fn unit_cell_at_cavity_pitch_is_valid() {
        // The 141 nm unit cell used for the etch-depth study.
        let layout = build_periodic_layout(&paper_spec(), 141.0, 1).unwrap();
        assert!((layout.extent() - 141.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_rejected() {
        let spec = DeviceSpec { hole_radius: 75.0, ..paper_spec() };
        assert!(matches!(
            build_cavity_layout(&spec),
            Err(GeometryError::OverlappingHoles { .. })
        ));
        assert!(build_periodic_layout(&paper_spec(), 80.0, 2).is_err());
    }

    #[test]
    fn asymmetric_layout_regions() {
        let layout = build_asymmetric_layout(&paper_spec(), 8, 12).unwrap();
        // Left of origin the spacing is the bulk pitch.
        let left: Vec<&Hole> = layout.holes.iter().filter(|h| h.center < 0.0).collect();
        assert_eq!(left.len(), 8);
        for pair in left.windows(2) {
            assert!((pair[1].center - pair[0].center - 160.0).abs() < 1e-9);
        }
        // Right of origin the spacing is the cavity pitch.
        let right: Vec<&Hole> = layout
            .holes
            .iter()
            .filter(|h| h.center > 0.0 && (h.radius - 43.0).abs() < 1e-12)
            .collect();
        assert_eq!(right.len(), 12);
        for pair in right.windows(2) {
            assert!((pair[1].center - pair[0].center - 141.0).abs() < 1e-9);
        }
        // Termination radii are 43 * {0.95, 0.86, 0.8, 0.75}.
        let tail: Vec<f64> = layout.holes.iter().rev().take(4).map(|h| h.radius).collect();
        let want = [32.25, 34.4, 36.98, 40.85];
        for (got, want) in tail.iter().zip(want.iter()) {
            assert!((got - want).abs() < 1e-9, "termination radius {got} != {want}");
        }
    }

    #[test]
    fn unit_termination_matches_waveguide_region() {
        let spec = DeviceSpec { termination_scalings: vec![1.0], ..paper_spec() };
        let layout = build_asymmetric_layout(&spec, 2, 3).unwrap();
        let right: Vec<&Hole> = layout.holes.iter().filter(|h| h.center > 0.0).collect();
        for pair in right.windows(2) {
            assert!((pair[1].center - pair[0].center - 141.0).abs() < 1e-9);
            assert!((pair[1].radius - 43.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stack_ordering_enforced() {
        assert!(MaterialStack::default().validate().is_ok());
        let bad = MaterialStack { n_film: 2.0, n_substrate: 2.4, n_air: 1.0 };
        assert!(bad.validate().is_err());
    }
}
