//! Sampling of the relative permittivity onto the Yee lattice.
//!
//! The structure is described analytically (ridge + hole cylinders) and
//! sampled at each field component's own staggered position. With smoothing
//! enabled, samples whose surrounding cell straddles a material boundary get
//! the volume-weighted average permittivity of that cell, which reduces
//! stair-casing error; with smoothing off every sample is exactly one of the
//! three material permittivities, which keeps oracle tests deterministic.

use super::{DeviceSpec, GeometryError, HoleLayout, MaterialStack};
use serde::{Deserialize, Serialize};

/// One of the three bulk materials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Material {
    Air,
    Film,
    Substrate,
}

/// Which analytic structure a permittivity grid was sampled from.
#[derive(Debug, Clone)]
pub enum StructureKind {
    /// Film ridge on a substrate, holes through the film and `etch_depth`
    /// into the substrate; substrate sidewalls follow the ridge footprint.
    Ridge {
        layout: HoleLayout,
        width: f64,
        thickness: f64,
        etch_depth: f64,
    },
    /// Substrate slab of the ridge width, patterned with the same holes,
    /// translationally invariant along z.
    VerticalSlab { layout: HoleLayout, width: f64 },
    /// Unpatterned substrate half-space below `z = 0` (reference runs).
    BareSurface,
    /// Uniform material fill (engine self-tests).
    Uniform(Material),
}

/// Axis-aligned uniform grid: cell corner origin, cell counts, cell size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Coordinates of the low corner of cell (0,0,0), in nm.
    pub origin: [f64; 3],
    /// Cell counts per axis.
    pub dims: [usize; 3],
    /// Cell edge length in nm (cubic cells).
    pub dx: f64,
}

impl GridSpec {
    pub fn extent(&self) -> [f64; 3] {
        [
            self.dims[0] as f64 * self.dx,
            self.dims[1] as f64 * self.dx,
            self.dims[2] as f64 * self.dx,
        ]
    }
}

/// Relative permittivity sampled on the Yee sub-lattices.
///
/// All arrays use the full node-allocated shape `(nx+1)*(ny+1)*(nz+1)` in
/// x-fastest order, matching the field arrays of the solver; entries beyond
/// a component's valid Yee range are filled by clamped sampling and unused.
#[derive(Debug, Clone)]
pub struct PermittivityGrid {
    pub grid: GridSpec,
    /// Cells per bulk pitch; informational.
    pub resolution: f64,
    /// Permittivity at Ex positions (i+1/2, j, k).
    pub eps_ex: Vec<f64>,
    /// Permittivity at Ey positions (i, j+1/2, k).
    pub eps_ey: Vec<f64>,
    /// Permittivity at Ez positions (i, j, k+1/2).
    pub eps_ez: Vec<f64>,
    /// Permittivity at cell centers (i+1/2, j+1/2, k+1/2).
    pub eps_cell: Vec<f64>,
}

impl PermittivityGrid {
    pub fn node_dims(&self) -> [usize; 3] {
        let [nx, ny, nz] = self.grid.dims;
        [nx + 1, ny + 1, nz + 1]
    }

    pub fn node_len(&self) -> usize {
        let [gx, gy, gz] = self.node_dims();
        gx * gy * gz
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        let [gx, gy, _] = self.node_dims();
        (k * gy + j) * gx + i
    }

    /// Bounds over all sub-lattice samples.
    pub fn eps_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for arr in [&self.eps_ex, &self.eps_ey, &self.eps_ez, &self.eps_cell] {
            for &e in arr.iter() {
                lo = lo.min(e);
                hi = hi.max(e);
            }
        }
        (lo, hi)
    }
}

/// Result of sampling: the grid plus any non-fatal warnings.
#[derive(Debug, Clone)]
pub struct SampledPermittivity {
    pub eps: PermittivityGrid,
    pub warnings: Vec<String>,
}

/// Analytic material query for a structure, with optional x-periodicity.
pub struct Structure<'a> {
    pub kind: &'a StructureKind,
    /// When set, x is wrapped modulo this period onto the layout span.
    pub period_x: Option<f64>,
}

impl Structure<'_> {
    pub fn material_at(&self, x: f64, y: f64, z: f64) -> Material {
        let x = match (self.period_x, self.kind) {
            (Some(p), StructureKind::Ridge { layout, .. })
            | (Some(p), StructureKind::VerticalSlab { layout, .. }) => {
                layout.span.0 + (x - layout.span.0).rem_euclid(p)
            }
            _ => x,
        };
        match self.kind {
            StructureKind::Ridge { layout, width, thickness, etch_depth } => {
                if z >= *thickness {
                    Material::Air
                } else if z >= 0.0 {
                    if y.abs() <= width / 2.0 && !in_hole(layout, x, y) {
                        Material::Film
                    } else {
                        Material::Air
                    }
                } else if z >= -etch_depth {
                    if y.abs() <= width / 2.0 && !in_hole(layout, x, y) {
                        Material::Substrate
                    } else {
                        Material::Air
                    }
                } else {
                    Material::Substrate
                }
            }
            StructureKind::VerticalSlab { layout, width } => {
                if y.abs() <= width / 2.0 && !in_hole(layout, x, y) {
                    Material::Substrate
                } else {
                    Material::Air
                }
            }
            StructureKind::BareSurface => {
                if z < 0.0 {
                    Material::Substrate
                } else {
                    Material::Air
                }
            }
            StructureKind::Uniform(m) => *m,
        }
    }
}

fn in_hole(layout: &HoleLayout, x: f64, y: f64) -> bool {
    // Holes are sorted by center; only neighbors within the largest radius
    // can contain the point.
    let centers = &layout.holes;
    if centers.is_empty() {
        return false;
    }
    let i = centers.partition_point(|h| h.center < x);
    let lo = i.saturating_sub(2);
    let hi = (i + 2).min(centers.len());
    centers[lo..hi].iter().any(|h| {
        let dx = x - h.center;
        dx * dx + y * y <= h.radius * h.radius
    })
}

fn eps_of(stack: &MaterialStack, m: Material) -> f64 {
    match m {
        Material::Air => stack.eps_air(),
        Material::Film => stack.eps_film(),
        Material::Substrate => stack.eps_substrate(),
    }
}

/// Number of subsamples per axis used for volume-fraction averaging.
const SMOOTH_SUBSAMPLES: usize = 5;

fn sample_at(structure: &Structure, stack: &MaterialStack, pos: [f64; 3], dx: f64, smoothing: bool) -> f64 {
    let center = structure.material_at(pos[0], pos[1], pos[2]);
    if !smoothing {
        return eps_of(stack, center);
    }
    // Cheap homogeneity probe: cube corners plus the center.
    let h = dx / 2.0;
    let mut uniform = true;
    'corners: for &sx in &[-h, h] {
        for &sy in &[-h, h] {
            for &sz in &[-h, h] {
                if structure.material_at(pos[0] + sx, pos[1] + sy, pos[2] + sz) != center {
                    uniform = false;
                    break 'corners;
                }
            }
        }
    }
    if uniform {
        return eps_of(stack, center);
    }
    // Boundary cell: volume-weighted average over an n^3 subsample grid.
    let n = SMOOTH_SUBSAMPLES;
    let mut acc = 0.0;
    for a in 0..n {
        let fx = pos[0] + dx * ((a as f64 + 0.5) / n as f64 - 0.5);
        for b in 0..n {
            let fy = pos[1] + dx * ((b as f64 + 0.5) / n as f64 - 0.5);
            for c in 0..n {
                let fz = pos[2] + dx * ((c as f64 + 0.5) / n as f64 - 0.5);
                acc += eps_of(stack, structure.material_at(fx, fy, fz));
            }
        }
    }
    acc / (n * n * n) as f64
}

/// Samples the permittivity of a structure onto a grid.
///
/// Warnings are attached when the grid is too coarse to resolve a hole
/// (fewer than 4 cells per diameter); a degenerate grid is rejected.
pub fn sample_structure(
    kind: &StructureKind,
    stack: &MaterialStack,
    grid: GridSpec,
    resolution: f64,
    smoothing: bool,
    period_x: Option<f64>,
) -> Result<SampledPermittivity, GeometryError> {
    stack.validate()?;
    if grid.dims.iter().any(|&d| d == 0) || !(grid.dx > 0.0) || !grid.dx.is_finite() {
        return Err(GeometryError::DegenerateGrid(format!(
            "dims {:?}, dx {}",
            grid.dims, grid.dx
        )));
    }
    let mut warnings = Vec::new();
    if let StructureKind::Ridge { layout, .. } | StructureKind::VerticalSlab { layout, .. } = kind
    {
        if let Some(rmin) = layout
            .holes
            .iter()
            .map(|h| h.radius)
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if rmin > 0.0 && 2.0 * rmin / grid.dx < 4.0 {
                warnings.push(format!(
                    "grid too coarse: smallest hole diameter {} nm spans {:.2} cells (< 4)",
                    2.0 * rmin,
                    2.0 * rmin / grid.dx
                ));
            }
        }
        let [ex, _, _] = grid.extent();
        if period_x.is_none()
            && (grid.origin[0] > layout.span.0 || grid.origin[0] + ex < layout.span.1)
        {
            warnings.push(format!(
                "grid x-range [{}, {}] does not cover the layout span [{}, {}]",
                grid.origin[0],
                grid.origin[0] + ex,
                layout.span.0,
                layout.span.1
            ));
        }
    }

    let structure = Structure { kind, period_x };
    let [nx, ny, nz] = grid.dims;
    let (gx, gy, gz) = (nx + 1, ny + 1, nz + 1);
    let n = gx * gy * gz;
    let mut eps = PermittivityGrid {
        grid,
        resolution,
        eps_ex: vec![0.0; n],
        eps_ey: vec![0.0; n],
        eps_ez: vec![0.0; n],
        eps_cell: vec![0.0; n],
    };
    let o = grid.origin;
    let d = grid.dx;
    // Offsets of each sub-lattice in units of dx: (1/2,0,0), (0,1/2,0),
    // (0,0,1/2) for Ex/Ey/Ez and (1/2,1/2,1/2) for cell centers.
    let mut idx = 0;
    for k in 0..gz {
        for j in 0..gy {
            for i in 0..gx {
                let (fi, fj, fk) = (i as f64, j as f64, k as f64);
                let px = |off: [f64; 3]| {
                    [
                        o[0] + (fi + off[0]) * d,
                        o[1] + (fj + off[1]) * d,
                        o[2] + (fk + off[2]) * d,
                    ]
                };
                eps.eps_ex[idx] = sample_at(&structure, stack, px([0.5, 0.0, 0.0]), d, smoothing);
                eps.eps_ey[idx] = sample_at(&structure, stack, px([0.0, 0.5, 0.0]), d, smoothing);
                eps.eps_ez[idx] = sample_at(&structure, stack, px([0.0, 0.0, 0.5]), d, smoothing);
                eps.eps_cell[idx] =
                    sample_at(&structure, stack, px([0.5, 0.5, 0.5]), d, smoothing);
                idx += 1;
            }
        }
    }
    Ok(SampledPermittivity { eps, warnings })
}

/// Samples a ridge structure (the main device) onto a grid.
pub fn sample_permittivity(
    layout: &HoleLayout,
    spec: &DeviceSpec,
    stack: &MaterialStack,
    grid: GridSpec,
    smoothing: bool,
) -> Result<SampledPermittivity, GeometryError> {
    spec.validate()?;
    let kind = StructureKind::Ridge {
        layout: layout.clone(),
        width: spec.width,
        thickness: spec.thickness,
        etch_depth: spec.etch_depth,
    };
    sample_structure(&kind, stack, grid, spec.pitch / grid.dx, smoothing, None)
}

/// Samples one x-periodic unit cell of a ridge structure.
pub fn sample_unit_cell(
    layout: &HoleLayout,
    spec: &DeviceSpec,
    stack: &MaterialStack,
    grid: GridSpec,
    smoothing: bool,
) -> Result<SampledPermittivity, GeometryError> {
    spec.validate()?;
    let period = layout.extent();
    let kind = StructureKind::Ridge {
        layout: layout.clone(),
        width: spec.width,
        thickness: spec.thickness,
        etch_depth: spec.etch_depth,
    };
    sample_structure(&kind, stack, grid, spec.pitch / grid.dx, smoothing, Some(period))
}

/// Builds the vertically-invariant patterned substrate slab used for the
/// structured-lightline computation: a substrate slab of the ridge width,
/// patterned with holes of spacing `a` and the device hole radius. The
/// translational invariance along z is exact (the grid is one cell tall and
/// the z axis is treated as periodic by the solver).
pub fn build_vertical_slab(
    spec: &DeviceSpec,
    stack: &MaterialStack,
    spacing: f64,
    grid: GridSpec,
    smoothing: bool,
) -> Result<SampledPermittivity, GeometryError> {
    spec.validate()?;
    let layout = if spec.hole_radius > 0.0 {
        super::build_periodic_layout(spec, spacing, 1)?
    } else {
        HoleLayout { holes: vec![], span: (0.0, spacing) }
    };
    let kind = StructureKind::VerticalSlab { layout, width: spec.width };
    sample_structure(&kind, stack, grid, spec.pitch / grid.dx, smoothing, Some(spacing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_cavity_layout, build_periodic_layout};

    fn spec() -> DeviceSpec {
        DeviceSpec::default()
    }

    fn stack() -> MaterialStack {
        MaterialStack::default()
    }

    #[test]
    fn empty_layout_is_plain_ridge() {
        let layout = HoleLayout { holes: vec![], span: (0.0, 0.0) };
        let spec = DeviceSpec { etch_depth: 0.0, ..spec() };
        let grid = GridSpec { origin: [-80.0, -200.0, -200.0], dims: [10, 25, 30], dx: 16.0 };
        let s = sample_permittivity(&layout, &spec, &stack(), grid, false).unwrap();
        // Deep inside the substrate.
        let k_deep = 2; // z ~ -168 nm
        let idx = s.eps.idx(5, 12, k_deep);
        assert_eq!(s.eps.eps_cell[idx], 5.76); // n_substrate^2 = 2.4^2
        // Inside the film on the ridge axis: z in (0, 128).
        let k_film = ((0.0 - -200.0) / 16.0) as usize + 3; // z ~ +56 nm
        let j_axis = ((0.0 - -200.0) / 16.0) as usize; // y ~ 0
        let idx = s.eps.idx(5, j_axis, k_film);
        assert_eq!(s.eps.eps_ey[idx], 3.3 * 3.3);
    }

    #[test]
    fn hole_center_is_air() {
        let layout = build_periodic_layout(&spec(), 160.0, 1).unwrap();
        let grid = GridSpec { origin: [0.0, -200.0, -200.0], dims: [10, 25, 25], dx: 16.0 };
        let s = sample_unit_cell(&layout, &spec(), &stack(), grid, false).unwrap();
        // Hole center at x = 80, y = 0; inside the film layer z ~ 64.
        let i = 5; // Ey at x = 80
        let j = ((0.0 - -200.0) / 16.0) as usize;
        let k = ((64.0 - -200.0) / 16.0) as usize;
        assert_eq!(s.eps.eps_ey[s.eps.idx(i, j, k)], 1.0);
    }

    #[test]
    fn ternary_without_smoothing_and_bounds_hold() {
        let layout = build_cavity_layout(&spec()).unwrap();
        let grid = GridSpec { origin: [-2400.0, -300.0, -900.0], dims: [150, 38, 70], dx: 32.0 };
        let s = sample_permittivity(&layout, &spec(), &stack(), grid, false).unwrap();
        let allowed = [1.0, 5.76, 3.3 * 3.3];
        for arr in [&s.eps.eps_ex, &s.eps.eps_ey, &s.eps.eps_ez, &s.eps.eps_cell] {
            for &e in arr.iter() {
                assert!(
                    allowed.iter().any(|&a| (e - a).abs() < 1e-12),
                    "unexpected eps {e}"
                );
            }
        }
        let (lo, hi) = s.eps.eps_range();
        assert!(lo >= 1.0 && hi <= 3.3 * 3.3);
    }

    #[test]
    fn smoothing_stays_in_bounds_and_averages_boundaries() {
        let layout = build_periodic_layout(&spec(), 160.0, 1).unwrap();
        let grid = GridSpec { origin: [0.0, -160.0, -160.0], dims: [10, 20, 25], dx: 16.0 };
        let s = sample_unit_cell(&layout, &spec(), &stack(), grid, true).unwrap();
        let (lo, hi) = s.eps.eps_range();
        assert!(lo >= 1.0 - 1e-12 && hi <= 3.3 * 3.3 + 1e-12);
        // Some sample must be strictly intermediate (a smoothed boundary).
        let mixed = s
            .eps
            .eps_cell
            .iter()
            .any(|&e| e > 1.0 + 1e-6 && (e - 5.76).abs() > 1e-6 && (e - 10.89).abs() > 1e-6);
        assert!(mixed, "no smoothed boundary samples found");
    }

    #[test]
    fn coarse_grid_warns_degenerate_rejected() {
        let layout = build_periodic_layout(&spec(), 160.0, 1).unwrap();
        let grid = GridSpec { origin: [0.0, -100.0, -100.0], dims: [4, 6, 6], dx: 40.0 };
        let s = sample_unit_cell(&layout, &spec(), &stack(), grid, false).unwrap();
        assert!(!s.warnings.is_empty());
        let bad = GridSpec { origin: [0.0, 0.0, 0.0], dims: [0, 5, 5], dx: 16.0 };
        assert!(sample_unit_cell(&layout, &spec(), &stack(), bad, false).is_err());
    }

    /// Smoothed sampling at resolution R should approach the fine-grid
    /// point-sampled average: compare against point sampling at 4x refinement
    /// averaged back onto the coarse cells, and require the L1 error to drop
    /// when the resolution doubles.
    #[test]
    fn smoothing_converges_toward_refined_point_sampling() {
        let layout = build_periodic_layout(&spec(), 160.0, 1).unwrap();
        let kind = StructureKind::Ridge {
            layout: layout.clone(),
            width: 192.0,
            thickness: 128.0,
            etch_depth: 640.0,
        };
        let st = stack();
        let err_at = |cells_per_a: usize| -> f64 {
            let dx = 160.0 / cells_per_a as f64;
            let dims = [cells_per_a, cells_per_a * 2, cells_per_a * 2];
            let grid = GridSpec { origin: [0.0, -160.0, -160.0], dims, dx };
            let coarse =
                sample_structure(&kind, &st, grid, 160.0 / dx, true, Some(160.0)).unwrap();
            // Reference: 4x refined point sampling, box-averaged onto the
            // coarse cell-center lattice.
            let structure = Structure { kind: &kind, period_x: Some(160.0) };
            let mut l1 = 0.0;
            let mut count = 0.0;
            for k in 0..dims[2] {
                for j in 0..dims[1] {
                    for i in 0..dims[0] {
                        let mut avg = 0.0;
                        for a in 0..4 {
                            for b in 0..4 {
                                for c in 0..4 {
                                    let x = grid.origin[0] + (i as f64 + (a as f64 + 0.5) / 4.0) * dx;
                                    let y = grid.origin[1] + (j as f64 + (b as f64 + 0.5) / 4.0) * dx;
                                    let z = grid.origin[2] + (k as f64 + (c as f64 + 0.5) / 4.0) * dx;
                                    avg += eps_of(&st, structure.material_at(x, y, z));
                                }
                            }
                        }
                        avg /= 64.0;
                        l1 += (coarse.eps.eps_cell[coarse.eps.idx(i, j, k)] - avg).abs();
                        count += 1.0;
                    }
                }
            }
            l1 / count
        };
        let e1 = err_at(8);
        let e2 = err_at(16);
        assert!(
            e2 < e1,
            "per-cell L1 error did not shrink on refinement: {e1} -> {e2}"
        );
    }

    #[test]
    fn vertical_slab_is_z_invariant_and_matches_device_pattern() {
        let grid = GridSpec { origin: [0.0, -200.0, -100.0], dims: [10, 25, 4], dx: 16.0 };
        let s = build_vertical_slab(&spec(), &stack(), 160.0, grid, false).unwrap();
        let eps = &s.eps;
        for j in 0..=25 {
            for i in 0..=10 {
                let v = eps.eps_ey[eps.idx(i, j, 0)];
                for k in 1..=4 {
                    assert_eq!(eps.eps_ey[eps.idx(i, j, k)], v, "z dependence at ({i},{j},{k})");
                }
                // Only substrate or air appears.
                assert!(v == 1.0 || v == 5.76);
            }
        }
        // r = 0 degenerates to a uniform slab.
        let solid = DeviceSpec { hole_radius: 0.0, ..spec() };
        let s = build_vertical_slab(&solid, &stack(), 160.0, grid, false).unwrap();
        let j_axis = ((0.0 - -200.0) / 16.0) as usize;
        assert_eq!(s.eps.eps_ey[s.eps.idx(3, j_axis, 2)], 5.76);
    }
}
