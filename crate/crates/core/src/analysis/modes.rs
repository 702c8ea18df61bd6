//! Mode profile integrals: mode volume, mode area, polarization fraction.

use super::AnalysisError;
use crate::geometry::PermittivityGrid;
use num_complex::Complex64;
use std::sync::Arc;

/// A (possibly half/quarter-domain) electric field profile on the grid,
/// typically the volume DFT of a ring-down at the resonance frequency.
#[derive(Debug, Clone)]
pub struct ModeProfile {
    /// [Ex, Ey, Ez] on the full node lattice.
    pub e: [Vec<Complex64>; 3],
    pub eps: Arc<PermittivityGrid>,
    /// Volume multiplier implied by mirror planes (2 per mirror).
    pub symmetry_factor: f64,
}

impl ModeProfile {
    /// Cell-centered electric energy density `eps |E|^2` for cell (i,j,k),
    /// averaging each component's samples that bound the cell.
    fn cell_energy(&self, i: usize, j: usize, k: usize) -> f64 {
        let g = &self.eps;
        let idx = |i: usize, j: usize, k: usize| g.idx(i, j, k);
        let mut u = 0.0;
        // Ex samples at (i+1/2, j|j+1, k|k+1)
        let pairs_x = [
            idx(i, j, k),
            idx(i, j + 1, k),
            idx(i, j, k + 1),
            idx(i, j + 1, k + 1),
        ];
        for c in pairs_x {
            u += 0.25 * g.eps_ex[c] * self.e[0][c].norm_sqr();
        }
        let pairs_y = [
            idx(i, j, k),
            idx(i + 1, j, k),
            idx(i, j, k + 1),
            idx(i + 1, j, k + 1),
        ];
        for c in pairs_y {
            u += 0.25 * g.eps_ey[c] * self.e[1][c].norm_sqr();
        }
        let pairs_z = [
            idx(i, j, k),
            idx(i + 1, j, k),
            idx(i, j + 1, k),
            idx(i + 1, j + 1, k),
        ];
        for c in pairs_z {
            u += 0.25 * g.eps_ez[c] * self.e[2][c].norm_sqr();
        }
        u
    }

    fn integrate(&self) -> (f64, f64, f64) {
        let [nx, ny, nz] = self.eps.grid.dims;
        let mut sum = 0.0;
        let mut peak = 0.0f64;
        let mut boundary_peak = 0.0f64;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let u = self.cell_energy(i, j, k);
                    sum += u;
                    peak = peak.max(u);
                    if i + 1 == nx || j + 1 == ny || k + 1 == nz {
                        boundary_peak = boundary_peak.max(u);
                    }
                }
            }
        }
        (sum, peak, boundary_peak)
    }
}

/// Warning-carrying scalar result.
#[derive(Debug, Clone)]
pub struct IntegralResult {
    pub value: f64,
    pub warnings: Vec<String>,
}

/// Mode volume `V = integral(eps |E|^2) / max(eps |E|^2)` in units of
/// `(lambda / n_ref)^3`.
pub fn mode_volume(
    profile: &ModeProfile,
    lambda_nm: f64,
    n_ref: f64,
) -> Result<IntegralResult, AnalysisError> {
    let (sum, peak, boundary_peak) = profile.integrate();
    if peak <= 0.0 {
        return Err(AnalysisError::EmptyProfile);
    }
    let mut warnings = Vec::new();
    if boundary_peak > 1e-4 * peak {
        warnings.push(format!(
            "mode not fully decayed at the profile boundary (ratio {:.2e})",
            boundary_peak / peak
        ));
    }
    let dx = profile.eps.grid.dx;
    let v_nm3 = profile.symmetry_factor * sum / peak * dx * dx * dx;
    let unit = (lambda_nm / n_ref).powi(3);
    Ok(IntegralResult { value: v_nm3 / unit, warnings })
}

/// Waveguide mode area `A = (1/pitch) * integral(eps |E|^2) / max(...)`
/// over one unit cell, in units of `(lambda / n_ref)^2`.
pub fn mode_area(
    profile: &ModeProfile,
    pitch_nm: f64,
    lambda_nm: f64,
    n_ref: f64,
) -> Result<IntegralResult, AnalysisError> {
    let (sum, peak, _) = profile.integrate();
    if peak <= 0.0 {
        return Err(AnalysisError::EmptyProfile);
    }
    let dx = profile.eps.grid.dx;
    let a_nm2 = profile.symmetry_factor * sum / peak * dx * dx * dx / pitch_nm;
    let unit = (lambda_nm / n_ref).powi(2);
    Ok(IntegralResult { value: a_nm2 / unit, warnings: Vec::new() })
}

/// Fraction of the electric energy carried by the Ey component; TE-like
/// modes of this device have `te_fraction > 0.5`.
pub fn classify_mode(profile: &ModeProfile) -> Result<f64, AnalysisError> {
    let g = &profile.eps;
    let mut ey = 0.0;
    let mut total = 0.0;
    for (c, (arr, eps)) in [
        (&profile.e[0], &g.eps_ex),
        (&profile.e[1], &g.eps_ey),
        (&profile.e[2], &g.eps_ez),
    ]
    .into_iter()
    .enumerate()
    {
        let s: f64 = arr
            .iter()
            .zip(eps.iter())
            .map(|(v, &e)| e * v.norm_sqr())
            .sum();
        total += s;
        if c == 1 {
            ey = s;
        }
    }
    if total <= 0.0 {
        return Err(AnalysisError::EmptyProfile);
    }
    Ok(ey / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GridSpec, Material, StructureKind, sample_structure, MaterialStack};

    fn uniform_profile(dims: [usize; 3], fill: Complex64) -> ModeProfile {
        let stack = MaterialStack::default();
        let grid = GridSpec { origin: [0.0, 0.0, 0.0], dims, dx: 10.0 };
        let s = sample_structure(
            &StructureKind::Uniform(Material::Substrate),
            &stack,
            grid,
            16.0,
            false,
            None,
        )
        .unwrap();
        let n = s.eps.node_len();
        ModeProfile {
            e: [vec![fill; n], vec![fill; n], vec![fill; n]],
            eps: Arc::new(s.eps),
            symmetry_factor: 1.0,
        }
    }

    #[test]
    fn uniform_field_gives_box_volume() {
        let dims = [8, 6, 5];
        let p = uniform_profile(dims, Complex64::new(0.3, 0.1));
        let v = mode_volume(&p, 10.0, 1.0).unwrap();
        let box_nm3 = (8.0 * 6.0 * 5.0) * 1000.0;
        // lambda/n_ref = 10 nm -> unit volume 1000 nm^3
        assert!(
            (v.value - box_nm3 / 1000.0).abs() / (box_nm3 / 1000.0) < 1e-12,
            "V = {}",
            v.value
        );
        // Uniform field does not decay at the boundary: warning expected.
        assert!(!v.warnings.is_empty());
    }

    #[test]
    fn scale_invariance() {
        let p1 = uniform_profile([6, 6, 6], Complex64::new(0.5, 0.0));
        let p3 = uniform_profile([6, 6, 6], Complex64::new(1.5, 0.0));
        let v1 = mode_volume(&p1, 25.0, 2.0).unwrap().value;
        let v3 = mode_volume(&p3, 25.0, 2.0).unwrap().value;
        assert!((v1 - v3).abs() / v1 < 1e-12);
        let a1 = mode_area(&p1, 60.0, 25.0, 2.0).unwrap().value;
        let a3 = mode_area(&p3, 60.0, 25.0, 2.0).unwrap().value;
        assert!((a1 - a3).abs() / a1 < 1e-12);
    }

    #[test]
    fn uniform_area_is_cross_section() {
        // Unit cell of length pitch filled uniformly: A = volume / pitch.
        let dims = [6, 9, 4];
        let p = uniform_profile(dims, Complex64::new(1.0, 0.0));
        let a = mode_area(&p, 60.0, 10.0, 1.0).unwrap().value;
        let want = (60.0 * 90.0 * 40.0) / 60.0 / 100.0; // nm^2 / (10 nm)^2
        assert!((a - want).abs() / want < 1e-12, "A = {a}, want {want}");
    }

    #[test]
    fn pure_polarizations() {
        let mut p = uniform_profile([5, 5, 5], Complex64::new(0.0, 0.0));
        let n = p.e[1].len();
        p.e[1] = vec![Complex64::new(1.0, 0.0); n];
        assert!((classify_mode(&p).unwrap() - 1.0).abs() < 1e-12);
        p.e[1] = vec![Complex64::new(0.0, 0.0); n];
        p.e[0] = vec![Complex64::new(0.7, 0.2); n];
        assert!(classify_mode(&p).unwrap().abs() < 1e-12);
        p.e[0] = vec![Complex64::new(0.0, 0.0); n];
        assert!(classify_mode(&p).is_err());
    }
}
