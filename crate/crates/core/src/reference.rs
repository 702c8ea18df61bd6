//! Independent analytic reference solutions used to validate the solver.
//!
//! These implementations share no code with the FDTD path: the transfer
//! matrix is evaluated in closed form and the slab dispersion comes from
//! bisecting the textbook transcendental equation.

use num_complex::Complex64;

/// A lossless dielectric layer: refractive index and thickness in nm.
#[derive(Debug, Clone, Copy)]
pub struct Layer {
    pub n: f64,
    pub d: f64,
}

/// Normal-incidence power transmittance through a lossless multilayer stack
/// between media `n_in` and `n_out`, at vacuum frequency `f` (1/nm).
///
/// Characteristic-matrix method: per layer
/// `M = [[cos d, i sin d / n], [i n sin d, cos d]]` with phase
/// `d = 2 pi f n t`.
pub fn transmittance(n_in: f64, layers: &[Layer], n_out: f64, f: f64) -> f64 {
    let k0 = 2.0 * std::f64::consts::PI * f;
    let mut m = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for layer in layers {
        let delta = k0 * layer.n * layer.d;
        let (s, c) = delta.sin_cos();
        let lm = [
            [Complex64::new(c, 0.0), Complex64::new(0.0, s / layer.n)],
            [Complex64::new(0.0, s * layer.n), Complex64::new(c, 0.0)],
        ];
        m = [
            [
                m[0][0] * lm[0][0] + m[0][1] * lm[1][0],
                m[0][0] * lm[0][1] + m[0][1] * lm[1][1],
            ],
            [
                m[1][0] * lm[0][0] + m[1][1] * lm[1][0],
                m[1][0] * lm[0][1] + m[1][1] * lm[1][1],
            ],
        ];
    }
    let b = m[0][0] + m[0][1] * n_out;
    let c = m[1][0] + m[1][1] * n_out;
    let denom = b * n_in + c;
    let t = 2.0 * n_in / denom;
    (n_out / n_in) * t.norm_sqr()
}

/// Slab-mode polarization relative to the slab interfaces.
///
/// For a slab with interfaces normal to y and propagation along x
/// (invariant along z): `Te` has the electric field along z, `Tm` has it
/// dominantly along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlabPolarization {
    Te,
    Tm,
}

/// Frequency (1/nm) of the fundamental even mode of a symmetric slab
/// waveguide at propagation constant `beta` (rad/nm).
///
/// Even-mode conditions: `tan(kappa w/2) = gamma/kappa` (TE) and
/// `tan(kappa w/2) = (n1/n0)^2 gamma/kappa` (TM), with
/// `kappa^2 = n1^2 k0^2 - beta^2`, `gamma^2 = beta^2 - n0^2 k0^2`.
/// Solved by bisection for `k0` between the core and cladding lightlines.
pub fn slab_mode_frequency(
    n_core: f64,
    n_clad: f64,
    width: f64,
    beta: f64,
    pol: SlabPolarization,
) -> Option<f64> {
    assert!(n_core > n_clad && beta > 0.0 && width > 0.0);
    let ratio = match pol {
        SlabPolarization::Te => 1.0,
        SlabPolarization::Tm => (n_core / n_clad).powi(2),
    };
    let f = |k0: f64| -> f64 {
        let kappa2 = n_core * n_core * k0 * k0 - beta * beta;
        let gamma2 = beta * beta - n_clad * n_clad * k0 * k0;
        let kappa = kappa2.max(0.0).sqrt();
        let gamma = gamma2.max(0.0).sqrt();
        (kappa * width / 2.0).tan() * kappa - ratio * gamma
    };
    // Keep below the first tangent singularity (kappa w/2 = pi/2) so the
    // bracket contains only the fundamental branch.
    let k_sing = ((std::f64::consts::PI / width).powi(2) + beta * beta).sqrt() / n_core;
    let mut lo = beta / n_core * (1.0 + 1e-12);
    let mut hi = (beta / n_clad).min(k_sing) * (1.0 - 1e-12);
    if hi <= lo {
        return None;
    }
    if f(lo) >= 0.0 || f(hi) <= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi) / (2.0 * std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transmittance_of_nothing_is_one() {
        let t = transmittance(1.0, &[], 1.0, 0.002);
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_wave_layer_minimizes_transmission() {
        // Single n = 2 layer: T oscillates between 1 and the Fresnel-limited
        // minimum 16 n^2 / (n^2 + 1)^2 * ... for air-air: T_min at
        // quarter-wave thickness: T = (4 n^2 / (n^2+1)^2)^... use the known
        // closed form for a single slab in air: T_min = (2 n / (n^2 + 1))^2.
        let n = 2.0;
        let lambda = 600.0;
        let layer = Layer { n, d: lambda / (4.0 * n) };
        let t = transmittance(1.0, &[layer], 1.0, 1.0 / lambda);
        let tmin = (2.0 * n / (n * n + 1.0)).powi(2);
        assert!((t - tmin).abs() < 1e-10, "got {t}, want {tmin}");
        // Half-wave layer is transparent.
        let layer = Layer { n, d: lambda / (2.0 * n) };
        let t = transmittance(1.0, &[layer], 1.0, 1.0 / lambda);
        assert!((t - 1.0).abs() < 1e-10);
    }

    #[test]
    fn energy_conservation_with_reflectance() {
        // |r|^2 + T = 1 for a lossless stack; spot check via 1 - T bounded.
        let layers = [
            Layer { n: 2.0, d: 160.0 },
            Layer { n: 3.3, d: 96.0 },
            Layer { n: 1.5, d: 200.0 },
        ];
        for i in 0..20 {
            let f = 1.0 / 900.0 + i as f64 * 1e-5;
            let t = transmittance(1.0, &layers, 1.0, f);
            assert!(t > 0.0 && t <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn slab_mode_between_lightlines() {
        let beta = 2.0 * std::f64::consts::PI * 0.45 / 160.0; // rad/nm
        for pol in [SlabPolarization::Te, SlabPolarization::Tm] {
            let f = slab_mode_frequency(2.4, 1.0, 192.0, beta, pol).unwrap();
            let k0 = 2.0 * std::f64::consts::PI * f;
            assert!(beta / 2.4 < k0 && k0 < beta / 1.0);
            // Mode equation residual is tiny.
            let kappa = (2.4f64.powi(2) * k0 * k0 - beta * beta).sqrt();
            let gamma = (beta * beta - k0 * k0).sqrt();
            let ratio = match pol {
                SlabPolarization::Te => 1.0,
                SlabPolarization::Tm => (2.4f64 / 1.0).powi(2),
            };
            let residual = (kappa * 192.0 / 2.0).tan() * kappa - ratio * gamma;
            assert!(residual.abs() < 1e-9 * kappa.max(gamma));
        }
    }

    #[test]
    fn wide_slab_approaches_core_lightline() {
        let beta = 2.0 * std::f64::consts::PI * 0.45 / 160.0;
        let f_narrow = slab_mode_frequency(2.4, 1.0, 192.0, beta, SlabPolarization::Tm).unwrap();
        let f_wide = slab_mode_frequency(2.4, 1.0, 10000.0, beta, SlabPolarization::Tm).unwrap();
        let f_core = beta / (2.0 * std::f64::consts::PI * 2.4);
        assert!((f_wide - f_core).abs() < 0.02 * f_core);
        assert!(f_wide < f_narrow);
    }
}
