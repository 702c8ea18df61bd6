//! Unit conventions and converters.
//!
//! Internally the solver uses "natural" units: lengths in nanometers,
//! `c = 1`, vacuum permittivity and permeability 1. A frequency is then a
//! reciprocal vacuum wavelength (`1/nm`). Device-level results are reported
//! in the dimensionless normalized form `f_norm = f * a_o = a_o / lambda`,
//! where `a_o` is the bulk hole pitch, which is the usual axis convention for
//! photonic crystal band diagrams. The QED layer converts to SI at the very
//! end.

/// Vacuum speed of light in m/s, used only at the SI boundary.
pub const C_M_PER_S: f64 = 2.998e8;

/// Normalized frequency (`a_o / lambda`) from a vacuum wavelength in nm.
pub fn norm_freq_from_wavelength(pitch_nm: f64, lambda_nm: f64) -> f64 {
    pitch_nm / lambda_nm
}

/// Vacuum wavelength in nm from a normalized frequency.
pub fn wavelength_from_norm_freq(pitch_nm: f64, f_norm: f64) -> f64 {
    pitch_nm / f_norm
}

/// Frequency in Hz from a vacuum wavelength in nm.
pub fn hz_from_wavelength(lambda_nm: f64) -> f64 {
    C_M_PER_S / (lambda_nm * 1e-9)
}

/// Normalized wavenumber (`k * a / 2pi`) from a wavenumber in rad/nm.
pub fn norm_k(pitch_nm: f64, k_rad_per_nm: f64) -> f64 {
    k_rad_per_nm * pitch_nm / (2.0 * std::f64::consts::PI)
}

/// Wavenumber in rad/nm from its normalized form.
pub fn k_from_norm(pitch_nm: f64, k_norm: f64) -> f64 {
    k_norm * 2.0 * std::f64::consts::PI / pitch_nm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_roundtrip() {
        let f = norm_freq_from_wavelength(160.0, 640.0);
        assert!((f - 0.25).abs() < 1e-15);
        assert!((wavelength_from_norm_freq(160.0, f) - 640.0).abs() < 1e-12);
    }

    #[test]
    fn hz_conversion_matches_hand_value() {
        // 637 nm -> 4.706e14 Hz
        let f = hz_from_wavelength(637.0);
        assert!((f - 4.7064e14).abs() / 4.7064e14 < 1e-3);
    }
}
