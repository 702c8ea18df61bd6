//! Closed-form cavity-QED figures of merit for an emitter near the device
//! surface: coherent coupling rate, cavity decay rate, Purcell factor,
//! emission fraction, the depth dependence of the evanescent field, and the
//! broadband waveguide coupling spectral density.
//!
//! All rates are stored and reported as frequency/2pi in Hz. The reference
//! emitter is the diamond NV- center: total spontaneous rate 2pi x 13 MHz,
//! 3% of it in the 637 nm zero-phonon line.

use crate::geometry::MaterialStack;
use crate::units;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use std::f64::consts::PI;

/// Emitter parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NvParams {
    /// Total spontaneous emission rate as frequency/2pi, Hz.
    pub gamma_tot_hz: f64,
    /// Fraction of the total rate in the zero-phonon line.
    pub zpl_fraction: f64,
    /// Zero-phonon-line vacuum wavelength, nm.
    pub lambda_zpl_nm: f64,
}

impl Default for NvParams {
    fn default() -> Self {
        Self { gamma_tot_hz: 13e6, zpl_fraction: 0.03, lambda_zpl_nm: 637.0 }
    }
}

impl NvParams {
    pub fn validate(&self) -> Result<(), QedError> {
        if !(self.gamma_tot_hz > 0.0) {
            return Err(QedError::Invalid("gamma_tot must be positive".into()));
        }
        if !(self.zpl_fraction > 0.0 && self.zpl_fraction <= 1.0) {
            return Err(QedError::Invalid("zpl_fraction must lie in (0, 1]".into()));
        }
        if !(self.lambda_zpl_nm > 0.0) {
            return Err(QedError::Invalid("lambda_zpl must be positive".into()));
        }
        Ok(())
    }
}

/// Cavity-side inputs, from a simulation or supplied directly.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CavityInputs {
    pub q: f64,
    /// Mode volume in (lambda / n_film)^3.
    pub v_bar: f64,
    /// |E(emitter) / E_o| with E_o the field at the global energy-density
    /// maximum; in [0, 1].
    pub field_ratio: f64,
    pub stack: MaterialStack,
}

impl CavityInputs {
    pub fn validate(&self) -> Result<(), QedError> {
        if !(self.q > 0.0) {
            return Err(QedError::Invalid("Q must be positive".into()));
        }
        if !(self.v_bar > 0.0) {
            return Err(QedError::Invalid("mode volume must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.field_ratio) {
            return Err(QedError::Invalid(format!(
                "field ratio must lie in [0, 1], got {}",
                self.field_ratio
            )));
        }
        self.stack.validate().map_err(|e| QedError::Invalid(e.to_string()))
    }
}

/// Exponential model of the evanescent field below the surface, anchored at
/// the surface value and one reference depth.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FieldDecayModel {
    pub surface_ratio: f64,
    pub ref_depth_nm: f64,
    pub ref_ratio: f64,
}

impl Default for FieldDecayModel {
    fn default() -> Self {
        Self { surface_ratio: 0.72, ref_depth_nm: 155.0, ref_ratio: 0.10 }
    }
}

impl FieldDecayModel {
    pub fn validate(&self) -> Result<(), QedError> {
        if !(self.ref_ratio > 0.0
            && self.ref_ratio < self.surface_ratio
            && self.surface_ratio <= 1.0
            && self.ref_depth_nm > 0.0)
        {
            return Err(QedError::Invalid(
                "need 0 < ref_ratio < surface_ratio <= 1 and ref_depth > 0".into(),
            ));
        }
        Ok(())
    }

    /// 1/e depth of the exponential model.
    pub fn decay_depth_nm(&self) -> f64 {
        self.ref_depth_nm / (self.surface_ratio / self.ref_ratio).ln()
    }
}

/// `E(z)/E_o = surface_ratio * exp(-z / delta)`, exact at both anchors.
pub fn field_at_depth(model: &FieldDecayModel, z_nm: f64) -> Result<f64, QedError> {
    model.validate()?;
    if z_nm < 0.0 {
        return Err(QedError::Invalid(format!("depth must be >= 0, got {z_nm}")));
    }
    Ok(model.surface_ratio * (-z_nm / model.decay_depth_nm()).exp())
}

/// Coherent single-photon coupling rate, as g/2pi in Hz:
/// `g/2pi = (1/8 pi^2) sqrt(3 omega gamma_zpl / v_bar * n_film/n_sub) * ratio`.
pub fn coupling_rate(nv: &NvParams, cav: &CavityInputs) -> Result<f64, QedError> {
    nv.validate()?;
    cav.validate()?;
    let omega = 2.0 * PI * units::hz_from_wavelength(nv.lambda_zpl_nm); // rad/s
    let gamma_zpl = 2.0 * PI * nv.gamma_tot_hz * nv.zpl_fraction; // rad/s
    let n_ratio = cav.stack.n_film / cav.stack.n_substrate;
    let g2pi =
        (3.0 * omega * gamma_zpl * n_ratio / cav.v_bar).sqrt() / (8.0 * PI * PI) * cav.field_ratio;
    Ok(g2pi)
}

/// Cavity field decay rate `kappa = omega / 2Q`, as kappa/2pi in Hz.
pub fn cavity_decay(lambda_nm: f64, q: f64) -> Result<f64, QedError> {
    if !(q > 0.0 && lambda_nm > 0.0) {
        return Err(QedError::Invalid("wavelength and Q must be positive".into()));
    }
    Ok(units::hz_from_wavelength(lambda_nm) / (2.0 * q))
}

/// Purcell enhancement of the zero-phonon emission rate (direct form):
/// `F = (3/4 pi^2) (Q / v_bar) (n_film/n_sub) ratio^2 (gamma_zpl/gamma_tot)`.
///
/// Algebraically identical to `2 g^2 / (kappa gamma_tot)`.
pub fn purcell_factor(nv: &NvParams, cav: &CavityInputs) -> Result<f64, QedError> {
    nv.validate()?;
    cav.validate()?;
    let n_ratio = cav.stack.n_film / cav.stack.n_substrate;
    Ok(3.0 / (4.0 * PI * PI)
        * (cav.q / cav.v_bar)
        * n_ratio
        * cav.field_ratio
        * cav.field_ratio
        * nv.zpl_fraction)
}

/// Fraction of the total spontaneous emission that radiates into the cavity
/// mode: `beta = F / (F + 1)` (the uncoupled remainder goes to off-resonant
/// sidebands).
pub fn emission_fraction(f_purcell: f64) -> Result<f64, QedError> {
    if f_purcell < 0.0 {
        return Err(QedError::Invalid("Purcell factor must be >= 0".into()));
    }
    Ok(f_purcell / (f_purcell + 1.0))
}

/// Normalized waveguide coupling spectral density per frequency sample:
/// `|s|^2 = (3/8 pi) ratio^2 (1/a_bar) (n_g / n_sub)` with `a_bar` the mode
/// area in (lambda/n_film)^2 units. Band-edge divergences (`n_g` beyond the
/// cap) are reported saturated rather than infinite.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CouplingDensityPoint {
    pub frequency: f64,
    pub density: f64,
    pub saturated: bool,
}

pub const GROUP_INDEX_CAP: f64 = 1e6;

pub fn waveguide_coupling_spectrum(
    field_ratio: f64,
    mode_area_bar: f64,
    group_index: &[(f64, f64)],
    stack: &MaterialStack,
) -> Result<Vec<CouplingDensityPoint>, QedError> {
    if !(0.0..=1.0).contains(&field_ratio) {
        return Err(QedError::Invalid("field ratio must lie in [0, 1]".into()));
    }
    if !(mode_area_bar > 0.0) {
        return Err(QedError::Invalid("mode area must be positive".into()));
    }
    stack.validate().map_err(|e| QedError::Invalid(e.to_string()))?;
    group_index
        .iter()
        .map(|&(f, ng)| {
            if !(ng > 0.0) {
                return Err(QedError::Invalid(format!(
                    "group index must be positive over the band, got {ng} at {f}"
                )));
            }
            let saturated = ng > GROUP_INDEX_CAP;
            let ng_eff = ng.min(GROUP_INDEX_CAP);
            let density = 3.0 / (8.0 * PI) * field_ratio * field_ratio / mode_area_bar
                * (ng_eff / stack.n_substrate);
            Ok(CouplingDensityPoint { frequency: f, density, saturated })
        })
        .collect()
}

/// Where the emitter sits: either an explicit field ratio or a depth below
/// the surface fed through the decay model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum EmitterPlacement {
    FieldRatio(f64),
    DepthNm(f64),
}

/// Full report: rates, Purcell factor, emission fraction, and the
/// strong-coupling comparison `g > kappa, gamma_tot`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CavityQedResult {
    pub g_hz: f64,
    pub kappa_hz: f64,
    pub gamma_tot_hz: f64,
    pub f_purcell: f64,
    pub beta: f64,
    pub field_ratio: f64,
    pub strong_coupling_candidate: bool,
}

pub fn qed_report(
    nv: &NvParams,
    q: f64,
    v_bar: f64,
    stack: &MaterialStack,
    model: &FieldDecayModel,
    placement: EmitterPlacement,
) -> Result<CavityQedResult, QedError> {
    let field_ratio = match placement {
        EmitterPlacement::FieldRatio(r) => r,
        EmitterPlacement::DepthNm(z) => field_at_depth(model, z)?,
    };
    let cav = CavityInputs { q, v_bar, field_ratio, stack: *stack };
    let g = coupling_rate(nv, &cav)?;
    let kappa = cavity_decay(nv.lambda_zpl_nm, q)?;
    let f = purcell_factor(nv, &cav)?;
    let beta = emission_fraction(f)?;
    Ok(CavityQedResult {
        g_hz: g,
        kappa_hz: kappa,
        gamma_tot_hz: nv.gamma_tot_hz,
        f_purcell: f,
        beta,
        field_ratio,
        strong_coupling_candidate: g > kappa && g > nv.gamma_tot_hz,
    })
}

#[derive(Debug, Error)]
pub enum QedError {
    #[error("invalid QED input: {0}")]
    Invalid(String),
}
