//! Physics extraction from raw runs: resonances, Q budgets, mode integrals,
//! band structures, group index, waveguide loss, and the local band-edge
//! "optical potential" of a graded cavity.

mod eig;
mod harminv;
mod modes;

pub use harminv::{
    harmonic_inversion, harmonic_inversion_real, HarminvOptions, HarminvOutput,
    ResonanceEstimate,
};
pub use modes::{classify_mode, mode_area, mode_volume, IntegralResult, ModeProfile};

use crate::geometry::{HoleLayout, MaterialStack};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("insufficient signal: {0}")]
    InsufficientSignal(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("profile carries no field energy")]
    EmptyProfile,
    #[error("k samples must be strictly monotone")]
    NonMonotonicK,
    #[error("group velocity is zero at the band edge")]
    ZeroGroupVelocity,
    #[error("need at least {0} samples")]
    TooFewSamples(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Directional Q decomposition. `1/q_total = sum(1/q_i)` holds by
/// construction; a direction with zero measured power carries `q = inf`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QBudget {
    pub q_total: f64,
    pub q_top: f64,
    pub q_bot: f64,
    pub q_end: f64,
    pub q_side: f64,
    /// Set when the total power vanished (Q unbounded).
    pub saturated: bool,
}

/// Power grouped by radiation direction: top = +z, bottom = -z,
/// end = +/-x combined, side = +/-y combined.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct DirectionalPowers {
    pub top: f64,
    pub bottom: f64,
    pub end: f64,
    pub side: f64,
}

impl DirectionalPowers {
    /// Groups the six per-face powers of a ring-down window, doubling faces
    /// suppressed by a mirror plane.
    pub fn from_faces(face_power: [f64; 6], mirror_x: bool, mirror_y: bool) -> Self {
        let end = if mirror_x { 2.0 * face_power[1] } else { face_power[0] + face_power[1] };
        let side = if mirror_y { 2.0 * face_power[3] } else { face_power[2] + face_power[3] };
        DirectionalPowers {
            top: face_power[5],
            bottom: face_power[4],
            end,
            side,
        }
    }

    pub fn total(&self) -> f64 {
        self.top + self.bottom + self.end + self.side
    }
}

/// Q budget from the steady-state ratio of stored energy and radiated power:
/// `q_i = omega * energy / p_i`. `omega` is the angular frequency in the
/// same time units as the energy/power measurements.
pub fn q_from_energy_flux(
    omega: f64,
    stored_energy: f64,
    powers: DirectionalPowers,
) -> Result<QBudget, AnalysisError> {
    if !(stored_energy > 0.0) {
        return Err(AnalysisError::Invalid(format!(
            "stored energy must be positive, got {stored_energy}"
        )));
    }
    if !(omega > 0.0) {
        return Err(AnalysisError::Invalid(format!("omega must be positive, got {omega}")));
    }
    let wu = omega * stored_energy;
    let q_of = |p: f64| if p > 0.0 { wu / p } else { f64::INFINITY };
    let total = powers.total();
    Ok(QBudget {
        q_total: q_of(total),
        q_top: q_of(powers.top),
        q_bot: q_of(powers.bottom),
        q_end: q_of(powers.end),
        q_side: q_of(powers.side),
        saturated: !(total > 0.0),
    })
}

/// Band label; `Te1`/`Tm1` are the two lowest bands of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandLabel {
    Te1,
    Tm1,
    Other(u32),
}

impl std::fmt::Display for BandLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BandLabel::Te1 => write!(f, "TE-1"),
            BandLabel::Tm1 => write!(f, "TM-1"),
            BandLabel::Other(i) => write!(f, "band-{i}"),
        }
    }
}

/// One extracted Bloch mode before band assignment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModePoint {
    /// Normalized wavenumber `k a / 2 pi`.
    pub k: f64,
    /// Normalized frequency `f a_o` (pitch over vacuum wavelength).
    pub frequency: f64,
    pub q_wg: f64,
    /// Electric-energy fraction in Ey.
    pub te_fraction: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandEntry {
    pub k: f64,
    pub band: BandLabel,
    pub frequency: f64,
    pub q_wg: f64,
    pub te_fraction: f64,
}

/// Dispersion of a uniform medium and of the patterned substrate slab.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Lightlines {
    pub air: Vec<(f64, f64)>,
    pub substrate: Vec<(f64, f64)>,
    pub film: Vec<(f64, f64)>,
    /// Lowest band of the vertically-invariant patterned substrate slab.
    pub structured: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandStructure {
    pub entries: Vec<BandEntry>,
    pub lightlines: Lightlines,
    pub flags: Vec<String>,
}

impl BandStructure {
    /// CSV export: `k a/2pi, omega a/2pi c, band, te_fraction, q_wg`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("# k_a_over_2pi, omega_a_over_2pic, band, te_fraction, q_wg\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{:.9},{:.9},{},{:.6},{:.6e}\n",
                e.k, e.frequency, e.band, e.te_fraction, e.q_wg
            ));
        }
        out
    }
}

/// Display cutoff below which leaky modes are dropped from band structures.
pub const Q_WG_DISPLAY_FLOOR: f64 = 100.0;

/// Connects per-k mode lists into labelled bands and attaches lightlines.
///
/// Modes with `q_wg` below the display floor are dropped. Band connection is
/// by frequency continuity with a polarization-class tiebreak; ambiguous
/// assignments near crossings are flagged.
pub fn assemble_band_structure(
    per_k: &[(f64, Vec<ModePoint>)],
    stack: &MaterialStack,
    structured: Vec<(f64, f64)>,
) -> BandStructure {
    struct Band {
        te_like: bool,
        points: Vec<ModePoint>,
    }
    let mut ks: Vec<&(f64, Vec<ModePoint>)> = per_k.iter().collect();
    ks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut bands: Vec<Band> = Vec::new();
    let mut flags = Vec::new();
    for (k, modes) in ks.iter() {
        let mut kept: Vec<&ModePoint> = modes
            .iter()
            .filter(|m| m.q_wg >= Q_WG_DISPLAY_FLOOR)
            .collect();
        kept.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap());
        let mut taken: Vec<usize> = Vec::new();
        for m in kept {
            let te_like = m.te_fraction > 0.5;
            let mut best: Option<(usize, f64)> = None;
            let mut second: Option<f64> = None;
            for (bi, b) in bands.iter().enumerate() {
                if b.te_like != te_like || taken.contains(&bi) {
                    continue;
                }
                let last = b.points.last().unwrap();
                let d = (last.frequency - m.frequency).abs();
                match best {
                    None => best = Some((bi, d)),
                    Some((_, bd)) if d < bd => {
                        second = Some(bd);
                        best = Some((bi, d));
                    }
                    Some((_, bd)) => {
                        second = Some(second.map_or(d, |s| s.min(d)));
                        let _ = bd;
                    }
                }
            }
            // A band may not jump more than this between adjacent k samples.
            let max_jump = 0.08 * m.frequency.max(1e-9);
            match best {
                Some((bi, d)) if d <= max_jump => {
                    if let Some(s) = second {
                        if s < 2.0 * d && s <= max_jump {
                            flags.push(format!(
                                "band-crossing ambiguity at k = {k}: nearest frequencies differ by {d:.3e} vs {s:.3e}"
                            ));
                        }
                    }
                    bands[bi].points.push(*m);
                    taken.push(bi);
                }
                _ => {
                    bands.push(Band { te_like, points: vec![*m] });
                    taken.push(bands.len() - 1);
                }
            }
        }
    }
    // Label: lowest mean frequency per polarization class.
    let mean = |b: &Band| b.points.iter().map(|p| p.frequency).sum::<f64>() / b.points.len() as f64;
    let lowest = |te: bool| {
        bands
            .iter()
            .enumerate()
            .filter(|(_, b)| b.te_like == te)
            .min_by(|a, b| mean(a.1).partial_cmp(&mean(b.1)).unwrap())
            .map(|(i, _)| i)
    };
    let te1 = lowest(true);
    let tm1 = lowest(false);
    let mut entries = Vec::new();
    let mut other = 0u32;
    for (bi, b) in bands.iter().enumerate() {
        let label = if Some(bi) == te1 {
            BandLabel::Te1
        } else if Some(bi) == tm1 {
            BandLabel::Tm1
        } else {
            other += 1;
            BandLabel::Other(other)
        };
        for p in &b.points {
            entries.push(BandEntry {
                k: p.k,
                band: label,
                frequency: p.frequency,
                q_wg: p.q_wg,
                te_fraction: p.te_fraction,
            });
        }
    }
    entries.sort_by(|a, b| (a.k, a.frequency).partial_cmp(&(b.k, b.frequency)).unwrap());

    let k_samples: Vec<f64> = ks.iter().map(|(k, _)| *k).collect();
    let line = |n: f64| -> Vec<(f64, f64)> {
        k_samples.iter().map(|&k| (k, k / n)).collect()
    };
    BandStructure {
        entries,
        lightlines: Lightlines {
            air: line(stack.n_air),
            substrate: line(stack.n_substrate),
            film: line(stack.n_film),
            structured,
        },
        flags,
    }
}

/// Group index from a sampled band. Input points are
/// `(k a/2pi, omega a/2pi c)` pairs (any consistent normalization works);
/// output pairs are `(frequency, n_g)`.
///
/// Centered differences in the interior, one-sided at the ends.
pub fn group_index(band: &[(f64, f64)]) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if band.len() < 3 {
        return Err(AnalysisError::TooFewSamples(3));
    }
    let increasing = band.windows(2).all(|w| w[1].0 > w[0].0);
    let decreasing = band.windows(2).all(|w| w[1].0 < w[0].0);
    if !increasing && !decreasing {
        return Err(AnalysisError::NonMonotonicK);
    }
    let n = band.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let dk = band[hi].0 - band[lo].0;
        let df = band[hi].1 - band[lo].1;
        if df == 0.0 {
            return Err(AnalysisError::ZeroGroupVelocity);
        }
        out.push((band[i].1, dk / df));
    }
    Ok(out)
}

/// Propagation loss from the per-cycle loss of a Bloch mode:
/// `alpha = omega / (Q_wg v_g)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaveguideLoss {
    pub alpha_per_m: f64,
    pub db_per_cm: f64,
}

/// `f_norm` is the normalized frequency (pitch/lambda), `vg_over_c` the
/// group velocity as a fraction of c.
pub fn waveguide_loss(
    f_norm: f64,
    pitch_nm: f64,
    q_wg: f64,
    vg_over_c: f64,
) -> Result<WaveguideLoss, AnalysisError> {
    if !(f_norm > 0.0 && pitch_nm > 0.0 && q_wg > 0.0) {
        return Err(AnalysisError::Invalid(
            "frequency, pitch and Q must be positive".into(),
        ));
    }
    if vg_over_c == 0.0 {
        return Err(AnalysisError::ZeroGroupVelocity);
    }
    // omega / (Q vg) with omega = 2 pi f c / pitch; the c cancels against vg.
    let alpha_per_m =
        2.0 * std::f64::consts::PI * f_norm / (pitch_nm * 1e-9 * q_wg * vg_over_c.abs());
    // Standard power-attenuation conversion, 10 log10(e) per decade of e.
    let db_per_cm = 10.0 * std::f64::consts::E.log10() * alpha_per_m / 100.0;
    Ok(WaveguideLoss { alpha_per_m, db_per_cm })
}

/// The local band-edge "optical potential" of a graded cavity: for each gap
/// midpoint `x_i`, the TE-1 band-edge frequency of a uniform waveguide with
/// that local spacing. `edge_fn(spacing_nm)` supplies the band-edge
/// frequency in bulk-pitch-normalized units (usually backed by cached
/// unit-cell runs).
pub fn band_edge_potential<E>(
    layout: &HoleLayout,
    mut edge_fn: impl FnMut(f64) -> Result<f64, E>,
) -> Result<Vec<(f64, f64)>, PotentialError<E>> {
    let mut out = Vec::new();
    for pair in layout.holes.windows(2) {
        let x = 0.5 * (pair[0].center + pair[1].center);
        let spacing = pair[1].center - pair[0].center;
        let f = edge_fn(spacing).map_err(|source| PotentialError { x, source })?;
        out.push((x, f));
    }
    Ok(out)
}

/// Unit-cell failure inside a potential sweep, tagged with the position.
#[derive(Debug, Error)]
#[error("band-edge computation failed at x = {x} nm")]
pub struct PotentialError<E> {
    pub x: f64,
    #[source]
    pub source: E,
}
