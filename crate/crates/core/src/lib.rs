//! Design toolkit for hybrid film-on-substrate photonic crystal nanowire
//! waveguides and nanocavities.
//!
//! The crate covers the full pipeline from a parametric device description to
//! cavity-QED figures of merit:
//!
//! - [`geometry`] turns a [`geometry::DeviceSpec`] into hole layouts and a
//!   sampled permittivity grid (with optional subpixel smoothing),
//! - [`fdtd`] is a 3D Yee-lattice time-domain Maxwell solver with PML,
//!   Bloch-periodic and mirror-symmetry boundaries, dipole sources, probes
//!   and spectral flux monitors,
//! - [`analysis`] extracts resonances (harmonic inversion), Q budgets, mode
//!   volumes/areas, band structures, group indices and waveguide loss,
//! - [`qed`] evaluates the closed-form emitter-cavity coupling rate, Purcell
//!   factor, emission fraction and waveguide coupling spectral density,
//! - [`reference`] holds independent analytic oracles (transfer matrix,
//!   slab-waveguide dispersion) used to validate the solver.
//!
//! Lengths are in nanometers and the vacuum speed of light is 1, so time is
//! also measured in nanometers. Frequencies are usually carried in the
//! dimensionless form `f * a_o` (pitch over vacuum wavelength); see [`units`].

pub mod analysis;
pub mod fdtd;
pub mod geometry;
pub mod qed;
pub mod reference;
pub mod units;
