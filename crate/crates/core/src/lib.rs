//! Cross-phase-modulation reshaping of single-photon spectra.
//!
//! The crate models a control pulse travelling through a dispersion-managed
//! fiber together with a single photon at a group-velocity-matched
//! wavelength. The control imprints a phase `φ(t) ∝ P(t)` on the photon, which
//! shifts its instantaneous frequency by `−dφ/dt`. Because the photon field
//! obeys a linear equation, the whole interaction is a unitary operator on
//! the photon's spectral amplitude, and it can be applied column by column to
//! the joint spectral amplitude of a photon pair.
//!
//! Modules, bottom up:
//!
//! * [`gridkit`]: sampled grids and the time/frequency transform pair.
//! * [`fiber`]: group-delay fitting, GVD, group-velocity matching.
//! * [`propagate`]: split-step control propagation, XPM phase, the signal operator, power calibration.
//! * [`biphoton`]: joint spectral amplitudes, filtering, heralding, exchange symmetry.
//! * [`interference`]: Hong-Ou-Mandel fringes, visibility, bounds, accidentals.
//! * [`expcli`]: JSON-configured scenarios that write CSV/JSON/SVG outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod biphoton;
pub mod error;
pub mod expcli;
pub mod fiber;
pub mod gridkit;
pub mod interference;
pub mod propagate;
pub mod units;

pub use error::{Error, Result};
pub use gridkit::{ComplexEnvelope, Domain, RealSeries, SampledGrid};

pub use num_complex::Complex64;
