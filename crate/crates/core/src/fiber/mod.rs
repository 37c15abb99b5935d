//! Fiber dispersion model.
//!
//! Group delay is kept as a polynomial in wavelength; β₂ and β₃ follow by
//! the chain rule `dω = −(2πc/λ²) dλ` on the analytic derivative.

mod curve;

pub use curve::{
    beta2_at, beta3_at, fit_group_delay, read_group_delay_csv, DelayFit, GroupDelayCurve,
    GroupDelaySample, MAX_DEGREE,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::{NM, PS};

/// Matching tolerance on the group-delay difference, s/m (1e−4 ps/m).
pub const MATCH_TOLERANCE: f64 = 1e-4 * PS;

/// XPM coefficient for co-polarized fields.
pub const XPM_COPOLARIZED: f64 = 2.0;
/// XPM coefficient for orthogonally polarized fields.
pub const XPM_ORTHOGONAL: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec {
    /// m
    pub length: f64,
    /// Nonlinear coefficient at the control wavelength, 1/(W·m).
    pub gamma_control: f64,
    /// Nonlinear coefficient at the signal wavelength, 1/(W·m).
    pub gamma_signal: f64,
    pub xpm_factor: f64,
    pub delay_curve: GroupDelayCurve,
    /// Power transmission applied to the signal, in (0, 1].
    pub transmission: f64,
}

impl FiberSpec {
    /// One metre of the bundled PCF approximation, co-polarized, lossless.
    pub fn bundled() -> Self {
        Self {
            length: 1.0,
            gamma_control: 0.018,
            gamma_signal: 0.008,
            xpm_factor: XPM_COPOLARIZED,
            delay_curve: GroupDelayCurve::bundled(),
            transmission: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::param("fiber length must be positive"));
        }
        if !(self.gamma_control >= 0.0 && self.gamma_signal >= 0.0) {
            return Err(Error::param("nonlinear coefficients must be non-negative"));
        }
        if !(self.xpm_factor >= 0.0 && self.xpm_factor.is_finite()) {
            return Err(Error::param("xpm factor must be non-negative"));
        }
        if !(self.transmission > 0.0 && self.transmission <= 1.0) {
            return Err(Error::param("transmission must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Linear propagation parameters at `wavelength`.
    pub fn channel(&self, wavelength: f64) -> Result<Channel> {
        Ok(Channel {
            wavelength,
            beta2: beta2_at(&self.delay_curve, wavelength)?,
            group_delay: self.delay_curve.delay(wavelength)?,
        })
    }
}

/// Linear propagation parameters of one field in the fiber.
///
/// Normally taken from [`FiberSpec::channel`]; the fields are public so a
/// channel can be idealised (e.g. `beta2 = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    /// m
    pub wavelength: f64,
    /// s²/m
    pub beta2: f64,
    /// s/m
    pub group_delay: f64,
}

/// `delay(λ_a) − delay(λ_b)` in s/m.
pub fn walkoff_per_meter(curve: &GroupDelayCurve, lambda_a: f64, lambda_b: f64) -> Result<f64> {
    Ok(curve.delay(lambda_a)? - curve.delay(lambda_b)?)
}

/// Finds the wavelength in `search` whose group delay equals that at
/// `lambda_ref`, by bisection on the sign change of the delay difference.
pub fn find_matched_wavelength(
    curve: &GroupDelayCurve,
    lambda_ref: f64,
    search: (f64, f64),
) -> Result<f64> {
    let (mut lo, mut hi) = search;
    if !(hi > lo) {
        return Err(Error::param("search window must be a non-empty interval"));
    }
    if lambda_ref >= lo && lambda_ref <= hi {
        return Err(Error::param("search window must exclude the reference wavelength"));
    }
    let target = curve.delay(lambda_ref)?;
    let f = |l: f64| curve.delay(l).map(|d| d - target);
    let (mut flo, fhi) = (f(lo)?, f(hi)?);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoMatchedWavelength {
            lo_nm: lo / NM,
            hi_nm: hi / NM,
        });
    }
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm == 0.0 || hi - lo < 1e-16 {
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if best.1.abs() >= MATCH_TOLERANCE {
        return Err(Error::Numerical(format!(
            "bisection stalled with residual {:.3e} ps/m",
            best.1 / PS
        )));
    }
    Ok(best.0)
}

/// First-order GVD bandwidth estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthLimit {
    /// Hz; `+∞` when the signal channel is dispersion free.
    pub hz: f64,
    pub dispersion_free: bool,
}

/// Shift scale `Δν = fwhm / (2π |β₂| L)` at which dispersive walk-off of the
/// shifted signal across the fiber equals the control width.
///
/// An order-of-magnitude design aid for how far XPM can push a photon before
/// GVD smears the interaction, not a precise limit.
pub fn gvd_bandwidth_limit(
    fiber: &FiberSpec,
    pulse_fwhm: f64,
    lambda_signal: f64,
) -> Result<BandwidthLimit> {
    if !(pulse_fwhm > 0.0) {
        return Err(Error::param("pulse width must be positive"));
    }
    let beta2 = beta2_at(&fiber.delay_curve, lambda_signal)?;
    if beta2 == 0.0 {
        return Ok(BandwidthLimit {
            hz: f64::INFINITY,
            dispersion_free: true,
        });
    }
    Ok(BandwidthLimit {
        hz: pulse_fwhm / (2.0 * PI * beta2.abs() * fiber.length),
        dispersion_free: false,
    })
}
