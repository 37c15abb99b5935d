//! Control-pulse propagation and the linear operator it induces on a
//! co-propagating single photon.
//!
//! Sign conventions: the Kerr phase enters as `exp(+iφ)`, the instantaneous
//! frequency shift is `Δω = −dφ/dt`, and a positive delay `ΔT` puts the
//! signal photon on the trailing edge of the control (blue shift).

mod calibrate;
mod operator;

pub use calibrate::{calibrate_peak_power, max_shift_delay, Calibration, CalibrationTemplate, SignalProbe};
pub use operator::{
    instantaneous_frequency, signal_operator, xpm_phase, PhaseProfile, SignalOperator,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::{Channel, FiberSpec};
use crate::gridkit::{spectrum_to_time, time_to_spectrum, ComplexEnvelope, Domain, SampledGrid};
use crate::units;

/// Ratio of intensity FWHM to `T₀` for a `sech²` pulse: `2·acosh(√2)`.
pub const SECH_FWHM_RATIO: f64 = 1.762_747_174_039_086;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Gaussian,
    Sech,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// Intensity FWHM, s.
    pub fwhm: f64,
    /// W
    pub peak_power: f64,
    /// m
    pub wavelength: f64,
    /// `ΔT`, s. Positive puts the signal after the control peak.
    pub delay: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm > 0.0 && self.fwhm.is_finite()) {
            return Err(Error::param("pulse fwhm must be positive"));
        }
        if !(self.peak_power >= 0.0 && self.peak_power.is_finite()) {
            return Err(Error::param("peak power must be non-negative"));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::param("pulse wavelength must be positive"));
        }
        if !self.delay.is_finite() {
            return Err(Error::param("pulse delay must be finite"));
        }
        Ok(())
    }

    /// Normalized intensity profile `P(t)/P₀` for a pulse centered at zero.
    pub fn profile(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::Gaussian => (-4.0 * 2f64.ln() * (t / self.fwhm).powi(2)).exp(),
            PulseShape::Sech => {
                let t0 = self.fwhm / SECH_FWHM_RATIO;
                1.0 / (t / t0).cosh().powi(2)
            }
        }
    }
}

/// Transform-limited control envelope with its peak at `t = 0`.
///
/// The delay is not applied here: the control defines the reference frame and
/// `ΔT` enters when the signal operator samples the control.
pub fn synthesize_pulse(spec: &PulseSpec, grid: &SampledGrid) -> Result<ComplexEnvelope> {
    spec.validate()?;
    if grid.domain() != Domain::Time {
        return Err(Error::InvalidGrid("pulses are synthesized on a time grid".into()));
    }
    if grid.span() < 10.0 * spec.fwhm {
        return Err(Error::InvalidGrid(format!(
            "window {:.3} ps is shorter than 10 pulse widths ({:.3} ps)",
            grid.span() / units::PS,
            10.0 * spec.fwhm / units::PS
        )));
    }
    let p0 = spec.peak_power;
    ComplexEnvelope::from_fn(*grid, units::angular_frequency(spec.wavelength), |t| {
        Complex64::new((p0 * spec.profile(t)).sqrt(), 0.0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Frozen control, one phase screen between two half-length dispersion steps.
    Lumped,
    /// Symmetric split-step over `z_steps` slices.
    SplitStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub z_steps: usize,
    pub scheme: Scheme,
    pub include_control_dispersion: bool,
    pub include_spm: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            z_steps: 64,
            scheme: Scheme::SplitStep,
            include_control_dispersion: true,
            include_spm: true,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.z_steps == 0 {
            return Err(Error::param("z_steps must be at least 1"));
        }
        if self.scheme == Scheme::SplitStep && self.z_steps < 8 {
            return Err(Error::param("split-step propagation needs at least 8 z steps"));
        }
        Ok(())
    }
}

/// The control field sampled along the fiber.
///
/// `steps[m]` is the control at the middle of slice `m`, i.e. at
/// `z = (m + ½)·dz`, in the control's co-moving frame.
#[derive(Debug, Clone)]
pub struct ControlHistory {
    pub channel: Channel,
    pub scheme: Scheme,
    pub dz: f64,
    pub steps: Vec<ComplexEnvelope>,
    pub output: ComplexEnvelope,
}

impl ControlHistory {
    pub fn grid(&self) -> &SampledGrid {
        self.output.grid()
    }

    pub fn length(&self) -> f64 {
        self.dz * self.steps.len() as f64
    }

    pub fn peak_power(&self) -> f64 {
        self.steps
            .iter()
            .flat_map(|e| e.samples().iter().map(|z| z.norm_sqr()))
            .fold(0.0, f64::max)
    }
}

/// Largest peak power for which `dz ≤ L_NL/4` holds.
pub fn max_power_for_step(fiber: &FiberSpec, z_steps: usize) -> f64 {
    let dz = fiber.length / z_steps as f64;
    if fiber.gamma_control > 0.0 {
        1.0 / (4.0 * fiber.gamma_control * dz)
    } else {
        f64::INFINITY
    }
}

/// Propagates the control through the fiber.
///
/// Split-step solves `∂A/∂z = −i(β₂/2)∂²A/∂t² + iγ_c|A|²A`; the lumped scheme
/// returns the input at every slice.
pub fn evolve_control(
    pulse: &ComplexEnvelope,
    fiber: &FiberSpec,
    cfg: &PropagationConfig,
) -> Result<ControlHistory> {
    cfg.validate()?;
    fiber.validate()?;
    let grid = *pulse.grid();
    if grid.domain() != Domain::Time {
        return Err(Error::InvalidGrid("control must be given in the time domain".into()));
    }
    let channel = fiber.channel(units::wavelength(pulse.carrier()))?;
    let dz = fiber.length / cfg.z_steps as f64;

    if cfg.scheme == Scheme::Lumped {
        return Ok(ControlHistory {
            channel,
            scheme: cfg.scheme,
            dz,
            steps: vec![pulse.clone(); cfg.z_steps],
            output: pulse.clone(),
        });
    }

    let gamma = if cfg.include_spm { fiber.gamma_control } else { 0.0 };
    let peak = pulse.samples().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if gamma > 0.0 && peak > 0.0 {
        let l_nl = 1.0 / (gamma * peak);
        if dz > 0.25 * l_nl {
            return Err(Error::StepTooCoarse {
                dz,
                limit: 0.25 * l_nl,
                min_steps: (4.0 * fiber.length / l_nl).ceil() as usize,
            });
        }
    }

    let beta2 = if cfg.include_control_dispersion { channel.beta2 } else { 0.0 };
    let spectral = grid.conjugate(pulse.carrier());
    let half: Option<Vec<Complex64>> = (beta2 != 0.0).then(|| {
        (0..grid.n())
            .map(|k| {
                let nu = spectral.offset(k);
                Complex64::from_polar(1.0, 0.25 * beta2 * nu * nu * dz)
            })
            .collect()
    });
    let half_step = |buf: &mut Vec<Complex64>| {
        if let Some(h) = &half {
            time_to_spectrum(buf, grid.spacing());
            for (x, f) in buf.iter_mut().zip(h) {
                *x *= f;
            }
            spectrum_to_time(buf, spectral.spacing());
        }
    };

    let mut field = pulse.samples().to_vec();
    let mut steps = Vec::with_capacity(cfg.z_steps);
    for _ in 0..cfg.z_steps {
        half_step(&mut field);
        steps.push(ComplexEnvelope::new(grid, pulse.carrier(), field.clone())?);
        if gamma > 0.0 {
            for x in field.iter_mut() {
                *x *= Complex64::from_polar(1.0, gamma * x.norm_sqr() * dz);
            }
        }
        half_step(&mut field);
    }
    Ok(ControlHistory {
        channel,
        scheme: cfg.scheme,
        dz,
        steps,
        output: ComplexEnvelope::new(grid, pulse.carrier(), field)?,
    })
}

/// Gaussian pulse energy `P₀·fwhm·√(π/(4 ln 2))`.
pub fn gaussian_energy(peak_power: f64, fwhm: f64) -> f64 {
    peak_power * fwhm * (PI / (4.0 * 2f64.ln())).sqrt()
}
