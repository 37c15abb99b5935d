use std::f64::consts::PI;

use log::debug;

use super::{
    evolve_control, max_power_for_step, signal_operator, synthesize_pulse, PropagationConfig,
    PulseSpec, Scheme, SignalOperator,
};
use crate::error::{Error, Result};
use crate::fiber::{Channel, FiberSpec};
use crate::gridkit::{ComplexEnvelope, Domain, SampledGrid};

/// Something whose signal spectrum can be pushed through a [`SignalOperator`].
pub trait SignalProbe {
    /// Signal detuning grid the operator must be built on.
    fn frequency_grid(&self) -> SampledGrid;

    /// Temporal centroid of the signal in its own frame, s.
    fn time_origin(&self) -> Result<f64>;

    /// Signal spectral centroid (detuning, rad/s) after `op`, or of the input
    /// when `op` is `None`.
    fn spectral_centroid(&self, op: Option<&SignalOperator>) -> Result<f64>;
}

impl SignalProbe for ComplexEnvelope {
    fn frequency_grid(&self) -> SampledGrid {
        match self.grid().domain() {
            Domain::Frequency => *self.grid(),
            Domain::Time => self.grid().conjugate(self.carrier()),
        }
    }

    fn time_origin(&self) -> Result<f64> {
        match self.grid().domain() {
            Domain::Time => self.centroid(),
            Domain::Frequency => self.to_time()?.centroid(),
        }
    }

    fn spectral_centroid(&self, op: Option<&SignalOperator>) -> Result<f64> {
        let spec = match self.grid().domain() {
            Domain::Frequency => self.clone(),
            Domain::Time => self.to_frequency()?,
        };
        match op {
            Some(op) => op.apply(&spec)?.centroid(),
            None => spec.centroid(),
        }
    }
}

/// Everything except the peak power and `ΔT` needed to build a signal operator.
#[derive(Debug, Clone)]
pub struct CalibrationTemplate {
    pub fiber: FiberSpec,
    /// Control pulse; `peak_power` and `delay` are overridden.
    pub pulse: PulseSpec,
    pub control_grid: SampledGrid,
    pub config: PropagationConfig,
    pub signal: Channel,
    /// `ΔT` search window relative to the signal's temporal centroid, s.
    pub delay_window: (f64, f64),
    pub coarse_points: usize,
    pub max_peak_power: f64,
}

impl CalibrationTemplate {
    /// Operator for a given power and `ΔT` (relative to the probe's centroid).
    pub fn operator(
        &self,
        probe: &impl SignalProbe,
        peak_power: f64,
        delta_t: f64,
    ) -> Result<SignalOperator> {
        let pulse = PulseSpec {
            peak_power,
            delay: delta_t,
            ..self.pulse
        };
        let control = synthesize_pulse(&pulse, &self.control_grid)?;
        let history = evolve_control(&control, &self.fiber, &self.config)?;
        signal_operator(
            &history,
            &self.fiber,
            &self.signal,
            &probe.frequency_grid(),
            delta_t - probe.time_origin()?,
        )
    }

    /// Highest power the template may use.
    pub fn power_ceiling(&self) -> f64 {
        let mut p = self.max_peak_power;
        if self.config.scheme == Scheme::SplitStep && self.config.include_spm {
            p = p.min(max_power_for_step(&self.fiber, self.config.z_steps));
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// W
    pub peak_power: f64,
    /// `ΔT` of maximum blue shift, s.
    pub delay: f64,
    /// Achieved centroid shift, Hz.
    pub shift_hz: f64,
    /// Number of operator evaluations spent.
    pub evaluations: usize,
}

const REL_TOL: f64 = 2e-3;
const DELAY_TOL: f64 = 5e-15;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

struct Evaluator<'a, P: SignalProbe> {
    template: &'a CalibrationTemplate,
    probe: &'a P,
    baseline: f64,
    count: usize,
}

impl<P: SignalProbe> Evaluator<'_, P> {
    /// Centroid shift in Hz.
    fn shift(&mut self, power: f64, delta_t: f64) -> Result<f64> {
        self.count += 1;
        let op = self.template.operator(self.probe, power, delta_t)?;
        let c = self.probe.spectral_centroid(Some(&op))?;
        Ok((c - self.baseline) / (2.0 * PI))
    }

    /// Coarse scan of the delay window; returns the best grid point.
    fn scan(&mut self, power: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.template.delay_window;
        let n = self.template.coarse_points;
        let mut best = (lo, f64::NEG_INFINITY);
        for k in 0..n {
            let d = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let s = self.shift(power, d)?;
            if s > best.1 {
                best = (d, s);
            }
        }
        Ok(best)
    }

    /// Golden-section maximization of the shift over `[a, b]`.
    fn refine(&mut self, power: f64, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = self.shift(power, c)?;
        let mut fd = self.shift(power, d)?;
        while b - a > DELAY_TOL {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = self.shift(power, c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = self.shift(power, d)?;
            }
        }
        Ok(if fc > fd { (c, fc) } else { (d, fd) })
    }
}

/// `ΔT` in the template's window that maximizes the blue shift at a fixed
/// power, and that shift in Hz.
pub fn max_shift_delay(
    template: &CalibrationTemplate,
    probe: &impl SignalProbe,
    peak_power: f64,
) -> Result<(f64, f64)> {
    let (lo, hi) = template.delay_window;
    if !(hi > lo) || template.coarse_points < 3 {
        return Err(Error::param("delay window needs hi > lo and at least 3 coarse points"));
    }
    let mut ev = Evaluator {
        template,
        probe,
        baseline: probe.spectral_centroid(None)?,
        count: 0,
    };
    let step = (hi - lo) / (template.coarse_points - 1) as f64;
    let (d0, _) = ev.scan(peak_power)?;
    ev.refine(peak_power, d0 - step, d0 + step)
}

/// Finds the control peak power whose maximal blue shift of the probe's
/// spectral centroid equals `target_hz`, and the `ΔT` where it occurs.
///
/// `ΔT` is located by a coarse scan and golden-section refinement; the power
/// by a safeguarded secant iteration at that `ΔT`, re-refining `ΔT` after each
/// power update.
pub fn calibrate_peak_power(
    target_hz: f64,
    template: &CalibrationTemplate,
    probe: &impl SignalProbe,
) -> Result<Calibration> {
    if !(target_hz >= 0.0 && target_hz.is_finite()) {
        return Err(Error::param("target shift must be a non-negative number"));
    }
    let (lo, hi) = template.delay_window;
    if !(hi > lo) || template.coarse_points < 3 {
        return Err(Error::param("delay window needs hi > lo and at least 3 coarse points"));
    }
    if target_hz == 0.0 {
        return Ok(Calibration {
            peak_power: 0.0,
            delay: 0.0,
            shift_hz: 0.0,
            evaluations: 0,
        });
    }
    let fiber = &template.fiber;
    let per_watt = fiber.xpm_factor * fiber.gamma_signal * fiber.length;
    if !(per_watt > 0.0) {
        return Err(Error::param("fiber has no cross-phase modulation"));
    }
    let ceiling = template.power_ceiling();
    if !(ceiling > 0.0) {
        return Err(Error::param("maximum peak power must be positive"));
    }

    let mut ev = Evaluator {
        template,
        probe,
        baseline: probe.spectral_centroid(None)?,
        count: 0,
    };
    let step = (hi - lo) / (template.coarse_points - 1) as f64;

    // probe at about one radian of peak phase
    let p_probe = ceiling.min(1.0 / per_watt);
    let (d0, _) = ev.scan(p_probe)?;
    let (mut delay, s_probe) = ev.refine(p_probe, d0 - step, d0 + step)?;
    debug!("probe {p_probe:.3} W gives {:.4} THz at {:.4} ps", s_probe * 1e-12, delay * 1e12);
    if !(s_probe > 0.0) {
        return Err(Error::Saturated {
            target_thz: target_hz * 1e-12,
            reached_thz: s_probe.max(0.0) * 1e-12,
            max_power_w: p_probe,
        });
    }

    // bracket [p_lo, p_hi] with shift(p_lo) < target <= shift(p_hi)
    let (mut p_lo, mut s_lo) = (0.0, 0.0);
    let (mut p_hi, mut s_hi) = (f64::NAN, f64::NAN);
    let (mut p_prev, mut s_prev) = (p_probe, s_probe);
    if s_probe < target_hz {
        p_lo = p_probe;
        s_lo = s_probe;
    } else {
        p_hi = p_probe;
        s_hi = s_probe;
    }
    let mut power = (p_probe * target_hz / s_probe).min(ceiling);

    for round in 0..40 {
        let mut s = ev.shift(power, delay)?;
        // the optimal delay drifts with power once SPM and GVD matter
        if round % 3 == 0 || (s - target_hz).abs() <= REL_TOL * target_hz {
            let (d, sd) = ev.refine(power, delay - 0.5 * step, delay + 0.5 * step)?;
            delay = d;
            s = sd;
        }
        debug!("round {round}: {power:.4} W -> {:.5} THz at {:.4} ps", s * 1e-12, delay * 1e12);
        if (s - target_hz).abs() <= REL_TOL * target_hz {
            return Ok(Calibration {
                peak_power: power,
                delay,
                shift_hz: s,
                evaluations: ev.count,
            });
        }
        if s < target_hz {
            if power >= ceiling {
                return Err(Error::Saturated {
                    target_thz: target_hz * 1e-12,
                    reached_thz: s * 1e-12,
                    max_power_w: power,
                });
            }
            p_lo = power;
            s_lo = s;
        } else {
            p_hi = power;
            s_hi = s;
        }
        let secant = if s != s_prev {
            power + (target_hz - s) * (power - p_prev) / (s - s_prev)
        } else {
            f64::NAN
        };
        p_prev = power;
        s_prev = s;
        power = if p_hi.is_nan() {
            // no upper bracket yet: extrapolate, capped at the ceiling
            let lin = power * target_hz / s;
            if secant.is_finite() && secant > power { secant.max(lin).min(ceiling) } else { lin.min(ceiling) }
        } else if secant.is_finite() && secant > p_lo && secant < p_hi {
            secant
        } else {
            // regula falsi fallback inside the bracket
            p_lo + (target_hz - s_lo) * (p_hi - p_lo) / (s_hi - s_lo)
        };
    }
    Err(Error::Numerical("power calibration did not converge".into()))
}
