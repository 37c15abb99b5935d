use num_complex::Complex64;

use super::{ControlHistory, Scheme};
use crate::error::{Error, Result};
use crate::fiber::{Channel, FiberSpec};
use crate::gridkit::{plan, ComplexEnvelope, Domain, RealSeries, SampledGrid};

/// Phase imprinted on the signal, sampled on the signal's time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub grid: SampledGrid,
    pub phase: Vec<f64>,
}

impl PhaseProfile {
    pub fn max(&self) -> f64 {
        self.phase.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Linear interpolation of the control intensity at offset `t`; zero outside
/// the control window.
fn sample(intensity: &[f64], grid: &SampledGrid, t: f64) -> f64 {
    let x = t / grid.spacing() + (grid.n() / 2) as f64;
    if !(x >= 0.0) {
        return 0.0;
    }
    let k = x.floor() as usize;
    if k + 1 >= intensity.len() {
        return 0.0;
    }
    let f = x - k as f64;
    intensity[k] * (1.0 - f) + intensity[k + 1] * f
}

/// Per-slice XPM phases on `grid` (a signal time grid).
///
/// The signal frame is the signal's own retarded time. In it the control peak
/// starts at `t = −delay` and slips by `walkoff` per metre.
fn slice_phases(
    history: &ControlHistory,
    fiber: &FiberSpec,
    grid: &SampledGrid,
    delay: f64,
    walkoff: f64,
) -> Result<Vec<Vec<f64>>> {
    if grid.domain() != Domain::Time {
        return Err(Error::InvalidGrid("XPM phase is evaluated on a time grid".into()));
    }
    if !delay.is_finite() || !walkoff.is_finite() {
        return Err(Error::param("delay and walk-off must be finite"));
    }
    let scale = fiber.xpm_factor * fiber.gamma_signal * history.dz;
    let cgrid = history.grid();
    Ok(history
        .steps
        .iter()
        .enumerate()
        .map(|(m, env)| {
            let z = (m as f64 + 0.5) * history.dz;
            let shift = delay + walkoff * z;
            let intensity = env.intensity();
            (0..grid.n())
                .map(|k| scale * sample(&intensity, cgrid, grid.offset(k) + shift))
                .collect()
        })
        .collect())
}

/// Total XPM phase `φ(t) = xpm·γ_s·Σ_m P_m(t + delay + walkoff·z_m)·dz`.
pub fn xpm_phase(
    history: &ControlHistory,
    fiber: &FiberSpec,
    grid: &SampledGrid,
    delay: f64,
    walkoff: f64,
) -> Result<PhaseProfile> {
    let slices = slice_phases(history, fiber, grid, delay, walkoff)?;
    let mut phase = vec![0.0; grid.n()];
    for s in &slices {
        for (p, v) in phase.iter_mut().zip(s) {
            *p += v;
        }
    }
    Ok(PhaseProfile { grid: *grid, phase })
}

/// `Δω(t) = −dφ/dt` by central differences (one-sided at the ends).
pub fn instantaneous_frequency(phi: &PhaseProfile) -> RealSeries {
    let p = &phi.phase;
    let n = p.len();
    let dt = phi.grid.spacing();
    let values = (0..n)
        .map(|k| {
            let d = if k == 0 {
                (p[1] - p[0]) / dt
            } else if k == n - 1 {
                (p[n - 1] - p[n - 2]) / dt
            } else {
                (p[k + 1] - p[k - 1]) / (2.0 * dt)
            };
            -d
        })
        .collect();
    RealSeries {
        grid: phi.grid,
        values,
    }
}

/// The linear map a control pulse applies to a single-photon signal.
///
/// Stored as alternating spectral dispersion factors and temporal phase
/// screens, all in FFT natural order so application needs no reshuffling.
#[derive(Debug, Clone)]
pub struct SignalOperator {
    grid: SampledGrid,
    edge: Option<Vec<Complex64>>,
    inner: Option<Vec<Complex64>>,
    screens: Vec<Vec<Complex64>>,
    amplitude: f64,
    max_phase: f64,
}

/// Builds the signal operator on the frequency grid `grid`.
///
/// `delay` places the control peak at signal time `−delay`; walk-off is the
/// difference of the signal and control group delays.
pub fn signal_operator(
    history: &ControlHistory,
    fiber: &FiberSpec,
    signal: &Channel,
    grid: &SampledGrid,
    delay: f64,
) -> Result<SignalOperator> {
    if grid.domain() != Domain::Frequency {
        return Err(Error::GridMismatch("signal operator needs a frequency grid".into()));
    }
    let n = grid.n();
    let tgrid = grid.conjugate(grid.center());
    let walkoff = signal.group_delay - history.channel.group_delay;
    let mut slices = slice_phases(history, fiber, &tgrid, delay, walkoff)?;
    let dz = history.dz;
    let beta2 = signal.beta2;

    // without dispersion every screen commutes and they collapse into one
    let collapse = history.scheme == Scheme::Lumped || beta2 == 0.0;
    if collapse {
        let mut total = vec![0.0; n];
        for s in &slices {
            for (p, v) in total.iter_mut().zip(s) {
                *p += v;
            }
        }
        slices = vec![total];
    }
    let max_phase = slices
        .iter()
        .flat_map(|s| s.iter().cloned())
        .fold(0.0_f64, |a, b| a.max(b.abs()));

    let natural = |k: usize| (k + n / 2) % n;
    let dispersion = |length: f64| -> Option<Vec<Complex64>> {
        (beta2 != 0.0).then(|| {
            (0..n)
                .map(|j| {
                    let nu = grid.offset(natural(j));
                    Complex64::from_polar(1.0, 0.5 * beta2 * nu * nu * length)
                })
                .collect()
        })
    };
    let length = history.length();
    let (edge, inner) = if collapse {
        (dispersion(0.5 * length), None)
    } else {
        (dispersion(0.5 * dz), dispersion(dz))
    };
    let inv_n = 1.0 / n as f64;
    let screens = slices
        .iter()
        .map(|phi| {
            (0..n)
                .map(|j| Complex64::from_polar(inv_n, phi[natural(j)]))
                .collect()
        })
        .collect();
    Ok(SignalOperator {
        grid: *grid,
        edge,
        inner,
        screens,
        amplitude: fiber.transmission.sqrt(),
        max_phase,
    })
}

impl SignalOperator {
    /// The signal frequency grid the operator acts on.
    pub fn grid(&self) -> &SampledGrid {
        &self.grid
    }

    /// Largest phase imparted by any single screen, rad.
    pub fn max_phase(&self) -> f64 {
        self.max_phase
    }

    /// Applies the operator to a centered spectrum on [`grid`](Self::grid).
    pub fn apply_spectrum_in_place(&self, buf: &mut [Complex64]) {
        let n = self.grid.n();
        assert_eq!(buf.len(), n, "spectrum length must match the operator grid");
        let forward = plan(n, false);
        let inverse = plan(n, true);
        let mut scratch = vec![
            Complex64::new(0.0, 0.0);
            forward
                .get_inplace_scratch_len()
                .max(inverse.get_inplace_scratch_len())
        ];
        let mul = |buf: &mut [Complex64], f: &[Complex64]| {
            for (x, y) in buf.iter_mut().zip(f) {
                *x *= y;
            }
        };
        buf.rotate_left(n / 2);
        for (m, screen) in self.screens.iter().enumerate() {
            let d = if m == 0 { &self.edge } else { &self.inner };
            if let Some(d) = d {
                mul(buf, d);
            }
            forward.process_with_scratch(buf, &mut scratch);
            mul(buf, screen);
            inverse.process_with_scratch(buf, &mut scratch);
        }
        if let Some(d) = &self.edge {
            mul(buf, d);
        }
        buf.rotate_left(n / 2);
        if self.amplitude != 1.0 {
            for x in buf.iter_mut() {
                *x *= self.amplitude;
            }
        }
    }

    /// Applies the operator to a signal envelope in either domain; the result
    /// is in the same domain as the input.
    pub fn apply(&self, env: &ComplexEnvelope) -> Result<ComplexEnvelope> {
        match env.grid().domain() {
            Domain::Frequency => {
                if !env.grid().matches(&self.grid) {
                    return Err(Error::GridMismatch(
                        "envelope grid differs from the operator grid".into(),
                    ));
                }
                let mut out = env.clone();
                self.apply_spectrum_in_place(out.samples_mut());
                Ok(out)
            }
            Domain::Time => {
                let tgrid = self.grid.conjugate(self.grid.center());
                if !env.grid().matches(&tgrid) {
                    return Err(Error::GridMismatch(
                        "envelope time grid is not conjugate to the operator grid".into(),
                    ));
                }
                let spec = ComplexEnvelope::new(tgrid, self.grid.center(), env.samples().to_vec())?
                    .to_frequency()?;
                self.apply(&spec)?.to_time()
            }
        }
    }
}
