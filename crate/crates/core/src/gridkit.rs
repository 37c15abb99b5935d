//! Uniform sampled grids and the time/frequency transform pair.
//!
//! Time grids are referenced to `t = 0` at index `n/2`. Frequency grids keep
//! the absolute carrier `ω₀` as their center and work in detunings
//! `ν = ω − ω₀`, so nothing is ever computed at optical magnitudes.
//!
//! Conventions: the optical field is `A(t)·exp(−iω₀t)`; the spectrum is
//! `Ã(ν) = ∫ A(t) exp(iνt) dt` and the inverse `A(t) = (1/2π) ∫ Ã(ν) exp(−iνt) dν`.
//! Energies are `Σ|A|²·dt` in time and `Σ|Ã|²·dν/2π` in frequency; the
//! discrete pair is the unitary DFT scaled by `√n·dt`, which makes those two
//! numbers equal.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Time,
    Frequency,
}

/// A uniform grid of `n` samples.
///
/// `spacing` is in seconds for time grids and rad/s for frequency grids.
/// `center` is the coordinate of sample `n/2`: zero for time grids, the
/// absolute carrier angular frequency for frequency grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledGrid {
    n: usize,
    spacing: f64,
    center: f64,
    domain: Domain,
}

impl SampledGrid {
    fn checked(n: usize, spacing: f64, center: f64, domain: Domain) -> Result<Self> {
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count {n} must be a power of two and at least {MIN_POINTS}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing {spacing} must be positive")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidGrid("center must be finite".into()));
        }
        Ok(Self {
            n,
            spacing,
            center,
            domain,
        })
    }

    pub fn time(n: usize, dt: f64) -> Result<Self> {
        Self::checked(n, dt, 0.0, Domain::Time)
    }

    /// Time grid of `n` points covering `window` seconds.
    pub fn time_window(n: usize, window: f64) -> Result<Self> {
        Self::time(n, window / n as f64)
    }

    pub fn frequency(n: usize, dw: f64, carrier: f64) -> Result<Self> {
        Self::checked(n, dw, carrier, Domain::Frequency)
    }

    /// Frequency grid of `n` points spanning `±half_span` rad/s about `carrier`.
    pub fn frequency_span(n: usize, half_span: f64, carrier: f64) -> Result<Self> {
        Self::frequency(n, 2.0 * half_span / n as f64, carrier)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Total extent `n·spacing`.
    pub fn span(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    /// Coordinate of sample `k` relative to the center.
    #[inline]
    pub fn offset(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.spacing
    }

    pub fn coordinate(&self, k: usize) -> f64 {
        self.center + self.offset(k)
    }

    pub fn offsets(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.offset(k)).collect()
    }

    /// Integration weight per sample: `dt` in time, `dν/2π` in frequency.
    pub fn measure(&self) -> f64 {
        match self.domain {
            Domain::Time => self.spacing,
            Domain::Frequency => self.spacing / (2.0 * PI),
        }
    }

    /// The grid paired with this one by the discrete Fourier transform.
    /// A time grid needs the carrier to place its frequency grid.
    pub fn conjugate(&self, carrier: f64) -> SampledGrid {
        let spacing = 2.0 * PI / (self.n as f64 * self.spacing);
        match self.domain {
            Domain::Time => SampledGrid {
                n: self.n,
                spacing,
                center: carrier,
                domain: Domain::Frequency,
            },
            Domain::Frequency => SampledGrid {
                n: self.n,
                spacing,
                center: 0.0,
                domain: Domain::Time,
            },
        }
    }

    /// True when both grids have the same size, domain and spacing (relative
    /// 1e−12) and centers within 1e−12 of the spacing.
    pub fn matches(&self, other: &SampledGrid) -> bool {
        self.n == other.n
            && self.domain == other.domain
            && (self.spacing - other.spacing).abs() <= 1e-12 * self.spacing
            && (self.center - other.center).abs() <= 1e-9 * self.spacing.max(f64::MIN_POSITIVE)
    }

    /// True when `other` is the transform partner of this grid (centers ignored).
    pub fn is_conjugate_of(&self, other: &SampledGrid) -> bool {
        self.n == other.n
            && self.domain != other.domain
            && (self.spacing * other.spacing * self.n as f64 - 2.0 * PI).abs() < 1e-10
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Cached FFT plans; `inverse` selects the `exp(+i…)` kernel.
pub(crate) fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Centered time samples to centered spectrum, in place, with physical scaling.
pub(crate) fn time_to_spectrum(buf: &mut [Complex64], dt: f64) {
    let n = buf.len();
    buf.rotate_left(n / 2);
    plan(n, true).process(buf);
    buf.rotate_left(n / 2);
    for x in buf.iter_mut() {
        *x *= dt;
    }
}

/// Centered spectrum to centered time samples, in place, with physical scaling.
pub(crate) fn spectrum_to_time(buf: &mut [Complex64], dw: f64) {
    let n = buf.len();
    buf.rotate_left(n / 2);
    plan(n, false).process(buf);
    buf.rotate_left(n / 2);
    let s = dw / (2.0 * PI);
    for x in buf.iter_mut() {
        *x *= s;
    }
}

/// Complex field envelope sampled on a grid.
///
/// `carrier` is the absolute angular frequency `ω₀` of the envelope
/// convention; on frequency grids it equals the grid center.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    grid: SampledGrid,
    carrier: f64,
    samples: Vec<Complex64>,
}

impl ComplexEnvelope {
    pub fn new(grid: SampledGrid, carrier: f64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a {}-point grid",
                samples.len(),
                grid.n()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("envelope samples must be finite"));
        }
        let carrier = match grid.domain() {
            Domain::Frequency => grid.center(),
            Domain::Time => carrier,
        };
        Ok(Self {
            grid,
            carrier,
            samples,
        })
    }

    pub fn zeros(grid: SampledGrid, carrier: f64) -> Self {
        Self::new(grid, carrier, vec![Complex64::new(0.0, 0.0); grid.n()])
            .expect("zero envelope is always valid")
    }

    /// Samples `f(offset)` at every grid offset.
    pub fn from_fn(
        grid: SampledGrid,
        carrier: f64,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let samples = (0..grid.n()).map(|k| f(grid.offset(k))).collect();
        Self::new(grid, carrier, samples)
    }

    pub fn grid(&self) -> &SampledGrid {
        &self.grid
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Rectangle-rule energy on the grid's natural measure.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.measure()
    }

    pub fn to_frequency(&self) -> Result<ComplexEnvelope> {
        if self.grid.domain() != Domain::Time {
            return Err(Error::InvalidGrid("to_frequency needs a time-domain envelope".into()));
        }
        let mut buf = self.samples.clone();
        time_to_spectrum(&mut buf, self.grid.spacing());
        Ok(ComplexEnvelope {
            grid: self.grid.conjugate(self.carrier),
            carrier: self.carrier,
            samples: buf,
        })
    }

    pub fn to_time(&self) -> Result<ComplexEnvelope> {
        if self.grid.domain() != Domain::Frequency {
            return Err(Error::InvalidGrid("to_time needs a frequency-domain envelope".into()));
        }
        let mut buf = self.samples.clone();
        spectrum_to_time(&mut buf, self.grid.spacing());
        Ok(ComplexEnvelope {
            grid: self.grid.conjugate(self.carrier),
            carrier: self.carrier,
            samples: buf,
        })
    }

    /// Intensity-weighted mean offset (seconds, or rad/s detuning).
    pub fn centroid(&self) -> Result<f64> {
        centroid(&self.grid, &self.intensity())
    }

    /// Full width at half maximum of `|A|²`.
    pub fn fwhm(&self) -> Result<f64> {
        fwhm(&self.grid, &self.intensity())
    }
}

/// A real-valued series on a grid: intensities, marginals, phase derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSeries {
    pub grid: SampledGrid,
    pub values: Vec<f64>,
}

impl RealSeries {
    pub fn new(grid: SampledGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}-point grid",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    /// `Σ v·spacing`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn centroid(&self) -> Result<f64> {
        centroid(&self.grid, &self.values)
    }

    pub fn fwhm(&self) -> Result<f64> {
        fwhm(&self.grid, &self.values)
    }
}

/// `Σ x·w / Σ w` over grid offsets.
pub fn centroid(grid: &SampledGrid, weights: &[f64]) -> Result<f64> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let moment: f64 = weights
        .iter()
        .enumerate()
        .map(|(k, w)| grid.offset(k) * w)
        .sum();
    Ok(moment / total)
}

/// Width between the outermost half-maximum crossings, linearly interpolated.
pub fn fwhm(grid: &SampledGrid, profile: &[f64]) -> Result<f64> {
    let peak = profile.iter().cloned().fold(0.0_f64, f64::max);
    if !(peak > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let half = 0.5 * peak;
    let first = profile.iter().position(|&v| v >= half).unwrap();
    let last = profile.iter().rposition(|&v| v >= half).unwrap();
    if first == 0 || last + 1 == profile.len() {
        return Err(Error::FlatProfile);
    }
    let cross = |lo: usize, hi: usize| {
        let (a, b) = (profile[lo], profile[hi]);
        grid.offset(lo) + (half - a) / (b - a) * (grid.offset(hi) - grid.offset(lo))
    };
    Ok(cross(last, last + 1) - cross(first - 1, first))
}
