//! Two-photon joint spectral amplitudes.
//!
//! The amplitude is stored idler-major: each idler frequency owns a contiguous
//! column of signal samples, so the single-photon operator applies to the
//! signal arm column by column without copying.

mod export;

pub use export::{write_jsa_csv, write_jsi_csv};

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridkit::{spectrum_to_time, Domain, RealSeries, SampledGrid};
use crate::propagate::{SignalOperator, SignalProbe};
use crate::units::{angular_frequency, wavelength_width_to_angular};

/// Phase-matching parameters of a type-II down-converter with a Gaussian pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcSpec {
    /// m
    pub pump_center: f64,
    /// rms width of the pump amplitude spectrum, rad/s.
    pub pump_bandwidth: f64,
    /// m
    pub crystal_length: f64,
    /// `k′_p − k′_s`, s/m.
    pub gvm_ps: f64,
    /// `k′_p − k′_i`, s/m.
    pub gvm_pi: f64,
    /// m
    pub degenerate_wavelength: f64,
    /// Constant phase-mismatch offset `Δk₀`, rad/m (a temperature-tuning knob).
    pub mismatch_offset: f64,
}

impl Default for SpdcSpec {
    fn default() -> Self {
        Self {
            pump_center: 756e-9,
            pump_bandwidth: 3e12,
            crystal_length: 5e-3,
            gvm_ps: 1.56e-10,
            gvm_pi: -1.56e-10,
            degenerate_wavelength: 1512e-9,
            mismatch_offset: 0.0,
        }
    }
}

impl SpdcSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.pump_center > 0.0 && self.degenerate_wavelength > 0.0 && self.crystal_length > 0.0) {
            return Err(Error::param("SPDC wavelengths and crystal length must be positive"));
        }
        if !(self.pump_bandwidth > 0.0 && self.pump_bandwidth.is_finite()) {
            return Err(Error::param("pump bandwidth must be positive"));
        }
        if !(self.gvm_ps.is_finite() && self.gvm_pi.is_finite() && self.mismatch_offset.is_finite()) {
            return Err(Error::param("group-velocity mismatches must be finite"));
        }
        Ok(())
    }

    /// Pump-center detuning from twice the degenerate frequency, rad/s.
    pub fn pump_detuning(&self) -> f64 {
        angular_frequency(self.pump_center) - 2.0 * angular_frequency(self.degenerate_wavelength)
    }

    /// Phase-matching FWHM along one arm, rad/s (`sinc²` half width 2.783).
    pub fn phase_matching_fwhm(&self, gvm: f64) -> f64 {
        5.566 / (gvm.abs() * self.crystal_length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Signal,
    Idler,
}

/// `S(ω_s, ω_i)` on two frequency grids, idler-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    grid_s: SampledGrid,
    grid_i: SampledGrid,
    data: Vec<Complex64>,
}

impl JointSpectralAmplitude {
    /// `data[i·n_s + s]` holds `S(ω_s, ω_i)`.
    pub fn new(grid_s: SampledGrid, grid_i: SampledGrid, data: Vec<Complex64>) -> Result<Self> {
        if grid_s.domain() != Domain::Frequency || grid_i.domain() != Domain::Frequency {
            return Err(Error::InvalidGrid("joint amplitudes live on frequency grids".into()));
        }
        if data.len() != grid_s.n() * grid_i.n() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}×{} grid",
                data.len(),
                grid_s.n(),
                grid_i.n()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("joint amplitude must be finite"));
        }
        Ok(Self { grid_s, grid_i, data })
    }

    /// Samples `f(ν_s, ν_i)` at every pair of grid offsets.
    pub fn from_fn(
        grid_s: SampledGrid,
        grid_i: SampledGrid,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(grid_s.n() * grid_i.n());
        for i in 0..grid_i.n() {
            let ni = grid_i.offset(i);
            for s in 0..grid_s.n() {
                data.push(f(grid_s.offset(s), ni));
            }
        }
        Self::new(grid_s, grid_i, data)
    }

    pub fn grid_s(&self) -> &SampledGrid {
        &self.grid_s
    }

    pub fn grid_i(&self) -> &SampledGrid {
        &self.grid_i
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, s: usize, i: usize) -> Complex64 {
        self.data[i * self.grid_s.n() + s]
    }

    /// Signal spectrum at idler sample `i`.
    pub fn column(&self, i: usize) -> &[Complex64] {
        let n = self.grid_s.n();
        &self.data[i * n..(i + 1) * n]
    }

    fn cell(&self) -> f64 {
        self.grid_s.spacing() * self.grid_i.spacing()
    }

    /// `N = ΣΣ|S|²·dω_s·dω_i`.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell()
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroEnergy);
        }
        let k = 1.0 / n.sqrt();
        for z in &mut self.data {
            *z *= k;
        }
        Ok(self)
    }

    /// Swaps the roles of the two arms.
    pub fn transposed(&self) -> Self {
        let (ns, ni) = (self.grid_s.n(), self.grid_i.n());
        let mut data = vec![Complex64::new(0.0, 0.0); ns * ni];
        for i in 0..ni {
            for s in 0..ns {
                data[s * ni + i] = self.data[i * ns + s];
            }
        }
        Self {
            grid_s: self.grid_i,
            grid_i: self.grid_s,
            data,
        }
    }

    /// Relative L2 distance `‖self − other‖/‖other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        let num: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.data.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }

    fn same_grids(&self) -> bool {
        self.grid_s.matches(&self.grid_i)
    }
}

/// Builds the normalized amplitude
/// `S = exp(−(ν_s+ν_i−ν_p)²/(4σ_p²))·sinc(ΔkL/2)·exp(iΔkL/2)` with
/// `Δk = Δk₀ + gvm_ps·ν_s + gvm_pi·ν_i`, detunings from the degenerate frequency.
pub fn build_jsa(
    spec: &SpdcSpec,
    grid_s: &SampledGrid,
    grid_i: &SampledGrid,
) -> Result<JointSpectralAmplitude> {
    spec.validate()?;
    let w_deg = angular_frequency(spec.degenerate_wavelength);
    for (g, gvm, name) in [(grid_s, spec.gvm_ps, "signal"), (grid_i, spec.gvm_pi, "idler")] {
        if g.domain() != Domain::Frequency {
            return Err(Error::InvalidGrid(format!("{name} grid must be a frequency grid")));
        }
        if (g.center() - w_deg).abs() > 0.25 * g.span() {
            return Err(Error::InvalidGrid(format!("{name} grid is not centered near degeneracy")));
        }
        if gvm != 0.0 && g.span() < 6.0 * spec.phase_matching_fwhm(gvm) {
            return Err(Error::InvalidGrid(format!(
                "{name} grid spans less than six phase-matching bandwidths"
            )));
        }
    }
    let off_s = grid_s.center() - w_deg;
    let off_i = grid_i.center() - w_deg;
    let nu_p = spec.pump_detuning();
    let l = spec.crystal_length;
    let jsa = JointSpectralAmplitude::from_fn(*grid_s, *grid_i, |a, b| {
        let (ns, ni) = (a + off_s, b + off_i);
        let pump = (-(ns + ni - nu_p).powi(2) / (4.0 * spec.pump_bandwidth.powi(2))).exp();
        let x = 0.5 * l * (spec.mismatch_offset + spec.gvm_ps * ns + spec.gvm_pi * ni);
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        Complex64::from_polar(pump * sinc, x)
    })?
    .normalized()?;

    let (ns, ni) = (grid_s.n(), grid_i.n());
    let edge: f64 = (0..ni)
        .flat_map(|i| (0..ns).map(move |s| (s, i)))
        .filter(|&(s, i)| s == 0 || i == 0 || s == ns - 1 || i == ni - 1)
        .map(|(s, i)| jsa.get(s, i).norm_sqr())
        .sum::<f64>()
        * jsa.cell();
    if edge > 0.01 {
        return Err(Error::InvalidGrid(format!(
            "{:.2}% of the joint amplitude sits on the grid boundary",
            100.0 * edge
        )));
    }
    Ok(jsa)
}

/// Applies `op` to every signal spectrum (or idler spectrum, with `Arm::Idler`).
pub fn apply_operator(
    jsa: &JointSpectralAmplitude,
    op: &SignalOperator,
    arm: Arm,
) -> Result<JointSpectralAmplitude> {
    match arm {
        Arm::Signal => {
            if !op.grid().matches(&jsa.grid_s) {
                return Err(Error::GridMismatch("operator grid differs from the signal grid".into()));
            }
            let mut out = jsa.clone();
            let n = jsa.grid_s.n();
            out.data
                .par_chunks_mut(n)
                .for_each(|col| op.apply_spectrum_in_place(col));
            Ok(out)
        }
        Arm::Idler => Ok(apply_operator(&jsa.transposed(), op, Arm::Signal)?.transposed()),
    }
}

/// `S′(·, ω_i) = U S(·, ω_i)` on the signal arm.
pub fn apply_signal_operator(
    jsa: &JointSpectralAmplitude,
    op: &SignalOperator,
) -> Result<JointSpectralAmplitude> {
    apply_operator(jsa, op, Arm::Signal)
}

/// Delays one arm by `delay` seconds: multiplies by `exp(iν·delay)`.
pub fn delay_arm(jsa: &JointSpectralAmplitude, arm: Arm, delay: f64) -> JointSpectralAmplitude {
    let mut out = jsa.clone();
    let ns = jsa.grid_s.n();
    for (k, z) in out.data.iter_mut().enumerate() {
        let nu = match arm {
            Arm::Signal => jsa.grid_s.offset(k % ns),
            Arm::Idler => jsa.grid_i.offset(k / ns),
        };
        *z *= Complex64::from_polar(1.0, nu * delay);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterShape {
    Rectangular,
    Gaussian,
    /// Eighth-order super-Gaussian: flat pass band, smooth edges.
    FlatTop,
}

/// Band-pass filter defined in wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// m
    pub center: f64,
    /// Intensity FWHM, m.
    pub width: f64,
    pub shape: FilterShape,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.center > 0.0 && self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::param("filter center and width must be positive"));
        }
        Ok(())
    }

    pub fn with_center(&self, center: f64) -> Self {
        Self { center, ..*self }
    }

    /// Amplitude transmission at absolute angular frequency `omega`.
    pub fn amplitude(&self, omega: f64) -> f64 {
        match self.shape {
            FilterShape::Rectangular => {
                let lam = 2.0 * PI * crate::units::SPEED_OF_LIGHT / omega;
                let lo = self.center - 0.5 * self.width;
                if lam >= lo && lam < lo + self.width {
                    1.0
                } else {
                    0.0
                }
            }
            FilterShape::Gaussian => {
                let fwhm = wavelength_width_to_angular(self.center, self.width);
                let sigma = fwhm / (2.0 * (2.0 * 2f64.ln()).sqrt());
                let nu = omega - angular_frequency(self.center);
                (-nu * nu / (4.0 * sigma * sigma)).exp()
            }
            FilterShape::FlatTop => {
                let fwhm = wavelength_width_to_angular(self.center, self.width);
                let x = 2.0 * (omega - angular_frequency(self.center)) / fwhm;
                (-0.5 * 2f64.ln() * x.powi(8)).exp()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Filtered {
    pub jsa: JointSpectralAmplitude,
    /// Set when nothing survives the filter.
    pub zero_state: bool,
}

pub fn apply_filter(jsa: &JointSpectralAmplitude, filter: &FilterSpec, arm: Arm) -> Result<Filtered> {
    filter.validate()?;
    let grid = match arm {
        Arm::Signal => jsa.grid_s,
        Arm::Idler => jsa.grid_i,
    };
    let t: Vec<f64> = (0..grid.n()).map(|k| filter.amplitude(grid.coordinate(k))).collect();
    let mut out = jsa.clone();
    let ns = jsa.grid_s.n();
    for (k, z) in out.data.iter_mut().enumerate() {
        *z *= match arm {
            Arm::Signal => t[k % ns],
            Arm::Idler => t[k / ns],
        };
    }
    let zero_state = out.data.iter().all(|z| z.norm_sqr() == 0.0);
    if zero_state {
        warn!(
            "filter at {:.3} nm removes the whole two-photon state",
            filter.center * 1e9
        );
    }
    Ok(Filtered { jsa: out, zero_state })
}

/// `|S|²` on the same grids and layout as the amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralIntensity {
    pub grid_s: SampledGrid,
    pub grid_i: SampledGrid,
    /// `values[i·n_s + s]`
    pub values: Vec<f64>,
}

impl JointSpectralIntensity {
    pub fn new(grid_s: SampledGrid, grid_i: SampledGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid_s.n() * grid_i.n() {
            return Err(Error::GridMismatch("intensity map size differs from its grids".into()));
        }
        Ok(Self { grid_s, grid_i, values })
    }

    pub fn get(&self, s: usize, i: usize) -> f64 {
        self.values[i * self.grid_s.n() + s]
    }

    /// Integrates over the other arm (weight `dω`).
    pub fn marginal(&self, arm: Arm) -> RealSeries {
        let (ns, ni) = (self.grid_s.n(), self.grid_i.n());
        match arm {
            Arm::Signal => {
                let mut v = vec![0.0; ns];
                for row in self.values.chunks(ns).take(ni) {
                    for (acc, x) in v.iter_mut().zip(row) {
                        *acc += x;
                    }
                }
                let dw = self.grid_i.spacing();
                RealSeries {
                    grid: self.grid_s,
                    values: v.into_iter().map(|x| x * dw).collect(),
                }
            }
            Arm::Idler => {
                let dw = self.grid_s.spacing();
                RealSeries {
                    grid: self.grid_i,
                    values: self
                        .values
                        .chunks(ns)
                        .map(|c| c.iter().sum::<f64>() * dw)
                        .collect(),
                }
            }
        }
    }
}

pub fn jsi(jsa: &JointSpectralAmplitude) -> JointSpectralIntensity {
    JointSpectralIntensity {
        grid_s: jsa.grid_s,
        grid_i: jsa.grid_i,
        values: jsa.data.iter().map(|z| z.norm_sqr()).collect(),
    }
}

pub fn marginal(jsa: &JointSpectralAmplitude, arm: Arm) -> RealSeries {
    jsi(jsa).marginal(arm)
}

/// Coincidences versus scan-filter center with the idler heralded.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedSpectrum {
    /// Scan centers, m.
    pub centers: Vec<f64>,
    pub counts: Vec<f64>,
    /// Sum of `counts`.
    pub total: f64,
    /// Coincidence mass through the herald alone.
    pub heralded: f64,
}

/// Coincidence mass `ΣΣ|S|²·|f_scan(ω_s)|²·|f_herald(ω_i)|²·dω²` for each scan center.
pub fn heralded_spectrum(
    jsa: &JointSpectralAmplitude,
    herald: &FilterSpec,
    scan: &FilterSpec,
    centers: &[f64],
) -> Result<HeraldedSpectrum> {
    herald.validate()?;
    scan.validate()?;
    let ns = jsa.grid_s.n();
    let weights: Vec<f64> = (0..jsa.grid_i.n())
        .map(|i| herald.amplitude(jsa.grid_i.coordinate(i)).powi(2))
        .collect();
    // heralded signal marginal
    let mut m = vec![0.0; ns];
    for (i, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        for (s, z) in jsa.column(i).iter().enumerate() {
            m[s] += w * z.norm_sqr();
        }
    }
    let cell = jsa.cell();
    let heralded = m.iter().sum::<f64>() * cell;
    let counts: Vec<f64> = centers
        .iter()
        .map(|&c| {
            let f = scan.with_center(c);
            (0..ns)
                .map(|s| m[s] * f.amplitude(jsa.grid_s.coordinate(s)).powi(2))
                .sum::<f64>()
                * cell
        })
        .collect();
    Ok(HeraldedSpectrum {
        centers: centers.to_vec(),
        total: counts.iter().sum(),
        counts,
        heralded,
    })
}

/// Squared Bhattacharyya coefficient `[Σ√(ab)]² / (Σa·Σb)`.
pub fn spectral_overlap(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch("spectra differ in length".into()));
    }
    if a.iter().chain(b).any(|v| !(*v >= 0.0)) {
        return Err(Error::param("spectra must be non-negative"));
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if !(sa > 0.0 && sb > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let bc: f64 = a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum();
    Ok((bc * bc / (sa * sb)).min(1.0))
}

#[derive(Debug, Clone)]
pub struct ExchangeParts {
    pub symmetric: JointSpectralAmplitude,
    pub antisymmetric: JointSpectralAmplitude,
    /// `norm(S_anti)/norm(S)`.
    pub antisymmetric_fraction: f64,
}

/// Splits `S` into parts even and odd under `ω_s ↔ ω_i`.
pub fn exchange_decompose(jsa: &JointSpectralAmplitude) -> Result<ExchangeParts> {
    if !jsa.same_grids() {
        return Err(Error::GridMismatch("exchange needs identical signal and idler grids".into()));
    }
    let t = jsa.transposed();
    let half = |sign: f64| JointSpectralAmplitude {
        grid_s: jsa.grid_s,
        grid_i: jsa.grid_i,
        data: jsa.data.iter().zip(&t.data).map(|(a, b)| 0.5 * (a + sign * b)).collect(),
    };
    let symmetric = half(1.0);
    let antisymmetric = half(-1.0);
    let total = jsa.norm();
    if !(total > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    Ok(ExchangeParts {
        antisymmetric_fraction: antisymmetric.norm() / total,
        symmetric,
        antisymmetric,
    })
}

impl SignalProbe for JointSpectralAmplitude {
    fn frequency_grid(&self) -> SampledGrid {
        self.grid_s
    }

    fn time_origin(&self) -> Result<f64> {
        let ns = self.grid_s.n();
        let dw = self.grid_s.spacing();
        let rows: Vec<Vec<f64>> = self
            .data
            .par_chunks(ns)
            .map(|col| {
                let mut buf = col.to_vec();
                spectrum_to_time(&mut buf, dw);
                buf.iter().map(|z| z.norm_sqr()).collect()
            })
            .collect();
        let mut w = vec![0.0; ns];
        for r in &rows {
            for (a, b) in w.iter_mut().zip(r) {
                *a += b;
            }
        }
        crate::gridkit::centroid(&self.grid_s.conjugate(self.grid_s.center()), &w)
    }

    fn spectral_centroid(&self, op: Option<&SignalOperator>) -> Result<f64> {
        match op {
            None => marginal(self, Arm::Signal).centroid(),
            Some(op) => {
                if !op.grid().matches(&self.grid_s) {
                    return Err(Error::GridMismatch(
                        "operator grid differs from the signal grid".into(),
                    ));
                }
                let ns = self.grid_s.n();
                let grid = self.grid_s;
                // per-column moments, summed in a fixed order for reproducibility
                let moments: Vec<(f64, f64)> = self
                    .data
                    .par_chunks(ns)
                    .map(|col| {
                        if col.iter().all(|z| z.norm_sqr() == 0.0) {
                            return (0.0, 0.0);
                        }
                        let mut buf = col.to_vec();
                        op.apply_spectrum_in_place(&mut buf);
                        buf.iter().enumerate().fold((0.0, 0.0), |(m0, m1), (k, z)| {
                            let p = z.norm_sqr();
                            (m0 + p, m1 + p * grid.offset(k))
                        })
                    })
                    .collect();
                let (m0, m1) = moments
                    .iter()
                    .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
                if !(m0 > 0.0) {
                    return Err(Error::ZeroEnergy);
                }
                Ok(m1 / m0)
            }
        }
    }
}
