//! JSON scenario configuration. Units live in the key names.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::biphoton::{FilterShape, FilterSpec, SpdcSpec};
use crate::error::{Error, Result};
use crate::fiber::{fit_group_delay, read_group_delay_csv, FiberSpec, GroupDelayCurve};
use crate::gridkit::SampledGrid;
use crate::propagate::{PropagationConfig, PulseShape, PulseSpec, Scheme};
use crate::units::{angular_frequency, wavelength, NM, PS, THZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Fig2JsiSweep,
    Fig3HeraldedMap,
    Fig4Hom,
    Fig4Bump,
    Calibrate,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Fig2JsiSweep => "fig2_jsi_sweep",
            ScenarioKind::Fig3HeraldedMap => "fig3_heralded_map",
            ScenarioKind::Fig4Hom => "fig4_hom",
            ScenarioKind::Fig4Bump => "fig4_bump",
            ScenarioKind::Calibrate => "calibrate",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub fiber: FiberConfig,
    #[serde(default)]
    pub control: ControlConfig,
    #[serde(default)]
    pub spdc: SpdcConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub filters: FiltersConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    #[serde(default)]
    pub hom: HomConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "source", rename_all = "snake_case")]
pub enum GroupDelaySource {
    Bundled,
    Polynomial {
        reference_nm: f64,
        valid_range_nm: (f64, f64),
        coefficients_ps_per_m_per_nm_pow: Vec<f64>,
    },
    /// `wavelength_nm,delay_ps_per_m` samples, path relative to the config file.
    Csv { path: PathBuf, degree: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberConfig {
    pub length_m: f64,
    pub gamma_control_per_w_m: f64,
    pub gamma_signal_per_w_m: f64,
    pub xpm_factor: f64,
    pub transmission: f64,
    pub group_delay: GroupDelaySource,
}

impl Default for FiberConfig {
    fn default() -> Self {
        let f = FiberSpec::bundled();
        Self {
            length_m: f.length,
            gamma_control_per_w_m: f.gamma_control,
            gamma_signal_per_w_m: f.gamma_signal,
            xpm_factor: f.xpm_factor,
            transmission: f.transmission,
            group_delay: GroupDelaySource::Bundled,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlConfig {
    pub shape: PulseShape,
    pub fwhm_ps: f64,
    pub wavelength_nm: f64,
    /// Omitted: calibrated against `calibration.target_shift_thz`.
    pub peak_power_w: Option<f64>,
    /// `ΔT` for the interference scenarios. Omitted: the shift-maximizing delay.
    pub delta_t_ps: Option<f64>,
    pub grid_points: usize,
    pub window_ps: f64,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            shape: PulseShape::Gaussian,
            fwhm_ps: 0.78,
            wavelength_nm: 756.0,
            peak_power_w: None,
            delta_t_ps: None,
            grid_points: 4096,
            window_ps: 40.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpdcConfig {
    pub pump_wavelength_nm: f64,
    /// rms width of the pump amplitude spectrum.
    pub pump_sigma_rad_per_ps: f64,
    pub crystal_length_mm: f64,
    pub gvm_pump_signal_ps_per_mm: f64,
    pub gvm_pump_idler_ps_per_mm: f64,
    pub degenerate_wavelength_nm: f64,
    pub mismatch_offset_rad_per_m: f64,
    pub grid_points: usize,
    pub half_span_thz: f64,
    /// Band-pass applied to both photons after generation; center defaults
    /// to the degenerate wavelength.
    pub bandpass: Option<FilterConfig>,
}

impl Default for SpdcConfig {
    fn default() -> Self {
        let s = SpdcSpec::default();
        Self {
            pump_wavelength_nm: s.pump_center / NM,
            pump_sigma_rad_per_ps: s.pump_bandwidth * PS,
            crystal_length_mm: s.crystal_length * 1e3,
            gvm_pump_signal_ps_per_mm: s.gvm_ps / PS * 1e-3,
            gvm_pump_idler_ps_per_mm: s.gvm_pi / PS * 1e-3,
            degenerate_wavelength_nm: s.degenerate_wavelength / NM,
            mismatch_offset_rad_per_m: s.mismatch_offset,
            grid_points: 512,
            half_span_thz: 3.5,
            bandpass: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl RangeConfig {
    fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub delta_t_ps: Option<Vec<f64>>,
    pub delta_t_range_ps: Option<RangeConfig>,
    /// HOM delays `δτ`; must be symmetric about zero with an odd point count.
    pub hom_delay_range_ps: Option<RangeConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    /// Omitted for the herald: the degenerate wavelength.
    #[serde(default)]
    pub center_nm: Option<f64>,
    pub width_nm: f64,
    pub shape: FilterShape,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiltersConfig {
    pub herald: FilterConfig,
    pub scan: FilterConfig,
    /// Omitted: contiguous scan bins tiling the whole signal grid.
    pub scan_centers_nm: Option<RangeConfig>,
}

impl Default for FiltersConfig {
    fn default() -> Self {
        Self {
            herald: FilterConfig {
                center_nm: None,
                width_nm: 1.0,
                shape: FilterShape::Rectangular,
            },
            scan: FilterConfig {
                center_nm: None,
                width_nm: 0.5,
                shape: FilterShape::Rectangular,
            },
            scan_centers_nm: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub z_steps: usize,
    pub scheme: Scheme,
    pub include_control_dispersion: bool,
    pub include_spm: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = PropagationConfig::default();
        Self {
            z_steps: p.z_steps,
            scheme: p.scheme,
            include_control_dispersion: p.include_control_dispersion,
            include_spm: p.include_spm,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    pub target_shift_thz: f64,
    pub delay_window_ps: (f64, f64),
    pub coarse_points: usize,
    pub max_peak_power_w: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            target_shift_thz: 0.4,
            delay_window_ps: (-2.0, 2.0),
            coarse_points: 17,
            max_peak_power_w: 1000.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomConfig {
    /// Accidental background as a fraction of the plateau.
    pub background_fraction: f64,
    /// Re-center the fringe on `δτ = 0` by delaying the signal arm.
    pub compensate_delay: bool,
}

impl Default for HomConfig {
    fn default() -> Self {
        Self {
            background_fraction: 0.0,
            compensate_delay: true,
        }
    }
}

/// Calibration settings in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSettings {
    /// Hz
    pub target_hz: f64,
    pub delay_window: (f64, f64),
    pub coarse_points: usize,
    pub max_peak_power: f64,
}

/// A validated configuration in SI units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub fiber: FiberSpec,
    /// `peak_power` and `delay` are placeholders; see the fields below.
    pub pulse: PulseSpec,
    pub peak_power: Option<f64>,
    pub delta_t: Option<f64>,
    pub control_grid: SampledGrid,
    pub spdc: SpdcSpec,
    pub jsa_grid: SampledGrid,
    pub bandpass: Option<FilterSpec>,
    pub solver: PropagationConfig,
    pub delta_ts: Vec<f64>,
    pub hom_delays: Vec<f64>,
    pub herald: FilterSpec,
    pub scan: FilterSpec,
    pub scan_centers: Vec<f64>,
    pub calibration: CalibrationSettings,
    pub background_fraction: f64,
    pub compensate_delay: bool,
    /// Hex SHA-256 of the configuration text.
    pub config_sha256: String,
    pub config: ScenarioConfig,
}

/// Line (1-based) of the value at `path`, found by walking the keys in order.
fn locate(text: &str, path: &[&str]) -> Option<usize> {
    let mut pos = 0;
    let mut found = None;
    for key in path {
        let quoted = format!("\"{key}\"");
        let mut from = pos;
        loop {
            let at = from + text[from..].find(&quoted)?;
            let rest = text[at + quoted.len()..].trim_start();
            if rest.starts_with(':') {
                pos = at + quoted.len();
                found = Some(at);
                break;
            }
            from = at + quoted.len();
        }
    }
    found.map(|at| text[..at].matches('\n').count() + 1)
}

struct Checker<'a> {
    text: &'a str,
}

impl Checker<'_> {
    /// Config error at the deepest key of `path` present in the text.
    fn err(&self, path: &[&str], msg: impl Into<String>) -> Error {
        let line = (1..=path.len()).rev().find_map(|k| locate(self.text, &path[..k]));
        Error::config(line, format!("{}: {}", path.join("."), msg.into()))
    }

    fn positive(&self, path: &[&str], v: f64) -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.err(path, format!("must be a positive number, got {v}")))
        }
    }

    fn wrap<T>(&self, path: &[&str], r: Result<T>) -> Result<T> {
        r.map_err(|e| self.err(path, e.to_string()))
    }
}

impl Scenario {
    /// Parses and validates a configuration. `base` resolves relative data paths.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| {
            Error::config(Some(e.line()), format!("{e}"))
        })?;
        Self::resolve(config, text, base)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base)
    }

    fn resolve(config: ScenarioConfig, text: &str, base: &Path) -> Result<Self> {
        let ck = Checker { text };

        let f = &config.fiber;
        let delay_curve = match &f.group_delay {
            GroupDelaySource::Bundled => GroupDelayCurve::bundled(),
            GroupDelaySource::Polynomial {
                reference_nm,
                valid_range_nm,
                coefficients_ps_per_m_per_nm_pow,
            } => {
                let si: Vec<f64> = coefficients_ps_per_m_per_nm_pow
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * PS / NM.powi(k as i32))
                    .collect();
                ck.wrap(
                    &["fiber", "group_delay"],
                    GroupDelayCurve::new(
                        &si,
                        reference_nm * NM,
                        (valid_range_nm.0 * NM, valid_range_nm.1 * NM),
                    ),
                )?
            }
            GroupDelaySource::Csv { path, degree } => {
                let file = std::fs::File::open(base.join(path))
                    .map_err(|e| ck.err(&["fiber", "group_delay", "path"], e.to_string()))?;
                let samples = ck.wrap(&["fiber", "group_delay", "path"], read_group_delay_csv(file))?;
                ck.wrap(&["fiber", "group_delay"], fit_group_delay(&samples, *degree))?.curve
            }
        };
        let fiber = FiberSpec {
            length: ck.positive(&["fiber", "length_m"], f.length_m)?,
            gamma_control: f.gamma_control_per_w_m,
            gamma_signal: f.gamma_signal_per_w_m,
            xpm_factor: f.xpm_factor,
            delay_curve,
            transmission: f.transmission,
        };
        ck.wrap(&["fiber"], fiber.validate())?;

        let c = &config.control;
        let pulse = PulseSpec {
            shape: c.shape,
            fwhm: ck.positive(&["control", "fwhm_ps"], c.fwhm_ps)? * PS,
            peak_power: 0.0,
            wavelength: ck.positive(&["control", "wavelength_nm"], c.wavelength_nm)? * NM,
            delay: 0.0,
        };
        if let Some(p) = c.peak_power_w {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(ck.err(&["control", "peak_power_w"], "must be non-negative"));
            }
        }
        if let Some(d) = c.delta_t_ps {
            if !d.is_finite() {
                return Err(ck.err(&["control", "delta_t_ps"], "must be finite"));
            }
        }
        let window = ck.positive(&["control", "window_ps"], c.window_ps)? * PS;
        let control_grid = ck.wrap(
            &["control", "grid_points"],
            SampledGrid::time_window(c.grid_points, window),
        )?;
        ck.wrap(
            &["control"],
            crate::propagate::synthesize_pulse(&pulse, &control_grid).map(|_| ()),
        )?;
        ck.wrap(&["control", "wavelength_nm"], fiber.channel(pulse.wavelength).map(|_| ()))?;

        let s = &config.spdc;
        let spdc = SpdcSpec {
            pump_center: s.pump_wavelength_nm * NM,
            pump_bandwidth: s.pump_sigma_rad_per_ps / PS,
            crystal_length: s.crystal_length_mm * 1e-3,
            gvm_ps: s.gvm_pump_signal_ps_per_mm * PS * 1e3,
            gvm_pi: s.gvm_pump_idler_ps_per_mm * PS * 1e3,
            degenerate_wavelength: s.degenerate_wavelength_nm * NM,
            mismatch_offset: s.mismatch_offset_rad_per_m,
        };
        ck.wrap(&["spdc"], spdc.validate())?;
        let half_span = ck.positive(&["spdc", "half_span_thz"], s.half_span_thz)? * 2.0 * std::f64::consts::PI * THZ;
        let jsa_grid = ck.wrap(
            &["spdc", "grid_points"],
            SampledGrid::frequency_span(
                s.grid_points,
                half_span,
                angular_frequency(spdc.degenerate_wavelength),
            ),
        )?;
        ck.wrap(&["spdc", "degenerate_wavelength_nm"], fiber.channel(spdc.degenerate_wavelength).map(|_| ()))?;

        let bandpass = match &s.bandpass {
            Some(b) => {
                let f = FilterSpec {
                    center: b.center_nm.map(|c| c * NM).unwrap_or(spdc.degenerate_wavelength),
                    width: ck.positive(&["spdc", "bandpass", "width_nm"], b.width_nm)? * NM,
                    shape: b.shape,
                };
                ck.wrap(&["spdc", "bandpass"], f.validate())?;
                Some(f)
            }
            None => None,
        };

        let sv = &config.solver;
        let solver = PropagationConfig {
            z_steps: sv.z_steps,
            scheme: sv.scheme,
            include_control_dispersion: sv.include_control_dispersion,
            include_spm: sv.include_spm,
        };
        ck.wrap(&["solver"], solver.validate())?;

        let sw = &config.sweep;
        let delta_ts: Vec<f64> = match (&sw.delta_t_ps, &sw.delta_t_range_ps) {
            (Some(_), Some(_)) => {
                return Err(ck.err(&["sweep"], "give either delta_t_ps or delta_t_range_ps, not both"))
            }
            (Some(list), None) => list.iter().map(|d| d * PS).collect(),
            (None, Some(r)) => {
                if r.points == 0 {
                    return Err(ck.err(&["sweep", "delta_t_range_ps", "points"], "must be at least 1"));
                }
                r.values().into_iter().map(|d| d * PS).collect()
            }
            (None, None) => Vec::new(),
        };
        if delta_ts.iter().any(|d| !d.is_finite()) {
            return Err(ck.err(&["sweep"], "delays must be finite"));
        }
        let needs_dt = matches!(config.scenario, ScenarioKind::Fig2JsiSweep | ScenarioKind::Fig3HeraldedMap);
        if needs_dt && delta_ts.is_empty() {
            return Err(ck.err(&["sweep"], "this scenario needs a non-empty ΔT sweep"));
        }

        let hom_delays = match &sw.hom_delay_range_ps {
            Some(r) => {
                let path = ["sweep", "hom_delay_range_ps"];
                if r.points < 3 || r.points % 2 == 0 {
                    return Err(ck.err(&path, "needs an odd number of points, at least 3"));
                }
                if !(r.stop > 0.0) || (r.start + r.stop).abs() > 1e-9 * r.stop {
                    return Err(ck.err(&path, "must run symmetrically from -x to +x"));
                }
                let mut d: Vec<f64> = r.values().into_iter().map(|x| x * PS).collect();
                d[r.points / 2] = 0.0;
                d
            }
            None => Vec::new(),
        };
        let is_hom = matches!(config.scenario, ScenarioKind::Fig4Hom | ScenarioKind::Fig4Bump);
        if is_hom {
            if hom_delays.is_empty() {
                return Err(ck.err(&["sweep", "hom_delay_range_ps"], "interference scenarios need a delay range"));
            }
            // the fringe plateau needs a window several coherence times wide
            let tc = (spdc.gvm_ps - spdc.gvm_pi).abs() * spdc.crystal_length;
            let span = hom_delays[hom_delays.len() - 1] - hom_delays[0];
            if span < 5.0 * tc {
                return Err(ck.err(
                    &["sweep", "hom_delay_range_ps"],
                    format!(
                        "delay window {:.3} ps is shorter than 5 coherence times ({:.3} ps)",
                        span / PS,
                        5.0 * tc / PS
                    ),
                ));
            }
            let period = 2.0 * std::f64::consts::PI / jsa_grid.spacing();
            if span >= period {
                return Err(ck.err(
                    &["sweep", "hom_delay_range_ps"],
                    format!("delay window exceeds the {:.3} ps alias period of the grid", period / PS),
                ));
            }
        }

        let fl = &config.filters;
        let herald = FilterSpec {
            center: fl.herald.center_nm.map(|c| c * NM).unwrap_or(spdc.degenerate_wavelength),
            width: ck.positive(&["filters", "herald", "width_nm"], fl.herald.width_nm)? * NM,
            shape: fl.herald.shape,
        };
        ck.wrap(&["filters", "herald"], herald.validate())?;
        let scan_width = ck.positive(&["filters", "scan", "width_nm"], fl.scan.width_nm)? * NM;
        let scan = FilterSpec {
            center: spdc.degenerate_wavelength,
            width: scan_width,
            shape: fl.scan.shape,
        };
        let scan_centers: Vec<f64> = match &fl.scan_centers_nm {
            Some(r) => {
                if r.points == 0 {
                    return Err(ck.err(&["filters", "scan_centers_nm", "points"], "must be at least 1"));
                }
                r.values().into_iter().map(|c| c * NM).collect()
            }
            None => {
                // contiguous bins [lo + k·w, lo + (k+1)·w) covering every grid point
                let lo = wavelength(jsa_grid.coordinate(jsa_grid.n() - 1));
                let hi = wavelength(jsa_grid.coordinate(0));
                let bins = ((hi - lo) / scan_width).floor() as usize + 1;
                (0..bins).map(|k| lo + (k as f64 + 0.5) * scan_width).collect()
            }
        };
        if scan_centers.iter().any(|c| !(*c > 0.0)) {
            return Err(ck.err(&["filters", "scan_centers_nm"], "centers must be positive"));
        }

        let cal = &config.calibration;
        let calibration = CalibrationSettings {
            target_hz: cal.target_shift_thz * THZ,
            delay_window: (cal.delay_window_ps.0 * PS, cal.delay_window_ps.1 * PS),
            coarse_points: cal.coarse_points,
            max_peak_power: ck.positive(&["calibration", "max_peak_power_w"], cal.max_peak_power_w)?,
        };
        if !(cal.target_shift_thz >= 0.0 && cal.target_shift_thz.is_finite()) {
            return Err(ck.err(&["calibration", "target_shift_thz"], "must be non-negative"));
        }
        if !(calibration.delay_window.1 > calibration.delay_window.0) || cal.coarse_points < 3 {
            return Err(ck.err(&["calibration"], "needs an increasing delay window and at least 3 coarse points"));
        }
        if !(config.hom.background_fraction >= 0.0 && config.hom.background_fraction.is_finite()) {
            return Err(ck.err(&["hom", "background_fraction"], "must be non-negative"));
        }

        use sha2::Digest;
        let config_sha256 = hex::encode(sha2::Sha256::digest(text.as_bytes()));

        Ok(Self {
            kind: config.scenario,
            seed: config.seed,
            output_dir: config.output_dir.clone(),
            fiber,
            pulse,
            peak_power: c.peak_power_w,
            delta_t: c.delta_t_ps.map(|d| d * PS),
            control_grid,
            spdc,
            jsa_grid,
            bandpass,
            solver,
            delta_ts,
            hom_delays,
            herald,
            scan,
            scan_centers,
            calibration,
            background_fraction: config.hom.background_fraction,
            compensate_delay: config.hom.compensate_delay,
            config_sha256,
            config,
        })
    }
}
