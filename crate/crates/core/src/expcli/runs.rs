use std::f64::consts::PI;

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Scenario, ScenarioKind};
use super::svg;
use crate::biphoton::{
    apply_filter, apply_operator, build_jsa, delay_arm, exchange_decompose, heralded_spectrum, jsi, marginal,
    spectral_overlap, write_jsi_csv, Arm, JointSpectralAmplitude, JointSpectralIntensity,
};
use crate::error::{Error, Result};
use crate::fiber::{gvd_bandwidth_limit, Channel};
use crate::interference::{
    add_accidentals, hom_fringe, jsi_visibility_bound, two_photon_overlap, visibility, write_fringe_csv,
    FringeKind, HomFringe,
};
use crate::propagate::{
    calibrate_peak_power, evolve_control, max_shift_delay, signal_operator, synthesize_pulse,
    Calibration, CalibrationTemplate, ControlHistory, PulseSpec, SignalOperator, SignalProbe,
};
use crate::units::{wavelength, NM, PS, THZ};

/// One output file, held in memory until the run is written out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self { name: name.into(), bytes }
    }

    fn json<T: Serialize>(name: &str, value: &T) -> Result<Self> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        Ok(Self::new(name, bytes))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChannelReport {
    pub wavelength_nm: f64,
    pub beta2_ps2_per_m: f64,
    pub group_delay_ps_per_m: f64,
}

impl From<Channel> for ChannelReport {
    fn from(c: Channel) -> Self {
        Self {
            wavelength_nm: c.wavelength / NM,
            beta2_ps2_per_m: c.beta2 / (PS * PS),
            group_delay_ps_per_m: c.group_delay / PS,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CalibrationReport {
    pub target_thz: f64,
    pub peak_power_w: f64,
    pub delta_t_ps: f64,
    pub shift_thz: f64,
    pub evaluations: usize,
}

impl CalibrationReport {
    fn new(target_hz: f64, c: &Calibration) -> Self {
        Self {
            target_thz: target_hz / THZ,
            peak_power_w: c.peak_power,
            delta_t_ps: c.delay / PS,
            shift_thz: c.shift_hz / THZ,
            evaluations: c.evaluations,
        }
    }
}

/// Parameters derived while running, recorded in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub control_channel: ChannelReport,
    pub signal_channel: ChannelReport,
    pub walkoff_ps_per_m: f64,
    pub power_ceiling_w: f64,
    pub peak_power_w: f64,
    pub peak_power_source: &'static str,
    pub calibration: Option<CalibrationReport>,
    /// `ΔT` is measured from this temporal centroid of the reshaped arm.
    pub time_origin_ps: f64,
    pub control_dt_fs: f64,
    pub jsa_spacing_thz: f64,
    pub phase_matching_fwhm_thz: (f64, f64),
    /// `None` when the signal channel is dispersion free.
    pub gvd_bandwidth_limit_thz: Option<f64>,
}

/// A scenario result: a typed report plus the files it produces.
#[derive(Debug, Clone)]
pub struct Outcome<R> {
    pub report: R,
    pub derived: Derived,
    pub artifacts: Vec<Artifact>,
}

/// Shared state of a run: the two-photon state, the control history at the
/// working power, and the frame the operator is built in.
pub struct Prepared {
    pub jsa: JointSpectralAmplitude,
    pub arm: Arm,
    pub signal: Channel,
    pub history: ControlHistory,
    pub time_origin: f64,
    pub template: CalibrationTemplate,
    pub derived: Derived,
}

impl Prepared {
    pub fn new(sc: &Scenario, arm: Arm) -> Result<Self> {
        let mut jsa = build_jsa(&sc.spdc, &sc.jsa_grid, &sc.jsa_grid)?;
        if let Some(bp) = &sc.bandpass {
            let s = apply_filter(&jsa, bp, Arm::Signal)?;
            let both = apply_filter(&s.jsa, bp, Arm::Idler)?;
            if both.zero_state {
                return Err(Error::Numerical("the band-pass removes the whole two-photon state".into()));
            }
            jsa = both.jsa.normalized()?;
        }
        let signal = sc.fiber.channel(sc.spdc.degenerate_wavelength)?;
        let template = CalibrationTemplate {
            fiber: sc.fiber.clone(),
            pulse: sc.pulse,
            control_grid: sc.control_grid,
            config: sc.solver,
            signal,
            delay_window: sc.calibration.delay_window,
            coarse_points: sc.calibration.coarse_points,
            max_peak_power: sc.calibration.max_peak_power,
        };
        let probe = match arm {
            Arm::Signal => jsa.clone(),
            Arm::Idler => jsa.transposed(),
        };
        let time_origin = probe.time_origin()?;
        let (peak_power, source, calibration) = match sc.peak_power {
            Some(p) => (p, "config", None),
            None => {
                info!("calibrating peak power for {:.4} THz", sc.calibration.target_hz / THZ);
                let c = calibrate_peak_power(sc.calibration.target_hz, &template, &probe)?;
                info!("calibrated {:.4} W at ΔT = {:.4} ps", c.peak_power, c.delay / PS);
                (c.peak_power, "calibrated", Some(CalibrationReport::new(sc.calibration.target_hz, &c)))
            }
        };
        let pulse = PulseSpec { peak_power, ..sc.pulse };
        let control = synthesize_pulse(&pulse, &sc.control_grid)?;
        let history = evolve_control(&control, &sc.fiber, &sc.solver)?;
        let limit = gvd_bandwidth_limit(&sc.fiber, sc.pulse.fwhm, signal.wavelength)?;
        let derived = Derived {
            control_channel: history.channel.into(),
            signal_channel: signal.into(),
            walkoff_ps_per_m: (signal.group_delay - history.channel.group_delay) / PS,
            power_ceiling_w: template.power_ceiling(),
            peak_power_w: peak_power,
            peak_power_source: source,
            calibration,
            time_origin_ps: time_origin / PS,
            control_dt_fs: sc.control_grid.spacing() * 1e15,
            jsa_spacing_thz: sc.jsa_grid.spacing() / (2.0 * PI * THZ),
            phase_matching_fwhm_thz: (
                sc.spdc.phase_matching_fwhm(sc.spdc.gvm_ps) / (2.0 * PI * THZ),
                sc.spdc.phase_matching_fwhm(sc.spdc.gvm_pi) / (2.0 * PI * THZ),
            ),
            gvd_bandwidth_limit_thz: (!limit.dispersion_free).then(|| limit.hz / THZ),
        };
        Ok(Self {
            jsa,
            arm,
            signal,
            history,
            time_origin,
            template,
            derived,
        })
    }

    pub fn peak_power(&self) -> f64 {
        self.derived.peak_power_w
    }

    /// Operator on the reshaped arm for a delay `ΔT` from its temporal centroid.
    pub fn operator(&self, sc: &Scenario, delta_t: f64) -> Result<SignalOperator> {
        signal_operator(
            &self.history,
            &sc.fiber,
            &self.signal,
            &sc.jsa_grid,
            delta_t - self.time_origin,
        )
    }

    pub fn reshape(&self, sc: &Scenario, delta_t: f64) -> Result<JointSpectralAmplitude> {
        apply_operator(&self.jsa, &self.operator(sc, delta_t)?, self.arm)
    }
}

fn jsi_csv(map: &JointSpectralIntensity) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_jsi_csv(&mut out, map)?;
    Ok(out)
}

fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn wavelength_axis_nm(sc: &Scenario) -> (f64, f64) {
    let g = &sc.jsa_grid;
    (wavelength(g.coordinate(g.n() - 1)) / NM, wavelength(g.coordinate(0)) / NM)
}

fn jsi_svg(sc: &Scenario, map: &JointSpectralIntensity, title: &str) -> Vec<u8> {
    // rows of the map run over idler frequency; flip both axes so wavelength increases
    let n = sc.jsa_grid.n();
    let mut flipped = vec![0.0; n * n];
    for i in 0..n {
        for s in 0..n {
            flipped[i * n + s] = map.get(n - 1 - s, n - 1 - i);
        }
    }
    let axis = wavelength_axis_nm(sc);
    svg::heatmap(title, "signal wavelength (nm)", "idler wavelength (nm)", axis, axis, n, n, &flipped).into_bytes()
}

// ---------------------------------------------------------------- fig2

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Row {
    pub delta_t_ps: f64,
    pub centroid_shift_thz: f64,
    pub fwhm_thz: Option<f64>,
    /// Relative change of the signal-marginal FWHM.
    pub fwhm_change: Option<f64>,
    pub norm: f64,
    pub norm_change: f64,
    /// Relative L2 distance of the JSI from the input JSI.
    pub jsi_change: f64,
    pub jsi_file: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Canonical {
    pub no_overlap_delta_t_ps: f64,
    pub max_shift_delta_t_ps: f64,
    pub max_broadening_delta_t_ps: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Report {
    pub scenario: &'static str,
    pub peak_power_w: f64,
    pub input_fwhm_thz: Option<f64>,
    pub rows: Vec<Fig2Row>,
    pub canonical: Canonical,
    pub max_norm_change: f64,
}

pub fn run_fig2(sc: &Scenario, svg_out: bool) -> Result<Outcome<Fig2Report>> {
    let prep = Prepared::new(sc, Arm::Signal)?;
    let input = jsi(&prep.jsa);
    let m0 = marginal(&prep.jsa, Arm::Signal);
    let c0 = m0.centroid()?;
    let fwhm0 = m0.fwhm().ok();
    let norm0 = prep.jsa.norm();

    let results: Vec<(Fig2Row, Vec<u8>, Option<Vec<u8>>)> = sc
        .delta_ts
        .par_iter()
        .enumerate()
        .map(|(k, &dt)| {
            let out = prep.reshape(sc, dt)?;
            let m = marginal(&out, Arm::Signal);
            let map = jsi(&out);
            let norm = out.norm();
            let fwhm = m.fwhm().ok();
            let name = format!("jsi_dt{k:03}.csv");
            let row = Fig2Row {
                delta_t_ps: dt / PS,
                centroid_shift_thz: (m.centroid()? - c0) / (2.0 * PI * THZ),
                fwhm_thz: fwhm.map(|w| w / (2.0 * PI * THZ)),
                fwhm_change: fwhm.zip(fwhm0).map(|(w, w0)| w / w0 - 1.0),
                norm,
                norm_change: (norm - norm0).abs() / norm0,
                jsi_change: relative_l2(&map.values, &input.values),
                jsi_file: name,
            };
            info!("fig2 ΔT = {:.3} ps: shift {:.4} THz", row.delta_t_ps, row.centroid_shift_thz);
            let picture = svg_out.then(|| jsi_svg(sc, &map, &format!("JSI at ΔT = {:.3} ps", dt / PS)));
            Ok((row, jsi_csv(&map)?, picture))
        })
        .collect::<Result<_>>()?;

    let mut artifacts = vec![Artifact::new("jsi_input.csv", jsi_csv(&input)?)];
    if svg_out {
        artifacts.push(Artifact::new("jsi_input.svg", jsi_svg(sc, &input, "input JSI")));
    }
    let mut rows = Vec::with_capacity(results.len());
    for (row, csv, picture) in results {
        if let Some(p) = picture {
            artifacts.push(Artifact::new(row.jsi_file.replace(".csv", ".svg"), p));
        }
        artifacts.push(Artifact::new(row.jsi_file.clone(), csv));
        rows.push(row);
    }

    let pick = |key: &dyn Fn(&Fig2Row) -> Option<f64>| {
        rows.iter()
            .filter_map(|r| key(r).map(|v| (r.delta_t_ps, v)))
            .fold(None, |best: Option<(f64, f64)>, (d, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((d, v)),
            })
            .map(|(d, _)| d)
    };
    let canonical = Canonical {
        no_overlap_delta_t_ps: pick(&|r| Some(r.delta_t_ps.abs())).unwrap_or(f64::NAN),
        max_shift_delta_t_ps: pick(&|r| Some(r.centroid_shift_thz)).unwrap_or(f64::NAN),
        max_broadening_delta_t_ps: pick(&|r| r.fwhm_change),
    };

    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record([
        "delta_t_ps",
        "centroid_shift_thz",
        "fwhm_thz",
        "norm",
        "norm_change",
        "jsi_change",
    ])?;
    for r in &rows {
        summary.write_record([
            format!("{:.6}", r.delta_t_ps),
            format!("{:.9e}", r.centroid_shift_thz),
            r.fwhm_thz.map(|w| format!("{w:.9e}")).unwrap_or_default(),
            format!("{:.12e}", r.norm),
            format!("{:.3e}", r.norm_change),
            format!("{:.3e}", r.jsi_change),
        ])?;
    }
    artifacts.push(Artifact::new(
        "summary.csv",
        summary.into_inner().map_err(|e| Error::Csv(e.to_string()))?,
    ));

    let report = Fig2Report {
        scenario: ScenarioKind::Fig2JsiSweep.name(),
        peak_power_w: prep.peak_power(),
        input_fwhm_thz: fwhm0.map(|w| w / (2.0 * PI * THZ)),
        max_norm_change: rows.iter().map(|r| r.norm_change).fold(0.0, f64::max),
        rows,
        canonical,
    };
    artifacts.push(Artifact::json("summary.json", &report)?);
    Ok(Outcome {
        report,
        derived: prep.derived,
        artifacts,
    })
}

// ---------------------------------------------------------------- fig3

#[derive(Debug, Clone, Serialize)]
pub struct Fig3Row {
    pub delta_t_ps: f64,
    pub total: f64,
    pub heralded: f64,
    pub centroid_shift_thz: f64,
    /// Relative L2 distance of the heralded spectrum from the no-XPM spectrum.
    pub spectrum_change: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig3Report {
    pub scenario: &'static str,
    pub peak_power_w: f64,
    pub herald_center_nm: f64,
    pub reference_total: f64,
    pub rows: Vec<Fig3Row>,
    /// Population SD of the totals over their mean.
    pub total_relative_sd: f64,
    pub total_max_relative_deviation: f64,
}

fn scan_centroid(centers: &[f64], counts: &[f64]) -> f64 {
    let w: f64 = counts.iter().sum();
    centers
        .iter()
        .zip(counts)
        .map(|(c, n)| crate::units::angular_frequency(*c) * n)
        .sum::<f64>()
        / w
}

pub fn run_fig3(sc: &Scenario, svg_out: bool) -> Result<Outcome<Fig3Report>> {
    let prep = Prepared::new(sc, Arm::Signal)?;
    let reference = heralded_spectrum(&prep.jsa, &sc.herald, &sc.scan, &sc.scan_centers)?;
    if !(reference.total > 0.0) {
        return Err(Error::Numerical("no coincidences through the herald and scan filters".into()));
    }
    let c_ref = scan_centroid(&sc.scan_centers, &reference.counts);

    let spectra: Vec<_> = sc
        .delta_ts
        .par_iter()
        .map(|&dt| {
            let out = prep.reshape(sc, dt)?;
            heralded_spectrum(&out, &sc.herald, &sc.scan, &sc.scan_centers)
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Fig3Row> = sc
        .delta_ts
        .iter()
        .zip(&spectra)
        .map(|(dt, h)| Fig3Row {
            delta_t_ps: dt / PS,
            total: h.total,
            heralded: h.heralded,
            centroid_shift_thz: (scan_centroid(&sc.scan_centers, &h.counts) - c_ref) / (2.0 * PI * THZ),
            spectrum_change: relative_l2(&h.counts, &reference.counts),
        })
        .collect();
    let n = rows.len() as f64;
    let mean = rows.iter().map(|r| r.total).sum::<f64>() / n;
    let sd = (rows.iter().map(|r| (r.total - mean).powi(2)).sum::<f64>() / n).sqrt();
    let max_dev = rows.iter().map(|r| (r.total - mean).abs() / mean).fold(0.0, f64::max);

    let mut map = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["delta_t_ps".to_string()];
    header.extend(sc.scan_centers.iter().map(|c| format!("{:.4}", c / NM)));
    map.write_record(&header)?;
    let mut write_row = |label: String, counts: &[f64]| -> Result<()> {
        let mut rec = vec![label];
        rec.extend(counts.iter().map(|v| format!("{v:.9e}")));
        map.write_record(&rec)?;
        Ok(())
    };
    for (dt, h) in sc.delta_ts.iter().zip(&spectra) {
        write_row(format!("{:.6}", dt / PS), &h.counts)?;
    }
    let mut artifacts = vec![Artifact::new(
        "heralded_map.csv",
        map.into_inner().map_err(|e| Error::Csv(e.to_string()))?,
    )];

    let mut totals = csv::Writer::from_writer(Vec::new());
    totals.write_record(["delta_t_ps", "total", "heralded", "centroid_shift_thz"])?;
    for r in &rows {
        totals.write_record([
            format!("{:.6}", r.delta_t_ps),
            format!("{:.12e}", r.total),
            format!("{:.12e}", r.heralded),
            format!("{:.9e}", r.centroid_shift_thz),
        ])?;
    }
    artifacts.push(Artifact::new(
        "totals.csv",
        totals.into_inner().map_err(|e| Error::Csv(e.to_string()))?,
    ));

    if svg_out {
        let nx = sc.scan_centers.len();
        let values: Vec<f64> = spectra.iter().flat_map(|h| h.counts.iter().cloned()).collect();
        let x = (sc.scan_centers[0] / NM, sc.scan_centers[nx - 1] / NM);
        let y = (sc.delta_ts[0] / PS, sc.delta_ts[sc.delta_ts.len() - 1] / PS);
        artifacts.push(Artifact::new(
            "heralded_map.svg",
            svg::heatmap("heralded signal spectra", "scan wavelength (nm)", "ΔT (ps)", x, y, nx, spectra.len(), &values)
                .into_bytes(),
        ));
    }

    let report = Fig3Report {
        scenario: ScenarioKind::Fig3HeraldedMap.name(),
        peak_power_w: prep.peak_power(),
        herald_center_nm: sc.herald.center / NM,
        reference_total: reference.total,
        rows,
        total_relative_sd: sd / mean,
        total_max_relative_deviation: max_dev,
    };
    artifacts.push(Artifact::json("summary.json", &report)?);
    Ok(Outcome {
        report,
        derived: prep.derived,
        artifacts,
    })
}

// ---------------------------------------------------------------- fig4

#[derive(Debug, Clone, Serialize)]
pub struct StateSummary {
    pub visibility: f64,
    pub kind: FringeKind,
    pub r_classical: f64,
    pub r_extremum: f64,
    /// Rate at `δτ = 0`.
    pub r_zero: f64,
    /// `Re W(0)` of the interfered state.
    pub w_zero: f64,
    pub marginal_overlap: f64,
    pub jsi_bound: f64,
    pub antisymmetric_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Report {
    pub scenario: &'static str,
    pub xpm_arm: Arm,
    pub peak_power_w: f64,
    pub delta_t_ps: f64,
    /// Signal-arm delay that re-centers the fringe, ps.
    pub compensation_ps: f64,
    pub background_fraction: f64,
    pub before: StateSummary,
    pub after: StateSummary,
}

fn summarize_state(jsa: &JointSpectralAmplitude, fringe: &HomFringe) -> Result<StateSummary> {
    let v = visibility(fringe)?;
    let map = jsi(jsa);
    let ms = map.marginal(Arm::Signal);
    let mi = map.marginal(Arm::Idler);
    Ok(StateSummary {
        visibility: v.value,
        kind: v.kind,
        r_classical: fringe.r_classical,
        r_extremum: fringe.r_extremum,
        r_zero: fringe.rates[fringe.rates.len() / 2],
        w_zero: two_photon_overlap(jsa, &[0.0])?[0].re,
        marginal_overlap: spectral_overlap(&ms.values, &mi.values)?,
        jsi_bound: jsi_visibility_bound(&map)?,
        antisymmetric_fraction: exchange_decompose(jsa)?.antisymmetric_fraction,
    })
}

fn fringe_csv(f: &HomFringe) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_fringe_csv(&mut out, f)?;
    Ok(out)
}

fn run_fig4(sc: &Scenario, arm: Arm, svg_out: bool) -> Result<Outcome<Fig4Report>> {
    let prep = Prepared::new(sc, arm)?;
    let delta_t = match sc.delta_t {
        Some(d) => d,
        None => {
            let probe = match arm {
                Arm::Signal => prep.jsa.clone(),
                Arm::Idler => prep.jsa.transposed(),
            };
            let (d, s) = max_shift_delay(&prep.template, &probe, prep.peak_power())?;
            info!("shift-maximizing ΔT = {:.4} ps ({:.4} THz)", d / PS, s / THZ);
            d
        }
    };
    let after = prep.reshape(sc, delta_t)?;
    let comp = if sc.compensate_delay {
        -0.5 * (sc.spdc.gvm_ps - sc.spdc.gvm_pi) * sc.spdc.crystal_length
    } else {
        0.0
    };
    let before = delay_arm(&prep.jsa, Arm::Signal, comp);
    let after = delay_arm(&after, Arm::Signal, comp);

    let fringes: Vec<HomFringe> = [&before, &after]
        .par_iter()
        .map(|j| {
            let f = hom_fringe(j, &sc.hom_delays)?;
            if sc.background_fraction > 0.0 {
                add_accidentals(&f, sc.background_fraction)
            } else {
                Ok(f)
            }
        })
        .collect::<Result<_>>()?;
    let s_before = summarize_state(&before, &fringes[0])?;
    let s_after = summarize_state(&after, &fringes[1])?;
    info!(
        "V {:.4} ({:?}) -> {:.4} ({:?})",
        s_before.visibility, s_before.kind, s_after.visibility, s_after.kind
    );

    let mut artifacts = vec![
        Artifact::new("fringe_before.csv", fringe_csv(&fringes[0])?),
        Artifact::new("fringe_after.csv", fringe_csv(&fringes[1])?),
        Artifact::new("jsi_before.csv", jsi_csv(&jsi(&before))?),
        Artifact::new("jsi_after.csv", jsi_csv(&jsi(&after))?),
    ];

    let mut marg = csv::Writer::from_writer(Vec::new());
    marg.write_record(["wavelength_nm", "signal_before", "idler_before", "signal_after", "idler_after"])?;
    let cols = [
        marginal(&before, Arm::Signal),
        marginal(&before, Arm::Idler),
        marginal(&after, Arm::Signal),
        marginal(&after, Arm::Idler),
    ];
    for k in 0..sc.jsa_grid.n() {
        let mut rec = vec![format!("{:.6}", wavelength(sc.jsa_grid.coordinate(k)) / NM)];
        rec.extend(cols.iter().map(|c| format!("{:.9e}", c.values[k])));
        marg.write_record(&rec)?;
    }
    artifacts.push(Artifact::new(
        "marginals.csv",
        marg.into_inner().map_err(|e| Error::Csv(e.to_string()))?,
    ));

    if svg_out {
        let d: Vec<f64> = sc.hom_delays.iter().map(|t| t / PS).collect();
        artifacts.push(Artifact::new(
            "fringes.svg",
            svg::line_plot(
                "two-photon interference",
                "delay (ps)",
                "normalized coincidences",
                &[("before", &d, &fringes[0].rates), ("after", &d, &fringes[1].rates)],
            )
            .into_bytes(),
        ));
        artifacts.push(Artifact::new("jsi_before.svg", jsi_svg(sc, &jsi(&before), "JSI before")));
        artifacts.push(Artifact::new("jsi_after.svg", jsi_svg(sc, &jsi(&after), "JSI after")));
    }

    let report = Fig4Report {
        scenario: sc.kind.name(),
        xpm_arm: arm,
        peak_power_w: prep.peak_power(),
        delta_t_ps: delta_t / PS,
        compensation_ps: comp / PS,
        background_fraction: sc.background_fraction,
        before: s_before,
        after: s_after,
    };
    artifacts.push(Artifact::json("summary.json", &report)?);
    Ok(Outcome {
        report,
        derived: prep.derived,
        artifacts,
    })
}

pub fn run_fig4_hom(sc: &Scenario, svg_out: bool) -> Result<Outcome<Fig4Report>> {
    run_fig4(sc, Arm::Signal, svg_out)
}

/// The reshaping acts on the idler arm.
pub fn run_fig4_bump(sc: &Scenario, svg_out: bool) -> Result<Outcome<Fig4Report>> {
    run_fig4(sc, Arm::Idler, svg_out)
}

// ---------------------------------------------------------------- calibrate

#[derive(Debug, Clone, Serialize)]
pub struct CalibrateReport {
    pub scenario: &'static str,
    pub calibration: CalibrationReport,
    pub power_ceiling_w: f64,
    pub gvd_bandwidth_limit_thz: Option<f64>,
}

pub fn run_calibrate(sc: &Scenario) -> Result<Outcome<CalibrateReport>> {
    let forced = Scenario {
        peak_power: None,
        ..sc.clone()
    };
    let prep = Prepared::new(&forced, Arm::Signal)?;
    let calibration = prep.derived.calibration.unwrap_or(CalibrationReport {
        target_thz: 0.0,
        peak_power_w: 0.0,
        delta_t_ps: 0.0,
        shift_thz: 0.0,
        evaluations: 0,
    });
    let report = CalibrateReport {
        scenario: ScenarioKind::Calibrate.name(),
        calibration,
        power_ceiling_w: prep.derived.power_ceiling_w,
        gvd_bandwidth_limit_thz: prep.derived.gvd_bandwidth_limit_thz,
    };
    let artifacts = vec![Artifact::json("calibration.json", &report)?];
    Ok(Outcome {
        report,
        derived: prep.derived,
        artifacts,
    })
}
