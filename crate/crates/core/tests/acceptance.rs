//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use common::{random_compact_jsa, random_jsa, random_structured_jsa, rng};
use photon_reshape::biphoton::{exchange_decompose, heralded_spectrum, jsi, marginal, Arm, JointSpectralAmplitude};
use photon_reshape::expcli::{execute, run, Prepared, RunOptions, RunResult, Scenario};
use photon_reshape::fiber::*;
use photon_reshape::interference::*;
use photon_reshape::propagate::*;
use photon_reshape::units::{angular_frequency, NM, PS, SPEED_OF_LIGHT, THZ};
use photon_reshape::{Complex64, ComplexEnvelope, SampledGrid};
use serde_json::Value;

type Check = (bool, String);

fn config_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json"))
}

fn load(name: &str) -> Scenario {
    Scenario::load(&config_path(name)).unwrap()
}

fn shipped(name: &str) -> RunResult {
    static CACHE: OnceLock<Mutex<HashMap<String, RunResult>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(name) {
        return r.clone();
    }
    let r = execute(&load(name), &RunOptions::default()).unwrap();
    cache.lock().unwrap().insert(name.into(), r.clone());
    r
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn rel_l2c(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn delays(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn centroid_hz(j: &JointSpectralAmplitude) -> f64 {
    marginal(j, Arm::Signal).centroid().unwrap() / (2.0 * PI)
}

fn unitarity() -> Check {
    let text = std::fs::read_to_string(config_path("fig2")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["sweep"] = serde_json::json!({ "delta_t_range_ps": { "start": -2.0, "stop": 2.0, "points": 21 } });
    let sc = Scenario::from_json(&v.to_string(), Path::new(".")).unwrap();
    let start = Instant::now();
    let r = execute(&sc, &RunOptions { jobs: Some(1), ..Default::default() }).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let norms: Vec<f64> = r.summary["rows"].as_array().unwrap().iter().map(|row| row["norm"].as_f64().unwrap()).collect();
    let lo = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().cloned().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    (
        norms.len() == 21 && spread < 1e-6 && secs < 60.0,
        format!("{} points, norm spread {spread:.2e}, {secs:.1} s", norms.len()),
    )
}

fn calibrated_shift() -> Check {
    let cal = shipped("calibrate");
    let p = cal.summary["calibration"]["peak_power_w"].as_f64().unwrap();
    let mut sc = load("calibrate");
    sc.peak_power = Some(p);
    let prep = Prepared::new(&sc, Arm::Signal).unwrap();
    let c0 = centroid_hz(&prep.jsa);
    let shift = |dt: f64| centroid_hz(&prep.reshape(&sc, dt).unwrap()) - c0;

    let grid = delays(-2.0 * PS, 2.0 * PS, 81);
    let shifts: Vec<f64> = grid.iter().map(|&t| shift(t)).collect();
    let k = (0..grid.len()).max_by(|&a, &b| shifts[a].total_cmp(&shifts[b])).unwrap();
    let kmin = (0..grid.len()).min_by(|&a, &b| shifts[a].total_cmp(&shifts[b])).unwrap();
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let (x1, x2) = (b - gr * (b - a), a + gr * (b - a));
        if shift(x1) > shift(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let at = 0.5 * (a + b);
    let best = shift(at);
    let err = (best / (0.4 * THZ) - 1.0).abs();
    (
        err < 0.01 && at > 0.0 && grid[kmin] < 0.0,
        format!(
            "{p:.4} W: max blue shift {:.4} THz at ΔT = {:+.3} ps (err {:.2}%), max red shift at {:+.2} ps",
            best / THZ,
            at / PS,
            100.0 * err,
            grid[kmin] / PS
        ),
    )
}

fn identity_limits() -> Check {
    let base = load("fig3");
    let p = base.peak_power.unwrap();
    let mut worst: f64 = 0.0;
    for (power, dt) in [(0.0, 0.484 * PS), (p, 10.0 * PS), (p, -10.0 * PS)] {
        let mut sc = base.clone();
        sc.peak_power = Some(power);
        for arm in [Arm::Signal, Arm::Idler] {
            let prep = Prepared::new(&sc, arm).unwrap();
            let out = prep.reshape(&sc, dt).unwrap();
            let (a, b) = (jsi(&out), jsi(&prep.jsa));
            worst = worst.max(rel_l2(&a.values, &b.values));
            for m in [Arm::Signal, Arm::Idler] {
                worst = worst.max(rel_l2(&marginal(&out, m).values, &marginal(&prep.jsa, m).values));
            }
            let h = |j: &JointSpectralAmplitude| heralded_spectrum(j, &sc.herald, &sc.scan, &sc.scan_centers).unwrap().counts;
            worst = worst.max(rel_l2(&h(&out), &h(&prep.jsa)));
        }
    }
    (worst < 1e-6, format!("worst relative L2 change {worst:.2e}"))
}

fn gauss(x: f64, w: f64) -> f64 {
    (-(x / w).powi(2)).exp()
}

fn hom_physics() -> Check {
    let g = SampledGrid::frequency_span(64, 2.0 * PI * 2.0 * THZ, angular_frequency(1512e-9)).unwrap();
    let sym =
        JointSpectralAmplitude::from_fn(g, g, |a, b| Complex64::new(gauss(a, 4e12) * gauss(b, 4e12) * gauss(a + b, 2e12), 0.0))
            .unwrap();
    let v = visibility(&hom_fringe(&sym, &delays(-20.0 * PS, 20.0 * PS, 81)).unwrap()).unwrap();
    let v_err = (v.value - 1.0).abs();

    let n = 1024;
    let a = 0.78 * PS;
    let g = SampledGrid::frequency(n, 150.0 / a / (n / 2) as f64, 1.2e15).unwrap();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 1..n {
        let x = a * g.offset(k);
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        data[(n - k) * n + k] = Complex64::from_polar(sinc, x);
    }
    let ridge = JointSpectralAmplitude::new(g, g, data).unwrap();
    let d = delays(-3.0 * a, a, 161);
    let f = hom_fringe(&ridge, &d).unwrap();
    let tri_err = d
        .iter()
        .zip(&f.rates)
        .map(|(t, r)| (r - (1.0 - (1.0 - ((t + a) / a).abs()).max(0.0))).abs())
        .fold(0.0, f64::max);
    (
        v.kind == FringeKind::Dip && v_err < 1e-6 && tri_err < 0.01,
        format!("symmetric V error {v_err:.1e}; sinc-ridge triangle max deviation {tri_err:.4}"),
    )
}

fn classical_crossing() -> Check {
    let s = shipped("fig4_hom").summary;
    let (b, a) = (&s["before"], &s["after"]);
    let vb = b["visibility"].as_f64().unwrap();
    let va = a["visibility"].as_f64().unwrap();
    let ob = b["marginal_overlap"].as_f64().unwrap();
    let oa = a["marginal_overlap"].as_f64().unwrap();
    (
        b["kind"] == "dip" && a["kind"] == "dip" && vb < 0.5 && va > 0.5 && oa > ob,
        format!("V {vb:.3} -> {va:.3}, overlap {ob:.3} -> {oa:.3}"),
    )
}

fn bound_dominance() -> Check {
    let mut r = rng(1000);
    let (mut dips, mut worst) = (0, f64::NEG_INFINITY);
    let total = 1200;
    for _ in 0..total {
        let j = random_compact_jsa(64, &mut r);
        let edge = 0.9 * PI / j.grid_s().spacing();
        let v = visibility(&hom_fringe(&j, &delays(-edge, edge, 41)).unwrap()).unwrap();
        if v.kind == FringeKind::Dip {
            dips += 1;
            worst = worst.max(v.value - jsi_visibility_bound(&jsi(&j)).unwrap());
        }
    }
    (
        dips >= 1000 && worst <= 1e-9,
        format!("{dips} dips out of {total} states, max V - bound = {worst:.3e}"),
    )
}

fn bump_criterion() -> Check {
    let mut r = rng(7);
    let mut identity: f64 = 0.0;
    for seed in 0..300u64 {
        let j = match seed % 3 {
            0 => random_jsa(32, seed),
            1 => random_structured_jsa(32, &mut r),
            _ => random_compact_jsa(32, &mut r),
        };
        let p = exchange_decompose(&j).unwrap();
        let w0 = two_photon_overlap(&j, &[0.0]).unwrap()[0];
        identity = identity.max((w0.re - (p.symmetric.norm() - p.antisymmetric.norm())).abs());
    }

    let s = shipped("fig4_bump").summary;
    let mut consistent = true;
    let mut parts = Vec::new();
    for state in ["before", "after"] {
        let x = &s[state];
        let bump = x["kind"] == "bump" && x["visibility"].as_f64().unwrap() > 0.0;
        let anti = x["antisymmetric_fraction"].as_f64().unwrap();
        consistent &= bump == (anti > 0.5);
        parts.push(format!("{state}: {} V {:.3} anti {anti:.3}", x["kind"].as_str().unwrap(), x["visibility"].as_f64().unwrap()));
    }
    let after_bump = s["after"]["kind"] == "bump";
    (
        identity < 1e-9 && consistent && after_bump,
        format!("W(0) identity error {identity:.1e}; {}", parts.join("; ")),
    )
}

fn solver_oracles() -> Check {
    let control_grid = SampledGrid::time_window(4096, 40.0 * PS).unwrap();
    let pulse = |p0: f64| PulseSpec {
        shape: PulseShape::Gaussian,
        fwhm: 0.78 * PS,
        peak_power: p0,
        wavelength: 756e-9,
        delay: 0.0,
    };
    let flat = FiberSpec {
        delay_curve: GroupDelayCurve::constant(4.9e-9, (0.7e-6, 1.6e-6)).unwrap(),
        ..FiberSpec::bundled()
    };

    let e = synthesize_pulse(&pulse(150.0), &control_grid).unwrap();
    let h = evolve_control(&e, &flat, &PropagationConfig::default()).unwrap();
    let exact: Vec<Complex64> = e
        .samples()
        .iter()
        .map(|a| a * Complex64::from_polar(1.0, flat.gamma_control * a.norm_sqr() * flat.length))
        .collect();
    let spm_err = rel_l2c(h.output.samples(), &exact);

    let no_disp = PropagationConfig { include_control_dispersion: false, ..Default::default() };
    let hs = evolve_control(&e, &flat, &no_disp).unwrap();
    let hl = evolve_control(&e, &flat, &PropagationConfig { z_steps: 64, scheme: Scheme::Lumped, ..Default::default() }).unwrap();
    let g = SampledGrid::frequency_span(512, 2.0 * PI * 2.5 * THZ, angular_frequency(1512e-9)).unwrap();
    let ch = Channel { wavelength: 1512e-9, beta2: 1e-4 * PS * PS, group_delay: hs.channel.group_delay };
    let tg = g.conjugate(g.center());
    let x = ComplexEnvelope::from_fn(tg, g.center(), |t| Complex64::new((-t * t / (4.0 * (0.2 * PS).powi(2))).exp(), 0.0))
        .unwrap()
        .to_frequency()
        .unwrap();
    let mut scheme_err: f64 = 0.0;
    for delay in [-0.4 * PS, 0.0, 0.4 * PS] {
        let a = signal_operator(&hs, &flat, &ch, &g, delay).unwrap().apply(&x).unwrap();
        let b = signal_operator(&hl, &flat, &ch, &g, delay).unwrap().apply(&x).unwrap();
        scheme_err = scheme_err.max(rel_l2c(a.samples(), b.samples()));
    }

    let mut r = rng(5);
    let mut brute_err: f64 = 0.0;
    for seed in 0..6 {
        let j = if seed % 2 == 0 { random_jsa(64, seed) } else { random_structured_jsa(64, &mut r) };
        let n = 64;
        let g = *j.grid_s();
        let cols: Vec<Vec<Complex64>> = (0..n)
            .map(|i| ComplexEnvelope::new(g, g.center(), j.column(i).to_vec()).unwrap().to_time().unwrap().into_samples())
            .collect();
        let t: Vec<Vec<Complex64>> = (0..n)
            .map(|ts| {
                let row: Vec<Complex64> = (0..n).map(|i| cols[i][ts]).collect();
                ComplexEnvelope::new(g, g.center(), row).unwrap().to_time().unwrap().into_samples()
            })
            .collect();
        let (mut coincidence, mut total) = (0.0, 0.0);
        for u in 0..n {
            for v in 0..n {
                coincidence += (0.5 * (t[v][u] - t[u][v])).norm_sqr();
                total += t[u][v].norm_sqr();
            }
        }
        let r0 = hom_fringe(&j, &[-PS, 0.0, PS]).unwrap().rates[1];
        brute_err = brute_err.max((coincidence / (0.5 * total) - r0).abs());
    }
    (
        spm_err < 1e-6 && scheme_err < 0.02 && brute_err < 1e-8,
        format!("SPM {spm_err:.2e}; lumped vs split {:.2}%; brute-force R(0) {brute_err:.1e}", 100.0 * scheme_err),
    )
}

fn fiber_math() -> Check {
    let reference = 1150.0 * NM;
    let half = 450.0 * NM;
    let wl: Vec<f64> = (0..31).map(|i| reference - half + 30.0 * NM * i as f64).collect();
    let mut fit_err: f64 = 0.0;
    for degree in 0..=MAX_DEGREE {
        let poly: Vec<f64> = (0..=degree)
            .map(|k| if k == 0 { 4.9e-9 } else { (if k % 2 == 0 { 1.0 } else { -0.7 }) * 1e-10 / half.powi(k as i32) })
            .collect();
        let samples: Vec<GroupDelaySample> = wl
            .iter()
            .map(|&l| GroupDelaySample {
                wavelength: l,
                delay: poly.iter().rev().fold(0.0, |acc, c| acc * (l - reference) + c),
            })
            .collect();
        let fit = fit_group_delay(&samples, degree).unwrap();
        for (a, b) in fit.curve.coefficients().iter().zip(&poly) {
            fit_err = fit_err.max(((a - b) / b).abs());
        }
    }

    let c = GroupDelayCurve::bundled();
    let tau = |w: f64| c.delay(2.0 * PI * SPEED_OF_LIGHT / w).unwrap();
    let mut b2_err: f64 = 0.0;
    for lam in [756e-9, 900e-9, 1300e-9, 1512e-9] {
        let w = 2.0 * PI * SPEED_OF_LIGHT / lam;
        let h = 2.0 * PI * 0.5 * THZ;
        // five-point stencil
        let fd = (-tau(w + 2.0 * h) + 8.0 * tau(w + h) - 8.0 * tau(w - h) + tau(w - 2.0 * h)) / (12.0 * h);
        let b2 = beta2_at(&c, lam).unwrap();
        b2_err = b2_err.max(((fd - b2) / b2).abs());
    }

    let lam_ref = 756.0 * NM;
    let m = find_matched_wavelength(&c, lam_ref, (lam_ref + 50.0 * NM, c.valid_range().1)).unwrap();
    let residual = walkoff_per_meter(&c, lam_ref, m).unwrap().abs();
    let octave = (m / (2.0 * lam_ref) - 1.0).abs();
    (
        fit_err < 1e-9 && b2_err < 1e-6 && residual < 1e-4 * PS && octave < 0.01,
        format!(
            "fit {fit_err:.1e}; β₂ vs FD {b2_err:.1e}; λ* = {:.3} nm, residual {:.1e} ps/m",
            m / NM,
            residual / PS
        ),
    )
}

fn determinism() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    for name in ["calibrate", "fig2", "fig3", "fig4_hom", "fig4_bump"] {
        let first = shipped(name);
        let dir = tempfile::tempdir().unwrap();
        let (out, _) = run(&load(name), &RunOptions { jobs: Some(1), out_dir: Some(dir.path().into()), svg: false }).unwrap();
        let mut same = std::fs::read_dir(&out).unwrap().count() == first.artifacts.len();
        for a in &first.artifacts {
            same &= std::fs::read(out.join(&a.name)).map(|b| b == a.bytes).unwrap_or(false);
        }
        ok &= same;
        detail.push(format!("{name} {}", if same { "identical" } else { "DIFFERS" }));
    }
    (ok, detail.join(", "))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 10] = [
        ("unitarity over a 21-point sweep", unitarity),
        ("calibrated 0.4 THz blue shift", calibrated_shift),
        ("identity limits", identity_limits),
        ("HOM dip physics", hom_physics),
        ("classical-limit crossing", classical_crossing),
        ("bound dominance", bound_dominance),
        ("bump criterion", bump_criterion),
        ("solver oracles", solver_oracles),
        ("fiber math", fiber_math),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail} [{:.1} s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
