use std::f64::consts::PI;

use photon_reshape::fiber::{Channel, FiberSpec, GroupDelayCurve};
use photon_reshape::propagate::*;
use photon_reshape::units::{angular_frequency, PS, THZ};
use photon_reshape::{Complex64, ComplexEnvelope, Error, SampledGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;

const FWHM: f64 = 0.78 * PS;

fn control_grid() -> SampledGrid {
    SampledGrid::time_window(4096, 40.0 * PS).unwrap()
}

fn pulse(p0: f64) -> PulseSpec {
    PulseSpec {
        shape: PulseShape::Gaussian,
        fwhm: FWHM,
        peak_power: p0,
        wavelength: 756e-9,
        delay: 0.0,
    }
}

fn flat_fiber() -> FiberSpec {
    FiberSpec {
        delay_curve: GroupDelayCurve::constant(4.9e-9, (0.7e-6, 1.6e-6)).unwrap(),
        ..FiberSpec::bundled()
    }
}

fn history(fiber: &FiberSpec, p0: f64, cfg: PropagationConfig) -> ControlHistory {
    let c = synthesize_pulse(&pulse(p0), &control_grid()).unwrap();
    evolve_control(&c, fiber, &cfg).unwrap()
}

fn lumped(z_steps: usize) -> PropagationConfig {
    PropagationConfig {
        z_steps,
        scheme: Scheme::Lumped,
        ..Default::default()
    }
}

fn signal_channel(h: &ControlHistory, beta2: f64) -> Channel {
    Channel {
        wavelength: 1512e-9,
        beta2,
        group_delay: h.channel.group_delay,
    }
}

/// Signal frequency grid: `n` points over `±half_thz`.
fn sgrid(n: usize, half_thz: f64) -> SampledGrid {
    SampledGrid::frequency_span(n, 2.0 * PI * half_thz * THZ, angular_frequency(1512e-9)).unwrap()
}

fn gaussian_packet(grid: &SampledGrid, sigma_t: f64, t0: f64) -> ComplexEnvelope {
    let tg = grid.conjugate(grid.center());
    ComplexEnvelope::from_fn(tg, grid.center(), |t| {
        Complex64::new((-(t - t0).powi(2) / (4.0 * sigma_t * sigma_t)).exp(), 0.0)
    })
    .unwrap()
    .to_frequency()
    .unwrap()
}

fn random_spectrum(grid: &SampledGrid, seed: u64) -> ComplexEnvelope {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = (0..grid.n())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexEnvelope::new(*grid, grid.center(), s).unwrap()
}

fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn zero_power_gives_zero_phase() {
    let f = FiberSpec::bundled();
    let h = history(&f, 0.0, PropagationConfig::default());
    let tg = sgrid(512, 2.5).conjugate(0.0);
    let phi = xpm_phase(&h, &f, &tg, 0.3 * PS, 1e-13).unwrap();
    assert!(phi.phase.iter().all(|&p| p == 0.0));
}

#[test]
fn lumped_phase_is_scaled_pulse() {
    let f = flat_fiber();
    let p0 = 120.0;
    let h = history(&f, p0, lumped(64));
    // aligned with the control grid so interpolation is exact
    let tg = SampledGrid::time(2048, control_grid().spacing()).unwrap();
    let delay = 150.0 * tg.spacing();
    let phi = xpm_phase(&h, &f, &tg, delay, 0.0).unwrap();
    let scale = f.xpm_factor * f.gamma_signal * f.length * p0;
    for (k, &p) in phi.phase.iter().enumerate() {
        let expect = scale * pulse(1.0).profile(tg.offset(k) + delay);
        assert!((p - expect).abs() < 1e-9 * scale);
    }
    let series = photon_reshape::RealSeries::new(tg, phi.phase.clone()).unwrap();
    assert!((series.fwhm().unwrap() - FWHM).abs() < tg.spacing());
}

#[test]
fn walkoff_phase_is_rectangle_convolution() {
    let f = flat_fiber();
    let p0 = 80.0;
    let h = history(&f, p0, lumped(64));
    let tg = SampledGrid::time(2048, 0.01 * PS).unwrap();
    let d = 2.0 * PS / f.length;
    let delay = -1.0 * PS;
    let phi = xpm_phase(&h, &f, &tg, delay, d).unwrap();
    let t_e = FWHM / (2.0 * 2f64.ln().sqrt());
    let scale = f.xpm_factor * f.gamma_signal * p0;
    let peak = phi.max();
    for (k, &p) in phi.phase.iter().enumerate() {
        let a = tg.offset(k) + delay;
        let b = a + d * f.length;
        let expect = scale / d * t_e * PI.sqrt() / 2.0 * (erf(b / t_e) - erf(a / t_e));
        assert!((p - expect).abs() < 1e-3 * peak, "t={} {p} vs {expect}", tg.offset(k));
    }
}

#[test]
fn instantaneous_frequency_cases() {
    let tg = SampledGrid::time(256, 0.02 * PS).unwrap();
    let flat = PhaseProfile { grid: tg, phase: vec![0.7; 256] };
    assert!(instantaneous_frequency(&flat).values.iter().all(|&v| v == 0.0));

    let w1 = 2.0 * PI * 0.3 * THZ;
    let ramp = PhaseProfile { grid: tg, phase: tg.offsets().iter().map(|t| -w1 * t).collect() };
    assert!(instantaneous_frequency(&ramp).values.iter().all(|&v| (v - w1).abs() < 1e-6 * w1));

    let gauss = PhaseProfile {
        grid: tg,
        phase: tg.offsets().iter().map(|t| 2.0 * pulse(1.0).profile(*t)).collect(),
    };
    let dw = instantaneous_frequency(&gauss);
    for (k, &v) in dw.values.iter().enumerate() {
        let t = tg.offset(k);
        if t > 0.05 * PS && v.abs() > 1e-9 {
            assert!(v > 0.0, "trailing edge must be blue");
        }
        if t < -0.05 * PS && v.abs() > 1e-9 {
            assert!(v < 0.0, "rising edge must be red");
        }
    }
}

#[test]
fn zero_power_without_dispersion_is_identity() {
    let f = flat_fiber();
    let h = history(&f, 0.0, PropagationConfig::default());
    let g = sgrid(256, 2.5);
    let op = signal_operator(&h, &f, &signal_channel(&h, 0.0), &g, 0.0).unwrap();
    let x = random_spectrum(&g, 3);
    let y = op.apply(&x).unwrap();
    assert!(rel_l2(y.samples(), x.samples()) < 1e-14);
}

#[test]
fn lumped_operator_is_phase_multiplication() {
    let f = FiberSpec::bundled();
    let h = history(&f, 150.0, lumped(64));
    let g = sgrid(512, 2.5);
    let ch = signal_channel(&h, 0.0);
    let delay = 0.4 * PS;
    let op = signal_operator(&h, &f, &ch, &g, delay).unwrap();
    let phi = xpm_phase(&h, &f, &g.conjugate(g.center()), delay, 0.0).unwrap();

    let x = gaussian_packet(&g, 0.5 * PS, 0.0).to_time().unwrap();
    let y = op.apply(&x).unwrap();
    let expect: Vec<Complex64> = x
        .samples()
        .iter()
        .zip(&phi.phase)
        .map(|(a, p)| a * Complex64::from_polar(1.0, *p))
        .collect();
    assert!(rel_l2(y.samples(), &expect) < 1e-12);
}

#[test]
fn operator_grid_mismatch_rejected() {
    let f = FiberSpec::bundled();
    let h = history(&f, 10.0, lumped(8));
    let g = sgrid(256, 2.5);
    let op = signal_operator(&h, &f, &signal_channel(&h, 0.0), &g, 0.0).unwrap();
    let other = random_spectrum(&sgrid(128, 2.5), 1);
    assert!(matches!(op.apply(&other), Err(Error::GridMismatch(_))));
    assert!(signal_operator(&h, &f, &signal_channel(&h, 0.0), &g.conjugate(0.0), 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn operator_is_unitary_up_to_transmission(
        seed in any::<u64>(),
        delay_ps in -3.0..3.0f64,
        split in any::<bool>(),
        transmission in 0.2..=1.0f64,
    ) {
        let f = FiberSpec { transmission, ..FiberSpec::bundled() };
        let cfg = if split { PropagationConfig::default() } else { lumped(64) };
        let h = history(&f, 150.0, cfg);
        let g = sgrid(256, 2.5);
        let ch = f.channel(1512e-9).unwrap();
        let op = signal_operator(&h, &f, &ch, &g, delay_ps * PS).unwrap();
        let x = random_spectrum(&g, seed);
        let y = op.apply(&x).unwrap();
        let ratio = y.energy() / x.energy();
        prop_assert!((ratio - transmission).abs() < 1e-9 * transmission);
    }
}

#[test]
fn distant_control_leaves_spectrum_alone() {
    let f = FiberSpec::bundled();
    let h = history(&f, 150.0, PropagationConfig::default());
    let g = sgrid(512, 2.5);
    let ch = f.channel(1512e-9).unwrap();
    let x = gaussian_packet(&g, 0.3 * PS, 0.0);
    let c0 = x.centroid().unwrap();
    for delay in [-10.0 * PS, 10.0 * PS] {
        let op = signal_operator(&h, &f, &ch, &g, delay).unwrap();
        let y = op.apply(&x).unwrap();
        let shift = (y.centroid().unwrap() - c0) / (2.0 * PI);
        assert!(shift.abs() < 0.01 * 0.4 * THZ);
        let ix = x.intensity();
        let iy = y.intensity();
        let num: f64 = ix.iter().zip(&iy).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = ix.iter().map(|a| a * a).sum();
        assert!((num / den).sqrt() < 1e-6);
    }
}

#[test]
fn trailing_edge_is_blue_shifted() {
    let f = FiberSpec::bundled();
    let h = history(&f, 150.0, PropagationConfig::default());
    let g = sgrid(512, 2.5);
    let ch = f.channel(1512e-9).unwrap();
    let x = gaussian_packet(&g, 0.2 * PS, 0.0);
    let c0 = x.centroid().unwrap();
    let shift = |dt: f64| {
        let op = signal_operator(&h, &f, &ch, &g, dt).unwrap();
        op.apply(&x).unwrap().centroid().unwrap() - c0
    };
    assert!(shift(0.4 * PS) > 0.0);
    assert!(shift(-0.4 * PS) < 0.0);
}

#[test]
fn schemes_agree_at_low_gvd() {
    let f = flat_fiber();
    let cfg = PropagationConfig {
        include_control_dispersion: false,
        ..Default::default()
    };
    let hs = history(&f, 150.0, cfg);
    let hl = history(&f, 150.0, lumped(64));
    let g = sgrid(512, 2.5);
    // β₂·L·(2π·2.5 THz)² ≈ 0.025
    let ch = signal_channel(&hs, 1e-4 * PS * PS);
    let x = gaussian_packet(&g, 0.2 * PS, 0.0);
    for delay in [-0.4 * PS, 0.0, 0.4 * PS] {
        let a = signal_operator(&hs, &f, &ch, &g, delay).unwrap().apply(&x).unwrap();
        let b = signal_operator(&hl, &f, &ch, &g, delay).unwrap().apply(&x).unwrap();
        let e = rel_l2(a.samples(), b.samples());
        assert!(e < 0.02, "delay {delay}: {e}");
    }
}

#[test]
fn small_phase_shift_is_antisymmetric() {
    let f = flat_fiber();
    // φ_max = 2·0.008·1·15 = 0.24 rad
    let h = history(&f, 15.0, lumped(16));
    let g = sgrid(1024, 10.0);
    let ch = signal_channel(&h, 0.0);
    let x = gaussian_packet(&g, 0.2 * PS, 0.0);
    let c0 = x.centroid().unwrap();
    let shift = |dt: f64| {
        let op = signal_operator(&h, &f, &ch, &g, dt).unwrap();
        assert!(op.max_phase() < 0.3);
        op.apply(&x).unwrap().centroid().unwrap() - c0
    };
    for delta in [0.2 * PS, 0.4 * PS, 0.7 * PS] {
        let (a, b) = (shift(delta), shift(-delta));
        assert!((a + b).abs() < 0.05 * a.abs(), "{a} {b}");
    }
}

#[test]
fn small_phase_centroid_theorem() {
    let f = flat_fiber();
    // φ_max = 0.016·6 = 0.096 rad
    let h = history(&f, 6.0, lumped(16));
    let g = sgrid(1024, 10.0);
    let tg = g.conjugate(g.center());
    let ch = signal_channel(&h, 0.0);
    for (delay, t0) in [(0.3 * PS, 0.0), (-0.5 * PS, 0.2 * PS), (0.1 * PS, -0.3 * PS)] {
        let x = gaussian_packet(&g, 0.25 * PS, t0);
        let op = signal_operator(&h, &f, &ch, &g, delay).unwrap();
        let got = op.apply(&x).unwrap().centroid().unwrap() - x.centroid().unwrap();
        let dw = instantaneous_frequency(&xpm_phase(&h, &f, &tg, delay, 0.0).unwrap());
        let w = x.to_time().unwrap().intensity();
        let predicted = dw.values.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / w.iter().sum::<f64>();
        assert!((got - predicted).abs() < 0.01 * predicted.abs(), "{got} vs {predicted}");
    }
}

fn low_gvd_template() -> CalibrationTemplate {
    let f = flat_fiber();
    CalibrationTemplate {
        signal: Channel { wavelength: 1512e-9, beta2: 0.0, group_delay: 4.9e-9 },
        fiber: f,
        pulse: pulse(0.0),
        control_grid: control_grid(),
        config: lumped(16),
        delay_window: (-1.5 * PS, 1.5 * PS),
        coarse_points: 13,
        max_peak_power: 2000.0,
    }
}

#[test]
fn calibration_closed_loop() {
    let t = low_gvd_template();
    let g = sgrid(512, 2.5);
    let probe = gaussian_packet(&g, 0.2 * PS, 0.0).to_time().unwrap();

    let zero = calibrate_peak_power(0.0, &t, &probe).unwrap();
    assert_eq!(zero.peak_power, 0.0);

    let c2 = calibrate_peak_power(0.2 * THZ, &t, &probe).unwrap();
    let c4 = calibrate_peak_power(0.4 * THZ, &t, &probe).unwrap();
    assert!(c2.peak_power < c4.peak_power);
    assert!(c4.delay > 0.0, "maximum blue shift sits on the trailing edge");

    // re-simulate independently of the calibrator's own bookkeeping
    let op = t.operator(&probe, c4.peak_power, c4.delay).unwrap();
    let spec = probe.to_frequency().unwrap();
    let shift = (op.apply(&spec).unwrap().centroid().unwrap() - spec.centroid().unwrap()) / (2.0 * PI);
    assert!((shift - 0.4 * THZ).abs() < 0.01 * 0.4 * THZ, "{shift}");
}

#[test]
fn unreachable_target_saturates() {
    let t = CalibrationTemplate { max_peak_power: 20.0, ..low_gvd_template() };
    let g = sgrid(512, 2.5);
    let probe = gaussian_packet(&g, 0.2 * PS, 0.0);
    match calibrate_peak_power(0.4 * THZ, &t, &probe) {
        Err(Error::Saturated { reached_thz, .. }) => assert!(reached_thz < 0.4),
        other => panic!("expected saturation, got {other:?}"),
    }
}
