// Reshape the signal photon of an SPDC pair and compare marginals.

use std::f64::consts::PI;

use photon_reshape::biphoton::{build_jsa, jsi, marginal, Arm, SpdcSpec};
use photon_reshape::fiber::FiberSpec;
use photon_reshape::propagate::*;
use photon_reshape::units::{angular_frequency, PS, THZ};
use photon_reshape::{Result, SampledGrid};

pub fn run() -> Result<()> {
    let spdc = SpdcSpec::default();
    let grid = SampledGrid::frequency_span(256, 2.0 * PI * 3.5 * THZ, angular_frequency(spdc.degenerate_wavelength))?;
    let jsa = build_jsa(&spdc, &grid, &grid)?;
    let origin = jsa.time_origin()?;

    let fiber = FiberSpec::bundled();
    let pulse = PulseSpec {
        shape: PulseShape::Gaussian,
        fwhm: 0.78 * PS,
        peak_power: 160.0,
        wavelength: 756e-9,
        delay: 0.0,
    };
    let control = synthesize_pulse(&pulse, &SampledGrid::time_window(4096, 40.0 * PS)?)?;
    let history = evolve_control(&control, &fiber, &PropagationConfig::default())?;
    let signal = fiber.channel(spdc.degenerate_wavelength)?;

    let thz = |w: f64| w / (2.0 * PI * THZ);
    let peak = jsi(&jsa).values.iter().cloned().fold(0.0, f64::max);
    let before = marginal(&jsa, Arm::Signal);
    println!("input: centroid {:+.4} THz, fwhm {:.4} THz", thz(before.centroid()?), thz(before.fwhm()?));
    for dt in [-0.5, 0.5, 10.0] {
        let op = signal_operator(&history, &fiber, &signal, &grid, dt * PS - origin)?;
        let out = photon_reshape::biphoton::apply_operator(&jsa, &op, Arm::Signal)?;
        let m = marginal(&out, Arm::Signal);
        let (a, b) = (jsi(&out), jsi(&jsa));
        let change = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / peak;
        let idler = marginal(&out, Arm::Idler);
        let idler_change = idler
            .values
            .iter()
            .zip(&marginal(&jsa, Arm::Idler).values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "ΔT {dt:+5.1} ps: centroid {:+.4} THz, fwhm {:.4} THz, norm {:.12}, JSI change {change:.2e}, idler change {idler_change:.1e}",
            thz(m.centroid()?),
            thz(m.fwhm()?),
            out.norm(),
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
