// HOM fringe of a non-degenerate pair before and after shifting the signal
// photon toward the idler.

use std::f64::consts::PI;

use photon_reshape::biphoton::*;
use photon_reshape::fiber::FiberSpec;
use photon_reshape::interference::{hom_fringe, jsi_visibility_bound, visibility};
use photon_reshape::propagate::*;
use photon_reshape::units::{angular_frequency, NM, PS, THZ};
use photon_reshape::{Result, SampledGrid};

pub fn run() -> Result<()> {
    let spdc = SpdcSpec { mismatch_offset: 650.0, ..SpdcSpec::default() };
    let grid = SampledGrid::frequency_span(256, 2.0 * PI * 3.5 * THZ, angular_frequency(spdc.degenerate_wavelength))?;
    let bandpass = FilterSpec { center: 1512.0 * NM, width: 30.0 * NM, shape: FilterShape::FlatTop };
    let raw = build_jsa(&spdc, &grid, &grid)?;
    let jsa = apply_filter(&apply_filter(&raw, &bandpass, Arm::Signal)?.jsa, &bandpass, Arm::Idler)?.jsa.normalized()?;

    let fiber = FiberSpec::bundled();
    let pulse = PulseSpec {
        shape: PulseShape::Gaussian,
        fwhm: 0.78 * PS,
        peak_power: 161.3,
        wavelength: 756e-9,
        delay: 0.0,
    };
    let control = synthesize_pulse(&pulse, &SampledGrid::time_window(4096, 40.0 * PS)?)?;
    let history = evolve_control(&control, &fiber, &PropagationConfig::default())?;
    let op = signal_operator(&history, &fiber, &fiber.channel(1512e-9)?, &grid, 0.44 * PS - jsa.time_origin()?)?;
    let after = apply_operator(&jsa, &op, Arm::Signal)?;

    // the sinc phase puts the fringe at −(gvm_ps − gvm_pi)L/2; move it to zero
    let center = -0.5 * (spdc.gvm_ps - spdc.gvm_pi) * spdc.crystal_length;
    let delays: Vec<f64> = (0..161).map(|k| (-8.0 + 0.1 * k as f64) * PS).collect();
    for (name, state) in [("before", &jsa), ("after", &after)] {
        let state = delay_arm(state, Arm::Signal, center);
        let f = hom_fringe(&state, &delays)?;
        let v = visibility(&f)?;
        let overlap = spectral_overlap(&marginal(&state, Arm::Signal).values, &marginal(&state, Arm::Idler).values)?;
        println!(
            "{name:>6}: {:?} V = {:.3}, bound {:.3}, marginal overlap {overlap:.3}",
            v.kind,
            v.value,
            jsi_visibility_bound(&jsi(&state))?
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
