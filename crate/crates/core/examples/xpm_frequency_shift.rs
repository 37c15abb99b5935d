// Shift of a single photon's mean frequency against the control delay ΔT.
// Positive ΔT puts the photon on the trailing edge: blue shift.

use std::f64::consts::PI;

use photon_reshape::fiber::FiberSpec;
use photon_reshape::propagate::*;
use photon_reshape::units::{angular_frequency, PS, THZ};
use photon_reshape::{Complex64, ComplexEnvelope, Result, SampledGrid};

pub fn run() -> Result<()> {
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
    let signal = fiber.channel(1512e-9)?;

    let grid = SampledGrid::frequency_span(512, 2.0 * PI * 2.5 * THZ, angular_frequency(1512e-9))?;
    let sigma = 0.25 * PS;
    let photon = ComplexEnvelope::from_fn(grid.conjugate(grid.center()), grid.center(), |t| {
        Complex64::new((-t * t / (4.0 * sigma * sigma)).exp(), 0.0)
    })?
    .to_frequency()?;
    let c0 = photon.centroid()?;

    println!("walk-off {:+.4} ps/m", (signal.group_delay - history.channel.group_delay) / PS);
    println!("  ΔT (ps)   shift (THz)");
    for k in -8..=8 {
        let dt = 0.25 * k as f64 * PS;
        let op = signal_operator(&history, &fiber, &signal, &grid, dt)?;
        let shift = (op.apply(&photon)?.centroid()? - c0) / (2.0 * PI);
        println!("  {:+6.2}    {:+.4}", dt / PS, shift / THZ);
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
