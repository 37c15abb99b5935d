// Find the control peak power whose best-case blue shift is 0.4 THz.

use std::f64::consts::PI;

use photon_reshape::fiber::FiberSpec;
use photon_reshape::propagate::*;
use photon_reshape::units::{angular_frequency, PS, THZ};
use photon_reshape::{Complex64, ComplexEnvelope, Result, SampledGrid};

pub fn run() -> Result<()> {
    let fiber = FiberSpec::bundled();
    let template = CalibrationTemplate {
        signal: fiber.channel(1512e-9)?,
        fiber,
        pulse: PulseSpec {
            shape: PulseShape::Gaussian,
            fwhm: 0.78 * PS,
            peak_power: 0.0,
            wavelength: 756e-9,
            delay: 0.0,
        },
        control_grid: SampledGrid::time_window(2048, 40.0 * PS)?,
        config: PropagationConfig::default(),
        delay_window: (-2.0 * PS, 2.0 * PS),
        coarse_points: 17,
        max_peak_power: 1000.0,
    };
    let grid = SampledGrid::frequency_span(256, 2.0 * PI * 2.5 * THZ, angular_frequency(1512e-9))?;
    let sigma = 0.25 * PS;
    let photon = ComplexEnvelope::from_fn(grid.conjugate(grid.center()), grid.center(), |t| {
        Complex64::new((-t * t / (4.0 * sigma * sigma)).exp(), 0.0)
    })?;

    let c = calibrate_peak_power(0.4 * THZ, &template, &photon)?;
    println!(
        "{:.3} W gives {:.4} THz at ΔT = {:+.3} ps ({} evaluations, ceiling {:.1} W)",
        c.peak_power,
        c.shift_hz / THZ,
        c.delay / PS,
        c.evaluations,
        template.power_ceiling()
    );
    Ok(())
}

fn main() -> Result<()> {
    run()
}
