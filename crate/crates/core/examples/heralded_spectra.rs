// Heralded signal spectrum through a 1 nm idler filter, scanned with 0.5 nm
// bins, with and without the control pulse.

use std::f64::consts::PI;

use photon_reshape::biphoton::{apply_operator, build_jsa, heralded_spectrum, Arm, FilterShape, FilterSpec, SpdcSpec};
use photon_reshape::fiber::FiberSpec;
use photon_reshape::propagate::*;
use photon_reshape::units::{angular_frequency, NM, PS, THZ};
use photon_reshape::{Result, SampledGrid};

pub fn run() -> Result<()> {
    let spdc = SpdcSpec::default();
    let grid = SampledGrid::frequency_span(256, 2.0 * PI * 3.5 * THZ, angular_frequency(spdc.degenerate_wavelength))?;
    let jsa = build_jsa(&spdc, &grid, &grid)?;

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

    let herald = FilterSpec { center: 1512.0 * NM, width: 1.0 * NM, shape: FilterShape::Rectangular };
    let scan = FilterSpec { center: 1512.0 * NM, width: 0.5 * NM, shape: FilterShape::Rectangular };
    let centers: Vec<f64> = (0..41).map(|k| (1502.0 + 0.5 * k as f64) * NM).collect();
    let peak_nm = |counts: &[f64]| {
        let k = (0..counts.len()).max_by(|&a, &b| counts[a].total_cmp(&counts[b])).unwrap();
        centers[k] / NM
    };

    let reference = heralded_spectrum(&jsa, &herald, &scan, &centers)?;
    println!("no control: heralded {:.4e}, peak bin {:.1} nm", reference.heralded, peak_nm(&reference.counts));
    for dt in [-0.5, 0.5] {
        let op = signal_operator(&history, &fiber, &signal, &grid, dt * PS - jsa.time_origin()?)?;
        let h = heralded_spectrum(&apply_operator(&jsa, &op, Arm::Signal)?, &herald, &scan, &centers)?;
        println!("ΔT {dt:+.1} ps: heralded {:.4e}, peak bin {:.1} nm", h.heralded, peak_nm(&h.counts));
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
