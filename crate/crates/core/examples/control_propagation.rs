// Propagate a 0.78 ps control pulse through the bundled fiber with GVD and SPM.

use photon_reshape::fiber::FiberSpec;
use photon_reshape::propagate::{evolve_control, synthesize_pulse, PropagationConfig, PulseShape, PulseSpec};
use photon_reshape::units::{PS, THZ};
use photon_reshape::{Result, SampledGrid};

pub fn run() -> Result<()> {
    let grid = SampledGrid::time_window(4096, 40.0 * PS)?;
    let pulse = PulseSpec {
        shape: PulseShape::Gaussian,
        fwhm: 0.78 * PS,
        peak_power: 160.0,
        wavelength: 756e-9,
        delay: 0.0,
    };
    let fiber = FiberSpec::bundled();
    let input = synthesize_pulse(&pulse, &grid)?;
    let history = evolve_control(&input, &fiber, &PropagationConfig::default())?;
    let out = &history.output;

    let spectral_fwhm = |e: &photon_reshape::ComplexEnvelope| -> Result<f64> {
        Ok(e.to_frequency()?.fwhm()? / (2.0 * std::f64::consts::PI * THZ))
    };
    println!("β₂ at 756 nm: {:+.4e} ps²/m", history.channel.beta2 / (PS * PS));
    println!("fwhm      {:.4} ps -> {:.4} ps", input.fwhm()? / PS, out.fwhm()? / PS);
    println!("spectrum  {:.4} THz -> {:.4} THz", spectral_fwhm(&input)?, spectral_fwhm(out)?);
    println!("energy ratio {:.12}", out.energy() / input.energy());
    Ok(())
}

fn main() -> Result<()> {
    run()
}
