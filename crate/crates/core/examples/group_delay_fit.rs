// Fit a sextic to the bundled group-delay samples, then read off β₂ and the
// wavelength whose group velocity matches the control's.

use photon_reshape::fiber::{beta2_at, find_matched_wavelength, fit_group_delay, read_group_delay_csv};
use photon_reshape::units::{NM, PS};
use photon_reshape::Result;

pub fn run() -> Result<()> {
    let text = include_str!("../data/pcf_group_delay_samples.csv");
    let samples = read_group_delay_csv(text.as_bytes())?;
    let fit = fit_group_delay(&samples, 6)?;
    println!("{} samples, rms residual {:.2e} ps/m", samples.len(), fit.residual_rms / PS);
    for nm in [756.0, 1000.0, 1512.0] {
        println!("  β₂({nm} nm) = {:+.4e} ps²/m", beta2_at(&fit.curve, nm * NM)? / (PS * PS));
    }
    let (_, hi) = fit.curve.valid_range();
    let matched = find_matched_wavelength(&fit.curve, 756.0 * NM, (806.0 * NM, hi))?;
    println!("756 nm is group-velocity matched to {:.2} nm", matched / NM);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
