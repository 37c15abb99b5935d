// Dip or bump: the sign of W(0) follows the antisymmetric weight of the state.

use std::f64::consts::PI;

use photon_reshape::biphoton::{exchange_decompose, JointSpectralAmplitude};
use photon_reshape::interference::{hom_fringe, two_photon_overlap, visibility};
use photon_reshape::units::{angular_frequency, PS, THZ};
use photon_reshape::{Complex64, Result, SampledGrid};

pub fn run() -> Result<()> {
    let grid = SampledGrid::frequency_span(64, 2.0 * PI * 2.0 * THZ, angular_frequency(1512e-9))?;
    let w = 4e12;
    let g = |x: f64| (-(x / w).powi(2)).exp();
    let h = |x: f64| x / w * g(x);
    let delays: Vec<f64> = (0..81).map(|k| (-7.0 + 0.175 * k as f64) * PS).collect();

    println!("  mix   anti    W(0)     fringe");
    for k in 0..=6 {
        let theta = 0.5 * PI * k as f64 / 6.0;
        let (c, s) = (theta.cos(), theta.sin());
        let jsa = JointSpectralAmplitude::from_fn(grid, grid, |a, b| {
            let sym = g(a) * g(b) * (1.0 + 0.5 * h(a) * h(b));
            let anti = g(a) * h(b) - h(a) * g(b);
            Complex64::new(c * sym + s * anti, 0.0)
        })?
        .normalized()?;
        let parts = exchange_decompose(&jsa)?;
        let w0 = two_photon_overlap(&jsa, &[0.0])?[0].re;
        let v = visibility(&hom_fringe(&jsa, &delays)?)?;
        println!("  {:.2}  {:.3}  {:+.4}  {:?} V = {:.3}", theta, parts.antisymmetric_fraction, w0, v.kind, v.value);
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
