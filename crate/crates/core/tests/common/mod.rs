#![allow(dead_code)]

use std::f64::consts::PI;

use photon_reshape::biphoton::JointSpectralAmplitude;
use photon_reshape::units::{angular_frequency, THZ};
use photon_reshape::{Complex64, SampledGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points over `±half_thz` about 1512 nm.
pub fn sgrid(n: usize, half_thz: f64) -> SampledGrid {
    SampledGrid::frequency_span(n, 2.0 * PI * half_thz * THZ, angular_frequency(1512e-9)).unwrap()
}

pub fn random_jsa(n: usize, seed: u64) -> JointSpectralAmplitude {
    let g = sgrid(n, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    JointSpectralAmplitude::new(g, g, data).unwrap().normalized().unwrap()
}

/// Random amplitude with a random mix of exchange-symmetric and
/// antisymmetric parts and a smooth random envelope.
pub fn random_structured_jsa(n: usize, rng: &mut ChaCha8Rng) -> JointSpectralAmplitude {
    let g = sgrid(n, 2.0);
    let mix: f64 = rng.random_range(0.0..1.0);
    let w = g.spacing() * n as f64 / 8.0;
    let c1: f64 = rng.random_range(-1.0..1.0) * w;
    let c2: f64 = rng.random_range(-1.0..1.0) * w;
    let chirp: f64 = rng.random_range(-3.0..3.0) / (w * w);
    let noise: Vec<Complex64> = (0..n * n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let base = JointSpectralAmplitude::from_fn(g, g, |a, b| {
        let env = (-((a - c1) / w).powi(2) - ((b - c2) / w).powi(2)).exp();
        Complex64::from_polar(env, chirp * a * b)
    })
    .unwrap();
    let data = (0..n * n)
        .map(|k| {
            let (s, i) = (k % n, k / n);
            let sym = base.get(s, i) + base.get(i, s);
            let anti = base.get(s, i) - base.get(i, s);
            (1.0 - mix) * sym + mix * anti + 0.05 * noise[k] * base.get(s, i).norm()
        })
        .collect();
    JointSpectralAmplitude::new(g, g, data).unwrap().normalized().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth random amplitude whose exchange correlation dies out well inside
/// half the delay period `π/dω` of the grid.
pub fn random_compact_jsa(n: usize, rng: &mut ChaCha8Rng) -> JointSpectralAmplitude {
    let g = sgrid(n, 2.0);
    let w = g.spacing() * n as f64 / 8.0;
    let ws = w * rng.random_range(0.6..1.0);
    let wi = w * rng.random_range(0.6..1.0);
    let c1: f64 = rng.random_range(-0.5..0.5) * w;
    let c2: f64 = rng.random_range(-0.5..0.5) * w;
    let chirp: f64 = rng.random_range(-1.0..1.0) / (w * w);
    let cubic: f64 = rng.random_range(-0.3..0.3) / (w * w * w);
    let mix: f64 = rng.random_range(0.0..1.0);
    let base = |a: f64, b: f64| {
        let env = (-((a - c1) / ws).powi(2) - ((b - c2) / wi).powi(2)).exp();
        Complex64::from_polar(env, chirp * a * b + cubic * a * a * b)
    };
    JointSpectralAmplitude::from_fn(g, g, |a, b| {
        (1.0 - mix) * (base(a, b) + base(b, a)) + mix * (base(a, b) - base(b, a)) + 0.3 * base(a, b)
    })
    .unwrap()
    .normalized()
    .unwrap()
}
