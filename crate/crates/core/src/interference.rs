//! Hong-Ou-Mandel interference of a photon pair at a balanced beam splitter.
//!
//! Rates are normalized so the distinguishable-photon plateau is 1:
//! `R(δτ) = 1 − Re W(δτ)` with
//! `W(δτ) = Σ S(ω₁,ω₂)·S*(ω₂,ω₁)·exp(i(ω₁−ω₂)δτ) / Σ|S|²`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::biphoton::{JointSpectralAmplitude, JointSpectralIntensity};
use crate::error::{Error, Result};

/// Slack allowed on `|W| ≤ 1` before it counts as a numerical failure.
pub const OVERLAP_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FringeKind {
    Dip,
    Bump,
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomFringe {
    /// s, strictly increasing.
    pub delays: Vec<f64>,
    pub rates: Vec<f64>,
    pub r_classical: f64,
    pub r_extremum: f64,
    pub kind: FringeKind,
}

/// Exchange correlation `Q[d] = Σ_{k₁−k₂=d} S(k₁,k₂)·S*(k₂,k₁)`, index `d + n − 1`.
struct ExchangeCorrelation {
    q: Vec<Complex64>,
    dw: f64,
    norm: f64,
}

impl ExchangeCorrelation {
    fn new(jsa: &JointSpectralAmplitude) -> Result<Self> {
        let (gs, gi) = (jsa.grid_s(), jsa.grid_i());
        if !gs.matches(gi) {
            return Err(Error::GridMismatch("interference needs identical signal and idler grids".into()));
        }
        let n = gs.n();
        let norm: f64 = jsa.data().iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) {
            return Err(Error::ZeroEnergy);
        }
        let mut q = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
        for k2 in 0..n {
            for k1 in 0..n {
                q[k1 + n - 1 - k2] += jsa.get(k1, k2) * jsa.get(k2, k1).conj();
            }
        }
        Ok(Self { q, dw: gs.spacing(), norm })
    }

    fn at(&self, delay: f64) -> Complex64 {
        let n = self.q.len().div_ceil(2);
        let step = Complex64::from_polar(1.0, self.dw * delay);
        // Horner in exp(i·dω·δτ), starting from the highest d
        let mut acc = Complex64::new(0.0, 0.0);
        for q in self.q.iter().rev() {
            acc = acc * step + q;
        }
        acc * Complex64::from_polar(1.0, -((n - 1) as f64) * self.dw * delay) / self.norm
    }
}

/// `W(δτ)` for each delay.
pub fn two_photon_overlap(jsa: &JointSpectralAmplitude, delays: &[f64]) -> Result<Vec<Complex64>> {
    let ec = ExchangeCorrelation::new(jsa)?;
    delays
        .iter()
        .map(|&d| {
            let w = ec.at(d);
            if w.norm() > 1.0 + OVERLAP_SLACK {
                Err(Error::Numerical(format!(
                    "|W({:.4} ps)| = {:.12} exceeds 1",
                    d * 1e12,
                    w.norm()
                )))
            } else {
                Ok(w)
            }
        })
        .collect()
}

/// Coincidence fringe over `delays`.
///
/// The plateau is the mean over the outer 10% of the delays. Whether the
/// fringe is a dip or a bump is read from the rate at the central delay;
/// the extremum is then the min or max over the inner 20%.
pub fn hom_fringe(jsa: &JointSpectralAmplitude, delays: &[f64]) -> Result<HomFringe> {
    if delays.len() < 3 {
        return Err(Error::param("a fringe needs at least 3 delays"));
    }
    if delays.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("fringe delays must be strictly increasing"));
    }
    let rates: Vec<f64> = two_photon_overlap(jsa, delays)?
        .into_iter()
        .map(|w| (1.0 - w.re).max(0.0))
        .collect();
    summarize(delays.to_vec(), rates)
}

fn summarize(delays: Vec<f64>, rates: Vec<f64>) -> Result<HomFringe> {
    let n = rates.len();
    let edge = (n / 20).max(1);
    let r_classical =
        (rates[..edge].iter().sum::<f64>() + rates[n - edge..].iter().sum::<f64>()) / (2 * edge) as f64;
    if !(r_classical > 0.0) {
        return Err(Error::Numerical("fringe plateau is zero".into()));
    }
    let mid = n / 2;
    let half = (n / 10).max(1);
    let inner = &rates[mid.saturating_sub(half)..(mid + half + 1).min(n)];
    let dev = rates[mid] - r_classical;
    let (kind, r_extremum) = if dev < 0.0 {
        (FringeKind::Dip, inner.iter().cloned().fold(f64::INFINITY, f64::min))
    } else if dev > 0.0 {
        (FringeKind::Bump, inner.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    } else {
        (FringeKind::Flat, r_classical)
    };
    Ok(HomFringe {
        delays,
        rates,
        r_classical,
        r_extremum,
        kind,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Visibility {
    pub value: f64,
    pub kind: FringeKind,
}

/// `V = |r_classical − r_extremum| / r_classical`.
pub fn visibility(fringe: &HomFringe) -> Result<Visibility> {
    if !(fringe.r_classical > 0.0) {
        return Err(Error::param("visibility needs a positive plateau"));
    }
    Ok(Visibility {
        value: (fringe.r_classical - fringe.r_extremum).abs() / fringe.r_classical,
        kind: fringe.kind,
    })
}

/// Phase-free bound `Σ√(J(ω₁,ω₂)·J(ω₂,ω₁)) / ΣJ` on the dip visibility.
pub fn jsi_visibility_bound(jsi: &JointSpectralIntensity) -> Result<f64> {
    if !jsi.grid_s.matches(&jsi.grid_i) {
        return Err(Error::GridMismatch("bound needs identical signal and idler grids".into()));
    }
    if jsi.values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::param("joint intensity must be non-negative"));
    }
    let total: f64 = jsi.values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let n = jsi.grid_s.n();
    let mut acc = 0.0;
    for i in 0..n {
        for s in 0..n {
            acc += (jsi.get(s, i) * jsi.get(i, s)).sqrt();
        }
    }
    Ok((acc / total).min(1.0))
}

/// Adds a flat accidental background `b = background_fraction·r_classical`:
/// `R′ = (R + b)/(1 + b)`.
pub fn add_accidentals(fringe: &HomFringe, background_fraction: f64) -> Result<HomFringe> {
    if !(background_fraction >= 0.0 && background_fraction.is_finite()) {
        return Err(Error::param("background fraction must be non-negative"));
    }
    let b = background_fraction * fringe.r_classical;
    let map = |r: f64| (r + b) / (1.0 + b);
    Ok(HomFringe {
        delays: fringe.delays.clone(),
        rates: fringe.rates.iter().map(|&r| map(r)).collect(),
        r_classical: map(fringe.r_classical),
        r_extremum: map(fringe.r_extremum),
        kind: fringe.kind,
    })
}

/// Inverse of [`add_accidentals`] for the same background fraction.
pub fn remove_accidentals(fringe: &HomFringe, background_fraction: f64) -> Result<HomFringe> {
    if !(background_fraction >= 0.0 && background_fraction.is_finite()) {
        return Err(Error::param("background fraction must be non-negative"));
    }
    let rc = fringe.r_classical / (1.0 + background_fraction * (1.0 - fringe.r_classical));
    let b = background_fraction * rc;
    let map = |r: f64| r * (1.0 + b) - b;
    Ok(HomFringe {
        delays: fringe.delays.clone(),
        rates: fringe.rates.iter().map(|&r| map(r)).collect(),
        r_classical: rc,
        r_extremum: map(fringe.r_extremum),
        kind: fringe.kind,
    })
}

/// `delay_ps,rate_normalized` rows.
pub fn write_fringe_csv<W: Write>(out: W, fringe: &HomFringe) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["delay_ps", "rate_normalized"])?;
    for (d, r) in fringe.delays.iter().zip(&fringe.rates) {
        w.write_record([format!("{:.6}", d * 1e12), format!("{:.12e}", r)])?;
    }
    w.flush()?;
    Ok(())
}
