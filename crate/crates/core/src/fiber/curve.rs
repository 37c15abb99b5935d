use std::f64::consts::PI;
use std::io::Read;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::units::{NM, PS, SPEED_OF_LIGHT};

pub const MAX_DEGREE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDelaySample {
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Group delay per unit length, s/m.
    pub delay: f64,
}

/// Group delay per unit length as a polynomial in wavelength.
///
/// Internally the polynomial is held in the scaled abscissa
/// `u = (λ − λ_ref)/scale` so that degree-6 fits stay well conditioned;
/// [`GroupDelayCurve::coefficients`] returns the unscaled form
/// `delay(λ) = Σ cₖ (λ − λ_ref)ᵏ` in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDelayCurve {
    scaled: Vec<f64>,
    reference: f64,
    scale: f64,
    valid_range: (f64, f64),
}

impl GroupDelayCurve {
    /// Builds a curve from SI coefficients `cₖ` (s/m per mᵏ).
    pub fn new(coefficients: &[f64], reference: f64, valid_range: (f64, f64)) -> Result<Self> {
        if coefficients.is_empty() || coefficients.len() > MAX_DEGREE + 1 {
            return Err(Error::param(format!(
                "group-delay polynomial needs 1..={} coefficients, got {}",
                MAX_DEGREE + 1,
                coefficients.len()
            )));
        }
        let (lo, hi) = valid_range;
        if !(lo > 0.0 && hi > lo && reference > 0.0) {
            return Err(Error::param("valid range must be a non-empty interval of positive wavelengths"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("group-delay coefficients must be finite"));
        }
        let scale = 0.5 * (hi - lo);
        let scaled = coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * scale.powi(k as i32))
            .collect();
        Ok(Self {
            scaled,
            reference,
            scale,
            valid_range,
        })
    }

    /// Constant group delay: dispersion-free fiber.
    pub fn constant(delay: f64, valid_range: (f64, f64)) -> Result<Self> {
        Self::new(&[delay], 0.5 * (valid_range.0 + valid_range.1), valid_range)
    }

    /// The bundled dispersion-managed PCF approximation.
    ///
    /// A hand-built degree-6 polynomial with its zero-dispersion wavelength
    /// near 1065 nm and equal group delay at 756 nm and 1512 nm. It mimics the
    /// shape of a measured PCF curve; it is not measurement data.
    pub fn bundled() -> Self {
        #[derive(Deserialize)]
        struct Bundled {
            reference_nm: f64,
            valid_range_nm: (f64, f64),
            coefficients_ps_per_m_per_nm_pow: Vec<f64>,
        }
        let raw: Bundled = serde_json::from_str(include_str!("../../data/pcf_group_delay.json"))
            .expect("bundled group-delay data parses");
        let si: Vec<f64> = raw
            .coefficients_ps_per_m_per_nm_pow
            .iter()
            .enumerate()
            .map(|(k, c)| c * PS / NM.powi(k as i32))
            .collect();
        Self::new(
            &si,
            raw.reference_nm * NM,
            (raw.valid_range_nm.0 * NM, raw.valid_range_nm.1 * NM),
        )
        .expect("bundled group-delay data is valid")
    }

    pub fn degree(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn valid_range(&self) -> (f64, f64) {
        self.valid_range
    }

    /// Unscaled SI coefficients `cₖ` about [`reference`](Self::reference).
    pub fn coefficients(&self) -> Vec<f64> {
        self.scaled
            .iter()
            .enumerate()
            .map(|(k, a)| a / self.scale.powi(k as i32))
            .collect()
    }

    pub fn contains(&self, wavelength: f64) -> bool {
        wavelength >= self.valid_range.0 && wavelength <= self.valid_range.1
    }

    fn check(&self, wavelength: f64) -> Result<()> {
        if self.contains(wavelength) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                wavelength_nm: wavelength / NM,
                min_nm: self.valid_range.0 / NM,
                max_nm: self.valid_range.1 / NM,
            })
        }
    }

    /// `order`-th derivative of the delay with respect to wavelength.
    pub fn derivative(&self, wavelength: f64, order: usize) -> Result<f64> {
        self.check(wavelength)?;
        let u = (wavelength - self.reference) / self.scale;
        let mut acc = 0.0;
        for k in (order..self.scaled.len()).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|j| j as f64).product();
            acc = acc * u + self.scaled[k] * falling;
        }
        Ok(acc / self.scale.powi(order as i32))
    }

    /// Group delay per unit length (s/m).
    pub fn delay(&self, wavelength: f64) -> Result<f64> {
        self.derivative(wavelength, 0)
    }

    /// Group velocity (m/s).
    pub fn group_velocity(&self, wavelength: f64) -> Result<f64> {
        Ok(1.0 / self.delay(wavelength)?)
    }
}

/// `dλ/dω` at wavelength `λ`.
fn dlambda_domega(wavelength: f64) -> f64 {
    -wavelength * wavelength / (2.0 * PI * SPEED_OF_LIGHT)
}

/// GVD parameter β₂ = d(delay)/dω in s²/m.
pub fn beta2_at(curve: &GroupDelayCurve, wavelength: f64) -> Result<f64> {
    Ok(curve.derivative(wavelength, 1)? * dlambda_domega(wavelength))
}

/// Third-order dispersion β₃ = d²(delay)/dω² in s³/m.
pub fn beta3_at(curve: &GroupDelayCurve, wavelength: f64) -> Result<f64> {
    let d1 = curve.derivative(wavelength, 1)?;
    let d2 = curve.derivative(wavelength, 2)?;
    let j = dlambda_domega(wavelength);
    let dj = -2.0 * wavelength / (2.0 * PI * SPEED_OF_LIGHT);
    Ok((d2 * j + d1 * dj) * j)
}

/// Least-squares fit of a group-delay curve and its residual RMS (s/m).
#[derive(Debug, Clone)]
pub struct DelayFit {
    pub curve: GroupDelayCurve,
    pub residual_rms: f64,
}

/// Least-squares polynomial fit of group-delay samples.
///
/// The abscissa is centered on the sample midpoint and scaled to `[−1, 1]`;
/// the solve goes through an SVD so rank loss is detected rather than
/// amplified.
pub fn fit_group_delay(samples: &[GroupDelaySample], degree: usize) -> Result<DelayFit> {
    if degree > MAX_DEGREE {
        return Err(Error::param(format!("degree {degree} exceeds {MAX_DEGREE}")));
    }
    if samples.len() < degree + 1 {
        return Err(Error::param(format!(
            "degree {degree} needs at least {} samples, got {}",
            degree + 1,
            samples.len()
        )));
    }
    if samples
        .iter()
        .any(|s| !(s.wavelength > 0.0) || !s.delay.is_finite())
    {
        return Err(Error::param("samples need positive wavelengths and finite delays"));
    }
    let mut sorted: Vec<f64> = samples.iter().map(|s| s.wavelength).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = (sorted[0], *sorted.last().unwrap());
    if sorted.windows(2).any(|w| w[1] - w[0] <= 1e-12 * hi) {
        return Err(Error::RankDeficient("duplicate wavelengths in samples".into()));
    }
    let reference = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);
    if !(scale > 0.0) {
        return Err(Error::RankDeficient("all samples share one wavelength".into()));
    }

    let m = samples.len();
    let design = DMatrix::from_fn(m, degree + 1, |i, k| {
        ((samples[i].wavelength - reference) / scale).powi(k as i32)
    });
    // the constant term dominates by many orders; fit the variation only
    let mean = samples.iter().map(|s| s.delay).sum::<f64>() / m as f64;
    let rhs = DVector::from_iterator(m, samples.iter().map(|s| s.delay - mean));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::RankDeficient(format!(
            "design matrix condition {:.3e}",
            smax / smin
        )));
    }
    let solution = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let residual = &design * &solution - &rhs;
    let residual_rms = (residual.norm_squared() / m as f64).sqrt();

    let mut scaled: Vec<f64> = solution.iter().cloned().collect();
    scaled[0] += mean;
    let curve = GroupDelayCurve {
        scaled,
        reference,
        scale,
        valid_range: (lo, hi),
    };
    Ok(DelayFit {
        curve,
        residual_rms,
    })
}

/// Reads `wavelength_nm,delay_ps_per_m` samples. A header row is required.
pub fn read_group_delay_csv(reader: impl Read) -> Result<Vec<GroupDelaySample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["wavelength_nm", "delay_ps_per_m"];
    if headers.len() != 2 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Csv(format!(
            "expected header `wavelength_nm,delay_ps_per_m`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|e| {
                Error::Csv(format!("line {}: column {}: {e}", row + 2, expected[i]))
            })
        };
        out.push(GroupDelaySample {
            wavelength: parse(0)? * NM,
            delay: parse(1)? * PS,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn samples_from(poly: &[f64], reference: f64, wavelengths: &[f64]) -> Vec<GroupDelaySample> {
        wavelengths
            .iter()
            .map(|&l| GroupDelaySample {
                wavelength: l,
                delay: poly
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * (l - reference).powi(k as i32))
                    .sum(),
            })
            .collect()
    }

    #[test]
    fn cubic_recovered() {
        let wl: Vec<f64> = (0..25).map(|i| (800.0 + 25.0 * i as f64) * NM).collect();
        let reference = 0.5 * (wl[0] + wl[24]);
        // every term contributes ~1e-10 s/m at the window edge, far above the
        // rounding floor of the 4.9e-9 s/m constant
        let poly = [4.9e-9, 3.0e-4, 1.0e3, -4.0e9];
        let fit = fit_group_delay(&samples_from(&poly, reference, &wl), 3).unwrap();
        assert_eq!(fit.curve.reference(), reference);
        for (a, b) in fit.curve.coefficients().iter().zip(poly) {
            assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn any_polynomial_round_trips(
            degree in 0usize..=6,
            weights in prop::collection::vec(0.2..1.0f64, 7),
            signs in prop::collection::vec(any::<bool>(), 7),
        ) {
            let half = 450.0 * NM;
            let reference = 1150.0 * NM;
            let wl: Vec<f64> = (0..31).map(|i| reference - half + 30.0 * NM * i as f64).collect();
            let poly: Vec<f64> = (0..=degree)
                .map(|k| {
                    let mag = if k == 0 { 4.9e-9 } else { 1e-10 * weights[k] / half.powi(k as i32) };
                    if signs[k] { mag } else { -mag }
                })
                .collect();
            let fit = fit_group_delay(&samples_from(&poly, reference, &wl), degree).unwrap();
            for (a, b) in fit.curve.coefficients().iter().zip(&poly) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs(), "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn two_points_make_a_line() {
        let s = [
            GroupDelaySample { wavelength: 1.0e-6, delay: 4.0e-9 },
            GroupDelaySample { wavelength: 1.2e-6, delay: 5.0e-9 },
        ];
        let fit = fit_group_delay(&s, 1).unwrap();
        assert!((fit.curve.delay(1.0e-6).unwrap() - 4.0e-9).abs() < 1e-22);
        assert!((fit.curve.delay(1.2e-6).unwrap() - 5.0e-9).abs() < 1e-22);
        assert!((fit.curve.delay(1.1e-6).unwrap() - 4.5e-9).abs() < 1e-22);
    }

    #[test]
    fn fit_rejections() {
        let s = [
            GroupDelaySample { wavelength: 1.0e-6, delay: 4.0e-9 },
            GroupDelaySample { wavelength: 1.0e-6, delay: 4.1e-9 },
            GroupDelaySample { wavelength: 1.1e-6, delay: 4.2e-9 },
        ];
        assert!(matches!(fit_group_delay(&s, 1), Err(Error::RankDeficient(_))));
        assert!(fit_group_delay(&s[..2], 2).is_err());
        assert!(fit_group_delay(&s, 7).is_err());
    }

    #[test]
    fn evaluation_outside_range_fails() {
        let c = GroupDelayCurve::bundled();
        assert!(matches!(c.delay(600e-9), Err(Error::OutOfRange { .. })));
        assert!(beta2_at(&c, 1700e-9).is_err());
    }

    #[test]
    fn beta2_of_line_and_constant() {
        let slope = 2.0e-5; // s/m per m
        let c = GroupDelayCurve::new(&[4.9e-9, slope], 1.1e-6, (0.7e-6, 1.6e-6)).unwrap();
        let lam = 1.3e-6;
        let expect = slope * (-lam * lam / (2.0 * PI * SPEED_OF_LIGHT));
        assert!((beta2_at(&c, lam).unwrap() - expect).abs() < 1e-12 * expect.abs());
        let k = GroupDelayCurve::constant(4.9e-9, (0.7e-6, 1.6e-6)).unwrap();
        assert_eq!(beta2_at(&k, lam).unwrap(), 0.0);
        assert_eq!(beta3_at(&k, lam).unwrap(), 0.0);
    }

    #[test]
    fn beta3_matches_finite_difference_of_beta2() {
        let c = GroupDelayCurve::bundled();
        let lam = 1.2e-6;
        let w = 2.0 * PI * SPEED_OF_LIGHT / lam;
        let h = 1e10;
        let b2 = |w: f64| beta2_at(&c, 2.0 * PI * SPEED_OF_LIGHT / w).unwrap();
        let fd = (b2(w + h) - b2(w - h)) / (2.0 * h);
        let b3 = beta3_at(&c, lam).unwrap();
        assert!((fd - b3).abs() < 1e-5 * b3.abs(), "{fd} vs {b3}");
    }

    #[test]
    fn bundled_curve_matches_at_octave() {
        let c = GroupDelayCurve::bundled();
        assert_eq!(c.degree(), 6);
        let d = c.delay(756e-9).unwrap() - c.delay(1512e-9).unwrap();
        assert!(d.abs() < 1e-4 * PS);
        // anomalous dispersion at 1512 nm, normal at 756 nm
        assert!(beta2_at(&c, 1512e-9).unwrap() < 0.0);
        assert!(beta2_at(&c, 756e-9).unwrap() > 0.0);
    }

    #[test]
    fn csv_ingest() {
        let text = "wavelength_nm,delay_ps_per_m\n800,4900.5\n900, 4899.0\n";
        let s = read_group_delay_csv(text.as_bytes()).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[1].wavelength - 900e-9).abs() < 1e-20);
        assert!((s[1].delay - 4899.0e-12).abs() < 1e-20);

        assert!(read_group_delay_csv("800,4900\n900,4899\n".as_bytes()).is_err());
        let bad = "wavelength_nm,delay_ps_per_m\n800,abc\n";
        let err = read_group_delay_csv(bad.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn bundled_samples_fit_back() {
        let text = include_str!("../../data/pcf_group_delay_samples.csv");
        let s = read_group_delay_csv(text.as_bytes()).unwrap();
        let fit = fit_group_delay(&s, 6).unwrap();
        // samples carry ~0.002 ps/m of synthetic scatter
        assert!(fit.residual_rms < 0.01 * PS);
        let b = GroupDelayCurve::bundled();
        let lam = 1300e-9;
        assert!((fit.curve.delay(lam).unwrap() - b.delay(lam).unwrap()).abs() < 0.01 * PS);
    }
}
