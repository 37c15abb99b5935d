//! Physical constants and unit conversions.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const PS: f64 = 1e-12;
pub const NM: f64 = 1e-9;
pub const THZ: f64 = 1e12;

/// Angular frequency (rad/s) of a vacuum wavelength (m).
pub fn angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

/// Vacuum wavelength (m) of an angular frequency (rad/s).
pub fn wavelength(angular_frequency: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / angular_frequency
}

/// Converts a wavelength interval around `center` into an angular-frequency interval.
pub fn wavelength_width_to_angular(center: f64, width: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * width / (center * center)
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
pub fn to_hz(angular: f64) -> f64 {
    angular / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        let lam = 1512e-9;
        assert!((wavelength(angular_frequency(lam)) - lam).abs() < 1e-21);
    }

    #[test]
    fn small_interval_matches_derivative() {
        let (c, w) = (1512e-9, 1e-12);
        let exact = angular_frequency(c - w / 2.0) - angular_frequency(c + w / 2.0);
        assert!((wavelength_width_to_angular(c, w) - exact).abs() / exact < 1e-6);
    }
}
