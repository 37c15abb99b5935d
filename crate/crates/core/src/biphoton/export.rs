use std::io::Write;

use super::{JointSpectralAmplitude, JointSpectralIntensity};
use crate::error::Result;
use crate::gridkit::SampledGrid;
use crate::units::wavelength;

fn axis_nm(grid: &SampledGrid) -> Vec<String> {
    (0..grid.n())
        .map(|k| format!("{:.6}", wavelength(grid.coordinate(k)) * 1e9))
        .collect()
}

/// One matrix: header row of signal wavelengths, then one row per idler
/// wavelength led by that wavelength.
fn write_matrix<W: Write>(
    out: W,
    grid_s: &SampledGrid,
    grid_i: &SampledGrid,
    value: impl Fn(usize, usize) -> f64,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["idler_nm\\signal_nm".to_string()];
    header.extend(axis_nm(grid_s));
    w.write_record(&header)?;
    for (i, lam_i) in axis_nm(grid_i).into_iter().enumerate() {
        let mut row = Vec::with_capacity(grid_s.n() + 1);
        row.push(lam_i);
        row.extend((0..grid_s.n()).map(|s| format!("{:.9e}", value(s, i))));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// JSI matrix with wavelength axes in nm.
pub fn write_jsi_csv<W: Write>(out: W, jsi: &JointSpectralIntensity) -> Result<()> {
    write_matrix(out, &jsi.grid_s, &jsi.grid_i, |s, i| jsi.get(s, i))
}

/// Real and imaginary parts of the JSA as two matrices in the JSI layout.
pub fn write_jsa_csv<W: Write>(real: W, imag: W, jsa: &JointSpectralAmplitude) -> Result<()> {
    write_matrix(real, jsa.grid_s(), jsa.grid_i(), |s, i| jsa.get(s, i).re)?;
    write_matrix(imag, jsa.grid_s(), jsa.grid_i(), |s, i| jsa.get(s, i).im)
}
