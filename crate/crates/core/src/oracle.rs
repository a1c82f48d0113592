//! Dense eigensolver reference for checking the search drivers on small
//! instances.

use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::{eigenvalues, CMatrix, C64};

/// Eigenvalues closer than this to the largest modulus are treated as lying
/// on the outer circle.
pub const MODULUS_TIE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Sorted by real part, then imaginary part.
    pub spectrum: Vec<C64>,
    /// `min |Im λ|`.
    pub line_gap: f64,
    /// `min |λ|`.
    pub point_gap: f64,
    /// `max |Im λ|`.
    pub max_abs_im: f64,
    /// Absolute gap, present when the input is row-stochastic.
    pub abs_gap: Option<f64>,
}

pub fn oracle_solve(m: &CMatrix) -> Result<OracleResult> {
    let mut spectrum = eigenvalues(m)?;
    spectrum.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let line_gap = spectrum.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min);
    let point_gap = spectrum.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let max_abs_im = spectrum.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let abs_gap = if is_row_stochastic(m) { Some(absolute_gap(&spectrum)) } else { None };
    Ok(OracleResult { spectrum, line_gap, point_gap, max_abs_im, abs_gap })
}

pub fn is_row_stochastic(m: &CMatrix) -> bool {
    let n = m.dim();
    (0..n).all(|i| {
        let row: Vec<C64> = (0..n).map(|j| m.get(i, j)).collect();
        row.iter().all(|z| z.im.abs() <= 1e-12 && z.re >= -1e-12) && (row.iter().map(|z| z.re).sum::<f64>() - 1.0).abs() <= 1e-10
    })
}

/// `|λ_max| − max{|λ| : |λ| ≠ |λ_max|}`; zero when every eigenvalue sits on
/// the outer circle.
pub fn absolute_gap(spectrum: &[C64]) -> f64 {
    let top = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let second = spectrum.iter().map(|z| z.norm()).filter(|&r| r < top - MODULUS_TIE).fold(f64::NEG_INFINITY, f64::max);
    if second.is_finite() {
        top - second
    } else {
        0.0
    }
}

/// Liouvillian gap: `min |Re λ|` over eigenvalues farther than `tol` from the
/// imaginary axis.
pub fn liouvillian_gap(spectrum: &[C64], tol: f64) -> f64 {
    spectrum.iter().map(|z| z.re.abs()).filter(|&r| r > tol).fold(f64::INFINITY, f64::min)
}
