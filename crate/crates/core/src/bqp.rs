//! Embedding of Hermitian ground-energy questions into spectrum-reality
//! questions for non-Hermitian matrices, and a covering-based decider for the
//! latter.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::covering::net_cover;
use crate::error::{bail, Result};
use crate::filter::SignPoly;
use crate::fqed::{Detector, FqedConfig, SerialDetector, StateSource};
use crate::linalg::{CMatrix, SpectralOperand, C64};
use crate::search::{project_to_unit_disk, Budget};

/// `C = 1 + Σ_j |α_j|` for the sign polynomial `f(x) = Σ α_j x^j`.
pub fn reduction_constant(sp: &SignPoly) -> f64 {
    1.0 + sp.coeff_l1()
}

/// `A = i C⁻¹ (I − f(H))`. Eigenvectors are those of `H`; an eigenvalue `x`
/// of `H` maps to `i (1 − f(x)) / C`.
pub fn bqp_reduction_map(h: &CMatrix, sp: &SignPoly) -> Result<SpectralOperand> {
    if !h.is_hermitian(1e-10) {
        bail!(InvalidArgument, "input matrix is not Hermitian");
    }
    let e = SymmetricEigen::new(h.as_matrix().clone());
    if let Some(x) = e.eigenvalues.iter().find(|&&x| !(-1e-10..=1.0 + 1e-10).contains(&x)) {
        bail!(InvalidArgument, "Hermitian eigenvalue {x} outside [0, 1]");
    }
    let c = reduction_constant(sp);
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|x| C64::new(0.0, (1.0 - sp.eval(x.clamp(0.0, 1.0))) / c)));
    let u = &e.eigenvectors;
    let a = u * d * u.adjoint();
    SpectralOperand::new(CMatrix::new(a)?, 1.0, 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealityDecision {
    /// True when some eigenvalue has `|Im λ| ≥ eps`; false when all have
    /// `|Im λ| ≤ eps/2`.
    pub complex: bool,
    /// Center that fired, if any.
    pub witness: Option<C64>,
    pub eps_th: f64,
    pub centers: usize,
    pub queries: u64,
}

/// Detection threshold and center spacing used by the decider.
pub fn reality_thresholds(k: f64, gamma: f64, eps: f64) -> (f64, f64) {
    let eps_th = 0.9 * eps / (4.0 * (k + gamma));
    (eps_th, eps_th * gamma)
}

/// Centers within `s` of every point of the unit disk with `|Im z| ≥ eps`,
/// all inside the unit disk and at height at least `eps − 2s`. Highest rows
/// first.
pub fn reality_centers(eps: f64, s: f64) -> Result<Vec<C64>> {
    let mut pts = project_to_unit_disk(net_cover(C64::new(0.0, 0.0), 1.0, s)?);
    pts.retain(|z| z.im.abs() >= eps - 2.0 * s);
    pts.sort_by(|a, b| b.im.abs().total_cmp(&a.im.abs()).then(a.re.total_cmp(&b.re)).then(b.im.total_cmp(&a.im)));
    Ok(pts)
}

/// Distinguishes `max |Im λ| ≥ eps` from `max |Im λ| ≤ eps/2`. With the
/// filtered backend the configured state must overlap an eigenvector of a
/// complex eigenvalue by at least `2γ` in the complex case.
pub fn decide_spectrum_reality_with(det: &dyn Detector, eps: f64, budget: Budget) -> Result<RealityDecision> {
    if !(eps > 0.0 && eps <= 1.0) {
        bail!(InvalidArgument, "eps must lie in (0, 1], got {eps}");
    }
    let op = det.operand();
    if op.m_max() != 1 {
        bail!(InvalidArgument, "spectrum-reality decision needs m_max = 1");
    }
    let (eps_th, s) = reality_thresholds(op.k_bound(), det.config().gamma, eps);
    let centers = reality_centers(eps, s)?;
    if centers.len() as u64 > budget.max_queries {
        bail!(BudgetExceeded, "{} centers exceed the query cap {}", centers.len(), budget.max_queries);
    }
    let mut queries = 0u64;
    for (stream, chunk) in centers.chunks(4096).enumerate() {
        let b = det.batch(chunk, eps_th, true, stream as u64)?;
        queries += b.outcomes.len() as u64;
        if let Some(i) = b.first_true {
            return Ok(RealityDecision { complex: true, witness: Some(chunk[i]), eps_th, centers: centers.len(), queries });
        }
    }
    Ok(RealityDecision { complex: false, witness: None, eps_th, centers: centers.len(), queries })
}

pub fn decide_spectrum_reality(op: &SpectralOperand, eps: f64, guide: &[C64], gamma: f64, cfg: FqedConfig) -> Result<RealityDecision> {
    let cfg = FqedConfig { gamma, state: StateSource::UserVector(guide.to_vec()), ..cfg };
    decide_spectrum_reality_with(&SerialDetector::new(op, cfg), eps, Budget::default())
}
