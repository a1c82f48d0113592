//! Dense complex linear algebra: singular values, Schur-based eigensolves,
//! eigenvector conditioning and the `SpectralOperand` wrapper consumed by the
//! detectors.

use alloc::string::ToString;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Schur, SVD};
use num_complex::Complex64;

use crate::error::{bail, Error, Result};

pub type C64 = Complex64;

/// Relative slack used when checking `‖A‖ ≤ 1` and Hermiticity.
pub const TOL_NORM: f64 = 1e-10;
/// Condition number above which an eigenvector basis is treated as singular.
pub const DEFECTIVE_COND: f64 = 1e12;

/// Eigenvalue agreement tolerance for an `n × n` problem.
pub fn tol_eig(n: usize) -> f64 {
    1e-8 * n.max(1) as f64
}

const SVD_EPS: f64 = 1e-15;

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            bail!(InvalidMatrix, "matrix is {}x{}, expected square", m.nrows(), m.ncols());
        }
        if m.nrows() == 0 {
            bail!(InvalidMatrix, "empty matrix");
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            bail!(InvalidMatrix, "non-finite entry");
        }
        Ok(CMatrix(m))
    }

    /// Builds an `n × n` matrix from row-major entries.
    pub fn from_rows(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            bail!(InvalidMatrix, "expected {} entries, got {}", n * n, entries.len());
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn scaled(&self, s: f64) -> CMatrix {
        CMatrix(&self.0 * C64::new(s, 0.0))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// Row-major entries.
    pub fn to_rows(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }
}

fn svd(m: DMatrix<C64>, vectors: bool) -> Result<SVD<C64, nalgebra::Dyn, nalgebra::Dyn>> {
    SVD::try_new(m, false, vectors, SVD_EPS, 0).ok_or(Error::DecompositionFailure("svd did not converge"))
}

pub fn singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let s = svd(m.clone(), false)?;
    let mut v: Vec<f64> = s.singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m.as_matrix())?[0])
}

fn shifted(m: &DMatrix<C64>, mu: C64) -> DMatrix<C64> {
    let mut b = m.clone();
    for i in 0..b.nrows() {
        b[(i, i)] -= mu;
    }
    b
}

/// `σ_min(A − μI)` by a full SVD.
pub fn sigma_min_of(m: &CMatrix, mu: C64) -> Result<f64> {
    let sv = singular_values(&shifted(m.as_matrix(), mu))?;
    Ok(*sv.last().unwrap())
}

/// Complex Schur form `A = Q T Q†` with `T` upper triangular.
pub fn schur(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let s = Schur::try_new(m.clone(), f64::EPSILON, 0).ok_or(Error::DecompositionFailure("schur did not converge"))?;
    let (q, mut t) = s.unpack();
    let n = t.nrows();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

/// Eigenvalues plus unit-norm right eigenvectors (as columns).
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: DMatrix<C64>,
}

fn triangular_eigenvectors(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let tnorm = t.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut y = DMatrix::zeros(n, n);
    for k in 0..n {
        let lk = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lk;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    y
}

pub fn eigen(m: &CMatrix) -> Result<Eigen> {
    let (q, t) = schur(m.as_matrix())?;
    let values = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    let mut vectors = q * triangular_eigenvectors(&t);
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 && nrm.is_finite() {
            col /= C64::new(nrm, 0.0);
        }
    }
    Ok(Eigen { values, vectors })
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let (_, t) = schur(m.as_matrix())?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

fn condition(m: &DMatrix<C64>) -> Result<f64> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Ok(f64::INFINITY);
    }
    let sv = singular_values(m)?;
    let lo = *sv.last().unwrap();
    Ok(if lo > 0.0 { sv[0] / lo } else { f64::INFINITY })
}

/// Condition number of the unit-column eigenvector matrix; a computable upper
/// estimate for the Jordan condition of a diagonalizable matrix.
pub fn jordan_condition_estimate(m: &CMatrix) -> Result<f64> {
    let e = eigen(m)?;
    let c = condition(&e.vectors)?;
    if !(c <= DEFECTIVE_COND) {
        return Err(Error::DefectiveMatrix(c));
    }
    Ok(c.max(1.0))
}

pub(crate) fn check_state(psi: &[C64], n: usize) -> Result<()> {
    if psi.len() != n {
        bail!(InvalidState, "state has length {}, operand dimension is {}", psi.len(), n);
    }
    if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        bail!(InvalidState, "non-finite amplitude");
    }
    let nrm = libm::sqrt(psi.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if (nrm - 1.0).abs() > 1e-8 {
        bail!(InvalidState, "state norm {nrm} is not 1");
    }
    Ok(())
}

/// `‖Π_ε ψ‖` where `Π_ε` projects onto right singular vectors of `A − μI` with
/// singular value at most `eps`.
pub fn low_sv_overlap(m: &CMatrix, mu: C64, eps: f64, psi: &[C64]) -> Result<f64> {
    check_state(psi, m.dim())?;
    let s = svd(shifted(m.as_matrix(), mu), true)?;
    let vt = s.v_t.as_ref().ok_or(Error::DecompositionFailure("missing singular vectors"))?;
    let psi = DVector::from_column_slice(psi);
    let proj = vt * psi;
    let mut acc = 0.0;
    for (j, &sv) in s.singular_values.iter().enumerate() {
        if sv <= eps {
            acc += proj[j].norm_sqr();
        }
    }
    Ok(libm::sqrt(acc))
}

/// Singular values of `A − μI` with the matching right singular vectors as
/// rows of `v_adj` (i.e. `v_adj[j] = v_j†`).
pub(crate) fn shifted_svd(m: &DMatrix<C64>, mu: C64, scale: f64) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let mut b = shifted(m, mu);
    if scale != 1.0 {
        b /= C64::new(scale, 0.0);
    }
    let s = svd(b, true)?;
    let vt = s.v_t.ok_or(Error::DecompositionFailure("missing singular vectors"))?;
    Ok((s.singular_values.iter().copied().collect(), vt))
}

pub(crate) use check_state as validate_state;

/// How expensive one block-encoding query of the operand is, when known.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockEncodingModel {
    pub gates_per_query: Option<f64>,
}

/// A matrix with `‖A‖ ≤ 1` together with the spectral promises the search
/// drivers rely on.
#[derive(Clone, Debug)]
pub struct SpectralOperand {
    matrix: CMatrix,
    k_bound: f64,
    m_max: u32,
    scale: f64,
    pub block_encoding: BlockEncodingModel,
    eigenvalues: Vec<C64>,
    schur_t: DMatrix<C64>,
    eig_cond: Option<f64>,
}

impl SpectralOperand {
    /// Wraps `matrix`, rescaling it by `1/‖A‖` when its norm exceeds one.
    pub fn new(matrix: CMatrix, k_bound: f64, m_max: u32) -> Result<Self> {
        if !(k_bound >= 1.0) || !k_bound.is_finite() {
            bail!(InvalidArgument, "k_bound must be finite and >= 1, got {k_bound}");
        }
        if m_max == 0 {
            return Err(Error::InvalidArgument("m_max must be >= 1".to_string()));
        }
        let norm = spectral_norm(&matrix)?;
        let (matrix, scale) = if norm > 1.0 + TOL_NORM { (matrix.scaled(1.0 / norm), norm) } else { (matrix, 1.0) };
        let (q, t) = schur(matrix.as_matrix())?;
        let eigenvalues: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
        let mut v = q * triangular_eigenvectors(&t);
        for mut col in v.column_iter_mut() {
            let nrm = col.norm();
            col /= C64::new(nrm, 0.0);
        }
        let eig_cond = match condition(&v)? {
            c if c <= DEFECTIVE_COND => Some(c.max(1.0)),
            _ => None,
        };
        Ok(SpectralOperand { matrix, k_bound, m_max, scale, block_encoding: BlockEncodingModel::default(), eigenvalues, schur_t: t, eig_cond })
    }

    /// Uses `jordan_condition_estimate` for `K` and assumes a diagonalizable
    /// matrix.
    pub fn with_estimated_k(matrix: CMatrix) -> Result<Self> {
        let op = Self::new(matrix, 1.0, 1)?;
        match op.eig_cond {
            Some(c) => Ok(SpectralOperand { k_bound: c, ..op }),
            None => Err(Error::DefectiveMatrix(f64::INFINITY)),
        }
    }

    pub fn with_block_encoding(mut self, gates_per_query: f64) -> Self {
        self.block_encoding.gates_per_query = Some(gates_per_query);
        self
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }
    pub fn m_max(&self) -> u32 {
        self.m_max
    }
    /// Factor by which the input was divided on ingestion (1 if untouched).
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn norm_certified(&self) -> bool {
        true
    }
    /// Eigenvalues of the stored (possibly rescaled) matrix, from its Schur
    /// form.
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }
    /// Condition number of the computed eigenvector basis, `None` when it is
    /// numerically singular.
    pub fn eigenvector_condition(&self) -> Option<f64> {
        self.eig_cond
    }
    pub fn qubits(&self) -> u32 {
        usize::BITS - (self.dim().max(2) - 1).leading_zeros()
    }

    /// Largest threshold `ν(r)` such that a positive detection at `ν(r)`
    /// certifies an eigenvalue within `r`.
    pub fn nu(&self, r: f64) -> f64 {
        if self.m_max == 1 {
            r / (2.0 * self.k_bound)
        } else {
            libm::pow(r / 3.0, self.m_max as f64) / (2.0 * self.k_bound)
        }
    }

    pub fn sigma_min(&self, mu: C64) -> Result<f64> {
        sigma_min_of(&self.matrix, mu)
    }

    /// Decides `σ_min(A − μI) ≤ threshold`. Cheap certified bounds are tried
    /// first; the SVD runs only when they are inconclusive.
    pub fn sigma_min_at_most(&self, mu: C64, threshold: f64) -> Result<bool> {
        let d = self.eigenvalues.iter().map(|l| (l - mu).norm()).fold(f64::INFINITY, f64::min);
        if d <= threshold {
            return Ok(true);
        }
        if let Some(c) = self.eig_cond {
            if d / (c * (1.0 + 1e-6)) - 1e-12 > threshold {
                return Ok(false);
            }
        }
        if let Some(lower) = self.triangular_lower_bound(mu, threshold) {
            if lower > threshold * (1.0 + 1e-9) {
                return Ok(false);
            }
        }
        Ok(self.sigma_min(mu)? <= threshold)
    }

    // 1/‖(T − μI)^{-1}‖_F ≤ σ_min. Gives up (None) as soon as the bound drops
    // below the threshold.
    fn triangular_lower_bound(&self, mu: C64, threshold: f64) -> Option<f64> {
        let t = &self.schur_t;
        let n = t.nrows();
        let cap = 1.0 / (threshold * threshold);
        let mut fro = 0.0;
        let mut x = alloc::vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let djj = t[(j, j)] - mu;
            if djj.norm() == 0.0 {
                return None;
            }
            x[j] = djj.inv();
            fro += x[j].norm_sqr();
            for i in (0..j).rev() {
                let mut s = C64::new(0.0, 0.0);
                for k in i + 1..=j {
                    s += t[(i, k)] * x[k];
                }
                x[i] = -s / (t[(i, i)] - mu);
                fro += x[i].norm_sqr();
            }
            if !(fro < cap) {
                return None;
            }
        }
        Some(1.0 / libm::sqrt(fro))
    }
}
