//! Polynomial filters: a certified Chebyshev approximation of a smoothed
//! window that is close to 1 below a threshold and close to 0 above twice the
//! threshold, and a low-degree sign approximation used by the BQP map.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{bail, Result};
use crate::linalg::{self, CMatrix, C64};

pub const MAX_DEGREE: usize = 100_000;
pub const DEFAULT_GRID: usize = 2048;
/// The certified failure level is `δ / CERT_MARGIN`.
pub const CERT_MARGIN: f64 = 1.05;

/// Chebyshev coefficients (`f ≈ Σ c_k T_k`) of `f` interpolated at the `d+1`
/// Chebyshev points of the first kind.
pub fn chebyshev_interpolant(f: impl Fn(f64) -> f64, degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let period = 4 * n;
    let table: Vec<f64> = (0..period).map(|m| libm::cos(PI * m as f64 / (2 * n) as f64)).collect();
    let vals: Vec<f64> = (0..n).map(|j| f(table[2 * j + 1])).collect();
    let mut c = vec![0.0; n];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        let mut idx = k % period;
        let step = (2 * k) % period;
        for v in &vals {
            s += v * table[idx];
            idx += step;
            if idx >= period {
                idx -= period;
            }
        }
        *ck = 2.0 * s / n as f64;
    }
    c[0] *= 0.5;
    c
}

/// Same as [`chebyshev_interpolant`] for an even `f`: odd coefficients are
/// zero and the node sum folds in half.
pub fn chebyshev_interpolant_even(f: impl Fn(f64) -> f64, degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let period = 4 * n;
    let table: Vec<f64> = (0..period).map(|m| libm::cos(PI * m as f64 / (2 * n) as f64)).collect();
    let half = n / 2;
    let mut vals: Vec<f64> = (0..half).map(|j| 2.0 * f(table[2 * j + 1])).collect();
    if n % 2 == 1 {
        vals.push(f(0.0));
    }
    let mut c = vec![0.0; n];
    for k in (0..n).step_by(2) {
        let mut s = 0.0;
        let mut idx = k % period;
        let step = (2 * k) % period;
        for v in &vals {
            s += v * table[idx];
            idx += step;
            if idx >= period {
                idx -= period;
            }
        }
        c[k] = 2.0 * s / n as f64;
    }
    c[0] *= 0.5;
    c
}

pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// Smallest `s` with `erfc(s) ≤ y`, by bisection.
fn erfc_inv(y: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 30.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if libm::erfc(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `[0, ε]`, value must lie in `[1−δ, 1]`.
    Pass,
    /// `(ε, 2ε]`, value must lie in `[0, 1]`.
    Transition,
    /// `(2ε, 1]`, value must lie in `[0, δ]`.
    Stop,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Pass => "pass",
            Branch::Transition => "transition",
            Branch::Stop => "stop",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub value: f64,
    pub branch: Branch,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    pub passed: bool,
    pub points: Vec<GridPoint>,
}

/// Grid points used to certify a filter with threshold `eps`.
pub fn certification_grid(eps: f64, grid: usize) -> Vec<(f64, Branch)> {
    let g = grid.max(2);
    let mut pts = Vec::with_capacity(3 * g);
    for i in 0..g {
        pts.push((eps * i as f64 / (g - 1) as f64, Branch::Pass));
    }
    for i in 1..=g {
        pts.push((eps + eps * i as f64 / g as f64, Branch::Transition));
    }
    for i in 1..=g {
        pts.push((2.0 * eps + (1.0 - 2.0 * eps) * i as f64 / g as f64, Branch::Stop));
    }
    pts
}

/// Polynomial of odd degree `d` on `[-1, 1]` that is in `[1−δ, 1]` on
/// `[0, ε]`, in `[0, 1]` on `(ε, 2ε]` and in `[0, δ]` on `(2ε, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFilter {
    eps_th: f64,
    delta: f64,
    coeffs: Vec<f64>,
}

impl PolyFilter {
    /// Builds and certifies on the default grid, doubling the degree until
    /// the certificate holds.
    pub fn new(eps_th: f64, delta: f64) -> Result<Self> {
        if !(eps_th > 0.0 && eps_th < 0.5) {
            bail!(InvalidArgument, "eps_th must lie in (0, 0.5), got {eps_th}");
        }
        if !(delta > 0.0 && delta < 0.5) {
            bail!(InvalidArgument, "delta must lie in (0, 0.5), got {delta}");
        }
        let s = erfc_inv(delta / 4.0);
        let k = 2.0 * s / eps_th;
        let c = 1.5 * eps_th;
        let window = |x: f64| 0.5 * (libm::erf(k * (x + c)) - libm::erf(k * (x - c)));
        let lift = 1.0 - delta / 2.0;
        let mut degree = 7;
        loop {
            let mut coeffs = chebyshev_interpolant_even(window, degree);
            for v in coeffs.iter_mut() {
                *v *= lift;
            }
            coeffs[0] += delta / 4.0;
            let f = PolyFilter { eps_th, delta, coeffs };
            if f.certify_quick(DEFAULT_GRID) {
                return Ok(f);
            }
            degree = 2 * degree + 1;
            if degree > MAX_DEGREE {
                bail!(FilterSynthesisFailure, "no certified filter below degree {MAX_DEGREE} for eps_th={eps_th}, delta={delta}");
            }
        }
    }

    pub fn eps_th(&self) -> f64 {
        self.eps_th
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, x)
    }

    fn ok(&self, value: f64, branch: Branch) -> bool {
        let d = self.delta / CERT_MARGIN;
        match branch {
            Branch::Pass => (1.0 - d..=1.0).contains(&value),
            Branch::Transition => (0.0..=1.0).contains(&value),
            Branch::Stop => (0.0..=d).contains(&value),
        }
    }

    fn certify_quick(&self, grid: usize) -> bool {
        certification_grid(self.eps_th, grid).into_iter().all(|(x, b)| self.ok(self.eval(x), b))
    }

    pub fn certify(&self, grid: usize) -> Certification {
        let points: Vec<GridPoint> = certification_grid(self.eps_th, grid)
            .into_iter()
            .map(|(x, branch)| {
                let value = self.eval(x);
                GridPoint { x, value, branch, ok: self.ok(value, branch) }
            })
            .collect();
        Certification { passed: points.iter().all(|p| p.ok), points }
    }
}

/// `Poly(Ã)ψ` with `Ã = (A − μI)/(1+|μ|)`, the polynomial acting on the
/// singular values of `Ã`.
pub fn apply_filter_to_operand(m: &CMatrix, mu: C64, f: &PolyFilter, psi: &[C64]) -> Result<Vec<C64>> {
    linalg::validate_state(psi, m.dim())?;
    let n = m.dim();
    let mut b = m.as_matrix().clone();
    for i in 0..n {
        b[(i, i)] -= mu;
    }
    b /= C64::new(1.0 + mu.norm(), 0.0);
    let svd = nalgebra::SVD::try_new(b, true, true, 1e-15, 0).ok_or(crate::Error::DecompositionFailure("svd did not converge"))?;
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let coef = &vt * DVector::from_column_slice(psi);
    let mut out = DVector::zeros(n);
    for (j, &s) in svd.singular_values.iter().enumerate() {
        out += u.column(j) * (coef[j] * f.eval(s));
    }
    Ok(out.iter().copied().collect())
}

/// `‖Poly(Ã)ψ‖`, computed from singular values and right singular vectors
/// only.
/// `‖f((A − μI)/scale) ψ‖` via the SVD, with `scale ≥ ‖A − μI‖`.
pub(crate) fn filtered_norm(m: &CMatrix, mu: C64, scale: f64, f: &PolyFilter, psi: &[C64]) -> Result<f64> {
    let (sv, vt) = linalg::shifted_svd(m.as_matrix(), mu, scale)?;
    let coef = vt * DVector::from_column_slice(psi);
    let acc: f64 = sv
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let t = f.eval(s) * coef[j].norm();
            t * t
        })
        .sum();
    Ok(libm::sqrt(acc))
}

/// Right singular vector of `Ã` with the smallest singular value.
pub(crate) fn lowest_right_singular_vector(m: &CMatrix, mu: C64) -> Result<Vec<C64>> {
    let (sv, vt) = linalg::shifted_svd(m.as_matrix(), mu, 1.0)?;
    let j = (0..sv.len()).min_by(|&a, &b| sv[a].total_cmp(&sv[b])).unwrap();
    Ok(vt.row(j).iter().map(|z| z.conj()).collect())
}

/// Polynomial `f(x) = Σ α_j x^j` with `|f(x) − sign(x − (a+b)/2)| ≤ 2/3` on
/// `[0, a] ∪ [b, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignPoly {
    pub a: f64,
    pub b: f64,
    pub monomial: Vec<f64>,
}

pub const SIGN_TOLERANCE: f64 = 2.0 / 3.0;
const SIGN_MAX_DEGREE: usize = 400;

impl SignPoly {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            bail!(InvalidArgument, "need 0 <= a < b <= 1, got a={a}, b={b}");
        }
        if b - a < 1e-3 {
            bail!(FilterSynthesisFailure, "gap b-a={} is below 1e-3", b - a);
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for degree in 1..=SIGN_MAX_DEGREE {
            let mut best: Option<SignPoly> = None;
            for kh in [0.5, 0.7, 0.9, 1.2, 1.6, 2.0, 2.5, 3.0, 4.0] {
                let k = kh / half;
                let cheb = chebyshev_interpolant(|y| libm::erf(k * (0.5 * (y + 1.0) - mid)), degree);
                let monomial = cheb_to_monomial_unit(&cheb);
                if monomial.iter().any(|c| !c.is_finite()) {
                    continue;
                }
                let p = SignPoly { a, b, monomial };
                if p.max_grid_error(DEFAULT_GRID) <= SIGN_TOLERANCE / CERT_MARGIN
                    && best.as_ref().is_none_or(|q| p.coeff_l1() < q.coeff_l1())
                {
                    best = Some(p);
                }
            }
            if let Some(p) = best {
                return Ok(p);
            }
        }
        bail!(FilterSynthesisFailure, "no sign polynomial up to degree {SIGN_MAX_DEGREE} for a={a}, b={b}")
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.monomial.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.monomial.len() - 1
    }

    pub fn coeff_l1(&self) -> f64 {
        self.monomial.iter().map(|c| c.abs()).sum()
    }

    pub fn max_grid_error(&self, grid: usize) -> f64 {
        let mid = 0.5 * (self.a + self.b);
        let g = grid.max(2);
        let mut worst: f64 = 0.0;
        for i in 0..g {
            let t = i as f64 / (g - 1) as f64;
            for x in [self.a * t, self.b + (1.0 - self.b) * t] {
                let target = if x > mid { 1.0 } else { -1.0 };
                worst = worst.max((self.eval(x) - target).abs());
            }
        }
        worst
    }
}

// Chebyshev series in y = 2x − 1 to monomials in x.
fn cheb_to_monomial_unit(c: &[f64]) -> Vec<f64> {
    let d = c.len() - 1;
    let mut out = vec![0.0; d + 1];
    let mut t_prev = vec![0.0; d + 1];
    let mut t_cur = vec![0.0; d + 1];
    t_prev[0] = 1.0;
    out[0] += c[0];
    if d >= 1 {
        t_cur[0] = -1.0;
        t_cur[1] = 2.0;
        for i in 0..=d {
            out[i] += c[1] * t_cur[i];
        }
    }
    for &ck in c.iter().skip(2) {
        // T_{k+1} = 2(2x − 1)T_k − T_{k−1}
        let mut next = vec![0.0; d + 1];
        for i in 0..=d {
            next[i] -= 2.0 * t_cur[i] + t_prev[i];
            if i < d {
                next[i + 1] += 4.0 * t_cur[i];
            }
        }
        for i in 0..=d {
            out[i] += ck * next[i];
        }
        t_prev = core::mem::replace(&mut t_cur, next);
    }
    out
}
