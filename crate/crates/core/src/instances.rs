//! Random test instances: operands with prescribed spectra, Jordan blocks,
//! Hermitian matrices and reversible Markov chains.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use crate::linalg::{CMatrix, C64};

pub fn normal_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
}

fn cgauss<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(normal_sample(rng), normal_sample(rng)) * core::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix scaled by `1/√n`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let s = 1.0 / libm::sqrt(n as f64);
    CMatrix::new(DMatrix::from_fn(n, n, |_, _| cgauss(rng) * s)).unwrap()
}

/// Haar-distributed unitary via QR with phase correction.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| cgauss(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn normal_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[C64]) -> CMatrix {
    let n = spectrum.len();
    let u = unitary(rng, n);
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { spectrum[i] } else { C64::new(0.0, 0.0) });
    CMatrix::new(&u * d * u.adjoint()).unwrap()
}

/// `V diag(spectrum) V⁻¹` with `V = I + perturbation·G/‖G‖_F`, so the
/// eigenvector condition stays near `(1+p)/(1-p)`.
pub fn similar_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[C64], perturbation: f64) -> CMatrix {
    let n = spectrum.len();
    let g = DMatrix::from_fn(n, n, |_, _| cgauss(rng));
    let gn = g.norm();
    let v = DMatrix::identity(n, n) + g * C64::new(perturbation / gn.max(1e-300), 0.0);
    let vinv = v.clone().try_inverse().expect("perturbation below one keeps V invertible");
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { spectrum[i] } else { C64::new(0.0, 0.0) });
    CMatrix::new(v * d * vinv).unwrap()
}

/// Uniform point in the disk of the given radius.
pub fn disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> C64 {
    let r = radius * libm::sqrt(rng.random::<f64>());
    C64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

/// Random spectrum in a disk plus a mild similarity transform.
pub fn mildly_non_normal<R: Rng + ?Sized>(rng: &mut R, n: usize, perturbation: f64) -> CMatrix {
    let spec: Vec<C64> = (0..n).map(|_| disk_point(rng, 0.8)).collect();
    similar_with_spectrum(rng, &spec, perturbation)
}

/// `λI + cN` (single Jordan block with superdiagonal `c`) rotated by a random
/// unitary.
pub fn jordan_chain<R: Rng + ?Sized>(rng: &mut R, size: usize, lambda: C64, c: f64) -> CMatrix {
    let u = unitary(rng, size);
    let j = jordan_block(size, lambda, c);
    CMatrix::new(&u * j.as_matrix() * u.adjoint()).unwrap()
}

pub fn jordan_block(size: usize, lambda: C64, c: f64) -> CMatrix {
    let j = DMatrix::from_fn(size, size, |i, k| {
        if i == k {
            lambda
        } else if k == i + 1 {
            C64::new(c, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    CMatrix::new(j).unwrap()
}

/// Condition of the Jordan basis `diag(1, 1/c, …, 1/c^{m-1})` for
/// `jordan_block(m, λ, c)`.
pub fn jordan_block_condition(size: usize, c: f64) -> f64 {
    let lo = c.min(1.0);
    let hi = c.max(1.0);
    libm::pow(hi / lo, (size - 1) as f64)
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| cgauss(rng)).collect();
    let nrm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    v.into_iter().map(|z| z / nrm).collect()
}

/// Hermitian matrix `U diag(eigs) U†`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, eigs: &[f64]) -> CMatrix {
    let spec: Vec<C64> = eigs.iter().map(|&e| C64::new(e, 0.0)).collect();
    let m = normal_with_spectrum(rng, &spec).into_matrix();
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    CMatrix::new(h).unwrap()
}

/// Metropolis chain on `n` states with random target weights in
/// `[1, weight_ratio]` and random symmetric proposal graph; reversible by
/// construction.
pub fn reversible_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, weight_ratio: f64) -> CMatrix {
    let pi: Vec<f64> = (0..n).map(|_| 1.0 + (weight_ratio - 1.0) * rng.random::<f64>()).collect();
    let mut q = alloc::vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < 0.6 || j == i + 1 {
                let w = rng.random::<f64>();
                q[i * n + j] = w;
                q[j * n + i] = w;
            }
        }
    }
    let deg = (0..n).map(|i| (0..n).map(|j| q[i * n + j]).sum::<f64>()).fold(0.0f64, f64::max) * 1.25;
    let mut p = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            if i != j {
                let v = q[i * n + j] / deg * (pi[j] / pi[i]).min(1.0);
                p[(i, j)] = C64::new(v, 0.0);
                row += v;
            }
        }
        p[(i, i)] = C64::new(1.0 - row, 0.0);
    }
    CMatrix::new(p).unwrap()
}
