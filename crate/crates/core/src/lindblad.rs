//! Lindblad generators as sums of Pauli strings, their vectorized
//! superoperators, and Liouvillian-gap estimation on top of the line-gap
//! driver.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{bail, Error, Result};
use crate::fqed::{Detector, FqedConfig, SerialDetector};
use crate::linalg::{CMatrix, SpectralOperand, C64};
use crate::search::{line_gap, Budget, GapReport, GuessRegion, LineGapOptions};

/// Largest qubit count for which the dense superoperator is built.
pub const MAX_DENSE_QUBITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn index(self) -> u8 {
        self as u8
    }

    fn from_index(i: u8) -> Pauli {
        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i as usize]
    }

    /// `self · other = phase · result`.
    fn mul(self, other: Pauli) -> (C64, Pauli) {
        let (a, b) = (self.index(), other.index());
        if a == 0 {
            return (one(), other);
        }
        if b == 0 || a == b {
            return (one(), if a == b { Pauli::I } else { self });
        }
        let c = Pauli::from_index(6 - a - b);
        let cyclic = matches!((a, b), (1, 2) | (2, 3) | (3, 1));
        (if cyclic { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) }, c)
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    pub fn value(self) -> C64 {
        match self {
            Phase::PlusOne => C64::new(1.0, 0.0),
            Phase::MinusOne => C64::new(-1.0, 0.0),
            Phase::PlusI => C64::new(0.0, 1.0),
            Phase::MinusI => C64::new(0.0, -1.0),
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        match s {
            "+1" | "1" => Some(Phase::PlusOne),
            "-1" => Some(Phase::MinusOne),
            "+i" | "i" => Some(Phase::PlusI),
            "-i" => Some(Phase::MinusI),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::PlusOne => "+1",
            Phase::MinusOne => "-1",
            Phase::PlusI => "+i",
            Phase::MinusI => "-i",
        }
    }

    fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }
}

/// `coeff · phase · P_1 ⊗ … ⊗ P_n`, with `coeff ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub word: Vec<Pauli>,
    pub phase: Phase,
}

impl PauliTerm {
    pub fn new(coeff: f64, word: &str, phase: Phase) -> Result<Self> {
        let word = parse_word(word)?;
        Ok(PauliTerm { coeff, word, phase })
    }

    pub fn word_string(&self) -> String {
        self.word.iter().map(|p| p.as_char()).collect()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.coeff, self.phase.as_str(), self.word_string())
    }
}

pub fn parse_word(s: &str) -> Result<Vec<Pauli>> {
    s.chars()
        .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidArgument(alloc::format!("bad Pauli letter {c:?} in {s:?}"))))
        .collect()
}

/// `H = Σ_j α_j V_j` and `L_μ = Σ_j √α_{μ,j} V_{μ,j}` over Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladSpec {
    pub n: usize,
    pub hamiltonian: Vec<PauliTerm>,
    pub dissipators: Vec<Vec<PauliTerm>>,
}

impl LindbladSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 30 {
            bail!(InvalidArgument, "qubit count must lie in 1..=30, got {}", self.n);
        }
        let all = self.hamiltonian.iter().chain(self.dissipators.iter().flatten());
        for t in all {
            if t.word.len() != self.n {
                bail!(InvalidArgument, "Pauli word {} has length {}, expected {}", t.word_string(), t.word.len(), self.n);
            }
            if !(t.coeff > 0.0) || !t.coeff.is_finite() {
                bail!(InvalidArgument, "coefficients must be finite and > 0, got {}", t.coeff);
            }
        }
        if let Some(t) = self.hamiltonian.iter().find(|t| !t.phase.is_real()) {
            bail!(InvalidArgument, "Hamiltonian term {} has an imaginary phase", t.word_string());
        }
        if self.dissipators.iter().any(|d| d.is_empty()) {
            bail!(InvalidArgument, "empty dissipator");
        }
        Ok(())
    }

    /// `C = Σ α` over the Hamiltonian and all dissipators.
    pub fn normalization(&self) -> f64 {
        self.hamiltonian.iter().chain(self.dissipators.iter().flatten()).map(|t| t.coeff).sum()
    }

    pub fn hamiltonian_matrix(&self) -> DMatrix<C64> {
        let d = 1 << self.n;
        let mut h = DMatrix::zeros(d, d);
        for t in &self.hamiltonian {
            h += pauli_matrix(&t.word) * (t.phase.value() * t.coeff);
        }
        h
    }

    pub fn jump_matrices(&self) -> Vec<DMatrix<C64>> {
        let d = 1 << self.n;
        self.dissipators
            .iter()
            .map(|terms| {
                let mut l = DMatrix::zeros(d, d);
                for t in terms {
                    l += pauli_matrix(&t.word) * (t.phase.value() * libm::sqrt(t.coeff));
                }
                l
            })
            .collect()
    }

    /// `𝓛(ρ) = −i[H, ρ] + Σ_μ (L_μ ρ L_μ† − ½{L_μ†L_μ, ρ})`.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let h = self.hamiltonian_matrix();
        let mi = C64::new(0.0, -1.0);
        let mut out = (&h * rho - rho * &h) * mi;
        for l in self.jump_matrices() {
            let ld = l.adjoint();
            let ll = &ld * &l;
            out += &l * rho * &ld - (&ll * rho + rho * &ll) * C64::new(0.5, 0.0);
        }
        out
    }
}

/// Single-qubit dephasing `L = √η Z`.
pub fn dephasing(eta: f64) -> LindbladSpec {
    LindbladSpec { n: 1, hamiltonian: vec![], dissipators: vec![vec![PauliTerm { coeff: eta, word: vec![Pauli::Z], phase: Phase::PlusOne }]] }
}

/// Single-qubit depolarization: `L_P = √(η/3) P` for `P ∈ {X, Y, Z}`.
pub fn depolarization(eta: f64) -> LindbladSpec {
    let ch = |p| vec![PauliTerm { coeff: eta / 3.0, word: vec![p], phase: Phase::PlusOne }];
    LindbladSpec { n: 1, hamiltonian: vec![], dissipators: vec![ch(Pauli::X), ch(Pauli::Y), ch(Pauli::Z)] }
}

/// Single-qubit amplitude damping `L = √η |0⟩⟨1| = √(η/4) (X + iY)`.
pub fn damping(eta: f64) -> LindbladSpec {
    LindbladSpec {
        n: 1,
        hamiltonian: vec![],
        dissipators: vec![vec![
            PauliTerm { coeff: eta / 4.0, word: vec![Pauli::X], phase: Phase::PlusOne },
            PauliTerm { coeff: eta / 4.0, word: vec![Pauli::Y], phase: Phase::PlusI },
        ]],
    }
}

fn random_word<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Pauli> {
    (0..n).map(|_| Pauli::from_index(rng.random_range(0..4u8))).collect()
}

/// Random spec with a few Hamiltonian terms and one or two dissipators.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LindbladSpec {
    let phases = [Phase::PlusOne, Phase::MinusOne, Phase::PlusI, Phase::MinusI];
    let hamiltonian = (0..rng.random_range(1..=3))
        .map(|_| PauliTerm { coeff: 0.05 + 0.3 * rng.random::<f64>(), word: random_word(rng, n), phase: phases[rng.random_range(0..2)] })
        .collect();
    let dissipators = (0..rng.random_range(1..=2))
        .map(|_| {
            (0..rng.random_range(1..=3))
                .map(|_| PauliTerm { coeff: 0.05 + 0.3 * rng.random::<f64>(), word: random_word(rng, n), phase: phases[rng.random_range(0..4)] })
                .collect()
        })
        .collect();
    LindbladSpec { n, hamiltonian, dissipators }
}

/// Dense matrix of a Pauli string (first letter acts on the most
/// significant qubit).
pub fn pauli_matrix(word: &[Pauli]) -> DMatrix<C64> {
    let n = word.len();
    let d = 1usize << n;
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let (row, ph) = pauli_action(word, col);
        m[(row, col)] = ph;
    }
    m
}

// P|col⟩ = ph |row⟩
fn pauli_action(word: &[Pauli], col: usize) -> (usize, C64) {
    let n = word.len();
    let mut row = col;
    let mut ph = one();
    for (q, p) in word.iter().enumerate() {
        let bit = n - 1 - q;
        let b = (col >> bit) & 1;
        match p {
            Pauli::I => {}
            Pauli::X => row ^= 1 << bit,
            Pauli::Y => {
                row ^= 1 << bit;
                ph *= if b == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
            }
            Pauli::Z => {
                if b == 1 {
                    ph = -ph;
                }
            }
        }
    }
    (row, ph)
}

fn y_sign(word: &[Pauli]) -> f64 {
    if word.iter().filter(|&&p| p == Pauli::Y).count() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn word_product(a: &[Pauli], b: &[Pauli]) -> (C64, Vec<Pauli>) {
    let mut ph = one();
    let w = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let (p, r) = x.mul(y);
            ph *= p;
            r
        })
        .collect();
    (ph, w)
}

/// Block-encoding accounting for an LCU: `C_be = J · 2n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockEncodingCost {
    pub terms: usize,
    pub n: usize,
    pub c_be: f64,
}

/// `L̃ = C̃ Σ_j β_j u(j)` with `Σβ_j = 1`, acting on row-major `vec(ρ)`.
#[derive(Clone, Debug)]
pub struct VectorizedLiouvillian {
    pub n: usize,
    pub terms: Vec<PauliTerm>,
    pub c_tilde: f64,
    /// Dense `L̃` (unscaled), present for `n ≤ MAX_DENSE_QUBITS`.
    pub dense: Option<CMatrix>,
}

impl VectorizedLiouvillian {
    pub fn dense_matrix(&self) -> Result<&CMatrix> {
        self.dense.as_ref().ok_or_else(|| Error::DimensionTooLarge(alloc::format!("dense superoperator needs n <= {MAX_DENSE_QUBITS}, got {}", self.n)))
    }

    pub fn block_encoding_cost(&self) -> BlockEncodingCost {
        let j = self.terms.len();
        BlockEncodingCost { terms: j, n: self.n, c_be: (j * 2 * self.n) as f64 }
    }
}

pub fn modeled_block_encoding_cost(v: &VectorizedLiouvillian) -> BlockEncodingCost {
    v.block_encoding_cost()
}

/// Vectorizes `𝓛` into a merged Pauli-string LCU over `2n` qubits. Words
/// whose merged coefficient is complex contribute a real-phase and an
/// imaginary-phase term.
pub fn vectorize(spec: &LindbladSpec) -> Result<VectorizedLiouvillian> {
    spec.validate()?;
    let n = spec.n;
    let id: Vec<Pauli> = vec![Pauli::I; n];
    let mut acc: BTreeMap<Vec<Pauli>, C64> = BTreeMap::new();
    let mut add = |left: &[Pauli], right: &[Pauli], c: C64| {
        let mut w = Vec::with_capacity(2 * n);
        w.extend_from_slice(left);
        w.extend_from_slice(right);
        *acc.entry(w).or_insert(C64::new(0.0, 0.0)) += c;
    };
    let i = C64::new(0.0, 1.0);
    for t in &spec.hamiltonian {
        let v = t.phase.value() * t.coeff;
        add(&t.word, &id, -i * v);
        add(&id, &t.word, i * v * y_sign(&t.word));
    }
    for d in &spec.dissipators {
        for a in d {
            for b in d {
                let s = libm::sqrt(a.coeff * b.coeff);
                // L ⊗ L*
                add(&a.word, &b.word, a.phase.value() * b.phase.value().conj() * s * y_sign(&b.word));
                // L†L = Σ conj(v_a) v_b P_a P_b
                let (ph, w) = word_product(&a.word, &b.word);
                let c = a.phase.value().conj() * b.phase.value() * ph * s;
                add(&w, &id, -c * 0.5);
                add(&id, &w, -c * 0.5 * y_sign(&w));
            }
        }
    }
    let mut raw: Vec<PauliTerm> = Vec::new();
    for (word, c) in acc {
        let tol = 1e-14;
        if c.re.abs() > tol {
            raw.push(PauliTerm { coeff: c.re.abs(), word: word.clone(), phase: if c.re > 0.0 { Phase::PlusOne } else { Phase::MinusOne } });
        }
        if c.im.abs() > tol {
            raw.push(PauliTerm { coeff: c.im.abs(), word, phase: if c.im > 0.0 { Phase::PlusI } else { Phase::MinusI } });
        }
    }
    let c_tilde: f64 = raw.iter().map(|t| t.coeff).sum();
    if !(c_tilde > 0.0) {
        bail!(InvalidArgument, "Liouvillian vanishes");
    }
    let dense = (n <= MAX_DENSE_QUBITS).then(|| materialize(2 * n, &raw));
    let terms = raw.into_iter().map(|t| PauliTerm { coeff: t.coeff / c_tilde, ..t }).collect();
    Ok(VectorizedLiouvillian { n, terms, c_tilde, dense })
}

fn materialize(qubits: usize, terms: &[PauliTerm]) -> CMatrix {
    let d = 1usize << qubits;
    let mut m = DMatrix::zeros(d, d);
    for t in terms {
        let c = t.phase.value() * t.coeff;
        for col in 0..d {
            let (row, ph) = pauli_action(&t.word, col);
            m[(row, col)] += c * ph;
        }
    }
    CMatrix::new(m).expect("finite entries")
}

/// Row-major `vec(ρ)`.
pub fn vec_row_major(rho: &DMatrix<C64>) -> Vec<C64> {
    let (r, c) = rho.shape();
    (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| rho[(i, j)]).collect()
}

/// The line-gap operand `−i L̃ / C̃`: Liouvillian eigenvalues `λ` map to
/// `−iλ/C̃`, so decay rates become heights above the real axis.
pub fn liouvillian_operand(v: &VectorizedLiouvillian, m_max: Option<u32>, k_bound: Option<f64>) -> Result<SpectralOperand> {
    let l = v.dense_matrix()?;
    let a = CMatrix::new(l.as_matrix() * C64::new(0.0, -1.0 / v.c_tilde))?;
    let op = match (k_bound, m_max) {
        (Some(k), m) => SpectralOperand::new(a, k, m.unwrap_or(1))?,
        (None, None | Some(1)) => SpectralOperand::with_estimated_k(a)?,
        (None, Some(m)) => {
            let k = crate::linalg::jordan_condition_estimate(&a).unwrap_or(1.0);
            SpectralOperand::new(a, k.max(1.0), m)?
        }
    };
    Ok(op.with_block_encoding(v.block_encoding_cost().c_be))
}

/// Liouvillian gap from a detector on `liouvillian_operand`, reported in the
/// original units. Eigenvalues within `eps/2` of the imaginary axis are not
/// counted.
pub fn liouvillian_gap_with(det: &dyn Detector, c_tilde: f64, eps: f64, budget: Budget) -> Result<GapReport> {
    if !(eps > 0.0 && eps < 1.0) {
        bail!(InvalidArgument, "eps must lie in (0, 1), got {eps}");
    }
    let scaled = eps / c_tilde;
    let opts = LineGapOptions { both_half_planes: false, axis_exclusion: scaled / 2.0, budget };
    let mut r = line_gap(det, scaled, &opts)?;
    let up = |g: GuessRegion| match g {
        GuessRegion::Interval { lo, hi } => GuessRegion::Interval { lo: lo * c_tilde, hi: hi * c_tilde },
        other => other,
    };
    r.value *= c_tilde;
    // back to a Liouvillian eigenvalue location: λ = i C̃ μ
    r.estimate = C64::new(0.0, c_tilde) * r.estimate;
    r.region = up(r.region);
    for row in &mut r.trace {
        row.region = up(row.region);
    }
    Ok(r)
}

pub fn liouvillian_gap(spec: &LindbladSpec, eps: f64, cfg: FqedConfig) -> Result<GapReport> {
    spec.validate()?;
    if spec.dissipators.is_empty() {
        bail!(PromiseViolation, "no dissipators: the spectrum is purely imaginary");
    }
    let v = vectorize(spec)?;
    let op = liouvillian_operand(&v, None, None)?;
    liouvillian_gap_with(&SerialDetector::new(&op, cfg), v.c_tilde, eps, Budget::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::oracle::{liouvillian_gap as oracle_gap, oracle_solve};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_density<R: Rng>(rng: &mut R, d: usize) -> DMatrix<C64> {
        let g = instances::gaussian(rng, d).into_matrix();
        let p = &g * g.adjoint();
        let tr = p.trace();
        p / tr
    }

    fn check_identity(spec: &LindbladSpec, rng: &mut ChaCha8Rng, states: usize) {
        let v = vectorize(spec).unwrap();
        let l = v.dense_matrix().unwrap().as_matrix();
        for _ in 0..states {
            let rho = random_density(rng, 1 << spec.n);
            let lhs = vec_row_major(&spec.apply(&rho));
            let x = nalgebra::DVector::from_vec(vec_row_major(&rho));
            let rhs = l * x;
            for (a, b) in lhs.iter().zip(rhs.iter()) {
                assert!((a - b).norm() <= 1e-10, "{a} vs {b}");
            }
        }
    }

    fn term(v: &VectorizedLiouvillian, w: &str) -> Vec<(f64, Phase)> {
        v.terms.iter().filter(|t| t.word_string() == w).map(|t| (t.coeff * v.c_tilde, t.phase)).collect()
    }

    #[test]
    fn pauli_products() {
        assert_eq!(Pauli::X.mul(Pauli::Y), (C64::new(0.0, 1.0), Pauli::Z));
        assert_eq!(Pauli::Z.mul(Pauli::Y), (C64::new(0.0, -1.0), Pauli::X));
        let x = pauli_matrix(&[Pauli::X]);
        let y = pauli_matrix(&[Pauli::Y]);
        let z = pauli_matrix(&[Pauli::Z]);
        assert_eq!(&x * &y, &z * C64::new(0.0, 1.0));
        assert_eq!(y[(1, 0)], C64::new(0.0, 1.0));
    }

    #[test]
    fn dephasing_terms() {
        let v = vectorize(&dephasing(0.25)).unwrap();
        assert_eq!(v.terms.len(), 2);
        assert_eq!(term(&v, "ZZ"), [(0.25, Phase::PlusOne)]);
        assert_eq!(term(&v, "II"), [(0.25, Phase::MinusOne)]);
        assert_eq!(v.block_encoding_cost().c_be, 4.0);
    }

    #[test]
    fn depolarization_terms() {
        let v = vectorize(&depolarization(0.3)).unwrap();
        assert_eq!(v.terms.len(), 4);
        let close = |t: Vec<(f64, Phase)>, c: f64, p: Phase| t.len() == 1 && (t[0].0 - c).abs() < 1e-15 && t[0].1 == p;
        assert!(close(term(&v, "XX"), 0.1, Phase::PlusOne));
        // vec(YρY) = (Y ⊗ Y*) vec ρ = −(Y ⊗ Y) vec ρ
        assert!(close(term(&v, "YY"), 0.1, Phase::MinusOne));
        assert!(close(term(&v, "ZZ"), 0.1, Phase::PlusOne));
        assert!(close(term(&v, "II"), 0.3, Phase::MinusOne));
    }

    #[test]
    fn vectorization_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in [dephasing(0.25), depolarization(0.4), damping(0.2)] {
            check_identity(&spec, &mut rng, 5);
        }
        for n in 1..=3 {
            for _ in 0..4 {
                let spec = random_spec(&mut rng, n);
                check_identity(&spec, &mut rng, 5);
            }
        }
    }

    #[test]
    fn trace_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=3 {
            let spec = random_spec(&mut rng, n);
            let l = vectorize(&spec).unwrap().dense.unwrap().into_matrix();
            let d = 1 << n;
            let vid = nalgebra::DVector::from_vec(vec_row_major(&DMatrix::<C64>::identity(d, d)));
            let left = vid.adjoint() * l;
            assert!(left.iter().all(|z| z.norm() <= 1e-10));
        }
    }

    #[test]
    fn merged_terms_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = vectorize(&random_spec(&mut rng, 2)).unwrap();
        let mut keys: Vec<(String, bool)> = v.terms.iter().map(|t| (t.word_string(), t.phase.is_real())).collect();
        let before = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(before, keys.len());
        assert!((v.terms.iter().map(|t| t.coeff).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_phase_checked() {
        let spec = LindbladSpec { n: 1, hamiltonian: vec![PauliTerm::new(0.2, "X", Phase::PlusI).unwrap()], dissipators: vec![] };
        assert!(spec.validate().is_err());
        assert!(PauliTerm::new(1.0, "XQ", Phase::PlusOne).is_err());
    }

    #[test]
    fn dense_cap() {
        let spec = LindbladSpec { n: 7, hamiltonian: vec![PauliTerm::new(0.5, "XXXXXXX", Phase::PlusOne).unwrap()], dissipators: vec![] };
        let v = vectorize(&spec).unwrap();
        assert!(!v.terms.is_empty());
        assert!(matches!(v.dense_matrix(), Err(Error::DimensionTooLarge(_))));
    }

    #[test]
    fn dephasing_gap() {
        let r = liouvillian_gap(&dephasing(0.25), 0.01, FqedConfig::default()).unwrap();
        assert!((r.value - 0.5).abs() <= 0.01, "{}", r.value);
    }

    #[test]
    fn damping_gap() {
        let spec = damping(0.2);
        let v = vectorize(&spec).unwrap();
        let spec_l = oracle_solve(v.dense_matrix().unwrap()).unwrap().spectrum;
        let g = oracle_gap(&spec_l, 0.005);
        assert!((g - 0.1).abs() < 1e-10);
        let r = liouvillian_gap(&spec, 0.01, FqedConfig::default()).unwrap();
        assert!((r.value - g).abs() <= 0.01);
    }

    #[test]
    fn unitary_spec_rejected() {
        let spec = LindbladSpec { n: 1, hamiltonian: vec![PauliTerm::new(0.5, "X", Phase::PlusOne).unwrap()], dissipators: vec![] };
        assert!(matches!(liouvillian_gap(&spec, 0.01, FqedConfig::default()), Err(Error::PromiseViolation(_))));
    }

    #[test]
    fn random_two_qubit_gaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let spec = random_spec(&mut rng, 2);
            let v = vectorize(&spec).unwrap();
            let g = oracle_gap(&oracle_solve(v.dense_matrix().unwrap()).unwrap().spectrum, 0.005);
            let r = liouvillian_gap(&spec, 0.01, FqedConfig::default()).unwrap();
            assert!((r.value - g).abs() <= 0.01, "{} vs {g}", r.value);
        }
    }
}
