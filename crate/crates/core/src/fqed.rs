//! Fuzzy quantum eigenvalue detection: decide whether `C(μ) = σ_min(A − μI)`
//! is small (`≤ ε_th`) or large (`> 2ε_th`), with anything in between allowed
//! to go either way.

use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{bail, Result};
use crate::filter::{self, PolyFilter};
use crate::linalg::{validate_state, SpectralOperand, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Decide by `σ_min(A − μI) ≤ 1.5 ε_th`.
    Exact,
    /// Apply a certified filter to the singular values and threshold the
    /// resulting amplitude.
    Filtered,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSource {
    /// Right singular vector of `Ã` for its smallest singular value.
    SingularVectorOracle,
    UserVector(Vec<C64>),
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Noise {
    Deterministic,
    /// Amplitude estimated from Bernoulli(a²) shots.
    Sampled { shots: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FqedConfig {
    pub backend: Backend,
    pub gamma: f64,
    /// Per-query failure probability.
    pub delta: f64,
    pub state: StateSource,
    pub noise: Noise,
    pub seed: u64,
}

impl Default for FqedConfig {
    fn default() -> Self {
        FqedConfig { backend: Backend::Exact, gamma: 1.0, delta: 1e-6, state: StateSource::SingularVectorOracle, noise: Noise::Deterministic, seed: 0 }
    }
}

impl FqedConfig {
    pub fn filtered(gamma: f64, delta: f64, state: StateSource) -> Self {
        FqedConfig { backend: Backend::Filtered, gamma, delta, state, ..Default::default() }
    }

    /// Spreads a run-wide failure budget over `planned_queries` detections.
    pub fn with_global_delta(mut self, delta: f64, planned_queries: u64) -> Self {
        self.delta = delta / planned_queries.max(1) as f64;
        self
    }

    pub fn repetitions(&self) -> u64 {
        libm::ceil(libm::log(1.0 / self.delta) / self.gamma).max(1.0) as u64
    }

    /// Amplitude level at or above which the filtered backend answers True.
    pub fn amplitude_threshold(&self) -> f64 {
        self.gamma * (1.0 - self.delta) / 2.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            bail!(InvalidArgument, "gamma must lie in (0, 1], got {}", self.gamma);
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            bail!(InvalidArgument, "delta must lie in (0, 0.5), got {}", self.delta);
        }
        if let Noise::Sampled { shots: 0 } = self.noise {
            bail!(InvalidArgument, "sampled mode needs at least one shot");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FqedOutcome {
    pub verdict: bool,
    /// Filter amplitude (filtered backend only).
    pub amplitude: Option<f64>,
    pub queries_be: u64,
    pub queries_sp: u64,
}

/// Seed for the `index`-th center of batch `stream`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ stream) ^ index)
}

fn check_eps(eps_th: f64) -> Result<()> {
    if !(eps_th > 0.0 && eps_th <= 0.5) {
        bail!(InvalidArgument, "eps_th must lie in (0, 0.5], got {eps_th}");
    }
    Ok(())
}

/// Steps per octave of the filter threshold grid.
const LEVELS_PER_OCTAVE: f64 = 16.0;

/// Grid index `j` of the filter used at `(ε_th, μ)`: the filter threshold
/// `θ_j = 2^(-j/16)` is the largest grid value not above `ε_th/(1+|μ|)`, and
/// the shifted matrix is normalized by `ε_th/θ_j ≥ 1+|μ|`, so the pass and
/// stop edges land exactly on `ε_th` and `2ε_th`.
pub fn filter_level(eps_th: f64, mu: C64) -> i64 {
    libm::ceil(-LEVELS_PER_OCTAVE * libm::log2(eps_th / (1.0 + mu.norm()))) as i64
}

pub fn level_threshold(level: i64) -> f64 {
    libm::exp2(-(level as f64) / LEVELS_PER_OCTAVE)
}

fn filtered(op: &SpectralOperand, mu: C64, eps_th: f64, f: &PolyFilter, cfg: &FqedConfig, seed: u64) -> Result<FqedOutcome> {
    let m = op.matrix();
    let psi = match &cfg.state {
        StateSource::SingularVectorOracle => filter::lowest_right_singular_vector(m, mu)?,
        StateSource::UserVector(v) => {
            validate_state(v, op.dim())?;
            v.clone()
        }
        StateSource::Uniform => {
            let s = 1.0 / libm::sqrt(op.dim() as f64);
            alloc::vec![C64::new(s, 0.0); op.dim()]
        }
    };
    let scale = eps_th / f.eps_th();
    let amp = filter::filtered_norm(m, mu, scale, f, &psi)? / (1.0 + mu.norm());
    let threshold = cfg.amplitude_threshold();
    let verdict = match cfg.noise {
        Noise::Deterministic => amp >= threshold,
        Noise::Sampled { shots } => {
            let p = (amp * amp).min(1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hits = (0..shots).filter(|_| rng.random::<f64>() < p).count() as f64;
            let cut = 0.5 * (threshold * threshold + cfg.delta * cfg.delta);
            hits / shots as f64 >= cut
        }
    };
    let reps = cfg.repetitions();
    Ok(FqedOutcome { verdict, amplitude: Some(amp), queries_be: f.degree() as u64 * reps, queries_sp: reps })
}

/// One detection at center `mu` with threshold `eps_th`.
pub fn fqed(op: &SpectralOperand, mu: C64, eps_th: f64, cfg: &FqedConfig) -> Result<FqedOutcome> {
    let b = fqed_batch(op, &[mu], eps_th, cfg, false, 0)?;
    Ok(b.outcomes.into_iter().next().unwrap())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Batch {
    /// Outcomes in center order; shorter than the input when evaluation
    /// stopped at the first True.
    pub outcomes: Vec<FqedOutcome>,
    pub first_true: Option<usize>,
}

/// Filters keyed by threshold level and failure probability, kept across
/// batches. Oldest entries are dropped past a fixed capacity.
#[derive(Clone, Debug, Default)]
pub struct FilterCache {
    entries: VecDeque<((i64, u64), Arc<PolyFilter>)>,
}

impl FilterCache {
    const CAPACITY: usize = 96;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Filter used for center `mu` at threshold `eps_th`.
    pub fn get(&mut self, eps_th: f64, mu: C64, delta: f64) -> Result<Arc<PolyFilter>> {
        let level = filter_level(eps_th, mu);
        let key = (level, delta.to_bits());
        if let Some((_, f)) = self.entries.iter().find(|(k, _)| *k == key) {
            return Ok(f.clone());
        }
        let f = Arc::new(PolyFilter::new(level_threshold(level), delta)?);
        if self.entries.len() >= Self::CAPACITY {
            self.entries.pop_front();
        }
        self.entries.push_back((key, f.clone()));
        Ok(f)
    }
}

/// Runs the detector on every center (or up to the first True when
/// `early_exit`).
pub fn fqed_batch(op: &SpectralOperand, centers: &[C64], eps_th: f64, cfg: &FqedConfig, early_exit: bool, stream: u64) -> Result<Batch> {
    fqed_batch_cached(op, centers, eps_th, cfg, early_exit, stream, 0, &mut FilterCache::new())
}

/// As `fqed_batch`, for a slice starting at position `offset` of a larger
/// batch (seeds follow the global position), drawing filters from `cache`.
#[allow(clippy::too_many_arguments)]
pub fn fqed_batch_cached(
    op: &SpectralOperand,
    centers: &[C64],
    eps_th: f64,
    cfg: &FqedConfig,
    early_exit: bool,
    stream: u64,
    offset: u64,
    cache: &mut FilterCache,
) -> Result<Batch> {
    check_eps(eps_th)?;
    cfg.validate()?;
    let mut out = Batch::default();
    for (idx, &mu) in centers.iter().enumerate() {
        let o = match cfg.backend {
            Backend::Exact => {
                let verdict = op.sigma_min_at_most(mu, 1.5 * eps_th)?;
                FqedOutcome { verdict, amplitude: None, queries_be: 0, queries_sp: 0 }
            }
            Backend::Filtered => {
                let f = cache.get(eps_th, mu, cfg.delta)?;
                filtered(op, mu, eps_th, &f, cfg, derive_seed(cfg.seed, stream, offset + idx as u64))?
            }
        };
        let hit = o.verdict;
        out.outcomes.push(o);
        if hit && out.first_true.is_none() {
            out.first_true = Some(idx);
            if early_exit {
                break;
            }
        }
    }
    Ok(out)
}

/// Something that can answer batches of detection queries for one operand.
pub trait Detector {
    fn operand(&self) -> &SpectralOperand;
    fn config(&self) -> &FqedConfig;
    fn batch(&self, centers: &[C64], eps_th: f64, early_exit: bool, stream: u64) -> Result<Batch>;
}

/// Evaluates batches one center at a time, reusing filters between
/// batches.
#[derive(Debug)]
pub struct SerialDetector<'a> {
    op: &'a SpectralOperand,
    cfg: FqedConfig,
    cache: RefCell<FilterCache>,
}

impl<'a> SerialDetector<'a> {
    pub fn new(op: &'a SpectralOperand, cfg: FqedConfig) -> Self {
        SerialDetector { op, cfg, cache: RefCell::new(FilterCache::new()) }
    }
}

impl Detector for SerialDetector<'_> {
    fn operand(&self) -> &SpectralOperand {
        self.op
    }
    fn config(&self) -> &FqedConfig {
        &self.cfg
    }
    fn batch(&self, centers: &[C64], eps_th: f64, early_exit: bool, stream: u64) -> Result<Batch> {
        fqed_batch_cached(self.op, centers, eps_th, &self.cfg, early_exit, stream, 0, &mut self.cache.borrow_mut())
    }
}

/// Query and modeled gate accounting accumulated over a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModeledCost {
    pub invocations: u64,
    pub queries_be: u64,
    pub queries_sp: u64,
    /// `Σ 1/ε_th` over all invocations.
    pub sum_inv_eps: f64,
    pub gamma: f64,
    pub qubits: u32,
    pub gates_per_query: Option<f64>,
}

impl ModeledCost {
    pub fn new(op: &SpectralOperand, cfg: &FqedConfig) -> Self {
        ModeledCost { gamma: cfg.gamma, qubits: op.qubits(), gates_per_query: op.block_encoding.gates_per_query, ..Default::default() }
    }

    pub fn record(&mut self, eps_th: f64, batch: &Batch) {
        for o in &batch.outcomes {
            self.invocations += 1;
            self.queries_be += o.queries_be;
            self.queries_sp += o.queries_sp;
            self.sum_inv_eps += 1.0 / eps_th;
        }
    }

    /// `γ⁻¹ Σ ε_th⁻¹ (C_be + n)` when the block-encoding cost is known.
    pub fn gate_estimate(&self) -> Option<f64> {
        self.gates_per_query.map(|c| self.sum_inv_eps * (c + self.qubits as f64) / self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::linalg::{low_sv_overlap, CMatrix};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exact_examples() {
        let op = SpectralOperand::new(CMatrix::from_diagonal(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap(), 1.0, 1).unwrap();
        let cfg = FqedConfig::default();
        assert!(fqed(&op, c(0.5, 0.01), 0.02, &cfg).unwrap().verdict);
        assert!(!fqed(&op, c(0.0, 0.0), 0.1, &cfg).unwrap().verdict);
        assert!(fqed(&op, c(0.0, 0.0), 0.0, &cfg).is_err());
    }

    #[test]
    fn gamma_out_of_range() {
        let op = SpectralOperand::new(CMatrix::identity(2), 1.0, 1).unwrap();
        let cfg = FqedConfig { gamma: 1.5, ..Default::default() };
        assert!(matches!(fqed(&op, c(0.0, 0.0), 0.1, &cfg), Err(crate::Error::InvalidArgument(_))));
    }

    #[test]
    fn filtered_query_accounting() {
        let op = SpectralOperand::new(CMatrix::from_diagonal(&[c(0.3, 0.0), c(0.9, 0.0)]).unwrap(), 1.0, 1).unwrap();
        let cfg = FqedConfig::filtered(0.5, 0.01, StateSource::SingularVectorOracle);
        let o = fqed(&op, c(0.3, 0.0), 0.05, &cfg).unwrap();
        assert!(o.verdict);
        let f = PolyFilter::new(0.05 / 1.3, 0.01).unwrap();
        assert_eq!(o.queries_be, f.degree() as u64 * cfg.repetitions());
        assert_eq!(cfg.repetitions(), libm::ceil(libm::log(100.0) / 0.5) as u64);
    }

    #[test]
    fn seeds_differ_by_index() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_eq!(derive_seed(7, 3, 2), derive_seed(7, 3, 2));
    }

    // Backends agree away from the fuzzy band (C ≤ ε_th or C > 2ε_th), and the
    // sampled mode agrees with the deterministic one except with small
    // probability.
    #[test]
    fn backends_agree_outside_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let eps = 0.06;
        let exact = FqedConfig::default();
        let det = FqedConfig::filtered(0.5, 0.01, StateSource::SingularVectorOracle);
        let shots = libm::ceil(64.0 / (0.5 * 0.5) * libm::log(2.0 / 0.01)) as u64;
        let mut sampled = det.clone();
        sampled.noise = Noise::Sampled { shots };
        let (mut trials, mut disagree) = (0u32, 0u32);
        while trials < 1000 {
            let n = 2 + (trials as usize % 5);
            let op = SpectralOperand::new(instances::mildly_non_normal(&mut rng, n, 0.2), 1.0, 1).unwrap();
            let lam = op.eigenvalues()[0];
            let mu = if trials % 2 == 0 { lam + instances::disk_point(&mut rng, 0.04) } else { instances::disk_point(&mut rng, 0.9) };
            let s = op.sigma_min(mu).unwrap();
            if s > eps && s <= 2.0 * eps {
                continue;
            }
            trials += 1;
            let a = fqed(&op, mu, eps, &exact).unwrap().verdict;
            let b = fqed(&op, mu, eps, &det).unwrap().verdict;
            assert_eq!(a, s <= eps);
            assert_eq!(a, b, "mu={mu} sigma={s}");
            let cfg = FqedConfig { seed: trials as u64, ..sampled.clone() };
            if fqed(&op, mu, eps, &cfg).unwrap().verdict != b {
                disagree += 1;
            }
        }
        assert!(disagree as f64 / 1000.0 <= 0.01, "{disagree}");
    }

    #[test]
    fn user_state_with_overlap_detects() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let op = SpectralOperand::new(instances::mildly_non_normal(&mut rng, 5, 0.1), 1.0, 1).unwrap();
        let mu = op.eigenvalues()[2] + c(0.003, 0.0);
        let psi = instances::random_state(&mut rng, 5);
        let ov = low_sv_overlap(op.matrix(), mu, 0.05, &psi).unwrap();
        let gamma = (ov * 0.99).min(1.0);
        let cfg = FqedConfig::filtered(gamma, 0.01, StateSource::UserVector(psi));
        assert!(fqed(&op, mu, 0.05, &cfg).unwrap().verdict);
    }
}
