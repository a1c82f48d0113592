//! Search drivers that turn detection queries into gap estimates: line gap,
//! point gap, eigenvalue search (complex and real), real-spectrum gap,
//! complex-eigenvalue witness and the Markov absolute gap.

use alloc::vec::Vec;

use crate::covering::{line_cover, net_cover, ring_cover};
use crate::error::{bail, Result};
use crate::fqed::{Detector, ModeledCost};
use crate::linalg::{singular_values, CMatrix, SpectralOperand, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GuessRegion {
    /// A bracket `[lo, hi]` on a scalar quantity.
    Interval { lo: f64, hi: f64 },
    /// Radii `[r_in, r_out]` of an annulus around the origin.
    Annulus { r_in: f64, r_out: f64 },
    Disk { center: C64, radius: f64 },
}

impl GuessRegion {
    pub fn lo(&self) -> f64 {
        match *self {
            GuessRegion::Interval { lo, .. } => lo,
            GuessRegion::Annulus { r_in, .. } => r_in,
            GuessRegion::Disk { radius, .. } => -radius,
        }
    }
    pub fn hi(&self) -> f64 {
        match *self {
            GuessRegion::Interval { hi, .. } => hi,
            GuessRegion::Annulus { r_out, .. } => r_out,
            GuessRegion::Disk { radius, .. } => radius,
        }
    }
    pub fn width(&self) -> f64 {
        self.hi() - self.lo()
    }
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo() - tol && x <= self.hi() + tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub index: u64,
    /// Region after this iteration's update.
    pub region: GuessRegion,
    pub covering_size: usize,
    pub verdict: bool,
    pub cumulative_queries: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    /// Location estimate: a detector center certified close to an eigenvalue.
    pub estimate: C64,
    /// Scalar estimate of the requested quantity.
    pub value: f64,
    /// Decision, for witness-style drivers.
    pub verdict: Option<bool>,
    pub region: GuessRegion,
    pub iterations: u64,
    pub cost: ModeledCost,
    pub trace: Vec<TraceRow>,
}

impl GapReport {
    pub fn fqed_queries(&self) -> u64 {
        self.cost.invocations
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub max_iterations: u64,
    pub max_queries: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_iterations: 1_000_000, max_queries: 10_000_000 }
    }
}

struct Run<'a> {
    det: &'a dyn Detector,
    budget: Budget,
    cost: ModeledCost,
    trace: Vec<TraceRow>,
    iterations: u64,
}

impl<'a> Run<'a> {
    fn new(det: &'a dyn Detector, budget: Budget) -> Self {
        Run { det, budget, cost: ModeledCost::new(det.operand(), det.config()), trace: Vec::new(), iterations: 0 }
    }

    fn op(&self) -> &SpectralOperand {
        self.det.operand()
    }

    /// First center (in order) answering True.
    fn probe(&mut self, centers: &[C64], eps_th: f64) -> Result<Option<C64>> {
        if self.iterations >= self.budget.max_iterations {
            bail!(BudgetExceeded, "iteration cap {} reached", self.budget.max_iterations);
        }
        let b = self.det.batch(centers, eps_th, true, self.trace.len() as u64)?;
        self.cost.record(eps_th, &b);
        if self.cost.invocations > self.budget.max_queries {
            bail!(BudgetExceeded, "query cap {} reached", self.budget.max_queries);
        }
        Ok(b.first_true.map(|i| centers[i]))
    }

    fn log(&mut self, region: GuessRegion, covering_size: usize, verdict: bool) {
        self.iterations += 1;
        self.trace.push(TraceRow { index: self.iterations - 1, region, covering_size, verdict, cumulative_queries: self.cost.invocations });
    }

    fn finish(self, estimate: C64, value: f64, verdict: Option<bool>, region: GuessRegion) -> GapReport {
        GapReport { estimate, value, verdict, region, iterations: self.iterations, cost: self.cost, trace: self.trace }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        bail!(InvalidArgument, "eps must lie in (0, 1), got {eps}");
    }
    Ok(())
}

fn require_diagonalizable(op: &SpectralOperand, what: &str) -> Result<()> {
    if op.m_max() != 1 {
        bail!(InvalidArgument, "{what} needs m_max = 1, got {}", op.m_max());
    }
    Ok(())
}

/// Moves points outside the unit disk horizontally onto the unit circle and
/// drops the duplicates this creates. For eigenvalues in the unit disk this
/// never increases the distance to the nearest center.
pub fn clip_to_unit_disk(points: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(points.len());
    for &p in points {
        let q = if p.norm() <= 1.0 {
            p
        } else if p.im.abs() >= 1.0 {
            C64::new(0.0, p.im.signum())
        } else {
            let edge = libm::sqrt(1.0 - p.im * p.im);
            C64::new(p.re.clamp(-edge, edge), p.im)
        };
        if !out.iter().rev().take(2).any(|&z| z == q) {
            out.push(q);
        }
    }
    out
}

/// Radial projection onto the closed unit disk (non-expansive), keeping the
/// first occurrence of duplicates.
pub(crate) fn project_to_unit_disk(points: Vec<C64>) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(points.len());
    let mut clipped: Vec<C64> = Vec::new();
    for p in points {
        if p.norm() <= 1.0 {
            out.push(p);
        } else {
            let q = p / p.norm();
            if !clipped.contains(&q) {
                clipped.push(q);
                out.push(q);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineGapOptions {
    /// Also probe the mirrored line below the axis (measures `min |Im λ|`).
    pub both_half_planes: bool,
    /// Detector disks are kept at least this far from the reference line.
    pub axis_exclusion: f64,
    pub budget: Budget,
}

impl Default for LineGapOptions {
    fn default() -> Self {
        LineGapOptions { both_half_planes: false, axis_exclusion: 0.0, budget: Budget::default() }
    }
}

/// Line gap `min Im λ` relative to the real axis, for spectra in the open
/// upper half plane with gap above `eps`. The value is within `eps` of the
/// true gap.
pub fn line_gap(det: &dyn Detector, eps: f64, opts: &LineGapOptions) -> Result<GapReport> {
    check_eps(eps)?;
    require_diagonalizable(det.operand(), "line gap")?;
    if !(opts.axis_exclusion >= 0.0 && opts.axis_exclusion < eps) {
        bail!(InvalidArgument, "axis exclusion must lie in [0, eps)");
    }
    let k = det.operand().k_bound();
    let mut run = Run::new(det, opts.budget);
    let (mut g_min, mut g_max) = (eps, 1.0 + eps);
    let mut est: Option<C64> = None;
    loop {
        let width = g_max - g_min;
        if width <= eps && est.is_some_and(|e| g_max - e.im <= eps) {
            break;
        }
        if g_min > g_max || g_min > 1.0 {
            bail!(PromiseViolation, "no eigenvalue found above height {}", g_max.min(g_min));
        }
        let delta = ((g_min - opts.axis_exclusion) / (2.0 * k)).min(width / (4.0 * k));
        let mut centers = clip_to_unit_disk(&line_cover(g_min, delta)?);
        if opts.both_half_planes {
            let below: Vec<C64> = centers.iter().map(|z| z.conj()).collect();
            centers.extend(below);
        }
        let hit = run.probe(&centers, delta)?;
        match hit {
            Some(mu) => {
                g_max = g_min + 2.0 * k * delta;
                est = Some(C64::new(mu.re, mu.im.abs()));
            }
            None => g_min += delta / 2.0,
        }
        run.log(GuessRegion::Interval { lo: g_min, hi: g_max }, centers.len(), hit.is_some());
    }
    let e = est.unwrap();
    Ok(run.finish(e, e.im, None, GuessRegion::Interval { lo: g_min, hi: g_max }))
}

/// One ring step on an annulus `[r_a, r_b]` around the origin: probe a ring
/// at radius `r_a` with threshold `ν(r)`. Returns the updated radii and the
/// verdict.
pub fn ers_ring(det: &dyn Detector, r_a: f64, r_b: f64, r: f64) -> Result<(f64, f64, bool)> {
    let mut run = Run::new(det, Budget::default());
    let (a, b, hit, _) = ers_step(&mut run, r_a, r_b, r)?;
    Ok((a, b, hit.is_some()))
}

fn ers_step(run: &mut Run<'_>, r_a: f64, r_b: f64, r: f64) -> Result<(f64, f64, Option<C64>, usize)> {
    let tol = 1e-12;
    if !(r > 0.0 && r <= r_a + tol && r <= (r_b - r_a) / 2.0 + tol) {
        bail!(InvalidArgument, "ring step needs 0 < r <= min(R_a, (R_b-R_a)/2), got r={r}, R_a={r_a}, R_b={r_b}");
    }
    let nu = run.op().nu(r);
    let centers = ring_cover(r_a, nu)?;
    let hit = run.probe(&centers, nu)?;
    Ok(match hit {
        Some(_) => (r_a, r_a + r, hit, centers.len()),
        None => (r_a + nu / 2.0, r_b, None, centers.len()),
    })
}

/// Point gap `min |λ|` relative to the origin, assuming it exceeds `eps`.
pub fn point_gap(det: &dyn Detector, eps: f64, budget: Budget) -> Result<GapReport> {
    check_eps(eps)?;
    let mut run = Run::new(det, budget);
    let (mut lo, mut hi) = (eps, 1.0 + eps);
    let mut est: Option<C64> = None;
    let mut step = |run: &mut Run<'_>, lo: &mut f64, hi: &mut f64, r: f64| -> Result<()> {
        let (a, b, hit, size) = ers_step(run, *lo, *hi, r)?;
        if hit.is_some() {
            est = hit;
        }
        *lo = a;
        *hi = b;
        run.log(GuessRegion::Annulus { r_in: a, r_out: b }, size, hit.is_some());
        Ok(())
    };
    while lo < hi / 2.0 {
        let r = lo.min((hi - lo) / 2.0);
        step(&mut run, &mut lo, &mut hi, r)?;
        if lo > 1.0 {
            bail!(PromiseViolation, "no eigenvalue within the unit disk beyond radius {eps}");
        }
    }
    while hi - lo > eps {
        let r = (hi - lo) / 2.0;
        step(&mut run, &mut lo, &mut hi, r)?;
        if lo > 1.0 {
            bail!(PromiseViolation, "no eigenvalue within the unit disk beyond radius {eps}");
        }
    }
    let mid = 0.5 * (lo + hi);
    let region = GuessRegion::Annulus { r_in: lo, r_out: hi };
    Ok(run.finish(est.unwrap_or(C64::new(mid, 0.0)), mid, None, region))
}

/// Locates some eigenvalue to accuracy `eps` by halving a disk that is known
/// to contain one.
pub fn eig_search(det: &dyn Detector, eps: f64, budget: Budget) -> Result<GapReport> {
    check_eps(eps)?;
    let mut run = Run::new(det, budget);
    let mut center = C64::new(0.0, 0.0);
    let mut d = 1.0;
    while d > eps {
        let cell = run.op().nu(d / 2.0);
        let centers = project_to_unit_disk(net_cover(center, d, cell)?);
        match run.probe(&centers, cell)? {
            Some(mu) => center = mu,
            None => bail!(PromiseViolation, "no eigenvalue detected in the disk of radius {d} around {center}"),
        }
        d /= 2.0;
        run.log(GuessRegion::Disk { center, radius: d }, centers.len(), true);
    }
    Ok(run.finish(center, center.norm(), None, GuessRegion::Disk { center, radius: d }))
}

/// `eig_search` restricted to real spectra: a 1-D lattice replaces the
/// 2-D net.
pub fn eig_search_real(det: &dyn Detector, eps: f64, budget: Budget) -> Result<GapReport> {
    check_eps(eps)?;
    let mut run = Run::new(det, budget);
    let mut center = 0.0f64;
    let mut d = 1.0;
    while d > eps {
        let th = run.op().nu(d / 2.0);
        let spacing = 2.0 * th;
        let reach = libm::ceil(d / spacing) as i64;
        let mut centers: Vec<C64> = Vec::with_capacity(2 * reach as usize + 1);
        for n in core::iter::once(0).chain((1..=reach).flat_map(|n| [n, -n])) {
            let z = C64::new((center + n as f64 * spacing).clamp(-1.0, 1.0), 0.0);
            if !centers.contains(&z) {
                centers.push(z);
            }
        }
        match run.probe(&centers, th)? {
            Some(mu) => center = mu.re,
            None => bail!(PromiseViolation, "no real eigenvalue detected within {d} of {center}"),
        }
        d /= 2.0;
        run.log(GuessRegion::Disk { center: C64::new(center, 0.0), radius: d }, centers.len(), true);
    }
    Ok(run.finish(C64::new(center, 0.0), center, None, GuessRegion::Interval { lo: center - d, hi: center + d }))
}

/// Gap `min |λ|` of a real spectrum, returned with the sign of the
/// eigenvalue that attains it (`+` preferred on ties).
pub fn real_gap(det: &dyn Detector, eps: f64, budget: Budget) -> Result<GapReport> {
    check_eps(eps)?;
    let mut run = Run::new(det, budget);
    let mut st = RealGapState { lo: eps, hi: 1.0, sign: 0.0, last_true_lo: f64::NEG_INFINITY };
    while st.hi - st.lo > st.lo {
        let r = st.lo;
        st.step(&mut run, r, eps)?;
    }
    while st.hi - st.lo > eps || st.sign == 0.0 || st.hi - st.last_true_lo > eps {
        let r = (st.hi - st.lo) / 2.0;
        st.step(&mut run, r, eps)?;
    }
    let v = st.sign * 0.5 * (st.lo + st.hi);
    Ok(run.finish(C64::new(v, 0.0), v, None, GuessRegion::Interval { lo: st.lo, hi: st.hi }))
}

struct RealGapState {
    lo: f64,
    hi: f64,
    sign: f64,
    last_true_lo: f64,
}

impl RealGapState {
    fn step(&mut self, run: &mut Run<'_>, r: f64, eps: f64) -> Result<()> {
        let nu = run.op().nu(r);
        let plus = C64::new(self.lo, 0.0);
        let mut verdict = 0.0;
        if run.probe(&[plus], nu)?.is_some() {
            verdict = 1.0;
        } else if run.probe(&[-plus], nu)?.is_some() {
            verdict = -1.0;
        }
        if verdict != 0.0 {
            self.sign = verdict;
            self.last_true_lo = self.lo;
            self.hi = self.lo + r;
        } else {
            self.lo += nu;
        }
        if self.lo > 1.0 || self.lo > self.hi {
            bail!(PromiseViolation, "no real eigenvalue with modulus in [{eps}, 1]");
        }
        run.log(GuessRegion::Interval { lo: self.lo, hi: self.hi }, 2, verdict != 0.0);
        Ok(())
    }
}

/// Decides whether some eigenvalue has `|Im λ| ≥ eps` (True) or every
/// eigenvalue has `|Im λ| ≤ eps/2` (False).
pub fn pt_witness(det: &dyn Detector, eps: f64, budget: Budget) -> Result<GapReport> {
    check_eps(eps)?;
    let mut run = Run::new(det, budget);
    let mut b = eps;
    loop {
        let h = b.min(1.0);
        let t = run.op().nu(h / 2.0);
        let count = libm::ceil(2.0 / t) as i64;
        let mut line: Vec<C64> = Vec::with_capacity(2 * count as usize + 2);
        for k in 0..=count {
            let a = (-1.0 + k as f64 * t).min(1.0);
            line.push(C64::new(a, h));
            line.push(C64::new(a, -h));
        }
        let centers = clip_to_unit_disk(&line);
        let hit = run.probe(&centers, t)?;
        run.log(GuessRegion::Interval { lo: h, hi: 1.0 }, centers.len(), hit.is_some());
        if let Some(mu) = hit {
            return Ok(run.finish(mu, 1.0, Some(true), GuessRegion::Interval { lo: h, hi: 1.0 }));
        }
        if h >= 1.0 {
            break;
        }
        b += t;
    }
    Ok(run.finish(C64::new(0.0, 0.0), 0.0, Some(false), GuessRegion::Interval { lo: 1.0, hi: 1.0 }))
}

/// Validates a row-stochastic matrix and wraps `P/α` as an operand. The unit
/// eigenvalue must be simple.
pub fn markov_operand(stoch: &CMatrix, alpha: f64, k_bound: Option<f64>) -> Result<SpectralOperand> {
    let n = stoch.dim();
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            let p = stoch.get(i, j);
            if p.im.abs() > 1e-12 || p.re < -1e-12 {
                bail!(InvalidMatrix, "entry ({i},{j}) = {p} is not a probability");
            }
            row += p.re;
        }
        if (row - 1.0).abs() > 1e-10 {
            bail!(InvalidMatrix, "row {i} sums to {row}");
        }
    }
    let norm = singular_values(stoch.as_matrix())?[0];
    if !(alpha >= norm * (1.0 - 1e-12)) {
        bail!(InvalidArgument, "alpha = {alpha} is below the spectral norm {norm}");
    }
    if n >= 2 {
        let mut shifted = stoch.as_matrix().clone();
        for i in 0..n {
            shifted[(i, i)] -= C64::new(1.0, 0.0);
        }
        let sv = singular_values(&shifted)?;
        if sv[n - 2] <= 1e-8 {
            bail!(PromiseViolation, "the eigenvalue 1 is not simple, absolute gap is 0");
        }
    }
    let scaled = stoch.scaled(1.0 / alpha);
    match k_bound {
        Some(k) => SpectralOperand::new(scaled, k, 1),
        None => SpectralOperand::with_estimated_k(scaled),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovReport {
    pub gap: GapReport,
    pub relaxation_time: f64,
    /// Bound on `|τ̂ − τ|` implied by the gap accuracy.
    pub relaxation_time_error: f64,
}

/// Absolute spectral gap `1 − max{|λ| : |λ| ≠ 1}` of a chain whose operand is
/// `P/α` (see [`markov_operand`]), promised to be at least `delta_promise`.
pub fn markov_abs_gap(det: &dyn Detector, alpha: f64, delta_promise: f64, eps: f64, budget: Budget) -> Result<MarkovReport> {
    check_eps(eps)?;
    if !(delta_promise > 0.0 && delta_promise < 1.0) {
        bail!(InvalidArgument, "delta_promise must lie in (0, 1), got {delta_promise}");
    }
    if eps >= delta_promise {
        bail!(InvalidArgument, "eps = {eps} must be below delta_promise = {delta_promise}");
    }
    let mut run = Run::new(det, budget);
    let top = 1.0 / alpha;
    let (mut lo, mut hi) = (0.0f64, (1.0 - delta_promise) / alpha);
    let mut est: Option<C64> = None;
    let mut step = |run: &mut Run<'_>, lo: &mut f64, hi: &mut f64, r: f64| -> Result<()> {
        let nu = run.op().nu(r);
        if *hi <= 0.0 {
            bail!(PromiseViolation, "bracket collapsed below the origin");
        }
        let centers = ring_cover(*hi, nu)?;
        let hit = run.probe(&centers, nu)?;
        match hit {
            Some(mu) => {
                est = Some(mu);
                *lo = (*hi - r).max(*lo);
            }
            None => *hi -= nu / 2.0,
        }
        run.log(GuessRegion::Interval { lo: 1.0 - alpha * *hi, hi: 1.0 - alpha * *lo }, centers.len(), hit.is_some());
        Ok(())
    };
    while top - hi < (top - lo) / 2.0 {
        let r = (top - hi).min((hi - lo) / 2.0);
        step(&mut run, &mut lo, &mut hi, r)?;
    }
    while hi - lo > eps / alpha {
        let r = (hi - lo) / 2.0;
        step(&mut run, &mut lo, &mut hi, r)?;
    }
    let g = 1.0 - alpha * 0.5 * (lo + hi);
    let region = GuessRegion::Interval { lo: 1.0 - alpha * hi, hi: 1.0 - alpha * lo };
    let tau = 1.0 / g;
    let err = if g > eps { eps / (g * (g - eps)) } else { f64::INFINITY };
    let report = run.finish(est.unwrap_or(C64::new(0.5 * (lo + hi), 0.0)), g, None, region);
    Ok(MarkovReport { gap: report, relaxation_time: tau, relaxation_time_error: err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqed::{FqedConfig, SerialDetector};
    use crate::instances;
    use crate::oracle::oracle_solve;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn exact(op: &SpectralOperand) -> SerialDetector<'_> {
        SerialDetector::new(op, FqedConfig::default())
    }

    fn diag(d: &[C64]) -> SpectralOperand {
        SpectralOperand::new(CMatrix::from_diagonal(d).unwrap(), 1.0, 1).unwrap()
    }

    fn upper_spectrum(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| {
                let im = 0.05 + 0.9 * rng.random::<f64>();
                let half = libm::sqrt(1.0 - im * im) * 0.95;
                c(half * (2.0 * rng.random::<f64>() - 1.0), im)
            })
            .collect()
    }

    fn assert_nested(report: &GapReport) {
        for w in report.trace.windows(2) {
            let (a, b) = (w[0].region, w[1].region);
            assert!(b.lo() >= a.lo() - 1e-12 && b.hi() <= a.hi() + 1e-12, "{a:?} -> {b:?}");
        }
    }

    #[test]
    fn line_gap_diagonal_example() {
        let op = diag(&[c(0.1, 0.3), c(0.2, 0.7)]);
        let r = line_gap(&exact(&op), 0.01, &LineGapOptions::default()).unwrap();
        assert!((r.value - 0.3).abs() <= 0.01, "{}", r.value);
        assert_nested(&r);
    }

    #[test]
    fn line_gap_random_operands() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..12 {
            let n = 3 + trial % 6;
            let spec = upper_spectrum(&mut rng, n);
            let m = if trial % 2 == 0 { instances::normal_with_spectrum(&mut rng, &spec) } else { instances::similar_with_spectrum(&mut rng, &spec, 0.2) };
            let op = SpectralOperand::with_estimated_k(m).unwrap();
            let g = oracle_solve(op.matrix()).unwrap().line_gap;
            let r = line_gap(&exact(&op), 0.01, &LineGapOptions::default()).unwrap();
            assert!((r.value - g).abs() <= 0.01, "trial {trial}: {} vs {g}", r.value);
            for row in &r.trace {
                assert!(row.region.contains(g, 1e-12));
            }
            assert_nested(&r);
        }
    }

    #[test]
    fn line_gap_without_upper_eigenvalues() {
        let op = diag(&[c(0.3, 0.0), c(-0.2, 0.0)]);
        assert!(matches!(line_gap(&exact(&op), 0.05, &LineGapOptions::default()), Err(crate::Error::PromiseViolation(_))));
    }

    #[test]
    fn point_gap_diagonal_example() {
        let op = diag(&[c(0.3, 0.0), c(0.0, -0.6)]);
        let r = point_gap(&exact(&op), 0.01, Budget::default()).unwrap();
        assert!((r.value - 0.3).abs() <= 0.01);
        for row in &r.trace {
            assert!(row.region.contains(0.3, 1e-12));
        }
        assert_nested(&r);
    }

    #[test]
    fn point_gap_jordan_block() {
        let m = instances::jordan_block(2, c(0.5, 0.0), 0.4);
        let k = instances::jordan_block_condition(2, 0.4);
        let op = SpectralOperand::new(m, k, 2).unwrap();
        let r = point_gap(&exact(&op), 0.25, Budget::default()).unwrap();
        assert!(r.region.contains(0.5, 1e-12), "{:?}", r.region);
        for row in &r.trace {
            assert!(row.region.contains(0.5, 1e-12));
        }
    }

    #[test]
    fn ring_step_precondition() {
        let op = diag(&[c(0.3, 0.0)]);
        assert!(matches!(ers_ring(&exact(&op), 0.1, 0.5, 0.3), Err(crate::Error::InvalidArgument(_))));
        let (a, b, v) = ers_ring(&exact(&op), 0.05, 0.8, 0.05).unwrap();
        assert!(!v && a > 0.05 && b == 0.8);
        let (a, b, v) = ers_ring(&exact(&op), 0.25, 0.8, 0.1).unwrap();
        assert!(v && a == 0.25 && (b - 0.35).abs() < 1e-15);
    }

    #[test]
    fn eig_search_finds_an_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let m = instances::mildly_non_normal(&mut rng, 6, 0.2);
            let op = SpectralOperand::with_estimated_k(m).unwrap();
            let r = eig_search(&exact(&op), 0.01, Budget::default()).unwrap();
            let d = op.eigenvalues().iter().map(|l| (l - r.estimate).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= 0.01, "{d}");
            assert!(r.iterations <= libm::ceil(libm::log2(100.0)) as u64);
        }
    }

    #[test]
    fn eig_search_defective() {
        let op = SpectralOperand::new(instances::jordan_block(3, c(0.0, 0.0), 1.0), 1.0, 3).unwrap();
        let r = eig_search(&exact(&op), 0.3, Budget::default()).unwrap();
        assert!(r.estimate.norm() <= 0.3);
    }

    #[test]
    fn eig_search_real_lattice_size() {
        let op = diag(&[c(0.37, 0.0), c(-0.8, 0.0)]);
        let r = eig_search_real(&exact(&op), 0.01, Budget::default()).unwrap();
        assert!((r.value - 0.37).abs() <= 0.01 || (r.value + 0.8).abs() <= 0.01);
        assert!(r.trace.iter().all(|t| t.covering_size <= 5));
    }

    #[test]
    fn real_gap_sign() {
        for (d, want) in [(vec![0.4, -0.7], 0.4), (vec![-0.3, 0.5], -0.3), (vec![0.5, -0.5], 0.5)] {
            let op = diag(&d.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
            let r = real_gap(&exact(&op), 0.01, Budget::default()).unwrap();
            assert!((r.value - want).abs() <= 0.01, "{d:?}: {}", r.value);
        }
    }

    #[test]
    fn real_gap_iterations_scale_with_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec: Vec<C64> = (0..6).map(|_| c(0.1 + 0.8 * rng.random::<f64>(), 0.0)).collect();
        let m = instances::normal_with_spectrum(&mut rng, &spec);
        let mut pts = Vec::new();
        for k in [1.0, 2.0, 4.0, 8.0] {
            let op = SpectralOperand::new(m.clone(), k, 1).unwrap();
            let r = real_gap(&exact(&op), 0.01, Budget::default()).unwrap();
            let g = spec.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            assert!((r.value - g).abs() <= 0.01);
            pts.push((libm::log(k), libm::log(r.iterations as f64)));
        }
        let slope = fit_slope(&pts);
        assert!((slope - 1.0).abs() <= 0.3, "slope {slope}");
    }

    pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    }

    #[test]
    fn witness_examples() {
        let real = diag(&[c(0.3, 0.0), c(-0.5, 0.01)]);
        assert_eq!(pt_witness(&exact(&real), 0.1, Budget::default()).unwrap().verdict, Some(false));
        let cplx = diag(&[c(0.3, 0.0), c(0.0, 0.5)]);
        let r = pt_witness(&exact(&cplx), 0.1, Budget::default()).unwrap();
        assert_eq!(r.verdict, Some(true));
        assert!(r.estimate.im.abs() >= 0.05);
    }

    #[test]
    fn markov_two_state() {
        let p = CMatrix::from_rows(2, &[c(0.7, 0.0), c(0.3, 0.0), c(0.2, 0.0), c(0.8, 0.0)]).unwrap();
        let alpha = crate::linalg::spectral_norm(&p).unwrap();
        let op = markov_operand(&p, alpha, None).unwrap();
        let r = markov_abs_gap(&exact(&op), alpha, 0.3, 0.01, Budget::default()).unwrap();
        assert!((r.gap.value - 0.5).abs() <= 0.01, "{}", r.gap.value);
        assert!((r.relaxation_time - 2.0).abs() <= r.relaxation_time_error + 1e-12);
    }

    #[test]
    fn markov_identity_rejected() {
        let p = CMatrix::identity(3);
        assert!(matches!(markov_operand(&p, 1.0, None), Err(crate::Error::PromiseViolation(_))));
    }

    #[test]
    fn markov_reversible_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [3, 5, 8] {
            let p = instances::reversible_chain(&mut rng, n, 2.0);
            let g = oracle_solve(&p).unwrap().abs_gap.unwrap();
            let alpha = crate::linalg::spectral_norm(&p).unwrap();
            let op = markov_operand(&p, alpha, None).unwrap();
            let r = markov_abs_gap(&exact(&op), alpha, (g * 0.9).min(0.9), 0.01, Budget::default()).unwrap();
            assert!((r.gap.value - g).abs() <= 0.01, "n={n}: {} vs {g}", r.gap.value);
        }
    }

    #[test]
    fn budget_enforced() {
        let op = diag(&[c(0.1, 0.3)]);
        let b = Budget { max_iterations: 3, max_queries: 10_000_000 };
        let opts = LineGapOptions { budget: b, ..Default::default() };
        assert!(matches!(line_gap(&exact(&op), 0.001, &opts), Err(crate::Error::BudgetExceeded(_))));
    }
}
