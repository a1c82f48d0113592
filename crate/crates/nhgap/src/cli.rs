//! Argument parsing and command dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use nhgap_core::filter::PolyFilter;
use nhgap_core::linalg::jordan_condition_estimate;
use nhgap_core::oracle::{liouvillian_gap as oracle_liouvillian_gap, oracle_solve, OracleResult};
use nhgap_core::search::{self, Budget, GapReport, LineGapOptions};
use nhgap_core::{lindblad, Backend, CMatrix, FqedConfig, Noise, SpectralOperand, StateSource};
use serde::Serialize;

use crate::io::{parse_cmatrix, parse_lindblad, vectorized_json};
use crate::report::{emit_trace_csv, human, OracleCheck, Report};
use crate::threaded::ThreadedDetector;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "nhgap", version, about = "Spectral gaps of non-Hermitian matrices from eigenvalue detection queries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance from the spectrum to the real axis.
    Linegap {
        #[command(flatten)]
        common: Common,
        /// Search both half planes (min |Im λ|).
        #[arg(long)]
        both_sides: bool,
    },
    /// Distance from the spectrum to the origin.
    Pointgap {
        #[command(flatten)]
        common: Common,
    },
    /// Locate one eigenvalue to accuracy eps.
    Eigsearch {
        #[command(flatten)]
        common: Common,
        /// Assume a real spectrum and search along the real axis.
        #[arg(long)]
        real: bool,
    },
    /// Signed real eigenvalue closest to zero, for real spectra.
    Realgap {
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether some eigenvalue has |Im λ| >= eps.
    Ptwitness {
        #[command(flatten)]
        common: Common,
    },
    /// Absolute spectral gap of a row-stochastic matrix.
    Markovgap {
        #[command(flatten)]
        common: Common,
        /// Promised lower bound on the gap.
        #[arg(long)]
        delta_promise: f64,
        /// Normalization; defaults to the spectral norm.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Liouvillian gap of a Lindblad spec (JSON input).
    Liouvgap {
        #[command(flatten)]
        common: Common,
    },
    /// Build and certify a detection filter; CSV on stdout.
    Filtercheck {
        #[arg(long)]
        eps_th: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
    },
    /// Pauli-string form of a Lindblad spec (JSON input).
    Vectorize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Dense reference solve of a matrix file.
    Oracle {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Filtered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    Oracle,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    Human,
    Json,
    Csv,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Jordan condition bound; estimated from the eigenvectors when absent.
    #[arg(long)]
    pub k_bound: Option<f64>,
    #[arg(long)]
    pub m_max: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    pub backend: BackendArg,
    /// Initial state for the filtered backend.
    #[arg(long, value_enum, default_value_t = StateArg::Oracle)]
    pub state: StateArg,
    /// Per-query failure probability of the filtered backend.
    #[arg(long, default_value_t = 1e-6)]
    pub fqed_delta: f64,
    /// Estimate amplitudes from this many shots instead of exactly.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputArg::Human)]
    pub output: OutputArg,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Compare against a dense eigensolve and embed the result.
    #[arg(long)]
    pub oracle_check: bool,
    /// Also write the iteration trace as CSV to this path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

impl Common {
    fn fqed_config(&self) -> FqedConfig {
        FqedConfig {
            backend: match self.backend {
                BackendArg::Exact => Backend::Exact,
                BackendArg::Filtered => Backend::Filtered,
            },
            gamma: self.gamma,
            delta: self.fqed_delta,
            state: match self.state {
                StateArg::Oracle => StateSource::SingularVectorOracle,
                StateArg::Uniform => StateSource::Uniform,
            },
            noise: self.shots.map_or(Noise::Deterministic, |shots| Noise::Sampled { shots }),
            seed: self.seed,
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(CliError::Schema(format!("--eps must lie in (0, 1), got {}", self.eps)));
        }
        if self.threads == 0 {
            return Err(CliError::Schema("--threads must be at least 1".into()));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_matrix(path: &Path) -> Result<CMatrix, CliError> {
    parse_cmatrix(&read(path)?)
}

/// Operand for a matrix command, estimating `K` when it is not supplied.
pub fn build_operand(m: CMatrix, k_bound: Option<f64>, m_max: Option<u32>) -> Result<SpectralOperand, CliError> {
    let m_max = m_max.unwrap_or(1);
    let k = match k_bound {
        Some(k) => k,
        None => {
            let k = jordan_condition_estimate(&m)?;
            warn!("no --k-bound given; using eigenvector condition estimate {k:.6}");
            k
        }
    };
    Ok(SpectralOperand::new(m, k.max(1.0), m_max)?)
}

fn check_value(reference: f64, value: f64, tolerance: f64) -> OracleCheck {
    let error = (value - reference).abs();
    OracleCheck { reference, error, tolerance, pass: error <= tolerance * (1.0 + 1e-9) }
}

/// Runs one command, writing its output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Filtercheck { eps_th, delta, grid } => filtercheck(*eps_th, *delta, *grid, out),
        Command::Vectorize { input } => {
            let spec = parse_lindblad(&read(input)?)?;
            let v = lindblad::vectorize(&spec)?;
            write_json(out, &vectorized_json(&spec, &v))
        }
        Command::Oracle { input } => {
            let m = load_matrix(input)?;
            let r = oracle_solve(&m)?;
            write_json(out, &OracleJson::from(&r))
        }
        Command::Liouvgap { common } => {
            common.check()?;
            let spec = parse_lindblad(&read(&common.input)?)?;
            if spec.dissipators.is_empty() {
                return Err(nhgap_core::Error::PromiseViolation("no dissipators: the spectrum is purely imaginary".into()).into());
            }
            let v = lindblad::vectorize(&spec)?;
            let op = lindblad::liouvillian_operand(&v, common.m_max, common.k_bound)?;
            info!("Liouvillian: {} terms, c_tilde = {}, K = {}", v.terms.len(), v.c_tilde, op.k_bound());
            let det = ThreadedDetector::new(&op, common.fqed_config(), common.threads);
            let r = lindblad::liouvillian_gap_with(&det, v.c_tilde, common.eps, Budget::default())?;
            let mut rep = Report::from_gap("liouvgap", &r, 1.0, op.k_bound(), op.m_max());
            if common.oracle_check {
                let spectrum = oracle_solve(v.dense_matrix()?)?.spectrum;
                rep.oracle_check = Some(check_value(oracle_liouvillian_gap(&spectrum, common.eps / 2.0), rep.value, common.eps));
            }
            finish(common, &rep, &r, 1.0, out)
        }
        Command::Markovgap { common, delta_promise, alpha } => {
            common.check()?;
            let p = load_matrix(&common.input)?;
            let alpha = match alpha {
                Some(a) => *a,
                None => nhgap_core::linalg::spectral_norm(&p)?,
            };
            let op = search::markov_operand(&p, alpha, common.k_bound)?;
            let det = ThreadedDetector::new(&op, common.fqed_config(), common.threads);
            let mr = search::markov_abs_gap(&det, alpha, *delta_promise, common.eps, Budget::default())?;
            let mut rep = Report::from_gap("markovgap", &mr.gap, 1.0, op.k_bound(), op.m_max());
            rep.relaxation_time = Some([mr.relaxation_time, mr.relaxation_time_error]);
            if common.oracle_check {
                let g = oracle_solve(&p)?.abs_gap.unwrap_or(0.0);
                rep.oracle_check = Some(check_value(g, rep.value, common.eps));
            }
            finish(common, &rep, &mr.gap, 1.0, out)
        }
        Command::Linegap { common, .. }
        | Command::Pointgap { common }
        | Command::Eigsearch { common, .. }
        | Command::Realgap { common }
        | Command::Ptwitness { common } => matrix_command(&cli.command, common, out),
    }
}

fn matrix_command(cmd: &Command, common: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    common.check()?;
    let m = load_matrix(&common.input)?;
    let op = build_operand(m.clone(), common.k_bound, common.m_max)?;
    let scale = op.scale();
    let eps = common.eps / scale;
    if scale != 1.0 {
        info!("input rescaled by 1/{scale}; driver accuracy {eps}");
    }
    let det = ThreadedDetector::new(&op, common.fqed_config(), common.threads);
    let budget = Budget::default();
    let (name, r) = match cmd {
        Command::Linegap { both_sides, .. } => {
            let opts = LineGapOptions { both_half_planes: *both_sides, ..LineGapOptions::default() };
            ("linegap", search::line_gap(&det, eps, &opts)?)
        }
        Command::Pointgap { .. } => ("pointgap", search::point_gap(&det, eps, budget)?),
        Command::Eigsearch { real: false, .. } => ("eigsearch", search::eig_search(&det, eps, budget)?),
        Command::Eigsearch { real: true, .. } => ("eigsearch", search::eig_search_real(&det, eps, budget)?),
        Command::Realgap { .. } => ("realgap", search::real_gap(&det, eps, budget)?),
        Command::Ptwitness { .. } => ("ptwitness", search::pt_witness(&det, eps, budget)?),
        _ => unreachable!("not a matrix command"),
    };
    let mut rep = Report::from_gap(name, &r, scale, op.k_bound(), op.m_max());
    if common.oracle_check {
        let o = oracle_solve(&m)?;
        rep.oracle_check = Some(oracle_check(cmd, &o, &rep, common.eps));
    }
    finish(common, &rep, &r, scale, out)
}

fn oracle_check(cmd: &Command, o: &OracleResult, rep: &Report, eps: f64) -> OracleCheck {
    match cmd {
        Command::Linegap { both_sides, .. } => {
            let g = if *both_sides { o.line_gap } else { o.spectrum.iter().filter(|z| z.im > 0.0).map(|z| z.im).fold(f64::INFINITY, f64::min) };
            check_value(g, rep.value, eps)
        }
        Command::Pointgap { .. } => check_value(o.point_gap, rep.value, eps),
        Command::Eigsearch { .. } => {
            let z = nhgap_core::C64::new(rep.estimate_re, rep.estimate_im);
            let d = o.spectrum.iter().map(|l| (l - z).norm()).fold(f64::INFINITY, f64::min);
            OracleCheck { reference: d, error: d, tolerance: eps, pass: d <= eps * (1.0 + 1e-9) }
        }
        Command::Realgap { .. } => {
            let closest = o.spectrum.iter().map(|z| z.re).min_by(|a, b| a.abs().total_cmp(&b.abs()).then(b.total_cmp(a))).unwrap_or(0.0);
            check_value(closest, rep.value, eps)
        }
        Command::Ptwitness { .. } => {
            let m = o.max_abs_im;
            let verdict = rep.verdict.unwrap_or(false);
            let pass = if m >= eps {
                verdict
            } else if m <= eps / 2.0 {
                !verdict
            } else {
                true
            };
            OracleCheck { reference: m, error: 0.0, tolerance: eps, pass }
        }
        _ => unreachable!("not a matrix command"),
    }
}

fn finish(common: &Common, rep: &Report, r: &GapReport, scale: f64, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(path) = &common.trace {
        let f = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        emit_trace_csv(r, scale, f)?;
    }
    let json = rep.to_json();
    match common.output {
        OutputArg::Json => out.write_all(json.as_bytes())?,
        OutputArg::Human => out.write_all(human(&json).as_bytes())?,
        OutputArg::Csv => emit_trace_csv(r, scale, &mut *out)?,
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    out.write_all(s.as_bytes())?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct OracleJson {
    schema: u32,
    spectrum: Vec<[f64; 2]>,
    line_gap: f64,
    point_gap: f64,
    max_abs_im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_gap: Option<f64>,
}

impl From<&OracleResult> for OracleJson {
    fn from(r: &OracleResult) -> Self {
        OracleJson {
            schema: 1,
            spectrum: r.spectrum.iter().map(|z| [z.re, z.im]).collect(),
            line_gap: r.line_gap,
            point_gap: r.point_gap,
            max_abs_im: r.max_abs_im,
            abs_gap: r.abs_gap,
        }
    }
}

#[derive(Debug, Serialize)]
struct FilterRow {
    x: f64,
    value: f64,
    branch: &'static str,
    pass: bool,
}

fn filtercheck(eps_th: f64, delta: f64, grid: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let f = PolyFilter::new(eps_th, delta)?;
    let cert = f.certify(grid);
    info!("filter degree {}", f.degree());
    let mut w = csv::Writer::from_writer(out);
    for p in &cert.points {
        w.serialize(FilterRow { x: p.x, value: p.value, branch: p.branch.name(), pass: p.ok }).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    if cert.passed {
        Ok(())
    } else {
        Err(CliError::Uncertified(f.degree()))
    }
}
