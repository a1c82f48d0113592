//! Text matrix files and Lindblad JSON specs.

use std::fmt::Write as _;

use nhgap_core::lindblad::{parse_word, LindbladSpec, PauliTerm, Phase, VectorizedLiouvillian};
use nhgap_core::{CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Parses `re`, `imj`, `re+imj` or `re-imj` (a trailing `i` is accepted too).
pub fn parse_complex(tok: &str) -> Option<C64> {
    let t = tok.trim();
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t.parse::<f64>().ok().filter(|x| x.is_finite()).map(|x| C64::new(x, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, imag_part(&body[k..])?),
        None => (0.0, imag_part(body)?),
    };
    (re.is_finite() && im.is_finite()).then(|| C64::new(re, im))
}

fn imag_part(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}

pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

/// `cmatrix N` header followed by `N` rows of `N` entries. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_cmatrix(text: &str) -> Result<CMatrix, CliError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| CliError::Schema("empty matrix file".into()))?;
    let mut parts = header.split_whitespace();
    let n: usize = match (parts.next(), parts.next().map(str::parse::<usize>), parts.next()) {
        (Some("cmatrix"), Some(Ok(n)), None) if n > 0 => n,
        _ => return Err(CliError::Schema(format!("line {hl}: expected header `cmatrix <N>`, got {header:?}"))),
    };
    let mut entries = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (ln, line) in lines {
        if rows == n {
            return Err(CliError::Schema(format!("line {ln}: more than {n} rows")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != n {
            return Err(CliError::Schema(format!("line {ln}: expected {n} entries, got {}", toks.len())));
        }
        for t in toks {
            entries.push(parse_complex(t).ok_or_else(|| CliError::Schema(format!("line {ln}: bad entry {t:?}")))?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(CliError::Schema(format!("expected {n} rows, got {rows}")));
    }
    CMatrix::from_rows(n, &entries).map_err(|e| CliError::Schema(e.to_string()))
}

pub fn format_cmatrix(m: &CMatrix) -> String {
    let n = m.dim();
    let mut s = format!("cmatrix {n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format_complex(m.get(i, j))).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: f64,
    pub pauli: String,
    pub phase: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LindbladJson {
    pub n: usize,
    #[serde(default)]
    pub hamiltonian: Vec<TermJson>,
    #[serde(default)]
    pub dissipators: Vec<Vec<TermJson>>,
}

impl TermJson {
    fn to_term(&self) -> Result<PauliTerm, CliError> {
        let phase = Phase::parse(&self.phase).ok_or_else(|| CliError::Schema(format!("bad phase {:?}", self.phase)))?;
        let word = parse_word(&self.pauli).map_err(|e| CliError::Schema(e.to_string()))?;
        Ok(PauliTerm { coeff: self.coeff, word, phase })
    }

    fn from_term(t: &PauliTerm) -> Self {
        TermJson { coeff: t.coeff, pauli: t.word_string(), phase: t.phase.as_str().into() }
    }
}

pub fn parse_lindblad(text: &str) -> Result<LindbladSpec, CliError> {
    let raw: LindbladJson = serde_json::from_str(text).map_err(|e| CliError::Schema(format!("lindblad spec: {e}")))?;
    let spec = LindbladSpec {
        n: raw.n,
        hamiltonian: raw.hamiltonian.iter().map(TermJson::to_term).collect::<Result<_, _>>()?,
        dissipators: raw.dissipators.iter().map(|d| d.iter().map(TermJson::to_term).collect::<Result<_, _>>()).collect::<Result<_, _>>()?,
    };
    spec.validate().map_err(|e| CliError::Schema(e.to_string()))?;
    Ok(spec)
}

pub fn lindblad_to_json(spec: &LindbladSpec) -> LindbladJson {
    LindbladJson {
        n: spec.n,
        hamiltonian: spec.hamiltonian.iter().map(TermJson::from_term).collect(),
        dissipators: spec.dissipators.iter().map(|d| d.iter().map(TermJson::from_term).collect()).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VectorizedJson {
    pub schema: u32,
    pub n: usize,
    pub normalization: f64,
    pub c_tilde: f64,
    pub terms: Vec<VecTermJson>,
    pub block_encoding: BlockEncodingJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct VecTermJson {
    pub beta: f64,
    pub pauli: String,
    pub phase: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockEncodingJson {
    pub terms: usize,
    pub n: usize,
    pub c_be: f64,
}

pub fn vectorized_json(spec: &LindbladSpec, v: &VectorizedLiouvillian) -> VectorizedJson {
    let be = v.block_encoding_cost();
    VectorizedJson {
        schema: 1,
        n: v.n,
        normalization: spec.normalization(),
        c_tilde: v.c_tilde,
        terms: v.terms.iter().map(|t| VecTermJson { beta: t.coeff, pauli: t.word_string(), phase: t.phase.as_str() }).collect(),
        block_encoding: BlockEncodingJson { terms: be.terms, n: be.n, c_be: be.c_be },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nhgap_core::lindblad::Pauli;

    #[test]
    fn complex_tokens() {
        assert_eq!(parse_complex("0.5-0.25j"), Some(C64::new(0.5, -0.25)));
        assert_eq!(parse_complex("1e-3+2E-2j"), Some(C64::new(1e-3, 2e-2)));
        assert_eq!(parse_complex("-0.7"), Some(C64::new(-0.7, 0.0)));
        assert_eq!(parse_complex("-2j"), Some(C64::new(0.0, -2.0)));
        assert_eq!(parse_complex("+j"), Some(C64::new(0.0, 1.0)));
        assert_eq!(parse_complex("1-j"), Some(C64::new(1.0, -1.0)));
        assert_eq!(parse_complex("0,5"), None);
        assert_eq!(parse_complex("nan"), None);
        assert_eq!(parse_complex("1+2k"), None);
    }

    proptest::proptest! {
        #[test]
        fn complex_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let z = C64::new(re, im);
            proptest::prop_assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_rows(2, &[C64::new(0.1, 0.3), C64::new(-0.0, -1e-17), C64::new(2.5, 0.0), C64::new(0.2, 0.7)]).unwrap();
        let text = format_cmatrix(&m);
        assert_eq!(parse_cmatrix(&text).unwrap(), m);
    }

    #[test]
    fn malformed_matrices() {
        for bad in ["", "cmatrix 2\n1 2\n3 4\n5 6", "cmatrix 2\n1 2\n3", "matrix 2\n1 2\n3 4", "cmatrix 1\nx", "cmatrix 0\n"] {
            assert!(matches!(parse_cmatrix(bad), Err(CliError::Schema(_))), "{bad:?}");
        }
        let ok = parse_cmatrix("# comment\ncmatrix 1\n\n0.5+0.1j\n").unwrap();
        assert_eq!(ok.get(0, 0), C64::new(0.5, 0.1));
    }

    #[test]
    fn lindblad_schema() {
        let good = r#"{"n": 1, "hamiltonian": [{"coeff": 0.5, "pauli": "X", "phase": "+1"}], "dissipators": [[{"coeff": 0.25, "pauli": "Z", "phase": "+1"}]]}"#;
        let spec = parse_lindblad(good).unwrap();
        assert_eq!(spec.dissipators[0][0].word, vec![Pauli::Z]);
        let round = serde_json::to_string(&lindblad_to_json(&spec)).unwrap();
        assert_eq!(parse_lindblad(&round).unwrap(), spec);
        let extra = r#"{"n": 1, "dissipators": [], "gamma": 2}"#;
        assert!(matches!(parse_lindblad(extra), Err(CliError::Schema(_))));
        let bad_word = r#"{"n": 2, "dissipators": [[{"coeff": 0.25, "pauli": "Z", "phase": "+1"}]]}"#;
        assert!(matches!(parse_lindblad(bad_word), Err(CliError::Schema(_))));
        let bad_phase = r#"{"n": 1, "dissipators": [[{"coeff": 0.25, "pauli": "Z", "phase": "i2"}]]}"#;
        assert!(matches!(parse_lindblad(bad_phase), Err(CliError::Schema(_))));
    }
}
