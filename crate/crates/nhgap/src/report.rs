//! JSON reports, the human rendering derived from them, and trace CSV.

use std::io::Write;

use nhgap_core::fqed::ModeledCost;
use nhgap_core::search::GapReport;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CostJson {
    pub invocations: u64,
    pub queries_be: u64,
    pub queries_sp: u64,
    pub sum_inv_eps: f64,
    pub gamma: f64,
    pub qubits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gates_per_query: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate_estimate: Option<f64>,
}

impl From<&ModeledCost> for CostJson {
    fn from(c: &ModeledCost) -> Self {
        CostJson {
            invocations: c.invocations,
            queries_be: c.queries_be,
            queries_sp: c.queries_sp,
            sum_inv_eps: c.sum_inv_eps,
            gamma: c.gamma,
            qubits: c.qubits,
            gates_per_query: c.gates_per_query,
            gate_estimate: c.gate_estimate(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OracleCheck {
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub value: f64,
    pub bracket: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<bool>,
    pub fqed_queries: u64,
    pub iterations: u64,
    pub modeled_cost: CostJson,
    /// Factor the input was divided by to reach norm one; all reported
    /// quantities are in input units.
    pub input_scale: f64,
    pub k_bound: f64,
    pub m_max: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relaxation_time: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<OracleCheck>,
}

impl Report {
    pub fn from_gap(command: &str, r: &GapReport, scale: f64, k_bound: f64, m_max: u32) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            estimate_re: r.estimate.re * scale,
            estimate_im: r.estimate.im * scale,
            value: r.value * scale,
            bracket: [r.region.lo() * scale, r.region.hi() * scale],
            verdict: r.verdict,
            fqed_queries: r.fqed_queries(),
            iterations: r.iterations,
            modeled_cost: CostJson::from(&r.cost),
            input_scale: scale,
            k_bound,
            m_max,
            relaxation_time: None,
            oracle_check: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// `key: value` lines rendered from the JSON form.
pub fn human(json: &str) -> String {
    let v: Value = serde_json::from_str(json).expect("valid report json");
    let mut out = String::new();
    render(&v, "", &mut out);
    out
}

fn render(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render(x, &key, out);
            }
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{prefix}: [{}]\n", items.join(", ")));
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                render(x, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

#[derive(Debug, Serialize)]
struct TraceCsvRow {
    index: u64,
    region_lo: f64,
    region_hi: f64,
    covering_size: usize,
    verdict: bool,
    cumulative_queries: u64,
}

/// One row per iteration, regions in input units.
pub fn emit_trace_csv<W: Write>(report: &GapReport, scale: f64, w: W) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_writer(w);
    for t in &report.trace {
        wr.serialize(TraceCsvRow {
            index: t.index,
            region_lo: t.region.lo() * scale,
            region_hi: t.region.hi() * scale,
            covering_size: t.covering_size,
            verdict: t.verdict,
            cumulative_queries: t.cumulative_queries,
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    wr.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_is_flattened_json() {
        let j = r#"{"schema": 1, "bracket": [0.1, 0.2], "modeled_cost": {"gamma": 1.0}, "command": "linegap"}"#;
        let h = human(j);
        assert!(h.contains("schema: 1\n"));
        assert!(h.contains("bracket: [0.1, 0.2]\n"));
        assert!(h.contains("modeled_cost.gamma: 1.0\n"));
        assert!(h.contains("command: linegap\n"));
    }
}
