//! Versioned JSON run report.

use std::collections::BTreeMap;

use bterms::case_study::small_n::{MonotonicityReport, SweepReport};
use bterms::case_study::theorem::{decimal, TheoremReport};
use bterms::exact::{fmt_rat, Rat};
use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Constant {
    pub exact: String,
    pub decimal: String,
}

impl Constant {
    pub fn new(x: &Rat) -> Constant {
        Constant { exact: fmt_rat(x), decimal: decimal(x) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: Status,
    pub constants: BTreeMap<String, Constant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub detail: serde_json::Value,
}

impl Stage {
    pub fn new(name: &str, status: Status) -> Stage {
        Stage {
            name: name.to_string(),
            status,
            constants: BTreeMap::new(),
            message: None,
            seconds: None,
            detail: serde_json::Value::Null,
        }
    }

    pub fn constant(mut self, name: &str, x: &Rat) -> Stage {
        self.constants.insert(name.to_string(), Constant::new(x));
        self
    }

    pub fn message(mut self, m: impl Into<String>) -> Stage {
        self.message = Some(m.into());
        self
    }

    pub fn detail(mut self, v: impl Serialize) -> Stage {
        self.detail = serde_json::to_value(v).expect("serializable");
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Sweep, monotonicity, residues and theorem all succeeded.
    Settled,
    /// Nothing failed, but not every stage needed for the full claim ran.
    Incomplete,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub stages: Vec<Stage>,
    pub verdict: Verdict,
}

const REQUIRED: [&str; 4] = ["sweep", "monotonicity", "residues", "theorem"];

impl RunReport {
    pub fn new(command: &str, parameters: BTreeMap<String, String>, stages: Vec<Stage>) -> RunReport {
        let verdict = if stages.iter().any(|s| s.status != Status::Ok) {
            Verdict::Failed
        } else if REQUIRED.iter().all(|r| stages.iter().any(|s| s.name == *r)) {
            Verdict::Settled
        } else {
            Verdict::Incomplete
        };
        RunReport { schema: SCHEMA, command: command.to_string(), parameters, stages, verdict }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn sweep_stage(r: &SweepReport) -> Stage {
    let status = if !r.violations.is_empty() {
        Status::Failed
    } else if !r.inconclusive.is_empty() {
        Status::Inconclusive
    } else {
        Status::Ok
    };
    let worst = r.rows.iter().map(|row| row.upper_bound).fold(f64::NEG_INFINITY, f64::max);
    Stage::new("sweep", status).detail(serde_json::json!({
        "n_min": r.n_min,
        "n_max": r.n_max,
        "rows": r.rows.len(),
        "exact_fallbacks": r.exact_fallbacks,
        "violations": r.violations,
        "inconclusive": r.inconclusive,
        "largest_upper_bound": worst,
    }))
}

pub fn monotonicity_stage(r: &MonotonicityReport) -> Stage {
    let status = if r.violations.is_empty() { Status::Ok } else { Status::Failed };
    Stage::new("monotonicity", status).detail(r)
}

/// Stages of the large-n pipeline, in order.
pub fn theorem_stages(t: &TheoremReport) -> Vec<Stage> {
    let robin = Stage::new("robin", Status::Ok).constant("A", &t.robin.a).detail(&t.robin);
    let expansion = Stage::new("expansion", Status::Ok).detail(serde_json::json!({
        "expansion": t.expansion,
        "exact_terms": t.exact_terms,
        "b_terms": t.b_terms,
    }));
    let summands = Stage::new("summands", Status::Ok).detail(serde_json::json!({
        "count": t.summand_count,
        "summands": t.summands,
    }));
    let mut residues = Stage::new("residues", if t.main_term_ok { Status::Ok } else { Status::Failed })
        .detail(serde_json::json!({ "main_term": t.main_term }));
    if let Some(e) = &t.main_term_error {
        residues = residues.message(e.clone());
    }
    let integral = Stage::new("integral", Status::Ok).constant("C", &t.integral.constant).detail(&t.integral);
    let mut bounds = Stage::new("bounds", Status::Ok).constant("c1", &t.completion.c1);
    for (name, b) in [
        ("large_k", &t.prune.large_k),
        ("mid_k", &t.prune.mid_k),
        ("expansion_error", &t.expansion_error),
        ("completion_mid", &t.completion.until_34),
        ("completion_tail", &t.completion.after_34),
    ] {
        bounds = bounds.constant(name, &b.c);
    }
    bounds = bounds.detail(serde_json::json!({
        "prune": t.prune,
        "expansion_error": t.expansion_error,
        "completion": t.completion,
        "comparisons": t.comparisons,
    }));
    let mut theorem = Stage::new("theorem", if t.closes() { Status::Ok } else { Status::Failed })
        .constant("C_total", t.total())
        .constant("ratio_at_N", &t.ratio_upper);
    for p in &t.combined.parts {
        theorem = theorem.constant(&format!("collapsed_{}", p.name), &p.constant);
    }
    theorem = theorem.detail(serde_json::json!({
        "statement": format!(
            "F(n)/C(2n,n) = -n^2/8 + n/24 + B({} n^(3/4)) for n >= {}",
            decimal(t.total()),
            t.n0
        ),
        "ratio_at_N": t.ratio_at_n0,
        "ratio_ok": t.ratio_ok,
        "envelope": t.envelope,
        "soundness": t.soundness,
    }));
    if !t.closes() {
        theorem = theorem.message("the large-n bound does not close at N");
    }
    vec![robin, expansion, summands, residues, integral, bounds, theorem]
}
