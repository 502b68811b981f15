use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{gradient_bound, gradient_bound_maximal};
use crate::quad::log_grid;
use crate::reference::{self, B0};

use super::{verify_case, Verdict, VerificationCase, VerificationReport, SCHEMA_VERSION};

const GATE_PROFILE_TOL: f64 = 1e-12;
const GATE_BOUND_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchConfig {
    #[serde(default)]
    case: Vec<VerificationCase>,
}

/// Closed forms re-checked before any solver-based case runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub schema: u32,
    pub f0_profile_max_rel_err: f64,
    pub gradient_bound_f0_max_rel_err: f64,
    pub maximal_bound_f1_max_rel_err: f64,
    pub passed: bool,
}

pub fn closed_form_gate() -> Result<GateReport> {
    let s_points = log_grid(1e-3 * B0, 0.999 * B0, 100);
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let f0 = reference::f0_star_profile();
    let f1 = reference::f1_star_profile();
    let (mut e0, mut e1, mut e2) = (0.0f64, 0.0f64, 0.0f64);
    for &s in &s_points {
        e0 = e0.max(rel(f0.eval(s), reference::f0_star(s)));
        e1 = e1.max(rel(gradient_bound(&f0, 3, s)?.to_f64(), reference::gradient_bound_f0(s)));
        e2 = e2.max(rel(gradient_bound_maximal(&f1, 3, s)?.to_f64(), reference::gradient_bound_maximal_f1(s)));
    }
    Ok(GateReport {
        schema: SCHEMA_VERSION,
        f0_profile_max_rel_err: e0,
        gradient_bound_f0_max_rel_err: e1,
        maximal_bound_f1_max_rel_err: e2,
        passed: e0 <= GATE_PROFILE_TOL && e1 <= GATE_BOUND_TOL && e2 <= GATE_BOUND_TOL,
    })
}

#[derive(Debug)]
pub struct BatchOutcome {
    pub gate: GateReport,
    /// One entry per configured case, in config order.
    pub reports: Vec<std::result::Result<VerificationReport, String>>,
    /// 0 when the gate and every case pass, 1 otherwise.
    pub exit_code: i32,
}

fn parse_config(path: &Path) -> Result<Vec<VerificationCase>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg: BatchConfig = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut seen = HashSet::new();
    for c in &cfg.case {
        if !seen.insert(c.id.as_str()) {
            return Err(Error::Config(format!("duplicate case id `{}`", c.id)));
        }
        c.validate().map_err(|e| Error::Config(format!("case `{}`: {e}", c.id)))?;
    }
    Ok(cfg.case)
}

/// Runs cases concurrently; results come back in input order.
pub fn run_cases(cases: &[VerificationCase]) -> Vec<Result<VerificationReport>> {
    cases.par_iter().map(verify_case).collect()
}

#[derive(Serialize)]
struct FailedCase<'a> {
    schema: u32,
    id: &'a str,
    claim: String,
    verdict: Verdict,
    error: &'a str,
}

/// Parses the batch config, runs the closed-form gate and then every case,
/// and writes `<id>.json`, `gate.json` and `summary.csv` into `out_dir`.
///
/// Config problems (unreadable file, parse errors, duplicate ids, invalid
/// cases) come back as [`Error::Config`].
pub fn run_batch(config: &Path, out_dir: &Path) -> Result<BatchOutcome> {
    let cases = parse_config(config)?;
    fs::create_dir_all(out_dir)?;
    let gate = closed_form_gate()?;
    fs::write(out_dir.join("gate.json"), serde_json::to_string_pretty(&gate)? + "\n")?;
    let results = if gate.passed { run_cases(&cases) } else { Vec::new() };

    let mut summary = csv::Writer::from_path(out_dir.join("summary.csv"))?;
    summary.write_record(["id", "claim", "empirical_C", "drift", "verdict"])?;
    let mut reports = Vec::with_capacity(results.len());
    let mut all_pass = gate.passed;
    for (case, result) in cases.iter().zip(results) {
        let path = out_dir.join(format!("{}.json", case.id));
        match result {
            Ok(r) => {
                fs::write(&path, serde_json::to_string_pretty(&r)? + "\n")?;
                summary.write_record([
                    r.id.clone(),
                    r.claim.label(),
                    r.empirical_c.to_string(),
                    r.refinement_drift.to_string(),
                    r.verdict.to_string(),
                ])?;
                all_pass &= r.verdict == Verdict::Pass;
                reports.push(Ok(r));
            }
            Err(e) => {
                let msg = e.to_string();
                let failed =
                    FailedCase { schema: SCHEMA_VERSION, id: &case.id, claim: case.claim.label(), verdict: Verdict::Fail, error: &msg };
                fs::write(&path, serde_json::to_string_pretty(&failed)? + "\n")?;
                summary.write_record([case.id.clone(), case.claim.label(), String::new(), String::new(), "fail".into()])?;
                all_pass = false;
                reports.push(Err(msg));
            }
        }
    }
    summary.flush()?;
    Ok(BatchOutcome { gate, reports, exit_code: if all_pass { 0 } else { 1 } })
}
