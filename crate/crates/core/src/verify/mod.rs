//! Verification cases that tie solver output to the gradient inequalities,
//! plus report types and the batch runner.
//!
//! A case evaluates its claim twice, on the configured mesh and on the mesh
//! with twice as many intervals. The empirical constant is the worst ratio
//! on the configured mesh; the drift is its relative change under doubling.
//! A finite battery can only ever refute an inequality, so passing verdicts
//! read "consistent with".

mod batch;
mod cases;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::extended::Extended;
use crate::quad::log_grid;
use crate::radial::{FnSpec, RadialProblem};

pub use batch::{closed_form_gate, run_batch, run_cases, BatchOutcome, GateReport};
pub use cases::{data_profile, lorentz_case_spaces, Space};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest refinement drift a passing case may show.
pub const MAX_DRIFT: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// `|∇u|*(s) ≤ C (s^{−1/n′}∫_0^s f* + ∫_s^{|Ω|} f*(r) r^{−1/n′} dr)`.
    GradientRearrangement,
    /// Two-sided comparability of both sides of the gradient bound for the
    /// cone solution on `(|B₀|/2, |B₀|)`.
    SharpExample,
    /// The bound with `f**` in place of `f*` fails for the Laplace cone.
    MaximalAverageCounterexample,
    LorentzCaseI,
    LorentzCaseIi,
    LorentzCaseIii,
    LorentzCaseIv,
    LorentzCaseV,
    LorentzCaseVi,
    LorentzCaseVii,
    LorentzCaseViii,
    /// `‖∇u‖_∞ ≤ C‖f‖_{L^{n,1}}`.
    LinftyBound,
    /// `‖∇u − ∇v‖_{L^{n′,∞}} ≤ C‖f − g‖_{L¹}`.
    DifferenceWeakBound,
}

impl Claim {
    pub fn label(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }

    pub fn lorentz_case(self) -> Option<u8> {
        use Claim::*;
        Some(match self {
            LorentzCaseI => 1,
            LorentzCaseIi => 2,
            LorentzCaseIii => 3,
            LorentzCaseIv => 4,
            LorentzCaseV => 5,
            LorentzCaseVi => 6,
            LorentzCaseVii => 7,
            LorentzCaseViii => 8,
            _ => return None,
        })
    }
}

/// Log-spaced sample points `lo·|Ω| … hi·|Ω|`, both fractions in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SGrid {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Default for SGrid {
    fn default() -> Self {
        Self { points: 200, lo: 1e-3, hi: 1.0 - 1e-3 }
    }
}

impl SGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 || !(self.lo > 0.0 && self.lo < self.hi && self.hi < 1.0) {
            return Err(Error::Config(format!(
                "s_grid needs at least 2 points and 0 < lo < hi < 1, got {} points on [{}, {}]",
                self.points, self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn points_on(&self, omega: f64) -> Vec<f64> {
        log_grid(self.lo * omega, self.hi * omega, self.points)
    }
}

/// Exponents for the Lorentz-scale claims; which ones matter depends on the
/// case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct CaseExponents {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationCase {
    pub id: String,
    pub claim: Claim,
    pub problem: RadialProblem,
    #[serde(default)]
    pub s_grid: SGrid,
    #[serde(default)]
    pub seed: u64,
    /// Number of random smooth data added to the configured `f`.
    #[serde(default)]
    pub battery: usize,
    #[serde(default)]
    pub exponents: CaseExponents,
    /// Second datum for the difference claim; zero when absent.
    #[serde(default)]
    pub g: Option<FnSpec>,
}

impl VerificationCase {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return Err(Error::Config(format!("case id `{}` must be a nonempty file-name-safe string", self.id)));
        }
        self.s_grid.validate()?;
        self.problem.validate()
    }

    /// SHA-256 of the canonical JSON form of the case.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("cases serialize");
        hex::encode(Sha256::digest(json))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub s: f64,
    pub lhs: Extended,
    pub rhs: Extended,
    pub ratio: Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryPoint {
    pub data: String,
    pub lhs: Extended,
    pub rhs: Extended,
    pub ratio: Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub id: String,
    pub claim: Claim,
    pub verdict: Verdict,
    pub statement: String,
    pub empirical_c: Extended,
    pub refinement_drift: Extended,
    pub mesh_nodes: [usize; 2],
    pub regime: String,
    pub ratio_curve: Vec<CurvePoint>,
    pub battery: Vec<BatteryPoint>,
    pub metrics: BTreeMap<String, Extended>,
    pub config_hash: String,
}

/// `lhs/rhs` with `0/0 = 0` and `x/∞ = 0` for finite `x`.
pub(crate) fn ratio(lhs: Extended, rhs: Extended) -> Extended {
    match (lhs, rhs) {
        (Extended::Finite(a), _) if a == 0.0 => Extended::Finite(0.0),
        (Extended::Finite(_), Extended::Infinite) => Extended::Finite(0.0),
        (Extended::Infinite, _) => Extended::Infinite,
        (Extended::Finite(a), Extended::Finite(b)) => {
            if b == 0.0 {
                Extended::Infinite
            } else {
                Extended::from_f64(a / b)
            }
        }
    }
}

/// `|a − b|/|b|`, zero when both vanish.
pub(crate) fn drift(coarse: Extended, fine: Extended) -> Extended {
    match (coarse, fine) {
        (Extended::Finite(a), Extended::Finite(b)) => {
            if a == b {
                Extended::Finite(0.0)
            } else if b == 0.0 {
                Extended::Infinite
            } else {
                Extended::from_f64(((a - b) / b).abs())
            }
        }
        _ => Extended::Infinite,
    }
}

/// Runs one case and attaches its id to any error.
pub fn verify_case(case: &VerificationCase) -> Result<VerificationReport> {
    case.validate()
        .and_then(|_| cases::evaluate(case))
        .map_err(|e| Error::Case { id: case.id.clone(), source: Box::new(e) })
}

pub(crate) fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(domain(msg()))
    }
}
