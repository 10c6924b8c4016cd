//! Serializable reports with a stable key layout.
//!
//! Floats are rounded to [`OUTPUT_SIG_DIGITS`] significant digits before
//! they are stored, so emitted JSON parses back to an identical value.

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::catalog::{Reduction, SignFormCheck};
use crate::oracle::SearchResult;
use crate::scalar::Scalar;
use crate::scenario::{format_nu, Assignment, BellScenario};
use crate::tolerance::OUTPUT_SIG_DIGITS;

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 || digits == 0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn out<T: Scalar>(x: T) -> f64 {
    round_sig(x.to_f64_lossy(), OUTPUT_SIG_DIGITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioJson {
    pub n: usize,
    pub d: usize,
    pub nu: String,
}

impl From<&BellScenario> for ScenarioJson {
    fn from(s: &BellScenario) -> Self {
        ScenarioJson {
            n: s.n_parties(),
            d: s.n_outcomes(),
            nu: format_nu(s.nu()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl From<&Assignment> for WitnessJson {
    fn from(a: &Assignment) -> Self {
        WitnessJson {
            alpha: a.alpha().to_vec(),
            beta: a.beta().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReportJson {
    pub scenario: ScenarioJson,
    pub closed_form: Option<f64>,
    pub brute_force: Option<f64>,
    pub trial_bound: f64,
    pub quantum_reference: Option<f64>,
    pub witnesses: Vec<WitnessJson>,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignments_scanned: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax_count: Option<u64>,
}

impl BoundReportJson {
    pub fn from_report<T: Scalar>(r: &BoundReport<T>, elapsed_ms: u64) -> Self {
        BoundReportJson {
            scenario: ScenarioJson::from(&r.scenario),
            closed_form: r.closed_form.map(out),
            brute_force: r.brute_force.map(out),
            trial_bound: out(r.trial_bound),
            quantum_reference: r.quantum_reference.map(out),
            witnesses: r.witnesses.iter().map(WitnessJson::from).collect(),
            elapsed_ms,
            ratio: r.ratio().map(out),
            assignments_scanned: None,
            argmax_count: None,
        }
    }

    /// Attaches the scan statistics of an exhaustive search.
    pub fn with_search<T: Scalar>(mut self, result: &SearchResult<T>) -> Self {
        self.assignments_scanned = Some(result.assignments_scanned);
        self.argmax_count = Some(result.argmax_count);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionJson {
    pub name: String,
    pub n: usize,
    pub nu: String,
    /// `k` in `(√2)^k`.
    pub sqrt2_power: i32,
    pub scale: f64,
    pub verified: bool,
    pub max_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_form_exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_form_proportional: Option<bool>,
}

impl ReductionJson {
    pub fn from_reduction<T: Scalar>(r: &Reduction<T>, sign: Option<&SignFormCheck<T>>) -> Self {
        ReductionJson {
            name: r.name.to_string(),
            n: r.n,
            nu: format_nu(r.nu),
            sqrt2_power: r.sqrt2_power,
            scale: out(r.scale),
            verified: r.verified,
            max_error: out(r.max_error),
            sign_form_exact: sign.map(|c| c.exact),
            sign_form_proportional: sign.map(|c| c.proportional),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogReportJson {
    pub reduction: ReductionJson,
    pub bound: BoundReportJson,
}
