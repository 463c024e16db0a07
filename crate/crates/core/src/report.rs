//! Versioned JSON report envelopes shared by the command-line front end and
//! the test suites. Field layouts are part of the external interface; bump
//! [`SCHEMA`] when changing them.

use serde::{Deserialize, Serialize};

use crate::eta_einstein::{ObstructionReport, ScanOutcome, TheoremVerification, TraceChecks, WorstSample};
use crate::fiber::FiberCheck;
use crate::twistor::{OracleComparison, OracleSample};

/// Schema tag embedded in every report.
pub const SCHEMA: &str = "twistor-report/v1";

/// Run parameters echoed into reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamsJson {
    pub n: usize,
    pub k: usize,
    pub nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangents: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Fit block of the eta-Einstein reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitJson {
    pub a: f64,
    pub b: f64,
    pub residual: f64,
    pub condition: f64,
}

/// `verify-theorem` report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremReportJson {
    pub schema: &'static str,
    pub kind: &'static str,
    pub params: ParamsJson,
    pub fit: FitJson,
    pub theorem_point: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_b: Option<f64>,
    pub verdict_eta_einstein: bool,
    pub matches_expected: bool,
    pub twistor_scalar: f64,
    pub checks: TraceChecks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<WorstSample>,
}

impl TheoremReportJson {
    pub fn from_outcome(v: &TheoremVerification, points: usize, tangents: usize) -> Self {
        Self {
            schema: SCHEMA,
            kind: "verify_theorem",
            params: ParamsJson {
                n: v.n,
                k: v.k,
                nu: v.nu,
                t: Some(v.t),
                seed: v.seed,
                points: Some(points),
                tangents: Some(tangents),
                step: None,
                tolerance: Some(v.tolerance),
            },
            fit: FitJson {
                a: v.a,
                b: v.b,
                residual: v.residual,
                condition: v.condition,
            },
            theorem_point: v.theorem_point,
            expected_a: v.expected_a,
            expected_b: v.expected_b,
            verdict_eta_einstein: v.eta_einstein,
            matches_expected: v.matches_expected,
            twistor_scalar: v.twistor_scalar,
            checks: v.checks.clone(),
            counterexample: v.counterexample.clone(),
        }
    }
}

/// `scan` report (the grid also serializes to CSV via [`scan_csv`]).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanReportJson {
    pub schema: &'static str,
    pub kind: &'static str,
    pub params: ParamsJson,
    pub outcome: ScanOutcome,
}

impl ScanReportJson {
    pub fn from_outcome(outcome: ScanOutcome, points: usize, tangents: usize) -> Self {
        Self {
            schema: SCHEMA,
            kind: "scan",
            params: ParamsJson {
                n: outcome.n,
                k: (outcome.n - 1) / 2,
                nu: outcome.nu,
                t: None,
                seed: outcome.seed,
                points: Some(points),
                tangents: Some(tangents),
                step: None,
                tolerance: None,
            },
            outcome,
        }
    }
}

/// CSV rendering of a scan curve: header plus one `t,a,b,residual` row per
/// grid point.
pub fn scan_csv(outcome: &ScanOutcome) -> String {
    let mut out = String::from("t,a,b,residual\n");
    for p in &outcome.grid {
        out.push_str(&format!("{},{},{},{}\n", p.t, p.a, p.b, p.residual));
    }
    out
}

/// `oracle-compare` report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReportJson {
    pub schema: &'static str,
    pub kind: &'static str,
    pub params: ParamsJson,
    pub max_rel_deviation: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
    pub samples: Vec<OracleSampleJson>,
}

/// One oracle correspondence record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleSampleJson {
    pub point: Vec<f64>,
    pub tangent: Vec<f64>,
    pub h_t: f64,
    pub eta: f64,
    pub c_t_analytic: f64,
    pub c_t_oracle: f64,
    pub rel_deviation: f64,
}

impl From<&OracleSample> for OracleSampleJson {
    fn from(s: &OracleSample) -> Self {
        Self {
            point: s.point.clone(),
            tangent: s.tangent.clone(),
            h_t: s.h_t,
            eta: s.eta,
            c_t_analytic: s.c_t_analytic,
            c_t_oracle: s.c_t_oracle,
            rel_deviation: s.rel_deviation,
        }
    }
}

impl OracleReportJson {
    pub fn from_comparison(
        cmp: &OracleComparison,
        nu: f64,
        t: f64,
        seed: u64,
        step: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            schema: SCHEMA,
            kind: "oracle_compare",
            params: ParamsJson {
                n: 3,
                k: 1,
                nu,
                t: Some(t),
                seed,
                points: None,
                tangents: Some(cmp.samples.len()),
                step: Some(step),
                tolerance: Some(tolerance),
            },
            max_rel_deviation: cmp.max_rel_deviation,
            tolerance,
            within_tolerance: cmp.max_rel_deviation <= tolerance,
            samples: cmp.samples.iter().map(Into::into).collect(),
        }
    }
}

/// `obstructions` report: one entry per sampled structure/point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObstructionsReportJson {
    pub schema: &'static str,
    pub kind: &'static str,
    pub params: ParamsJson,
    pub samples: Vec<ObstructionReport>,
    pub max_curvature_identity_residual: f64,
}

/// `fiber-checks` report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberReportJson {
    pub schema: &'static str,
    pub kind: &'static str,
    pub checks: Vec<FiberCheck>,
}

/// `curvature` report: the curvature bundle of a named chart at a point,
/// expressed in the Gram–Schmidt frame of the coordinate basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureReportJson {
    pub schema: &'static str,
    pub kind: &'static str,
    pub chart: String,
    pub point: Vec<f64>,
    pub step: f64,
    /// Columns of the orthonormal frame in chart coordinates.
    pub frame: Vec<Vec<f64>>,
    /// Curvature operator on lexicographic frame two-vectors.
    pub operator: Vec<Vec<f64>>,
    /// Ricci form in frame components.
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
    /// Frobenius norms of the derivative operator per frame direction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nabla_norms: Option<Vec<f64>>,
}

/// Row-major copy of a matrix for serialization.
pub fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
