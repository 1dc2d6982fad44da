//! Run configuration and machine-readable reports.
//!
//! Reports are deterministic: with the same configuration and seed two runs
//! produce byte-identical JSON. Wall-clock timings are therefore only
//! recorded when explicitly requested.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::Tolerances;

/// Configuration shared by every verification suite.
#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub l: usize,
    pub seed: u64,
    pub trials: usize,
    pub sample_points: usize,
    pub tol: Tolerances,
    /// Record per-check wall-clock times (breaks byte-determinism).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            l: 4,
            seed: 0,
            trials: 20,
            sample_points: 10,
            tol: Tolerances::default(),
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(crate::error::Error::InvalidTolerance(
                "trials must be at least 1".into(),
            ));
        }
        if self.sample_points < 1 {
            return Err(crate::error::Error::InvalidTolerance(
                "sample_points must be at least 1".into(),
            ));
        }
        Tolerances::new(self.tol.rel, self.tol.rank_cut).map(|_| ())
    }
}

#[derive(Clone, Debug, Serialize)]
struct ConfigEcho {
    l: usize,
    seed: u64,
    trials: usize,
    samples: usize,
    rel: f64,
    rank_cut: f64,
}

/// One verified property. `max_residual` is compared against `tolerance`;
/// for counterexample checks the record passes when the residual exceeds
/// the floor, as flagged by `exceeds`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Key into the property registry naming the identity being checked.
    pub property: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub exceeds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    /// Standard check: passes when the residual is at most the tolerance.
    pub fn bounded(name: &str, property: &str, residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            property: property.into(),
            status: if residual <= tolerance { "pass" } else { "fail" },
            max_residual: Some(residual),
            tolerance,
            exceeds: false,
            error: None,
            elapsed_ms: None,
        }
    }

    /// Counterexample check: passes when the residual exceeds the floor.
    pub fn exceeds_floor(name: &str, property: &str, residual: f64, floor: f64) -> Self {
        CheckRecord {
            name: name.into(),
            property: property.into(),
            status: if residual > floor { "pass" } else { "fail" },
            max_residual: Some(residual),
            tolerance: floor,
            exceeds: true,
            error: None,
            elapsed_ms: None,
        }
    }

    /// A check that could not run to completion.
    pub fn errored(name: &str, property: &str, tolerance: f64, err: &crate::error::Error) -> Self {
        CheckRecord {
            name: name.into(),
            property: property.into(),
            status: "fail",
            max_residual: None,
            tolerance,
            exceeds: false,
            error: Some(err.to_string()),
            elapsed_ms: None,
        }
    }
}

/// Suite outcome: configuration echo, per-check records, summary counts.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn new(suite: &str, cfg: &RunConfig, mut checks: Vec<CheckRecord>) -> Self {
        // Deterministic record order regardless of how suites ran.
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().filter(|c| c.passed()).count();
        let failed = checks.len() - passed;
        Report {
            suite: suite.into(),
            config: ConfigEcho {
                l: cfg.l,
                seed: cfg.seed,
                trials: cfg.trials,
                samples: cfg.sample_points,
                rel: cfg.tol.rel,
                rank_cut: cfg.tol.rank_cut,
            },
            checks,
            passed,
            failed,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// One human-readable line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let residual = c
                    .max_residual
                    .map_or_else(|| "n/a".into(), |r| format!("{r:.3e}"));
                let relation = if c.exceeds { ">" } else { "<=" };
                let mut line = format!(
                    "{} {} [{}] residual {} {} {:.1e}",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.name,
                    c.property,
                    residual,
                    relation,
                    c.tolerance
                );
                if let Some(e) = &c.error {
                    line.push_str(&format!(" ({e})"));
                }
                line
            })
            .collect()
    }
}
