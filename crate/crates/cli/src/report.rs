//! Deterministic verification reports: checks are sorted by name and every
//! field except the timing is byte-stable for a fixed config and seed.

use serde::{Deserialize, Serialize};

use crate::config::{ComplexField, SuiteConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// FNV-1a digest of the check's concrete inputs.
    pub inputs: String,
    pub residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn measured(name: impl Into<String>, inputs: &str, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            inputs: fnv_digest(inputs),
            residual,
            pass: residual.is_finite() && residual < tol,
            error: None,
        }
    }

    /// A numerical failure surfaces as a failed check, never a crash.
    pub fn errored(name: impl Into<String>, inputs: &str, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            inputs: fnv_digest(inputs),
            residual: f64::INFINITY,
            pass: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub tau: ComplexField,
    pub mu: ComplexField,
    pub window: (i32, i32),
    pub k: Option<usize>,
    pub draws: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema: u32,
    pub suite: String,
    pub params: ParamsEcho,
    pub checks: Vec<Check>,
    pub max_residual: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
}

impl ResidualReport {
    pub fn new(cfg: &SuiteConfig, mut checks: Vec<Check>, wall_time_ms: f64) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let max_residual = checks
            .iter()
            .map(|c| c.residual)
            .fold(0.0f64, |m, r| if r.is_finite() { m.max(r) } else { f64::INFINITY });
        let pass = checks.iter().all(|c| c.pass);
        Self {
            schema: SCHEMA_VERSION,
            suite: cfg.suite.clone(),
            params: ParamsEcho {
                tau: cfg.tau,
                mu: cfg.mu,
                window: cfg.window,
                k: cfg.k,
                draws: cfg.draws,
                seed: cfg.seed,
                tol: cfg.tol,
            },
            checks,
            max_residual,
            pass,
            wall_time_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub max_residual: f64,
    /// "true", "false" or "skipped"
    pub pass: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param,value,max_residual,pass\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.param, r.value, r.max_residual, r.pass));
    }
    out
}

/// FNV-1a 64-bit digest, hex encoded; stable across platforms.
pub fn fnv_digest(s: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable() {
        assert_eq!(fnv_digest("abc"), fnv_digest("abc"));
        assert_ne!(fnv_digest("abc"), fnv_digest("abd"));
        assert_eq!(fnv_digest(""), "cbf29ce484222325");
    }

    #[test]
    fn report_sorts_checks_and_aggregates() {
        let cfg = SuiteConfig::default();
        let checks = vec![
            Check::measured("b-check", "x", 1e-12, 1e-8),
            Check::measured("a-check", "y", 1e-10, 1e-8),
        ];
        let rep = ResidualReport::new(&cfg, checks, 1.0);
        assert_eq!(rep.checks[0].name, "a-check");
        assert!(rep.pass);
        assert!((rep.max_residual - 1e-10).abs() < 1e-25);
        let failing = vec![Check::measured("c", "z", 1e-3, 1e-8)];
        assert!(!ResidualReport::new(&cfg, failing, 1.0).pass);
    }

    #[test]
    fn errored_check_fails_without_crashing() {
        let c = Check::errored("x", "inputs", "singular matrix");
        assert!(!c.pass);
        assert!(c.residual.is_infinite());
    }

    #[test]
    fn csv_header_matches_contract() {
        let rows = vec![SweepRow {
            param: "xi".into(),
            value: 0.25,
            max_residual: 1e-11,
            pass: "true".into(),
            reason: None,
        }];
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("param,value,max_residual,pass\n"));
        assert!(csv.contains("xi,0.25,"));
    }
}
