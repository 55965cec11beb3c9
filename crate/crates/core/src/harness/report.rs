use std::fmt::Write as _;

use serde::Serialize;

use super::config::{Config, GridConfig, Matrices, QuadratureConfig, Tolerances};
use crate::check::{CheckRecord, Status};
use crate::dissipativity::DissipativityCertificate;
use crate::spectral::{AssumptionReport, SpectralConstants};

#[derive(Debug, Clone, Serialize)]
pub struct ProblemEcho {
    pub matrices: Matrices,
    pub exponent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub grid: GridConfig,
    pub quadrature: QuadratureConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub crate_version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub problem: ProblemEcho,
    pub assumptions: Option<AssumptionReport>,
    pub constants: Option<SpectralConstants>,
    pub certificate: Option<DissipativityCertificate>,
    pub records: Vec<CheckRecord>,
    /// Stage at which a hard failure stopped the run.
    pub truncated_at: Option<String>,
    pub environment: Environment,
    /// AND over the applicable records.
    pub overall: Status,
}

impl VerificationReport {
    pub(crate) fn new(cfg: &Config) -> Self {
        Self {
            name: cfg.name.clone(),
            problem: ProblemEcho { matrices: cfg.matrices.clone(), exponent: cfg.exponent },
            assumptions: None,
            constants: None,
            certificate: None,
            records: Vec::new(),
            truncated_at: None,
            environment: Environment {
                grid: cfg.grid,
                quadrature: cfg.quadrature,
                tolerances: cfg.tolerances,
                seed: cfg.seed,
                crate_version: env!("CARGO_PKG_VERSION"),
            },
            overall: Status::Pass,
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.overall = if self.records.iter().all(CheckRecord::passed) { Status::Pass } else { Status::Fail };
        self
    }

    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "configuration: {}", self.name);
        if let Some(k) = &self.constants {
            let _ = writeln!(
                out,
                "a_min={:.6} a_max={:.6} a_0={:.6} a_1={:.6} a_2={:.6} b_0={:.6} beta_A={:.6} beta_B={:.6}",
                k.a_min, k.a_max, k.a_0, k.a_1, k.a_2, k.b_0, k.beta_a, k.beta_b
            );
        }
        if let Some(c) = &self.certificate {
            let _ = writeln!(
                out,
                "gamma_A={} (p={}, method {:?}, certified {})",
                fmt_num(c.gamma_a),
                c.p,
                c.method,
                c.certified
            );
        }
        let _ = writeln!(out, "{:<6} {:<48} {:>12} {:>12} {:>11}  anchor", "status", "check", "lhs", "rhs", "margin");
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::NotApplicable => "n/a",
            };
            let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{status:<6} {:<48} {:>12} {:>12} {:>11}  {}",
                r.name,
                opt(r.lhs),
                opt(r.rhs),
                opt(r.margin),
                r.anchor
            );
        }
        if let Some(stage) = &self.truncated_at {
            let _ = writeln!(out, "run stopped after stage `{stage}`");
        }
        let _ = writeln!(out, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn fmt_num(x: f64) -> String {
    if x == 0.0 || (1e-3..1e4).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        format!("{x:.4e}")
    }
}
