//! JSON run configuration. Complex entries are `[re, im]` pairs; the drift is real.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::resolvent::HeadCorrection;
use crate::spectral::{CMat, ComplexMatrixRepr, OuProblem, RMat};

/// Configurations shipped with the crate, addressable by name or file name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("identity-2d", include_str!("../../configs/identity-2d.json")),
    ("a4-violator", include_str!("../../configs/a4-violator.json")),
    ("rotating-pencil", include_str!("../../configs/rotating-pencil.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrices {
    #[serde(rename = "A")]
    pub a: ComplexMatrixRepr,
    #[serde(rename = "B")]
    pub b: ComplexMatrixRepr,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub half_extent: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub tail_tol: f64,
    pub head_correction: HeadCorrection,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panels: crate::resolvent::DEFAULT_PANELS,
            nodes_per_panel: crate::resolvent::DEFAULT_NODES_PER_PANEL,
            tail_tol: crate::resolvent::DEFAULT_TAIL_TOL,
            head_correction: HeadCorrection::default(),
        }
    }
}

/// Every tolerance a suite compares against, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub moment_mass: f64,
    pub moment_first: f64,
    pub moment_second: f64,
    pub moment_bound: f64,
    pub scaling_exponent: f64,
    pub law_rotational: f64,
    pub law_drift_free: f64,
    pub generator_order: f64,
    pub residual: f64,
    pub estimate: f64,
    pub dissipativity: f64,
    pub ibp: f64,
    pub ibp_equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            moment_mass: 1e-7,
            moment_first: 1e-9,
            moment_second: 1e-6,
            moment_bound: 1e-3,
            scaling_exponent: 0.05,
            law_rotational: 1e-5,
            law_drift_free: 1e-10,
            generator_order: 0.5,
            residual: crate::resolvent::DEFAULT_RESIDUAL_TOL,
            estimate: crate::resolvent::ESTIMATE_TOL,
            dissipativity: crate::resolvent::DISSIPATIVITY_TOL,
            ibp: crate::resolvent::IBP_TOL,
            ibp_equality: crate::resolvent::IBP_EQUALITY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Suites {
    pub kernel: bool,
    pub semigroup: bool,
    pub resolvent: bool,
    pub lemma: bool,
    /// Times for the kernel moment suite.
    pub kernel_times: Vec<f64>,
    /// `t = s` for the semigroup law.
    pub law_time: f64,
    /// Step ladder for strong continuity and the generator quotient.
    pub generator_steps: Vec<f64>,
    /// Resolvent parameters as `[re, im]`.
    pub lambdas: Vec<[f64; 2]>,
    /// Positive reals for the dissipativity probe.
    pub dissipativity_lambdas: Vec<f64>,
}

impl Default for Suites {
    fn default() -> Self {
        Self {
            kernel: true,
            semigroup: true,
            resolvent: true,
            lemma: true,
            kernel_times: vec![0.05, 0.5, 2.0],
            law_time: 0.25,
            generator_steps: vec![0.2, 0.1, 0.05, 0.025],
            lambdas: vec![[1.0, 0.0], [2.0, 2.0], [5.0, 0.0]],
            dissipativity_lambdas: vec![0.1, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub name: String,
    pub matrices: Matrices,
    pub exponent: f64,
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub suites: Suites,
    #[serde(default)]
    pub seed: u64,
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

fn complex_matrix(field: &str, repr: &ComplexMatrixRepr, n: usize) -> Result<CMat> {
    let rows = &repr.0;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        let shape: Vec<usize> = rows.iter().map(Vec::len).collect();
        return Err(config_error(field, format!("expected a {n}x{n} matrix, got row lengths {shape:?}")));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(config_error(field, "entries must be finite"));
    }
    Ok(CMat::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| config_error("<document>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a file; a bare bundled name (`identity-2d` or `identity-2d.json`)
    /// that does not exist on disk resolves to the shipped copy.
    pub fn load(path: &Path) -> Result<Self> {
        if path.exists() {
            return Self::from_json(&std::fs::read_to_string(path)?);
        }
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
        let stem = name.strip_suffix(".json").unwrap_or(name);
        match Self::bundled(stem) {
            Some(cfg) if path.parent().is_none_or(|p| p.as_os_str().is_empty()) => cfg,
            _ => Err(config_error("--config", format!("no such file: {}", path.display()))),
        }
    }

    pub fn bundled(name: &str) -> Option<Result<Self>> {
        BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| Self::from_json(text))
    }

    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        self.grid_spec()?;
        let q = &self.quadrature;
        if q.panels == 0 || q.nodes_per_panel == 0 {
            return Err(config_error("quadrature", "panels and nodes_per_panel must be positive"));
        }
        if !(q.tail_tol > 0.0 && q.tail_tol < 1.0) {
            return Err(config_error("quadrature.tail_tol", "must lie in (0, 1)"));
        }
        let s = &self.suites;
        if s.kernel_times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(config_error("suites.kernel_times", "times must be positive"));
        }
        if !(s.law_time > 0.0 && s.law_time.is_finite()) {
            return Err(config_error("suites.law_time", "must be positive"));
        }
        if s.generator_steps.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(config_error("suites.generator_steps", "steps must be positive"));
        }
        if s.lambdas.iter().flatten().any(|x| !x.is_finite()) {
            return Err(config_error("suites.lambdas", "entries must be finite"));
        }
        if s.dissipativity_lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(config_error("suites.dissipativity_lambdas", "values must be positive"));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<OuProblem> {
        let n = self.matrices.a.0.len();
        if n == 0 {
            return Err(config_error("matrices.A", "matrix is empty"));
        }
        let a = complex_matrix("matrices.A", &self.matrices.a, n)?;
        let b = complex_matrix("matrices.B", &self.matrices.b, n)?;
        let d = self.grid.d;
        let rows = &self.matrices.s;
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(config_error("matrices.S", format!("expected a {d}x{d} real matrix to match grid.d")));
        }
        let s = RMat::from_fn(d, d, |i, j| rows[i][j]);
        OuProblem::new(a, b, s, self.exponent).map_err(|e| match e {
            Error::InvalidParameter(m) => config_error("exponent", m),
            other => config_error("matrices", other.to_string()),
        })
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.d, self.grid.half_extent, self.grid.n).map_err(|e| config_error("grid", e.to_string()))
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        self.suites.lambdas.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
