//! `R(lambda) g = int_0^inf e^{-lambda t} T(t) g dt` by composite Gauss-Legendre in `t`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{apply_l_infty_grid_with, lp_norm, GridField};
use crate::quadrature::{composite_gauss_legendre, log_breaks, Rule};
use crate::semigroup::SemigroupPlan;
use crate::spectral::{spectral_constants, EigenStructure, OuProblem};

pub const DEFAULT_PANELS: usize = 12;
pub const DEFAULT_NODES_PER_PANEL: usize = 8;
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-3;
/// Geometric panels covering `[0, t_min]` in [`HeadCorrection::Quadrature`] mode.
pub const HEAD_PANELS: usize = 4;
/// Edge/max ratio accepted for resolvent solutions. Their slowest modes spread
/// like `exp(-Re lambda t)` times heat flow, so they sit a little above the
/// Schwartz-sample level at the edge of a desk-sized box.
pub const SOLUTION_DECAY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HeadCorrection {
    /// Integrate `[0, t_min]` with Gauss-Legendre on geometric panels.
    #[default]
    Quadrature,
    /// `T(t) g ~ g` on `[0, t_min]`, i.e. add `(1 - e^{-lambda t_min}) / lambda * g`.
    AnalyticHead,
    /// Drop `[0, t_min]`.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceQuadSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub head_correction: HeadCorrection,
}

/// Smallest `t` whose kernel width `sqrt(2 a_min t)` spans two grid cells.
pub fn resolvable_t_min(a_min: f64, h: f64) -> f64 {
    2.0 * h * h / a_min * (1.0 + 1e-12)
}

/// Bound on the discarded tail `int_{t_max}^inf`, relative to `|g|_p`.
pub fn tail_bound(kappa_y: f64, a_1: f64, d: usize, shift: f64, t_max: f64) -> f64 {
    kappa_y * a_1.powf(d as f64 / 2.0) * (-shift * t_max).exp() / shift
}

impl LaplaceQuadSpec {
    /// Default layout for `lambda` on the plan's grid: `t_min` at the
    /// resolution limit and `t_max` where [`tail_bound`] reaches `tail_tol`.
    pub fn for_plan(plan: &SemigroupPlan, lambda: Complex64, tail_tol: f64) -> Result<Self> {
        let problem = plan.problem();
        let consts = spectral_constants(problem.a(), problem.b())?;
        let shift = lambda.re + consts.b_0;
        if !(shift > 0.0) {
            return Err(resolvent_precondition(lambda, consts.b_0));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tail tolerance must lie in (0, 1), got {tail_tol}")));
        }
        let t_min = resolvable_t_min(consts.a_min, plan.spec().h());
        let prefactor = plan.eig().kappa_y * consts.a_1.powf(problem.dim() as f64 / 2.0) / shift;
        let t_max = ((prefactor / tail_tol).ln() / shift).max((1.0 / tail_tol).ln() / shift).max(4.0 * t_min);
        Ok(Self {
            t_min,
            t_max,
            panels: DEFAULT_PANELS,
            nodes_per_panel: DEFAULT_NODES_PER_PANEL,
            head_correction: HeadCorrection::default(),
        })
    }

    pub fn validate(&self, a_min: f64, h: f64) -> Result<()> {
        if self.panels == 0 || self.nodes_per_panel == 0 {
            return Err(Error::Config {
                field: "quadrature".into(),
                message: "panels and nodes_per_panel must be positive".into(),
            });
        }
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::Config {
                field: "quadrature".into(),
                message: format!("need 0 < t_min < t_max, got [{}, {}]", self.t_min, self.t_max),
            });
        }
        let width = (2.0 * a_min * self.t_min).sqrt();
        if width < 2.0 * h {
            return Err(Error::Unresolvable {
                detail: format!("t_min = {:.4e} gives kernel width {width:.4e}", self.t_min),
                max_spacing: width / 2.0,
            });
        }
        Ok(())
    }

    /// Nodes and weights in `t`, head panels first.
    pub fn rule(&self) -> Rule {
        let mut breaks = Vec::new();
        if self.head_correction == HeadCorrection::Quadrature {
            breaks.push(0.0);
            breaks.extend((1..HEAD_PANELS).rev().map(|k| self.t_min / 4f64.powi(k as i32)));
        }
        breaks.extend(log_breaks(self.t_min, self.t_max, self.panels));
        composite_gauss_legendre(&breaks, self.nodes_per_panel)
    }
}

fn resolvent_precondition(lambda: Complex64, b_0: f64) -> Error {
    Error::Precondition(format!("Re lambda = {} must exceed -b_0 = {}", lambda.re, -b_0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventSolution {
    #[serde(skip)]
    pub v: GridField,
    pub lambda: Complex64,
    #[serde(skip)]
    pub g_ref: GridField,
    /// `|(lambda - L) v - g|_p / |g|_p` with the grid operator.
    pub residual_norm: f64,
    pub residual_tol: f64,
    pub p: f64,
    pub quad: LaplaceQuadSpec,
}

impl ResolventSolution {
    pub fn residual_ok(&self) -> bool {
        self.residual_norm <= self.residual_tol
    }
}

/// Solves `(lambda - L) v = g`, building a semigroup plan on `g`'s grid.
pub fn resolve(
    problem: &OuProblem,
    eig: &EigenStructure,
    g: &GridField,
    lambda: Complex64,
    quad: &LaplaceQuadSpec,
) -> Result<ResolventSolution> {
    let plan = SemigroupPlan::with_eigenstructure(problem, eig.clone(), g.spec)?;
    resolve_with_plan(&plan, g, lambda, quad)
}

pub fn resolve_with_plan(
    plan: &SemigroupPlan,
    g: &GridField,
    lambda: Complex64,
    quad: &LaplaceQuadSpec,
) -> Result<ResolventSolution> {
    let problem = plan.problem();
    let b_0 = plan.eig().lam_b.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if !(lambda.re + b_0 > 0.0) {
        return Err(resolvent_precondition(lambda, b_0));
    }
    let a_min = plan.eig().lam_a.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    quad.validate(a_min, plan.spec().h())?;

    let rule = quad.rule();
    let nodes: Vec<(f64, f64)> = rule.iter().collect();
    // Bounded batches keep memory flat; within a batch nodes run in parallel,
    // and the sum is always taken in node order.
    let batch = 2 * rayon::current_num_threads().max(1);
    let mut v = GridField::zeros(g.spec, g.components);
    for chunk in nodes.chunks(batch) {
        let terms: Vec<GridField> = chunk
            .par_iter()
            .map(|&(t, w)| Ok(plan.apply(g, t)?.scaled((-lambda * t).exp() * w)))
            .collect::<Result<_>>()?;
        for term in &terms {
            v = v.axpy(Complex64::new(1.0, 0.0), term)?;
        }
    }
    if quad.head_correction == HeadCorrection::AnalyticHead {
        let weight = (Complex64::new(1.0, 0.0) - (-lambda * quad.t_min).exp()) / lambda;
        v = v.axpy(weight, g)?;
    }

    let p = problem.p();
    let residual_norm = residual(problem, &v, g, lambda, p)?;
    Ok(ResolventSolution {
        v,
        lambda,
        g_ref: g.clone(),
        residual_norm,
        residual_tol: DEFAULT_RESIDUAL_TOL,
        p,
        quad: *quad,
    })
}

/// `|(lambda - L) v - g|_p / |g|_p` with the fourth-order grid operator.
pub fn residual(problem: &OuProblem, v: &GridField, g: &GridField, lambda: Complex64, p: f64) -> Result<f64> {
    v.decay_diagnostic(SOLUTION_DECAY_TOL);
    let lv = apply_l_infty_grid_with(problem, v, Some(SOLUTION_DECAY_TOL))?;
    let r = v.scaled(lambda).sub(&lv)?.sub(g)?;
    Ok(lp_norm(&r, p) / lp_norm(g, p))
}
