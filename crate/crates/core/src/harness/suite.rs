//! Runs the checks in dependency order and collects them into one report.

use num_complex::Complex64;

use super::config::Config;
use super::report::VerificationReport;
use crate::check::{anchor, CheckRecord};
use crate::dissipativity::{certify_gamma, CertifyOptions, DissipativityCertificate};
use crate::error::{Error, Result};
use crate::fields::{lp_norm, GridSpec, SchwartzFunction};
use crate::kernel::{analytic_moment, moment_abs, moment_bound, moment_matrix, AbsQuad, MomentQuad};
use crate::resolvent::{
    dissipativity_probe, estimate_report, graph_norm_ratio, ibp_inequality_check, resolve_with_plan, BoxDomain, Bump,
    LaplaceQuadSpec, ShiftedField,
};
use crate::semigroup::{generator_difference, semigroup_law_check, SemigroupPlan};
use crate::spectral::{
    check_assumptions, eigenstructure, norm2, spectral_constants, CMat, EigenStructure, OuProblem, SpectralConstants,
};

/// Which suites to run after the always-on certification stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub kernel: bool,
    pub semigroup: bool,
    pub resolvent: bool,
    pub lemma: bool,
}

impl Selection {
    pub const CERTIFY: Self = Self { kernel: false, semigroup: false, resolvent: false, lemma: false };

    /// Everything the configuration enables.
    pub fn from_config(cfg: &Config) -> Self {
        let s = &cfg.suites;
        Self { kernel: s.kernel, semigroup: s.semigroup, resolvent: s.resolvent, lemma: s.lemma }
    }
}

/// The full pipeline as configured.
pub fn run_suite(cfg: &Config) -> Result<VerificationReport> {
    run_selected(cfg, Selection::from_config(cfg))
}

/// Polynomial-times-Gaussian test data with one nonzero entry per component.
pub fn test_function(d: usize, n: usize, sigma: f64) -> Result<SchwartzFunction> {
    let center: Vec<f64> = [0.3, -0.2, 0.1][..d].to_vec();
    let v: Vec<Complex64> = (0..n).map(|j| Complex64::new(1.0 / (j + 1) as f64, 0.25 * j as f64)).collect();
    let lin: Vec<Complex64> = (0..n).map(|j| Complex64::new(0.2, -0.1 * j as f64)).collect();
    let mut alpha = vec![0; d];
    alpha[0] = 1;
    SchwartzFunction::gaussian(center, sigma, v)?.with_term(alpha, lin)
}

struct Context {
    problem: OuProblem,
    spec: GridSpec,
    eig: EigenStructure,
    consts: SpectralConstants,
    cert: DissipativityCertificate,
}

pub fn run_selected(cfg: &Config, sel: Selection) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut report = VerificationReport::new(cfg);
    let ctx = match certify_stages(cfg, &mut report)? {
        Some(ctx) => ctx,
        None => return Ok(report.finish()),
    };
    if sel.kernel {
        kernel_suite(cfg, &ctx, &mut report);
    }
    if sel.semigroup || sel.resolvent {
        let plan = match SemigroupPlan::with_eigenstructure(&ctx.problem, ctx.eig.clone(), ctx.spec) {
            Ok(plan) => plan,
            Err(e) => {
                stage_error(&mut report, "semigroup plan", e);
                return Ok(report.finish());
            }
        };
        if sel.semigroup {
            semigroup_suite(cfg, &ctx, &plan, &mut report);
        }
        if sel.resolvent {
            resolvent_suite(cfg, &ctx, &plan, &mut report);
        }
    }
    if sel.lemma {
        lemma_suite(cfg, &ctx, &mut report);
    }
    Ok(report.finish())
}

fn stage_error(report: &mut VerificationReport, stage: &str, e: Error) {
    report.records.push(CheckRecord::flag(stage, anchor::PLUMBING, None, false).with_note(e.to_string()));
    report.truncated_at = Some(stage.into());
}

/// Assumptions, constants and gamma_A. `None` when a hard precondition failed.
fn certify_stages(cfg: &Config, report: &mut VerificationReport) -> Result<Option<Context>> {
    let problem = cfg.problem()?;
    let spec = cfg.grid_spec()?;

    let verdicts = check_assumptions(&problem);
    for v in verdicts.verdicts() {
        let mut rec = CheckRecord::flag(&format!("{} holds", v.condition), anchor::ASSUMPTIONS, Some(v.value), v.holds);
        rec.note = v.note.clone();
        report.records.push(rec);
    }
    report.records.push(CheckRecord::flag(
        "A4 => A3 => A2 on the computed verdicts",
        anchor::ASSUMPTIONS,
        None,
        verdicts.chain_consistent,
    ));
    let hard = [&verdicts.a1, &verdicts.a2, &verdicts.a5];
    let hard_ok = hard.iter().all(|v| v.holds);
    report.assumptions = Some(verdicts);
    if !hard_ok {
        report.truncated_at = Some("check_assumptions".into());
        return Ok(None);
    }

    let (eig, consts) = match eigenstructure(problem.a(), problem.b())
        .and_then(|eig| Ok((eig, spectral_constants(problem.a(), problem.b())?)))
    {
        Ok(pair) => pair,
        Err(e) => {
            stage_error(report, "spectral_constants", e);
            return Ok(None);
        }
    };
    report.constants = Some(consts);
    report.records.push(CheckRecord::flag("spectral constants", anchor::CONSTANTS, Some(consts.a_1), true));

    let opts = CertifyOptions { seed: cfg.seed, ..CertifyOptions::default() };
    let cert = match certify_gamma(problem.a(), problem.p(), &opts) {
        Ok(cert) => cert,
        Err(Error::NotConverged { incumbent }) => {
            report.records.push(
                CheckRecord::flag("gamma_A certified", anchor::DISSIPATIVITY_CONSTANT, Some(incumbent.gamma_a), false)
                    .with_note("multistart did not converge"),
            );
            report.certificate = Some(*incumbent);
            report.truncated_at = Some("certify_gamma".into());
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    report.records.push(CheckRecord::flag(
        "gamma_A > 0 (A4)",
        anchor::DISSIPATIVITY_CONSTANT,
        Some(cert.gamma_a),
        cert.passes(),
    ));
    report.certificate = Some(cert.clone());
    if !cert.passes() {
        report.truncated_at = Some("certify_gamma".into());
        return Ok(None);
    }
    Ok(Some(Context { problem, spec, eig, consts, cert }))
}

fn kernel_suite(cfg: &Config, ctx: &Context, report: &mut VerificationReport) {
    let tol = &cfg.tolerances;
    let (problem, eig) = (&ctx.problem, &ctx.eig);
    let d = problem.dim();
    for &t in &cfg.suites.kernel_times {
        for (k, name, limit) in [
            (0, "zeroth moment", tol.moment_mass),
            (1, "first moments", tol.moment_first),
            (2, "second moments", tol.moment_second),
        ] {
            let name = format!("{name} at t = {t}");
            match moment_matrix(problem, eig, k, t, &MomentQuad::default()) {
                Ok(data) => {
                    let err = data
                        .entries
                        .iter()
                        .map(|e| norm2(&(&e.value - analytic_moment(problem, &e.index, t))))
                        .fold(0.0, f64::max);
                    report.records.push(CheckRecord::small(&name, anchor::KERNEL_MOMENTS, err, limit));
                }
                Err(e) => report
                    .records
                    .push(CheckRecord::flag(&name, anchor::KERNEL_MOMENTS, None, false).with_note(e.to_string())),
            }
        }
        for k in 0..=3 {
            let name = format!("|K| moment bound k = {k} at t = {t}");
            match moment_abs(problem, eig, k, t, &AbsQuad::default()) {
                Ok(m) => {
                    let bound = moment_bound(&ctx.consts, eig.kappa_y, d, k, t);
                    report.records.push(CheckRecord::upper(
                        &name,
                        anchor::KERNEL_MOMENT_BOUND,
                        m.value,
                        bound,
                        tol.moment_bound,
                    ));
                }
                Err(e) => report
                    .records
                    .push(CheckRecord::flag(&name, anchor::KERNEL_MOMENT_BOUND, None, false).with_note(e.to_string())),
            }
        }
    }
    // The t^{k/2} law is exact without the potential, so fit on B = 0.
    let times = &cfg.suites.kernel_times;
    if times.len() < 2 {
        return;
    }
    let n = problem.size();
    let fitted = problem.with_b(CMat::zeros(n, n)).and_then(|p0| Ok((eigenstructure(p0.a(), p0.b())?, p0)));
    let (eig0, p0) = match fitted {
        Ok(pair) => pair,
        Err(e) => {
            report.records.push(
                CheckRecord::flag("moment scaling", anchor::KERNEL_MOMENT_BOUND, None, false).with_note(e.to_string()),
            );
            return;
        }
    };
    for k in 0..=3 {
        let name = format!("|K| moment t-exponent k = {k}");
        let values: Result<Vec<f64>> =
            times.iter().map(|&t| moment_abs(&p0, &eig0, k, t, &AbsQuad::default()).map(|m| m.value)).collect();
        match values {
            Ok(values) => {
                let slope = fit_slope(times, &values);
                let rec = CheckRecord::small(
                    &name,
                    anchor::KERNEL_MOMENT_BOUND,
                    (slope - k as f64 / 2.0).abs(),
                    tol.scaling_exponent,
                )
                .with_note(format!("fitted exponent {slope:.5}"));
                report.records.push(rec);
            }
            Err(e) => report
                .records
                .push(CheckRecord::flag(&name, anchor::KERNEL_MOMENT_BOUND, None, false).with_note(e.to_string())),
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn semigroup_suite(cfg: &Config, ctx: &Context, plan: &SemigroupPlan, report: &mut VerificationReport) {
    let tol = &cfg.tolerances;
    let phi = match test_function(ctx.spec.d, ctx.problem.size(), 1.0) {
        Ok(phi) => phi,
        Err(e) => return stage_error(report, "semigroup test data", e),
    };
    let run = || -> Result<Vec<CheckRecord>> {
        let mut out = Vec::new();
        let v = phi.sample(&ctx.spec)?;
        let t = cfg.suites.law_time;
        let defect = semigroup_law_check(plan, &v, t, t, 2.0)?;
        let limit = if ctx.problem.drift_is_zero() { tol.law_drift_free } else { tol.law_rotational };
        out.push(CheckRecord::small(
            &format!("T(t+s) = T(t)T(s) at t = s = {t}"),
            anchor::SEMIGROUP_LAW,
            defect,
            limit,
        ));

        let steps = &cfg.suites.generator_steps;
        let norm = lp_norm(&v, 2.0);
        let mut jumps = Vec::new();
        for &h in steps {
            jumps.push(lp_norm(&plan.apply(&v, h)?.sub(&v)?, 2.0) / norm);
        }
        let decreasing = jumps.windows(2).all(|w| w[1] < w[0]);
        out.push(
            CheckRecord::flag(
                "|T(h)v - v| decreases as h -> 0",
                anchor::SEMIGROUP_CONTINUITY,
                jumps.last().copied(),
                decreasing,
            )
            .with_note(jumps.iter().map(|j| format!("{j:.3e}")).collect::<Vec<_>>().join(", ")),
        );

        let mut used = Vec::new();
        let mut defects = Vec::new();
        let mut skipped = Vec::new();
        for &h in steps {
            match generator_difference(plan, &phi, h, 2.0) {
                Ok(g) => {
                    used.push(h);
                    defects.push(g.norm);
                }
                Err(Error::Unresolvable { .. }) => skipped.push(h),
                Err(e) => return Err(e),
            }
        }
        let name = "generator quotient order";
        if used.len() < 2 {
            out.push(CheckRecord::not_applicable(name, anchor::GENERATOR_CORE, "fewer than two resolvable steps"));
        } else {
            let order = fit_slope(&used, &defects);
            let mut rec = CheckRecord::lower(name, anchor::GENERATOR_CORE, order, tol.generator_order, 0.0);
            if !skipped.is_empty() {
                rec = rec.with_note(format!("steps {skipped:?} not resolvable on this grid"));
            }
            out.push(rec);
        }
        Ok(out)
    };
    match run() {
        Ok(records) => report.records.extend(records),
        Err(e) => stage_error(report, "semigroup suite", e),
    }
}

fn resolvent_suite(cfg: &Config, ctx: &Context, plan: &SemigroupPlan, report: &mut VerificationReport) {
    let d = ctx.spec.d;
    let n = ctx.problem.size();
    let run = || -> Result<Vec<CheckRecord>> {
        let mut out = Vec::new();
        let g = test_function(d, n, 1.0)?.sample(&ctx.spec)?;
        for lambda in cfg.lambdas() {
            if lambda.re + ctx.consts.b_0 <= 0.0 {
                out.push(CheckRecord::not_applicable(
                    &format!("resolvent at lambda = {lambda}"),
                    anchor::RESOLVENT_INTEGRAL,
                    "Re lambda <= -b_0",
                ));
                continue;
            }
            let q = &cfg.quadrature;
            let quad = LaplaceQuadSpec {
                panels: q.panels,
                nodes_per_panel: q.nodes_per_panel,
                head_correction: q.head_correction,
                ..LaplaceQuadSpec::for_plan(plan, lambda, q.tail_tol)?
            };
            let mut sol = resolve_with_plan(plan, &g, lambda, &quad)?;
            sol.residual_tol = cfg.tolerances.residual;
            if !sol.residual_ok() {
                out.push(CheckRecord::small(
                    &format!("resolvent residual at lambda = {lambda}"),
                    anchor::RESOLVENT_INTEGRAL,
                    sol.residual_norm,
                    sol.residual_tol,
                ));
                continue;
            }
            for mut rec in estimate_report(&ctx.problem, &sol, &ctx.consts, &ctx.cert)? {
                rec.name = format!("{} at lambda = {lambda}", rec.name);
                if rec.tolerance == Some(crate::resolvent::ESTIMATE_TOL) {
                    rec = retolerance(rec, cfg.tolerances.estimate);
                }
                out.push(rec);
            }
            let ratio = graph_norm_ratio(&ctx.problem, &sol)?;
            out.push(
                CheckRecord::flag(
                    &format!("graph norm ratio at lambda = {lambda}"),
                    anchor::MAXIMAL_DOMAIN,
                    Some(ratio),
                    ratio.is_finite() && ratio > 0.0,
                )
                .with_note("reported, bounded above and below"),
            );
        }
        let phi = test_function(d, n, 1.0)?;
        for mut rec in dissipativity_probe(&ctx.problem, &ctx.cert, &phi, &ctx.spec, &cfg.suites.dissipativity_lambdas)?
        {
            if rec.tolerance.is_some() {
                rec = retolerance(rec, cfg.tolerances.dissipativity);
            }
            out.push(rec);
        }
        Ok(out)
    };
    match run() {
        Ok(records) => report.records.extend(records),
        Err(e) => stage_error(report, "resolvent suite", e),
    }
}

/// Re-evaluates a compared record against a configured tolerance.
fn retolerance(mut rec: CheckRecord, tolerance: f64) -> CheckRecord {
    if let Some(m) = rec.margin {
        rec.tolerance = Some(tolerance);
        rec.status =
            if m.is_finite() && m >= -tolerance { crate::check::Status::Pass } else { crate::check::Status::Fail };
    }
    rec
}

fn lemma_suite(cfg: &Config, ctx: &Context, report: &mut VerificationReport) {
    let d = ctx.spec.d;
    let n = ctx.problem.size();
    let mut shift = vec![Complex64::new(0.0, 0.0); n];
    shift[0] = Complex64::new(2.0, 0.0);
    let center = vec![0.0; d];
    let mut first = vec![Complex64::new(0.0, 0.0); n];
    first[0] = Complex64::new(1.0, 0.0);
    let field =
        SchwartzFunction::gaussian(center.clone(), 1.0 / 2f64.sqrt(), first).map(|phi| ShiftedField { shift, phi });
    let field = match field {
        Ok(f) => f,
        Err(e) => return stage_error(report, "lemma test data", e),
    };
    let eta = Bump { center: vec![0.3; d], width: 1.2 };
    let omega = BoxDomain { half_extent: cfg.grid.half_extent, ..BoxDomain::default() };
    let tol = &cfg.tolerances;
    let p = ctx.problem.p();
    match ibp_inequality_check(ctx.problem.a(), &field, &eta, &omega, p, 0.5) {
        Ok(r) => {
            report.records.push(CheckRecord::scaled_lower(
                &format!("weighted IBP inequality at p = {p}"),
                anchor::IBP_INEQUALITY,
                r.lhs,
                r.rhs,
                r.scale,
                tol.ibp,
            ));
            if p >= 2.0 {
                report.records.push(CheckRecord::small(
                    &format!("weighted IBP equality at p = {p}"),
                    anchor::IBP_INEQUALITY,
                    (r.lhs - r.rhs).abs() / r.scale,
                    tol.ibp_equality,
                ));
            }
        }
        Err(e) => stage_error(report, "lemma check", e),
    }
}
