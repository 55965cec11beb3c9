//! Resolvent `R(lambda) g` as the Laplace transform of the semigroup, with the
//! Lp bounds it must satisfy.

mod estimates;
mod ibp;
mod laplace;

pub use estimates::{
    dissipative_bound_coefficient, dissipativity_probe, estimate_report, gradient_bound_coefficient, graph_norm_ratio,
    regularity_ratios, semigroup_bound_coefficient, RegularityRatios, DISSIPATIVITY_TOL, ESTIMATE_TOL,
};
pub use ibp::{ibp_inequality_check, BoxDomain, Bump, IbpCheck, ShiftedField, IBP_EQUALITY_TOL, IBP_TOL};
pub use laplace::{
    residual, resolvable_t_min, resolve, resolve_with_plan, tail_bound, HeadCorrection, LaplaceQuadSpec,
    ResolventSolution, DEFAULT_NODES_PER_PANEL, DEFAULT_PANELS, DEFAULT_RESIDUAL_TOL, DEFAULT_TAIL_TOL, HEAD_PANELS,
    SOLUTION_DECAY_TOL,
};
