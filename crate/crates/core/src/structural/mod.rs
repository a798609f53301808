//! Sampled certification of the structural conditions, exponent bookkeeping
//! and the profile lemmas.

mod assumptions;
mod exponents;
mod lemmas;
mod params;
mod phi;
mod sampling;
mod window;

use std::fmt;

pub use assumptions::{
    check_h_growth, check_main_assumptions, effective_t_max, AssumptionReport, InequalityResult, SampledJets, Side,
    H_GROWTH_POINTS,
};
pub use exponents::{
    approx_fraction, exponents, exponents_with, format_fraction, moser_schedule, moser_schedule_with, ExponentSet,
    MoserSchedule,
};
pub use lemmas::{lemma_suite, lemma_suite_with, CheckKind, LemmaEntry, LemmaReport, LemmaSample, HARD_SLACK, MAX_DRIFT, SIGMA_GRID};
pub use params::{sobolev_exponent, tau_of, StructuralParams, DEFAULT_TWO_STAR_PLANE};
pub use phi::{g_function, g_function_options, g_function_with, phi_eval, PhiBranch, PhiFamily};
pub use sampling::{Sample, SamplingPlan};
pub use window::{admissible_window_search, ParameterWindow, THETA_GRID};

use crate::error::Result;
use crate::integrand::{HProfile, IntegrandSpec};

/// Everything `check` reports for one parameter choice.
#[derive(Debug, Clone)]
pub struct StructuralReport {
    pub params: StructuralParams,
    pub assumptions: AssumptionReport,
    pub exponents: ExponentSet,
    /// `2nτ/(n(1+τ) - 1)`, the narrower `α` range used inside the iteration.
    pub alpha_iteration_bound: f64,
}

impl StructuralReport {
    pub fn certified(&self) -> bool {
        self.assumptions.certified && self.exponents.feasible
    }
}

/// Conditions on `g` and on `h` plus the exponents at `params`.
pub fn structural_report(
    spec: &IntegrandSpec,
    h: &HProfile,
    params: &StructuralParams,
    plan: &SamplingPlan,
    epsilon: f64,
) -> Result<StructuralReport> {
    let main = check_main_assumptions(spec, h, params, plan)?;
    let t_hi = effective_t_max(spec, h, params.t_max);
    let growth = check_h_growth(h, params.n, params.beta, params.alpha, params.t0, t_hi)?;
    let n = params.n as f64;
    let tau = params.tau();
    Ok(StructuralReport {
        params: params.clone(),
        assumptions: main.merge(growth),
        exponents: exponents_with(params.n, params.theta, params.beta, epsilon, params.two_star_plane),
        alpha_iteration_bound: 2.0 * n * tau / (n * (1.0 + tau) - 1.0),
    })
}

impl fmt::Display for StructuralReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let e = &self.exponents;
        writeln!(
            f,
            "n = {}, theta = {}, beta = {}, alpha = {}",
            p.n,
            p.theta,
            format_fraction(p.beta),
            format_fraction(p.alpha)
        )?;
        writeln!(f, "{}", self.assumptions)?;
        writeln!(
            f,
            "tau = {:.6}, 2* = {}, lhs exponent = {:.6}, rhs exponent = {:.6}, feasible = {}",
            e.tau, e.two_star, e.lhs_exponent, e.rhs_exponent, e.feasible
        )?;
        writeln!(
            f,
            "alpha range: global (1, {}], iteration (1, {:.6}]",
            format_fraction(p.n as f64 / (p.n as f64 - 1.0)),
            self.alpha_iteration_bound
        )?;
        write!(f, "structural verdict: {}", if self.certified() { "certified" } else { "NOT certified" })
    }
}
