//! Admissible `(β, ϑ)` windows for a given integrand and profile.

use std::fmt;

use crate::error::{Error, Result};
use crate::integrand::{HProfile, IntegrandSpec};

use super::assumptions::{check_h_growth, SampledJets};
use super::exponents::format_fraction;
use super::params::{sobolev_exponent, DEFAULT_TWO_STAR_PLANE};
use super::sampling::SamplingPlan;

/// Number of `ϑ` values scanned below the feasibility limit.
pub const THETA_GRID: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterWindow {
    pub n: usize,
    pub beta_lo: f64,
    pub beta_lo_closed: bool,
    pub beta_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub feasible: bool,
    pub default_beta: Option<f64>,
    pub default_theta: Option<f64>,
    /// First failing constraint when the window is empty.
    pub failure: Option<String>,
    /// `false` when the β window rests on estimated asymptotics.
    pub asymptotics_exact: bool,
}

impl ParameterWindow {
    pub fn contains_beta(&self, beta: f64) -> bool {
        let lo_ok = if self.beta_lo_closed { beta >= self.beta_lo } else { beta > self.beta_lo };
        lo_ok && beta < self.beta_hi
    }

    /// The β interval as text, e.g. `[7/12, 2/3)`.
    pub fn beta_interval(&self) -> String {
        if self.beta_lo >= self.beta_hi {
            return "empty".into();
        }
        format!(
            "{}{}, {})",
            if self.beta_lo_closed { "[" } else { "(" },
            format_fraction(self.beta_lo),
            format_fraction(self.beta_hi)
        )
    }
}

impl fmt::Display for ParameterWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.beta_lo >= self.beta_hi {
            write!(f, "n = {}: beta window empty", self.n)?;
        } else {
            write!(f, "n = {}: beta in {}", self.n, self.beta_interval())?;
        }
        if !self.asymptotics_exact {
            write!(f, " (estimated)")?;
        }
        if self.theta_hi > 1.0 {
            write!(f, ", theta in [{:.6}, {:.6})", self.theta_lo, self.theta_hi)?;
        }
        match (&self.failure, self.default_beta, self.default_theta) {
            (Some(why), _, _) => write!(f, "; infeasible: {why}"),
            (None, Some(b), Some(t)) => write!(f, "; defaults beta = {}, theta = {t:.6}", format_fraction(b)),
            _ => Ok(()),
        }
    }
}

/// `β` interval from the large-t behaviour of `h`:
/// `h'' t^{2β} / max((h'/t)^{(n-2)/n}, h'/t)` must stay bounded below.
fn beta_window_from_asymptotics(h: &HProfile, n: usize, two_star: f64) -> (f64, bool, f64, bool) {
    let nf = n as f64;
    let a = h.asymptotics();
    let denom = a.ratio.pow((nf - 2.0) / nf).max(&a.ratio);
    let d = a.second.over(&denom);
    let eps = 1e-12;
    let (mut lo, mut closed) = if d.exp2 > eps {
        (f64::NEG_INFINITY, false)
    } else if d.exp2 < -eps {
        (f64::INFINITY, false)
    } else {
        (-d.power / 2.0, d.log >= 0.0)
    };
    let open_lo = 1.0 / nf;
    if lo <= open_lo + eps {
        lo = open_lo;
        closed = false;
    }
    // τ >= 1 forces β < 1 - 2/2*
    let hi = (2.0 / nf).min(1.0 - 2.0 / two_star);
    (lo, closed, hi, a.exact)
}

/// Scans `β` and `ϑ` for parameters under which every structural check passes.
pub fn admissible_window_search(
    spec: &IntegrandSpec,
    h: &HProfile,
    n: usize,
    plan: &SamplingPlan,
) -> Result<ParameterWindow> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n must be >= 2, got {n}")));
    }
    if spec.dim() != n {
        return Err(Error::InvalidInput(format!("integrand is {}-dimensional but n = {n}", spec.dim())));
    }
    let nf = n as f64;
    let two_star = sobolev_exponent(n, DEFAULT_TWO_STAR_PLANE);
    let (beta_lo, beta_lo_closed, beta_hi, exact) = beta_window_from_asymptotics(h, n, two_star);
    let mut w = ParameterWindow {
        n,
        beta_lo,
        beta_lo_closed,
        beta_hi,
        theta_lo: 1.0,
        theta_hi: 1.0,
        feasible: false,
        default_beta: None,
        default_theta: None,
        failure: None,
        asymptotics_exact: exact,
    };
    if !(beta_lo < beta_hi) {
        w.failure = Some(format!(
            "beta window empty: the decay of h'' needs beta >= {} but beta < {}",
            format_fraction(beta_lo),
            format_fraction(beta_hi)
        ));
        return Ok(w);
    }
    let fast = h.asymptotics().second.exp2 > 0.0;
    let beta = if fast && w.contains_beta(1.5 / nf) {
        1.5 / nf
    } else if beta_lo_closed {
        beta_lo
    } else {
        0.5 * (beta_lo + beta_hi)
    };
    w.default_beta = Some(beta);

    let tau_max = (1.0 - beta) * two_star / 2.0;
    w.theta_hi = (1.0 + (1.0 + 8.0 * tau_max).sqrt()) / 4.0;

    let t0 = spec.t0();
    let alpha = nf / (nf - 1.0);
    let hg = check_h_growth(h, n, beta, alpha, t0, spec.default_t_max().min(1e3))?;
    if !hg.certified {
        w.failure = Some(format!(
            "growth of h not certified at beta = {}, alpha = {}",
            format_fraction(beta),
            format_fraction(alpha)
        ));
        return Ok(w);
    }

    let jets = SampledJets::evaluate(spec, h, spec.domain(), t0, 1e3, plan)?;
    let step = (w.theta_hi - 1.0) / THETA_GRID as f64;
    let theta = (0..THETA_GRID)
        .map(|k| 1.0 + step * k as f64)
        .find(|&th| jets.report(th).certified);
    match theta {
        Some(th) => {
            w.theta_lo = th;
            w.default_theta = Some(th);
            w.feasible = true;
        }
        None => {
            w.failure = Some(format!(
                "conditions on g not certified for any theta in [1, {:.6})",
                w.theta_hi
            ));
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::CoefficientSet;
    use crate::domain::BoxDomain;
    use crate::integrand::{make_builtin, Builtin};

    #[test]
    fn sqrt_linear_windows() {
        for (n, feasible) in [(3, true), (4, false)] {
            let spec = make_builtin(Builtin::LinearMinusSqrt, &CoefficientSet::new(), 1.0, BoxDomain::unit(n)).unwrap();
            let h = HProfile::paired_with(&spec).unwrap();
            let w = admissible_window_search(&spec, &h, n, &SamplingPlan::coarse(0)).unwrap();
            assert_eq!(w.feasible, feasible, "{w}");
            if n == 3 {
                assert_eq!(w.beta_interval(), "[7/12, 2/3)");
            } else {
                assert!(w.failure.unwrap().contains("beta window empty"));
            }
        }
    }

    #[test]
    fn exponential_defaults() {
        let spec = make_builtin(Builtin::Exponential, &CoefficientSet::new(), 1.0, BoxDomain::unit(3)).unwrap();
        let h = HProfile::paired_with(&spec).unwrap();
        let w = admissible_window_search(&spec, &h, 3, &SamplingPlan::coarse(0)).unwrap();
        assert!(w.feasible, "{w}");
        assert_eq!(w.default_beta, Some(0.5));
        let tau_hi = (2.0 * w.theta_hi - 1.0) * w.theta_hi;
        assert!((tau_hi - 1.5).abs() < 1e-12);
    }
}
