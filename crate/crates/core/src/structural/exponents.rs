//! Exponent bookkeeping and the Moser iteration schedule.

use crate::error::{Error, Result};

use super::params::{sobolev_exponent, tau_of, DEFAULT_TWO_STAR_PLANE};

/// Exponents of the sup-bound `‖Du‖^{lhs} ≤ C (∫ 1 + g)^{rhs}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSet {
    pub tau: f64,
    pub two_star: f64,
    /// `(1 - β - 2τ/2*) n`
    pub lhs_exponent: f64,
    /// `τ/(1 - β) + ε`
    pub rhs_exponent: f64,
    pub epsilon: f64,
    /// `τ < (1 - β) 2*/2`
    pub feasible: bool,
}

/// Exponents with the default planar Sobolev exponent.
pub fn exponents(n: usize, theta: f64, beta: f64, epsilon: f64) -> ExponentSet {
    exponents_with(n, theta, beta, epsilon, DEFAULT_TWO_STAR_PLANE)
}

/// Exponents with an explicit planar Sobolev exponent (ignored for `n >= 3`).
pub fn exponents_with(n: usize, theta: f64, beta: f64, epsilon: f64, two_star_plane: f64) -> ExponentSet {
    let tau = tau_of(theta);
    let two_star = sobolev_exponent(n, two_star_plane);
    ExponentSet {
        tau,
        two_star,
        lhs_exponent: (1.0 - beta - 2.0 * tau / two_star) * n as f64,
        rhs_exponent: tau / (1.0 - beta) + epsilon,
        epsilon,
        feasible: tau < (1.0 - beta) * two_star / 2.0,
    }
}

/// Exponents `γ_i`, radii `ρ_i` and partial exponents `k_i` of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct MoserSchedule {
    pub gamma_seq: Vec<f64>,
    pub radii: Vec<f64>,
    pub k_seq: Vec<f64>,
    pub limit_exponent: f64,
    n: usize,
    beta: f64,
    tau: f64,
    two_star: f64,
}

impl MoserSchedule {
    /// Closed form of `γ_i`.
    ///
    /// For `n >= 3` this is `(1 - β - 2τ/2*)(r^i - 1) n` with `r = 2*/2`; in the
    /// plane the fixed point of the recurrence no longer equals that factor,
    /// so the general solution `D (r^i - 1)` with
    /// `D = (2r - 2τ - 2*β)/(r - 1)` is used.
    pub fn gamma_closed_form(&self, i: usize) -> f64 {
        let r = self.two_star / 2.0;
        let ri = r.powi(i as i32) - 1.0;
        if self.n >= 3 {
            (1.0 - self.beta - 2.0 * self.tau / self.two_star) * ri * self.n as f64
        } else {
            (2.0 * r - 2.0 * self.tau - self.two_star * self.beta) / (r - 1.0) * ri
        }
    }
}

/// Fills the schedule up to index `i_max` (inclusive).
pub fn moser_schedule(n: usize, beta: f64, tau: f64, rho_bar: f64, r_bar: f64, i_max: usize) -> Result<MoserSchedule> {
    moser_schedule_with(n, beta, tau, rho_bar, r_bar, i_max, DEFAULT_TWO_STAR_PLANE)
}

pub fn moser_schedule_with(
    n: usize,
    beta: f64,
    tau: f64,
    rho_bar: f64,
    r_bar: f64,
    i_max: usize,
    two_star_plane: f64,
) -> Result<MoserSchedule> {
    let two_star = sobolev_exponent(n, two_star_plane);
    if !(tau < (1.0 - beta) * two_star / 2.0) {
        return Err(Error::Infeasible(format!(
            "tau = {tau} is not below (1 - beta) 2*/2 = {}",
            (1.0 - beta) * two_star / 2.0
        )));
    }
    if !(0.0 < rho_bar && rho_bar < r_bar) {
        return Err(Error::InvalidInput(format!("need 0 < rho < R, got {rho_bar}, {r_bar}")));
    }
    if i_max < 1 {
        return Err(Error::InvalidInput("the schedule needs at least one step".into()));
    }
    let r = two_star / 2.0;
    let drop = 2.0 * tau + two_star * beta;
    let factor = 1.0 - beta - 2.0 * tau / two_star;
    let mut gamma_seq = vec![0.0];
    for i in 0..i_max {
        gamma_seq.push(r * (gamma_seq[i] + 2.0) - drop);
    }
    let radii = (0..=i_max)
        .map(|i| rho_bar + (r_bar - rho_bar) / 2f64.powi(i as i32))
        .collect();
    let k_seq = (0..=i_max)
        .map(|i| factor * (1.0 - r.powi(-(i as i32 + 1))) * n as f64)
        .collect();
    Ok(MoserSchedule {
        gamma_seq,
        radii,
        k_seq,
        limit_exponent: factor * n as f64,
        n,
        beta,
        tau,
        two_star,
    })
}

/// `p/q` with `q <= max_den` matching `v` to 1e-12, if any.
pub fn approx_fraction(v: f64, max_den: i64) -> Option<(i64, i64)> {
    (1..=max_den).find_map(|q| {
        let p = (v * q as f64).round();
        ((v - p / q as f64).abs() < 1e-12).then_some((p as i64, q))
    })
}

/// `v` as a reduced fraction when one fits, otherwise as a decimal.
pub fn format_fraction(v: f64) -> String {
    match approx_fraction(v, 64) {
        Some((p, 1)) => format!("{p}"),
        Some((p, q)) => format!("{p}/{q}"),
        None => format!("{v:.6}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_theta() {
        assert_eq!(exponents(3, 1.0, 0.5, 0.1).tau, 1.0);
    }

    #[test]
    fn feasibility_gate_in_three_dimensions() {
        let e = exponents(3, 1.2, 0.4, 0.1);
        assert!((e.tau - 1.68).abs() < 1e-12);
        assert_eq!(e.two_star, 6.0);
        assert!(e.feasible);
        assert!((e.lhs_exponent - 0.12).abs() < 1e-12);
        let e = exponents(3, 1.3, 0.4, 0.1);
        assert!((e.tau - 2.08).abs() < 1e-12);
        assert!(!e.feasible);
    }

    #[test]
    fn first_step_and_limit() {
        let s = moser_schedule(3, 0.5, 1.0, 0.1, 0.2, 10).unwrap();
        assert_eq!(s.gamma_seq[0], 0.0);
        assert!((s.gamma_seq[1] - 1.0).abs() < 1e-15);
        assert!((s.limit_exponent - 0.5).abs() < 1e-15);
        assert!(s.radii.windows(2).all(|w| w[1] < w[0]));
        assert!((s.k_seq[10] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn plane_closed_form_uses_general_fixed_point() {
        let s = moser_schedule(2, 0.6, 1.0, 0.1, 0.2, 20).unwrap();
        for (i, g) in s.gamma_seq.iter().enumerate() {
            let c = s.gamma_closed_form(i);
            assert!((g - c).abs() <= 1e-9 * c.abs().max(1.0));
        }
    }

    #[test]
    fn infeasible_schedule_rejected() {
        assert!(moser_schedule(3, 0.4, 2.08, 0.1, 0.2, 5).is_err());
    }

    #[test]
    fn fractions() {
        assert_eq!(format_fraction(7.0 / 12.0), "7/12");
        assert_eq!(format_fraction(2.0 / 3.0), "2/3");
        assert_eq!(format_fraction(1.0), "1");
    }
}
