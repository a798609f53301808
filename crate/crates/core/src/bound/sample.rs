use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrand::{HProfile, IntegrandSpec};
use crate::solver::{cell_gradients, neumaier_sum, sup_norm_on_ball, DiscreteField, Grid, Solution, T_EPS};
use crate::structural::ExponentSet;

use super::area::disc_rect_area;

/// Concentric balls `B_ρ ⊂ B_R` around `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: [f64; 2],
    pub rho: f64,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: [f64; 2], rho: f64, radius: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < radius && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("need 0 < rho < R, got rho = {rho}, R = {radius}")));
        }
        Ok(Ball { center, rho, radius })
    }

    /// Centered in the grid box with `ρ, R = 0.2, 0.4` of the half-width.
    pub fn default_for(grid: &Grid) -> Self {
        let hw = 0.5 * grid.side();
        Ball {
            center: grid.center(),
            rho: 0.2 * hw,
            radius: 0.4 * hw,
        }
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    fn check_inside(&self, grid: &Grid) -> Result<()> {
        let lo = grid.lo();
        let eps = 1e-12 * grid.side();
        for k in 0..2 {
            if self.center[k] - self.radius < lo[k] - eps || self.center[k] + self.radius > lo[k] + grid.side() + eps {
                return Err(Error::InvalidInput(format!(
                    "ball of radius {} around {:?} leaves the grid box",
                    self.radius, self.center
                )));
            }
        }
        Ok(())
    }
}

/// One evaluation of `‖Du‖_{L∞(B_ρ)}^{lhs} ≤ C (∫_{B_R} 1 + g(x, |Du|))^{rhs}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSample {
    /// Value of the sweep axis (mesh width, clamp constant, ...).
    pub axis_value: f64,
    pub h: f64,
    /// Clamp constants; `0` and `inf` when no clamp is applied.
    pub clamp_lower: f64,
    pub clamp_upper: f64,
    pub rho: f64,
    pub radius: f64,
    pub lhs: f64,
    pub rhs_base: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `∫_{B_R} 1 + |Du|^{2τ} K_M(|Du|)^τ`
    pub v_integral: f64,
    pub iterations: usize,
}

impl BoundSample {
    /// Empirical constants of the two-step chain: `lhs / V` and `V / rhs`.
    pub fn chain_constants(&self) -> (f64, f64) {
        (self.lhs / self.v_integral, self.v_integral / self.rhs)
    }
}

impl fmt::Display for BoundSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "h = {:.6e}: lhs = {:.6e}, rhs = {:.6e} (base {:.6e}), ratio = {:.6e}, V = {:.6e}",
            self.h, self.lhs, self.rhs, self.rhs_base, self.ratio, self.v_integral
        )
    }
}

/// Evaluates both sides of the sup bound on a converged solution.
///
/// `spec` is the integrand the field minimizes (clamped or not);
/// `profile` feeds the `V` diagnostic.
pub fn evaluate_bound(
    solution: &Solution,
    spec: &IntegrandSpec,
    profile: &HProfile,
    exps: &ExponentSet,
    ball: &Ball,
) -> Result<BoundSample> {
    evaluate_bound_field(&solution.field, solution.iterations, spec, profile, exps, ball)
}

/// [`evaluate_bound`] on a bare field.
pub fn evaluate_bound_field(
    field: &DiscreteField,
    iterations: usize,
    spec: &IntegrandSpec,
    profile: &HProfile,
    exps: &ExponentSet,
    ball: &Ball,
) -> Result<BoundSample> {
    if !exps.feasible {
        return Err(Error::Infeasible(format!(
            "exponents with tau = {} and 2* = {} are not admissible",
            exps.tau, exps.two_star
        )));
    }
    let ball = Ball::new(ball.center, ball.rho, ball.radius)?;
    let grid = field.grid();
    ball.check_inside(grid)?;
    let du = cell_gradients(grid, field);
    let sup = sup_norm_on_ball(grid, &du, ball.center, ball.rho)?;

    let h = grid.h();
    let lo = grid.lo();
    let tau = exps.tau;
    let cells = grid.cells();
    let parts: Vec<(f64, f64, f64)> = (0..du.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % cells, k / cells);
            let (x0, y0) = (lo[0] + i as f64 * h, lo[1] + j as f64 * h);
            let w = disc_rect_area(ball.center, ball.radius, x0, x0 + h, y0, y0 + h);
            if w == 0.0 {
                return Ok((0.0, 0.0, 0.0));
            }
            let t = du[k].magnitude;
            let (g, _, _) = spec.eval_radial(&grid.cell_center(i, j), t).map_err(|e| tag(e, i, j))?;
            let v = if t < T_EPS {
                1.0
            } else {
                1.0 + t.powf(2.0 * tau) * profile.k_max(t).map_err(|e| tag(e, i, j))?.powf(tau)
            };
            Ok((w, w * (1.0 + g), w * v))
        })
        .collect::<Result<_>>()?;
    let rhs_base = neumaier_sum(parts.iter().map(|p| p.1));
    let v_integral = neumaier_sum(parts.iter().map(|p| p.2));
    let lhs = if sup == 0.0 { 0.0 } else { sup.powf(exps.lhs_exponent) };
    let rhs = rhs_base.powf(exps.rhs_exponent);
    let ratio = lhs / rhs;
    if !ratio.is_finite() {
        return Err(Error::Numeric {
            x: ball.center.to_vec(),
            t: sup,
            msg: format!("bound ratio is not finite (lhs = {lhs}, rhs = {rhs})"),
        });
    }
    let (clamp_lower, clamp_upper) = spec.clamp().map_or((0.0, f64::INFINITY), |c| (c.lower(), c.upper()));
    Ok(BoundSample {
        axis_value: h,
        h,
        clamp_lower,
        clamp_upper,
        rho: ball.rho,
        radius: ball.radius,
        lhs,
        rhs_base,
        rhs,
        ratio,
        v_integral,
        iterations,
    })
}

fn tag(e: Error, i: usize, j: usize) -> Error {
    match e {
        Error::Range { x, t, msg } => Error::Range {
            x,
            t,
            msg: format!("{msg} (cell {i}, {j})"),
        },
        other => other,
    }
}
