//! Discrete energy `Σ g(x_c, |Du_c|) h²` with one-point (cell-center)
//! quadrature of bilinear elements, its gradient and directional curvature.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrand::IntegrandSpec;

use super::field::DiscreteField;
use super::grid::Grid;

/// Below this gradient modulus the flux uses `g_tt(x, 0) Du`.
pub const T_EPS: f64 = 1e-12;

/// Bilinear-element gradient at a cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGradient {
    /// Row-major `m × 2`: `[∂_1 u^1, ∂_2 u^1, ∂_1 u^2, ...]`.
    pub du: Vec<f64>,
    pub magnitude: f64,
}

/// Compensated sum in a fixed order.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn cell_du(grid: &Grid, vals: &[f64], i: usize, j: usize) -> Vec<f64> {
    let m = grid.components();
    let inv = 0.5 / grid.h();
    let mut du = vec![0.0; 2 * m];
    for c in 0..m {
        let u00 = vals[grid.dof(i, j, c)];
        let u10 = vals[grid.dof(i + 1, j, c)];
        let u01 = vals[grid.dof(i, j + 1, c)];
        let u11 = vals[grid.dof(i + 1, j + 1, c)];
        du[2 * c] = (u10 + u11 - u00 - u01) * inv;
        du[2 * c + 1] = (u01 + u11 - u00 - u10) * inv;
    }
    du
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn check_grid(spec: &IntegrandSpec, grid: &Grid, u: &DiscreteField) -> Result<()> {
    if spec.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "the solver works in the plane but the integrand is {}-dimensional",
            spec.dim()
        )));
    }
    if u.grid() != grid {
        return Err(Error::InvalidInput("field does not conform to the grid".into()));
    }
    let lo = grid.lo();
    let hi = [lo[0] + grid.side(), lo[1] + grid.side()];
    let d = spec.domain();
    for k in 0..2 {
        if lo[k] < d.lo()[k] - 1e-12 || hi[k] > d.hi()[k] + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "grid box [{lo:?}, {hi:?}] leaves the integrand's box [{:?}, {:?}]",
                d.lo(),
                d.hi()
            )));
        }
    }
    Ok(())
}

fn cell_error(e: Error, i: usize, j: usize) -> Error {
    match e {
        Error::Range { x, t, msg } => Error::Range {
            x,
            t,
            msg: format!("cell ({i}, {j}): {msg}"),
        },
        other => other,
    }
}

fn cell_ij(grid: &Grid, k: usize) -> (usize, usize) {
    (k % grid.cells(), k / grid.cells())
}

/// Gradients on every cell, row by row (`k = j · cells + i`).
pub fn cell_gradients(grid: &Grid, u: &DiscreteField) -> Vec<CellGradient> {
    let vals = u.values();
    (0..grid.cells() * grid.cells())
        .into_par_iter()
        .map(|k| {
            let (i, j) = cell_ij(grid, k);
            let du = cell_du(grid, vals, i, j);
            let magnitude = norm(&du);
            CellGradient { du, magnitude }
        })
        .collect()
}

/// `Σ_cells g(x_c, |Du_c|) h²`.
pub fn discrete_energy(spec: &IntegrandSpec, grid: &Grid, u: &DiscreteField) -> Result<f64> {
    check_grid(spec, grid, u)?;
    energy_of(spec, grid, u.values())
}

pub(crate) fn energy_of(spec: &IntegrandSpec, grid: &Grid, vals: &[f64]) -> Result<f64> {
    let area = grid.h() * grid.h();
    let per_cell: Vec<f64> = (0..grid.cells() * grid.cells())
        .into_par_iter()
        .map(|k| {
            let (i, j) = cell_ij(grid, k);
            let t = norm(&cell_du(grid, vals, i, j));
            let c = grid.cell_center(i, j);
            let (g, _, _) = spec.eval_radial(&c, t).map_err(|e| cell_error(e, i, j))?;
            Ok(g * area)
        })
        .collect::<Result<_>>()?;
    Ok(neumaier_sum(per_cell))
}

/// Gradient with respect to every nodal value; zero on fixed nodes.
pub fn energy_gradient(spec: &IntegrandSpec, grid: &Grid, u: &DiscreteField) -> Result<Vec<f64>> {
    check_grid(spec, grid, u)?;
    gradient_of(spec, grid, u.values(), &u.fixed_dofs())
}

/// `g_t/t`, or its limit `g_tt(x, 0)` near the origin.
fn flux_factor(spec: &IntegrandSpec, x: &[f64], t: f64) -> Result<f64> {
    if t < T_EPS {
        let (_, _, g_tt) = spec.eval_radial(x, 0.0)?;
        Ok(g_tt)
    } else {
        let (_, g_t, _) = spec.eval_radial(x, t)?;
        Ok(g_t / t)
    }
}

pub(crate) fn gradient_of(spec: &IntegrandSpec, grid: &Grid, vals: &[f64], fixed: &[bool]) -> Result<Vec<f64>> {
    let m = grid.components();
    let half_h = 0.5 * grid.h();
    let fluxes: Vec<Vec<f64>> = (0..grid.cells() * grid.cells())
        .into_par_iter()
        .map(|k| {
            let (i, j) = cell_ij(grid, k);
            let du = cell_du(grid, vals, i, j);
            let c = grid.cell_center(i, j);
            let f = flux_factor(spec, &c, norm(&du)).map_err(|e| cell_error(e, i, j))?;
            Ok(du.iter().map(|d| f * d * half_h).collect())
        })
        .collect::<Result<_>>()?;
    let mut grad = vec![0.0; vals.len()];
    for (k, p) in fluxes.iter().enumerate() {
        let (i, j) = cell_ij(grid, k);
        for (di, dj) in [(0usize, 0usize), (1, 0), (0, 1), (1, 1)] {
            let sx = 2.0 * di as f64 - 1.0;
            let sy = 2.0 * dj as f64 - 1.0;
            for c in 0..m {
                grad[grid.dof(i + di, j + dj, c)] += p[2 * c] * sx + p[2 * c + 1] * sy;
            }
        }
    }
    for (g, f) in grad.iter_mut().zip(fixed) {
        if *f {
            *g = 0.0;
        }
    }
    Ok(grad)
}

/// `d²/dα² F(u + α d)` at `α = 0`; fails on a cell where `g` is not convex.
pub(crate) fn curvature_along(spec: &IntegrandSpec, grid: &Grid, vals: &[f64], dir: &[f64]) -> Result<f64> {
    let area = grid.h() * grid.h();
    let per_cell: Vec<f64> = (0..grid.cells() * grid.cells())
        .into_par_iter()
        .map(|k| {
            let (i, j) = cell_ij(grid, k);
            let du = cell_du(grid, vals, i, j);
            let dd = cell_du(grid, dir, i, j);
            let c = grid.cell_center(i, j);
            let t = norm(&du);
            let dd2: f64 = dd.iter().map(|v| v * v).sum();
            let (_, g_t, g_tt) = spec
                .eval_radial(&c, if t < T_EPS { 0.0 } else { t })
                .map_err(|e| cell_error(e, i, j))?;
            let tol = 1e-12 * (1.0 + g_tt.abs() + g_t.abs());
            if g_tt < -tol || g_t < -tol {
                return Err(Error::NonConvexCell { i, j, t });
            }
            if t < T_EPS {
                return Ok(g_tt * dd2 * area);
            }
            let rad = du.iter().zip(&dd).map(|(a, b)| a * b).sum::<f64>() / t;
            let rad2 = rad * rad;
            Ok((g_tt * rad2 + g_t / t * (dd2 - rad2).max(0.0)) * area)
        })
        .collect::<Result<_>>()?;
    Ok(neumaier_sum(per_cell))
}

/// `max |∂F/∂u|` over free values, divided by `h²`.
pub fn euler_residual(spec: &IntegrandSpec, grid: &Grid, u: &DiscreteField) -> Result<f64> {
    let g = energy_gradient(spec, grid, u)?;
    Ok(sup_norm(&g) / (grid.h() * grid.h()))
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| f64::max(m, a.abs()))
}

/// `max |Du_c|` over cells whose centers lie in the closed ball.
pub fn sup_norm_on_ball(grid: &Grid, du: &[CellGradient], center: [f64; 2], rho: f64) -> Result<f64> {
    if du.len() != grid.cells() * grid.cells() {
        return Err(Error::InvalidInput("cell gradients do not match the grid".into()));
    }
    if !(rho >= grid.h()) {
        return Err(Error::InvalidInput(format!("ball radius {rho} is below the mesh width {}", grid.h())));
    }
    let lo = grid.lo();
    let eps = 1e-12 * grid.side();
    for k in 0..2 {
        if center[k] - rho < lo[k] - eps || center[k] + rho > lo[k] + grid.side() + eps {
            return Err(Error::InvalidInput(format!(
                "ball of radius {rho} around {center:?} leaves the grid box"
            )));
        }
    }
    let mut best: Option<f64> = None;
    for (k, cg) in du.iter().enumerate() {
        let (i, j) = cell_ij(grid, k);
        let c = grid.cell_center(i, j);
        if (c[0] - center[0]).hypot(c[1] - center[1]) <= rho * (1.0 + 1e-12) {
            best = Some(best.map_or(cg.magnitude, |b: f64| b.max(cg.magnitude)));
        }
    }
    best.ok_or_else(|| Error::InvalidInput(format!("no cell center within {rho} of {center:?}")))
}
