use std::fmt;

use crate::error::{Error, Result};
use crate::integrand::IntegrandSpec;

use super::datum::BoundaryDatum;
use super::energy::{curvature_along, energy_of, gradient_of, sup_norm};
use super::field::DiscreteField;
use super::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GradientDescentArmijo,
    /// Polak-Ribière+ with restarts.
    NonlinearCG,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Target sup-norm of the gradient over free values.
    pub tol: f64,
    pub max_iter: usize,
    pub method: Method,
    pub armijo_c1: f64,
    pub seed: u64,
    /// Uniform noise added to the initial interior values.
    pub init_noise: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 20_000,
            method: Method::NonlinearCG,
            armijo_c1: 1e-4,
            seed: 0,
            init_noise: 0.0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 0.5) {
            return Err(Error::InvalidInput(format!(
                "Armijo constant must lie in (0, 1/2), got {}",
                self.armijo_c1
            )));
        }
        if !(self.init_noise >= 0.0) {
            return Err(Error::InvalidInput(format!("init_noise must be >= 0, got {}", self.init_noise)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    LineSearchFailed(String),
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: DiscreteField,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Energy after every accepted step, starting with the initial value.
    pub energy_trace: Vec<f64>,
    pub status: SolveStatus,
    pub restarts: usize,
    /// Method in use at the end (NCG may fall back to gradient descent).
    pub final_method: Method,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn energy(&self) -> f64 {
        *self.energy_trace.last().unwrap()
    }

    /// `Ok` when converged, otherwise the matching error.
    pub fn into_result(self) -> Result<Solution> {
        match &self.status {
            SolveStatus::Converged => Ok(self),
            SolveStatus::MaxIterations => Err(Error::LineSearch {
                iterations: self.iterations,
                diagnosis: format!(
                    "iteration limit reached with gradient norm {:.3e}",
                    self.gradient_norm
                ),
            }),
            SolveStatus::LineSearchFailed(why) => Err(Error::LineSearch {
                iterations: self.iterations,
                diagnosis: why.clone(),
            }),
        }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match &self.status {
            SolveStatus::Converged => "converged".to_string(),
            SolveStatus::MaxIterations => "iteration limit".to_string(),
            SolveStatus::LineSearchFailed(w) => format!("line search failed: {w}"),
        };
        write!(
            f,
            "{status} after {} iterations ({} restarts), energy {:.12e}, gradient {:.3e}",
            self.iterations,
            self.restarts,
            self.energy(),
            self.gradient_norm
        )
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const MAX_BACKTRACK: usize = 60;
const STORM_WINDOW: usize = 50;
const STORM_RESTARTS: usize = 25;

/// Minimizes the discrete energy with the datum fixed on the boundary.
pub fn minimize(spec: &IntegrandSpec, grid: &Grid, datum: &BoundaryDatum, opts: &SolveOptions) -> Result<Solution> {
    let mut init = DiscreteField::from_datum(grid, datum)?;
    if opts.init_noise > 0.0 {
        init.perturb(opts.init_noise, opts.seed);
    }
    minimize_from(spec, init, opts)
}

/// Minimizes starting from `init`, whose fixed values are kept.
pub fn minimize_from(spec: &IntegrandSpec, init: DiscreteField, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    let grid = init.grid().clone();
    // checks grid/spec compatibility once
    super::energy::discrete_energy(spec, &grid, &init)?;
    let fixed = init.fixed_dofs();
    let mut field = init;
    let mut x = field.values().to_vec();
    let mut energy = energy_of(spec, &grid, &x)?;
    let mut g = gradient_of(spec, &grid, &x, &fixed)?;
    let mut gnorm = sup_norm(&g);
    let mut trace = vec![energy];
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut method = opts.method;
    let mut restarts = 0;
    let mut restart_log: Vec<usize> = Vec::new();
    let mut last_alpha = 1.0;
    let mut iterations = 0;
    let mut status = SolveStatus::MaxIterations;
    let mut steepest = true;

    while iterations < opts.max_iter {
        if gnorm <= opts.tol {
            status = SolveStatus::Converged;
            break;
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
            steepest = true;
            restarts += 1;
            restart_log.push(iterations);
        }
        let curv = curvature_along(spec, &grid, &x, &d)?;
        let mut alpha = if curv > 0.0 { -slope / curv } else { last_alpha };
        let slack = 1e-14 * energy.abs().max(1.0);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            match energy_of(spec, &grid, &trial) {
                Ok(e) if e <= energy + opts.armijo_c1 * alpha * slope + slack => {
                    accepted = Some((trial, e));
                    break;
                }
                Ok(_) | Err(Error::Range { .. }) => alpha *= 0.5,
                Err(e) => return Err(e),
            }
        }
        iterations += 1;
        let Some((trial, e)) = accepted else {
            if steepest {
                status = SolveStatus::LineSearchFailed(format!(
                    "no acceptable step along the steepest-descent direction (energy {energy:.16e}, gradient norm {gnorm:.3e}, curvature {curv:.3e})"
                ));
                break;
            }
            d = g.iter().map(|v| -v).collect();
            steepest = true;
            restarts += 1;
            restart_log.push(iterations);
            continue;
        };
        last_alpha = alpha;
        x = trial;
        energy = e;
        trace.push(e);
        let g_new = gradient_of(spec, &grid, &x, &fixed)?;
        gnorm = sup_norm(&g_new);
        restart_log.retain(|&k| k + STORM_WINDOW > iterations);
        if method == Method::NonlinearCG && restart_log.len() > STORM_RESTARTS {
            method = Method::GradientDescentArmijo;
        }
        let beta = match method {
            Method::GradientDescentArmijo => 0.0,
            Method::NonlinearCG => {
                let gg = dot(&g, &g);
                if gg > 0.0 {
                    (dot(&g_new, &g_new) - dot(&g_new, &g)) / gg
                } else {
                    0.0
                }
                .max(0.0)
            }
        };
        steepest = beta == 0.0;
        d = g_new.iter().zip(&d).map(|(gn, dv)| -gn + beta * dv).collect();
        g = g_new;
    }
    if status == SolveStatus::MaxIterations && gnorm <= opts.tol {
        status = SolveStatus::Converged;
    }
    field.set_free(&x)?;
    Ok(Solution {
        field,
        iterations,
        gradient_norm: gnorm,
        energy_trace: trace,
        status,
        restarts,
        final_method: method,
    })
}
