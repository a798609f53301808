use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrand::{clamp_regularize, HProfile, IntegrandSpec, RegularizationClamp};
use crate::solver::{cell_gradients, minimize, solver_spec, BoundaryDatum, Grid, SolveOptions};
use crate::structural::ExponentSet;

use super::sample::{evaluate_bound, Ball, BoundSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    MeshWidth,
    ClampUpper,
    ClampLower,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::MeshWidth => "h",
            SweepAxis::ClampUpper => "M",
            SweepAxis::ClampLower => "N",
        }
    }
}

/// Everything fixed across the points of a sweep.
#[derive(Debug, Clone)]
pub struct BoundProblem {
    /// Integrand before any clamp.
    pub spec: IntegrandSpec,
    /// Clamp used outside clamp sweeps; `None` picks the solver default.
    pub clamp: Option<RegularizationClamp>,
    pub profile: HProfile,
    pub datum: BoundaryDatum,
    pub lo: [f64; 2],
    pub side: f64,
    pub components: usize,
    /// Cells per side outside mesh sweeps.
    pub cells: usize,
    pub exps: ExponentSet,
    /// Defaults to [`Ball::default_for`].
    pub ball: Option<Ball>,
    pub options: SolveOptions,
}

impl BoundProblem {
    /// Unit square, 32 cells, default ball and solver options.
    pub fn new(spec: IntegrandSpec, datum: BoundaryDatum, components: usize, exps: ExponentSet) -> Result<Self> {
        let profile = HProfile::paired_with(&spec)?;
        Ok(BoundProblem {
            spec,
            clamp: None,
            profile,
            datum,
            lo: [0.0, 0.0],
            side: 1.0,
            components,
            cells: 32,
            exps,
            ball: None,
            options: SolveOptions::default(),
        })
    }

    pub fn grid(&self, cells: usize) -> Result<Grid> {
        Grid::new(self.lo, self.side, cells, self.components)
    }

    pub fn ball(&self) -> Result<Ball> {
        Ok(self.ball.unwrap_or_else(|| Ball::default_for(&self.grid(self.cells.max(4)).expect("valid grid"))))
    }

    fn base_spec(&self) -> &IntegrandSpec {
        self.spec.unclamped().unwrap_or(&self.spec)
    }

    /// Solves on `cells` with `spec` and evaluates the bound.
    pub fn solve_point(&self, spec: &IntegrandSpec, cells: usize) -> Result<SweepPoint> {
        let grid = self.grid(cells)?;
        let sol = minimize(spec, &grid, &self.datum, &self.options)?.into_result()?;
        let sample = evaluate_bound(&sol, spec, &self.profile, &self.exps, &self.ball()?)?;
        let raw = self.base_spec();
        let du = cell_gradients(&grid, &sol.field);
        let mut g_tt = (f64::INFINITY, f64::NEG_INFINITY);
        for (k, c) in du.iter().enumerate() {
            let x = grid.cell_center(k % cells, k / cells);
            let (_, _, v) = raw.eval_radial(&x, c.magnitude)?;
            g_tt = (g_tt.0.min(v), g_tt.1.max(v));
        }
        Ok(SweepPoint { sample, g_tt_range: g_tt })
    }
}

/// A bound sample together with the realized range of the unclamped `g_tt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub sample: BoundSample,
    pub g_tt_range: (f64, f64),
}

impl SweepPoint {
    /// Whether the clamp changed nothing on the realized gradients.
    pub fn clamp_inactive(&self) -> bool {
        self.sample.clamp_lower <= self.g_tt_range.0 && self.g_tt_range.1 <= self.sample.clamp_upper
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
    /// First failing point, when the sweep stopped early.
    pub failure: Option<String>,
}

fn spread<'a>(it: impl Iterator<Item = &'a SweepPoint>) -> f64 {
    let (lo, hi) = it.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.sample.ratio), hi.max(p.sample.ratio)));
    if hi == 0.0 {
        1.0
    } else {
        hi / lo
    }
}

impl SweepResult {
    pub fn samples(&self) -> impl Iterator<Item = &BoundSample> {
        self.points.iter().map(|p| &p.sample)
    }

    pub fn max_ratio(&self) -> f64 {
        self.samples().fold(0.0, |m, s| m.max(s.ratio))
    }

    /// `max ratio / min ratio`; `1` when every ratio vanishes.
    pub fn ratio_spread(&self) -> f64 {
        spread(self.points.iter())
    }

    /// Spread over points where the clamp is inactive.
    pub fn inactive_spread(&self) -> Option<f64> {
        let inactive: Vec<_> = self.points.iter().filter(|p| p.clamp_inactive()).collect();
        (!inactive.is_empty()).then(|| spread(inactive.into_iter()))
    }

    pub fn complete(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for SweepResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.points {
            writeln!(
                f,
                "{} = {:.6e}: ratio = {:.6e}, lhs = {:.6e}, rhs = {:.6e}, iterations = {}{}",
                self.axis.name(),
                p.sample.axis_value,
                p.sample.ratio,
                p.sample.lhs,
                p.sample.rhs,
                p.sample.iterations,
                if p.clamp_inactive() { "" } else { " (clamp active)" }
            )?;
        }
        write!(f, "max ratio = {:.6e}, spread = {:.6}", self.max_ratio(), self.ratio_spread())?;
        if let Some(why) = &self.failure {
            write!(f, "\nsweep stopped: {why}")?;
        }
        Ok(())
    }
}

fn run_points(axis: SweepAxis, jobs: Vec<(f64, IntegrandSpec, usize)>, problem: &BoundProblem) -> SweepResult {
    let results: Vec<Result<SweepPoint>> = jobs
        .par_iter()
        .map(|(axis_value, spec, cells)| {
            problem.solve_point(spec, *cells).map(|mut p| {
                p.sample.axis_value = *axis_value;
                p
            })
        })
        .collect();
    let mut points = Vec::new();
    let mut failure = None;
    for (r, (axis_value, _, _)) in results.into_iter().zip(&jobs) {
        match r {
            Ok(p) => points.push(p),
            Err(e) => {
                failure = Some(format!("{} = {axis_value}: {e}", axis.name()));
                break;
            }
        }
    }
    SweepResult { axis, points, failure }
}

/// Solves at each number of cells per side and evaluates the bound.
pub fn refinement_sweep(problem: &BoundProblem, cells: &[usize]) -> Result<SweepResult> {
    if cells.len() < 3 {
        return Err(Error::InvalidInput(format!("a mesh sweep needs at least 3 meshes, got {}", cells.len())));
    }
    if cells.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!("mesh sweep cells must increase, got {cells:?}")));
    }
    let spec = solver_spec(&problem.spec, problem.clamp)?;
    let jobs = cells
        .iter()
        .map(|&c| Ok((problem.side / c as f64, spec.clone(), c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(run_points(SweepAxis::MeshWidth, jobs, problem))
}

/// Re-clamps the integrand per entry, re-solves on `problem.cells` and
/// evaluates the bound.
pub fn clamp_sweep(problem: &BoundProblem, clamps: &[RegularizationClamp], axis: SweepAxis) -> Result<SweepResult> {
    if clamps.len() < 3 {
        return Err(Error::InvalidInput(format!("a clamp sweep needs at least 3 clamps, got {}", clamps.len())));
    }
    let jobs = clamps
        .iter()
        .map(|c| {
            let value = match axis {
                SweepAxis::ClampUpper => c.upper(),
                SweepAxis::ClampLower => c.lower(),
                SweepAxis::MeshWidth => {
                    return Err(Error::InvalidInput("a clamp sweep runs along N or M".into()));
                }
            };
            Ok((value, clamp_regularize(problem.base_spec(), *c)?, problem.cells))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(run_points(axis, jobs, problem))
}
