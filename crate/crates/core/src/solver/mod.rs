//! Dirichlet minimization of `∫ g(x, |Du|)` for `m`-component maps on
//! square grids in the plane.

mod datum;
mod energy;
mod field;
mod grid;
mod optimize;

pub use datum::BoundaryDatum;
pub use energy::{
    cell_gradients, discrete_energy, energy_gradient, euler_residual, sup_norm_on_ball, CellGradient, T_EPS,
};
pub(crate) use energy::neumaier_sum;
pub use field::DiscreteField;
pub use grid::Grid;
pub use optimize::{minimize, minimize_from, Method, Solution, SolveOptions, SolveStatus};

use crate::error::Result;
use crate::integrand::{clamp_regularize, Family, IntegrandSpec, RegularizationClamp};

/// Lower clamp applied to `t - a√t` when none is given.
pub const DEFAULT_SLOW_GROWTH_LOWER: f64 = 1e-3;
/// Upper clamp paired with the default lower one; far above `g_tt` of that family.
pub const DEFAULT_SLOW_GROWTH_UPPER: f64 = 1e6;

/// The integrand actually handed to the solver: `clamp` if given,
/// otherwise the default lower clamp for `t - a√t`, otherwise `spec`.
pub fn solver_spec(spec: &IntegrandSpec, clamp: Option<RegularizationClamp>) -> Result<IntegrandSpec> {
    match clamp {
        Some(c) => clamp_regularize(spec, c),
        None if spec.family() == Family::LinearMinusSqrt && spec.clamp().is_none() => clamp_regularize(
            spec,
            RegularizationClamp::new(DEFAULT_SLOW_GROWTH_LOWER, DEFAULT_SLOW_GROWTH_UPPER)?,
        ),
        None => Ok(spec.clone()),
    }
}

/// Per-cell `|Du|` as CSV rows `cell_i,cell_j,|Du|`.
pub fn cell_gradients_csv(grid: &Grid, du: &[CellGradient]) -> String {
    let mut s = String::from("cell_i,cell_j,|Du|\n");
    for (k, c) in du.iter().enumerate() {
        s.push_str(&format!("{},{},{:.16e}\n", k % grid.cells(), k / grid.cells(), c.magnitude));
    }
    s
}
