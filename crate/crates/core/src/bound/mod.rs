//! Both sides of the local sup bound on discrete minimizers, and sweeps over
//! the mesh width and the clamp constants.

mod area;
mod report;
mod sample;
mod sweep;

pub use area::disc_rect_area;
pub use report::{parse_samples_csv, report_csv, samples_csv, sweep_csv, sweep_svg, write_svg, CSV_HEADER};
pub use sample::{evaluate_bound, evaluate_bound_field, Ball, BoundSample};
pub use sweep::{clamp_sweep, refinement_sweep, BoundProblem, SweepAxis, SweepPoint, SweepResult};

/// Default `ε` in the right-hand exponent.
pub const DEFAULT_EPSILON: f64 = 0.1;

#[cfg(test)]
mod tests;
