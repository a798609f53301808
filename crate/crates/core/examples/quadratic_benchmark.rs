//! Harmonic quadratic datum under `t²/2` on a 65×65 grid.

use std::time::Instant;

use gradbound::integrand::IntegrandSpec;
use gradbound::solver::{euler_residual, minimize, BoundaryDatum, DiscreteField, Grid, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells: usize = std::env::args().nth(1).map_or(Ok(64), |s| s.parse())?;
    let spec = IntegrandSpec::quadratic(2);
    let grid = Grid::unit(cells, 1)?;
    let datum = BoundaryDatum::HarmonicQuadratic { scale: 1.0 };
    let opts = SolveOptions { tol: 1e-12, init_noise: 0.1, seed: 3, ..SolveOptions::default() };
    let start = Instant::now();
    let sol = minimize(&spec, &grid, &datum, &opts)?;
    let exact = DiscreteField::interpolant(&grid, &datum)?;
    println!("{sol}");
    println!("interior error   {:.3e}", sol.field.max_difference(&exact));
    println!("euler residual   {:.3e}", euler_residual(&spec, &grid, &sol.field)?);
    println!("elapsed          {:.2?}", start.elapsed());
    Ok(())
}
