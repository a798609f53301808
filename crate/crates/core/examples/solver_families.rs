//! Minimizes each family on one grid and reports convergence and residuals.

use std::time::Instant;

use gradbound::coefficient::{CoefficientField, CoefficientSet};
use gradbound::domain::BoxDomain;
use gradbound::integrand::{make_builtin, Builtin, IntegrandSpec};
use gradbound::solver::{euler_residual, minimize, solver_spec, BoundaryDatum, Grid, Method, SolveOptions};

fn main() -> gradbound::Result<()> {
    let cells: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(32);
    let unit = || BoxDomain::unit(2);
    let p: CoefficientSet = [("p".to_string(), CoefficientField::periodic(1.6, 0.2, vec![1.0, 2.0]))].into_iter().collect();
    let a: CoefficientSet = [("a".to_string(), CoefficientField::affine(1.0, vec![0.3, -0.2]))].into_iter().collect();
    let specs = [
        IntegrandSpec::quadratic(2),
        make_builtin(Builtin::Exponential, &a, 1.0, unit())?,
        make_builtin(Builtin::VariableExponent, &p, 1.0, unit())?,
        make_builtin(Builtin::OrliczLog, &CoefficientSet::new(), 1.0, unit())?,
        make_builtin(Builtin::LinearMinusSqrt, &CoefficientSet::new(), 1.0, unit())?,
    ];
    let grid = Grid::unit(cells, 2)?;
    let datum = BoundaryDatum::dilation(0.4);
    for spec in &specs {
        let spec = solver_spec(spec, None)?;
        for method in [Method::NonlinearCG, Method::GradientDescentArmijo] {
            let opts = SolveOptions { method, init_noise: 0.05, max_iter: 5000, ..SolveOptions::default() };
            let start = Instant::now();
            let sol = minimize(&spec, &grid, &datum, &opts)?;
            let res = euler_residual(&spec, &grid, &sol.field)?;
            println!("{:<28} {method:?}: {sol}, residual {res:.2e} ({:.2?})", spec.label(), start.elapsed());
        }
    }
    Ok(())
}
