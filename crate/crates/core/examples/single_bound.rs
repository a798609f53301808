//! One sup-bound evaluation on nested balls, with the chain constants.

use gradbound::bound::{evaluate_bound, Ball, DEFAULT_EPSILON};
use gradbound::coefficient::CoefficientSet;
use gradbound::domain::BoxDomain;
use gradbound::integrand::{make_builtin, Builtin, HProfile};
use gradbound::solver::{minimize, BoundaryDatum, Grid, SolveOptions};
use gradbound::structural::exponents;

fn main() -> gradbound::Result<()> {
    let spec = make_builtin(Builtin::OrliczLog, &CoefficientSet::new(), 1.0, BoxDomain::unit(2))?;
    let profile = HProfile::paired_with(&spec)?;
    let exps = exponents(2, 1.0, 0.75, DEFAULT_EPSILON);
    println!("tau = {}, exponents {:.4} / {:.4}", exps.tau, exps.lhs_exponent, exps.rhs_exponent);
    let grid = Grid::unit(48, 1)?;
    let sol = minimize(&spec, &grid, &BoundaryDatum::HarmonicQuadratic { scale: 2.0 }, &SolveOptions::default())?;
    println!("{sol}");
    for (rho, radius) in [(0.1, 0.2), (0.1, 0.3), (0.2, 0.4)] {
        let ball = Ball::new([0.5, 0.5], rho, radius)?;
        let s = evaluate_bound(&sol, &spec, &profile, &exps, &ball)?;
        let (c1, c2) = s.chain_constants();
        println!("{s}\n  chain constants {c1:.4e}, {c2:.4e}");
    }
    Ok(())
}
