//! Parses a user integrand, inspects its derivatives, then minimizes with it.

use gradbound::coefficient::{CoefficientField, CoefficientSet};
use gradbound::domain::BoxDomain;
use gradbound::dsl::{eval_dual2, parse, to_integrand};
use gradbound::integrand::ellipticity_bounds;
use gradbound::solver::{minimize, BoundaryDatum, Grid, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    if let Err(e) = parse("a(x) * t^2 +* log(1 + t)") {
        println!("rejected: {e}");
    }

    let src = "a(x) * (t^2 / 2 + t^4 / 12) + t * log(1 + t)";
    let expr = parse(src)?;
    let coeffs: CoefficientSet =
        [("a".to_string(), CoefficientField::periodic(1.0, 0.25, vec![1.0, 1.0]))].into_iter().collect();
    for t in [0.0, 0.5, 2.0] {
        let d = eval_dual2(&expr, &[0.3, 0.7], t, &coeffs)?;
        println!("t = {t}: g = {:.6}, g_t = {:.6}, g_tt = {:.6}, g_x = {:?}", d.value, d.d_t, d.d_tt, d.d_x);
    }

    let spec = to_integrand(&expr, &coeffs, 1.0, BoxDomain::unit(2))?;
    for w in spec.warnings() {
        println!("warning: {w}");
    }
    let (lo, hi) = ellipticity_bounds(&spec, &[0.3, 0.7], 2.0)?;
    println!("Hessian eigenvalues at |xi| = 2 lie in [{lo:.4}, {hi:.4}]");

    let grid = Grid::unit(32, 1)?;
    let sol = minimize(&spec, &grid, &BoundaryDatum::Sine { k: 1.0, amplitude: 0.8 }, &SolveOptions::default())?;
    println!("{src}: {sol}");
    Ok(())
}
