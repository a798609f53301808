//! Mesh and clamp sweeps of the sup-bound ratio for several integrands.

use std::time::Instant;

use gradbound::bound::{clamp_sweep, refinement_sweep, BoundProblem, SweepAxis, DEFAULT_EPSILON};
use gradbound::coefficient::CoefficientSet;
use gradbound::domain::BoxDomain;
use gradbound::integrand::{make_builtin, Builtin, IntegrandSpec, RegularizationClamp};
use gradbound::solver::BoundaryDatum;
use gradbound::structural::exponents;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exps = exponents(2, 1.0, 0.5, DEFAULT_EPSILON);
    let none = CoefficientSet::new();
    let unit = || BoxDomain::unit(2);

    let start = Instant::now();
    let p = BoundProblem::new(IntegrandSpec::quadratic(2), BoundaryDatum::HarmonicQuadratic { scale: 1.0 }, 1, exps)?;
    let r = refinement_sweep(&p, &[16, 32, 64])?;
    println!("t^2/2, harmonic datum, mesh sweep ({:.2?})\n{r}", start.elapsed());
    for s in r.samples() {
        let (c1, c2) = s.chain_constants();
        println!("  chain constants at h = {:.4}: {c1:.6e}, {c2:.6e}", s.h);
    }

    let start = Instant::now();
    let orlicz = make_builtin(Builtin::OrliczLog, &none, 1.0, unit())?;
    let p = BoundProblem::new(orlicz, BoundaryDatum::Sine { k: 1.0, amplitude: 0.5 }, 1, exps)?;
    let r = refinement_sweep(&p, &[16, 32, 64])?;
    println!("\nt log(1+t), sine datum, mesh sweep ({:.2?})\n{r}", start.elapsed());

    let start = Instant::now();
    let expo = make_builtin(Builtin::Exponential, &none, 1.0, unit())?;
    let mut p = BoundProblem::new(expo, BoundaryDatum::HarmonicQuadratic { scale: 0.5 }, 1, exps)?;
    p.cells = 32;
    let clamps: Vec<_> = [10.0, 100.0, 1000.0].iter().map(|&m| RegularizationClamp::new(1.0, m)).collect::<Result<_, _>>()?;
    let r = clamp_sweep(&p, &clamps, SweepAxis::ClampUpper)?;
    println!("\nexp(t^2) - 1, upper clamp sweep ({:.2?})\n{r}", start.elapsed());

    let start = Instant::now();
    let lms = make_builtin(Builtin::LinearMinusSqrt, &none, 1.0, unit())?;
    let mut p = BoundProblem::new(lms, BoundaryDatum::HarmonicQuadratic { scale: 1.0 }, 1, exps)?;
    p.cells = 32;
    let clamps: Vec<_> = [1e-2, 1e-3, 1e-4].iter().map(|&n| RegularizationClamp::new(n, 1e6)).collect::<Result<_, _>>()?;
    let r = clamp_sweep(&p, &clamps, SweepAxis::ClampLower)?;
    println!("\nt - sqrt(t), lower clamp sweep ({:.2?})\n{r}", start.elapsed());
    Ok(())
}
