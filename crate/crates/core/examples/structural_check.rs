//! Window search and full structural report for each builtin family.

use std::time::Instant;

use gradbound::bound::DEFAULT_EPSILON;
use gradbound::coefficient::CoefficientSet;
use gradbound::domain::BoxDomain;
use gradbound::integrand::{make_builtin, Builtin, HProfile};
use gradbound::structural::{admissible_window_search, structural_report, SamplingPlan, StructuralParams};

fn main() -> gradbound::Result<()> {
    let builtins = [
        Builtin::Exponential,
        Builtin::OrliczLog,
        Builtin::ComposedH(HProfile::quadratic()),
        Builtin::LinearMinusSqrt,
    ];
    for n in [2usize, 3, 4] {
        for b in &builtins {
            let spec = make_builtin(b.clone(), &CoefficientSet::new(), 1.0, BoxDomain::unit(n))?;
            let h = HProfile::paired_with(&spec)?;
            let start = Instant::now();
            let w = admissible_window_search(&spec, &h, n, &SamplingPlan::coarse(1))?;
            println!("{:<24} {w} ({:.2?})", spec.label(), start.elapsed());
            if let (Some(beta), Some(theta)) = (w.default_beta, w.default_theta) {
                let params = StructuralParams::new(n, theta, beta);
                let report = structural_report(&spec, &h, &params, &SamplingPlan::default(), DEFAULT_EPSILON)?;
                if !report.certified() {
                    println!("{report}");
                }
            }
        }
    }
    Ok(())
}
