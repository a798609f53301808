//! Runs the lemma checks for every builtin family at admissible parameters.

use std::time::Instant;

use gradbound::coefficient::{CoefficientField, CoefficientSet};
use gradbound::domain::BoxDomain;
use gradbound::integrand::{make_builtin, Builtin, HProfile};
use gradbound::structural::{lemma_suite, StructuralParams};

fn main() -> gradbound::Result<()> {
    let samples: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let p15: CoefficientSet = [("p".to_string(), CoefficientField::constant(1.5))].into_iter().collect();
    let cases = [
        ("exponential", Builtin::Exponential, CoefficientSet::new(), 0.5),
        ("variable exponent", Builtin::VariableExponent, p15, 0.5),
        ("orlicz log", Builtin::OrliczLog, CoefficientSet::new(), 0.5),
        ("quadratic", Builtin::ComposedH(HProfile::quadratic()), CoefficientSet::new(), 0.5),
        ("t - sqrt t", Builtin::LinearMinusSqrt, CoefficientSet::new(), 7.0 / 12.0),
    ];
    for (name, b, c, beta) in cases {
        let spec = make_builtin(b, &c, 1.0, BoxDomain::unit(3))?;
        let h = HProfile::paired_with(&spec)?;
        let params = StructuralParams::new(3, 1.0, beta).with_alpha(1.2);
        let start = Instant::now();
        let report = lemma_suite(&spec, &h, &params, 7, samples)?;
        println!("== {name} (h = {}), {:.2?}\n{report}\n", h.name(), start.elapsed());
    }
    Ok(())
}
