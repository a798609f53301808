use std::f64::consts::PI;

use super::*;
use crate::integrand::{HProfile, IntegrandSpec};
use crate::solver::{minimize, BoundaryDatum, DiscreteField, Grid, SolveOptions};
use crate::structural::exponents;

fn quad() -> IntegrandSpec {
    IntegrandSpec::quadratic(2)
}

fn ball() -> Ball {
    Ball::new([0.5, 0.5], 0.2, 0.4).unwrap()
}

#[test]
fn affine_closed_form() {
    let exps = exponents(2, 1.0, 0.5, 0.1);
    assert!((exps.lhs_exponent - 0.6).abs() < 1e-15 && (exps.rhs_exponent - 2.1).abs() < 1e-15);
    let a = vec![1.0, -2.0, 0.5, 3.0];
    let a2: f64 = a.iter().map(|v| v * v).sum();
    let grid = Grid::unit(20, 2).unwrap();
    let u = DiscreteField::interpolant(&grid, &BoundaryDatum::affine(a, vec![0.0, 0.0]).unwrap()).unwrap();
    let s = evaluate_bound_field(&u, 0, &quad(), &HProfile::quadratic(), &exps, &ball()).unwrap();
    let area = PI * 0.16;
    assert!((s.lhs - a2.sqrt().powf(0.6)).abs() < 1e-12 * s.lhs);
    assert!((s.rhs_base - area * (1.0 + a2 / 2.0)).abs() < 1e-12 * s.rhs_base);
    assert!((s.rhs - s.rhs_base.powf(2.1)).abs() < 1e-12 * s.rhs);
    assert!((s.v_integral - area * (1.0 + a2)).abs() < 1e-12 * s.v_integral);
    assert_eq!(s.clamp_upper, f64::INFINITY);
}

#[test]
fn zero_field_has_zero_ratio() {
    let grid = Grid::unit(16, 2).unwrap();
    let u = DiscreteField::interpolant(&grid, &BoundaryDatum::dilation(0.0)).unwrap();
    let s = evaluate_bound_field(&u, 0, &quad(), &HProfile::quadratic(), &exponents(2, 1.0, 0.5, 0.1), &ball()).unwrap();
    assert_eq!((s.lhs, s.ratio), (0.0, 0.0));
    assert!((s.rhs_base - PI * 0.16).abs() < 1e-14);
}

#[test]
fn rejects_bad_inputs() {
    let grid = Grid::unit(16, 2).unwrap();
    let u = DiscreteField::interpolant(&grid, &BoundaryDatum::dilation(1.0)).unwrap();
    let h = HProfile::quadratic();
    let ok = exponents(2, 1.0, 0.5, 0.1);
    let bad = exponents(3, 1.3, 0.4, 0.1);
    assert!(!bad.feasible);
    assert!(evaluate_bound_field(&u, 0, &quad(), &h, &bad, &ball()).is_err());
    let off = Ball::new([0.8, 0.5], 0.2, 0.4).unwrap();
    assert!(evaluate_bound_field(&u, 0, &quad(), &h, &ok, &off).is_err());
    assert!(Ball::new([0.5, 0.5], 0.4, 0.2).is_err());
}

fn harmonic_sample(scale: f64, radius: f64, seed: u64) -> BoundSample {
    let grid = Grid::unit(32, 1).unwrap();
    let opts = SolveOptions { tol: 1e-12, init_noise: 0.05, seed, ..SolveOptions::default() };
    let sol = minimize(&quad(), &grid, &BoundaryDatum::HarmonicQuadratic { scale }, &opts).unwrap();
    assert!(sol.converged());
    let b = Ball::new([0.5, 0.5], 0.1, radius).unwrap();
    evaluate_bound(&sol, &quad(), &HProfile::quadratic(), &exponents(2, 1.0, 0.5, 0.1), &b).unwrap()
}

#[test]
fn reruns_are_reproducible() {
    let a = harmonic_sample(1.0, 0.3, 7);
    let b = harmonic_sample(1.0, 0.3, 7);
    assert!((a.ratio - b.ratio).abs() <= 1e-10 * a.ratio);
}

#[test]
fn scaling_and_monotone_radius() {
    let base = harmonic_sample(1.0, 0.3, 1);
    let area = PI * 0.09;
    for lambda in [2.0, 4.0] {
        let s = harmonic_sample(lambda, 0.3, 1);
        let lhs_exp = exponents(2, 1.0, 0.5, 0.1).lhs_exponent;
        assert!((s.lhs / base.lhs - lambda.powf(lhs_exp)).abs() < 1e-6 * lambda.powf(lhs_exp));
        let q = (s.rhs_base - area) / (base.rhs_base - area);
        assert!((q - lambda * lambda).abs() < 1e-6 * lambda * lambda, "{q}");
    }
    let mut prev = 0.0;
    for r in [0.15, 0.2, 0.3, 0.4, 0.45] {
        let s = harmonic_sample(1.0, r, 1);
        assert!(s.rhs_base >= prev);
        prev = s.rhs_base;
    }
}

fn problem(datum: BoundaryDatum) -> BoundProblem {
    let mut p = BoundProblem::new(quad(), datum, 1, exponents(2, 1.0, 0.5, 0.1)).unwrap();
    p.options.tol = 1e-12;
    p
}

#[test]
fn affine_refinement_is_flat() {
    let p = problem(BoundaryDatum::affine(vec![0.7, -0.4], vec![0.1]).unwrap());
    let r = refinement_sweep(&p, &[16, 32, 64]).unwrap();
    assert!(r.complete() && r.points.len() == 3);
    assert!(r.ratio_spread() <= 1.0 + 1e-9, "{r}");
    assert!(refinement_sweep(&p, &[8, 16]).is_err());
    assert!(refinement_sweep(&p, &[16, 8, 32]).is_err());
}

#[test]
fn inactive_clamps_change_nothing() {
    use crate::integrand::RegularizationClamp;
    let p = problem(BoundaryDatum::HarmonicQuadratic { scale: 1.0 });
    let clamps: Vec<_> = [2.0, 20.0, 200.0].iter().map(|&m| RegularizationClamp::new(0.5, m).unwrap()).collect();
    let r = clamp_sweep(&p, &clamps, SweepAxis::ClampUpper).unwrap();
    assert!(r.points.iter().all(SweepPoint::clamp_inactive));
    assert!(r.ratio_spread() <= 1.0 + 1e-9, "{r}");
    assert_eq!(r.inactive_spread(), Some(r.ratio_spread()));
    assert!(clamp_sweep(&p, &clamps, SweepAxis::MeshWidth).is_err());
}

#[test]
fn csv_round_trip() {
    let p = problem(BoundaryDatum::affine(vec![0.7, -0.4], vec![0.1]).unwrap());
    let r = refinement_sweep(&p, &[16, 32, 64]).unwrap();
    assert!(refinement_sweep(&p, &[8, 16, 32]).unwrap().failure.unwrap().contains("mesh width"));
    let text = sweep_csv(&r);
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let back = parse_samples_csv(&text).unwrap();
    assert_eq!(back, r.samples().cloned().collect::<Vec<_>>());
    let empty = SweepResult { axis: SweepAxis::MeshWidth, points: vec![], failure: None };
    assert_eq!(sweep_csv(&empty), format!("{CSV_HEADER}\n"));
    assert!(sweep_svg(&r).contains("<polyline"));
}
