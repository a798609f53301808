use std::f64::consts::PI;

use proptest::prelude::*;

use gradbound::bound::{disc_rect_area, parse_samples_csv, samples_csv, BoundSample};
use gradbound::cli::parse_config;
use gradbound::coefficient::CoefficientSet;
use gradbound::dsl::{eval_dual2, eval_value, parse};
use gradbound::integrand::IntegrandSpec;
use gradbound::solver::{minimize, BoundaryDatum, DiscreteField, Grid, SolveOptions};
use gradbound::structural::moser_schedule;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cells_tile_the_disc(cx in 0.3..0.7f64, cy in 0.3..0.7f64, r in 0.05..0.3f64, cells in 3usize..20) {
        let h = 1.0 / cells as f64;
        let mut total = 0.0;
        for i in 0..cells {
            for j in 0..cells {
                let (x0, y0) = (i as f64 * h, j as f64 * h);
                let a = disc_rect_area([cx, cy], r, x0, x0 + h, y0, y0 + h);
                prop_assert!(a >= -1e-15 && a <= h * h * (1.0 + 1e-12));
                total += a;
            }
        }
        prop_assert!((total - PI * r * r).abs() <= 1e-12, "{} vs {}", total, PI * r * r);
    }

    #[test]
    fn bound_csv_round_trips(
        rows in prop::collection::vec((1e-4..1.0f64, 1e-6..1e6f64, 0usize..100_000, any::<bool>()), 0..6)
    ) {
        let samples: Vec<BoundSample> = rows
            .iter()
            .map(|&(h, v, it, clamped)| BoundSample {
                axis_value: h,
                h,
                clamp_lower: if clamped { 1e-3 } else { 0.0 },
                clamp_upper: if clamped { v } else { f64::INFINITY },
                rho: 0.1,
                radius: 0.2,
                lhs: v.sqrt(),
                rhs_base: v / 3.0,
                rhs: v.powf(1.7),
                ratio: v.sqrt() / v.powf(1.7),
                v_integral: v * PI,
                iterations: it,
            })
            .collect();
        let text = samples_csv(&samples);
        prop_assert_eq!(parse_samples_csv(&text).unwrap(), samples);
    }

    #[test]
    fn moser_recurrence_matches_closed_form(n in 2usize..9, b in 0.01..0.99f64, s in 0.0..1.0f64) {
        let nf = n as f64;
        let two_star = if n == 2 { 10.0 } else { 2.0 * nf / (nf - 2.0) };
        let beta = 1.0 / nf + b * ((2.0 / nf).min(1.0 - 2.0 / two_star) - 1.0 / nf);
        let tau = 1.0 + s * ((1.0 - beta) * two_star / 2.0 - 1.0);
        let sched = moser_schedule(n, beta, tau, 0.5, 1.0, 25).unwrap();
        for i in 1..=25 {
            let c = sched.gamma_closed_form(i);
            prop_assert!((sched.gamma_seq[i] - c).abs() <= 1e-10 * c.abs(), "i = {}: {} vs {}", i, sched.gamma_seq[i], c);
        }
        prop_assert!(sched.radii.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fractions_in_config_are_exact(p in 1u32..50, q in 1u32..50) {
        let text = format!("[integrand]\nfamily = quadratic\n[structural]\ntheta = {}/{}\n", p + q, q);
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(cfg.structural.theta, Some((p + q) as f64 / q as f64));
    }

    #[test]
    fn dsl_first_derivatives_match_differences(t in 0.2..3.0f64, x1 in 0.0..1.0f64, k in 0usize..4) {
        let src = ["t^3 * x1 + log(1 + t)", "exp(t / 2) * (1 + x1^2)", "(1 + t^2)^(0.75 + x1 / 4)", "t * sin(t) - x1 * sqrt(t)"][k];
        let e = parse(src).unwrap();
        let c = CoefficientSet::new();
        let x = [x1, 0.5];
        let d = eval_dual2(&e, &x, t, &c).unwrap();
        let h = 1e-5;
        let fd_t = (eval_value(&e, &x, t + h, &c).unwrap() - eval_value(&e, &x, t - h, &c).unwrap()) / (2.0 * h);
        let fd_x = (eval_value(&e, &[x1 + h, 0.5], t, &c).unwrap() - eval_value(&e, &[x1 - h, 0.5], t, &c).unwrap()) / (2.0 * h);
        prop_assert!((d.d_t - fd_t).abs() <= 1e-7 * (1.0 + d.d_t.abs()), "{}: {} vs {}", src, d.d_t, fd_t);
        prop_assert!((d.d_x[0] - fd_x).abs() <= 1e-7 * (1.0 + d.d_x[0].abs()), "{}: {} vs {}", src, d.d_x[0], fd_x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn affine_data_are_discrete_minimizers(a in prop::collection::vec(-2.0..2.0f64, 2), b in -1.0..1.0f64, seed in 0u64..1000) {
        let grid = Grid::unit(8, 1).unwrap();
        let datum = BoundaryDatum::affine(a, vec![b]).unwrap();
        let opts = SolveOptions { tol: 1e-12, init_noise: 0.3, seed, ..SolveOptions::default() };
        let sol = minimize(&IntegrandSpec::quadratic(2), &grid, &datum, &opts).unwrap();
        prop_assert!(sol.converged());
        let err = sol.field.max_difference(&DiscreteField::interpolant(&grid, &datum).unwrap());
        prop_assert!(err < 1e-9, "error {}", err);
    }
}
