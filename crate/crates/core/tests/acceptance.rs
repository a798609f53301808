//! Acceptance suite: one PASS/FAIL line per criterion on standard error.
//!
//! Run with `cargo test --release --test acceptance`.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gradbound::bound::{clamp_sweep, refinement_sweep, BoundProblem, SweepAxis};
use gradbound::coefficient::{CoefficientField, CoefficientSet};
use gradbound::domain::BoxDomain;
use gradbound::dsl::{eval_dual2, eval_value, parse};
use gradbound::integrand::{
    clamp_regularize, ellipticity_bounds, hessian_quadratic_form, make_builtin, Builtin, HProfile, IntegrandSpec,
    RegularizationClamp,
};
use gradbound::solver::{
    discrete_energy, energy_gradient, euler_residual, minimize, BoundaryDatum, DiscreteField, Grid, SolveOptions,
};
use gradbound::structural::{
    admissible_window_search, exponents, lemma_suite_with, moser_schedule, sobolev_exponent, SamplingPlan,
    StructuralParams,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() <= limit_s, || {
        format!("{what} took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn unit(n: usize) -> BoxDomain {
    BoxDomain::unit(n)
}

fn coeffs(pairs: &[(&str, CoefficientField)]) -> CoefficientSet {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// The five builtin families with mildly x-dependent coefficients.
fn families(n: usize) -> Vec<(&'static str, IntegrandSpec)> {
    let wave = |c0: f64, amp: f64| CoefficientField::periodic(c0, amp, vec![1.0; n]);
    vec![
        ("exponential", make_builtin(Builtin::Exponential, &coeffs(&[("a", wave(1.0, 0.1))]), 1.0, unit(n)).unwrap()),
        (
            "variable_exponent",
            make_builtin(Builtin::VariableExponent, &coeffs(&[("p", wave(1.6, 0.1))]), 1.0, unit(n)).unwrap(),
        ),
        ("orlicz_log", make_builtin(Builtin::OrliczLog, &coeffs(&[("p", wave(1.5, 0.2))]), 1.0, unit(n)).unwrap()),
        (
            "composed_quadratic",
            make_builtin(Builtin::ComposedH(HProfile::quadratic()), &coeffs(&[("b", wave(2.0, 0.5))]), 1.0, unit(n))
                .unwrap(),
        ),
        ("linear_minus_sqrt", make_builtin(Builtin::LinearMinusSqrt, &coeffs(&[("a", wave(1.0, 0.2))]), 1.0, unit(n)).unwrap()),
    ]
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gradbound")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut windows = Vec::new();
    for n in [3usize, 4] {
        let spec = make_builtin(Builtin::LinearMinusSqrt, &CoefficientSet::new(), 1.0, unit(n)).map_err(|e| e.to_string())?;
        let h = HProfile::paired_with(&spec).map_err(|e| e.to_string())?;
        windows.push(admissible_window_search(&spec, &h, n, &SamplingPlan::coarse(0)).map_err(|e| e.to_string())?);
    }
    within(start.elapsed(), 1.0, "window search")?;
    let (w3, w4) = (&windows[0], &windows[1]);
    ensure((w3.beta_lo - 7.0 / 12.0).abs() < 1e-12 && w3.beta_lo_closed && (w3.beta_hi - 2.0 / 3.0).abs() < 1e-12, || format!("n = 3 window {w3}"))?;
    ensure(w3.beta_interval() == "[7/12, 2/3)" && w3.feasible, || format!("n = 3 window {w3}"))?;
    ensure(!w4.feasible && w4.failure.as_deref().is_some_and(|f| f.contains("beta window empty")), || {
        format!("n = 4 window {w4}")
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg3 = dir.path().join("n3.cfg");
    let cfg4 = dir.path().join("n4.cfg");
    std::fs::write(&cfg3, "[integrand]\nfamily = linear_minus_sqrt\n[structural]\nn = 3\n").unwrap();
    std::fs::write(&cfg4, "[integrand]\nfamily = linear_minus_sqrt\n[structural]\nn = 4\n").unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let start = Instant::now();
    let (c3, s3) = run_cli(&["check", "--config", cfg3.to_str().unwrap(), "--out", out]);
    let (c4, s4) = run_cli(&["check", "--config", cfg4.to_str().unwrap(), "--out", out]);
    within(start.elapsed(), 2.0, "two check runs")?;
    ensure(c3 == 0 && s3.contains("[7/12, 2/3)"), || format!("check n = 3: exit {c3}\n{s3}"))?;
    ensure(c4 == 1 && s4.contains("infeasible: beta window empty"), || format!("check n = 4: exit {c4}\n{s4}"))?;
    Ok(format!("n = 3: {}; n = 4: infeasible; CLI exits 0 / 1", w3.beta_interval()))
}

fn criterion_2() -> Outcome {
    let a = exponents(3, 1.2, 0.4, 0.1);
    let b = exponents(3, 1.3, 0.4, 0.1);
    let limit = (1.0 - 0.4) * sobolev_exponent(3, 10.0) / 2.0;
    ensure((a.tau - 1.68).abs() < 1e-12 && (b.tau - 2.08).abs() < 1e-12, || format!("tau = {}, {}", a.tau, b.tau))?;
    ensure((limit - 1.8).abs() < 1e-12, || format!("threshold {limit}"))?;
    ensure(a.feasible && !b.feasible, || format!("feasible flags {} / {}", a.feasible, b.feasible))?;
    Ok(format!("tau = {:.2} feasible, tau = {:.2} infeasible, threshold {:.1}", a.tau, b.tau, limit))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut worst_drift = 0.0f64;
    for (name, spec) in families(3) {
        let h = HProfile::paired_with(&spec).map_err(|e| e.to_string())?;
        let beta = if name == "linear_minus_sqrt" { 7.0 / 12.0 } else { 0.5 };
        let params = StructuralParams::new(3, 1.0, beta).with_alpha(1.2);
        let report = lemma_suite_with(&spec, &h, &params, 11, 100_000, 4096).map_err(|e| format!("{name}: {e}"))?;
        for e in &report.entries {
            ensure(e.passed, || format!("{name}: {} failed ({e:?})", e.name))?;
            if ["lemma1", "lemma2", "remark1"].contains(&e.name.as_str()) {
                ensure(e.samples >= 100_000 && e.violations == 0, || format!("{name}: {} {e:?}", e.name))?;
            } else if e.name.starts_with("lemma") {
                worst_drift = worst_drift.max(e.drift);
            }
        }
    }
    within(start.elapsed(), 60.0, "lemma suite over five families")?;
    Ok(format!(
        "pointwise checks clean on 1e5 samples, worst stabilization drift {worst_drift:.2e}, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn frob(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (n, m) = (3usize, 2usize);
    let mut worst_sandwich = 0.0f64;
    let mut worst_fd = 0.0f64;
    let mut fams = families(n);
    fams.push(("quadratic", IntegrandSpec::quadratic(n)));
    for (name, spec) in &fams {
        for k in 0..10_000 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let r = rng.gen_range(0.05f64..3.0);
            let dir: Vec<f64> = (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xi: Vec<f64> = dir.iter().map(|v| v * r / frob(&dir)).collect();
            let lambda: Vec<f64> = (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l2 = frob(&lambda).powi(2);
            let form = hessian_quadratic_form(spec, &x, &xi, &lambda).map_err(|e| e.to_string())?;
            let (lo, hi) = ellipticity_bounds(spec, &x, r).map_err(|e| e.to_string())?;
            let excess = ((lo * l2 - form) / (hi * l2)).max((form - hi * l2) / (hi * l2));
            worst_sandwich = worst_sandwich.max(excess);
            ensure(excess <= 1e-9, || format!("{name}: sandwich fails by {excess:e} at x = {x:?}, |xi| = {r}"))?;
            if k < 100 {
                let f = |s: f64| {
                    let p: Vec<f64> = xi.iter().zip(&lambda).map(|(a, b)| a + s * b).collect();
                    spec.eval_radial(&x, frob(&p)).map(|v| v.0).unwrap()
                };
                let step = 1e-4 * r / frob(&lambda);
                let fd = (f(step) - 2.0 * f(0.0) + f(-step)) / (step * step);
                let rel = (fd - form).abs() / form.abs().max(1e-3 * hi * l2);
                worst_fd = worst_fd.max(rel);
                ensure(rel <= 1e-5, || format!("{name}: finite-difference Hessian off by {rel:e} at |xi| = {r}"))?;
            }
        }
    }
    Ok(format!(
        "6 families x 1e4 samples, worst relative excess {worst_sandwich:.1e}, worst FD mismatch {worst_fd:.1e}"
    ))
}

fn criterion_5() -> Outcome {
    let exprs = [
        "a(x) * t^2 * log(1 + t) + x1 * sin(t)",
        "exp(a(x) * t^2 / 4) - 1 + x2^2 * t",
        "(1 + t^2)^(p(x) / 2) * cos(x1 * t / 3)",
        "sqrt(1 + t^2) * a(x) - x3 * t^3 / 7",
    ];
    let c = coeffs(&[
        ("a", CoefficientField::periodic(1.0, 0.3, vec![1.0, 0.5, 0.25])),
        ("p", CoefficientField::affine(1.5, vec![0.2, -0.1, 0.1])),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let rel = |ad: f64, fd: f64, scale: f64| (ad - fd).abs() / (ad.abs() + 1e-3 * scale).max(1e-12);
    for (k, src) in exprs.iter().enumerate() {
        let e = parse(src).map_err(|e| e.to_string())?;
        for _ in 0..2500 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..0.95)).collect();
            let t = rng.gen_range(0.1..2.0);
            let d = eval_dual2(&e, &x, t, &c).map_err(|e| format!("{src}: {e}"))?;
            let v = |x: &[f64], t: f64| eval_value(&e, x, t, &c).unwrap();
            let scale = 1.0 + d.value.abs();
            // Richardson-extrapolated central differences, error O(h^4)
            let rich = |d: &dyn Fn(f64) -> f64, h: f64| (4.0 * d(h) - d(2.0 * h)) / 3.0;
            let d_t = rich(&|h| (v(&x, t + h) - v(&x, t - h)) / (2.0 * h), 1e-4);
            let d_tt = rich(&|h| (v(&x, t + h) - 2.0 * v(&x, t) + v(&x, t - h)) / (h * h), 1e-3);
            let mut errs = vec![rel(d.d_t, d_t, scale), rel(d.d_tt, d_tt, scale)];
            for j in 0..3 {
                let shift = |s: f64| {
                    let mut y = x.clone();
                    y[j] += s;
                    y
                };
                let d_x = rich(&|h| (v(&shift(h), t) - v(&shift(-h), t)) / (2.0 * h), 1e-4);
                let d_tx = rich(
                    &|h| {
                        (v(&shift(h), t + h) - v(&shift(h), t - h) - v(&shift(-h), t + h) + v(&shift(-h), t - h))
                            / (4.0 * h * h)
                    },
                    1e-3,
                );
                errs.push(rel(d.d_x[j], d_x, scale));
                errs.push(rel(d.d_tx[j], d_tx, scale));
            }
            let m = errs.iter().copied().fold(0.0, f64::max);
            worst = worst.max(m);
            ensure(m <= 1e-6, || format!("expression {k} `{src}`: AD vs FD {m:e} at x = {x:?}, t = {t} (d_t, d_tt, then d_x/d_tx per axis: {errs:?})"))?;
        }
    }

    let grid = Grid::unit(4, 2).map_err(|e| e.to_string())?;
    let fams = [
        IntegrandSpec::quadratic(2),
        make_builtin(Builtin::Exponential, &coeffs(&[("a", CoefficientField::affine(0.8, vec![0.2, -0.1]))]), 1.0, unit(2)).unwrap(),
        make_builtin(Builtin::OrliczLog, &coeffs(&[("p", CoefficientField::constant(1.5))]), 1.0, unit(2)).unwrap(),
    ];
    let mut worst_grad = 0.0f64;
    for spec in &fams {
        let mut u = DiscreteField::from_datum(&grid, &BoundaryDatum::Sine { k: 1.0, amplitude: 0.5 }).unwrap();
        u.perturb(0.2, 8);
        let g = energy_gradient(spec, &grid, &u).map_err(|e| e.to_string())?;
        let fixed = u.fixed_dofs();
        for k in (0..g.len()).filter(|&k| !fixed[k]) {
            let step = 1e-6;
            let at = |s: f64| {
                let mut v = u.values().to_vec();
                v[k] += s;
                let mut w = u.clone();
                w.set_free(&v).unwrap();
                discrete_energy(spec, &grid, &w).unwrap()
            };
            let fd = (at(step) - at(-step)) / (2.0 * step);
            let r = (fd - g[k]).abs() / g[k].abs().max(1e-8);
            worst_grad = worst_grad.max(r);
            ensure(r <= 1e-6, || format!("{}: energy gradient vs FD {r:e} at dof {k}", spec.label()))?;
        }
    }
    Ok(format!("DSL 1e4 samples worst {worst:.1e}; energy gradient on 5x5 nodes worst {worst_grad:.1e}"))
}

fn criterion_6() -> Outcome {
    let clamp = RegularizationClamp::new(1e-3, 1e3).unwrap();
    let base = [
        ("quadratic", IntegrandSpec::quadratic(2)),
        (
            "clamped exponential",
            clamp_regularize(&make_builtin(Builtin::Exponential, &CoefficientSet::new(), 1.0, unit(2)).unwrap(), clamp).unwrap(),
        ),
        (
            "clamped linear_minus_sqrt",
            clamp_regularize(&make_builtin(Builtin::LinearMinusSqrt, &CoefficientSet::new(), 1.0, unit(2)).unwrap(), clamp)
                .unwrap(),
        ),
    ];
    let grid = Grid::unit(32, 2).unwrap();
    let datum = BoundaryDatum::affine(vec![0.8, -0.3, 0.5, 1.1], vec![0.1, -0.2]).unwrap();
    let exact = DiscreteField::interpolant(&grid, &datum).unwrap();
    let mut notes = Vec::new();
    for (name, spec) in &base {
        let opts = SolveOptions { tol: 1e-12, init_noise: 0.1, seed: 6, ..SolveOptions::default() };
        let start = Instant::now();
        let sol = minimize(spec, &grid, &datum, &opts).map_err(|e| format!("{name}: {e}"))?;
        within(start.elapsed(), 10.0, name)?;
        ensure(sol.converged(), || format!("{name}: {sol}"))?;
        let err = sol.field.max_difference(&exact);
        ensure(err <= 1e-8, || format!("{name}: sup error {err:e}"))?;
        notes.push(format!("{name} {err:.1e}"));
    }
    Ok(format!("33x33 sup errors: {}", notes.join(", ")))
}

fn criterion_7() -> Outcome {
    let spec = IntegrandSpec::quadratic(2);
    let grid = Grid::unit(64, 1).unwrap();
    let datum = BoundaryDatum::HarmonicQuadratic { scale: 1.0 };
    let opts = SolveOptions { tol: 1e-12, init_noise: 0.1, seed: 7, ..SolveOptions::default() };
    let start = Instant::now();
    let sol = minimize(&spec, &grid, &datum, &opts).map_err(|e| e.to_string())?;
    within(start.elapsed(), 30.0, "65x65 solve")?;
    ensure(sol.converged(), || sol.to_string())?;
    let res = euler_residual(&spec, &grid, &sol.field).map_err(|e| e.to_string())?;
    let h = grid.h();
    ensure(res <= 1e-6 / (h * h), || format!("euler residual {res:e}"))?;
    let err = sol.field.max_difference(&DiscreteField::interpolant(&grid, &datum).unwrap());
    ensure(err <= 1e-7, || format!("interior error {err:e}"))?;
    Ok(format!(
        "{} iterations, residual {res:.1e} (limit {:.1e}), interior error {err:.1e}",
        sol.iterations,
        1e-6 / (h * h)
    ))
}

fn criterion_8() -> Outcome {
    let exps = exponents(2, 1.0, 0.5, 0.1);
    let mut p = BoundProblem::new(IntegrandSpec::quadratic(2), BoundaryDatum::HarmonicQuadratic { scale: 1.0 }, 1, exps)
        .map_err(|e| e.to_string())?;
    p.options = SolveOptions { tol: 1e-11, init_noise: 0.05, seed: 8, ..SolveOptions::default() };
    let r = refinement_sweep(&p, &[16, 32, 64]).map_err(|e| e.to_string())?;
    ensure(r.complete(), || r.to_string())?;
    let harmonic = r.ratio_spread();
    ensure(harmonic <= 1.5, || r.to_string())?;
    p.datum = BoundaryDatum::affine(vec![0.7, -0.4], vec![0.2]).unwrap();
    let r = refinement_sweep(&p, &[16, 32, 64]).map_err(|e| e.to_string())?;
    ensure(r.complete(), || r.to_string())?;
    let affine = r.ratio_spread();
    ensure(affine <= 1.0 + 1e-9, || r.to_string())?;
    Ok(format!("harmonic spread {harmonic:.6}, affine spread 1 + {:.1e}", affine - 1.0))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let exps = exponents(2, 1.0, 0.5, 0.1);
    let expo = make_builtin(Builtin::Exponential, &coeffs(&[("a", CoefficientField::constant(1.0))]), 1.0, unit(2)).unwrap();
    let uppers: Vec<_> = [10.0, 100.0, 1000.0].iter().map(|&m| RegularizationClamp::new(1.0, m).unwrap()).collect();
    let mut notes = Vec::new();
    for (label, datum, m) in [
        ("dilation 0.3", BoundaryDatum::dilation(0.3), 2),
        ("harmonic 0.5", BoundaryDatum::HarmonicQuadratic { scale: 0.5 }, 1),
    ] {
        let mut p = BoundProblem::new(expo.clone(), datum, m, exps).map_err(|e| e.to_string())?;
        p.options.init_noise = 0.02;
        let r = clamp_sweep(&p, &uppers, SweepAxis::ClampUpper).map_err(|e| e.to_string())?;
        ensure(r.complete(), || r.to_string())?;
        let s = r.inactive_spread().ok_or_else(|| format!("{label}: every clamp is active\n{r}"))?;
        ensure(s <= 1.5, || format!("{label}: inactive spread {s}\n{r}"))?;
        notes.push(format!("exp {label}: inactive spread {s:.6} (all {:.4})", r.ratio_spread()));
    }
    let lms = make_builtin(Builtin::LinearMinusSqrt, &CoefficientSet::new(), 1.0, unit(2)).unwrap();
    let mut p = BoundProblem::new(lms, BoundaryDatum::HarmonicQuadratic { scale: 8.0 }, 1, exps).map_err(|e| e.to_string())?;
    p.options.init_noise = 0.02;
    let lowers: Vec<_> = [1e-2, 1e-3, 1e-4].iter().map(|&n| RegularizationClamp::new(n, 1e6).unwrap()).collect();
    let r = clamp_sweep(&p, &lowers, SweepAxis::ClampLower).map_err(|e| e.to_string())?;
    ensure(r.complete(), || r.to_string())?;
    ensure(r.ratio_spread() <= 2.0, || r.to_string())?;
    notes.push(format!("t - sqrt(t) lower-clamp spread {:.4}", r.ratio_spread()));
    within(start.elapsed(), 300.0, "clamp sweeps")?;
    Ok(notes.join("; "))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2usize..=8);
        let nf = n as f64;
        let two_star = sobolev_exponent(n, 10.0);
        let b_hi = (2.0 / nf).min(1.0 - 2.0 / two_star);
        let beta = rng.gen_range(1.0 / nf..b_hi);
        let tau = rng.gen_range(1.0..(1.0 - beta) * two_star / 2.0);
        let s = moser_schedule(n, beta, tau, 0.5, 1.0, 40).map_err(|e| e.to_string())?;
        for i in 0..=40 {
            let closed = s.gamma_closed_form(i);
            let rel = (s.gamma_seq[i] - closed).abs() / closed.abs().max(1e-300);
            let rel = if i == 0 { s.gamma_seq[0].abs() } else { rel };
            worst = worst.max(rel);
            ensure(rel <= 1e-9, || format!("n = {n}, beta = {beta}, tau = {tau}: gamma_{i} off by {rel:e}"))?;
        }
        let expected = (1.0 - beta - 2.0 * tau / two_star) * nf;
        ensure(s.limit_exponent == expected, || {
            format!("limit exponent {} != {expected} for n = {n}", s.limit_exponent)
        })?;
    }
    Ok(format!("100 random (n, beta, tau), worst gamma mismatch {worst:.1e}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("beta-window arithmetic", criterion_1),
        ("exponent gate", criterion_2),
        ("lemma property suite", criterion_3),
        ("ellipticity sandwich", criterion_4),
        ("AD and gradient oracles", criterion_5),
        ("affine exactness", criterion_6),
        ("quadratic benchmark", criterion_7),
        ("bound stability: mesh", criterion_8),
        ("bound stability: clamp", criterion_9),
        ("Moser schedule", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let line = match &outcome {
            Ok(detail) => format!("criterion {:>2} PASS  {name} ({secs:.2} s): {detail}", k + 1),
            Err(why) => {
                failed.push(k + 1);
                format!("criterion {:>2} FAIL  {name} ({secs:.2} s): {why}", k + 1)
            }
        };
        let _ = writeln!(std::io::stderr(), "{line}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
