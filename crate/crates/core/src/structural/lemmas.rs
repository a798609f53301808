//! Randomized checks of the profile inequalities behind the estimate.
//!
//! Inequalities with explicit constants are checked pointwise. Those that
//! only assert the existence of a constant are checked by sampling the
//! quotient of the two sides and requiring its running supremum to settle:
//! the sup over the first half of the samples must be within 1% of the sup
//! over all of them.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrand::{ellipticity_bounds, hessian_quadratic_form, HProfile, IntegrandSpec};
use crate::quadrature::{integrate, QuadOptions};

use super::params::StructuralParams;
use super::phi::{g_function_with, phi_eval, quad_error, PhiFamily};

/// Relative slack allowed in pointwise checks.
pub const HARD_SLACK: f64 = 1e-12;
/// Relative slack in the ellipticity sandwich.
pub const SANDWICH_SLACK: f64 = 1e-9;
/// Allowed drift of the empirical sup between half and full sample.
pub const MAX_DRIFT: f64 = 0.01;
/// Quadrature accuracy for the sampled integrals; far below the 1% drift
/// tolerance they feed.
fn lemma_quad() -> QuadOptions {
    QuadOptions::relative(1e-9, 1e-12)
}

/// Number of `σ` values in the admissible window.
pub const SIGMA_GRID: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Explicit constant, no violations allowed.
    Pointwise,
    /// Existence of a constant, judged by sup stabilization.
    Stabilized,
}

/// A sampled tuple; unused coordinates are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LemmaSample {
    pub gamma: Option<f64>,
    pub sigma: Option<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaEntry {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub samples: usize,
    /// Pointwise: largest relative excess (<= slack to pass).
    /// Stabilized: empirical sup of the quotient.
    pub constant: f64,
    /// Stabilized only: sup over the first half.
    pub first_half: f64,
    pub drift: f64,
    pub violations: usize,
    pub worst: LemmaSample,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub entries: Vec<LemmaEntry>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn get(&self, name: &str) -> Option<&LemmaEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.16e}"));
        let mut s = String::from("name,kind,passed,samples,constant,first_half,drift,violations,gamma,sigma,t\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{},{},{:.16e},{:.16e},{:.16e},{},{},{},{:.16e}\n",
                e.name,
                match e.kind {
                    CheckKind::Pointwise => "pointwise",
                    CheckKind::Stabilized => "stabilized",
                },
                e.passed,
                e.samples,
                e.constant,
                e.first_half,
                e.drift,
                e.violations,
                opt(e.worst.gamma),
                opt(e.worst.sigma),
                e.worst.t
            ));
        }
        s
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{:<22} {} ", e.name, if e.passed { "pass" } else { "FAIL" })?;
            match e.kind {
                CheckKind::Pointwise => write!(f, "{} samples, {} violations, max excess {:.3e}", e.samples, e.violations, e.constant + 0.0)?,
                CheckKind::Stabilized => write!(f, "{} samples, sup {:.6e}, drift {:.3e}", e.samples, e.constant, e.drift + 0.0)?,
            }
            if !e.note.is_empty() {
                write!(f, " ({})", e.note)?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn failed(name: &str, kind: CheckKind, note: String) -> LemmaEntry {
    LemmaEntry {
        name: name.into(),
        kind,
        passed: false,
        samples: 0,
        constant: f64::NAN,
        first_half: f64::NAN,
        drift: f64::NAN,
        violations: 0,
        worst: LemmaSample::default(),
        note,
    }
}

/// Reduces per-sample relative excesses of a pointwise inequality.
fn pointwise(name: &str, tuples: &[LemmaSample], excess: Vec<f64>, slack: f64) -> LemmaEntry {
    let mut worst = 0;
    let mut violations = 0;
    for (i, e) in excess.iter().enumerate() {
        if !(*e <= slack) {
            violations += 1;
        }
        if e.is_nan() || *e > excess[worst] {
            worst = i;
        }
    }
    LemmaEntry {
        name: name.into(),
        kind: CheckKind::Pointwise,
        passed: violations == 0 && !excess.is_empty(),
        samples: excess.len(),
        constant: excess.get(worst).copied().unwrap_or(f64::NAN),
        first_half: f64::NAN,
        drift: f64::NAN,
        violations,
        worst: tuples.get(worst).copied().unwrap_or_default(),
        note: String::new(),
    }
}

/// Reduces per-sample log-quotients to a stabilization verdict.
fn stabilized(name: &str, tuples: &[LemmaSample], logs: Vec<Result<f64>>) -> LemmaEntry {
    let mut vals = Vec::with_capacity(logs.len());
    let mut kept = Vec::with_capacity(logs.len());
    let mut skipped = 0;
    for (i, r) in logs.into_iter().enumerate() {
        match r {
            Ok(v) => {
                vals.push(v);
                kept.push(tuples[i]);
            }
            Err(Error::Range { .. }) => skipped += 1,
            Err(e) => return failed(name, CheckKind::Stabilized, e.to_string()),
        }
    }
    if vals.is_empty() {
        return failed(name, CheckKind::Stabilized, "no evaluable samples".into());
    }
    if let Some(i) = vals.iter().position(|v| v.is_nan()) {
        let mut e = failed(name, CheckKind::Stabilized, "undefined quotient".into());
        e.worst = kept[i];
        return e;
    }
    let half = vals.len() / 2;
    let arg = |s: &[f64]| (0..s.len()).fold(0, |b, i| if s[i] > s[b] { i } else { b });
    let w = arg(&vals);
    let sup = vals[w];
    let sup_half = if half == 0 { sup } else { vals[arg(&vals[..half])] };
    let drift = if sup.is_finite() { -(sup_half - sup).exp_m1() } else { f64::INFINITY };
    let mut note = String::new();
    if skipped > 0 {
        note = format!("{skipped} samples out of floating range skipped");
    }
    LemmaEntry {
        name: name.into(),
        kind: CheckKind::Stabilized,
        passed: sup.is_finite() && drift <= MAX_DRIFT,
        samples: vals.len(),
        constant: sup.exp(),
        first_half: sup_half.exp(),
        drift,
        violations: 0,
        worst: kept[w],
        note,
    }
}

/// `1 + ∫_1^t w(s) sqrt(K_m(s)) ds`
fn weighted_integral(h: &HProfile, t: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    if t <= 1.0 {
        return Ok(1.0);
    }
    let v = integrate(|s| Ok(weight(s) * h.k_min(s)?.sqrt()), 1.0, t, lemma_quad()).map_err(|e| quad_error(e, t))?;
    Ok(1.0 + v)
}

/// `ln [1 + A^p K]^{1/p}` with `A = (t-1)^a t^{-β}/(γ+1)`, `ln K` given.
fn ln_bracket(t: f64, a_exp: f64, beta: f64, gamma: f64, p: f64, ln_k: f64) -> f64 {
    if t <= 1.0 {
        return 0.0;
    }
    let ln_a = a_exp * (t - 1.0).ln() - beta * t.ln() - (gamma + 1.0).ln();
    softplus(p * ln_a + ln_k) / p
}

fn sigma_grid(params: &StructuralParams) -> Option<Vec<f64>> {
    let lo = params.sigma_min();
    if !(lo.is_finite() && lo > 0.0 && lo <= 1.0) {
        return None;
    }
    Some(
        (0..SIGMA_GRID)
            .map(|k| lo + (1.0 - lo) * k as f64 / (SIGMA_GRID - 1) as f64)
            .collect(),
    )
}

struct Draw {
    rng: ChaCha8Rng,
    t_hi: f64,
}

impl Draw {
    fn log_t(&mut self) -> f64 {
        (self.rng.gen::<f64>() * self.t_hi.ln()).exp().min(self.t_hi)
    }

    /// Half uniform on `[0, 2]`, half log-uniform on `[1, 1e3]`.
    fn wide_t(&mut self) -> f64 {
        if self.rng.gen::<bool>() {
            2.0 * self.rng.gen::<f64>()
        } else {
            (self.rng.gen::<f64>() * 1e3f64.ln()).exp()
        }
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.gen::<f64>()
    }

    /// Uniform on `[lo, hi]` with an eighth of the mass on each endpoint.
    fn uniform_with_edges(&mut self, lo: f64, hi: f64) -> f64 {
        match self.rng.gen_range(0..8) {
            0 => lo,
            1 => hi,
            _ => self.uniform(lo, hi),
        }
    }

    fn pick(&mut self, v: &[f64]) -> f64 {
        v[self.rng.gen_range(0..v.len())]
    }
}

fn tuples(draw: &mut Draw, count: usize, mut f: impl FnMut(&mut Draw) -> LemmaSample) -> Vec<LemmaSample> {
    (0..count).map(|_| f(draw)).collect()
}

/// Runs every check with `samples` random tuples each.
///
/// The profile `h` drives the lemma checks; `spec` feeds the ellipticity
/// sandwich. Sampling is sequential from `seed`, evaluation is parallel.
pub fn lemma_suite(
    spec: &IntegrandSpec,
    h: &HProfile,
    params: &StructuralParams,
    seed: u64,
    samples: usize,
) -> Result<LemmaReport> {
    lemma_suite_with(spec, h, params, seed, samples, samples)
}

/// As [`lemma_suite`], with separate counts for the cheap pointwise checks
/// and the quadrature-based stabilization checks.
pub fn lemma_suite_with(
    spec: &IntegrandSpec,
    h: &HProfile,
    params: &StructuralParams,
    seed: u64,
    samples: usize,
    stabilized_samples: usize,
) -> Result<LemmaReport> {
    params.validate()?;
    if samples < 2 || stabilized_samples < 2 {
        return Err(Error::InvalidInput("the lemma suite needs at least 2 samples".into()));
    }
    let t_hi = h.safe_argument().map_or(params.t_max, |s| s.min(params.t_max));
    if !(t_hi > 1.0) {
        return Err(Error::InvalidInput(format!("profile range [1, {t_hi}] is empty")));
    }
    let mut draw = Draw {
        rng: ChaCha8Rng::seed_from_u64(seed),
        t_hi,
    };
    let (alpha, beta, two_star, tau) = (params.alpha, params.beta, params.two_star(), params.tau());
    let mut entries = Vec::new();

    // explicit-constant inequalities for Φ
    let ts = tuples(&mut draw, samples, |d| LemmaSample {
        gamma: Some(d.uniform(1.0, 10.0).max(1.0 + 1e-12)),
        sigma: None,
        t: d.wide_t(),
    });
    let ex: Vec<f64> = ts
        .par_iter()
        .map(|s| {
            let g = s.gamma.unwrap();
            let (p, dp) = phi_eval(&PhiFamily::new(g).unwrap(), s.t);
            let rhs = g * (1.0 + 2.0 * p);
            ((dp * s.t - rhs) / rhs.max(1.0)).max(-dp * s.t)
        })
        .collect();
    entries.push(pointwise("lemma1", &ts, ex, HARD_SLACK));

    let ts = tuples(&mut draw, samples, |d| LemmaSample {
        gamma: Some(d.uniform(0.0, 1.0)),
        sigma: None,
        t: d.wide_t(),
    });
    let ex: Vec<f64> = ts
        .par_iter()
        .map(|s| {
            let g = s.gamma.unwrap();
            let (p, dp) = phi_eval(&PhiFamily::new(g).unwrap(), s.t);
            let rhs = 2.0 + (g + 2.0) * p;
            ((dp * s.t - rhs) / rhs.max(1.0)).max(-dp * s.t)
        })
        .collect();
    entries.push(pointwise("lemma2", &ts, ex, HARD_SLACK));

    let ts = tuples(&mut draw, samples, |d| LemmaSample {
        gamma: Some(d.uniform(0.0, 10.0)),
        sigma: None,
        t: d.wide_t(),
    });
    let ex: Vec<f64> = ts
        .par_iter()
        .map(|s| {
            let g = s.gamma.unwrap();
            let (p, dp) = phi_eval(&PhiFamily::new(g).unwrap(), s.t);
            let rhs = (2.0 * g + 2.0) * (1.0 + p);
            let cap = s.t.powf(g);
            ((dp * s.t - rhs) / rhs.max(1.0))
                .max(-dp * s.t)
                .max(-p)
                .max((p - cap) / cap.max(1.0))
        })
        .collect();
    entries.push(pointwise("remark1", &ts, ex, HARD_SLACK));

    // existence-of-constant inequalities
    let sigmas = sigma_grid(params);
    let sigma_note = || {
        format!(
            "sigma window [{:.6}, 1] is empty for alpha = {alpha}",
            params.sigma_min()
        )
    };
    let ln_km = |t: f64| h.k_max(t).map(f64::ln);

    match &sigmas {
        Some(sg) => {
            let ts = tuples(&mut draw, stabilized_samples, |d| LemmaSample {
                gamma: Some(d.uniform_with_edges(1.0, 10.0)),
                sigma: Some(d.pick(sg)),
                t: d.log_t(),
            });
            let logs: Vec<Result<f64>> = ts
                .par_iter()
                .map(|s| {
                    let (g, sig) = (s.gamma.unwrap(), s.sigma.unwrap());
                    let lhs = weighted_integral(h, s.t, |u| (u - 1.0).powf(g))?;
                    let rhs = ln_bracket(s.t, g + 1.0, beta, g, two_star, ln_km(s.t)? / sig);
                    Ok(rhs - lhs.ln())
                })
                .collect();
            entries.push(stabilized("lemma3", &ts, logs));

            let ts = tuples(&mut draw, stabilized_samples, |d| LemmaSample {
                gamma: Some(d.uniform_with_edges(0.0, 1.0)),
                sigma: Some(d.pick(sg)),
                t: d.log_t(),
            });
            let logs: Vec<Result<f64>> = ts
                .par_iter()
                .map(|s| {
                    let (g, sig) = (s.gamma.unwrap(), s.sigma.unwrap());
                    let lhs = weighted_integral(h, s.t, |u| (u - 1.0) * u.powf(g - 1.0))?;
                    let rhs = ln_bracket(s.t, g + 1.0, beta, g, two_star, ln_km(s.t)? / sig);
                    Ok(rhs - lhs.ln())
                })
                .collect();
            entries.push(stabilized("lemma4", &ts, logs));

            let ts = tuples(&mut draw, stabilized_samples, |d| LemmaSample {
                gamma: Some(d.uniform_with_edges(0.0, 10.0)),
                sigma: Some(d.pick(sg)),
                t: d.log_t(),
            });
            let g_based = |s: &LemmaSample, p: f64, ln_k: f64| -> Result<f64> {
                let g = s.gamma.unwrap();
                let lhs = g_function_with(h, &PhiFamily::new(g)?, s.t, lemma_quad())?;
                Ok(ln_bracket(s.t, g / 2.0 + 1.0, beta, g, p, ln_k) - lhs.ln())
            };
            let logs: Vec<Result<f64>> = ts
                .par_iter()
                .map(|s| g_based(s, two_star, ln_km(s.t)? / s.sigma.unwrap()))
                .collect();
            entries.push(stabilized("lemma5", &ts, logs));

            let logs: Vec<Result<f64>> = ts
                .par_iter()
                .map(|s| g_based(s, two_star * s.sigma.unwrap(), ln_km(s.t)?))
                .collect();
            entries.push(stabilized("lemma5_power_sigma", &ts, logs));

            if 1.0 / tau >= params.sigma_min() {
                let ts: Vec<LemmaSample> = ts.iter().map(|s| LemmaSample { sigma: Some(1.0 / tau), ..*s }).collect();
                let logs: Vec<Result<f64>> = ts.par_iter().map(|s| g_based(s, two_star, tau * ln_km(s.t)?)).collect();
                entries.push(stabilized("lemma5_sigma_tau", &ts, logs));
            } else {
                entries.push(failed(
                    "lemma5_sigma_tau",
                    CheckKind::Stabilized,
                    format!("sigma = 1/tau = {:.6} lies below the window start {:.6}", 1.0 / tau, params.sigma_min()),
                ));
            }
        }
        None => {
            for name in ["lemma3", "lemma4", "lemma5", "lemma5_power_sigma", "lemma5_sigma_tau"] {
                entries.push(failed(name, CheckKind::Stabilized, sigma_note()));
            }
        }
    }

    let ts = tuples(&mut draw, stabilized_samples, |d| LemmaSample {
        gamma: None,
        sigma: None,
        t: d.log_t(),
    });
    if alpha < 2.0 {
        let logs: Vec<Result<f64>> = ts
            .par_iter()
            .map(|s| {
                let (hv, h1, _) = h.eval(s.t)?;
                Ok((h1 * s.t).ln() - hv.ln_1p() / (2.0 - alpha))
            })
            .collect();
        entries.push(stabilized("lemma6", &ts, logs));
    } else {
        entries.push(failed("lemma6", CheckKind::Stabilized, format!("needs alpha < 2, got {alpha}")));
    }

    let tau_limit = two_star * (2.0 - alpha) / (2.0 * alpha);
    let eta = alpha / (2.0 - alpha);
    let k_lemma = |tau_k: f64, exponent: f64| -> Vec<Result<f64>> {
        ts.par_iter()
            .map(|s| {
                let (hv, _, _) = h.eval(s.t)?;
                let lhs = softplus(tau_k * (ln_km(s.t)? + 2.0 * s.t.ln()));
                Ok(lhs - exponent * hv.ln_1p())
            })
            .collect()
    };
    if alpha < 2.0 && tau < tau_limit {
        entries.push(stabilized("lemma7", &ts, k_lemma(tau, tau * eta)));
    } else {
        entries.push(failed(
            "lemma7",
            CheckKind::Stabilized,
            format!("tau = {tau:.6} is not below 2*(2 - alpha)/(2 alpha) = {tau_limit:.6}"),
        ));
    }
    if alpha < 2.0 {
        entries.push(stabilized("lemma7_unit_tau", &ts, k_lemma(1.0, eta)));
    } else {
        entries.push(failed("lemma7_unit_tau", CheckKind::Stabilized, format!("needs alpha < 2, got {alpha}")));
    }

    entries.push(ellipticity_sandwich(spec, &mut draw, samples)?);
    Ok(LemmaReport { entries })
}

/// `H_m |λ|² <= Σ f_ξξ λλ <= H_M |λ|²` at random `(x, ξ, λ)`, scalar maps.
fn ellipticity_sandwich(spec: &IntegrandSpec, draw: &mut Draw, samples: usize) -> Result<LemmaEntry> {
    let dom = spec.domain().clone();
    let n = dom.dim();
    let t_lo = 1e-3f64;
    let t_hi = spec.default_t_max();
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples {
        let u: Vec<f64> = (0..n).map(|_| draw.rng.gen::<f64>()).collect();
        let x = dom.from_unit(&u);
        let dir: Vec<f64> = (0..n).map(|_| draw.uniform(-1.0, 1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
        let r = (t_lo.ln() + draw.rng.gen::<f64>() * (t_hi / t_lo).ln()).exp();
        let xi: Vec<f64> = dir.iter().map(|v| v / norm * r).collect();
        let lambda: Vec<f64> = (0..n).map(|_| draw.uniform(-1.0, 1.0)).collect();
        rows.push((x, xi, lambda));
    }
    let tuples: Vec<LemmaSample> = rows
        .iter()
        .map(|(_, xi, _)| LemmaSample {
            gamma: None,
            sigma: None,
            t: xi.iter().map(|v| v * v).sum::<f64>().sqrt(),
        })
        .collect();
    let results: Vec<Result<Option<f64>>> = rows
        .par_iter()
        .zip(&tuples)
        .map(|((x, xi, lambda), s)| {
            let form = match hessian_quadratic_form(spec, x, xi, lambda) {
                Ok(v) => v,
                Err(Error::Range { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let (lo, hi) = ellipticity_bounds(spec, x, s.t)?;
            let l2: f64 = lambda.iter().map(|v| v * v).sum();
            let scale = (hi * l2).abs().max(f64::MIN_POSITIVE);
            Ok(Some(((lo * l2 - form).max(form - hi * l2)) / scale))
        })
        .collect();
    let mut kept = Vec::new();
    let mut ex = Vec::new();
    for (r, s) in results.into_iter().zip(&tuples) {
        if let Some(v) = r? {
            kept.push(*s);
            ex.push(v);
        }
    }
    let mut e = pointwise("ellipticity_sandwich", &kept, ex, SANDWICH_SLACK);
    if kept.len() < tuples.len() {
        e.note = format!("{} samples out of floating range skipped", tuples.len() - kept.len());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-800.0) >= 0.0);
    }

    #[test]
    fn lemma6_sup_for_quadratic_profile() {
        // sup_t t²/(1 + t²/2)² = 1/2 at t = √2
        let p = StructuralParams::new(3, 1.0, 0.5);
        let r = lemma_suite(&IntegrandSpec::quadratic(3), &HProfile::quadratic(), &p, 3, 4000).unwrap();
        let e = r.get("lemma6").unwrap();
        assert!(e.passed);
        assert!(e.constant <= 0.5 + 1e-12 && e.constant > 0.49, "{}", e.constant);
    }

    #[test]
    fn quadratic_profile_passes_everything_at_small_alpha() {
        let p = StructuralParams::new(3, 1.0, 0.5).with_alpha(1.2);
        let r = lemma_suite(&IntegrandSpec::quadratic(3), &HProfile::quadratic(), &p, 11, 2000).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn empty_sigma_window_is_reported() {
        let p = StructuralParams::new(2, 1.0, 0.75);
        let r = lemma_suite(&IntegrandSpec::quadratic(2), &HProfile::quadratic(), &p, 0, 100).unwrap();
        let e = r.get("lemma3").unwrap();
        assert!(!e.passed && e.note.contains("sigma window"));
    }
}
