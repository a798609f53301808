//! Sampled certification of the growth conditions on `g` and on `h`.

use std::fmt;

use rayon::prelude::*;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::integrand::{HProfile, IntegrandSpec};

use super::params::StructuralParams;
use super::sampling::SamplingPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `constant · rhs <= lhs`; the constant is an infimum.
    Lower,
    /// `lhs <= constant · rhs`; the constant is a supremum.
    Upper,
}

/// Outcome for one inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityResult {
    pub name: String,
    pub side: Side,
    pub certified: bool,
    /// Inf (lower) or sup (upper) of the sampled quotient.
    pub constant: f64,
    pub worst_x: Vec<f64>,
    pub worst_t: f64,
    pub quotient: f64,
    /// Extremes over `t <= T_k` for the three nested ranges.
    pub nested: [f64; 3],
    pub note: String,
}

/// Measured constants and per-inequality outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub inequalities: Vec<InequalityResult>,
    pub certified: bool,
    pub m: Option<f64>,
    pub m_theta: Option<f64>,
    pub m_beta: Option<f64>,
    pub m_alpha: Option<f64>,
    pub t_range: (f64, f64),
    pub samples: usize,
    pub skipped: usize,
}

impl AssumptionReport {
    /// Union of two reports (e.g. the conditions on `g` and those on `h`).
    pub fn merge(mut self, other: AssumptionReport) -> AssumptionReport {
        self.inequalities.extend(other.inequalities);
        self.certified &= other.certified;
        self.m = self.m.or(other.m);
        self.m_theta = self.m_theta.or(other.m_theta);
        self.m_beta = self.m_beta.or(other.m_beta);
        self.m_alpha = self.m_alpha.or(other.m_alpha);
        self.samples += other.samples;
        self.skipped += other.skipped;
        self
    }

    pub fn get(&self, name: &str) -> Option<&InequalityResult> {
        self.inequalities.iter().find(|r| r.name == name)
    }

    /// CSV with columns `name,certified,constant,worst_x,worst_t,quotient`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,certified,constant,worst_x,worst_t,quotient\n");
        for r in &self.inequalities {
            let x: Vec<String> = r.worst_x.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&format!(
                "{},{},{:.16e},{},{:.16e},{:.16e}\n",
                r.name,
                r.certified,
                r.constant,
                x.join(";"),
                r.worst_t,
                r.quotient
            ));
        }
        s
    }
}

impl fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "sampled t in [{}, {}], {} samples ({} skipped)",
            self.t_range.0, self.t_range.1, self.samples, self.skipped
        )?;
        for r in &self.inequalities {
            let verdict = if r.certified { "certified" } else { "NOT certified" };
            write!(f, "  {:<12} {:<14} constant {:.6e} at t = {:.4e}", r.name, verdict, r.constant, r.worst_t)?;
            if !r.worst_x.is_empty() {
                write!(f, ", x = {:?}", r.worst_x)?;
            }
            if !r.note.is_empty() {
                write!(f, " ({})", r.note)?;
            }
            writeln!(f)?;
        }
        for (label, v) in [("m", self.m), ("M_theta", self.m_theta), ("m_beta", self.m_beta), ("M_alpha", self.m_alpha)] {
            if let Some(v) = v {
                writeln!(f, "  {label} = {v:.6e}")?;
            }
        }
        write!(f, "overall: {}", if self.certified { "certified" } else { "NOT certified" })
    }
}

fn ln_pos(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::NAN
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Upper ends of the nested refinement ranges.
fn nested_ends(t0: f64, t_max: f64) -> [f64; 3] {
    let r = t_max / t0;
    [t0 * r.powf(1.0 / 3.0), t0 * r.powf(2.0 / 3.0), t_max]
}

const TAIL_SLOPE: f64 = 0.05;

/// Reduces log-quotients `(t, ln q)` to an inequality result.
fn assess(name: &str, side: Side, ts: &[f64], xs: &[&[f64]], lq: &[f64], t0: f64, t_max: f64) -> InequalityResult {
    let ends = nested_ends(t0, t_max);
    let better = |a: f64, b: f64| match side {
        Side::Lower => a < b,
        Side::Upper => a > b,
    };
    let start = match side {
        Side::Lower => f64::INFINITY,
        Side::Upper => f64::NEG_INFINITY,
    };
    let mut nested = [start; 3];
    let mut worst: Option<usize> = None;
    let mut undefined: Option<usize> = None;
    for (i, &q) in lq.iter().enumerate() {
        if q.is_nan() {
            undefined.get_or_insert(i);
            continue;
        }
        for (k, end) in ends.iter().enumerate() {
            if ts[i] <= *end && better(q, nested[k]) {
                nested[k] = q;
            }
        }
        if worst.map_or(true, |w| better(q, lq[w])) {
            worst = Some(i);
        }
    }
    let mut note = String::new();
    let mut certified = true;
    let (wx, wt, lc) = match worst {
        Some(w) => (xs[w].to_vec(), ts[w], lq[w]),
        None => (vec![], f64::NAN, f64::NAN),
    };
    if let Some(i) = undefined {
        certified = false;
        note = format!("quotient undefined at t = {}, x = {:?}", ts[i], xs[i]);
    } else if worst.is_none() {
        certified = false;
        note = "no admissible samples".into();
    } else {
        let bad_end = match side {
            Side::Lower => lc == f64::NEG_INFINITY,
            Side::Upper => lc == f64::INFINITY,
        };
        if bad_end {
            certified = false;
            note = "quotient degenerates on the sampled range".into();
        } else if nested.iter().all(|v| v.is_finite()) {
            let growth = match side {
                Side::Lower => nested[0] - nested[2],
                Side::Upper => nested[2] - nested[0],
            };
            let tail = match side {
                Side::Lower => nested[1] - nested[2],
                Side::Upper => nested[2] - nested[1],
            } / (ends[2] / ends[1]).ln();
            if growth >= 10f64.ln() || tail > TAIL_SLOPE {
                certified = false;
                note = format!(
                    "not certifiable on sampled range: extreme moves {:.3e} -> {:.3e} -> {:.3e} under refinement",
                    nested[0].exp(),
                    nested[1].exp(),
                    nested[2].exp()
                );
            }
        }
    }
    let c = lc.exp();
    InequalityResult {
        name: name.to_string(),
        side,
        certified,
        constant: c,
        worst_x: wx,
        worst_t: wt,
        quotient: c,
        nested: nested.map(f64::exp),
        note,
    }
}

#[derive(Debug, Clone)]
struct Evaluated {
    x: Vec<f64>,
    t: f64,
    g_t: f64,
    g_tt: f64,
    g_tx_max: f64,
    h1: f64,
    h2: f64,
}

/// Integrand and profile values on a sampling plan, reusable across `ϑ`.
#[derive(Debug, Clone)]
pub struct SampledJets {
    rows: Vec<Evaluated>,
    skipped: usize,
    t0: f64,
    t_max: f64,
}

/// Effective sampled `t` range: `params.t_max` capped by the evaluable range.
pub fn effective_t_max(spec: &IntegrandSpec, h: &HProfile, t_max: f64) -> f64 {
    let mut hi = t_max.min(spec.default_t_max());
    if let Some(s) = h.safe_argument() {
        hi = hi.min(s);
    }
    hi
}

impl SampledJets {
    pub fn evaluate(
        spec: &IntegrandSpec,
        h: &HProfile,
        sub: &BoxDomain,
        t0: f64,
        t_max: f64,
        plan: &SamplingPlan,
    ) -> Result<Self> {
        if !spec.domain().contains_box(sub) {
            return Err(Error::InvalidInput(format!(
                "subdomain [{:?}, {:?}] is not inside the integrand's box",
                sub.lo(),
                sub.hi()
            )));
        }
        let t_hi = effective_t_max(spec, h, t_max);
        if !(t0 > 0.0 && t_hi > t0) {
            return Err(Error::InvalidInput(format!(
                "empty sampled range [{t0}, {t_hi}] (T_max capped by the evaluable range)"
            )));
        }
        let samples = plan.samples(sub, t0, t_hi);
        let rows: Vec<Result<Option<Evaluated>>> = samples
            .into_par_iter()
            .map(|s| {
                let v = match spec.eval_all(&s.x, s.t) {
                    Ok(v) => v,
                    Err(Error::Range { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let (_, h1, h2) = match h.eval(s.t) {
                    Ok(v) => v,
                    Err(Error::Range { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let g_tx_max = v.g_tx.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                Ok(Some(Evaluated {
                    x: s.x,
                    t: s.t,
                    g_t: v.g_t,
                    g_tt: v.g_tt,
                    g_tx_max,
                    h1,
                    h2,
                }))
            })
            .collect();
        let mut out = Vec::with_capacity(rows.len());
        let mut skipped = 0;
        for r in rows {
            match r? {
                Some(e) => out.push(e),
                None => skipped += 1,
            }
        }
        Ok(SampledJets {
            rows: out,
            skipped,
            t0,
            t_max: t_hi,
        })
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t0, self.t_max)
    }

    /// The five conditions on `g` at exponent `theta`.
    pub fn report(&self, theta: f64) -> AssumptionReport {
        let ts: Vec<f64> = self.rows.iter().map(|r| r.t).collect();
        let xs: Vec<&[f64]> = self.rows.iter().map(|r| r.x.as_slice()).collect();
        let cols: Vec<[f64; 5]> = self
            .rows
            .par_iter()
            .map(|r| {
                let lt = r.t.ln();
                let (lgt, lgtt, lh1, lh2) = (ln_pos(r.g_t), ln_pos(r.g_tt), ln_pos(r.h1), ln_pos(r.h2));
                let mixed = if r.g_tx_max == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    r.g_tx_max.ln() - theta * ln_pos(r.g_t.min(r.t * r.g_tt))
                };
                [
                    lgt - lh1,
                    lgt - theta * lh1 - (1.0 - theta) * lt,
                    lgtt - lh2,
                    lgtt - theta * lh2,
                    mixed,
                ]
            })
            .collect();
        let names = [
            ("g_t lower", Side::Lower),
            ("g_t upper", Side::Upper),
            ("g_tt lower", Side::Lower),
            ("g_tt upper", Side::Upper),
            ("mixed", Side::Upper),
        ];
        let inequalities: Vec<InequalityResult> = names
            .iter()
            .enumerate()
            .map(|(k, (name, side))| {
                let lq: Vec<f64> = cols.iter().map(|c| c[k]).collect();
                assess(name, *side, &ts, &xs, &lq, self.t0, self.t_max)
            })
            .collect();
        let certified = inequalities.iter().all(|r| r.certified);
        let m = inequalities[0].constant.min(inequalities[2].constant);
        let m_theta = inequalities[1]
            .constant
            .max(inequalities[3].constant)
            .max(inequalities[4].constant);
        AssumptionReport {
            inequalities,
            certified,
            m: Some(m),
            m_theta: Some(m_theta),
            m_beta: None,
            m_alpha: None,
            t_range: (self.t0, self.t_max),
            samples: self.rows.len(),
            skipped: self.skipped,
        }
    }
}

/// Samples `Ω' × [t0, T_max]` and measures the conditions on `g` against `h`.
pub fn check_main_assumptions(
    spec: &IntegrandSpec,
    h: &HProfile,
    params: &StructuralParams,
    plan: &SamplingPlan,
) -> Result<AssumptionReport> {
    params.validate_sampling()?;
    if spec.dim() != params.n {
        return Err(Error::InvalidInput(format!(
            "integrand is {}-dimensional but n = {}",
            spec.dim(),
            params.n
        )));
    }
    let jets = SampledJets::evaluate(spec, h, &params.subdomain, params.t0, params.t_max, plan)?;
    Ok(jets.report(params.theta))
}

/// Number of log-spaced points used for the conditions on `h`.
pub const H_GROWTH_POINTS: usize = 4096;

/// Measures `m_β` and `M_α` on `[t0, T_max]`.
pub fn check_h_growth(h: &HProfile, n: usize, beta: f64, alpha: f64, t0: f64, t_max: f64) -> Result<AssumptionReport> {
    let nf = n as f64;
    if n < 2 {
        return Err(Error::InvalidInput(format!("n must be >= 2, got {n}")));
    }
    if !(beta > 1.0 / nf && beta < 2.0 / nf) {
        return Err(Error::InvalidInput(format!(
            "beta = {beta} violates 1/n < beta < 2/n = ({}, {})",
            1.0 / nf,
            2.0 / nf
        )));
    }
    if !(alpha > 1.0) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must exceed 1")));
    }
    let t_hi = h.safe_argument().map_or(t_max, |s| s.min(t_max));
    if !(t0 > 0.0 && t_hi > t0) {
        return Err(Error::InvalidInput(format!("empty range [{t0}, {t_hi}]")));
    }
    let (l0, l1) = (t0.ln(), t_hi.ln());
    let ts: Vec<f64> = (0..H_GROWTH_POINTS)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (H_GROWTH_POINTS - 1) as f64).exp().clamp(t0, t_hi))
        .collect();
    let mut kept = Vec::with_capacity(ts.len());
    let mut lower = Vec::with_capacity(ts.len());
    let mut upper = Vec::with_capacity(ts.len());
    let mut skipped = 0;
    let e = (nf - 2.0) / nf;
    for &t in &ts {
        let (_, h1, h2) = match h.eval(t) {
            Ok(v) => v,
            Err(Error::Range { .. }) => {
                skipped += 1;
                continue;
            }
            Err(err) => return Err(err),
        };
        let lt = t.ln();
        let lq = ln_pos(h1) - lt;
        let lh2 = ln_pos(h2);
        kept.push(t);
        lower.push(lh2 + 2.0 * beta * lt - log_add_exp(e * lq, lq));
        upper.push(lh2 - log_add_exp(alpha * lq, lq));
    }
    let xs: Vec<&[f64]> = vec![&[][..]; kept.len()];
    let lo = assess("h'' lower", Side::Lower, &kept, &xs, &lower, t0, t_hi);
    let hi = assess("h'' upper", Side::Upper, &kept, &xs, &upper, t0, t_hi);
    let certified = lo.certified && hi.certified && lo.constant > 0.0 && hi.constant.is_finite();
    Ok(AssumptionReport {
        m: None,
        m_theta: None,
        m_beta: Some(lo.constant),
        m_alpha: Some(hi.constant),
        inequalities: vec![lo, hi],
        certified,
        t_range: (t0, t_hi),
        samples: kept.len(),
        skipped,
    })
}
