//! Closed-form integrand families and the evaluation model behind every spec.

use crate::coefficient::{CoefficientField, CoefficientSet};
use crate::domain::BoxDomain;
use crate::error::{Error, Result};

use super::clamp::ClampedModel;
use super::extension::{above_knot_offset, below_knot, cubic_is_convex, ExtensionKind};
use super::hprofile::HProfile;
use super::{Family, IntegrandSpec, Jet, SpecInner};

/// Builtin families selectable by [`make_builtin`].
#[derive(Debug, Clone)]
pub enum Builtin {
    /// `e^{a(x) t²} - 1`
    Exponential,
    /// `a(x) [(1 + t²)^{p(x)/2} - 1]`
    VariableExponent,
    /// `a(x) t^{p(x)} log(1 + t)`
    OrliczLog,
    /// `b(x) H(a(x) t)` for a profile `H`
    ComposedH(HProfile),
    /// `t - a(x) √t`, smoothed below `t0`
    LinearMinusSqrt,
}

impl Builtin {
    pub fn family(&self) -> Family {
        match self {
            Builtin::Exponential => Family::Exponential,
            Builtin::VariableExponent => Family::VariableExponent,
            Builtin::OrliczLog => Family::OrliczLog,
            Builtin::ComposedH(_) => Family::ComposedH,
            Builtin::LinearMinusSqrt => Family::LinearMinusSqrt,
        }
    }

    fn coefficient_names(&self) -> &'static [&'static str] {
        match self {
            Builtin::Exponential | Builtin::LinearMinusSqrt => &["a"],
            Builtin::VariableExponent | Builtin::OrliczLog => &["a", "p"],
            Builtin::ComposedH(_) => &["a", "b"],
        }
    }
}

pub(crate) enum Model {
    Exponential { a: CoefficientField },
    VariableExponent { a: CoefficientField, p: CoefficientField },
    OrliczLog { a: CoefficientField, p: CoefficientField },
    Composed { h: HProfile, a: CoefficientField, b: CoefficientField },
    /// Raw `t - a√t`; only valid for `t > 0`.
    SqrtLinear { a: CoefficientField },
    Custom(crate::dsl::CustomModel),
    Smoothed { raw: Box<Model>, kind: ExtensionKind, t0: f64 },
    Clamped(ClampedModel),
}

fn coef(c: &CoefficientField, x: &[f64], need_x: bool) -> (f64, Vec<f64>) {
    let v = c.value(x);
    let g = if need_x { c.gradient(x) } else { Vec::new() };
    (v, g)
}

fn range_err(x: &[f64], t: f64, msg: &str) -> Error {
    Error::Range {
        x: x.to_vec(),
        t,
        msg: msg.to_string(),
    }
}

impl Model {
    /// Values of `t` where `g_tt` may jump.
    pub(crate) fn jump_points(&self) -> Vec<f64> {
        match self {
            Model::Smoothed { t0, .. } => vec![*t0],
            _ => Vec::new(),
        }
    }

    pub(crate) fn jet(&self, x: &[f64], t: f64, need_x: bool) -> Result<Jet> {
        match self {
            Model::Exponential { a } => {
                let (av, ag) = coef(a, x, need_x);
                let s = av * t * t;
                if s > 709.0 {
                    return Err(range_err(x, t, "exp(a t^2) overflows"));
                }
                let e = s.exp();
                let j = Jet {
                    g: s.exp_m1(),
                    g_t: 2.0 * av * t * e,
                    g_tt: (2.0 * av + 4.0 * av * av * t * t) * e,
                    g_x: ag.iter().map(|d| d * t * t * e).collect(),
                    g_tx: ag.iter().map(|d| d * 2.0 * t * e * (1.0 + s)).collect(),
                };
                if !(j.g_tt.is_finite() && j.g.is_finite()) {
                    return Err(range_err(x, t, "exp(a t^2) overflows"));
                }
                Ok(j)
            }
            Model::VariableExponent { a, p } => {
                let (av, ag) = coef(a, x, need_x);
                let (pv, pg) = coef(p, x, need_x);
                let s = 1.0 + t * t;
                let ln_s = (t * t).ln_1p();
                let w = ((0.5 * pv - 1.0) * ln_s).exp();
                let sp = ((0.5 * pv) * ln_s).exp_m1();
                let j = Jet {
                    g: av * sp,
                    g_t: av * pv * t * w,
                    g_tt: av * pv * w / s * (1.0 + (pv - 1.0) * t * t),
                    g_x: ag
                        .iter()
                        .zip(&pg)
                        .map(|(da, dp)| da * sp + dp * av * (sp + 1.0) * 0.5 * ln_s)
                        .collect(),
                    g_tx: ag
                        .iter()
                        .zip(&pg)
                        .map(|(da, dp)| da * pv * t * w + dp * av * t * w * (1.0 + 0.5 * pv * ln_s))
                        .collect(),
                };
                if !j.g_tt.is_finite() {
                    return Err(range_err(x, t, "(1+t^2)^(p/2) overflows"));
                }
                Ok(j)
            }
            Model::OrliczLog { a, p } => {
                let (av, ag) = coef(a, x, need_x);
                let (pv, pg) = coef(p, x, need_x);
                let l1 = t.ln_1p();
                let ratio = if t == 0.0 { 1.0 } else { l1 / t };
                let tp1 = t.powf(pv - 1.0);
                let lnt = if t > 0.0 { t.ln() } else { 0.0 };
                let u = 1.0 / (1.0 + t);
                let base_g = tp1 * t * l1;
                let base_gt = pv * tp1 * l1 + t * tp1 * u;
                let base_gtt = pv * (pv - 1.0) * tp1 * ratio + 2.0 * pv * tp1 * u - t * tp1 * u * u;
                let dg_dp = base_g * lnt;
                let dgt_dp = tp1 * l1 + (pv * tp1 * l1 + t * tp1 * u) * lnt;
                Ok(Jet {
                    g: av * base_g,
                    g_t: av * base_gt,
                    g_tt: av * base_gtt,
                    g_x: ag.iter().zip(&pg).map(|(da, dp)| da * base_g + dp * av * dg_dp).collect(),
                    g_tx: ag.iter().zip(&pg).map(|(da, dp)| da * base_gt + dp * av * dgt_dp).collect(),
                })
            }
            Model::Composed { h, a, b } => {
                let (av, ag) = coef(a, x, need_x);
                let (bv, bg) = coef(b, x, need_x);
                let (hv, h1, h2) = h.eval(av * t).map_err(|e| match e {
                    Error::Range { msg, .. } => range_err(x, t, &msg),
                    other => other,
                })?;
                Ok(Jet {
                    g: bv * hv,
                    g_t: bv * av * h1,
                    g_tt: bv * av * av * h2,
                    g_x: ag.iter().zip(&bg).map(|(da, db)| db * hv + bv * da * t * h1).collect(),
                    g_tx: ag
                        .iter()
                        .zip(&bg)
                        .map(|(da, db)| db * av * h1 + bv * da * (h1 + av * t * h2))
                        .collect(),
                })
            }
            Model::SqrtLinear { a } => {
                let (av, ag) = coef(a, x, need_x);
                let r = t.sqrt();
                Ok(Jet {
                    g: t - av * r,
                    g_t: 1.0 - 0.5 * av / r,
                    g_tt: 0.25 * av / (t * r),
                    g_x: ag.iter().map(|d| -d * r).collect(),
                    g_tx: ag.iter().map(|d| -0.5 * d / r).collect(),
                })
            }
            Model::Custom(c) => c.jet(x, t, need_x),
            Model::Smoothed { raw, kind, t0 } => {
                let knot = raw.jet(x, *t0, need_x)?;
                if t < *t0 {
                    return Ok(below_knot(*kind, *t0, &knot, t));
                }
                let mut j = raw.jet(x, t, need_x)?;
                let (off, off_x) = above_knot_offset(*kind, *t0, &knot);
                j.g += off;
                for (gx, o) in j.g_x.iter_mut().zip(off_x) {
                    *gx += o;
                }
                Ok(j)
            }
            Model::Clamped(c) => c.jet(x, t, need_x),
        }
    }
}

/// Sample points used for construction-time checks over x.
pub(crate) fn check_points(domain: &BoxDomain) -> Vec<Vec<f64>> {
    let per_axis = match domain.dim() {
        1 => 17,
        2 => 9,
        3 => 5,
        _ => 3,
    };
    let mut pts = domain.tensor_grid(per_axis);
    pts.push(domain.center());
    pts
}

/// Log-spaced t samples in `[1e-3, t_max]`, plus `t = 0`.
pub(crate) fn check_ts(t_max: f64, count: usize) -> Vec<f64> {
    let lo = 1e-3f64.ln();
    let hi = t_max.ln();
    std::iter::once(0.0)
        .chain((0..count).map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()))
        .collect()
}

/// Picks the cubic continuation when it is convex at every sampled x.
pub(crate) fn choose_extension(raw: &Model, t0: f64, domain: &BoxDomain, what: &str) -> Result<ExtensionKind> {
    let mut cubic_ok = true;
    for x in check_points(domain) {
        let k = raw.jet(&x, t0, false)?;
        if !(k.g_t > 0.0) {
            return Err(Error::NonConvex(format!(
                "{what}: slope g_t(x, t0) = {} at x = {x:?} must be positive for a convex continuation below t0 = {t0}",
                k.g_t
            )));
        }
        if !(k.g_tt >= 0.0) {
            return Err(Error::NonConvex(format!(
                "{what}: g_tt(x, t0) = {} < 0 at x = {x:?}",
                k.g_tt
            )));
        }
        cubic_ok &= cubic_is_convex(t0, k.g, k.g_t);
    }
    Ok(if cubic_ok { ExtensionKind::Cubic } else { ExtensionKind::Quadratic })
}

/// Checks `g_tt >= 0` and `g_t >= 0` on the construction sample.
pub(crate) fn sampled_convexity(model: &Model, domain: &BoxDomain, t_max: f64) -> Result<Option<String>> {
    for x in check_points(domain) {
        let mut prev_gt = 0.0f64;
        for t in check_ts(t_max, 48) {
            let j = match model.jet(&x, t, false) {
                Ok(j) => j,
                Err(Error::Range { .. }) => break,
                Err(e) => return Err(e),
            };
            let scale = 1e-12 * j.g_t.abs().max(1.0);
            if j.g_tt < -scale || j.g_t < -scale || j.g_t < prev_gt - scale * 10.0 {
                return Ok(Some(format!(
                    "sampled convexity fails at x = {x:?}, t = {t}: g_t = {}, g_tt = {}",
                    j.g_t, j.g_tt
                )));
            }
            prev_gt = j.g_t;
        }
    }
    Ok(None)
}

fn positive(c: &CoefficientField, domain: &BoxDomain, name: &str, floor: f64, strict: bool) -> Result<()> {
    let (lo, _) = c.range_on(domain);
    let ok = if strict { lo > floor } else { lo >= floor };
    if ok {
        Ok(())
    } else {
        let rel = if strict { ">" } else { ">=" };
        Err(Error::InvalidInput(format!(
            "coefficient `{name}` must stay {rel} {floor} on the box, but its minimum is {lo}"
        )))
    }
}

/// Builds a builtin spec.
///
/// Missing `a`/`b` default to 1; `p` defaults to 1 for the Orlicz family and
/// is required for the variable-exponent one.
pub fn make_builtin(builtin: Builtin, coeffs: &CoefficientSet, t0: f64, domain: BoxDomain) -> Result<IntegrandSpec> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidInput(format!("t0 must be positive, got {t0}")));
    }
    let names = builtin.coefficient_names();
    for (name, field) in coeffs {
        if !names.contains(&name.as_str()) {
            return Err(Error::InvalidInput(format!(
                "family {} takes coefficients {names:?}, got `{name}`",
                builtin.family()
            )));
        }
        field.check_dim(domain.dim(), name)?;
    }
    let get = |name: &str| coeffs.get(name).cloned().unwrap_or_else(|| CoefficientField::constant(1.0));
    let a = get("a");
    positive(&a, &domain, "a", 0.0, true)?;
    let (_, a_max) = a.range_on(&domain);

    let family = builtin.family();
    let (model, t_max, label) = match &builtin {
        Builtin::Exponential => {
            let t_max = 30f64.min((690.0 / a_max).sqrt());
            (Model::Exponential { a }, t_max, "exp(a t^2) - 1".to_string())
        }
        Builtin::VariableExponent => {
            let p = coeffs.get("p").cloned().ok_or_else(|| {
                Error::InvalidInput("variable_exponent requires a coefficient `p`".into())
            })?;
            positive(&p, &domain, "p", 1.0, true)?;
            (Model::VariableExponent { a, p }, 1e3, "a((1+t^2)^(p/2) - 1)".to_string())
        }
        Builtin::OrliczLog => {
            let p = get("p");
            positive(&p, &domain, "p", 1.0, false)?;
            (Model::OrliczLog { a, p }, 1e3, "a t^p log(1+t)".to_string())
        }
        Builtin::ComposedH(h) => {
            let b = get("b");
            positive(&b, &domain, "b", 0.0, true)?;
            let t_max = h.safe_argument().map_or(1e3, |s| 1e3f64.min(s / a_max));
            let label = format!("b H(a t), H = {}", h.name());
            (Model::Composed { h: h.clone(), a, b }, t_max, label)
        }
        Builtin::LinearMinusSqrt => {
            let raw = Model::SqrtLinear { a };
            let kind = choose_extension(&raw, t0, &domain, "linear_minus_sqrt")?;
            (
                Model::Smoothed {
                    raw: Box::new(raw),
                    kind,
                    t0,
                },
                1e3,
                format!("t - a sqrt(t) ({kind:?} continuation below t0)"),
            )
        }
    };
    if let Some(msg) = sampled_convexity(&model, &domain, t_max)? {
        return Err(Error::NonConvex(msg));
    }
    let x_independent = coeffs.values().all(|c| c.is_constant());
    Ok(IntegrandSpec::from_inner(SpecInner {
        family,
        t0,
        domain,
        model,
        coefficients: coeffs.clone(),
        warnings: Vec::new(),
        x_independent,
        t_max,
        clamp: None,
        label,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrand::HProfile;
    use std::f64::consts::E;

    fn set(pairs: &[(&str, CoefficientField)]) -> CoefficientSet {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn exponential_closed_form_values() {
        let s = make_builtin(Builtin::Exponential, &CoefficientSet::new(), 1.0, BoxDomain::unit(2)).unwrap();
        let v = s.eval_all(&[0.5, 0.5], 1.0).unwrap();
        assert!((v.g - (E - 1.0)).abs() < 1e-14);
        assert!((v.g_t - 2.0 * E).abs() < 1e-13);
        assert!((v.g_tt - 6.0 * E).abs() < 1e-13);
        assert_eq!(v.g_tx, vec![0.0, 0.0]);
    }

    #[test]
    fn exponential_overflow_is_a_range_error() {
        let s = make_builtin(Builtin::Exponential, &CoefficientSet::new(), 1.0, BoxDomain::unit(2)).unwrap();
        assert!(matches!(s.eval_all(&[0.5, 0.5], 40.0), Err(Error::Range { .. })));
        assert!(s.default_t_max() <= 30.0);
    }

    #[test]
    fn sqrt_linear_values_at_four() {
        let s = make_builtin(Builtin::LinearMinusSqrt, &CoefficientSet::new(), 1.0, BoxDomain::unit(2)).unwrap();
        let v = s.eval_all(&[0.1, 0.9], 4.0).unwrap();
        assert!((v.g_t - 0.75).abs() < 1e-15);
        assert!((4.0 * v.g_tt - 0.125).abs() < 1e-15);
        let z = s.eval_all(&[0.1, 0.9], 0.0).unwrap();
        assert_eq!((z.g, z.g_t), (0.0, 0.0));
    }

    #[test]
    fn variable_exponent_requires_p_above_one() {
        let c = set(&[("p", CoefficientField::affine(1.2, vec![-0.3, 0.0]))]);
        assert!(make_builtin(Builtin::VariableExponent, &c, 1.0, BoxDomain::unit(2)).is_err());
        let c = set(&[("p", CoefficientField::affine(1.5, vec![-0.3, 0.0]))]);
        assert!(make_builtin(Builtin::VariableExponent, &c, 1.0, BoxDomain::unit(2)).is_ok());
    }

    #[test]
    fn unknown_coefficient_is_rejected() {
        let c = set(&[("q", CoefficientField::constant(2.0))]);
        assert!(make_builtin(Builtin::Exponential, &c, 1.0, BoxDomain::unit(2)).is_err());
    }

    #[test]
    fn quadratic_is_half_t_squared() {
        let s = IntegrandSpec::quadratic(2);
        let v = s.eval_all(&[0.3, 0.3], 3.0).unwrap();
        assert_eq!((v.g, v.g_t, v.g_tt), (4.5, 3.0, 1.0));
        let _ = HProfile::quadratic();
    }
}
