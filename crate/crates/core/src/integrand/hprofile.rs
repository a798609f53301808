//! Comparison profiles `h(t)` and the derived `K_m`, `K_M`.

use std::cmp::Ordering;

use crate::error::{Error, Result};

use super::extension::{above_knot_offset, below_knot, cubic_is_convex, ExtensionKind};
use super::{Family, IntegrandSpec, Jet};

/// Leading-order behaviour `exp(exp2 · t²) · t^power · (ln t)^log` as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub exp2: f64,
    pub power: f64,
    pub log: f64,
}

const ORDER_EPS: f64 = 1e-12;

fn cmp_eps(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= ORDER_EPS * a.abs().max(b.abs()).max(1.0) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

impl Growth {
    pub const ONE: Growth = Growth {
        exp2: 0.0,
        power: 0.0,
        log: 0.0,
    };

    pub fn new(exp2: f64, power: f64, log: f64) -> Self {
        Growth { exp2, power, log }
    }

    /// Lexicographic comparison of growth rates.
    pub fn compare(&self, other: &Growth) -> Ordering {
        cmp_eps(self.exp2, other.exp2)
            .then(cmp_eps(self.power, other.power))
            .then(cmp_eps(self.log, other.log))
    }

    /// Growth of the quotient `self / other`.
    pub fn over(&self, other: &Growth) -> Growth {
        Growth::new(self.exp2 - other.exp2, self.power - other.power, self.log - other.log)
    }

    /// Growth of `self^k`.
    pub fn pow(&self, k: f64) -> Growth {
        Growth::new(self.exp2 * k, self.power * k, self.log * k)
    }

    /// Growth of a sum: the dominant term.
    pub fn max(&self, other: &Growth) -> Growth {
        if self.compare(other) == Ordering::Less {
            *other
        } else {
            *self
        }
    }
}

/// Large-t behaviour of `h''` and of `h'/t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileAsymptotics {
    pub second: Growth,
    pub ratio: Growth,
    /// `true` when read off a closed form, `false` when estimated from samples.
    pub exact: bool,
}

#[derive(Debug, Clone)]
enum Kind {
    Quadratic,
    ExpSquare { c: f64 },
    PowLog { p: f64 },
    RegPower { p: f64 },
    SqrtLinear { t0: f64, kind: ExtensionKind },
    Scaled { base: Box<HProfile>, a: f64, b: f64 },
    FromSpec { spec: IntegrandSpec, x0: Vec<f64> },
}

/// A convex increasing profile `h` with `h(0) = 0`.
#[derive(Debug, Clone)]
pub struct HProfile {
    kind: Kind,
}

fn sqrt_linear_raw(t: f64) -> Jet {
    let r = t.sqrt();
    Jet {
        g: t - r,
        g_t: 1.0 - 0.5 / r,
        g_tt: 0.25 / (t * r),
        g_x: vec![],
        g_tx: vec![],
    }
}

impl HProfile {
    /// `t²/2`
    pub fn quadratic() -> Self {
        HProfile { kind: Kind::Quadratic }
    }

    /// `e^{c t²} - 1`
    pub fn exp_square(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("exp_square rate must be positive, got {c}")));
        }
        Ok(HProfile {
            kind: Kind::ExpSquare { c },
        })
    }

    /// `t^p log(1 + t)`, `p >= 1`
    pub fn pow_log(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("pow_log needs p >= 1, got {p}")));
        }
        Ok(HProfile {
            kind: Kind::PowLog { p },
        })
    }

    /// `(1 + t²)^{p/2} - 1`, `p > 1`
    pub fn reg_power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("reg_power needs p > 1, got {p}")));
        }
        Ok(HProfile {
            kind: Kind::RegPower { p },
        })
    }

    /// `t - √t` above `t0` with the convex continuation below it.
    pub fn sqrt_linear(t0: f64) -> Result<Self> {
        if !(t0 > 0.25 && t0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "t - sqrt(t) has nonpositive slope at t0 = {t0}; need t0 > 1/4"
            )));
        }
        let k = sqrt_linear_raw(t0);
        let kind = if cubic_is_convex(t0, k.g, k.g_t) {
            ExtensionKind::Cubic
        } else {
            ExtensionKind::Quadratic
        };
        Ok(HProfile {
            kind: Kind::SqrtLinear { t0, kind },
        })
    }

    /// `b · base(a t)`
    pub fn scaled(base: HProfile, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInput(format!("scaling factors must be positive, got a = {a}, b = {b}")));
        }
        if a == 1.0 && b == 1.0 {
            return Ok(base);
        }
        Ok(HProfile {
            kind: Kind::Scaled {
                base: Box::new(base),
                a,
                b,
            },
        })
    }

    /// The t-profile of `spec` frozen at `x0`.
    pub fn from_spec(spec: IntegrandSpec, x0: Vec<f64>) -> Self {
        HProfile {
            kind: Kind::FromSpec { spec, x0 },
        }
    }

    /// The profile naturally paired with a spec's family, using the lower
    /// bounds of its coefficients over `spec.domain()`.
    pub fn paired_with(spec: &IntegrandSpec) -> Result<Self> {
        if let Some(inner) = spec.unclamped() {
            return HProfile::paired_with(inner);
        }
        let dom = spec.domain();
        let lower = |name: &str, default: f64| {
            spec.coefficients().get(name).map_or(default, |c| c.range_on(dom).0)
        };
        match spec.family() {
            Family::Exponential => HProfile::exp_square(lower("a", 1.0)),
            Family::VariableExponent => HProfile::reg_power(lower("p", 2.0)),
            Family::OrliczLog => HProfile::pow_log(lower("p", 1.0)),
            Family::LinearMinusSqrt => HProfile::sqrt_linear(spec.t0()),
            Family::ComposedH => {
                let base = spec.composed_profile().expect("composed spec carries its profile");
                HProfile::scaled(base, lower("a", 1.0), lower("b", 1.0))
            }
            Family::Custom => Ok(HProfile::from_spec(spec.clone(), dom.center())),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Quadratic => "t^2/2".into(),
            Kind::ExpSquare { c } => format!("exp({c} t^2) - 1"),
            Kind::PowLog { p } => format!("t^{p} log(1+t)"),
            Kind::RegPower { p } => format!("(1+t^2)^({p}/2) - 1"),
            Kind::SqrtLinear { .. } => "t - sqrt(t)".into(),
            Kind::Scaled { base, a, b } => format!("{b} * [{}]({a} t)", base.name()),
            Kind::FromSpec { spec, x0 } => format!("g({x0:?}, t) of {}", spec.label()),
        }
    }

    /// Largest argument at which evaluation stays in floating range, when finite.
    pub fn safe_argument(&self) -> Option<f64> {
        match &self.kind {
            Kind::ExpSquare { c } => Some((690.0 / c).sqrt()),
            Kind::Scaled { base, a, .. } => base.safe_argument().map(|s| s / a),
            Kind::FromSpec { spec, .. } => Some(spec.default_t_max()),
            _ => None,
        }
    }

    /// `(h, h', h'')` at `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        let out = match &self.kind {
            Kind::Quadratic => (0.5 * t * t, t, 1.0),
            Kind::ExpSquare { c } => {
                let s = c * t * t;
                if s > 709.0 {
                    return Err(Error::Range {
                        x: vec![],
                        t,
                        msg: "exp(c t^2) overflows".into(),
                    });
                }
                let e = s.exp();
                (s.exp_m1(), 2.0 * c * t * e, (2.0 * c + 4.0 * c * c * t * t) * e)
            }
            Kind::PowLog { p } => {
                let l1 = t.ln_1p();
                let ratio = if t == 0.0 { 1.0 } else { l1 / t };
                let tp1 = t.powf(p - 1.0);
                let u = 1.0 / (1.0 + t);
                (
                    tp1 * t * l1,
                    p * tp1 * l1 + t * tp1 * u,
                    p * (p - 1.0) * tp1 * ratio + 2.0 * p * tp1 * u - t * tp1 * u * u,
                )
            }
            Kind::RegPower { p } => {
                let s = 1.0 + t * t;
                let ln_s = (t * t).ln_1p();
                let w = ((0.5 * p - 1.0) * ln_s).exp();
                (
                    (0.5 * p * ln_s).exp_m1(),
                    p * t * w,
                    p * w / s * (1.0 + (p - 1.0) * t * t),
                )
            }
            Kind::SqrtLinear { t0, kind } => {
                let knot = sqrt_linear_raw(*t0);
                if t < *t0 {
                    let j = below_knot(*kind, *t0, &knot, t);
                    (j.g, j.g_t, j.g_tt)
                } else {
                    let j = sqrt_linear_raw(t);
                    let (off, _) = above_knot_offset(*kind, *t0, &knot);
                    (j.g + off, j.g_t, j.g_tt)
                }
            }
            Kind::Scaled { base, a, b } => {
                let (h, h1, h2) = base.eval(a * t)?;
                (b * h, b * a * h1, b * a * a * h2)
            }
            Kind::FromSpec { spec, x0 } => {
                let j = spec.jet_unchecked(x0, t, false)?;
                (j.g, j.g_t, j.g_tt)
            }
        };
        if !(out.0.is_finite() && out.1.is_finite() && out.2.is_finite()) {
            return Err(Error::Range {
                x: vec![],
                t,
                msg: format!("profile {} is not finite", self.name()),
            });
        }
        Ok(out)
    }

    /// `min(h'', h'/t)`, `t > 0`.
    pub fn k_min(&self, t: f64) -> Result<f64> {
        let (_, h1, h2) = self.eval(t)?;
        Ok(h2.min(h1 / t))
    }

    /// `max(h'', h'/t)`, `t > 0`.
    pub fn k_max(&self, t: f64) -> Result<f64> {
        let (_, h1, h2) = self.eval(t)?;
        Ok(h2.max(h1 / t))
    }

    /// Large-t growth of `h''` and `h'/t`.
    pub fn asymptotics(&self) -> ProfileAsymptotics {
        let exact = |second, ratio| ProfileAsymptotics {
            second,
            ratio,
            exact: true,
        };
        match &self.kind {
            Kind::Quadratic => exact(Growth::ONE, Growth::ONE),
            Kind::ExpSquare { c } => exact(Growth::new(*c, 2.0, 0.0), Growth::new(*c, 0.0, 0.0)),
            Kind::PowLog { p } => {
                if *p > 1.0 {
                    exact(Growth::new(0.0, p - 2.0, 1.0), Growth::new(0.0, p - 2.0, 1.0))
                } else {
                    exact(Growth::new(0.0, -1.0, 0.0), Growth::new(0.0, -1.0, 1.0))
                }
            }
            Kind::RegPower { p } => exact(Growth::new(0.0, p - 2.0, 0.0), Growth::new(0.0, p - 2.0, 0.0)),
            Kind::SqrtLinear { .. } => exact(Growth::new(0.0, -1.5, 0.0), Growth::new(0.0, -1.0, 0.0)),
            Kind::Scaled { base, a, .. } => {
                let mut g = base.asymptotics();
                g.second.exp2 *= a * a;
                g.ratio.exp2 *= a * a;
                g
            }
            Kind::FromSpec { spec, .. } => self.estimate_asymptotics(spec.default_t_max()),
        }
    }

    /// Log-log slopes over the last decade of `[t0, t_max]`.
    fn estimate_asymptotics(&self, t_max: f64) -> ProfileAsymptotics {
        let hi = t_max;
        let lo = t_max / 10.0;
        let slope = |f: &dyn Fn(f64) -> Result<f64>| -> Growth {
            match (f(lo), f(hi)) {
                (Ok(a), Ok(b)) if a > 0.0 && b > 0.0 => {
                    let s = (b / a).ln() / 10f64.ln();
                    if s > 8.0 {
                        Growth::new((b / a).ln() / (hi * hi - lo * lo), 0.0, 0.0)
                    } else {
                        Growth::new(0.0, s, 0.0)
                    }
                }
                _ => Growth::ONE,
            }
        };
        let second = slope(&|t| self.eval(t).map(|v| v.2));
        let ratio = slope(&|t| self.eval(t).map(|v| v.1 / t));
        ProfileAsymptotics {
            second,
            ratio,
            exact: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(h: &HProfile, t: f64) {
        let d = 1e-5 * t.max(1.0);
        let (_, h1, h2) = h.eval(t).unwrap();
        let (hp, h1p, _) = h.eval(t + d).unwrap();
        let (hm, h1m, _) = h.eval(t - d).unwrap();
        assert!(((hp - hm) / (2.0 * d) - h1).abs() <= 1e-6 * h1.abs().max(1.0), "{} h' at {t}", h.name());
        assert!(((h1p - h1m) / (2.0 * d) - h2).abs() <= 1e-6 * h2.abs().max(1.0), "{} h'' at {t}", h.name());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let profiles = [
            HProfile::quadratic(),
            HProfile::exp_square(0.7).unwrap(),
            HProfile::pow_log(1.0).unwrap(),
            HProfile::pow_log(1.7).unwrap(),
            HProfile::reg_power(1.5).unwrap(),
            HProfile::sqrt_linear(1.0).unwrap(),
            HProfile::sqrt_linear(3.0).unwrap(),
            HProfile::scaled(HProfile::pow_log(1.0).unwrap(), 2.0, 0.5).unwrap(),
        ];
        for h in &profiles {
            for t in [0.3, 1.7, 2.9, 5.5] {
                fd_check(h, t);
            }
            assert_eq!(h.eval(0.0).unwrap().0, 0.0);
        }
    }

    #[test]
    fn t_log_profile_second_derivative() {
        // h'' = (2 + t) / (1 + t)^2
        let (_, _, h2) = HProfile::pow_log(1.0).unwrap().eval(2.0).unwrap();
        assert!((h2 - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn k_min_not_above_k_max() {
        let h = HProfile::sqrt_linear(1.0).unwrap();
        for i in 1..200 {
            let t = 1.0 + i as f64 * 0.37;
            assert!(h.k_min(t).unwrap() <= h.k_max(t).unwrap());
        }
    }

    #[test]
    fn growth_ordering_is_lexicographic() {
        let a = Growth::new(0.0, 5.0, 3.0);
        let b = Growth::new(1e-3, -10.0, 0.0);
        assert_eq!(a.compare(&b), Ordering::Less);
        assert_eq!(Growth::new(0.0, -1.0, 1.0).compare(&Growth::new(0.0, -1.0, 0.0)), Ordering::Greater);
    }
}
