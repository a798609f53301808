//! Two-sided clamp of `g_tt` and the re-integrated profile.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, QuadError, QuadOptions};

use super::{IntegrandSpec, Jet, Model, SpecInner};

/// Lower and upper ellipticity bounds `N < M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationClamp {
    lower: f64,
    upper: f64,
}

impl RegularizationClamp {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && upper > lower && upper.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "clamp needs 0 < N < M < inf, got N = {lower}, M = {upper}"
            )));
        }
        Ok(RegularizationClamp { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn apply(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }
}

const KNOT_STEP: f64 = 1.0 / 32.0;
const MAX_KNOTS: usize = 1 << 14;

/// `(g̃, g̃_t)` at knots `j · KNOT_STEP`.
#[derive(Default, Clone)]
struct Table {
    g: Vec<f64>,
    g_t: Vec<f64>,
}

pub(crate) struct ClampedModel {
    inner: IntegrandSpec,
    clamp: RegularizationClamp,
    x_independent: bool,
    jumps: Vec<f64>,
    cache: Mutex<HashMap<Vec<u64>, Table>>,
}

impl ClampedModel {
    pub(crate) fn inner(&self) -> &IntegrandSpec {
        &self.inner
    }

    fn clamped_tt(&self, x: &[f64], s: f64) -> Result<f64> {
        match self.inner.jet_unchecked(x, s, false) {
            Ok(j) if j.g_tt.is_finite() => Ok(self.clamp.apply(j.g_tt)),
            Ok(_) | Err(Error::Range { .. }) => Ok(self.clamp.upper),
            Err(e) => Err(e),
        }
    }

    /// Advances `(g̃, g̃_t)` from `a` to `b`, splitting at jumps of `g_tt`
    /// and using one-sided values at segment ends.
    fn advance(&self, x: &[f64], a: f64, b: f64, g: f64, g_t: f64, opts: QuadOptions) -> Result<(f64, f64)> {
        let mut cuts = vec![a];
        cuts.extend(self.jumps.iter().copied().filter(|&k| k > a && k < b));
        cuts.push(b);
        let (mut d1, mut d0) = (0.0, 0.0);
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let r = adaptive_simpson::<2, Error>(
                |s| {
                    let inside = if s <= lo { lo.next_up() } else if s >= hi { hi.next_down() } else { s };
                    let c = self.clamped_tt(x, inside.clamp(lo, hi))?;
                    Ok([c, (b - s) * c])
                },
                lo,
                hi,
                opts,
            )
            .map_err(|e| match e {
                QuadError::Integrand(e) => e,
                QuadError::NoConvergence { at } | QuadError::NonFinite { at } => Error::Numeric {
                    x: x.to_vec(),
                    t: at,
                    msg: "clamped second derivative could not be integrated".into(),
                },
            })?;
            d1 += r[0];
            d0 += r[1];
        }
        Ok((g + g_t * (b - a) + d0, g_t + d1))
    }

    fn segment_opts() -> QuadOptions {
        QuadOptions::relative(1e-13, 1e-12)
    }

    fn key(&self, x: &[f64]) -> Vec<u64> {
        if self.x_independent {
            Vec::new()
        } else {
            x.iter().map(|v| v.to_bits()).collect()
        }
    }

    /// Knot index and table values at that knot, extending the table if needed.
    fn knot_values(&self, x: &[f64], j: usize) -> Result<(f64, f64)> {
        let key = self.key(x);
        let start = {
            let cache = self.cache.lock().expect("clamp cache poisoned");
            match cache.get(&key) {
                Some(tab) if tab.g.len() > j => return Ok((tab.g[j], tab.g_t[j])),
                Some(tab) => tab.clone(),
                None => Table {
                    g: vec![0.0],
                    g_t: vec![0.0],
                },
            }
        };
        let mut tab = start;
        while tab.g.len() <= j {
            let i = tab.g.len() - 1;
            let a = i as f64 * KNOT_STEP;
            let (g, g_t) = self.advance(x, a, a + KNOT_STEP, tab.g[i], tab.g_t[i], Self::segment_opts())?;
            tab.g.push(g);
            tab.g_t.push(g_t);
        }
        let out = (tab.g[j], tab.g_t[j]);
        let mut cache = self.cache.lock().expect("clamp cache poisoned");
        let slot = cache.entry(key).or_default();
        if slot.g.len() < tab.g.len() {
            *slot = tab;
        }
        Ok(out)
    }

    fn profile(&self, x: &[f64], t: f64) -> Result<(f64, f64)> {
        let j = ((t / KNOT_STEP).floor() as usize).min(MAX_KNOTS);
        let (g, g_t) = self.knot_values(x, j)?;
        let a = j as f64 * KNOT_STEP;
        if t == a {
            return Ok((g, g_t));
        }
        self.advance(x, a, t, g, g_t, Self::segment_opts())
    }

    /// Uncached integration from the origin; used for x-differences.
    fn profile_direct(&self, x: &[f64], t: f64) -> Result<(f64, f64)> {
        self.advance(x, 0.0, t, 0.0, 0.0, QuadOptions::relative(1e-14, 1e-14))
    }

    pub(crate) fn jet(&self, x: &[f64], t: f64, need_x: bool) -> Result<Jet> {
        let g_tt = self.clamped_tt(x, t)?;
        let (g, g_t) = if t == 0.0 { (0.0, 0.0) } else { self.profile(x, t)? };
        let n = x.len();
        let (mut g_x, mut g_tx) = (Vec::new(), Vec::new());
        if need_x {
            g_x = vec![0.0; n];
            g_tx = vec![0.0; n];
            if !self.x_independent && t > 0.0 {
                let mut xp = x.to_vec();
                for k in 0..n {
                    let d = 1e-5 * x[k].abs().max(1.0);
                    xp[k] = x[k] + d;
                    let (gp, gtp) = self.profile_direct(&xp, t)?;
                    xp[k] = x[k] - d;
                    let (gm, gtm) = self.profile_direct(&xp, t)?;
                    xp[k] = x[k];
                    g_x[k] = (gp - gm) / (2.0 * d);
                    g_tx[k] = (gtp - gtm) / (2.0 * d);
                }
            }
        }
        Ok(Jet {
            g,
            g_t,
            g_tt,
            g_x,
            g_tx,
        })
    }
}

/// Replaces `g_tt` by `clamp(g_tt, N, M)` and re-integrates `g_t`, `g` from 0.
/// Clamping an already clamped spec re-clamps the original.
pub fn clamp_regularize(spec: &IntegrandSpec, clamp: RegularizationClamp) -> Result<IntegrandSpec> {
    let base = spec.unclamped().unwrap_or(spec).clone();
    let label = format!("clamp[{}, {}] of {}", clamp.lower, clamp.upper, base.label());
    let inner = &base.0;
    Ok(IntegrandSpec::from_inner(SpecInner {
        family: inner.family,
        t0: inner.t0,
        domain: inner.domain.clone(),
        coefficients: inner.coefficients.clone(),
        warnings: inner.warnings.clone(),
        x_independent: inner.x_independent,
        t_max: inner.t_max,
        clamp: Some(clamp),
        label,
        model: Model::Clamped(ClampedModel {
            x_independent: inner.x_independent,
            inner: base.clone(),
            jumps: base.0.model.jump_points(),
            clamp,
            cache: Mutex::new(HashMap::new()),
        }),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::CoefficientSet;
    use crate::domain::BoxDomain;
    use crate::integrand::{make_builtin, Builtin, HProfile};

    #[test]
    fn inactive_clamp_crosses_smoothing_knot() {
        let lms = make_builtin(Builtin::LinearMinusSqrt, &CoefficientSet::new(), 1.0, BoxDomain::unit(2)).unwrap();
        let c = clamp_regularize(&lms, RegularizationClamp::new(1e-3, 1e6).unwrap()).unwrap();
        let x = [0.5, 0.25];
        for t in [0.5, 1.0, 1.0 + 1e-9, 1.5, 7.3] {
            let (g, gt, _) = lms.eval_radial(&x, t).unwrap();
            let (cg, cgt, _) = c.eval_radial(&x, t).unwrap();
            assert!((g - cg).abs() < 1e-10 && (gt - cgt).abs() < 1e-10, "{t}");
        }
    }

    #[test]
    fn inactive_clamp_reproduces_quadratic() {
        let q = IntegrandSpec::quadratic(2);
        let c = clamp_regularize(&q, RegularizationClamp::new(0.5, 2.0).unwrap()).unwrap();
        for t in [0.0, 0.01, 0.7, 3.3, 17.0] {
            let v = c.eval_all(&[0.2, 0.2], t).unwrap();
            assert!((v.g - 0.5 * t * t).abs() < 1e-10 * (1.0 + t * t));
            assert!((v.g_t - t).abs() < 1e-10 * (1.0 + t));
            assert_eq!(v.g_tt, 1.0);
        }
    }

    #[test]
    fn constant_clamp_caps_second_derivative() {
        let four = make_builtin(
            Builtin::ComposedH(HProfile::quadratic()),
            &[("b".to_string(), crate::coefficient::CoefficientField::constant(4.0))].into_iter().collect(),
            1.0,
            BoxDomain::unit(2),
        )
        .unwrap();
        let c = clamp_regularize(&four, RegularizationClamp::new(0.5, 2.0).unwrap()).unwrap();
        let v = c.eval_all(&[0.5, 0.5], 3.0).unwrap();
        assert_eq!(v.g_tt, 2.0);
        assert!((v.g_t - 6.0).abs() < 1e-11);
        assert!((v.g - 9.0).abs() < 1e-11);
    }

    #[test]
    fn exponential_is_capped_at_upper_bound() {
        let e = make_builtin(Builtin::Exponential, &CoefficientSet::new(), 1.0, BoxDomain::unit(2)).unwrap();
        let c = clamp_regularize(&e, RegularizationClamp::new(1e-3, 10.0).unwrap()).unwrap();
        assert_eq!(c.eval_all(&[0.5, 0.5], 2.0).unwrap().g_tt, 10.0);
        // far past the overflow point the clamp keeps everything finite
        let far = c.eval_all(&[0.5, 0.5], 60.0).unwrap();
        assert_eq!(far.g_tt, 10.0);
        assert!(far.g_t / 60.0 <= 10.0 + 1e-9);
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(RegularizationClamp::new(2.0, 1.0).is_err());
        assert!(RegularizationClamp::new(0.0, 1.0).is_err());
    }
}
