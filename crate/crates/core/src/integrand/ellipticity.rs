use crate::error::{Error, Result};

use super::IntegrandSpec;

/// `(min, max)` of `g_tt` and `g_t / t` at `(x, t)`, `t > 0`.
pub fn ellipticity_bounds(spec: &IntegrandSpec, x: &[f64], t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("ellipticity bounds need t > 0, got {t}")));
    }
    let (_, g_t, g_tt) = spec.eval_radial(x, t)?;
    let q = g_t / t;
    Ok((g_tt.min(q), g_tt.max(q)))
}

/// Second variation of `f(x, ξ) = g(x, |ξ|)` in the direction `λ`.
///
/// `xi` and `lambda` are `m × n` matrices flattened in the same order; only
/// Frobenius products enter, so the layout is irrelevant.
pub fn hessian_quadratic_form(spec: &IntegrandSpec, x: &[f64], xi: &[f64], lambda: &[f64]) -> Result<f64> {
    if xi.len() != lambda.len() {
        return Err(Error::InvalidInput(format!(
            "xi and lambda must have the same shape ({} vs {} entries)",
            xi.len(),
            lambda.len()
        )));
    }
    let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(r > 0.0) {
        return Err(Error::InvalidInput("the Hessian form needs xi != 0".into()));
    }
    let (_, g_t, g_tt) = spec.eval_radial(x, r)?;
    let radial = xi.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>() / r;
    let total = lambda.iter().map(|v| v * v).sum::<f64>();
    let q = g_t / r;
    Ok(g_tt * radial * radial + q * (total - radial * radial).max(0.0))
}
