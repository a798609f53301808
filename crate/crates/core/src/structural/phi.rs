//! Test-function profiles `Φ_γ` and the integrated function `G`.

use crate::error::{Error, Result};
use crate::integrand::HProfile;
use crate::quadrature::{integrate, QuadError, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiBranch {
    /// `(t - 1)^γ` for `γ > 1`
    Power,
    /// `(t - 1)² t^{γ-2}` for `0 <= γ <= 1`
    Quadratic,
}

/// `Φ_γ`, vanishing on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiFamily {
    pub gamma: f64,
    pub branch: PhiBranch,
    /// Constant `c` in `Φ'(t) t <= c (1 + Φ(t))`.
    pub c_phi: f64,
}

impl PhiFamily {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(if gamma > 1.0 {
            PhiFamily {
                gamma,
                branch: PhiBranch::Power,
                c_phi: 2.0 * gamma,
            }
        } else {
            PhiFamily {
                gamma,
                branch: PhiBranch::Quadratic,
                c_phi: gamma + 2.0,
            }
        })
    }
}

/// `(Φ(t), Φ'(t))`
pub fn phi_eval(fam: &PhiFamily, t: f64) -> (f64, f64) {
    if t <= 1.0 {
        return (0.0, 0.0);
    }
    let g = fam.gamma;
    let d = t - 1.0;
    match fam.branch {
        PhiBranch::Power => (d.powf(g), g * d.powf(g - 1.0)),
        PhiBranch::Quadratic => (d * d * t.powf(g - 2.0), d * t.powf(g - 3.0) * (g * d + 2.0)),
    }
}

/// Tolerances for `G`: absolute 1e-10, or 1e-12 relative once `G` is large.
pub fn g_function_options() -> QuadOptions {
    QuadOptions::relative(1e-12, 1e-10)
}

/// `G(t) = 1 + ∫_1^t sqrt(Φ(s) K_m(s)) ds`, equal to 1 on `[0, 1]`.
pub fn g_function(h: &HProfile, fam: &PhiFamily, t: f64) -> Result<f64> {
    g_function_with(h, fam, t, g_function_options())
}

pub fn g_function_with(h: &HProfile, fam: &PhiFamily, t: f64, opts: QuadOptions) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("G needs t >= 0, got {t}")));
    }
    if t <= 1.0 {
        return Ok(1.0);
    }
    // s = 1 + u² removes the root singularity of sqrt(Φ) at s = 1
    let v = integrate(
        |u| {
            let s = 1.0 + u * u;
            let (phi, _) = phi_eval(fam, s);
            Ok(2.0 * u * phi.sqrt() * h.k_min(s)?.sqrt())
        },
        0.0,
        (t - 1.0).sqrt(),
        opts,
    )
    .map_err(|e| quad_error(e, t))?;
    Ok(1.0 + v)
}

pub(crate) fn quad_error(e: QuadError<Error>, t: f64) -> Error {
    match e {
        QuadError::Integrand(e) => e,
        QuadError::NoConvergence { at } => Error::Numeric {
            x: vec![],
            t: at,
            msg: format!("quadrature on [1, {t}] did not converge"),
        },
        QuadError::NonFinite { at } => Error::Numeric {
            x: vec![],
            t: at,
            msg: format!("non-finite integrand on [1, {t}]"),
        },
    }
}
