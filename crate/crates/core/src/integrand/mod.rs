//! Integrands `g(x, t)` with `t = |Du|`, their derivatives, comparison
//! profiles `h`, and the two-sided ellipticity clamp.

mod clamp;
mod ellipticity;
pub mod extension;
mod families;
mod hprofile;

use std::fmt;
use std::sync::Arc;

use crate::coefficient::CoefficientSet;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};

pub use clamp::{clamp_regularize, RegularizationClamp};
pub use ellipticity::{ellipticity_bounds, hessian_quadratic_form};
pub use families::{make_builtin, Builtin};
pub use hprofile::{Growth, HProfile, ProfileAsymptotics};

pub(crate) use families::{check_points, choose_extension, sampled_convexity, Model};

/// Family tag carried by every spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Exponential,
    VariableExponent,
    OrliczLog,
    ComposedH,
    LinearMinusSqrt,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::VariableExponent => "variable_exponent",
            Family::OrliczLog => "orlicz_log",
            Family::ComposedH => "composed_h",
            Family::LinearMinusSqrt => "linear_minus_sqrt",
            Family::Custom => "custom",
        }
    }

    /// Growth faster than any power of `t`.
    pub fn is_fast_growth(self) -> bool {
        matches!(self, Family::Exponential)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `g`, its t-derivatives, and mixed derivatives at one `(x, t)`.
///
/// `g_x` is the x-gradient of `g` itself; it is needed to continue the
/// smoothed families below their knot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegrandValues {
    pub g: f64,
    pub g_t: f64,
    pub g_tt: f64,
    pub g_x: Vec<f64>,
    pub g_tx: Vec<f64>,
}

pub(crate) type Jet = IntegrandValues;

impl IntegrandValues {
    fn all_finite(&self) -> bool {
        self.g.is_finite()
            && self.g_t.is_finite()
            && self.g_tt.is_finite()
            && self.g_x.iter().all(|v| v.is_finite())
            && self.g_tx.iter().all(|v| v.is_finite())
    }
}

pub(crate) struct SpecInner {
    pub(crate) family: Family,
    pub(crate) t0: f64,
    pub(crate) domain: BoxDomain,
    pub(crate) model: Model,
    pub(crate) coefficients: CoefficientSet,
    pub(crate) warnings: Vec<String>,
    pub(crate) x_independent: bool,
    pub(crate) t_max: f64,
    pub(crate) clamp: Option<RegularizationClamp>,
    pub(crate) label: String,
}

/// An immutable, cheaply clonable integrand.
#[derive(Clone)]
pub struct IntegrandSpec(pub(crate) Arc<SpecInner>);

impl fmt::Debug for IntegrandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegrandSpec")
            .field("family", &self.0.family)
            .field("label", &self.0.label)
            .field("t0", &self.0.t0)
            .field("domain", &self.0.domain)
            .field("clamp", &self.0.clamp)
            .finish()
    }
}

impl IntegrandSpec {
    pub(crate) fn from_inner(inner: SpecInner) -> Self {
        IntegrandSpec(Arc::new(inner))
    }

    pub fn family(&self) -> Family {
        self.0.family
    }

    pub fn t0(&self) -> f64 {
        self.0.t0
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.0.domain
    }

    pub fn dim(&self) -> usize {
        self.0.domain.dim()
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.0.coefficients
    }

    /// Non-fatal findings from construction (e.g. sampled non-convexity of a DSL integrand).
    pub fn warnings(&self) -> &[String] {
        &self.0.warnings
    }

    pub fn is_x_independent(&self) -> bool {
        self.0.x_independent
    }

    /// Upper end of the sampled t range used by the verifiers.
    pub fn default_t_max(&self) -> f64 {
        self.0.t_max
    }

    pub fn clamp(&self) -> Option<RegularizationClamp> {
        self.0.clamp
    }

    /// Short human-readable description.
    pub fn label(&self) -> &str {
        &self.0.label
    }

    /// Full evaluation with input validation.
    pub fn eval_all(&self, x: &[f64], t: f64) -> Result<IntegrandValues> {
        self.check_input(x, t)?;
        let v = self.0.model.jet(x, t, true)?;
        if !v.all_finite() {
            return Err(Error::Range {
                x: x.to_vec(),
                t,
                msg: "non-finite integrand value".into(),
            });
        }
        Ok(v)
    }

    /// `(g, g_t, g_tt)` only; the hot path of the solver.
    pub fn eval_radial(&self, x: &[f64], t: f64) -> Result<(f64, f64, f64)> {
        self.check_input(x, t)?;
        let v = self.0.model.jet(x, t, false)?;
        if !(v.g.is_finite() && v.g_t.is_finite() && v.g_tt.is_finite()) {
            return Err(Error::Range {
                x: x.to_vec(),
                t,
                msg: "non-finite integrand value".into(),
            });
        }
        Ok((v.g, v.g_t, v.g_tt))
    }

    /// Evaluation without the box check, for finite differences that step
    /// slightly past the boundary.
    pub(crate) fn jet_unchecked(&self, x: &[f64], t: f64, need_x: bool) -> Result<Jet> {
        self.0.model.jet(x, t, need_x)
    }

    fn check_input(&self, x: &[f64], t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!("t must be finite and >= 0, got {t}")));
        }
        if !self.0.domain.contains(x) {
            return Err(Error::InvalidInput(format!(
                "x = {x:?} lies outside the declared box [{:?}, {:?}]",
                self.0.domain.lo(),
                self.0.domain.hi()
            )));
        }
        Ok(())
    }

    /// The spec a clamp was applied to, if any.
    pub fn unclamped(&self) -> Option<&IntegrandSpec> {
        match &self.0.model {
            Model::Clamped(c) => Some(c.inner()),
            _ => None,
        }
    }

    pub(crate) fn composed_profile(&self) -> Option<HProfile> {
        match &self.0.model {
            Model::Composed { h, .. } => Some(h.clone()),
            _ => None,
        }
    }

    /// Builtin `t²/2` on the unit cube.
    pub fn quadratic(n: usize) -> Self {
        make_builtin(
            Builtin::ComposedH(HProfile::quadratic()),
            &CoefficientSet::new(),
            1.0,
            BoxDomain::unit(n),
        )
        .expect("quadratic integrand is always valid")
    }
}
