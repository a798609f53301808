//! Dual-number evaluation and conversion of expressions to integrand specs.

use crate::coefficient::CoefficientSet;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::integrand::extension::ExtensionKind;
use crate::integrand::{Family, IntegrandSpec, Jet, Model, SpecInner};

use super::dual::Dual2;
use super::parser::{BinOp, Expr, ExprKind, Func};

fn domain_err(e: &Expr, msg: impl Into<String>) -> Error {
    Error::Domain {
        line: 1,
        col: e.span.start + 1,
        snippet: e.to_string(),
        msg: msg.into(),
    }
}

fn eval(e: &Expr, x: &[f64], t: f64, coeffs: &CoefficientSet, nx: usize) -> Result<Dual2> {
    Ok(match &e.kind {
        ExprKind::Num(v) => Dual2::constant(*v, nx),
        ExprKind::T => Dual2::variable_t(t, nx),
        ExprKind::X(k) => {
            let v = *x.get(*k).ok_or_else(|| {
                Error::InvalidInput(format!("x{} used but the point has {} coordinates", k + 1, x.len()))
            })?;
            let mut grad = vec![0.0; nx];
            if nx > 0 {
                grad[*k] = 1.0;
            }
            Dual2::spatial(v, grad)
        }
        ExprKind::Coef(name) => {
            let field = coeffs
                .get(name)
                .ok_or_else(|| Error::InvalidInput(format!("coefficient `{name}` is not bound")))?;
            let grad = if nx > 0 { field.gradient(x) } else { Vec::new() };
            Dual2::spatial(field.value(x), grad)
        }
        ExprKind::Neg(a) => eval(a, x, t, coeffs, nx)?.neg(),
        ExprKind::Bin(op, l, r) => {
            let a = eval(l, x, t, coeffs, nx)?;
            let b = eval(r, x, t, coeffs, nx)?;
            match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => {
                    if b.value == 0.0 {
                        return Err(domain_err(e, "division by zero"));
                    }
                    a.mul(&b.recip())
                }
                BinOp::Pow => {
                    let c = b.value;
                    if b.is_constant() || a.value == 0.0 {
                        if a.value < 0.0 && c.fract() != 0.0 {
                            return Err(domain_err(e, format!("negative base {} with non-integer exponent {c}", a.value)));
                        }
                        if a.value == 0.0 && c < 0.0 {
                            return Err(domain_err(e, "zero raised to a negative power"));
                        }
                        a.powf(c)
                    } else if a.value > 0.0 {
                        b.mul(&a.ln()).exp()
                    } else {
                        return Err(domain_err(e, format!("negative base {} with a variable exponent", a.value)));
                    }
                }
            }
        }
        ExprKind::Call(func, args) => {
            let a = eval(&args[0], x, t, coeffs, nx)?;
            match func {
                Func::Exp => a.exp(),
                Func::Log => {
                    if !(a.value > 0.0) {
                        return Err(domain_err(e, format!("log of nonpositive value {}", a.value)));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a.value < 0.0 {
                        return Err(domain_err(e, format!("sqrt of negative value {}", a.value)));
                    }
                    a.sqrt()
                }
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::AbsSmooth => {
                    let delta = match args.get(1) {
                        Some(d) => {
                            let d = eval(d, x, t, coeffs, nx)?;
                            if !d.is_constant() || !(d.value > 0.0) {
                                return Err(domain_err(e, "abs_smooth width must be a positive constant"));
                            }
                            d.value
                        }
                        None => 1e-8,
                    };
                    a.abs_smooth(delta)
                }
            }
        }
    })
}

/// Evaluates `expr` with full x-sensitivities.
pub fn eval_dual2(expr: &Expr, x: &[f64], t: f64, coeffs: &CoefficientSet) -> Result<Dual2> {
    eval(expr, x, t, coeffs, x.len())
}

/// Plain value of `expr`.
pub fn eval_value(expr: &Expr, x: &[f64], t: f64, coeffs: &CoefficientSet) -> Result<f64> {
    Ok(eval(expr, x, t, coeffs, 0)?.value)
}

pub(crate) struct CustomModel {
    expr: Expr,
    coeffs: CoefficientSet,
    normalize: bool,
}

impl CustomModel {
    pub(crate) fn jet(&self, x: &[f64], t: f64, need_x: bool) -> Result<Jet> {
        let nx = if need_x { x.len() } else { 0 };
        let d = eval(&self.expr, x, t, &self.coeffs, nx)?;
        let mut j = Jet {
            g: d.value,
            g_t: d.d_t,
            g_tt: d.d_tt,
            g_x: d.d_x,
            g_tx: d.d_tx,
        };
        if self.normalize {
            let z = eval(&self.expr, x, 0.0, &self.coeffs, nx)?;
            j.g -= z.value;
            for (a, b) in j.g_x.iter_mut().zip(z.d_x) {
                *a -= b;
            }
        }
        Ok(j)
    }
}

/// Wraps an expression as an integrand on `domain`.
///
/// `g(x, 0)` is subtracted. When the expression has an infinite or nonzero
/// slope at `t = 0` somewhere on the sample, it is replaced below `t0` by
/// the convex continuation used for `t - a√t`. Sampled non-convexity is
/// reported through [`IntegrandSpec::warnings`].
pub fn to_integrand(expr: &Expr, coeffs: &CoefficientSet, t0: f64, domain: BoxDomain) -> Result<IntegrandSpec> {
    use crate::integrand::{check_points, choose_extension, sampled_convexity};

    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidInput(format!("t0 must be positive, got {t0}")));
    }
    let n = domain.dim();
    if expr.max_coordinate() > n {
        return Err(Error::InvalidInput(format!(
            "expression uses x{} but the domain is {n}-dimensional",
            expr.max_coordinate()
        )));
    }
    let used = expr.coefficient_names();
    for name in &used {
        let f = coeffs
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("coefficient `{name}` is referenced but not bound")))?;
        f.check_dim(n, name)?;
    }
    let coeffs: CoefficientSet = coeffs.iter().filter(|(k, _)| used.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();

    let mut needs_smoothing = false;
    for x in check_points(&domain) {
        let d = eval(expr, &x, 0.0, &coeffs, 0)?;
        if !d.value.is_finite() {
            return Err(Error::InvalidInput(format!("g(x, 0) is not finite at x = {x:?}")));
        }
        if !(d.d_t.is_finite() && d.d_tt.is_finite()) || d.d_t.abs() > 1e-14 {
            needs_smoothing = true;
        }
    }
    let model = if needs_smoothing {
        let raw = Model::Custom(CustomModel {
            expr: expr.clone(),
            coeffs: coeffs.clone(),
            normalize: false,
        });
        let kind: ExtensionKind = choose_extension(&raw, t0, &domain, "custom integrand")?;
        Model::Smoothed {
            raw: Box::new(raw),
            kind,
            t0,
        }
    } else {
        Model::Custom(CustomModel {
            expr: expr.clone(),
            coeffs: coeffs.clone(),
            normalize: true,
        })
    };

    // largest power of two up to 1e3 with finite values at the center
    let center = domain.center();
    let mut t_max = 1e3;
    let mut probe = 1.0;
    while probe <= 1e3 {
        let ok = matches!(model.jet(&center, probe, false), Ok(j) if j.g.is_finite() && j.g_t.is_finite() && j.g_tt.is_finite());
        if !ok {
            t_max = (probe / 2.0).max(t0);
            break;
        }
        probe *= 2.0;
    }

    let mut warnings = Vec::new();
    if let Some(w) = sampled_convexity(&model, &domain, t_max)? {
        warnings.push(w);
    }
    let x_independent = expr.max_coordinate() == 0 && coeffs.values().all(|c| c.is_constant());
    Ok(IntegrandSpec::from_inner(SpecInner {
        family: Family::Custom,
        t0,
        domain,
        model,
        coefficients: coeffs,
        warnings,
        x_independent,
        t_max,
        clamp: None,
        label: expr.to_string(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::CoefficientField;
    use crate::dsl::parse;
    use std::f64::consts::E;

    #[test]
    fn polynomial_duals() {
        let d = eval_dual2(&parse("t^2/2").unwrap(), &[0.1, 0.2], 3.0, &CoefficientSet::new()).unwrap();
        assert_eq!((d.value, d.d_t, d.d_tt), (4.5, 3.0, 1.0));
        assert_eq!(d.d_tx, vec![0.0, 0.0]);
    }

    #[test]
    fn exponential_duals() {
        let d = eval_dual2(&parse("exp(t^2)-1").unwrap(), &[0.5, 0.5], 1.0, &CoefficientSet::new()).unwrap();
        assert!((d.d_t - 2.0 * E).abs() < 1e-14);
        assert!((d.d_tt - 6.0 * E).abs() < 1e-13);
    }

    #[test]
    fn coefficient_gradient_enters_mixed_derivative() {
        let c: CoefficientSet = [("a".to_string(), CoefficientField::affine(1.0, vec![1.0, 0.0]))].into_iter().collect();
        let d = eval_dual2(&parse("a(x)*t").unwrap(), &[0.3, 0.4], 2.0, &c).unwrap();
        assert_eq!(d.d_tx, vec![1.0, 0.0]);
    }

    #[test]
    fn log_of_negative_reports_location() {
        let e = parse("t + log(t - 5)").unwrap();
        match eval_dual2(&e, &[0.0], 1.0, &CoefficientSet::new()) {
            Err(Error::Domain { col, snippet, .. }) => {
                assert_eq!(col, 5);
                assert_eq!(snippet, "log((t - 5.0))");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sqrt_integrand_is_smoothed() {
        let s = to_integrand(&parse("t - sqrt(t)").unwrap(), &CoefficientSet::new(), 1.0, BoxDomain::unit(2)).unwrap();
        let below = s.eval_all(&[0.5, 0.5], 1.0 - 1e-12).unwrap();
        let above = s.eval_all(&[0.5, 0.5], 1.0).unwrap();
        assert!((below.g_t - above.g_t).abs() < 1e-10);
        assert_eq!(s.eval_all(&[0.5, 0.5], 0.0).unwrap().g_t, 0.0);
    }

    #[test]
    fn normalization_subtracts_value_at_zero() {
        let s = to_integrand(&parse("exp(t^2) + x1").unwrap(), &CoefficientSet::new(), 1.0, BoxDomain::unit(2)).unwrap();
        let v = s.eval_all(&[0.7, 0.1], 0.0).unwrap();
        assert_eq!(v.g, 0.0);
        assert_eq!(v.g_x, vec![0.0, 0.0]);
        assert!(s.default_t_max() < 1e3);
    }

    #[test]
    fn nonconvex_expression_warns() {
        let s = to_integrand(&parse("t^2 - t^4/100").unwrap(), &CoefficientSet::new(), 1.0, BoxDomain::unit(1)).unwrap();
        assert!(!s.warnings().is_empty());
    }
}
