//! Adaptive Simpson quadrature over small fixed-size vector integrands.
//!
//! Vector integrands let one pass integrate several related quantities that
//! share the expensive integrand evaluation (e.g. `∫ f` and `∫ (t - s) f`).

/// Tolerances and recursion limit for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_depth: 48,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            ..Default::default()
        }
    }

    pub fn relative(rel_tol: f64, abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

/// Why a quadrature failed.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadError<E> {
    /// The integrand itself failed.
    Integrand(E),
    /// Recursion limit reached without meeting the tolerance; carries the abscissa.
    NoConvergence { at: f64 },
    /// A non-finite integrand value was produced.
    NonFinite { at: f64 },
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    fa: [f64; K],
    fm: [f64; K],
    fb: [f64; K],
    whole: [f64; K],
}

fn simpson<const K: usize>(a: f64, b: f64, fa: &[f64; K], fm: &[f64; K], fb: &[f64; K]) -> [f64; K] {
    let w = (b - a) / 6.0;
    std::array::from_fn(|k| w * (fa[k] + 4.0 * fm[k] + fb[k]))
}

fn eval<const K: usize, E>(
    f: &mut impl FnMut(f64) -> Result<[f64; K], E>,
    x: f64,
) -> Result<[f64; K], QuadError<E>> {
    let v = f(x).map_err(QuadError::Integrand)?;
    if v.iter().any(|c| !c.is_finite()) {
        return Err(QuadError::NonFinite { at: x });
    }
    Ok(v)
}

/// Integrates `f` over `[a, b]` with the classic Richardson-corrected
/// adaptive Simpson rule. Each component must meet
/// `|S2 - S1| <= 15 * max(abs_tol, rel_tol * |S2|)` on every accepted panel,
/// with the absolute budget halved at each split.
pub fn adaptive_simpson<const K: usize, E>(
    mut f: impl FnMut(f64) -> Result<[f64; K], E>,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<[f64; K], QuadError<E>> {
    if a == b {
        return Ok([0.0; K]);
    }
    let fa = eval(&mut f, a)?;
    let fb = eval(&mut f, b)?;
    let m = 0.5 * (a + b);
    let fm = eval(&mut f, m)?;
    let whole = simpson(a, b, &fa, &fm, &fb);
    let root = Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
    };
    recurse(&mut f, root, opts.abs_tol, opts.rel_tol, opts.max_depth)
}

fn recurse<const K: usize, E>(
    f: &mut impl FnMut(f64) -> Result<[f64; K], E>,
    p: Panel<K>,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
) -> Result<[f64; K], QuadError<E>> {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(p.a, m, &p.fa, &flm, &p.fm);
    let right = simpson(m, p.b, &p.fm, &frm, &p.fb);

    let mut converged = true;
    let mut out = [0.0; K];
    for k in 0..K {
        let s2 = left[k] + right[k];
        let delta = s2 - p.whole[k];
        let budget = abs_tol.max(rel_tol * s2.abs());
        if delta.abs() > 15.0 * budget {
            converged = false;
        }
        out[k] = s2 + delta / 15.0;
    }
    if converged {
        return Ok(out);
    }
    if depth == 0 || (m - p.a) <= f64::EPSILON * p.a.abs().max(1.0) {
        return Err(QuadError::NoConvergence { at: m });
    }
    let lhs = recurse(
        f,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        0.5 * abs_tol,
        rel_tol,
        depth - 1,
    )?;
    let rhs = recurse(
        f,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        0.5 * abs_tol,
        rel_tol,
        depth - 1,
    )?;
    Ok(std::array::from_fn(|k| lhs[k] + rhs[k]))
}

/// Scalar convenience wrapper around [`adaptive_simpson`].
pub fn integrate<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<f64, QuadError<E>> {
    adaptive_simpson::<1, E>(|x| f(x).map(|v| [v]), a, b, opts).map(|v| v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn polynomials_up_to_cubic_are_exact() {
        let v = integrate(|x| ok(x * x * x - 2.0 * x + 1.0), 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn smooth_transcendental() {
        let v = integrate(|x| ok(x.sin()), 0.0, std::f64::consts::PI, QuadOptions::absolute(1e-12)).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn kinked_integrand_converges() {
        // clamp(x^2, 0.25, 1) on [0, 2]
        let v = integrate(|x| ok((x * x).clamp(0.25, 1.0)), 0.0, 2.0, QuadOptions::absolute(1e-10)).unwrap();
        let exact = 0.25 * 0.5 + (1.0 - 0.125) / 3.0 + 1.0;
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
    }

    #[test]
    fn vector_components_share_evaluations() {
        let mut calls = 0;
        let v = adaptive_simpson::<2, Infallible>(
            |x| {
                calls += 1;
                Ok([x.exp(), x * x.exp()])
            },
            0.0,
            1.0,
            QuadOptions::absolute(1e-12),
        )
        .unwrap();
        assert!((v[0] - (1f64.exp() - 1.0)).abs() < 1e-11);
        assert!((v[1] - 1.0).abs() < 1e-11);
        assert!(calls > 3);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let r = integrate(|x| ok(1.0 / x), 0.0, 1.0, QuadOptions::default());
        assert!(matches!(r, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn singular_integrand_hits_depth_limit() {
        let r = integrate(
            |x| ok(if x > 0.0 { x.powf(-0.9) } else { 0.0 }),
            0.0,
            1.0,
            QuadOptions {
                abs_tol: 1e-14,
                rel_tol: 0.0,
                max_depth: 10,
            },
        );
        assert!(matches!(r, Err(QuadError::NoConvergence { .. })));
    }
}
