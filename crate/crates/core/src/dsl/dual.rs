//! Second-order forward-mode numbers in `t` with first-order `x` sensitivities.

/// Value with `∂_t`, `∂_tt`, `∂_{x_k}` and `∂_t ∂_{x_k}`.
///
/// `d_x` / `d_tx` may be empty, meaning the x-sensitivities are not tracked.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual2 {
    pub value: f64,
    pub d_t: f64,
    pub d_tt: f64,
    pub d_x: Vec<f64>,
    pub d_tx: Vec<f64>,
}

/// Product where `0 · ∞` counts as 0.
#[inline]
pub(crate) fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Dual2 {
    pub fn constant(v: f64, nx: usize) -> Self {
        Dual2 {
            value: v,
            d_t: 0.0,
            d_tt: 0.0,
            d_x: vec![0.0; nx],
            d_tx: vec![0.0; nx],
        }
    }

    /// The variable `t`.
    pub fn variable_t(t: f64, nx: usize) -> Self {
        Dual2 {
            d_t: 1.0,
            ..Dual2::constant(t, nx)
        }
    }

    /// A t-independent quantity with the given x-gradient.
    pub fn spatial(v: f64, grad: Vec<f64>) -> Self {
        let n = grad.len();
        Dual2 {
            value: v,
            d_t: 0.0,
            d_tt: 0.0,
            d_x: grad,
            d_tx: vec![0.0; n],
        }
    }

    fn nx(&self) -> usize {
        self.d_x.len()
    }

    /// `true` when the value is independent of both `t` and `x`.
    pub fn is_constant(&self) -> bool {
        self.d_t == 0.0 && self.d_tt == 0.0 && self.d_x.iter().all(|v| *v == 0.0) && self.d_tx.iter().all(|v| *v == 0.0)
    }

    /// `φ(self)` given `φ`, `φ'`, `φ''` at `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let u = self;
        Dual2 {
            value: f0,
            d_t: mul0(f1, u.d_t),
            d_tt: mul0(f2, u.d_t * u.d_t) + mul0(f1, u.d_tt),
            d_x: u.d_x.iter().map(|dx| mul0(f1, *dx)).collect(),
            d_tx: u
                .d_x
                .iter()
                .zip(&u.d_tx)
                .map(|(dx, dtx)| mul0(f2, u.d_t * dx) + mul0(f1, *dtx))
                .collect(),
        }
    }

    pub fn add(&self, o: &Dual2) -> Self {
        Dual2 {
            value: self.value + o.value,
            d_t: self.d_t + o.d_t,
            d_tt: self.d_tt + o.d_tt,
            d_x: zip_with(&self.d_x, &o.d_x, |a, b| a + b),
            d_tx: zip_with(&self.d_tx, &o.d_tx, |a, b| a + b),
        }
    }

    pub fn sub(&self, o: &Dual2) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Dual2 {
            value: -self.value,
            d_t: -self.d_t,
            d_tt: -self.d_tt,
            d_x: self.d_x.iter().map(|v| -v).collect(),
            d_tx: self.d_tx.iter().map(|v| -v).collect(),
        }
    }

    pub fn mul(&self, o: &Dual2) -> Self {
        let (u, v) = (self, o);
        let n = u.nx().max(v.nx());
        let at = |s: &[f64], k: usize| s.get(k).copied().unwrap_or(0.0);
        Dual2 {
            value: u.value * v.value,
            d_t: mul0(u.d_t, v.value) + mul0(u.value, v.d_t),
            d_tt: mul0(u.d_tt, v.value) + 2.0 * mul0(u.d_t, v.d_t) + mul0(u.value, v.d_tt),
            d_x: (0..n)
                .map(|k| mul0(at(&u.d_x, k), v.value) + mul0(u.value, at(&v.d_x, k)))
                .collect(),
            d_tx: (0..n)
                .map(|k| {
                    mul0(at(&u.d_tx, k), v.value)
                        + mul0(u.d_t, at(&v.d_x, k))
                        + mul0(at(&u.d_x, k), v.d_t)
                        + mul0(u.value, at(&v.d_tx, k))
                })
                .collect(),
        }
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    /// `self^c` for a constant exponent.
    pub fn powf(&self, c: f64) -> Self {
        let u = self.value;
        if c == 0.0 {
            return Dual2::constant(1.0, self.nx());
        }
        let f0 = u.powf(c);
        let f1 = c * u.powf(c - 1.0);
        let f2 = if c == 1.0 { 0.0 } else { c * (c - 1.0) * u.powf(c - 2.0) };
        self.chain(f0, f1, f2)
    }

    /// `sqrt(u² + δ²) - δ`
    pub fn abs_smooth(&self, delta: f64) -> Self {
        let u = self.value;
        let r = (u * u + delta * delta).sqrt();
        self.chain(r - delta, u / r, delta * delta / (r * r * r))
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| f(a.get(k).copied().unwrap_or(0.0), b.get(k).copied().unwrap_or(0.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_second_order() {
        // (t^2)(t + x) at t=2, x=3: value 20, d_t = 2t(t+x) + t^2 = 24, d_tt = 2(t+x) + 4t = 18
        let t = Dual2::variable_t(2.0, 1);
        let x = Dual2::spatial(3.0, vec![1.0]);
        let f = t.mul(&t).mul(&t.add(&x));
        assert_eq!(f.value, 20.0);
        assert_eq!(f.d_t, 24.0);
        assert_eq!(f.d_tt, 18.0);
        assert_eq!(f.d_x, vec![4.0]);
        assert_eq!(f.d_tx, vec![4.0]);
    }

    #[test]
    fn zero_safe_power_at_origin() {
        let t = Dual2::variable_t(0.0, 0);
        let sq = t.powf(2.0);
        assert_eq!((sq.value, sq.d_t, sq.d_tt), (0.0, 0.0, 2.0));
        let r = t.sqrt();
        assert!(r.d_t.is_infinite());
    }
}
