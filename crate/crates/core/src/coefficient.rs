//! Lipschitz coefficient fields `a(x)`, `b(x)`, `p(x)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};

/// Shape of a coefficient field.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientKind {
    Constant(f64),
    /// `c0 + slope · x`
    Affine { c0: f64, slope: Vec<f64> },
    /// `c0 + amplitude · sin(2π freq · x)`
    SmoothPeriodic {
        c0: f64,
        amplitude: f64,
        freq: Vec<f64>,
    },
}

/// A scalar coefficient with exact gradient and a Lipschitz bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    kind: CoefficientKind,
}

impl CoefficientField {
    pub fn constant(c: f64) -> Self {
        CoefficientField {
            kind: CoefficientKind::Constant(c),
        }
    }

    pub fn affine(c0: f64, slope: Vec<f64>) -> Self {
        CoefficientField {
            kind: CoefficientKind::Affine { c0, slope },
        }
    }

    pub fn periodic(c0: f64, amplitude: f64, freq: Vec<f64>) -> Self {
        CoefficientField {
            kind: CoefficientKind::SmoothPeriodic { c0, amplitude, freq },
        }
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    pub fn is_constant(&self) -> bool {
        match &self.kind {
            CoefficientKind::Constant(_) => true,
            CoefficientKind::Affine { slope, .. } => slope.iter().all(|s| *s == 0.0),
            CoefficientKind::SmoothPeriodic { amplitude, freq, .. } => {
                *amplitude == 0.0 || freq.iter().all(|f| *f == 0.0)
            }
        }
    }

    /// Spatial dimension the field expects, if it pins one.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            CoefficientKind::Constant(_) => None,
            CoefficientKind::Affine { slope, .. } => Some(slope.len()),
            CoefficientKind::SmoothPeriodic { freq, .. } => Some(freq.len()),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            CoefficientKind::Constant(c) => *c,
            CoefficientKind::Affine { c0, slope } => c0 + dot(slope, x),
            CoefficientKind::SmoothPeriodic { c0, amplitude, freq } => {
                c0 + amplitude * (TAU * dot(freq, x)).sin()
            }
        }
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            CoefficientKind::Constant(_) => out.iter_mut().for_each(|o| *o = 0.0),
            CoefficientKind::Affine { slope, .. } => {
                for (o, s) in out.iter_mut().zip(slope.iter().chain(std::iter::repeat(&0.0))) {
                    *o = *s;
                }
            }
            CoefficientKind::SmoothPeriodic { amplitude, freq, .. } => {
                let c = amplitude * TAU * (TAU * dot(freq, x)).cos();
                for (o, f) in out.iter_mut().zip(freq.iter().chain(std::iter::repeat(&0.0))) {
                    *o = c * f;
                }
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.gradient_into(x, &mut g);
        g
    }

    /// Global Lipschitz constant (Euclidean norm of the gradient bound).
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            CoefficientKind::Constant(_) => 0.0,
            CoefficientKind::Affine { slope, .. } => norm(slope),
            CoefficientKind::SmoothPeriodic { amplitude, freq, .. } => amplitude.abs() * TAU * norm(freq),
        }
    }

    /// `(min, max)` over the box. Exact for constant and affine fields, a
    /// guaranteed enclosure for periodic ones.
    pub fn range_on(&self, domain: &BoxDomain) -> (f64, f64) {
        match &self.kind {
            CoefficientKind::Constant(c) => (*c, *c),
            CoefficientKind::Affine { .. } => domain
                .corners()
                .iter()
                .map(|p| self.value(p))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v))),
            CoefficientKind::SmoothPeriodic { c0, amplitude, .. } => {
                if self.is_constant() {
                    (*c0, *c0)
                } else {
                    (c0 - amplitude.abs(), c0 + amplitude.abs())
                }
            }
        }
    }

    pub(crate) fn check_dim(&self, n: usize, name: &str) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::InvalidInput(format!(
                "coefficient `{name}` is defined on R^{d} but the domain is R^{n}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Named coefficient bindings (`a`, `b`, `p`, or DSL names).
pub type CoefficientSet = BTreeMap<String, CoefficientField>;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_range_uses_corners() {
        let a = CoefficientField::affine(1.0, vec![0.5, -0.25]);
        let (lo, hi) = a.range_on(&BoxDomain::unit(2));
        assert_eq!((lo, hi), (0.75, 1.5));
        assert!((a.lipschitz_bound() - (0.3125f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn periodic_gradient_matches_finite_difference() {
        let a = CoefficientField::periodic(2.0, 0.3, vec![1.0, 0.5]);
        let x = [0.3, 0.7];
        let g = a.gradient(&x);
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            let fd = (a.value(&xp) - a.value(&xm)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-7);
        }
        // sampled gradient norms stay under the reported bound
        let l = a.lipschitz_bound();
        for p in BoxDomain::unit(2).tensor_grid(17) {
            let gn = a.gradient(&p).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(gn <= l + 1e-12);
        }
    }
}
