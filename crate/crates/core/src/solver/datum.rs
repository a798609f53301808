use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Dirichlet data on the grid boundary (evaluated everywhere, used on `∂Ω`).
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryDatum {
    /// `u(x) = A x + b`, `A` given row-major as `m × 2`.
    Affine { a: Vec<f64>, b: Vec<f64> },
    /// Even components `scale (x1² - x2²)`, odd components `scale · 2 x1 x2`.
    HarmonicQuadratic { scale: f64 },
    /// Component `c`: `amplitude · sin(kπ(x1 + x2) + cπ/2)`.
    Sine { k: f64, amplitude: f64 },
    /// `scale · r^power` for one component, `scale · r^(power-1) (x - center)` for two;
    /// further components repeat the first two.
    Radial { power: f64, scale: f64, center: [f64; 2] },
}

impl BoundaryDatum {
    /// Affine datum for `m` components.
    pub fn affine(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != 2 * b.len() || b.is_empty() {
            return Err(Error::InvalidInput(format!(
                "affine datum needs A with 2m entries and b with m entries, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        Ok(BoundaryDatum::Affine { a, b })
    }

    /// `scale · x` for `m = 2` (each component its own coordinate).
    pub fn dilation(scale: f64) -> Self {
        BoundaryDatum::Affine {
            a: vec![scale, 0.0, 0.0, scale],
            b: vec![0.0, 0.0],
        }
    }

    /// Checks the datum against a component count.
    pub fn check_components(&self, m: usize) -> Result<()> {
        match self {
            BoundaryDatum::Affine { b, .. } if b.len() != m => Err(Error::InvalidInput(format!(
                "affine datum has {} components but the field has {m}",
                b.len()
            ))),
            BoundaryDatum::Radial { power, .. } if m >= 2 && *power < 1.0 => Err(Error::InvalidInput(format!(
                "vector radial datum needs power >= 1, got {power}"
            ))),
            _ => Ok(()),
        }
    }

    /// Component `c` of an `m`-component datum at `x`.
    pub fn eval(&self, x: [f64; 2], c: usize, m: usize) -> f64 {
        match self {
            BoundaryDatum::Affine { a, b } => a[2 * c] * x[0] + a[2 * c + 1] * x[1] + b[c],
            BoundaryDatum::HarmonicQuadratic { scale } => {
                if c % 2 == 0 {
                    scale * (x[0] * x[0] - x[1] * x[1])
                } else {
                    scale * 2.0 * x[0] * x[1]
                }
            }
            BoundaryDatum::Sine { k, amplitude } => amplitude * (k * PI * (x[0] + x[1]) + c as f64 * PI / 2.0).sin(),
            BoundaryDatum::Radial { power, scale, center } => {
                let d = [x[0] - center[0], x[1] - center[1]];
                let r = d[0].hypot(d[1]);
                if r == 0.0 {
                    return 0.0;
                }
                if m == 1 {
                    scale * r.powf(*power)
                } else {
                    scale * r.powf(power - 1.0) * d[c % 2]
                }
            }
        }
    }

    /// Exact gradient `∂u_c/∂x` where closed forms are simple.
    pub fn gradient(&self, x: [f64; 2], c: usize) -> Option<[f64; 2]> {
        match self {
            BoundaryDatum::Affine { a, .. } => Some([a[2 * c], a[2 * c + 1]]),
            BoundaryDatum::HarmonicQuadratic { scale } => Some(if c % 2 == 0 {
                [2.0 * scale * x[0], -2.0 * scale * x[1]]
            } else {
                [2.0 * scale * x[1], 2.0 * scale * x[0]]
            }),
            BoundaryDatum::Sine { k, amplitude } => {
                let d = amplitude * k * PI * (k * PI * (x[0] + x[1]) + c as f64 * PI / 2.0).cos();
                Some([d, d])
            }
            BoundaryDatum::Radial { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundaryDatum::Affine { .. } => "affine",
            BoundaryDatum::HarmonicQuadratic { .. } => "harmonic_quadratic",
            BoundaryDatum::Sine { .. } => "sine",
            BoundaryDatum::Radial { .. } => "radial",
        }
    }
}

impl fmt::Display for BoundaryDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryDatum::Affine { a, b } => write!(f, "affine(A = {a:?}, b = {b:?})"),
            BoundaryDatum::HarmonicQuadratic { scale } => write!(f, "harmonic_quadratic(scale = {scale})"),
            BoundaryDatum::Sine { k, amplitude } => write!(f, "sine(k = {k}, amplitude = {amplitude})"),
            BoundaryDatum::Radial { power, scale, center } => {
                write!(f, "radial(power = {power}, scale = {scale}, center = {center:?})")
            }
        }
    }
}
