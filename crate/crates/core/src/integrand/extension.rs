//! C¹ convex continuation of a profile below the smoothing knot `t0`.
//!
//! Given the value `G0` and slope `G1` of the raw profile at `t0`, the cubic
//! `q(t) = c2 t² + c3 t³` matches both with `q(0) = q'(0) = 0`. When that cubic
//! is not convex on `[0, t0]` the quadratic `G1 t² / (2 t0)` is used instead; it
//! matches the slope only, and the raw branch above `t0` is shifted by
//! `G1 t0 / 2 - G0` so values stay continuous.

use super::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionKind {
    Cubic,
    Quadratic,
}

const CONVEXITY_SLACK: f64 = 1e-14;

/// Cubic coefficients `(c2, c3)` fitted to value `g0` and slope `g1` at `t0`.
pub(crate) fn cubic_coefficients(t0: f64, g0: f64, g1: f64) -> (f64, f64) {
    let c2 = (3.0 * g0 - g1 * t0) / (t0 * t0);
    let c3 = (g1 * t0 - 2.0 * g0) / (t0 * t0 * t0);
    (c2, c3)
}

/// `q'' = 2 c2 + 6 c3 t` is affine in `t`, so checking both ends suffices.
pub(crate) fn cubic_is_convex(t0: f64, g0: f64, g1: f64) -> bool {
    let (c2, c3) = cubic_coefficients(t0, g0, g1);
    let scale = (g1.abs() / t0).max(1e-300);
    2.0 * c2 >= -CONVEXITY_SLACK * scale && 2.0 * c2 + 6.0 * c3 * t0 >= -CONVEXITY_SLACK * scale
}

/// Jet of the continuation at `t < t0`, given the raw jet at `t0`.
pub(crate) fn below_knot(kind: ExtensionKind, t0: f64, at_knot: &Jet, t: f64) -> Jet {
    let nx = at_knot.g_x.len();
    match kind {
        ExtensionKind::Cubic => {
            let (c2, c3) = cubic_coefficients(t0, at_knot.g, at_knot.g_t);
            let mut j = Jet {
                g: c2 * t * t + c3 * t * t * t,
                g_t: 2.0 * c2 * t + 3.0 * c3 * t * t,
                g_tt: 2.0 * c2 + 6.0 * c3 * t,
                g_x: Vec::with_capacity(nx),
                g_tx: Vec::with_capacity(nx),
            };
            for k in 0..nx {
                let (c2x, c3x) = cubic_coefficients(t0, at_knot.g_x[k], at_knot.g_tx[k]);
                j.g_x.push(c2x * t * t + c3x * t * t * t);
                j.g_tx.push(2.0 * c2x * t + 3.0 * c3x * t * t);
            }
            j
        }
        ExtensionKind::Quadratic => {
            let slope = at_knot.g_t / t0;
            Jet {
                g: 0.5 * slope * t * t,
                g_t: slope * t,
                g_tt: slope,
                g_x: at_knot.g_tx.iter().map(|d| 0.5 * d / t0 * t * t).collect(),
                g_tx: at_knot.g_tx.iter().map(|d| d / t0 * t).collect(),
            }
        }
    }
}

/// Shift applied to the raw branch at `t >= t0`: returns the value offset and
/// its x-gradient.
pub(crate) fn above_knot_offset(kind: ExtensionKind, t0: f64, at_knot: &Jet) -> (f64, Vec<f64>) {
    match kind {
        ExtensionKind::Cubic => (0.0, vec![0.0; at_knot.g_x.len()]),
        ExtensionKind::Quadratic => (
            0.5 * at_knot.g_t * t0 - at_knot.g,
            at_knot
                .g_x
                .iter()
                .zip(&at_knot.g_tx)
                .map(|(gx, gtx)| 0.5 * gtx * t0 - gx)
                .collect(),
        ),
    }
}
