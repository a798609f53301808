use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::BoxDomain;

/// Tensor grid over `Ω' × [t_lo, t_hi]` (log-spaced in t) plus shifted
/// Halton points that cluster near both ends of the t range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    pub x_points: usize,
    pub t_points: usize,
    pub quasi_random: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            x_points: 64,
            t_points: 64,
            quasi_random: 1 << 14,
            seed: 0,
        }
    }
}

/// One `(x, t)` sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub t: f64,
}

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    out
}

impl SamplingPlan {
    /// A lighter plan for parameter scans.
    pub fn coarse(seed: u64) -> Self {
        SamplingPlan {
            x_points: 16,
            t_points: 48,
            quasi_random: 1 << 11,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Grid points per axis for an `n`-dimensional box.
    fn per_axis(&self, n: usize) -> usize {
        ((self.x_points as f64).powf(1.0 / n as f64).round() as usize).max(2)
    }

    pub fn samples(&self, sub: &BoxDomain, t_lo: f64, t_hi: f64) -> Vec<Sample> {
        let n = sub.dim();
        let (l0, l1) = (t_lo.ln(), t_hi.ln());
        let t_at = |w: f64| (l0 + (l1 - l0) * w).exp().clamp(t_lo, t_hi);
        let mut out = Vec::new();
        let xs = sub.tensor_grid(self.per_axis(n));
        for x in &xs {
            for j in 0..self.t_points {
                let w = if self.t_points == 1 { 0.0 } else { j as f64 / (self.t_points - 1) as f64 };
                out.push(Sample { x: x.clone(), t: t_at(w) });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shift: Vec<f64> = (0..=n).map(|_| rng.gen::<f64>()).collect();
        for i in 1..=self.quasi_random as u64 {
            let u: Vec<f64> = (0..=n)
                .map(|d| (radical_inverse(i, PRIMES[d % PRIMES.len()]) + shift[d]).fract())
                .collect();
            let x = sub.from_unit(&u[..n]);
            let w = 0.5 * (1.0 - (std::f64::consts::PI * u[n]).cos());
            out.push(Sample { x, t: t_at(w) });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let plan = SamplingPlan::coarse(7);
        let sub = BoxDomain::unit(2);
        let a = plan.samples(&sub, 1.0, 100.0);
        let b = plan.samples(&sub, 1.0, 100.0);
        assert_eq!(a, b);
        assert!(a.iter().all(|s| sub.contains(&s.x) && s.t >= 1.0 && s.t <= 100.0));
        assert!(a.iter().any(|s| s.t == 100.0));
        let c = SamplingPlan::coarse(8).samples(&sub, 1.0, 100.0);
        assert_ne!(a, c);
    }
}
