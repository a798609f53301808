use crate::domain::BoxDomain;
use crate::error::{Error, Result};

/// Default Sobolev exponent used in the plane, where any value above 2 works.
pub const DEFAULT_TWO_STAR_PLANE: f64 = 10.0;

/// `2n/(n-2)` for `n >= 3`, otherwise `plane` (must exceed 2).
pub fn sobolev_exponent(n: usize, plane: f64) -> f64 {
    if n >= 3 {
        2.0 * n as f64 / (n as f64 - 2.0)
    } else {
        plane
    }
}

/// `(2ϑ - 1) ϑ`
pub fn tau_of(theta: f64) -> f64 {
    (2.0 * theta - 1.0) * theta
}

/// Exponent parameters and the sampled region for the structural checks.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralParams {
    pub n: usize,
    pub theta: f64,
    pub beta: f64,
    pub alpha: f64,
    pub t0: f64,
    pub t_max: f64,
    pub subdomain: BoxDomain,
    /// Sobolev exponent used when `n = 2`.
    pub two_star_plane: f64,
}

impl StructuralParams {
    /// Parameters with `t0 = 1`, `T_max = 1e3`, `α = n/(n-1)`, `Ω' = [0,1]^n`.
    pub fn new(n: usize, theta: f64, beta: f64) -> Self {
        StructuralParams {
            n,
            theta,
            beta,
            alpha: n as f64 / (n as f64 - 1.0),
            t0: 1.0,
            t_max: 1e3,
            subdomain: BoxDomain::unit(n),
            two_star_plane: DEFAULT_TWO_STAR_PLANE,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_subdomain(mut self, sub: BoxDomain) -> Self {
        self.subdomain = sub;
        self
    }

    pub fn with_t_range(mut self, t0: f64, t_max: f64) -> Self {
        self.t0 = t0;
        self.t_max = t_max;
        self
    }

    pub fn two_star(&self) -> f64 {
        sobolev_exponent(self.n, self.two_star_plane)
    }

    pub fn tau(&self) -> f64 {
        tau_of(self.theta)
    }

    /// Lower end of the admissible σ window, `2α / (2*(2-α))`.
    pub fn sigma_min(&self) -> f64 {
        2.0 * self.alpha / (self.two_star() * (2.0 - self.alpha))
    }

    /// Checks what the sampled conditions on `g` need: `n`, `Ω'`, `ϑ >= 1`
    /// and the `t` range.
    pub fn validate_sampling(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("n must be >= 2, got {}", self.n)));
        }
        if self.subdomain.dim() != self.n {
            return Err(Error::InvalidInput(format!(
                "subdomain has dimension {} but n = {}",
                self.subdomain.dim(),
                self.n
            )));
        }
        if !(self.theta >= 1.0) {
            return Err(Error::InvalidInput(format!("theta = {} must be >= 1", self.theta)));
        }
        if !(self.t0 > 0.0 && self.t_max > self.t0) {
            return Err(Error::InvalidInput(format!(
                "need 0 < t0 < T_max, got t0 = {}, T_max = {}",
                self.t0, self.t_max
            )));
        }
        Ok(())
    }

    /// Checks every documented range; the error names the first violation.
    pub fn validate(&self) -> Result<()> {
        let n = self.n as f64;
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("n must be >= 2, got {}", self.n)));
        }
        if self.subdomain.dim() != self.n {
            return Err(Error::InvalidInput(format!(
                "subdomain has dimension {} but n = {}",
                self.subdomain.dim(),
                self.n
            )));
        }
        if !(self.beta > 1.0 / n && self.beta < 2.0 / n) {
            return Err(Error::InvalidInput(format!(
                "beta = {} violates 1/n < beta < 2/n = ({}, {})",
                self.beta,
                1.0 / n,
                2.0 / n
            )));
        }
        if !(self.alpha > 1.0 && self.alpha <= n / (n - 1.0) + 1e-15) {
            return Err(Error::InvalidInput(format!(
                "alpha = {} violates 1 < alpha <= n/(n-1) = {}",
                self.alpha,
                n / (n - 1.0)
            )));
        }
        if !(self.theta >= 1.0) {
            return Err(Error::InvalidInput(format!("theta = {} must be >= 1", self.theta)));
        }
        if self.n == 2 && !(self.two_star_plane > 2.0) {
            return Err(Error::InvalidInput(format!(
                "the planar Sobolev exponent must exceed 2, got {}",
                self.two_star_plane
            )));
        }
        if !(self.t0 > 0.0 && self.t_max > self.t0) {
            return Err(Error::InvalidInput(format!(
                "need 0 < t0 < T_max, got t0 = {}, T_max = {}",
                self.t0, self.t_max
            )));
        }
        let bound = (1.0 - self.beta) * self.two_star() / 2.0;
        if !(self.tau() < bound) {
            return Err(Error::Infeasible(format!(
                "tau = (2 theta - 1) theta = {} is not below (1 - beta) 2*/2 = {bound}",
                self.tau()
            )));
        }
        Ok(())
    }
}
