use crate::error::{Error, Result};

/// Axis-aligned box `[lo_1, hi_1] × … × [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidInput(format!(
                "box bounds must have equal nonzero length (got {} and {})",
                lo.len(),
                hi.len()
            )));
        }
        for (k, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidInput(format!(
                    "box axis {k}: need finite lo < hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(BoxDomain { lo, hi })
    }

    /// The unit cube `[0,1]^n`.
    pub fn unit(n: usize) -> Self {
        BoxDomain {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(xi, (l, h))| {
                let slack = 1e-12 * (h - l).max(1.0);
                *xi >= l - slack && *xi <= h + slack
            })
    }

    /// `true` when `other` lies inside `self`.
    pub fn contains_box(&self, other: &BoxDomain) -> bool {
        self.contains(other.lo()) && self.contains(other.hi())
    }

    /// All `2^n` corners.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|k| if mask >> k & 1 == 1 { self.hi[k] } else { self.lo[k] })
                    .collect()
            })
            .collect()
    }

    /// Tensor grid with `per_axis` points per axis (endpoints included).
    pub fn tensor_grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let per_axis = per_axis.max(1);
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                (0..n)
                    .map(|k| {
                        let i = idx % per_axis;
                        idx /= per_axis;
                        if per_axis == 1 {
                            0.5 * (self.lo[k] + self.hi[k])
                        } else {
                            self.lo[k] + (self.hi[k] - self.lo[k]) * i as f64 / (per_axis - 1) as f64
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Maps a point of the unit cube onto the box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(ui, (l, h))| l + ui * (h - l))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_axes() {
        assert!(BoxDomain::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(BoxDomain::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn grid_and_corners() {
        let b = BoxDomain::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(b.corners().len(), 4);
        let g = b.tensor_grid(3);
        assert_eq!(g.len(), 9);
        assert!(g.iter().all(|p| b.contains(p)));
        assert_eq!(b.center(), vec![1.0, 0.0]);
    }
}
