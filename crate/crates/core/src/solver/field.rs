use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::datum::BoundaryDatum;
use super::grid::Grid;

/// Nodal values of an `m`-component map; boundary nodes are fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    grid: Grid,
    values: Vec<f64>,
    fixed: Vec<bool>,
    provenance: String,
}

impl DiscreteField {
    /// Boundary nodes carry the datum; the interior is the transfinite
    /// (Coons) interpolation of the boundary values, which is exact for
    /// bilinear data.
    pub fn from_datum(grid: &Grid, datum: &BoundaryDatum) -> Result<Self> {
        let m = grid.components();
        datum.check_components(m)?;
        let n = grid.cells();
        let mut values = vec![0.0; grid.dof_count()];
        let mut fixed = vec![false; grid.nodes() * grid.nodes()];
        let at = |i: usize, j: usize, c: usize| datum.eval(grid.node(i, j), c, m);
        for j in 0..=n {
            for i in 0..=n {
                fixed[grid.node_index(i, j)] = grid.is_boundary(i, j);
                for c in 0..m {
                    let v = if grid.is_boundary(i, j) {
                        at(i, j, c)
                    } else {
                        let s = i as f64 / n as f64;
                        let r = j as f64 / n as f64;
                        (1.0 - s) * at(0, j, c) + s * at(n, j, c) + (1.0 - r) * at(i, 0, c) + r * at(i, n, c)
                            - (1.0 - s) * (1.0 - r) * at(0, 0, c)
                            - s * (1.0 - r) * at(n, 0, c)
                            - (1.0 - s) * r * at(0, n, c)
                            - s * r * at(n, n, c)
                    };
                    if !v.is_finite() {
                        return Err(Error::InvalidInput(format!(
                            "boundary datum {datum} is not finite at node ({i}, {j})"
                        )));
                    }
                    values[grid.dof(i, j, c)] = v;
                }
            }
        }
        Ok(DiscreteField {
            grid: grid.clone(),
            values,
            fixed,
            provenance: datum.to_string(),
        })
    }

    /// The datum sampled at every node, interior included.
    pub fn interpolant(grid: &Grid, datum: &BoundaryDatum) -> Result<Self> {
        let mut f = DiscreteField::from_datum(grid, datum)?;
        let m = grid.components();
        for j in 0..grid.nodes() {
            for i in 0..grid.nodes() {
                for c in 0..m {
                    f.values[grid.dof(i, j, c)] = datum.eval(grid.node(i, j), c, m);
                }
            }
        }
        Ok(f)
    }

    /// Adds uniform noise of size `amplitude` to the free values.
    pub fn perturb(&mut self, amplitude: f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.grid.components();
        for (k, v) in self.values.iter_mut().enumerate() {
            if !self.fixed[k / m] {
                *v += amplitude * (2.0 * rng.gen::<f64>() - 1.0);
            }
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn value(&self, i: usize, j: usize, c: usize) -> f64 {
        self.values[self.grid.dof(i, j, c)]
    }

    pub fn is_fixed(&self, i: usize, j: usize) -> bool {
        self.fixed[self.grid.node_index(i, j)]
    }

    /// `true` for every degree of freedom on a fixed node.
    pub fn fixed_dofs(&self) -> Vec<bool> {
        let m = self.grid.components();
        (0..self.values.len()).map(|k| self.fixed[k / m]).collect()
    }

    /// Overwrites free values; fixed values are left untouched.
    pub fn set_free(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        let m = self.grid.components();
        for (k, v) in values.iter().enumerate() {
            if !self.fixed[k / m] {
                self.values[k] = *v;
            }
        }
        Ok(())
    }

    /// Largest nodal difference to `other` over all components.
    pub fn max_difference(&self, other: &DiscreteField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    /// Rows `node_i,node_j,component,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node_i,node_j,component,value\n");
        let n = self.grid.nodes();
        for j in 0..n {
            for i in 0..n {
                for c in 0..self.grid.components() {
                    s.push_str(&format!("{i},{j},{c},{:.16e}\n", self.value(i, j, c)));
                }
            }
        }
        s
    }
}
