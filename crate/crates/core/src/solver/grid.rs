use crate::error::{Error, Result};

/// Uniform square grid on `[lo, lo + side]²` with `cells × cells` squares
/// carrying `m`-component fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lo: [f64; 2],
    side: f64,
    cells: usize,
    m: usize,
}

impl Grid {
    pub fn new(lo: [f64; 2], side: f64, cells: usize, m: usize) -> Result<Self> {
        if cells < 4 {
            return Err(Error::InvalidInput(format!("a grid needs at least 4 cells per side, got {cells}")));
        }
        if !(side > 0.0 && side.is_finite() && lo.iter().all(|v| v.is_finite())) {
            return Err(Error::InvalidInput(format!("invalid grid box: lo = {lo:?}, side = {side}")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("fields need at least one component".into()));
        }
        Ok(Grid { lo, side, cells, m })
    }

    /// `[0, 1]²` with `cells` squares per side.
    pub fn unit(cells: usize, m: usize) -> Result<Self> {
        Grid::new([0.0, 0.0], 1.0, cells, m)
    }

    pub fn lo(&self) -> [f64; 2] {
        self.lo
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Nodes per side, `cells + 1`.
    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn components(&self) -> usize {
        self.m
    }

    /// Mesh width.
    pub fn h(&self) -> f64 {
        self.side / self.cells as f64
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.h();
        [self.lo[0] + i as f64 * h, self.lo[1] + j as f64 * h]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.h();
        [self.lo[0] + (i as f64 + 0.5) * h, self.lo[1] + (j as f64 + 0.5) * h]
    }

    pub fn center(&self) -> [f64; 2] {
        [self.lo[0] + 0.5 * self.side, self.lo[1] + 0.5 * self.side]
    }

    /// Flat index of node `(i, j)`.
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.nodes() + i
    }

    /// Flat index of component `c` at node `(i, j)`.
    pub fn dof(&self, i: usize, j: usize, c: usize) -> usize {
        self.node_index(i, j) * self.m + c
    }

    pub fn dof_count(&self) -> usize {
        self.nodes() * self.nodes() * self.m
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.cells || j == self.cells
    }

    /// Same box and components, different resolution.
    pub fn with_cells(&self, cells: usize) -> Result<Self> {
        Grid::new(self.lo, self.side, cells, self.m)
    }
}
