use std::sync::Arc;

use crate::error::{Error, Result};
use crate::moments::MomentState;
use crate::multi_index::MultiIndexSet;

/// Uniform periodic mesh of moment states. In 2D cell `(i, j)` is stored at
/// `j·nx + i`; in 1D `ny = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub cells: Vec<MomentState>,
}

impl Grid {
    pub fn new_1d(length: f64, cells: Vec<MomentState>) -> Result<Self> {
        let n = cells.len();
        Self::new(n, 1, length, 1.0, cells)
    }

    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, cells: Vec<MomentState>) -> Result<Self> {
        if nx < 3 || ny == 0 || ny == 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs nx >= 3 and ny = 1 or >= 3, got {nx} x {ny}"
            )));
        }
        if cells.len() != nx * ny {
            return Err(Error::InvalidParameter(format!(
                "{} cells supplied for a {nx} x {ny} grid",
                cells.len()
            )));
        }
        if !(lx > 0.0) || !(ly > 0.0) {
            return Err(Error::InvalidParameter(format!("domain lengths must be > 0, got {lx}, {ly}")));
        }
        let dim = if ny > 1 { 2 } else { 1 };
        let set = cells[0].set().clone();
        if set.dim() != dim || cells.iter().any(|c| c.set() != &set) {
            return Err(Error::InvalidParameter(
                "all cells must share one expansion whose dimension matches the grid".into(),
            ));
        }
        Ok(Grid {
            nx,
            ny,
            dx: lx / nx as f64,
            dy: if ny > 1 { ly / ny as f64 } else { 1.0 },
            cells,
        })
    }

    /// Every cell set to the same Maxwellian.
    pub fn uniform(
        set: Arc<MultiIndexSet>,
        nx: usize,
        ny: usize,
        lx: f64,
        ly: f64,
        rho: f64,
        u: &[f64],
        uth: f64,
    ) -> Result<Self> {
        let cell = MomentState::maxwellian(set, rho, u, uth)?;
        Self::new(nx, ny, lx, ly, vec![cell; nx * ny])
    }

    pub fn dim(&self) -> usize {
        if self.ny > 1 {
            2
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn set(&self) -> &Arc<MultiIndexSet> {
        self.cells[0].set()
    }

    pub fn order(&self) -> usize {
        self.set().order()
    }

    /// Cell length (1D) or area (2D).
    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn spacing(&self, d: usize) -> f64 {
        if d == 0 {
            self.dx
        } else {
            self.dy
        }
    }

    /// Cell-centre coordinates `((i + ½)Δx, (j + ½)Δy)`.
    pub fn center(&self, index: usize) -> [f64; 2] {
        let (i, j) = (index % self.nx, index / self.nx);
        [(i as f64 + 0.5) * self.dx, (j as f64 + 0.5) * self.dy]
    }

    /// Periodic neighbour of `index` one step along `d` (`forward` or back).
    #[inline]
    pub fn neighbour(&self, index: usize, d: usize, forward: bool) -> usize {
        let (i, j) = (index % self.nx, index / self.nx);
        if d == 0 {
            let i = if forward { (i + 1) % self.nx } else { (i + self.nx - 1) % self.nx };
            j * self.nx + i
        } else {
            let j = if forward { (j + 1) % self.ny } else { (j + self.ny - 1) % self.ny };
            j * self.nx + i
        }
    }

    pub fn densities(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.rho()).collect()
    }
}
