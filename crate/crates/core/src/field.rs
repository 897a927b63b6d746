//! Periodic Poisson solve `-Δφ = ρ − ρ₀` with the second-order
//! central-difference Laplacian, and the central-difference field `E = −∇φ`.
//!
//! The stencil is diagonalised by the discrete Fourier transform with
//! eigenvalues `(2 − 2cos(2πm/N))/Δx²`; the zero mode is set to zero,
//! which fixes the gauge `Σφ = 0`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Potential and field on the grid; `e[d]` holds the `d`-th component.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub phi: Vec<f64>,
    pub e: Vec<Vec<f64>>,
}

impl FieldState {
    pub fn zeros(cells: usize, dim: usize) -> Self {
        FieldState {
            phi: vec![0.0; cells],
            e: vec![vec![0.0; cells]; dim],
        }
    }
}

/// Poisson solver for a periodic `nx` (× `ny`) mesh. Cells are stored with
/// `x` fastest: cell `(i, j)` lives at `j·nx + i`.
pub struct PoissonSolver {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    inv_lambda: Vec<f64>,
}

impl std::fmt::Debug for PoissonSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonSolver")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("dx", &self.dx)
            .field("dy", &self.dy)
            .finish()
    }
}

fn stencil_eigenvalue(m: usize, n: usize, h: f64) -> f64 {
    (2.0 - 2.0 * (2.0 * std::f64::consts::PI * m as f64 / n as f64).cos()) / (h * h)
}

impl PoissonSolver {
    pub fn new_1d(nx: usize, dx: f64) -> Result<Self> {
        Self::new(nx, 1, dx, 1.0)
    }

    /// A 2D solver; `ny = 1` degenerates to the 1D problem.
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 3 || ny == 0 || ny == 2 {
            return Err(Error::InvalidParameter(format!(
                "Poisson grid needs nx >= 3 and ny = 1 or >= 3, got {nx} x {ny}"
            )));
        }
        if !(dx > 0.0) || !(dy > 0.0) {
            return Err(Error::InvalidParameter(format!("cell sizes must be > 0, got {dx}, {dy}")));
        }
        let mut planner = FftPlanner::new();
        let mut inv_lambda = vec![0.0; nx * ny];
        for j in 0..ny {
            let ly = if ny > 1 { stencil_eigenvalue(j, ny, dy) } else { 0.0 };
            for i in 0..nx {
                let lambda = stencil_eigenvalue(i, nx, dx) + ly;
                if i + j > 0 {
                    inv_lambda[j * nx + i] = 1.0 / lambda;
                }
            }
        }
        Ok(PoissonSolver {
            nx,
            ny,
            dx,
            dy,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
            inv_lambda,
        })
    }

    pub fn dim(&self) -> usize {
        if self.ny > 1 {
            2
        } else {
            1
        }
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    fn transform(&self, data: &mut [Complex64], x: &Arc<dyn Fft<f64>>, y: &Arc<dyn Fft<f64>>) {
        x.process(data);
        if self.ny > 1 {
            let mut column = vec![Complex64::new(0.0, 0.0); self.ny];
            for i in 0..self.nx {
                for j in 0..self.ny {
                    column[j] = data[j * self.nx + i];
                }
                y.process(&mut column);
                for j in 0..self.ny {
                    data[j * self.nx + i] = column[j];
                }
            }
        }
    }

    /// Mean-zero `φ` solving the discrete `-Δφ = ρ − ρ₀ − mean(ρ − ρ₀)`.
    pub fn solve(&self, rho: &[f64], rho0: f64) -> Vec<f64> {
        assert_eq!(rho.len(), self.cells(), "density length does not match grid");
        let mean = rho.iter().map(|r| r - rho0).sum::<f64>() / rho.len() as f64;
        let mut data: Vec<Complex64> = rho
            .iter()
            .map(|r| Complex64::new(r - rho0 - mean, 0.0))
            .collect();
        self.transform(&mut data, &self.fwd_x, &self.fwd_y);
        for (c, s) in data.iter_mut().zip(&self.inv_lambda) {
            *c *= s;
        }
        self.transform(&mut data, &self.inv_x, &self.inv_y);
        let norm = 1.0 / self.cells() as f64;
        let mut phi: Vec<f64> = data.iter().map(|c| c.re * norm).collect();
        let drift = phi.iter().sum::<f64>() * norm;
        phi.iter_mut().for_each(|p| *p -= drift);
        phi
    }

    /// `E_d = −(φ_{+e_d} − φ_{−e_d}) / (2Δ_d)`.
    pub fn field(&self, phi: &[f64]) -> Vec<Vec<f64>> {
        let (nx, ny) = (self.nx, self.ny);
        let mut ex = vec![0.0; nx * ny];
        for j in 0..ny {
            let row = &phi[j * nx..(j + 1) * nx];
            for i in 0..nx {
                ex[j * nx + i] = -(row[(i + 1) % nx] - row[(i + nx - 1) % nx]) / (2.0 * self.dx);
            }
        }
        if ny == 1 {
            return vec![ex];
        }
        let mut ey = vec![0.0; nx * ny];
        for j in 0..ny {
            let (up, down) = (((j + 1) % ny) * nx, ((j + ny - 1) % ny) * nx);
            for i in 0..nx {
                ey[j * nx + i] = -(phi[up + i] - phi[down + i]) / (2.0 * self.dy);
            }
        }
        vec![ex, ey]
    }

    pub fn solve_field(&self, rho: &[f64], rho0: f64) -> FieldState {
        let phi = self.solve(rho, rho0);
        let e = self.field(&phi);
        FieldState { phi, e }
    }
}

/// One-shot 1D Poisson solve.
pub fn solve_poisson(rho: &[f64], rho0: f64, dx: f64) -> Result<Vec<f64>> {
    Ok(PoissonSolver::new_1d(rho.len(), dx)?.solve(rho, rho0))
}

/// One-shot 1D field evaluation.
pub fn electric_field(phi: &[f64], dx: f64) -> Result<Vec<f64>> {
    let mut e = PoissonSolver::new_1d(phi.len(), dx)?.field(phi);
    Ok(e.remove(0))
}
