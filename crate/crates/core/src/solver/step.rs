use crate::error::{Error, Result};
use crate::moments::{enforce_constraints, rebase_coeffs};

use super::flux::{FluxWork, HmeSolver};
use super::grid::Grid;

impl HmeSolver {
    /// `Δt = CFL·min_d Δx_d / max_j(|u_j| + C_0^{M+1} u_th,j)`.
    pub fn cfl_timestep(&self, grid: &Grid, cfl: f64) -> f64 {
        let lambda = grid
            .cells
            .iter()
            .map(|c| {
                let speed = c.velocity().iter().map(|u| u * u).sum::<f64>().sqrt();
                speed + self.max_zero() * c.uth
            })
            .fold(0.0, f64::max);
        let h = if grid.dim() == 2 { grid.dx.min(grid.dy) } else { grid.dx };
        cfl * h / lambda
    }

    /// Increments of the top-order coefficients of cell `index` from the
    /// regularisation term, summed over transport directions.
    pub fn regularization_correction(&self, grid: &Grid, dt: f64, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.set().len()];
        self.add_regularization(grid, dt, index, &mut out);
        out
    }

    fn add_regularization(&self, grid: &Grid, dt: f64, index: usize, out: &mut [f64]) {
        let set = &**self.set();
        let dim = set.dim();
        let m = set.order();
        let cell = &grid.cells[index];
        let f = &cell.coeffs;
        let top = set.prefix_len(m - 1)..set.len();
        for t in 0..dim {
            let next = &grid.cells[grid.neighbour(index, t, true)];
            let prev = &grid.cells[grid.neighbour(index, t, false)];
            let dth = cell.uth * (next.uth - prev.uth);
            let du: Vec<f64> = (0..dim).map(|d| next.u[d] - prev.u[d]).collect();
            if dth == 0.0 && du.iter().all(|&x| x == 0.0) {
                continue;
            }
            let scale = -dt / (2.0 * grid.spacing(t));
            for i in top.clone() {
                let alpha = set.alpha(i);
                let mut acc = 0.0;
                for d in 0..dim {
                    // α − e_d + e_t and α − 2e_d + e_t; out-of-range terms vanish.
                    let mut a = [0i64; 2];
                    for k in 0..dim {
                        a[k] = alpha[k] as i64;
                    }
                    a[d] -= 1;
                    a[t] += 1;
                    if let Some(p) = index_of(set, &a[..dim]) {
                        acc += f[p] * du[d];
                    }
                    a[d] -= 1;
                    if let Some(p) = index_of(set, &a[..dim]) {
                        acc += f[p] * dth;
                    }
                }
                out[i] += scale * (alpha[t] + 1) as f64 * acc;
            }
        }
    }

    /// One forward-Euler finite-volume step of the moment system, followed by
    /// constraint enforcement in every cell.
    pub fn convection_step(&self, grid: &Grid, dt: f64) -> Result<Grid> {
        let set = &**self.set();
        let len = set.len();
        let dim = grid.dim();
        let mut work = FluxWork::default();
        // fluxes[d][i]: flux through the forward face of cell i along d, in
        // cell i's basis.
        let mut fluxes = vec![vec![0.0; len * grid.len()]; dim];
        for (d, faces) in fluxes.iter_mut().enumerate() {
            for i in 0..grid.len() {
                let right = &grid.cells[grid.neighbour(i, d, true)];
                self.flux_into(
                    self.scheme(),
                    &grid.cells[i],
                    right,
                    d,
                    &mut work,
                    &mut faces[i * len..(i + 1) * len],
                )?;
            }
        }

        let mut cells = Vec::with_capacity(grid.len());
        let mut update = vec![0.0; len];
        for i in 0..grid.len() {
            let cell = &grid.cells[i];
            update.copy_from_slice(&cell.coeffs);
            for (d, faces) in fluxes.iter().enumerate() {
                let prev = grid.neighbour(i, d, false);
                let p = &grid.cells[prev];
                let inflow = rebase_coeffs(
                    set,
                    &faces[prev * len..(prev + 1) * len],
                    p.velocity(),
                    p.uth,
                    cell.velocity(),
                    cell.uth,
                );
                let outflow = &faces[i * len..(i + 1) * len];
                let r = dt / grid.spacing(d);
                for k in 0..len {
                    update[k] -= r * (outflow[k] - inflow[k]);
                }
            }
            self.add_regularization(grid, dt, i, &mut update);
            let mut next = cell.clone();
            next.coeffs.copy_from_slice(&update);
            let next = enforce_constraints(&next).map_err(|e| match e {
                Error::Realizability { rho, uth_sq, .. } => Error::Realizability {
                    cell: Some(i),
                    rho,
                    uth_sq,
                },
                other => other,
            })?;
            cells.push(next);
        }
        Ok(Grid {
            cells,
            ..grid.clone_shape()
        })
    }
}

fn index_of(set: &crate::multi_index::MultiIndexSet, alpha: &[i64]) -> Option<usize> {
    let mut a = [0usize; 2];
    for (k, &x) in alpha.iter().enumerate() {
        if x < 0 {
            return None;
        }
        a[k] = x as usize;
    }
    set.position(&a[..alpha.len()])
}

/// `u_{d,j} += Δt·E_{d,j}`; coefficients and `u_th` are unchanged.
pub fn acceleration_step(grid: &mut Grid, e: &[Vec<f64>], dt: f64) {
    for (d, comp) in e.iter().enumerate().take(grid.dim()) {
        for (cell, &ed) in grid.cells.iter_mut().zip(comp) {
            cell.u[d] += dt * ed;
        }
    }
}

impl Grid {
    /// Same mesh, no cells.
    pub(crate) fn clone_shape(&self) -> Grid {
        Grid {
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
            cells: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::moments::{raw_moments, MomentState};
    use crate::multi_index::MultiIndexSet;
    use crate::solver::FluxScheme;

    fn set1(m: usize) -> Arc<MultiIndexSet> {
        Arc::new(MultiIndexSet::new(1, m).unwrap())
    }

    fn wavy_grid(m: usize, n: usize) -> Grid {
        let set = set1(m);
        let (k, a) = (0.5, 0.3);
        let length = 2.0 * PI / k;
        let cells = (0..n)
            .map(|j| {
                let x = (j as f64 + 0.5) * length / n as f64;
                let mut c = MomentState::maxwellian(
                    set.clone(),
                    1.0 + a * (k * x).cos(),
                    &[0.2 * (k * x).sin()],
                    1.0 + 0.1 * (k * x).cos(),
                )
                .unwrap();
                c.coeffs[3] = 0.02 * (k * x).sin();
                c.coeffs[m] = 1e-5 * (2.0 * k * x).cos();
                c
            })
            .collect();
        Grid::new_1d(length, cells).unwrap()
    }

    fn totals(grid: &Grid) -> [f64; 3] {
        let mut t = [0.0; 3];
        for c in &grid.cells {
            let m = raw_moments(c, 2).unwrap();
            for p in 0..3 {
                t[p] += m[p] * grid.dx;
            }
        }
        t
    }

    #[test]
    fn cfl_examples() {
        let grid = Grid::uniform(set1(3), 10, 1, 1.0, 1.0, 1.0, &[0.0], 1.0).unwrap();
        let solver = HmeSolver::new(set1(3), FluxScheme::Hll).unwrap();
        // C_0^4 = √(3 + √6).
        let z = (3.0 + 6f64.sqrt()).sqrt();
        assert!((solver.cfl_timestep(&grid, 0.45) - 0.045 / z).abs() < 1e-15);
        let hot = Grid::uniform(set1(3), 10, 1, 1.0, 1.0, 1.0, &[0.0], 2.0).unwrap();
        assert!((solver.cfl_timestep(&hot, 0.45) - 0.5 * 0.045 / z).abs() < 1e-15);
    }

    #[test]
    fn uniform_grid_is_a_fixed_point() {
        for scheme in [FluxScheme::Hll, FluxScheme::Upwind] {
            let set = set1(6);
            let mut cell = MomentState::maxwellian(set.clone(), 1.2, &[0.3], 0.8).unwrap();
            cell.coeffs[4] = 0.01;
            let grid = Grid::new_1d(3.0, vec![cell.clone(); 12]).unwrap();
            let solver = HmeSolver::new(set, scheme).unwrap();
            let next = solver.convection_step(&grid, 0.01).unwrap();
            for c in &next.cells {
                assert!((c.u[0] - 0.3).abs() < 1e-15 && (c.uth - 0.8).abs() < 1e-15);
                for (a, b) in c.coeffs.iter().zip(&cell.coeffs) {
                    assert!((a - b).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn convection_conserves_mass_momentum_energy() {
        for scheme in [FluxScheme::Hll, FluxScheme::Upwind] {
            let mut grid = wavy_grid(8, 40);
            let solver = HmeSolver::new(grid.set().clone(), scheme).unwrap();
            let before = totals(&grid);
            for _ in 0..20 {
                let dt = solver.cfl_timestep(&grid, 0.45);
                grid = solver.convection_step(&grid, dt).unwrap();
                for c in &grid.cells {
                    assert!(c.constraint_defect() < 1e-14);
                }
            }
            let after = totals(&grid);
            for p in 0..3 {
                let scale = before[p].abs().max(before[0]);
                assert!((after[p] - before[p]).abs() < 1e-11 * scale, "{scheme} p={p}");
            }
        }
    }

    #[test]
    fn regularization_examples() {
        let m = 3;
        let set = set1(m);
        let mut cells: Vec<MomentState> = (0..5)
            .map(|j| MomentState::maxwellian(set.clone(), 1.0, &[0.1 * j as f64], 1.0).unwrap())
            .collect();
        cells[2].coeffs[3] = 0.2;
        cells[2].coeffs[2] = 0.7;
        let grid = Grid::new_1d(5.0, cells).unwrap();
        let solver = HmeSolver::new(set.clone(), FluxScheme::Hll).unwrap();
        let dt = 0.01;
        let k2 = solver.regularization_correction(&grid, dt, 2);
        let expect = -dt / 2.0 * 4.0 * 0.2 * (0.3 - 0.1);
        assert!((k2[3] - expect).abs() < 1e-16);
        assert_eq!(&k2[..3], &[0.0, 0.0, 0.0]);

        let uniform = Grid::uniform(set, 5, 1, 5.0, 1.0, 1.0, &[0.0], 1.0).unwrap();
        assert!(solver
            .regularization_correction(&uniform, dt, 1)
            .iter()
            .all(|&x| x == 0.0));
    }

    #[test]
    fn regularization_thermal_term() {
        let set = set1(4);
        let mut cells: Vec<MomentState> = (0..4)
            .map(|j| MomentState::maxwellian(set.clone(), 1.0, &[0.0], 1.0 + 0.1 * j as f64).unwrap())
            .collect();
        cells[1].coeffs[3] = 0.3;
        let grid = Grid::new_1d(4.0, cells).unwrap();
        let solver = HmeSolver::new(set, FluxScheme::Hll).unwrap();
        let k2 = solver.regularization_correction(&grid, 0.1, 1);
        let expect = -0.1 / 2.0 * 5.0 * 0.3 * 1.1 * (1.2 - 1.0);
        assert!((k2[4] - expect).abs() < 1e-15);
    }

    #[test]
    fn regularization_2d_touches_top_order_only() {
        let set = Arc::new(MultiIndexSet::new(2, 4).unwrap());
        let cells: Vec<MomentState> = (0..9)
            .map(|j| {
                let mut c = MomentState::maxwellian(set.clone(), 1.0, &[0.05 * j as f64, 0.02 * j as f64], 1.0 + 0.01 * j as f64).unwrap();
                for i in 6..set.len() {
                    c.coeffs[i] = 0.01 * i as f64;
                }
                c
            })
            .collect();
        let grid = Grid::new(3, 3, 3.0, 3.0, cells).unwrap();
        let solver = HmeSolver::new(set.clone(), FluxScheme::Hll).unwrap();
        let k2 = solver.regularization_correction(&grid, 0.1, 4);
        for (i, &x) in k2.iter().enumerate() {
            if set.degree(i) < 4 {
                assert_eq!(x, 0.0);
            }
        }
        assert!(k2.iter().any(|&x| x != 0.0));
    }

    #[test]
    fn acceleration_examples() {
        let set = set1(3);
        let mut grid = Grid::uniform(set, 4, 1, 4.0, 1.0, 1.0, &[0.0], 1.0).unwrap();
        let before = grid.clone();
        acceleration_step(&mut grid, &[vec![0.0; 4]], 0.1);
        assert_eq!(grid, before);
        acceleration_step(&mut grid, &[vec![1.0; 4]], 0.1);
        for c in &grid.cells {
            assert_eq!((c.u[0], c.uth, c.rho()), (0.1, 1.0, 1.0));
        }
    }

    /// With constant `(u, u_th)` the scheme is linear; each characteristic
    /// amplitude then obeys the scalar upwind recursion with its own speed.
    #[test]
    fn upwind_matches_scalar_advection_per_mode() {
        use crate::hermite::JacobiEigen;
        let m = 5;
        let n = 16;
        let set = set1(m);
        let (u, th) = (0.0, 1.0);
        let eig = JacobiEigen::new(m + 1).unwrap();
        let length = 1.0;
        let dx = length / n as f64;
        let k_mode = 4; // top-order eigenvector has a nonzero f_0 component
        let amp: Vec<f64> = (0..n).map(|j| 1e-7 * (2.0 * PI * j as f64 / n as f64).sin()).collect();
        let mut scale = vec![1.0];
        for a in 1..=m {
            scale.push(scale[a - 1] * (a as f64).sqrt() / th);
        }
        let cells: Vec<MomentState> = (0..n)
            .map(|j| {
                let mut c = MomentState::maxwellian(set.clone(), 1.0, &[u], th).unwrap();
                for a in 0..=m {
                    c.coeffs[a] += amp[j] * eig.vectors[a * (m + 1) + k_mode] / scale[a];
                }
                c
            })
            .collect();
        let grid = Grid::new_1d(length, cells).unwrap();
        let solver = HmeSolver::new(set, FluxScheme::Upwind).unwrap();
        let dt = 0.2 * dx;
        let next = solver.convection_step(&grid, dt).unwrap();
        let speed = u + th * eig.zeros[k_mode];
        let c = speed * dt / dx;
        // Linear prediction for the f_3 component (constraints untouched at first order).
        let a = 3;
        for j in 0..n {
            let up = if speed > 0.0 { (j + n - 1) % n } else { (j + 1) % n };
            let pred = amp[j] - c.abs() * (amp[j] - amp[up]);
            let got = next.cells[j].coeffs[a] * scale[a] / eig.vectors[a * (m + 1) + k_mode];
            assert!((got - pred).abs() < 1e-6 * 1e-7, "j={j}: {got} vs {pred}");
        }
    }
}
