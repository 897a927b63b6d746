use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hermite::HermiteTable;
use crate::moments::{raw_moments, MomentState};
use crate::multi_index::MultiIndexSet;
use crate::solver::Grid;

use super::config::{Preset, SimConfig};

/// Initial grid for the configured preset.
pub fn initial_grid(config: &SimConfig) -> Result<Grid> {
    match config.preset {
        Preset::Landau1d | Preset::FreeStream => init_landau_1d(config),
        Preset::Landau2d => init_landau_2d(config),
        Preset::TwoStream => init_two_stream(config),
    }
}

/// `ρ = 1 + A cos(k x_j)` at cell centres, `u = 0`, `u_th = 1`.
pub fn init_landau_1d(config: &SimConfig) -> Result<Grid> {
    let set = Arc::new(MultiIndexSet::new(1, config.m)?);
    let (length, _) = config.lengths();
    let n = config.nx;
    let cells = (0..n)
        .map(|j| {
            let x = (j as f64 + 0.5) * length / n as f64;
            MomentState::maxwellian(set.clone(), 1.0 + config.amplitude * (config.kx * x).cos(), &[0.0], 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    Grid::new_1d(length, cells)
}

/// `ρ = 1 + A cos(k_x x) cos(k_y y)`, `u = 0`, `u_th = 1`.
pub fn init_landau_2d(config: &SimConfig) -> Result<Grid> {
    let set = Arc::new(MultiIndexSet::new(2, config.m)?);
    let (lx, ly) = config.lengths();
    let (nx, ny) = (config.nx, config.ny);
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = (j as f64 + 0.5) * ly / ny as f64;
        for i in 0..nx {
            let x = (i as f64 + 0.5) * lx / nx as f64;
            let rho = 1.0 + config.amplitude * (config.kx * x).cos() * (config.ky * y).cos();
            cells.push(MomentState::maxwellian(set.clone(), rho, &[0.0, 0.0], 1.0)?);
        }
    }
    Grid::new(nx, ny, lx, ly, cells)
}

/// Hermite coefficients about `(0, θ)`, `θ = √(u₀² + u_th,0²)`, of the unit
/// density mixture `½[N(−u₀, u_th,0²) + N(u₀, u_th,0²)]`:
/// `f_n = θⁿ/n! ∫ g(v) He_n(v/θ) dv` by `4(M+1)`-point Gauss-Hermite
/// quadrature of each Gaussian.
pub fn two_stream_profile(m: usize, u0: f64, uth0: f64) -> Result<Vec<f64>> {
    let theta = (u0 * u0 + uth0 * uth0).sqrt();
    let table = HermiteTable::new(4 * (m + 1))?;
    let mut coeffs = vec![0.0; m + 1];
    for (&z, &w) in table.zeros.iter().zip(&table.weights) {
        for centre in [-u0, u0] {
            let x = (centre + uth0 * z) / theta;
            // h_n = He_n/√(n!), and f_n = θⁿ/√(n!)·E[h_n].
            let (mut prev, mut cur) = (0.0, 1.0);
            for (n, c) in coeffs.iter_mut().enumerate() {
                *c += 0.5 * w * cur;
                let next = (x * cur - (n as f64).sqrt() * prev) / ((n + 1) as f64).sqrt();
                prev = cur;
                cur = next;
            }
        }
    }
    let mut scale = 1.0;
    for (n, c) in coeffs.iter_mut().enumerate() {
        if n > 0 {
            scale *= theta / (n as f64).sqrt();
        }
        *c *= scale;
    }
    Ok(coeffs)
}

/// Raw moments `m_0..m_4` of the unit mixture.
pub fn two_stream_moments(u0: f64, uth0: f64) -> [f64; 5] {
    let (a2, s2) = (u0 * u0, uth0 * uth0);
    [1.0, 0.0, a2 + s2, 0.0, a2 * a2 + 6.0 * a2 * s2 + 3.0 * s2 * s2]
}

/// `ρ = 1 + ε cos(kx)` times the projected two-Maxwellian profile.
pub fn init_two_stream(config: &SimConfig) -> Result<Grid> {
    let m = config.m;
    let set = Arc::new(MultiIndexSet::new(1, m)?);
    let theta = config.thermal_speed();
    let profile = two_stream_profile(m, config.u0, config.uth0)?;

    let unit = MomentState::from_parts(set.clone(), &[0.0], theta, profile.clone())?;
    let top = m.min(4);
    let got = raw_moments(&unit, top)?;
    let expect = two_stream_moments(config.u0, config.uth0);
    for k in 0..=top {
        if (got[k] - expect[k]).abs() > 1e-10 * expect[k].abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "two-stream projection residual: m_{k} = {} but the mixture has {}",
                got[k], expect[k]
            )));
        }
    }

    let (length, _) = config.lengths();
    let n = config.nx;
    let cells = (0..n)
        .map(|j| {
            let x = (j as f64 + 0.5) * length / n as f64;
            let rho = 1.0 + config.amplitude * (config.kx * x).cos();
            let coeffs = profile.iter().map(|c| rho * c).collect();
            MomentState::from_parts(set.clone(), &[0.0], theta, coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    Grid::new_1d(length, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::hermite_eval;
    use crate::moments::rebase_coeffs;

    #[test]
    fn landau_examples() {
        let mut c = SimConfig::preset(Preset::Landau1d);
        c.amplitude = 0.0;
        c.nx = 16;
        let g = init_landau_1d(&c).unwrap();
        assert!(g.cells.iter().all(|s| s.rho() == 1.0 && s.coeffs[1..].iter().all(|&x| x == 0.0)));

        let c = SimConfig {
            nx: 64,
            ..SimConfig::preset(Preset::Landau1d)
        };
        let g = init_landau_1d(&c).unwrap();
        let (lo, hi) = g.cells.iter().fold((2.0f64, 0.0f64), |(a, b), s| (a.min(s.rho()), b.max(s.rho())));
        assert!(lo >= 0.999 && hi <= 1.001);
        let mass: f64 = g.densities().iter().sum::<f64>() * g.dx;
        assert!((mass - 2.0 * std::f64::consts::PI / 0.3).abs() < 1e-12);
    }

    #[test]
    fn landau_2d_mass() {
        let c = SimConfig {
            m: 5,
            nx: 8,
            ny: 8,
            ..SimConfig::preset(Preset::Landau2d)
        };
        let g = init_landau_2d(&c).unwrap();
        let (lx, ly) = c.lengths();
        let mass: f64 = g.densities().iter().sum::<f64>() * g.cell_volume();
        assert!((mass - lx * ly).abs() < 1e-10);
    }

    #[test]
    fn single_maxwellian_limit() {
        let p = two_stream_profile(10, 0.0, 1.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-14);
        assert!(p[1..].iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn projection_matches_closed_form() {
        // Rebasing each Maxwellian component onto (0, θ) gives
        // f_n = ½(1 + (−1)ⁿ) u₀ⁿ He_n(1)/n!.
        let (m, u0, uth0) = (60, 1.0, 0.5);
        let p = two_stream_profile(m, u0, uth0).unwrap();
        let theta = (u0 * u0 + uth0 * uth0).sqrt();
        let set = MultiIndexSet::new(1, m).unwrap();
        let mut single = vec![0.0; m + 1];
        single[0] = 0.5;
        let plus = rebase_coeffs(&set, &single, &[u0], uth0, &[0.0], theta);
        let minus = rebase_coeffs(&set, &single, &[-u0], uth0, &[0.0], theta);
        let mut fact = 1.0;
        for n in 0..=m {
            if n > 0 {
                fact *= n as f64;
            }
            let closed = if n % 2 == 0 { u0.powi(n as i32) * hermite_eval(n, 1.0) / fact } else { 0.0 };
            let via_rebase = plus[n] + minus[n];
            let scale = theta.powi(n as i32) / fact.sqrt();
            assert!((p[n] - closed).abs() < 1e-13 * scale, "n={n}: {} vs {closed}", p[n]);
            assert!((via_rebase - closed).abs() < 1e-13 * scale);
        }
    }

    #[test]
    fn two_stream_moments_match_mixture() {
        let c = SimConfig {
            nx: 32,
            ..SimConfig::preset(Preset::TwoStream)
        };
        let g = init_two_stream(&c).unwrap();
        let unit = MomentState::from_parts(g.set().clone(), &[0.0], c.thermal_speed(), two_stream_profile(60, 1.0, 0.5).unwrap()).unwrap();
        let m = raw_moments(&unit, 4).unwrap();
        assert!((m[2] / m[0] - 1.25).abs() < 1e-12);
        assert!((m[4] / m[0] - 2.6875).abs() < 1e-12);
        for s in &g.cells {
            assert!(s.constraint_defect() < 1e-14);
        }
    }
}
