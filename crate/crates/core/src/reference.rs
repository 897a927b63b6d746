//! Oracles for free streaming and recurrence, and a discrete-velocity
//! Vlasov-Poisson solver that shares no code with the moment method
//! beyond the Poisson solve.

use std::f64::consts::PI;
use std::time::Instant;

use crate::diagnostics::electric_energy;
use crate::error::{Error, Result};
use crate::field::{FieldState, PoissonSolver};
use crate::hermite::HermiteTable;
use crate::simulation::{Preset, RunFailure, RunRecord, SimConfig, TimeSeries, RHO0};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// `1 + A cos(kx) e^{−k²t²/2}`.
pub fn exact_free_streaming_density(x: f64, t: f64, a: f64, k: f64) -> f64 {
    1.0 + a * (k * x).cos() * (-0.5 * k * k * t * t).exp()
}

/// Smallest `J` with `e^{−(JΔv)²/2} < 1e-16`.
pub fn dvm_half_width(dv: f64) -> usize {
    let vmax = (2.0 * 16.0 * std::f64::consts::LN_10).sqrt();
    (vmax / dv).floor() as usize + 1
}

/// Free-streaming density on the velocity grid `v_j = jΔv`, `|j| ≤ J`,
/// integrated by the rectangle rule.
pub fn dvm_density(x: f64, t: f64, a: f64, k: f64, dv: f64, j: usize) -> f64 {
    let j = j as i64;
    (-j..=j)
        .map(|i| {
            let v = i as f64 * dv;
            (1.0 + a * (k * (x - v * t)).cos()) * INV_SQRT_2PI * (-0.5 * v * v).exp() * dv
        })
        .sum()
}

/// Free-streaming density with the velocity integral replaced by
/// `(M+1)`-point Gauss-Hermite quadrature.
#[derive(Debug, Clone)]
pub struct HermiteCollocation {
    table: HermiteTable,
}

impl HermiteCollocation {
    pub fn new(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter("collocation order must be at least 1".into()));
        }
        Ok(HermiteCollocation {
            table: HermiteTable::new(m + 1)?,
        })
    }

    pub fn density(&self, x: f64, t: f64, a: f64, k: f64) -> f64 {
        self.table.expect(|v| 1.0 + a * (k * (x - v * t)).cos())
    }
}

pub fn hermite_collocation_density(x: f64, t: f64, a: f64, k: f64, m: usize) -> Result<f64> {
    Ok(HermiteCollocation::new(m)?.density(x, t, a, k))
}

/// Samples `f(x_i, v_j)` on a periodic `x` grid and the velocity grid
/// `v_j = jΔv`, `j = −J..J`. Storage is velocity-major: `f[jv·nx + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DvmState {
    pub nx: usize,
    pub dx: f64,
    pub dv: f64,
    pub half_width: usize,
    pub f: Vec<f64>,
}

impl DvmState {
    pub fn nv(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn velocity(&self, jv: usize) -> f64 {
        (jv as f64 - self.half_width as f64) * self.dv
    }

    pub fn v_max(&self) -> f64 {
        self.half_width as f64 * self.dv
    }

    pub fn densities(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.nx];
        for row in self.f.chunks(self.nx) {
            for (r, x) in rho.iter_mut().zip(row) {
                *r += x;
            }
        }
        rho.iter_mut().for_each(|r| *r *= self.dv);
        rho
    }

    fn velocity_moment(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.f
            .chunks(self.nx)
            .enumerate()
            .map(|(jv, row)| g(self.velocity(jv)) * row.iter().sum::<f64>())
            .sum::<f64>()
            * self.dx
            * self.dv
    }

    pub fn mass(&self) -> f64 {
        self.velocity_moment(|_| 1.0)
    }

    pub fn momentum(&self) -> f64 {
        self.velocity_moment(|v| v)
    }

    /// `∫∫ v² f dv dx`.
    pub fn kinetic_energy(&self) -> f64 {
        self.velocity_moment(|v| v * v)
    }

    /// First-order upwind `∂_t f + v ∂_x f = 0`, periodic.
    fn transport_x(&mut self, dt: f64) {
        let nx = self.nx;
        let mut old = vec![0.0; nx];
        for jv in 0..self.nv() {
            let nu = self.velocity(jv) * dt / self.dx;
            let row = &mut self.f[jv * nx..(jv + 1) * nx];
            old.copy_from_slice(row);
            if nu >= 0.0 {
                for i in 0..nx {
                    row[i] -= nu * (old[i] - old[(i + nx - 1) % nx]);
                }
            } else {
                for i in 0..nx {
                    row[i] -= nu * (old[(i + 1) % nx] - old[i]);
                }
            }
        }
    }

    /// First-order upwind `∂_t f + E ∂_v f = 0`, zero inflow at `±v_max`.
    fn accelerate(&mut self, e: &[f64], dt: f64) -> Result<()> {
        let courant = e.iter().fold(0.0f64, |m, x| m.max(x.abs())) * dt / self.dv;
        if courant > 1.0 {
            return Err(Error::VelocityCfl(courant));
        }
        let (nx, nv) = (self.nx, self.nv());
        let mut col = vec![0.0; nv];
        for (i, &ei) in e.iter().enumerate() {
            let nu = ei * dt / self.dv;
            for (jv, c) in col.iter_mut().enumerate() {
                *c = self.f[jv * nx + i];
            }
            for jv in 0..nv {
                let diff = if nu >= 0.0 {
                    col[jv] - if jv > 0 { col[jv - 1] } else { 0.0 }
                } else {
                    (if jv + 1 < nv { col[jv + 1] } else { 0.0 }) - col[jv]
                };
                self.f[jv * nx + i] = col[jv] - nu * diff;
            }
        }
        Ok(())
    }
}

/// Initial `f = ρ(x) g(v)` for a one-dimensional preset, with `ρ` at cell
/// centres and `g` the preset's velocity profile.
pub fn initial_dvm_state(config: &SimConfig) -> Result<DvmState> {
    if config.preset.dim() != 1 {
        return Err(Error::InvalidParameter(format!(
            "discrete-velocity reference is one-dimensional, got preset {}",
            config.preset
        )));
    }
    if !(config.dvm_dv > 0.0) {
        return Err(Error::InvalidParameter(format!("dvm_dv must be positive, got {}", config.dvm_dv)));
    }
    let vmax = config.dvm_velocity_limit();
    let half_width = (vmax / config.dvm_dv).ceil() as usize;
    let (length, _) = config.lengths();
    let nx = config.nx;
    let dx = length / nx as f64;
    let profile = |v: f64| -> f64 {
        match config.preset {
            Preset::TwoStream => {
                let s = config.uth0;
                let g = |c: f64| (-0.5 * (v - c) * (v - c) / (s * s)).exp() * INV_SQRT_2PI / s;
                0.5 * (g(-config.u0) + g(config.u0))
            }
            _ => INV_SQRT_2PI * (-0.5 * v * v).exp(),
        }
    };
    let mut state = DvmState {
        nx,
        dx,
        dv: config.dvm_dv,
        half_width,
        f: Vec::with_capacity(nx * (2 * half_width + 1)),
    };
    for jv in 0..state.nv() {
        let g = profile(state.velocity(jv));
        for i in 0..nx {
            let x = (i as f64 + 0.5) * dx;
            state.f.push((1.0 + config.amplitude * (config.kx * x).cos()) * g);
        }
    }
    Ok(state)
}

/// Discrete-velocity run of a one-dimensional preset: upwind transport in
/// `x`, field solve on the new density, upwind acceleration in `v`, with
/// `Δt = CFL·Δx/v_max`. Writes the same series schema as the moment method.
pub fn dvm_vlasov_run(config: &SimConfig) -> std::result::Result<RunRecord, RunFailure> {
    let fail = |error: Error, partial: RunRecord| RunFailure { error, partial };
    let started = Instant::now();
    config.validate().map_err(|e| fail(e.into(), RunRecord::default()))?;
    let mut state = initial_dvm_state(config).map_err(|e| fail(e, RunRecord::default()))?;
    let poisson = match config.preset {
        Preset::FreeStream => None,
        _ => Some(PoissonSolver::new_1d(state.nx, state.dx).map_err(|e| fail(e, RunRecord::default()))?),
    };
    let solve = |state: &DvmState| match &poisson {
        Some(p) => p.solve_field(&state.densities(), RHO0),
        None => FieldState::zeros(state.nx, 1),
    };
    let mut field = solve(&state);
    let mut record = RunRecord {
        series: TimeSeries::new(1),
        ..Default::default()
    };
    let sample = |series: &mut TimeSeries, state: &DvmState, e: &[f64], t: f64| {
        series.t.push(t);
        series.e.push(electric_energy(&[e.to_vec()], state.dx));
        series.mass.push(state.mass());
        series.momentum.push(state.momentum());
        let field_energy: f64 = e.iter().map(|x| x * x).sum::<f64>() * state.dx;
        series.energy.push(field_energy + state.kinetic_energy());
    };
    sample(&mut record.series, &state, &field.e[0], 0.0);

    let dt_max = config.cfl * state.dx / state.v_max();
    let (mut t, mut steps) = (0.0, 0usize);
    while t < config.t_end {
        let remaining = config.t_end - t;
        let last = dt_max >= remaining;
        let dt = if last { remaining } else { dt_max };
        state.transport_x(dt);
        if poisson.is_some() {
            field = solve(&state);
            if let Err(source) = state.accelerate(&field.e[0], dt) {
                record.steps = steps;
                record.final_time = t;
                record.wall_seconds = started.elapsed().as_secs_f64();
                let error = Error::Aborted {
                    step: steps + 1,
                    time: t,
                    source: Box::new(source),
                };
                return Err(fail(error, record));
            }
        }
        steps += 1;
        t = if last { config.t_end } else { t + dt };
        if steps % config.sample_every == 0 || last {
            sample(&mut record.series, &state, &field.e[0], t);
        }
    }
    record.steps = steps;
    record.final_time = t;
    record.wall_seconds = started.elapsed().as_secs_f64();
    Ok(record)
}

/// Recurrence period `2π/(kΔv)` of the discrete-velocity density.
pub fn dvm_period(k: f64, dv: f64) -> f64 {
    2.0 * PI / (k * dv)
}
