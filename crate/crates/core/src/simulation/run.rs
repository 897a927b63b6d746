use std::fmt;
use std::time::Instant;

use crate::diagnostics::{electric_energy, total_energy, total_energy_reduced, total_mass, total_momentum};
use crate::error::{Error, Result};
use crate::field::{FieldState, PoissonSolver};
use crate::filter::{apply_filter_in_place, FilterKind};
use crate::solver::{acceleration_step, Grid, HmeSolver};

use super::config::{Preset, SimConfig};
use super::presets::initial_grid;
use super::record::{RunRecord, Spectrum, TimeSeries};

/// Background density.
pub const RHO0: f64 = 1.0;

/// A run in progress: grid, field and clock.
#[derive(Debug)]
pub struct Simulation {
    pub config: SimConfig,
    pub grid: Grid,
    pub field: FieldState,
    pub time: f64,
    pub steps: usize,
    solver: HmeSolver,
    poisson: Option<PoissonSolver>,
}

impl Simulation {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let grid = initial_grid(config)?;
        Self::from_grid(config, grid)
    }

    /// Start from an arbitrary grid; the field is solved from its density.
    pub fn from_grid(config: &SimConfig, grid: Grid) -> Result<Self> {
        let solver = HmeSolver::new(grid.set().clone(), config.flux)?;
        let poisson = match config.preset {
            Preset::FreeStream => None,
            _ => Some(PoissonSolver::new(grid.nx, grid.ny, grid.dx, grid.dy)?),
        };
        let field = match &poisson {
            Some(p) => p.solve_field(&grid.densities(), RHO0),
            None => FieldState::zeros(grid.len(), grid.dim()),
        };
        Ok(Simulation {
            config: config.clone(),
            grid,
            field,
            time: 0.0,
            steps: 0,
            solver,
            poisson,
        })
    }

    pub fn solver(&self) -> &HmeSolver {
        &self.solver
    }

    /// Advance one step of at most `t_end − t`: convection, field solve on the
    /// new density, acceleration, filtering. Returns the step length.
    pub fn step(&mut self) -> Result<f64> {
        let mut dt = self.solver.cfl_timestep(&self.grid, self.config.cfl);
        let remaining = self.config.t_end - self.time;
        let last = dt >= remaining;
        if last {
            dt = remaining;
        }
        let mut grid = self.solver.convection_step(&self.grid, dt)?;
        if let Some(p) = &self.poisson {
            self.field = p.solve_field(&grid.densities(), RHO0);
            acceleration_step(&mut grid, &self.field.e, dt);
        }
        if self.config.filter.kind != FilterKind::None {
            let factors = self.config.filter.factors(grid.order(), dt);
            for cell in &mut grid.cells {
                apply_filter_in_place(cell, &factors);
            }
        }
        self.grid = grid;
        self.steps += 1;
        self.time = if last { self.config.t_end } else { self.time + dt };
        Ok(dt)
    }

    pub fn finished(&self) -> bool {
        self.time >= self.config.t_end
    }

    pub fn electric_energy(&self) -> f64 {
        electric_energy(&self.field.e, self.grid.cell_volume())
    }

    /// Append the current diagnostics to `series`.
    pub fn sample(&self, series: &mut TimeSeries) {
        let p = total_momentum(&self.grid);
        series.t.push(self.time);
        series.e.push(self.electric_energy());
        series.mass.push(total_mass(&self.grid));
        series.momentum.push(p[0]);
        series.energy.push(total_energy(&self.grid, &self.field.e));
        if series.dim == 2 {
            series.momentum_y.push(p[1]);
            series.energy_reduced.push(total_energy_reduced(&self.grid, &self.field.e));
        }
    }
}

/// A run that stopped early; `partial` holds everything up to the failure.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: Error,
    pub partial: RunRecord,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {}

impl From<RunFailure> for Error {
    fn from(f: RunFailure) -> Self {
        f.error
    }
}

/// Run the configured preset to `t_end`.
pub fn run(config: &SimConfig) -> std::result::Result<RunRecord, RunFailure> {
    let sim = Simulation::new(config).map_err(|error| RunFailure {
        error,
        partial: RunRecord::default(),
    })?;
    run_simulation(sim)
}

/// Drive an existing simulation to its `t_end`, sampling as configured.
pub fn run_simulation(mut sim: Simulation) -> std::result::Result<RunRecord, RunFailure> {
    let started = Instant::now();
    let mut record = RunRecord {
        series: TimeSeries::new(sim.grid.dim()),
        ..Default::default()
    };
    let mut pending: Vec<f64> = sim.config.spectrum_times.clone();
    pending.sort_by(f64::total_cmp);
    pending.reverse();
    sim.sample(&mut record.series);
    take_spectra(&sim, &mut pending, &mut record);

    while !sim.finished() {
        if let Err(source) = sim.step() {
            record.steps = sim.steps;
            record.final_time = sim.time;
            record.wall_seconds = started.elapsed().as_secs_f64();
            return Err(RunFailure {
                error: Error::Aborted {
                    step: sim.steps + 1,
                    time: sim.time,
                    source: Box::new(source),
                },
                partial: record,
            });
        }
        if sim.steps % sim.config.sample_every == 0 || sim.finished() {
            sim.sample(&mut record.series);
        }
        take_spectra(&sim, &mut pending, &mut record);
    }
    record.steps = sim.steps;
    record.final_time = sim.time;
    record.wall_seconds = started.elapsed().as_secs_f64();
    Ok(record)
}

fn take_spectra(sim: &Simulation, pending: &mut Vec<f64>, record: &mut RunRecord) {
    let mut taken = false;
    while pending.last().is_some_and(|&t| t <= sim.time) {
        pending.pop();
        taken = true;
    }
    if taken {
        record.spectra.push(Spectrum::of_grid(&sim.grid, sim.time));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::thermal_momentum;

    fn small(preset: Preset) -> SimConfig {
        SimConfig {
            m: 8,
            nx: 32,
            ny: if preset.dim() == 2 { 8 } else { 1 },
            t_end: 1.0,
            ..SimConfig::preset(preset)
        }
    }

    #[test]
    fn zero_end_time_records_initial_state() {
        let c = SimConfig {
            t_end: 0.0,
            ..small(Preset::Landau1d)
        };
        let r = run(&c).unwrap();
        assert_eq!(r.series.len(), 1);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn uniform_state_is_a_fixed_point() {
        let c = SimConfig {
            amplitude: 0.0,
            ..small(Preset::Landau1d)
        };
        let mut sim = Simulation::new(&c).unwrap();
        let before = sim.grid.clone();
        sim.step().unwrap();
        for (a, b) in sim.grid.cells.iter().zip(&before.cells) {
            assert!((a.rho() - b.rho()).abs() < 1e-15 && a.u[0].abs() < 1e-15);
        }
        assert_eq!(sim.electric_energy(), 0.0);
    }

    #[test]
    fn run_lands_on_end_time_and_conserves() {
        for preset in [Preset::Landau1d, Preset::TwoStream, Preset::FreeStream, Preset::Landau2d] {
            let c = SimConfig {
                amplitude: 0.05,
                ..small(preset)
            };
            let r = run(&c).unwrap();
            let s = &r.series;
            assert_eq!(*s.t.last().unwrap(), 1.0);
            assert!(s.t.windows(2).all(|w| w[0] < w[1]));
            let mass = s.mass[0];
            assert!(TimeSeries::drift(&s.mass, mass) < 1e-12, "{preset}");
            let grid = initial_grid(&c).unwrap();
            let scale = thermal_momentum(&grid);
            assert!(TimeSeries::drift(&s.momentum, scale) < 1e-12, "{preset}");
            if preset.dim() == 2 {
                assert!(TimeSeries::drift(&s.momentum_y, scale) < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_stride_and_spectra() {
        let c = SimConfig {
            sample_every: 5,
            spectrum_times: vec![0.0, 0.5],
            ..small(Preset::Landau1d)
        };
        let r = run(&c).unwrap();
        assert_eq!(r.series.len(), 1 + r.steps / 5 + usize::from(r.steps % 5 != 0));
        assert_eq!(r.spectra.len(), 2);
        assert_eq!(r.spectra[0].t, 0.0);
        assert!(r.spectra[1].t >= 0.5);
    }

    #[test]
    fn filter_none_and_quasi_agree_initially() {
        let mut a = SimConfig {
            t_end: 0.3,
            ..small(Preset::Landau1d)
        };
        a.filter.kind = FilterKind::None;
        let mut b = a.clone();
        b.filter.kind = FilterKind::QuasiTimeConsistent;
        let ra = run(&a).unwrap();
        let rb = run(&b).unwrap();
        for (x, y) in ra.series.e.iter().zip(&rb.series.e) {
            assert!((x - y).abs() <= 1e-6 * x.abs());
        }
    }
}
