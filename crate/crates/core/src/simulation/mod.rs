//! Experiment presets and the time loop: convection, field solve and
//! acceleration, then filtering, repeated until `t_end`.

mod config;
mod presets;
mod record;
mod run;

pub use config::{Preset, SimConfig, KEYS};
pub use presets::{
    init_landau_1d, init_landau_2d, init_two_stream, initial_grid, two_stream_moments, two_stream_profile,
};
pub use record::{RunRecord, Spectrum, TimeSeries};
pub use run::{run, run_simulation, RunFailure, Simulation, RHO0};
