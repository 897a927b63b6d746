//! Finite-volume discretisation of the moment system: interface fluxes,
//! the regularisation correction, convection/acceleration substeps and the
//! CFL step.

mod flux;
mod grid;
mod step;

pub use flux::{characteristic_speeds, velocity_flux_coeffs, FluxCoeffs, FluxScheme, HmeSolver};
pub use grid::Grid;
pub use step::acceleration_step;
