//! Pseudospectral solver and variational toolkit for the fractional
//! logarithmic Schrödinger equation
//!
//! `i∂ₜu − (−Δ)^s u + u Log|u|² = 0`
//!
//! on a periodic torus in one or two dimensions.
//!
//! Everything is generic over the scalar type through [`Real`] (`f32` or
//! `f64`); the `*64` aliases at the crate root fix `f64`, which is what the
//! stated tolerances assume.

pub mod error;
pub mod evolution;
pub mod functionals;
pub mod grid;
pub mod ground_state;
pub mod io;
pub mod lognl;
pub mod orlicz;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use evolution::{
    evolve, evolve_with, linear_substep, nonlinear_substep, strang_step, ConservationReport,
    EvolveConfig, Snapshot,
};
pub use functionals::{
    action_gradient, action_nehari, d_lower_bound, energy, energy_m, energy_m_gradient,
    log_sobolev_gap, nehari_rescale, FunctionalReport, Parts,
};
pub use grid::{
    frac_laplacian, make_grid, sobolev_norms, transform_roundtrip, Field, Grid, SobolevNorms,
    SpectralField,
};
pub use ground_state::{
    gausson_reference, solve_ground_state, stationary_residual, GroundStateInit,
    GroundStateParams, GroundStateResult,
};
pub use io::{load_field, read_field, save_field, write_field, FieldFile};
pub use lognl::{log_term, RegularizedNonlinearity};
pub use orlicz::{luxemburg_norm, orlicz_modular, ws_norm, LuxemburgResult};
pub use scalar::Real;
pub use stability::{
    modded_distance, perturb, stability_experiment, stability_run, StabilityReport,
};

pub use num_complex::Complex;

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type SpectralField64 = SpectralField<f64>;
pub type Nonlinearity64 = RegularizedNonlinearity<f64>;
pub type FunctionalReport64 = FunctionalReport<f64>;
pub type EvolveConfig64 = EvolveConfig<f64>;
pub type ConservationReport64 = ConservationReport<f64>;
pub type GroundStateParams64 = GroundStateParams<f64>;
pub type GroundStateResult64 = GroundStateResult<f64>;
pub type StabilityReport64 = StabilityReport<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
pub type EvolveConfig32 = EvolveConfig<f32>;
