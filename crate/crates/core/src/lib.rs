//! Bound states of a one-dimensional Dirac particle in short-range potential pairs (V, U).
//!
//! Three independent routes to the ground-state energy are provided and meant to be
//! cross-checked against each other:
//!
//! * [`perturbation`]: the fourth-order weak-coupling series built from the potential
//!   functionals in [`functionals`],
//! * [`resummation`]: Padé approximants of that series, valid for deep wells,
//! * [`dirac_solver`]: a shooting solver for the two-component Dirac system, with the
//!   non-relativistic counterpart in [`nr_solver`].
//!
//! Natural units (ħ = c = 1) are used throughout; energies carry the units of the mass `m`.

pub mod dirac_solver;
pub mod error;
pub mod functionals;
pub mod nr_solver;
pub mod ode;
pub mod perturbation;
pub mod potentials;
pub mod quadrature;
pub mod resummation;
pub mod series;
mod shooting;

pub use dirac_solver::{
    fit_decay, reconstruct_spinor, scan_gamma, solve_dirac_ground, BoundStateSolution, GammaRow,
    SolverConfig,
};
pub use error::{Error, Result};
pub use functionals::{FunctionalSet, FunctionalValue, QuadratureSettings};
pub use nr_solver::{solve_schrodinger_ground, NrSolution};
pub use perturbation::{
    delta_coefficients, energy_2d_pt2, energy_series_1d, eval_pt4, DeltaCoefficients,
    EnergyEstimate, EnergySeries, Method,
};
pub use potentials::{Atom, Component, Family, ModelParams, PotentialSpec, Profile};
pub use resummation::{
    decay_constant_model, gaussian_region, gaussian_region_boundary, pade_nonrelativistic,
    pade_relativistic, pole_free_condition, NrOrder, PadeKind, PadeModel,
};
