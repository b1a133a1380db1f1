//! Finite-volume solver for the one-fluid Euler-Poisson system with
//! penalized IMEX Runge-Kutta time integration.
//!
//! The electron fluid (density `rho`, momentum `q = rho u`) couples to an
//! electrostatic potential through `lambda^2 lap(phi) = rho - 1`, where
//! `lambda` is the scaled Debye length. For `lambda -> 0` the model
//! degenerates to incompressible Euler with `-phi` acting as the pressure;
//! the integrators here stay stable uniformly in `lambda` and fall back to a
//! consistent discretization of that limit, thanks to a penalization of the
//! momentum equation and a closed-form density projection at every stage.
//!
//! Modules follow the pipeline: [`mesh`] (grids, stencils), [`tableaux`]
//! (IMEX pairs), [`physics`] (state, fluxes), [`spatial`] (reconstruction,
//! Rusanov flux, CFL), [`poisson`] (elliptic solves), [`integrator`] (time
//! steppers and the run driver), [`diagnostics`] (norms, blow-up detection,
//! convergence orders) and [`scenarios`] (the experiment catalogue).
//!
//! Everything is generic over the floating-point type through
//! [`scalar::Scalar`]; the aliases below fix `f64`, the precision used by
//! the command-line driver.

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod mesh;
pub mod physics;
pub mod poisson;
pub mod scalar;
pub mod scenarios;
pub mod spatial;
pub mod tableaux;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` aliases for the main types.
pub type Mesh64 = mesh::Mesh<f64>;
pub type Field64 = mesh::ScalarField<f64>;
pub type VectorField64 = mesh::VectorField<f64>;
pub type State64 = physics::PlasmaState<f64>;
pub type Eos64 = physics::EosParams<f64>;
pub type Tableau64 = tableaux::DoubleButcherTableau<f64>;
pub type Scheme64 = integrator::SchemeKind<f64>;
pub type RunConfig64 = integrator::RunConfig<f64>;
pub type RunReport64 = integrator::RunReport<f64>;
pub type Scenario64 = scenarios::Scenario<f64>;
pub type ApMetrics64 = diagnostics::ApMetrics<f64>;
