//! Error type shared by every module of the solver.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A stencil or flux was asked for a direction the mesh does not have.
    #[error("direction {m} out of range for a {dim}-dimensional mesh")]
    DirectionOutOfRange { m: usize, dim: usize },

    /// Fields from different meshes were combined.
    #[error("mesh mismatch: {0}")]
    MeshMismatch(&'static str),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// Density at or below the positivity floor; the state is no longer admissible.
    #[error("non-positive density {value:e} at cell {cell} ({context})")]
    NonPositiveDensity {
        cell: usize,
        value: f64,
        context: &'static str,
    },

    /// A field produced a NaN or infinity.
    #[error("non-finite value in {field} ({context})")]
    NonFinite {
        field: &'static str,
        context: &'static str,
    },

    /// Periodic Poisson problem whose right-hand side is not mean-free.
    #[error("periodic Poisson problem is not solvable: |mean(rhs)| = {mean:e} exceeds tolerance {tol:e}")]
    PoissonSolvability { mean: f64, tol: f64 },

    /// Iterative elliptic solve did not reach the requested residual.
    #[error("Poisson solve did not converge: relative residual {residual:e} after {iterations} iterations (tol {tol:e})")]
    PoissonConvergence {
        residual: f64,
        iterations: usize,
        tol: f64,
    },

    #[error("unknown tableau '{0}'")]
    UnknownTableau(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    /// A time step lost admissibility or produced non-finite fields.
    /// `stage` is the one-based Runge-Kutta stage that failed.
    #[error("instability at t = {time:e}, stage {stage}: {cause}")]
    Instability {
        time: f64,
        stage: usize,
        cause: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
