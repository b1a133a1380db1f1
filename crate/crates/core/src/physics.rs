//! Continuous-model quantities of the Euler-Poisson system: the discrete
//! state, isentropic pressure, flux tensor, velocities and interface wave
//! speeds.
//!
//! The model carries density `rho` (ion background normalised to 1), momentum
//! `q = rho u`, an electric potential `phi` and the scaled Debye length
//! `lambda` that multiplies the Laplacian in the Poisson closure
//! `lambda^2 lap(phi) = rho - 1`.

use crate::error::{Error, Result};
use crate::mesh::{central_divergence, mean, Mesh, ScalarField, VectorField};
use crate::scalar::Scalar;
use std::sync::Arc;

/// Positivity floor for the density. Values at or below it are treated as a
/// loss of admissibility (an instability to report), never clipped.
pub const RHO_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams<T> {
    /// Isentropic exponent in `p(rho) = rho^gamma`, at least 1.
    pub gamma: T,
}

impl<T: Scalar> EosParams<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if gamma >= T::one() {
            Ok(EosParams { gamma })
        } else {
            Err(Error::config(format!(
                "isentropic exponent must be >= 1, got {gamma}"
            )))
        }
    }

    #[inline]
    pub fn pressure_at(&self, rho: T) -> T {
        if self.gamma == T::of(2.0) {
            rho * rho
        } else if self.gamma == T::one() {
            rho
        } else {
            rho.powf(self.gamma)
        }
    }
}

/// The full discrete unknown of the system.
#[derive(Debug, Clone)]
pub struct PlasmaState<T> {
    pub rho: ScalarField<T>,
    pub q: VectorField<T>,
    pub phi: ScalarField<T>,
    /// Scaled Debye length, `>= 0`. Zero selects the quasi-neutral limit
    /// dynamics.
    pub lambda: T,
    pub time: T,
}

impl<T: Scalar> PlasmaState<T> {
    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        self.rho.mesh()
    }

    /// Density admissibility: strictly above the positivity floor everywhere.
    pub fn check_admissible(&self, context: &'static str) -> Result<()> {
        check_positive(&self.rho, context)
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        self.rho.check_finite("rho", context)?;
        for (m, c) in self.q.components().iter().enumerate() {
            c.check_finite(if m == 0 { "q1" } else { "q2" }, context)?;
        }
        self.phi.check_finite("phi", context)
    }

    /// Total mass, `sum(rho) * cell volume`.
    pub fn mass(&self) -> T {
        self.rho.sum() * self.mesh().cell_volume()
    }
}

pub fn check_positive<T: Scalar>(rho: &ScalarField<T>, context: &'static str) -> Result<()> {
    let floor = T::of(RHO_MIN);
    for (cell, &v) in rho.values().iter().enumerate() {
        if !(v > floor) {
            return Err(Error::NonPositiveDensity {
                cell,
                value: v.to_f64().unwrap_or(f64::NAN),
                context,
            });
        }
    }
    Ok(())
}

/// Pointwise isentropic pressure `rho^gamma`.
pub fn pressure<T: Scalar>(rho: &ScalarField<T>, eos: &EosParams<T>) -> Result<ScalarField<T>> {
    check_positive(rho, "pressure")?;
    Ok(rho.map(|r| eos.pressure_at(r)))
}

/// Pointwise velocity `u = q / rho`.
pub fn velocity<T: Scalar>(state: &PlasmaState<T>) -> Result<VectorField<T>> {
    check_positive(&state.rho, "velocity")?;
    Ok(VectorField::from_components(
        state
            .q
            .components()
            .iter()
            .map(|qm| qm.zip_with(&state.rho, |q, r| q / r))
            .collect(),
    ))
}

/// Momentum flux tensor `F[m][n] = q_m q_n / rho + p(rho) delta_mn`,
/// materialised cellwise.
pub fn flux_tensor<T: Scalar>(
    state: &PlasmaState<T>,
    eos: &EosParams<T>,
) -> Result<Vec<Vec<ScalarField<T>>>> {
    let p = pressure(&state.rho, eos)?;
    let d = state.q.dim();
    let mut tensor = Vec::with_capacity(d);
    for m in 0..d {
        let mut row = Vec::with_capacity(d);
        for n in 0..d {
            let mut f = state
                .q
                .comp(m)
                .zip_with(state.q.comp(n), |a, b| a * b)
                .zip_with(&state.rho, |qq, r| qq / r);
            if m == n {
                f.add_scaled(T::one(), &p);
            }
            row.push(f);
        }
        tensor.push(row);
    }
    Ok(tensor)
}

/// Pointwise flux component `F_{m n}(rho, q) = q_m q_n / rho + p delta_mn`.
#[inline]
pub fn flux_component_at<T: Scalar>(rho: T, q_m: T, q_n: T, diag: bool, eos: &EosParams<T>) -> T {
    let f = q_m * q_n / rho;
    if diag {
        f + eos.pressure_at(rho)
    } else {
        f
    }
}

/// Rusanov wave speed at an interface in direction `m`:
/// `alpha = 2 max(|q_m^- / rho^-|, |q_m^+ / rho^+|)`.
pub fn interface_wave_speed<T: Scalar>(rho_l: T, qm_l: T, rho_r: T, qm_r: T) -> Result<T> {
    let floor = T::of(RHO_MIN);
    if !(rho_l > floor) || !(rho_r > floor) {
        return Err(Error::NonPositiveDensity {
            cell: 0,
            value: rho_l.min(rho_r).to_f64().unwrap_or(f64::NAN),
            context: "interface_wave_speed",
        });
    }
    Ok(T::of(2.0) * (qm_l / rho_l).abs().max((qm_r / rho_r).abs()))
}

/// Largest `|eigenvalue| / dx` over all cells and directions. The convective
/// eigenvalues are `0, u_m, u_m, 2 u_m`, so the maximum is `2 |u_m| / dx_m`;
/// pressure is carried by the Rusanov dissipation and does not enter.
pub fn max_wave_speed_over_dx<T: Scalar>(state: &PlasmaState<T>) -> Result<T> {
    check_positive(&state.rho, "cfl")?;
    let mesh = state.mesh();
    let two = T::of(2.0);
    let mut worst = T::zero();
    for m in 0..mesh.dim() {
        let inv_dx = T::one() / mesh.dx(m);
        let qm = state.q.comp(m).values();
        let rho = state.rho.values();
        for k in 0..rho.len() {
            worst = worst.max(two * (qm[k] / rho[k]).abs() * inv_dx);
        }
    }
    Ok(worst)
}

/// Metrics of how far a state sits from the quasi-neutral equilibrium; used
/// by diagnostics and tests.
pub fn div_velocity<T: Scalar>(state: &PlasmaState<T>) -> Result<ScalarField<T>> {
    Ok(central_divergence(&velocity(state)?))
}

/// Mean-free shift for a potential on a fully periodic mesh.
pub fn remove_mean<T: Scalar>(phi: &mut ScalarField<T>) {
    let m = mean(phi);
    for v in phi.values_mut() {
        *v -= m;
    }
}
