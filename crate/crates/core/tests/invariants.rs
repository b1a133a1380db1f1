//! Property tests for the algebraic invariants of the stencils, fluxes and
//! tableaux.

mod common;

use epqn_core::mesh::VectorField;
use epqn_core::mesh::{central_diff, second_diff, Mesh, ScalarField};
use epqn_core::physics::{flux_tensor, EosParams, PlasmaState};
use epqn_core::spatial::{reconstruct, rusanov_momentum_flux, SlopeLimiter};
use proptest::prelude::*;

fn field_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stencils_are_linear(a in field_strategy(16), b in field_strategy(16),
                           alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let mesh = Mesh::periodic_1d(16, 1.0).unwrap();
        let fa = ScalarField::from_vec(&mesh, a);
        let fb = ScalarField::from_vec(&mesh, b);
        let combo = fa.zip_with(&fb, |x, y| alpha * x + beta * y);
        for op in [central_diff, second_diff] {
            let lhs = op(&combo, 0);
            let mut rhs = op(&fa, 0);
            rhs.scale(alpha);
            rhs.add_scaled(beta, &op(&fb, 0));
            let diff = lhs.zip_with(&rhs, |x, y| x - y).linf();
            let scale = lhs.linf().max(1.0);
            prop_assert!(diff <= 1e-12 * scale, "linearity violated by {diff:e}");
        }
    }

    #[test]
    fn stencil_sums_telescope(a in field_strategy(32)) {
        let mesh = Mesh::periodic_1d(32, 2.0).unwrap();
        let f = ScalarField::from_vec(&mesh, a);
        let scale = f.linf().max(1.0) * 32.0 / mesh.dx(0);
        prop_assert!(central_diff(&f, 0).sum().abs() <= 1e-13 * scale);
        prop_assert!(second_diff(&f, 0).sum().abs() <= 1e-12 * scale / mesh.dx(0));
    }

    #[test]
    fn reconstruction_stays_within_data_range(a in field_strategy(16)) {
        let mesh = Mesh::periodic_1d(16, 1.0).unwrap();
        let f = ScalarField::from_vec(&mesh, a.clone());
        let (minus, plus) = reconstruct(&f, 0, SlopeLimiter::Minmod);
        let lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for k in 0..16 {
            prop_assert!(minus[k] >= lo - 1e-12 && minus[k] <= hi + 1e-12);
            prop_assert!(plus[k] >= lo - 1e-12 && plus[k] <= hi + 1e-12);
        }
    }

    #[test]
    fn rusanov_flux_is_consistent_on_uniform_states(rho in 0.2..3.0f64, u in -2.0..2.0f64,
                                                    gamma in 1.0..3.0f64) {
        let mesh = Mesh::periodic_1d(8, 1.0).unwrap();
        let eos = EosParams::new(gamma).unwrap();
        let state = PlasmaState {
            rho: ScalarField::constant(&mesh, rho),
            q: VectorField::from_components(vec![ScalarField::constant(&mesh, rho * u)]),
            phi: ScalarField::zeros(&mesh),
            lambda: 1.0,
            time: 0.0,
        };
        let flux = rusanov_momentum_flux(&state, &eos, 0, SlopeLimiter::Minmod).unwrap();
        let exact = rho * u * u + eos.pressure_at(rho);
        for &f in &flux[0] {
            prop_assert!((f - exact).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn flux_tensor_is_symmetric(rho in 0.2..3.0f64, u1 in -2.0..2.0f64, u2 in -2.0..2.0f64) {
        let mesh = Mesh::periodic_2d([4, 4], [1.0, 1.0]).unwrap();
        let eos = EosParams::new(2.0).unwrap();
        let state = PlasmaState {
            rho: ScalarField::constant(&mesh, rho),
            q: VectorField::from_components(vec![
                ScalarField::constant(&mesh, rho * u1),
                ScalarField::constant(&mesh, rho * u2),
            ]),
            phi: ScalarField::zeros(&mesh),
            lambda: 1.0,
            time: 0.0,
        };
        let f = flux_tensor(&state, &eos).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                let d = f[m][n].zip_with(&f[n][m], |a, b| a - b).linf();
                prop_assert!(d == 0.0);
            }
        }
    }
}

#[test]
fn pipeline_is_generic_over_f32() {
    // the whole stack instantiates at single precision
    let mesh = Mesh::<f32>::periodic_1d(16, 1.0).unwrap();
    let f = ScalarField::from_coords(&mesh, |x| (2.0 * std::f32::consts::PI * x[0]).sin());
    let d = central_diff(&f, 0);
    assert!(d.linf() > 0.0);
    let mut rhs = second_diff(&f, 0);
    let m = epqn_core::mesh::mean(&rhs);
    for v in rhs.values_mut() {
        *v -= m;
    }
    let phi = epqn_core::poisson::solve(&epqn_core::poisson::PoissonProblem {
        rhs: &rhs,
        lambda2: 1.0f32,
        bc: epqn_core::poisson::PhiBc::Periodic,
        tol: 1e-5,
    })
    .unwrap();
    // round trip at single precision
    let err = phi.zip_with(&f, |a, b| a - b).linf();
    assert!(err <= 1e-4 * f.linf(), "f32 round trip error {err:e}");

    let tab = epqn_core::tableaux::DoubleButcherTableau::<f32>::builtin("DP2A242").unwrap();
    assert!(tab.is_gsa());
}

#[test]
fn second_diff_fourier_eigenvalue_range_of_modes() {
    let n = 64;
    let mesh = Mesh::periodic_1d(n, 1.0).unwrap();
    for kmode in 1..=(n / 2) {
        let f = ScalarField::from_coords(&mesh, |x| {
            (2.0 * std::f64::consts::PI * kmode as f64 * x[0]).cos()
        });
        let d = second_diff(&f, 0);
        let dx = mesh.dx(0);
        let eig = -(4.0 / (dx * dx)) * (std::f64::consts::PI * kmode as f64 * dx).sin().powi(2);
        let err = d.zip_with(&f.map(|v| eig * v), |a, b| a - b).linf();
        assert!(
            err <= 1e-12 * eig.abs(),
            "mode {kmode}: relative defect {:e}",
            err / eig.abs()
        );
    }
}
