//! The production elliptic solves checked against an independent dense
//! rank-corrected solve on small meshes.

mod common;

use common::{dense_poisson_periodic, smooth_field, Lcg};
use epqn_core::mesh::{mean, Mesh, ScalarField};
use epqn_core::poisson::{solve, PhiBc, PoissonProblem};

fn compare(rhs: &ScalarField<f64>, lambda2: f64) {
    let phi = solve(&PoissonProblem {
        rhs,
        lambda2,
        bc: PhiBc::Periodic,
        tol: 1e-12,
    })
    .unwrap();
    let reference = dense_poisson_periodic(rhs, lambda2);
    let err = phi.zip_with(&reference, |a, b| a - b).linf();
    let scale = reference.linf().max(f64::MIN_POSITIVE);
    assert!(
        err <= 1e-10 * scale,
        "dense oracle mismatch: {err:e} vs scale {scale:e}"
    );
}

fn mean_free(mesh: &std::sync::Arc<Mesh<f64>>, rng: &mut Lcg) -> ScalarField<f64> {
    let mut f = smooth_field(mesh, rng, 0.0, 1.0);
    let m = mean(&f);
    for v in f.values_mut() {
        *v -= m;
    }
    f
}

#[test]
fn dense_oracle_1d_meshes_up_to_32() {
    let mut rng = Lcg(0x5eed_1d);
    for n in [4usize, 8, 16, 32] {
        for lambda2 in [1.0, 1e-4, 1e-8] {
            let mesh = Mesh::periodic_1d(n, 1.0).unwrap();
            let rhs = mean_free(&mesh, &mut rng);
            compare(&rhs, lambda2);
        }
    }
}

#[test]
fn dense_oracle_1d_longer_domain() {
    let mut rng = Lcg(0xabcd);
    let mesh = Mesh::periodic_1d(24, 20.0).unwrap();
    let rhs = mean_free(&mesh, &mut rng);
    compare(&rhs, 1e-6);
}

#[test]
fn dense_oracle_2d_8x8_random_mean_free() {
    let mut rng = Lcg(0x2d2d);
    let mesh = Mesh::periodic_2d([8, 8], [1.0, 1.0]).unwrap();
    for lambda2 in [1.0, 1e-6] {
        // fully random (not smooth) mean-free data
        let mut vals: Vec<f64> = (0..mesh.cells()).map(|_| rng.centered()).collect();
        let avg = vals.iter().sum::<f64>() / vals.len() as f64;
        for v in &mut vals {
            *v -= avg;
        }
        let rhs = ScalarField::from_vec(&mesh, vals);
        compare(&rhs, lambda2);
    }
}

#[test]
fn dense_oracle_dirichlet_1d() {
    // Dirichlet closure: pin phi[0] = 0, equations on the remaining nodes.
    let mesh = Mesh::periodic_1d(16, 1.0).unwrap();
    let mut rng = Lcg(0xd1);
    let rhs = smooth_field(&mesh, &mut rng, 0.3, 1.0);
    let lambda2 = 0.7;
    let phi = solve(&PoissonProblem {
        rhs: &rhs,
        lambda2,
        bc: PhiBc::DirichletZero,
        tol: 1e-12,
    })
    .unwrap();

    let n = mesh.cells();
    let c = lambda2 / (mesh.dx(0) * mesh.dx(0));
    let mut a = vec![vec![0.0; n - 1]; n - 1];
    let mut b = vec![0.0; n - 1];
    for k in 1..n {
        let row = k - 1;
        a[row][row] = -2.0 * c;
        if k > 1 {
            a[row][row - 1] = c;
        }
        if k < n - 1 {
            a[row][row + 1] = c;
        }
        b[row] = rhs[k];
    }
    let x = common::dense_solve(a, b);
    assert_eq!(phi[0], 0.0);
    for k in 1..n {
        assert!((phi[k] - x[k - 1]).abs() <= 1e-10 * phi.linf());
    }
}
