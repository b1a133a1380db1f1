//! Shared helpers for the integration tests: a deterministic generator for
//! smooth admissible states and a dense bordered-system Poisson solve used
//! as an independent oracle.
#![allow(dead_code)] // each test binary uses its own subset

use epqn_core::mesh::{Mesh, ScalarField, VectorField};
use epqn_core::physics::PlasmaState;
use std::sync::Arc;

/// Small deterministic LCG; the tests must not depend on ambient randomness.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [-1, 1).
    pub fn centered(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }
}

/// Smooth periodic field: a handful of low Fourier modes with random
/// coefficients, amplitude bounded by `amp`.
pub fn smooth_field(mesh: &Arc<Mesh<f64>>, rng: &mut Lcg, base: f64, amp: f64) -> ScalarField<f64> {
    let modes = 3;
    let mut coef = Vec::new();
    for _ in 0..mesh.dim() {
        let per_dir: Vec<(f64, f64)> = (0..modes)
            .map(|m| {
                let scale = amp / (m as f64 + 1.0) / modes as f64;
                (rng.centered() * scale, rng.centered() * scale)
            })
            .collect();
        coef.push(per_dir);
    }
    ScalarField::from_coords(mesh, |x| {
        let mut v = base;
        for (dir, per_dir) in coef.iter().enumerate() {
            let xi = x[dir] / lengths(mesh)[dir];
            for (m, &(a, b)) in per_dir.iter().enumerate() {
                let arg = 2.0 * std::f64::consts::PI * (m as f64 + 1.0) * xi;
                v += a * arg.cos() + b * arg.sin();
            }
        }
        v
    })
}

fn lengths(mesh: &Arc<Mesh<f64>>) -> Vec<f64> {
    (0..mesh.dim()).map(|m| mesh.length(m)).collect()
}

/// Random admissible state: density near 1, order-one velocity, zero
/// potential (callers initialize it with the mandatory Poisson solve).
pub fn random_state(mesh: &Arc<Mesh<f64>>, rng: &mut Lcg, lambda: f64) -> PlasmaState<f64> {
    let rho = smooth_field(mesh, rng, 1.0, 0.3);
    let comps = (0..mesh.dim())
        .map(|_| {
            let u = smooth_field(mesh, rng, 1.0, 0.4);
            u.zip_with(&rho, |v, r| v * r)
        })
        .collect();
    PlasmaState {
        rho,
        q: VectorField::from_components(comps),
        phi: ScalarField::zeros(mesh),
        lambda,
        time: 0.0,
    }
}

/// Dense LU with partial pivoting; panics on a singular system. Test-only.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        assert!(a[piv][col].abs() > 0.0, "singular dense system");
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Reference Poisson solve: assemble `lambda^2 lap` densely, border it with
/// the mean-zero constraint (one Lagrange multiplier), and solve the square
/// rank-corrected system exactly.
pub fn dense_poisson_periodic(rhs: &ScalarField<f64>, lambda2: f64) -> ScalarField<f64> {
    let mesh = rhs.mesh().clone();
    let n = mesh.cells();
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for m in 0..mesh.dim() {
        let c = lambda2 / (mesh.dx(m) * mesh.dx(m));
        mesh.sweep(m, |k, kp, km| {
            a[k][kp] += c;
            a[k][km] += c;
            a[k][k] -= 2.0 * c;
        });
    }
    for k in 0..n {
        a[k][n] = 1.0;
        a[n][k] = 1.0;
    }
    let mut b: Vec<f64> = rhs.values().to_vec();
    b.push(0.0);
    let x = dense_solve(a, b);
    ScalarField::from_vec(&mesh, x[..n].to_vec())
}

pub fn max_state_diff(a: &PlasmaState<f64>, b: &PlasmaState<f64>) -> f64 {
    let mut worst = a.rho.zip_with(&b.rho, |x, y| x - y).linf();
    worst = worst.max(a.phi.zip_with(&b.phi, |x, y| x - y).linf());
    for m in 0..a.q.dim() {
        worst = worst.max(a.q.comp(m).zip_with(b.q.comp(m), |x, y| x - y).linf());
    }
    worst
}
