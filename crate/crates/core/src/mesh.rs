//! Periodic structured grids in one or two dimensions and the composite
//! finite-difference stencils built on them.
//!
//! Grid points sit at `x_m = i_m * dx_m` with `dx_m = L_m / N_m`. All stencils
//! use periodic index wrap; only the whole-index composites are exposed:
//!
//! * `central_diff`:  (f[k+e_m] - f[k-e_m]) / (2 dx_m)
//! * `second_diff`:   (f[k+e_m] - 2 f[k] + f[k-e_m]) / dx_m^2
//!
//! Fields are stored row-major (direction 0 outermost). Operations are pure:
//! they allocate their result and never mutate inputs, so shared read-only
//! fields can be used from several threads at once.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::sync::Arc;

/// Smallest usable per-direction cell count; the stencils need two distinct
/// neighbours on each side.
pub const MIN_CELLS: usize = 4;

/// Per-direction boundary treatment. Hydrodynamic fields are always periodic;
/// `DirichletZeroPhi` only changes how the Poisson problem for the electric
/// potential is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    DirichletZeroPhi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    n: Vec<usize>,
    length: Vec<T>,
    dx: Vec<T>,
    bc: Vec<BoundaryKind>,
    strides: Vec<usize>,
    cells: usize,
}

impl<T: Scalar> Mesh<T> {
    pub fn new(n: &[usize], length: &[T], bc: &[BoundaryKind]) -> Result<Arc<Self>> {
        let dim = n.len();
        if dim == 0 || dim > 2 {
            return Err(Error::InvalidMesh(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if length.len() != dim || bc.len() != dim {
            return Err(Error::InvalidMesh(
                "n, length and bc must have equal lengths".into(),
            ));
        }
        for (m, &nm) in n.iter().enumerate() {
            if nm < MIN_CELLS {
                return Err(Error::InvalidMesh(format!(
                    "direction {m} has {nm} cells, need at least {MIN_CELLS}"
                )));
            }
            if !(length[m] > T::zero()) {
                return Err(Error::InvalidMesh(format!(
                    "direction {m} has non-positive length"
                )));
            }
        }
        let dx: Vec<T> = n
            .iter()
            .zip(length)
            .map(|(&nm, &lm)| lm / T::of_usize(nm))
            .collect();
        let mut strides = vec![1usize; dim];
        for m in (0..dim.saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * n[m + 1];
        }
        let cells = n.iter().product();
        Ok(Arc::new(Mesh {
            n: n.to_vec(),
            length: length.to_vec(),
            dx,
            bc: bc.to_vec(),
            strides,
            cells,
        }))
    }

    pub fn periodic_1d(n: usize, length: T) -> Result<Arc<Self>> {
        Mesh::new(&[n], &[length], &[BoundaryKind::Periodic])
    }

    pub fn periodic_2d(n: [usize; 2], length: [T; 2]) -> Result<Arc<Self>> {
        Mesh::new(&n, &length, &[BoundaryKind::Periodic; 2])
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn extent(&self, m: usize) -> usize {
        self.n[m]
    }

    pub fn length(&self, m: usize) -> T {
        self.length[m]
    }

    pub fn dx(&self, m: usize) -> T {
        self.dx[m]
    }

    pub fn bc(&self, m: usize) -> BoundaryKind {
        self.bc[m]
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.bc.iter().all(|&b| b == BoundaryKind::Periodic)
    }

    /// Cell volume (product of spacings), the weight of discrete L2 norms.
    pub fn cell_volume(&self) -> T {
        self.dx.iter().fold(T::one(), |acc, &d| acc * d)
    }

    /// Physical coordinates of the grid point with flat index `k`.
    pub fn coords(&self, k: usize) -> Vec<T> {
        let mut rest = k;
        let mut out = Vec::with_capacity(self.dim());
        for m in 0..self.dim() {
            let i = rest / self.strides[m];
            rest %= self.strides[m];
            out.push(T::of_usize(i) * self.dx[m]);
        }
        out
    }

    /// Flat index of the periodic neighbour of `k`, one cell along `+/-m`.
    pub fn neighbor(&self, k: usize, m: usize, forward: bool) -> usize {
        let s = self.strides[m];
        let nm = self.n[m];
        let i = (k / s) % nm;
        if forward {
            if i + 1 == nm {
                k + s - nm * s
            } else {
                k + s
            }
        } else if i == 0 {
            k + (nm - 1) * s
        } else {
            k - s
        }
    }

    fn check_direction(&self, m: usize) {
        assert!(
            m < self.dim(),
            "direction {m} out of range for a {}-dimensional mesh",
            self.dim()
        );
    }

    /// Visit every cell of the mesh together with its two periodic
    /// neighbours along direction `m`: the closure receives
    /// `(k, k_plus, k_minus)` flat indices.
    pub fn sweep<F: FnMut(usize, usize, usize)>(&self, m: usize, mut f: F) {
        self.check_direction(m);
        let s = self.strides[m];
        let nm = self.n[m];
        let block = s * nm;
        let mut base = 0;
        while base < self.cells {
            for i in 0..nm {
                let plus = if i + 1 == nm { 0 } else { (i + 1) * s };
                let minus = if i == 0 { (nm - 1) * s } else { (i - 1) * s };
                let row = base + i * s;
                for inner in 0..s {
                    f(row + inner, base + plus + inner, base + minus + inner);
                }
            }
            base += block;
        }
    }
}

/// One real value per grid cell, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    mesh: Arc<Mesh<T>>,
    data: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn zeros(mesh: &Arc<Mesh<T>>) -> Self {
        ScalarField {
            mesh: Arc::clone(mesh),
            data: vec![T::zero(); mesh.cells()],
        }
    }

    pub fn constant(mesh: &Arc<Mesh<T>>, c: T) -> Self {
        ScalarField {
            mesh: Arc::clone(mesh),
            data: vec![c; mesh.cells()],
        }
    }

    pub fn from_vec(mesh: &Arc<Mesh<T>>, data: Vec<T>) -> Self {
        assert_eq!(
            data.len(),
            mesh.cells(),
            "field length must match cell count"
        );
        ScalarField {
            mesh: Arc::clone(mesh),
            data,
        }
    }

    /// Sample a function of the physical coordinates at every grid point.
    pub fn from_coords<F: Fn(&[T]) -> T>(mesh: &Arc<Mesh<T>>, f: F) -> Self {
        let data = (0..mesh.cells()).map(|k| f(&mesh.coords(k))).collect();
        ScalarField {
            mesh: Arc::clone(mesh),
            data,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        ScalarField {
            mesh: Arc::clone(&self.mesh),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with<F: Fn(T, T) -> T>(&self, other: &Self, f: F) -> Self {
        assert!(same_mesh(self, other), "zip_with requires a shared mesh");
        ScalarField {
            mesh: Arc::clone(&self.mesh),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: T, other: &Self) {
        assert!(same_mesh(self, other), "add_scaled requires a shared mesh");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: T) {
        for a in &mut self.data {
            *a *= c;
        }
    }

    pub fn sum(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x)
    }

    pub fn linf(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Volume-weighted discrete L2 norm.
    pub fn l2(&self) -> T {
        let ss = self.data.iter().fold(T::zero(), |acc, &x| acc + x * x);
        (ss * self.mesh.cell_volume()).sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn check_finite(&self, field: &'static str, context: &'static str) -> Result<()> {
        if self.all_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { field, context })
        }
    }

    /// Restrict a field to a coarser nested mesh by index subsampling
    /// (grid points are node-collocated, so coarse point `k` is fine point
    /// `k * factor` in every direction).
    pub fn subsample(&self, coarse: &Arc<Mesh<T>>) -> Result<Self> {
        let fine = &self.mesh;
        if fine.dim() != coarse.dim() {
            return Err(Error::MeshMismatch("subsample: dimension mismatch"));
        }
        let mut factors = Vec::with_capacity(fine.dim());
        for m in 0..fine.dim() {
            let (nf, nc) = (fine.extent(m), coarse.extent(m));
            if nc == 0 || nf % nc != 0 {
                return Err(Error::MeshMismatch("subsample: meshes do not nest"));
            }
            factors.push(nf / nc);
        }
        let data = (0..coarse.cells())
            .map(|kc| {
                let mut rest = kc;
                let mut kf = 0;
                for m in 0..coarse.dim() {
                    let i = rest / coarse_stride(coarse, m);
                    rest %= coarse_stride(coarse, m);
                    kf += i * factors[m] * fine.strides[m];
                }
                self.data[kf]
            })
            .collect();
        Ok(ScalarField {
            mesh: Arc::clone(coarse),
            data,
        })
    }
}

fn coarse_stride<T: Scalar>(mesh: &Arc<Mesh<T>>, m: usize) -> usize {
    mesh.strides[m]
}

impl<T> std::ops::Index<usize> for ScalarField<T> {
    type Output = T;
    fn index(&self, k: usize) -> &T {
        &self.data[k]
    }
}

impl<T> std::ops::IndexMut<usize> for ScalarField<T> {
    fn index_mut(&mut self, k: usize) -> &mut T {
        &mut self.data[k]
    }
}

/// `d` scalar fields on one mesh, one per spatial direction.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T> {
    comps: Vec<ScalarField<T>>,
}

impl<T: Scalar> VectorField<T> {
    pub fn zeros(mesh: &Arc<Mesh<T>>) -> Self {
        VectorField {
            comps: (0..mesh.dim()).map(|_| ScalarField::zeros(mesh)).collect(),
        }
    }

    pub fn from_components(comps: Vec<ScalarField<T>>) -> Self {
        assert!(!comps.is_empty());
        assert_eq!(
            comps.len(),
            comps[0].mesh().dim(),
            "one component per direction"
        );
        for c in &comps[1..] {
            assert!(
                same_mesh(&comps[0], c),
                "vector field components must share one mesh"
            );
        }
        VectorField { comps }
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        self.comps[0].mesh()
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, m: usize) -> &ScalarField<T> {
        &self.comps[m]
    }

    pub fn comp_mut(&mut self, m: usize) -> &mut ScalarField<T> {
        &mut self.comps[m]
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.comps
    }

    pub fn add_scaled(&mut self, c: T, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.add_scaled(c, b);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.comps.iter().all(|c| c.all_finite())
    }

    pub fn linf(&self) -> T {
        self.comps
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.linf()))
    }
}

/// Content equality of the underlying meshes (cheap pointer check first).
pub fn same_mesh<T: Scalar>(a: &ScalarField<T>, b: &ScalarField<T>) -> bool {
    Arc::ptr_eq(a.mesh(), b.mesh()) || a.mesh().as_ref() == b.mesh().as_ref()
}

/// Centered first difference along `m`: `(f[k+e_m] - f[k-e_m]) / (2 dx_m)`.
///
/// This is the whole-index composite of the half-index difference and
/// averaging operators; it is the only first-derivative stencil the scheme
/// uses.
pub fn central_diff<T: Scalar>(f: &ScalarField<T>, m: usize) -> ScalarField<T> {
    let mesh = f.mesh();
    mesh.check_direction(m);
    let inv2dx = T::one() / (T::of(2.0) * mesh.dx(m));
    let mut out = ScalarField::zeros(mesh);
    let src = f.values();
    let dst = out.values_mut();
    mesh.sweep(m, |k, kp, km| {
        dst[k] = (src[kp] - src[km]) * inv2dx;
    });
    out
}

/// Three-point second difference along `m`:
/// `(f[k+e_m] - 2 f[k] + f[k-e_m]) / dx_m^2`. Annihilates constants.
pub fn second_diff<T: Scalar>(f: &ScalarField<T>, m: usize) -> ScalarField<T> {
    let mesh = f.mesh();
    mesh.check_direction(m);
    let invdx2 = T::one() / (mesh.dx(m) * mesh.dx(m));
    let two = T::of(2.0);
    let mut out = ScalarField::zeros(mesh);
    let src = f.values();
    let dst = out.values_mut();
    mesh.sweep(m, |k, kp, km| {
        dst[k] = (src[kp] - two * src[k] + src[km]) * invdx2;
    });
    out
}

/// Discrete divergence with centered stencils: sum over directions of the
/// centered difference of the matching component.
pub fn central_divergence<T: Scalar>(v: &VectorField<T>) -> ScalarField<T> {
    let mut out = central_diff(v.comp(0), 0);
    for m in 1..v.dim() {
        let d = central_diff(v.comp(m), m);
        out.add_scaled(T::one(), &d);
    }
    out
}

/// Centered gradient: one centered difference per direction.
pub fn gradient<T: Scalar>(f: &ScalarField<T>) -> VectorField<T> {
    VectorField::from_components((0..f.mesh().dim()).map(|m| central_diff(f, m)).collect())
}

/// Discrete Laplacian: sum of per-direction three-point second differences.
pub fn laplacian<T: Scalar>(f: &ScalarField<T>) -> ScalarField<T> {
    let mut out = second_diff(f, 0);
    for m in 1..f.mesh().dim() {
        let d = second_diff(f, m);
        out.add_scaled(T::one(), &d);
    }
    out
}

/// Arithmetic average over all cells.
pub fn mean<T: Scalar>(f: &ScalarField<T>) -> T {
    f.sum() / T::of_usize(f.len())
}
