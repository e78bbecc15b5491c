//! Small dense complex linear algebra: kets, operators, tensor products and
//! partial traces.
//!
//! Everything here lives in dimension 16 or below (four qubits), so storage is
//! dense `nalgebra` matrices of `Complex64` and no attempt is made at sparsity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for Hermiticity, unit trace and the PSD eigenvalue floor.
pub const DENSITY_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Kronecker product of kets or operators.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

/// A state vector of fixed dimension. Not necessarily normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: DVector<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        Ok(Self { amps: DVector::from_vec(amplitudes) })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| re(x)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amps = DVector::from_element(dim, ZERO);
        amps[index] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::Precondition("cannot normalize the zero vector".into()));
        }
        Ok(self.scale(re(1.0 / n)))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps.dotc(&other.amps)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { amps: &self.amps * s }
    }

    pub fn add(&self, other: &Ket) -> Self {
        Self { amps: &self.amps + &other.amps }
    }

    pub fn sub(&self, other: &Ket) -> Self {
        Self { amps: &self.amps - &other.amps }
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> Operator {
        self.outer(self)
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Ket) -> Operator {
        Operator { m: &self.amps * other.amps.adjoint() }
    }

    pub(crate) fn vector(&self) -> &DVector<C64> {
        &self.amps
    }
}

impl Tensor for Ket {
    fn tensor(&self, other: &Self) -> Self {
        Self { amps: self.amps.kronecker(&other.amps) }
    }
}

/// A square complex matrix acting on a space of dimension `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    /// Builds an operator from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: entries.len() });
        }
        Ok(Self { m: DMatrix::from_row_slice(dim, dim, &entries) })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<C64> = rows.iter().flat_map(|r| r.iter().map(|&x| re(x))).collect();
        Self::new(dim, entries)
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
        }
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: DMatrix::from_element(dim, dim, ZERO) }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&x| re(x)));
        Self { m: DMatrix::from_diagonal(&d) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn mul(&self, other: &Operator) -> Self {
        Self { m: &self.m * &other.m }
    }

    pub fn add(&self, other: &Operator) -> Self {
        Self { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Operator) -> Self {
        Self { m: &self.m - &other.m }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { m: &self.m * s }
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        Ket { amps: &self.m * ket.vector() }
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, ket: &Ket) -> C64 {
        ket.vector().dotc(&(&self.m * ket.vector()))
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Operator) -> Self {
        Self { m: &u.m * &self.m * u.m.adjoint() }
    }

    /// `V† A V` where the columns of `V` are the given kets: the matrix of `A`
    /// restricted to their span, in that basis.
    pub fn compress(&self, basis: &[Ket]) -> Result<Self> {
        let cols: Vec<DVector<C64>> = basis.iter().map(|k| k.vector().clone()).collect();
        for k in basis {
            if k.dim() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), actual: k.dim() });
            }
        }
        let v = DMatrix::from_columns(&cols);
        Ok(Self { m: v.adjoint() * &self.m * v })
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.m.iter().zip(other.m.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|` elementwise.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.m + self.m.adjoint()) * re(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Eigen-decomposition of the Hermitian part, as `(eigenvalue, eigenvector)`
    /// pairs sorted by descending eigenvalue.
    pub fn hermitian_eigen(&self) -> Vec<(f64, Ket)> {
        let h = (&self.m + self.m.adjoint()) * re(0.5);
        let eig = SymmetricEigen::new(h);
        let mut pairs: Vec<(f64, Ket)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, Ket { amps: eig.eigenvectors.column(i).into_owned() }))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs
    }

    pub fn determinant(&self) -> C64 {
        self.m.determinant()
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        Self { m: self.m.kronecker(&other.m) }
    }
}

/// Free-function form of [`Tensor::tensor`].
pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Which factor of a bipartite space `H_A ⊗ H_B` to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out one factor of `rho` on `H_A ⊗ H_B` with `dims = (d_A, d_B)`.
pub fn partial_trace(rho: &Operator, keep: Subsystem, dims: (usize, usize)) -> Result<Operator> {
    let (da, db) = dims;
    if da == 0 || db == 0 || rho.dim() != da * db {
        return Err(Error::DimensionMismatch { expected: da * db, actual: rho.dim() });
    }
    let m = &rho.m;
    let out = match keep {
        Subsystem::A => DMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => DMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    };
    Ok(Operator { m: out })
}

/// Reduced state of one factor of a pure bipartite state.
pub fn reduce_pure(psi: &Ket, keep: Subsystem, dims: (usize, usize)) -> Result<Operator> {
    let (da, db) = dims;
    if psi.dim() != da * db {
        return Err(Error::DimensionMismatch { expected: da * db, actual: psi.dim() });
    }
    // amplitudes arranged as a d_A × d_B matrix M, ρ_A = M M†, ρ_B = (M† M)ᵀ
    let mat = DMatrix::from_fn(da, db, |i, k| psi.amp(i * db + k));
    let out = match keep {
        Subsystem::A => &mat * mat.adjoint(),
        Subsystem::B => (mat.adjoint() * &mat).transpose(),
    };
    Ok(Operator { m: out })
}

/// True iff `op` is Hermitian, positive semidefinite and of unit trace, each
/// within `tol`.
pub fn check_density(op: &Operator, tol: f64) -> bool {
    if op.hermiticity_defect() > tol {
        return false;
    }
    let tr = op.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return false;
    }
    op.hermitian_eigenvalues().first().is_some_and(|&min| min >= -tol)
}

/// An operator that has passed [`check_density`] at [`DENSITY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(Operator);

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        if !check_density(&op, DENSITY_TOL) {
            let ev = op.hermitian_eigenvalues();
            return Err(Error::NotDensity(format!(
                "dim {}, hermiticity defect {:.3e}, trace {:.12}, min eigenvalue {:.3e}",
                op.dim(),
                op.hermiticity_defect(),
                op.trace(),
                ev.first().copied().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self(op))
    }

    pub fn pure(ket: &Ket) -> Result<Self> {
        Self::new(ket.normalized()?.projector())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(Operator::identity(dim).scale(re(1.0 / dim as f64)))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `Tr(ρσ)`, real for two density operators.
    pub fn overlap(&self, other: &DensityOperator) -> f64 {
        self.0.mul(&other.0).trace().re
    }
}

impl AsRef<Operator> for DensityOperator {
    fn as_ref(&self) -> &Operator {
        &self.0
    }
}

/// Extends an orthonormal family to an orthonormal basis of the full space by
/// Gram-Schmidt over the computational basis.
pub fn complete_orthonormal_basis(family: &[Ket], dim: usize) -> Vec<Ket> {
    let mut basis: Vec<Ket> = family.to_vec();
    for idx in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = Ket::basis(dim, idx);
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in &basis {
                v = v.sub(&b.scale(b.inner(&v)));
            }
        }
        let n = v.norm_sqr().sqrt();
        if n > 1e-6 {
            basis.push(v.scale(re(1.0 / n)));
        }
    }
    basis
}

/// Completes the isometry `domain[i] ↦ image[i]` (both orthonormal families)
/// to a unitary on the full space.
pub fn unitary_extension(domain: &[Ket], image: &[Ket]) -> Result<Operator> {
    if domain.len() != image.len() || domain.is_empty() {
        return Err(Error::DimensionMismatch { expected: domain.len(), actual: image.len() });
    }
    let dim = domain[0].dim();
    let dom = complete_orthonormal_basis(domain, dim);
    let img = complete_orthonormal_basis(image, dim);
    if dom.len() != dim || img.len() != dim {
        return Err(Error::Precondition("could not complete orthonormal basis".into()));
    }
    let mut u = Operator::zeros(dim);
    for (d, i) in dom.iter().zip(&img) {
        u = u.add(&i.outer(d));
    }
    Ok(u)
}

/// Hadamard gate `(|0⟩⟨0| + |0⟩⟨1| + |1⟩⟨0| - |1⟩⟨1|)/√2`.
pub fn hadamard() -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_real_rows(&[&[h, h], &[h, -h]]).unwrap()
}

pub fn pauli_x() -> Operator {
    Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn pauli_y() -> Operator {
    Operator::new(2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> Operator {
    Operator::diagonal(&[1.0, -1.0])
}
