// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex operators on `C^n` and linear maps on `M_n`.
//!
//! Superoperators act on column-stacked matrices: `vec(A)[i + n*j] = A[(i, j)]`,
//! which is exactly nalgebra's column-major storage. Under this convention the
//! map `X -> L X R` has matrix `R^T (x) L`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Entrywise tolerance for hermiticity and eigenvalue tolerance for positivity.
pub const DEFAULT_TOL: f64 = 1e-9;
/// A state is faithful when its smallest eigenvalue exceeds this.
pub const FAITHFUL_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Matrix unit `e_i e_j^*`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n);
    m[(i, j)] = real(1.0);
    m
}

pub fn from_rows(rows: &[&[C64]]) -> ComplexMatrix {
    let n = rows.len();
    ComplexMatrix::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| rows[i][j])
}

pub fn diag(entries: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_column_slice(entries))
}

pub fn diag_real(entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(entries.len(), entries.len(), |i, j| {
        if i == j {
            real(entries[i])
        } else {
            C64::default()
        }
    })
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

/// Kronecker product in the lexicographic basis `e_i (x) e_j -> i * dim(B) + j`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(identity(1), |acc, f| tensor_product(&acc, f))
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.trace()
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.norm()
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().fold(0.0, |m: f64, s| m.max(*s))
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn ensure_dim(a: &ComplexMatrix, n: usize) -> Result<()> {
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if a.nrows() != n { a.nrows() } else { a.ncols() },
        });
    }
    Ok(())
}

/// Column-stacking vectorization.
pub fn vectorize(a: &ComplexMatrix) -> DVector<C64> {
    DVector::from_column_slice(a.as_slice())
}

pub fn devectorize(v: &DVector<C64>, n: usize) -> ComplexMatrix {
    assert_eq!(v.len(), n * n, "vector length is not a square");
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

pub fn devectorize_slice(v: &[C64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v)
}

pub fn hermitian_residual(a: &ComplexMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    a.is_square() && hermitian_residual(a) <= tol
}

pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * real(0.5)
}

/// Eigendecomposition of the hermitian part of `a`, eigenvalues ascending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    hermitian_eigen(a).0.first().copied().unwrap_or(0.0)
}

pub fn is_psd(a: &ComplexMatrix, tol: f64) -> bool {
    is_hermitian(a, tol) && min_eigenvalue(a) >= -tol
}

/// `f(A)` for hermitian `A` through its spectral decomposition.
pub fn hermitian_function(a: &ComplexMatrix, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(a);
    let fd = diag(&values.iter().map(|&x| f(x)).collect::<Vec<_>>());
    &vectors * fd * vectors.adjoint()
}

/// `exp(-i t H)` for hermitian `H`.
pub fn unitary_evolution(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    hermitian_function(h, |e| C64::from_polar(1.0, -e * t))
}

pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

/// Pauli matrices and ladder operators. `sigma_minus` is `(sigma_x + i sigma_y) / 2`.
pub mod pauli {
    use super::*;

    pub fn sigma_x() -> ComplexMatrix {
        from_rows(&[&[real(0.0), real(1.0)], &[real(1.0), real(0.0)]])
    }

    pub fn sigma_y() -> ComplexMatrix {
        from_rows(&[&[real(0.0), c(0.0, -1.0)], &[c(0.0, 1.0), real(0.0)]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        diag_real(&[1.0, -1.0])
    }

    pub fn sigma_minus() -> ComplexMatrix {
        (sigma_x() + sigma_y() * c(0.0, 1.0)) * real(0.5)
    }

    pub fn sigma_plus() -> ComplexMatrix {
        sigma_minus().adjoint()
    }
}

/// A linear map on `M_n` as an `n^2 x n^2` matrix on column-stacked operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: matrix.nrows(),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: identity(dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            matrix: zeros(dim * dim),
        }
    }

    /// Tabulates an arbitrary linear map by its action on matrix units.
    pub fn from_fn(dim: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let n2 = dim * dim;
        let mut matrix = zeros(n2);
        for j in 0..dim {
            for i in 0..dim {
                let image = f(&matrix_unit(dim, i, j));
                matrix
                    .column_mut(i + dim * j)
                    .copy_from_slice(image.as_slice());
            }
        }
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_dim(a, self.dim)?;
        Ok(devectorize(&(&self.matrix * vectorize(a)), self.dim))
    }

    /// `(self . other)(X) = self(other(X))`.
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn scale(&self, s: C64) -> Superoperator {
        Self {
            dim: self.dim,
            matrix: &self.matrix * s,
        }
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Superoperator) -> Result<Superoperator> {
        self.add(&other.scale(real(-1.0)))
    }

    /// Frobenius norm of the matrix representation.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Dual with respect to the trace pairing, `Tr(A S(B)) = Tr(S'(A) B)`.
    pub fn dual(&self) -> Superoperator {
        let n = self.dim;
        let perm = |k: usize| {
            let (i, j) = (k % n, k / n);
            j + n * i
        };
        let matrix = ComplexMatrix::from_fn(n * n, n * n, |r, s| self.matrix[(perm(s), perm(r))]);
        Self { dim: n, matrix }
    }

    /// `sum_{ij} E_ij (x) S(E_ij)`; positive semidefinite iff the map is completely positive.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut choi = zeros(n * n);
        for i in 0..n {
            for j in 0..n {
                let image = devectorize_slice(self.matrix.column(i + n * j).as_slice(), n);
                choi.view_mut((i * n, j * n), (n, n)).copy_from(&image);
            }
        }
        choi
    }

    /// Superoperator with the given Choi matrix (inverse of [`Superoperator::choi`]).
    pub fn from_choi(dim: usize, choi: &ComplexMatrix) -> Result<Superoperator> {
        if choi.nrows() != dim * dim || choi.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: choi.nrows(),
            });
        }
        let mut matrix = zeros(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let block = choi.view((i * dim, j * dim), (dim, dim)).into_owned();
                matrix
                    .column_mut(i + dim * j)
                    .copy_from_slice(block.as_slice());
            }
        }
        Ok(Self { dim, matrix })
    }
}

/// Superoperator of `X -> left * X * right`.
pub fn superop_from_sandwich(left: &ComplexMatrix, right: &ComplexMatrix) -> Result<Superoperator> {
    let n = ensure_square(left)?;
    ensure_dim(right, n)?;
    Ok(Superoperator {
        dim: n,
        matrix: tensor_product(&right.transpose(), left),
    })
}

/// Superoperator of `X -> [A, X]`.
pub fn commutator_superop(a: &ComplexMatrix) -> Result<Superoperator> {
    let n = ensure_square(a)?;
    let id = identity(n);
    Ok(Superoperator {
        dim: n,
        matrix: tensor_product(&id, a) - tensor_product(&a.transpose(), &id),
    })
}

/// A density matrix: hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        ensure_square(&matrix)?;
        if matrix.nrows() == 0 {
            return Err(Error::InvalidState("empty matrix".into()));
        }
        let herm = hermitian_residual(&matrix);
        if herm > tol {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = matrix.trace();
        if (tr - real(1.0)).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = min_eigenvalue(&matrix);
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(matrix))
    }

    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(psi * psi.adjoint()))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(identity(n) * real(1.0 / n as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

/// Liouville-space metric `<A, B>_sigma = Tr(sigma A* B)` of a faithful state.
#[derive(Clone, Debug)]
pub struct LiouvilleMetric {
    sigma: DensityMatrix,
    min_eigenvalue: f64,
}

impl LiouvilleMetric {
    pub fn new(sigma: DensityMatrix) -> Result<Self> {
        let min = min_eigenvalue(sigma.matrix());
        if min <= FAITHFUL_TOL {
            return Err(Error::NotFaithful { min_eigenvalue: min });
        }
        Ok(Self {
            sigma,
            min_eigenvalue: min,
        })
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn inner(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
        liouville_inner(self, a, b)
    }

    pub fn norm(&self, a: &ComplexMatrix) -> Result<f64> {
        Ok(liouville_inner(self, a, a)?.re.max(0.0).sqrt())
    }

    /// Gram matrix `G` with `<A, B>_sigma = vec(A)^* G vec(B)`, i.e. `sigma^T (x) 1`.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.dim();
        tensor_product(&self.sigma.matrix().transpose(), &identity(n))
    }

    /// `G^{1/2}` and `G^{-1/2}`.
    pub fn gram_sqrt_pair(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.dim();
        let st = self.sigma.matrix().transpose();
        let sq = hermitian_function(&st, |x| real(x.max(0.0).sqrt()));
        let isq = hermitian_function(&st, |x| real(1.0 / x.sqrt()));
        (
            tensor_product(&sq, &identity(n)),
            tensor_product(&isq, &identity(n)),
        )
    }
}

pub fn liouville_inner(metric: &LiouvilleMetric, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let n = metric.dim();
    ensure_dim(a, n)?;
    ensure_dim(b, n)?;
    Ok((metric.sigma.matrix() * a.adjoint() * b).trace())
}
