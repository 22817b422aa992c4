//! Dense linear-algebra helpers over nalgebra shared by the geometric modules.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen, SVD};

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex<f64>>;

pub const I: Complex<f64> = Complex { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Conjugate-transpose defect `‖m + m†‖_F`.
pub fn skew_hermitian_defect(m: &CMatrix) -> f64 {
    (m + m.adjoint()).norm()
}

/// Real vector `[Re m; Im m]`, entries in column-major order.
pub fn realify(m: &CMatrix) -> DVector<f64> {
    let len = m.len();
    DVector::from_fn(2 * len, |i, _| if i < len { m[i].re } else { m[i - len].im })
}

/// Invariant pairing on `u(n)`: `⟨u, v⟩ = −Re Tr(u v)`.
pub fn pairing(u: &CMatrix, v: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            acc += (u[(i, j)] * v[(j, i)]).re;
        }
    }
    -acc
}

/// Basis of `u(n)` that is orthonormal for [`pairing`]:
/// `i·E_jj`, then `(E_ij − E_ji)/√2` and `i(E_ij + E_ji)/√2` for `i < j`.
pub fn unitary_algebra_basis(n: usize) -> Vec<CMatrix> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(j, j)] = I;
        out.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut a = CMatrix::zeros(n, n);
            a[(i, j)] = c(s, 0.0);
            a[(j, i)] = c(-s, 0.0);
            out.push(a);
            let mut b = CMatrix::zeros(n, n);
            b[(i, j)] = c(0.0, s);
            b[(j, i)] = c(0.0, s);
            out.push(b);
        }
    }
    out
}

/// Minimum-norm least-squares solver for a fixed real matrix.
///
/// Factorises `A = Q R` first and decomposes the square `R`; the SVD of tall
/// matrices with clustered singular values is not reliable otherwise. If the
/// decomposition of `R` fails to reproduce it, the eigendecomposition of
/// `RᵀR` is used instead.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// `A = left · diag(sigma) · rightᵀ`.
    left: DMatrix<f64>,
    sigma: DVector<f64>,
    right: DMatrix<f64>,
    matrix: DMatrix<f64>,
    cutoff: f64,
}

fn square_svd(r: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let scale = r.norm().max(f64::MIN_POSITIVE);
    if let Some(svd) = SVD::try_new(r.clone(), true, true, f64::EPSILON, 0) {
        if let (Some(u), Some(vt)) = (svd.u.clone(), svd.v_t.clone()) {
            let rebuilt = &u * DMatrix::from_diagonal(&svd.singular_values) * &vt;
            if (rebuilt - r).norm() <= 1e-12 * scale {
                return (u, svd.singular_values, vt.transpose());
            }
        }
    }
    let eig = SymmetricEigen::new(r.transpose() * r);
    // Eigenvalues of RᵀR carry absolute noise ~ε·σ_max², so singular values
    // below √ε·σ_max are indistinguishable from zero here.
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let sigma = eig
        .eigenvalues
        .map(|l| if l > 1e-14 * lmax { libm::sqrt(l) } else { 0.0 });
    let v = eig.eigenvectors;
    let rv = r * &v;
    let u = DMatrix::from_fn(r.nrows(), r.ncols(), |i, j| {
        if sigma[j] > 0.0 {
            rv[(i, j)] / sigma[j]
        } else {
            0.0
        }
    });
    (u, sigma, v)
}

impl LeastSquares {
    /// Singular values below `rel_cutoff · σ_max` are treated as zero.
    pub fn new(matrix: DMatrix<f64>, rel_cutoff: f64) -> Self {
        let (left, sigma, right) = if matrix.nrows() >= matrix.ncols() {
            let qr = matrix.clone().qr();
            let (u, s, v) = square_svd(&qr.r());
            (qr.q() * u, s, v)
        } else {
            let qr = matrix.transpose().qr();
            let (u, s, v) = square_svd(&qr.r());
            (v, s, qr.q() * u)
        };
        let smax = sigma.iter().cloned().fold(0.0, f64::max);
        Self {
            left,
            sigma,
            right,
            matrix,
            cutoff: rel_cutoff * smax,
        }
    }

    pub fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > self.cutoff).count()
    }

    pub fn condition(&self) -> f64 {
        let smax = self.sigma.iter().cloned().fold(0.0, f64::max);
        let smin = self.sigma.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin == 0.0 {
            f64::INFINITY
        } else {
            smax / smin
        }
    }

    /// Returns the minimum-norm minimiser and the residual norm `‖A x − b‖`.
    pub fn solve(&self, b: &DVector<f64>) -> (DVector<f64>, f64) {
        let mut y = self.left.tr_mul(b);
        for (yi, s) in y.iter_mut().zip(self.sigma.iter()) {
            *yi = if *s > self.cutoff { *yi / s } else { 0.0 };
        }
        let x = &self.right * y;
        let residual = (&self.matrix * &x - b).norm();
        (x, residual)
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `m^{-1/2}` for a Hermitian positive-definite matrix, with its condition number.
pub fn hermitian_inverse_sqrt(m: &CMatrix) -> Result<(CMatrix, f64)> {
    let eig = SymmetricEigen::new(m.clone());
    let vals = &eig.eigenvalues;
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::NumericalDegeneracy(alloc::format!(
            "Gram matrix not positive definite (min eigenvalue {lo:e})"
        )));
    }
    let d = CMatrix::from_diagonal(&DVector::from_fn(vals.len(), |i, _| c(1.0 / libm::sqrt(vals[i]), 0.0)));
    let v = &eig.eigenvectors;
    Ok((v * d * v.adjoint(), hi / lo))
}

/// Eigenvalues of a general real matrix, via the real Schur form.
pub fn general_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalDegeneracy("non-finite matrix entry".into()));
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalDegeneracy("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().cloned().collect())
}

/// `‖m + mᵀ‖_F`.
pub fn antisymmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m + m.transpose()).norm()
}

/// Inverse of a two-form matrix, failing on near-singular input.
pub fn invert_checked(m: &DMatrix<f64>, max_condition: f64) -> Result<DMatrix<f64>> {
    let ls = LeastSquares::new(m.clone(), 0.0);
    let condition = ls.condition();
    if !(condition < max_condition) {
        return Err(Error::DegenerateForm { condition });
    }
    m.clone().try_inverse().ok_or(Error::DegenerateForm { condition })
}
