use nalgebra::{DMatrix, DVector};

use crate::geometry::{fd_gradient, fd_jacobian, ChartPoint, FdConfig};
use crate::{Error, Result};

use super::tensor::{Bivector, Endomorphism, ScalarField, TensorField, TensorKind};

/// Relative antisymmetry tolerance for `N^j P`.
pub const HIERARCHY_ASYM_TOL: f64 = 1e-8;

/// Level `j` of the PN hierarchy, `P_{j+1} = N^j P`, with the index `k` of the
/// canonical hamiltonian `I_k` evaluated alongside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchyLevel {
    pub j: usize,
    pub k: usize,
}

/// `N^j P`, rejected when it fails to be antisymmetric.
pub fn hierarchy_bivector(p: &Bivector, n: &Endomorphism, j: usize) -> Result<Bivector> {
    let mut out = p.0.clone();
    for _ in 0..j {
        out = &n.0 * out;
    }
    let out = Bivector(out);
    let residual = out.antisymmetry_defect();
    if residual > HIERARCHY_ASYM_TOL * out.0.norm().max(1.0) {
        return Err(Error::AsymmetryResidual { residual });
    }
    Ok(out)
}

/// `‖N P − P Nᵀ‖_F`.
pub fn check_np_symmetry(p: &Bivector, n: &Endomorphism) -> f64 {
    (&n.0 * &p.0 - &p.0 * n.0.transpose()).norm()
}

/// `Tr(N^k) / k`.
pub fn trace_power(n: &Endomorphism, k: usize) -> f64 {
    assert!(k >= 1, "canonical hamiltonians start at k = 1");
    let mut m = n.0.clone();
    for _ in 1..k {
        m = &n.0 * m;
    }
    m.trace() / k as f64
}

/// `I_k = Tr(N^k)/k` of the field at `p`.
pub fn canonical_hamiltonian(n_field: &TensorField<'_>, k: usize, p: &ChartPoint) -> Result<f64> {
    n_field.expect(TensorKind::Endomorphism)?;
    Ok(trace_power(&Endomorphism(n_field.at(p)?), k))
}

fn hamiltonian_gradient(n_field: &TensorField<'_>, k: usize, p: &ChartPoint, fd: &FdConfig) -> Result<DVector<f64>> {
    fd_gradient(
        |q: &[f64]| Ok(trace_power(&Endomorphism(n_field.eval(q)?), k)),
        &p.coords,
        fd,
    )
}

/// `‖Nᵀ ∇I_k − ∇I_{k+1}‖`.
pub fn check_lenart_canonical(n_field: &TensorField<'_>, k: usize, p: &ChartPoint, fd: &FdConfig) -> Result<f64> {
    n_field.expect(TensorKind::Endomorphism)?;
    let n = n_field.at(p)?;
    let lhs = n.tr_mul(&hamiltonian_gradient(n_field, k, p, fd)?);
    let rhs = hamiltonian_gradient(n_field, k + 1, p, fd)?;
    Ok((lhs - rhs).norm())
}

/// `log det(N + t)`, failing when `|det| < min_det`.
pub fn logdet_shifted(n: &Endomorphism, t: f64, min_det: f64) -> Result<f64> {
    let det = n.shifted(t).0.determinant();
    if !(det.abs() >= min_det) {
        return Err(Error::SingularNt { det });
    }
    Ok(libm::log(det.abs()))
}

/// `‖(N + t)ᵀ ∇ log det(N + t) − ∇ I_1‖`; every stencil point must keep
/// `|det(N + t)| ≥ min_det`.
pub fn check_logdet_extension(
    n_field: &TensorField<'_>,
    t: f64,
    p: &ChartPoint,
    fd: &FdConfig,
    min_det: f64,
) -> Result<f64> {
    n_field.expect(TensorKind::Endomorphism)?;
    let nt = Endomorphism(n_field.at(p)?).shifted(t);
    logdet_shifted(&Endomorphism(n_field.at(p)?), t, min_det)?;
    let grad0 = fd_gradient(
        |q: &[f64]| logdet_shifted(&Endomorphism(n_field.eval(q)?), t, min_det),
        &p.coords,
        fd,
    )?;
    let grad1 = hamiltonian_gradient(n_field, 1, p, fd)?;
    Ok((nt.0.tr_mul(&grad0) - grad1).norm())
}

/// `‖Nᵀ ∇λ − λ(p) ∇λ‖`.
pub fn check_eigen_equation(
    lambda: &ScalarField<'_>,
    n_field: &TensorField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<f64> {
    n_field.expect(TensorKind::Endomorphism)?;
    let value = lambda.eval(&p.coords)?;
    let grad = fd_gradient(|q: &[f64]| lambda.eval(q), &p.coords, fd)?;
    let n = n_field.at(p)?;
    Ok((n.tr_mul(&grad) - &grad * value).norm())
}

fn curl_norm(jacobian: &[DVector<f64>]) -> f64 {
    // jacobian[i][j] = ∂_i α_j
    let d = jacobian.len();
    let m = DMatrix::from_fn(d, d, |i, j| jacobian[i][j] - jacobian[j][i]);
    m.norm()
}

/// `(‖d(dλ)‖, ‖d(Nᵀ dλ)‖)`: the first is the finite-difference noise floor of
/// an exact form, the second vanishes when `dλ` is `d_N`-closed.
pub fn hamiltonian_form_residual(
    lambda: &ScalarField<'_>,
    n_field: &TensorField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<(f64, f64)> {
    n_field.expect(TensorKind::Endomorphism)?;
    let grad = |q: &[f64]| fd_gradient(|r: &[f64]| lambda.eval(r), q, fd);
    let hessian = fd_jacobian(|q: &[f64]| grad(q), &p.coords, fd)?;
    let twisted = fd_jacobian(|q: &[f64]| Ok(n_field.eval(q)?.tr_mul(&grad(q)?)), &p.coords, fd)?;
    Ok((curl_norm(&hessian), curl_norm(&twisted)))
}

/// `(det B, det A)` with `det B = Π_{i<j}(λ_j − λ_i)` and
/// `det A = (Π_i λ_i) det B`.
pub fn vandermonde_checks(lambdas: &[f64]) -> (f64, f64) {
    let mut det_b = 1.0;
    for j in 0..lambdas.len() {
        for i in 0..j {
            det_b *= lambdas[j] - lambdas[i];
        }
    }
    let prod: f64 = lambdas.iter().product();
    (det_b, prod * det_b)
}
