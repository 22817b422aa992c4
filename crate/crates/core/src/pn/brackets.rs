use nalgebra::{DMatrix, DVector};

use crate::geometry::{fd_gradient, fd_jacobian, ChartPoint, FdConfig};
use crate::Result;

use super::tensor::{Bivector, Jet, ScalarField, Tensor3, TensorField, TensorKind, VectorField};

/// Schouten bracket of two bivector fields,
/// `[P,Q]^{ijk} = Σ_l (P^{li}∂_l Q^{jk} + P^{lj}∂_l Q^{ki} + P^{lk}∂_l Q^{ij}) + (P ↔ Q)`.
/// `[P,P] = 0` is the Jacobi identity.
pub fn schouten_bivector_bivector(
    p_field: &TensorField<'_>,
    q_field: &TensorField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<Tensor3> {
    p_field.expect(TensorKind::Bivector)?;
    q_field.expect(TensorKind::Bivector)?;
    let pj = p_field.jet(p, fd)?;
    let qj = q_field.jet(p, fd)?;
    Ok(schouten_from_jets(&pj, &qj))
}

/// A residual with the magnitude of the terms that cancel in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledResidual {
    pub residual: f64,
    pub scale: f64,
}

impl ScaledResidual {
    /// `residual / max(1, scale)`: absolute for small tensors, relative for
    /// large ones, where finite-difference roundoff grows with the terms.
    pub fn relative(&self) -> f64 {
        self.residual / self.scale.max(1.0)
    }
}

pub(crate) fn schouten_from_jets(pj: &Jet, qj: &Jet) -> Tensor3 {
    schouten_terms(pj, qj, |v| v)
}

/// `schouten_from_jets` with every product passed through `g` before summing.
fn schouten_terms(pj: &Jet, qj: &Jet, g: fn(f64) -> f64) -> Tensor3 {
    let d = pj.value.nrows();
    let mut out = Tensor3::zeros(d);
    let half = |a: &Jet, b: &Jet, i: usize, j: usize, k: usize| -> f64 {
        let mut s = 0.0;
        for l in 0..d {
            let db = &b.partials[l];
            s += g(a.value[(l, i)] * db[(j, k)]) + g(a.value[(l, j)] * db[(k, i)]) + g(a.value[(l, k)] * db[(i, j)]);
        }
        s
    };
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                out.set(i, j, k, half(pj, qj, i, j, k) + half(qj, pj, i, j, k));
            }
        }
    }
    out
}

/// Largest Schouten component, scaled by the largest sum of absolute terms.
pub fn schouten_scaled(
    p_field: &TensorField<'_>,
    q_field: &TensorField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<ScaledResidual> {
    p_field.expect(TensorKind::Bivector)?;
    q_field.expect(TensorKind::Bivector)?;
    let pj = p_field.jet(p, fd)?;
    let qj = q_field.jet(p, fd)?;
    Ok(ScaledResidual {
        residual: schouten_terms(&pj, &qj, |v| v).max_abs(),
        scale: schouten_terms(&pj, &qj, f64::abs).max_abs(),
    })
}

/// `(L_v P)^{ij} = v^l ∂_l P^{ij} − P^{lj} ∂_l v^i − P^{il} ∂_l v^j`.
pub fn lie_derivative_bivector(
    v: &VectorField<'_>,
    p_field: &TensorField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<Bivector> {
    p_field.expect(TensorKind::Bivector)?;
    let pj = p_field.jet(p, fd)?;
    let v0 = v.eval(&p.coords)?;
    let dv: alloc::vec::Vec<DVector<f64>> = fd_jacobian(|q: &[f64]| v.eval(q), &p.coords, fd)?;
    let d = pj.value.nrows();
    let out = DMatrix::from_fn(d, d, |i, j| {
        let mut s = 0.0;
        for l in 0..d {
            s += v0[l] * pj.partials[l][(i, j)] - pj.value[(l, j)] * dv[l][i] - pj.value[(i, l)] * dv[l][j];
        }
        s
    });
    Ok(Bivector(out))
}

/// Torsion components `T^i_{ab}` from a jet of `N`, for coordinate fields
/// `e_a, e_b` (which commute):
/// `T^i_{ab} = N^l_a ∂_l N^i_b − N^l_b ∂_l N^i_a − N^i_j (∂_a N^j_b − ∂_b N^j_a)`.
fn torsion_component(jet: &Jet, a: usize, b: usize) -> DVector<f64> {
    let n = &jet.value;
    let d = n.nrows();
    let mut bracket = DVector::zeros(d);
    let mut inner = DVector::zeros(d);
    for i in 0..d {
        let mut s = 0.0;
        for l in 0..d {
            s += n[(l, a)] * jet.partials[l][(i, b)] - n[(l, b)] * jet.partials[l][(i, a)];
        }
        bracket[i] = s;
        inner[i] = jet.partials[a][(i, b)] - jet.partials[b][(i, a)];
    }
    bracket - n * inner
}

/// Sum of the absolute values of the terms of `torsion_component`.
fn torsion_magnitude(jet: &Jet, a: usize, b: usize) -> DVector<f64> {
    let n = &jet.value;
    let d = n.nrows();
    DVector::from_fn(d, |i, _| {
        let mut s = 0.0;
        for l in 0..d {
            s += (n[(l, a)] * jet.partials[l][(i, b)]).abs() + (n[(l, b)] * jet.partials[l][(i, a)]).abs();
            s += (n[(i, l)] * jet.partials[a][(l, b)]).abs() + (n[(i, l)] * jet.partials[b][(l, a)]).abs();
        }
        s
    })
}

/// Largest torsion component, scaled by the largest sum of absolute terms.
pub fn torsion_scaled(n_field: &TensorField<'_>, p: &ChartPoint, fd: &FdConfig) -> Result<ScaledResidual> {
    n_field.expect(TensorKind::Endomorphism)?;
    let jet = n_field.jet(p, fd)?;
    let d = jet.value.nrows();
    let (mut residual, mut scale) = (0.0f64, 0.0f64);
    for a in 0..d {
        for b in (a + 1)..d {
            residual = residual.max(torsion_component(&jet, a, b).amax());
            scale = scale.max(torsion_magnitude(&jet, a, b).amax());
        }
    }
    Ok(ScaledResidual { residual, scale })
}

/// `T(N)(e_a, e_b)` at `p`.
pub fn nijenhuis_torsion(
    n_field: &TensorField<'_>,
    a: usize,
    b: usize,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<DVector<f64>> {
    n_field.expect(TensorKind::Endomorphism)?;
    let jet = n_field.jet(p, fd)?;
    Ok(torsion_component(&jet, a, b))
}

/// Full torsion tensor, entry `(i, a, b)` = `T^i_{ab}`, from a single jet.
pub fn nijenhuis_torsion_all(n_field: &TensorField<'_>, p: &ChartPoint, fd: &FdConfig) -> Result<Tensor3> {
    n_field.expect(TensorKind::Endomorphism)?;
    let jet = n_field.jet(p, fd)?;
    Ok(torsion_from_jet(&jet))
}

pub(crate) fn torsion_from_jet(jet: &Jet) -> Tensor3 {
    let d = jet.value.nrows();
    let mut out = Tensor3::zeros(d);
    for a in 0..d {
        for b in (a + 1)..d {
            let t = torsion_component(jet, a, b);
            for i in 0..d {
                out.set(i, a, b, t[i]);
                out.set(i, b, a, -t[i]);
            }
        }
    }
    out
}

/// `⟨P, df ∧ dg⟩ = df_i P^{ij} dg_j`.
pub fn poisson_bracket(p: &Bivector, df: &DVector<f64>, dg: &DVector<f64>) -> f64 {
    df.dot(&(&p.0 * dg))
}

/// [`poisson_bracket`] with the sum of `|df_i P^{ij} dg_j|` as scale.
pub fn poisson_bracket_scaled(p: &Bivector, df: &DVector<f64>, dg: &DVector<f64>) -> ScaledResidual {
    let mut scale = 0.0;
    for (i, a) in df.iter().enumerate() {
        for (j, b) in dg.iter().enumerate() {
            scale += (a * p.0[(i, j)] * b).abs();
        }
    }
    ScaledResidual {
        residual: poisson_bracket(p, df, dg).abs(),
        scale,
    }
}

/// Koszul bracket `{df, dg}_P = L_{P(df)} dg − L_{P(dg)} df − d⟨P, df∧dg⟩`
/// for exact arguments, with `P(α)^j = α_i P^{ij}`. On exact forms each Lie
/// derivative is itself exact, `L_X dg = d(X·∇g)`, so the three terms are
/// gradients of scalar functions.
pub fn koszul_bracket(
    p_field: &TensorField<'_>,
    f: &ScalarField<'_>,
    g: &ScalarField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<DVector<f64>> {
    let [a, b, c] = koszul_terms(p_field, f, g, p, fd)?;
    Ok(a - b - c)
}

/// Largest component of [`koszul_bracket`], scaled by its largest term.
pub fn koszul_scaled(
    p_field: &TensorField<'_>,
    f: &ScalarField<'_>,
    g: &ScalarField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<ScaledResidual> {
    let [a, b, c] = koszul_terms(p_field, f, g, p, fd)?;
    let scale = a.amax().max(b.amax()).max(c.amax());
    Ok(ScaledResidual {
        residual: (a - b - c).amax(),
        scale,
    })
}

fn koszul_terms(
    p_field: &TensorField<'_>,
    f: &ScalarField<'_>,
    g: &ScalarField<'_>,
    p: &ChartPoint,
    fd: &FdConfig,
) -> Result<[DVector<f64>; 3]> {
    p_field.expect(TensorKind::Bivector)?;
    let grad = |s: &ScalarField<'_>, q: &[f64]| fd_gradient(|r: &[f64]| s.eval(r), q, fd);
    let hamiltonian = |alpha: &DVector<f64>, q: &[f64]| -> Result<DVector<f64>> { Ok(p_field.eval(q)?.tr_mul(alpha)) };
    let lie_f_g = fd_gradient(
        |q: &[f64]| Ok(hamiltonian(&grad(f, q)?, q)?.dot(&grad(g, q)?)),
        &p.coords,
        fd,
    )?;
    let lie_g_f = fd_gradient(
        |q: &[f64]| Ok(hamiltonian(&grad(g, q)?, q)?.dot(&grad(f, q)?)),
        &p.coords,
        fd,
    )?;
    let pairing = fd_gradient(
        |q: &[f64]| {
            let pb = Bivector(p_field.eval(q)?);
            Ok(poisson_bracket(&pb, &grad(f, q)?, &grad(g, q)?))
        },
        &p.coords,
        fd,
    )?;
    Ok([lie_f_g, lie_g_f, pairing])
}
