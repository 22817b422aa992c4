//! Non-model tensors that must fail the identities the suite verifies.

use nalgebra::DMatrix;
use pnkit_core::models::ModelTensor;
use pnkit_core::pn::{check_eigen_equation, schouten_scaled, torsion_scaled, ScalarField, TensorField, TensorKind};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use pnkit_core::Result;
use rayon::prelude::*;

use crate::checks::Context;
use crate::report::{CheckResult, Outcome, Tally};
use crate::sampling::{rng, Stream};

/// Control fields are checked on at most this many sample points.
pub const CONTROL_SAMPLES: usize = 20;

fn gaussian_matrix(r: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(r))
}

/// `A + Σ_l B_l q_l + Σ_{l,m} C_{lm} q_l q_m` with Gaussian coefficients.
#[derive(Debug, Clone)]
pub struct PolynomialField {
    constant: DMatrix<f64>,
    linear: Vec<DMatrix<f64>>,
    quadratic: Vec<Vec<DMatrix<f64>>>,
    antisymmetric: bool,
}

impl PolynomialField {
    pub fn random(r: &mut ChaCha8Rng, d: usize, degree: usize, antisymmetric: bool) -> Self {
        let constant = gaussian_matrix(r, d);
        let linear = (0..d).map(|_| gaussian_matrix(r, d)).collect();
        let quadratic = if degree >= 2 {
            (0..d)
                .map(|_| (0..d).map(|_| gaussian_matrix(r, d)).collect())
                .collect()
        } else {
            Vec::new()
        };
        Self {
            constant,
            linear,
            quadratic,
            antisymmetric,
        }
    }

    pub fn eval(&self, q: &[f64]) -> DMatrix<f64> {
        let mut m = self.constant.clone();
        for (l, b) in self.linear.iter().enumerate() {
            m += b * q[l];
        }
        for (l, row) in self.quadratic.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                m += c * (q[l] * q[k]);
            }
        }
        if self.antisymmetric {
            (&m - m.transpose()) * 0.5
        } else {
            m
        }
    }

    pub fn field(&self, kind: TensorKind) -> TensorField<'_> {
        TensorField::new(kind, move |q: &[f64]| Ok(self.eval(q)))
    }
}

/// Control residuals of a random quadratic `N` (torsion), a random linear
/// bivector (Jacobi and compatibility with the model `ω⁻¹`), and a coordinate
/// function against the model `N` (eigenvalue equation).
///
/// A control fails its identity when the largest residual over the sample
/// exceeds the tolerance; the reported value is the smallest such maximum.
pub fn negative_controls(ctx: &Context<'_>) -> CheckResult {
    let d = ctx.spec.dim();
    let mut r = rng(ctx.cfg.seed, Stream::Controls);
    let n = PolynomialField::random(&mut r, d, 2, false);
    let p = PolynomialField::random(&mut r, d, 1, true);
    // In dimension 2 every bivector is Poisson, so the Schouten controls are void.
    let schouten = d >= 3;
    let labels: &[&str] = if schouten {
        &["torsion", "jacobi", "compatibility", "eigen_equation"]
    } else {
        &["torsion", "eigen_equation"]
    };
    let points = &ctx.eval[..ctx.eval.len().min(CONTROL_SAMPLES)];
    let outcomes: Vec<Result<Vec<f64>>> = points
        .par_iter()
        .map(|x| {
            let memo = ctx.shared.memo();
            let fd = ctx.fd();
            let nf = n.field(TensorKind::Endomorphism);
            let pf = p.field(TensorKind::Bivector);
            let mut out = vec![torsion_scaled(&nf, x, &fd)?.relative()];
            if schouten {
                out.push(schouten_scaled(&pf, &pf, x, &fd)?.relative());
                out.push(schouten_scaled(&pf, &memo.field(ModelTensor::OmegaInv), x, &fd)?.relative());
            }
            let coord = ScalarField::new(|q: &[f64]| Ok(q[0]));
            out.push(check_eigen_equation(&coord, &memo.field(ModelTensor::N), x, &fd)?);
            Ok(out)
        })
        .collect();

    let mut tally = Tally::at_least("negative_controls", ctx.cfg.tol("negative"));
    // (largest residual, point index) per control
    let mut best: Vec<Option<(f64, usize)>> = vec![None; labels.len()];
    let (mut evaluated, mut failed) = (0, 0);
    for (i, (x, outcome)) in points.iter().zip(outcomes).enumerate() {
        match outcome {
            Ok(values) => {
                evaluated += 1;
                for (slot, v) in best.iter_mut().zip(values) {
                    if slot.is_none_or(|(b, _)| v > b || v.is_nan()) {
                        *slot = Some((v, i));
                    }
                }
            }
            Err(e) => {
                failed += 1;
                tally.record(&x.coords, Outcome::Failed(e.to_string()));
            }
        }
    }
    let mut parts = Vec::with_capacity(labels.len());
    for (label, slot) in labels.iter().zip(&best) {
        if let Some((v, i)) = slot {
            tally.value(&points[*i].coords, *v);
            parts.push(format!("{label}: {v:.3e}"));
        }
    }
    tally.note(parts.join(", "));
    tally.note("per control the largest residual over the sample; max_residual is the smallest of these");
    if !schouten {
        tally.note(
            "dimension 2: Schouten brackets of bivectors vanish identically, Jacobi and compatibility controls omitted",
        );
    }
    let mut result = tally.finish();
    result.points_evaluated = evaluated + failed;
    result
}
