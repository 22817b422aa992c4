//! Memoised model evaluations keyed by the exact bits of the chart coordinates.
//!
//! Finite-difference stencils revisit the same displaced coordinates many
//! times (every tensor jet at a point uses the same stencil), so model points
//! are evaluated once and shared. A [`Memo`] layers a private map for one
//! sample point over a read-only table prepared in parallel by [`Shared`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use pnkit_core::geometry::{stencil_points, ChartPoint, FdConfig};
use pnkit_core::models::{gt_spectrum, GtSpectrum, HermitianModel, ModelPoint, ModelTensor};
use pnkit_core::pn::{trace_power, ScalarField, TensorField, TensorKind};
use pnkit_core::{Error, Result};
use rayon::prelude::*;

type Key = Vec<u64>;

fn key(coords: &[f64]) -> Key {
    coords.iter().map(|v| v.to_bits()).collect()
}

/// Model points at every sample and its first-order stencil.
pub struct Shared<'m> {
    pub model: &'m HermitianModel,
    table: HashMap<Key, Arc<ModelPoint>>,
}

impl<'m> Shared<'m> {
    pub fn empty(model: &'m HermitianModel) -> Self {
        Self {
            model,
            table: HashMap::new(),
        }
    }

    /// Evaluates the model at each of `points` with its stencil for `fd`, and
    /// at each of `bare`; failed evaluations are left out and surface again
    /// when a check asks for them.
    pub fn prepare(model: &'m HermitianModel, points: &[ChartPoint], bare: &[ChartPoint], fd: &FdConfig) -> Self {
        let coords: Vec<Vec<f64>> = points
            .iter()
            .flat_map(|p| std::iter::once(p.coords.clone()).chain(stencil_points(&p.coords, fd)))
            .chain(bare.iter().map(|p| p.coords.clone()))
            .collect();
        let table = coords
            .into_par_iter()
            .filter_map(|q| model.evaluate(&q).ok().map(|m| (key(&q), Arc::new(m))))
            .collect();
        Self { model, table }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn memo(&self) -> Memo<'_, 'm> {
        Memo {
            shared: self,
            local: Mutex::new(HashMap::new()),
        }
    }
}

/// Per-point view: shared table first, then a private map.
pub struct Memo<'s, 'm> {
    shared: &'s Shared<'m>,
    local: Mutex<HashMap<Key, Arc<ModelPoint>>>,
}

impl Memo<'_, '_> {
    pub fn model(&self) -> &HermitianModel {
        self.shared.model
    }

    pub fn get(&self, coords: &[f64]) -> Result<Arc<ModelPoint>> {
        let k = key(coords);
        if let Some(m) = self.shared.table.get(&k) {
            return Ok(m.clone());
        }
        if let Some(m) = self.local.lock().expect("memo lock").get(&k) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.shared.model.evaluate(coords)?);
        self.local.lock().expect("memo lock").insert(k, m.clone());
        Ok(m)
    }

    pub fn gt(&self, coords: &[f64]) -> Result<GtSpectrum> {
        let model = self.model();
        gt_spectrum(&self.get(coords)?.local.point, &model.spec, model.kappa, &model.pattern)
    }

    /// Cached counterpart of [`HermitianModel::field`].
    pub fn field(&self, which: ModelTensor) -> TensorField<'_> {
        let kind = match which {
            ModelTensor::Omega => TensorKind::TwoForm,
            ModelTensor::N | ModelTensor::PencilN(_) => TensorKind::Endomorphism,
            _ => TensorKind::Bivector,
        };
        TensorField::new(kind, move |q: &[f64]| {
            let m = self.get(q)?;
            Ok(match which {
                ModelTensor::Omega => m.omega.0.clone(),
                ModelTensor::OmegaInv => m.omega_inv.0.clone(),
                ModelTensor::Pi => m.pi.0.clone(),
                ModelTensor::PencilPi(t) => m.pi_t(t).0,
                ModelTensor::N => m.n().0,
                ModelTensor::PencilN(t) => m.n_t(t).0,
                ModelTensor::Hierarchy { j, t } => m.hierarchy(j, t)?.0,
            })
        })
    }

    /// `I_k` of `N_t`.
    pub fn hamiltonian(&self, k: usize, t: f64) -> ScalarField<'_> {
        ScalarField::new(move |q: &[f64]| Ok(trace_power(&self.get(q)?.n_t(t), k)))
    }

    /// `i`-th flattened non-constant GT value.
    pub fn gt_value(&self, i: usize) -> ScalarField<'_> {
        ScalarField::new(move |q: &[f64]| {
            let gt = self.gt(q)?;
            gt.flat().get(i).copied().ok_or(Error::CountMismatch {
                expected: i + 1,
                got: gt.count(),
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pnkit_core::geometry::{ChartId, OrbitSpec};
    use pnkit_core::models::GtPattern;

    #[test]
    fn memo_agrees_with_direct_evaluation() {
        let spec = OrbitSpec::projective(2).unwrap();
        let model = HermitianModel::new(spec, 0.5, 2.0, ChartId::standard(1), GtPattern::counting_rule(&spec)).unwrap();
        let p = model.point(&[0.1, -0.3, 0.4, 0.2]).unwrap();
        let fd = FdConfig::central2(1e-5);
        let shared = Shared::prepare(&model, std::slice::from_ref(&p), &[], &fd);
        assert_eq!(shared.len(), 1 + 2 * 4);
        let memo = shared.memo();
        let q = [0.1, -0.3, 0.4, 0.25];
        for which in [
            ModelTensor::N,
            ModelTensor::PencilPi(1.0),
            ModelTensor::Hierarchy { j: 2, t: -1.0 },
        ] {
            for coords in [&p.coords[..], &q[..]] {
                let cached = memo.field(which).eval(coords).unwrap();
                let direct = model.field(which).eval(coords).unwrap();
                assert_eq!(cached, direct);
            }
        }
        assert_eq!(memo.gt(&q).unwrap(), model.gt_at(&q).unwrap());
    }
}
