//! The PN structure of a Grassmannian orbit: KKS form, Bruhat–Poisson
//! tensor, the pencil `π_t`, and Gelfand–Tsetlin spectra.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::geometry::{
    base_fixed_point, ChartId, ChartPoint, EmbeddedPoint, GeneratorSolver, LocalFrame, OrbitSpec, TangentFrame,
};
use crate::linalg::{c, commutator, pairing, CMatrix, I};
use crate::pn::{hierarchy_bivector, Bivector, Endomorphism, ScalarField, TensorField, TensorKind, TwoForm};
use crate::{Error, Result};

mod calibration;
mod gt;

pub use calibration::{calibrate, match_spectra, Calibration, SpectrumMatch, CALIBRATION_TOL};
pub use gt::{
    gt_spectrum, interlacing_defect, minor_spectra, moment_minor, GtPattern, GtSpectrum, SlotKind, CONSTANT_TOL,
    DEFAULT_M0_GAP,
};

/// Condition number above which `ω` counts as degenerate.
pub const MAX_FORM_CONDITION: f64 = 1e10;

/// `c · Σ_{i<j} A_ij ∧ B_ij` with `A_ij = E_ij − E_ji`, `B_ij = i(E_ij + E_ji)`.
#[derive(Debug, Clone)]
pub struct RMatrixSpec {
    pub pairs: Vec<(CMatrix, CMatrix)>,
    pub c: f64,
}

impl RMatrixSpec {
    pub fn standard(n: usize, c_norm: f64) -> Result<Self> {
        if !(c_norm > 0.0) || !c_norm.is_finite() {
            return Err(Error::InvalidSpec("r-matrix constant must be positive".into()));
        }
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut a = CMatrix::zeros(n, n);
                a[(i, j)] = c(1.0, 0.0);
                a[(j, i)] = c(-1.0, 0.0);
                let mut b = CMatrix::zeros(n, n);
                b[(i, j)] = I;
                b[(j, i)] = I;
                pairs.push((a, b));
            }
        }
        Ok(Self { pairs, c: c_norm })
    }
}

/// `ω_ab = ⟨x, [X_a, X_b]⟩` with `[X_a, x] = frame_a`.
pub fn kks_form(spec: &OrbitSpec, p: &ChartPoint, frame: &TangentFrame) -> Result<TwoForm> {
    let x = crate::geometry::embed(spec, p)?;
    let solver = GeneratorSolver::new(&x);
    kks_with(&x, &solver, frame)
}

fn kks_with(x: &EmbeddedPoint, solver: &GeneratorSolver, frame: &TangentFrame) -> Result<TwoForm> {
    let gens = frame
        .basis
        .iter()
        .map(|v| solver.solve(v))
        .collect::<Result<Vec<_>>>()?;
    let d = gens.len();
    let mut w = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in (a + 1)..d {
            let v = pairing(&x.matrix, &commutator(&gens[a], &gens[b]));
            w[(a, b)] = v;
            w[(b, a)] = -v;
        }
    }
    let form = TwoForm(w);
    form.inverse(MAX_FORM_CONDITION)?;
    Ok(form)
}

/// Unitary carrying the base fixed point to `x`: the chart unitary with its
/// column blocks swapped.
fn base_unitary(spec: &OrbitSpec, chart_unitary: &CMatrix) -> CMatrix {
    let (n, k) = (spec.n, spec.k);
    let mut h = CMatrix::zeros(n, n);
    for j in 0..n {
        let src = if j < k { n - k + j } else { j - k };
        h.set_column(src, &chart_unitary.column(j));
    }
    h
}

fn wedge(a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>) -> DMatrix<f64> {
    a * b.transpose() - b * a.transpose()
}

/// `c·Σ [σ_x(hAh†) ∧ σ_x(hBh†) − σ_x(A) ∧ σ_x(B)]` where `h` carries the
/// base fixed point to `x`.
pub(crate) fn bruhat_with_unitary(r: &RMatrixSpec, local: &LocalFrame, h: &CMatrix) -> Result<Bivector> {
    let d = local.frame.basis.len();
    let mut out = DMatrix::zeros(d, d);
    let h_adj = h.adjoint();
    for (a, b) in &r.pairs {
        let left = wedge(
            &local.fundamental(&(h * a * &h_adj))?,
            &local.fundamental(&(h * b * &h_adj))?,
        );
        let right = wedge(&local.fundamental(a)?, &local.fundamental(b)?);
        out += (left - right) * r.c;
    }
    Ok(Bivector(out))
}

/// Bruhat–Poisson tensor at `p`, in the components of `frame`.
pub fn bruhat_poisson(spec: &OrbitSpec, r: &RMatrixSpec, p: &ChartPoint, frame: &TangentFrame) -> Result<Bivector> {
    let mut local = LocalFrame::new(spec, p)?;
    local.frame_solver = frame.solver();
    local.frame = frame.clone();
    let h = base_unitary(spec, &local.unitary);
    bruhat_with_unitary(r, &local, &h)
}

/// `π + t·ω⁻¹`.
pub fn pencil_bivector(pi: &Bivector, omega: &TwoForm, t: f64) -> Result<Bivector> {
    let inv = omega.inverse(MAX_FORM_CONDITION)?;
    Ok(Bivector(&pi.0 + inv.0 * t))
}

/// `N = π ∘ ω`.
pub fn nijenhuis_operator(pi: &Bivector, omega: &TwoForm) -> Endomorphism {
    Endomorphism(&pi.0 * &omega.0)
}

/// Model tensors evaluated at one point.
#[derive(Debug, Clone)]
pub struct ModelPoint {
    pub local: LocalFrame,
    pub omega: TwoForm,
    pub omega_inv: Bivector,
    pub pi: Bivector,
}

impl ModelPoint {
    pub fn n(&self) -> Endomorphism {
        nijenhuis_operator(&self.pi, &self.omega)
    }

    pub fn n_t(&self, t: f64) -> Endomorphism {
        self.n().shifted(t)
    }

    pub fn pi_t(&self, t: f64) -> Bivector {
        Bivector(&self.pi.0 + &self.omega_inv.0 * t)
    }

    /// `P_{j+1} = N_t^j ω⁻¹`.
    pub fn hierarchy(&self, j: usize, t: f64) -> Result<Bivector> {
        hierarchy_bivector(&self.omega_inv, &self.n_t(t), j)
    }
}

/// Which model tensor a [`HermitianModel::field`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelTensor {
    Omega,
    OmegaInv,
    Pi,
    PencilPi(f64),
    N,
    PencilN(f64),
    /// `N_t^j ω⁻¹`.
    Hierarchy {
        j: usize,
        t: f64,
    },
}

/// The calibrated model on one chart of one orbit.
#[derive(Debug, Clone)]
pub struct HermitianModel {
    pub spec: OrbitSpec,
    pub r: RMatrixSpec,
    pub kappa: f64,
    pub chart: ChartId,
    pub pattern: GtPattern,
}

impl HermitianModel {
    pub fn new(spec: OrbitSpec, c_norm: f64, kappa: f64, chart: ChartId, pattern: GtPattern) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidSpec("kappa must be positive".into()));
        }
        if pattern.levels.len() != spec.n {
            return Err(Error::InvalidSpec("GT pattern has the wrong number of levels".into()));
        }
        Ok(Self {
            r: RMatrixSpec::standard(spec.n, c_norm)?,
            spec,
            kappa,
            chart,
            pattern,
        })
    }

    pub fn point(&self, coords: &[f64]) -> Result<ChartPoint> {
        ChartPoint::new(&self.spec, coords.to_vec(), self.chart.clone())
    }

    pub fn evaluate(&self, coords: &[f64]) -> Result<ModelPoint> {
        let p = self.point(coords)?;
        let local = LocalFrame::new(&self.spec, &p)?;
        let omega = kks_with(&local.point, &local.generators, &local.frame)?;
        let omega_inv = omega.inverse(MAX_FORM_CONDITION)?;
        let h = base_unitary(&self.spec, &local.unitary);
        let pi = bruhat_with_unitary(&self.r, &local, &h)?;
        Ok(ModelPoint {
            local,
            omega,
            omega_inv,
            pi,
        })
    }

    pub fn gt_at(&self, coords: &[f64]) -> Result<GtSpectrum> {
        let x = crate::geometry::embed(&self.spec, &self.point(coords)?)?;
        gt_spectrum(&x, &self.spec, self.kappa, &self.pattern)
    }

    pub fn field(&self, which: ModelTensor) -> TensorField<'_> {
        let kind = match which {
            ModelTensor::Omega => TensorKind::TwoForm,
            ModelTensor::OmegaInv | ModelTensor::Pi | ModelTensor::PencilPi(_) => TensorKind::Bivector,
            ModelTensor::Hierarchy { .. } => TensorKind::Bivector,
            ModelTensor::N | ModelTensor::PencilN(_) => TensorKind::Endomorphism,
        };
        TensorField::new(kind, move |q: &[f64]| {
            let m = self.evaluate(q)?;
            Ok(match which {
                ModelTensor::Omega => m.omega.0,
                ModelTensor::OmegaInv => m.omega_inv.0,
                ModelTensor::Pi => m.pi.0,
                ModelTensor::PencilPi(t) => m.pi_t(t).0,
                ModelTensor::N => m.n().0,
                ModelTensor::PencilN(t) => m.n_t(t).0,
                ModelTensor::Hierarchy { j, t } => m.hierarchy(j, t)?.0,
            })
        })
    }

    /// The `i`-th entry of the flattened non-constant GT values.
    pub fn gt_field(&self, i: usize) -> ScalarField<'_> {
        ScalarField::new(move |q: &[f64]| {
            let gt = self.gt_at(q)?;
            gt.flat().get(i).copied().ok_or(Error::CountMismatch {
                expected: i + 1,
                got: gt.count(),
            })
        })
    }

    /// `I_k = Tr N_t^k / k` as a scalar field.
    pub fn hamiltonian_field(&self, k: usize, t: f64) -> ScalarField<'_> {
        ScalarField::new(move |q: &[f64]| Ok(crate::pn::trace_power(&self.evaluate(q)?.n_t(t), k)))
    }
}

/// Bruhat tensor at the base fixed point in the chart centred there.
pub fn base_point_bruhat(spec: &OrbitSpec, r: &RMatrixSpec) -> Result<Bivector> {
    let chart = crate::geometry::base_chart(spec);
    let p = ChartPoint::origin(spec, chart);
    debug_assert!((crate::geometry::embed(spec, &p)?.matrix - base_fixed_point(spec).matrix).norm() < 1e-12);
    let frame = crate::geometry::exact_tangent_frame(spec, &p)?;
    bruhat_poisson(spec, r, &p, &frame)
}

#[cfg(test)]
mod tests;
