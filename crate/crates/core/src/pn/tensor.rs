use alloc::boxed::Box;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::geometry::{fd_jacobian, ChartPoint, FdConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    /// Contravariant antisymmetric `P^{ij}`.
    Bivector,
    /// Covariant antisymmetric `ω_{ij}`.
    TwoForm,
    /// Mixed `N^i_j`.
    Endomorphism,
}

impl TensorKind {
    pub fn name(self) -> &'static str {
        match self {
            TensorKind::Bivector => "bivector",
            TensorKind::TwoForm => "two-form",
            TensorKind::Endomorphism => "endomorphism",
        }
    }
}

/// Bivector components `P^{ij}` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivector(pub DMatrix<f64>);

/// Two-form components `ω_{ij}` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm(pub DMatrix<f64>);

/// Endomorphism components `N^i_j` at a point (row `i`, column `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism(pub DMatrix<f64>);

impl Bivector {
    pub fn antisymmetry_defect(&self) -> f64 {
        crate::linalg::antisymmetry_defect(&self.0)
    }
}

impl TwoForm {
    /// The Poisson bivector `ω⁻¹` (matrix inverse of the components).
    pub fn inverse(&self, max_condition: f64) -> Result<Bivector> {
        crate::linalg::invert_checked(&self.0, max_condition).map(Bivector)
    }
}

impl Endomorphism {
    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// `N + t·id`.
    pub fn shifted(&self, t: f64) -> Self {
        let dim = self.0.nrows();
        Self(&self.0 + DMatrix::identity(dim, dim) * t)
    }

    pub fn dual(&self) -> DMatrix<f64> {
        self.0.transpose()
    }
}

type MatrixEval<'a> = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'a;

/// A tensor field on one chart: an evaluator from coordinates to components.
pub struct TensorField<'a> {
    kind: TensorKind,
    eval: Box<MatrixEval<'a>>,
}

impl<'a> TensorField<'a> {
    pub fn new<F>(kind: TensorKind, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'a,
    {
        Self {
            kind,
            eval: Box::new(eval),
        }
    }

    /// Field with the same components everywhere.
    pub fn constant(kind: TensorKind, value: DMatrix<f64>) -> Self {
        Self::new(kind, move |_| Ok(value.clone()))
    }

    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    pub fn expect(&self, kind: TensorKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind.name(),
                got: self.kind.name(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, coords: &[f64]) -> Result<DMatrix<f64>> {
        (self.eval)(coords)
    }

    pub fn at(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        self.eval(&p.coords)
    }

    /// Value and all first partials at `p`.
    pub fn jet(&self, p: &ChartPoint, fd: &FdConfig) -> Result<Jet> {
        Ok(Jet {
            value: self.at(p)?,
            partials: fd_jacobian(|q: &[f64]| self.eval(q), &p.coords, fd)?,
        })
    }
}

impl core::fmt::Debug for TensorField<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("TensorField").field("kind", &self.kind).finish()
    }
}

/// Components and first derivatives of a tensor field at one point.
#[derive(Debug, Clone)]
pub struct Jet {
    pub value: DMatrix<f64>,
    /// `partials[l] = ∂_l` of the components.
    pub partials: Vec<DMatrix<f64>>,
}

type ScalarEval<'a> = dyn Fn(&[f64]) -> Result<f64> + Send + Sync + 'a;

pub struct ScalarField<'a>(Box<ScalarEval<'a>>);

impl<'a> ScalarField<'a> {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(&[f64]) -> Result<f64> + Send + Sync + 'a,
    {
        Self(Box::new(eval))
    }

    pub fn eval(&self, coords: &[f64]) -> Result<f64> {
        (self.0)(coords)
    }
}

type VectorEval<'a> = dyn Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync + 'a;

pub struct VectorField<'a>(Box<VectorEval<'a>>);

impl<'a> VectorField<'a> {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync + 'a,
    {
        Self(Box::new(eval))
    }

    pub fn eval(&self, coords: &[f64]) -> Result<DVector<f64>> {
        (self.0)(coords)
    }
}

/// Dense rank-3 array `T[i][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: alloc::vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.dim + j) * self.dim + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest violation of total antisymmetry.
    pub fn antisymmetry_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = self.get(i, j, k);
                    worst = worst
                        .max((v + self.get(j, i, k)).abs())
                        .max((v + self.get(i, k, j)).abs())
                        .max((v + self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}
