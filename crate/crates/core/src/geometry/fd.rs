//! Central finite differences in chart coordinates.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::linalg::CMatrix;
use crate::{Error, Result};

use super::ChartPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    Central2,
    Central4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub scheme: FdScheme,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            scheme: FdScheme::Central2,
        }
    }
}

impl FdConfig {
    pub fn new(step: f64, scheme: FdScheme) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidSpec(alloc::format!("fd step must be > 0, got {step}")));
        }
        Ok(Self { step, scheme })
    }

    pub fn central2(step: f64) -> Self {
        Self {
            step,
            scheme: FdScheme::Central2,
        }
    }

    pub fn central4(step: f64) -> Self {
        Self {
            step,
            scheme: FdScheme::Central4,
        }
    }

    /// Stencil offsets (in units of `step`) and weights (before division by `step`).
    fn stencil(&self) -> &'static [(f64, f64)] {
        match self.scheme {
            FdScheme::Central2 => &[(1.0, 0.5), (-1.0, -0.5)],
            FdScheme::Central4 => &[
                (2.0, -1.0 / 12.0),
                (1.0, 8.0 / 12.0),
                (-1.0, -8.0 / 12.0),
                (-2.0, 1.0 / 12.0),
            ],
        }
    }

    /// Largest coordinate displacement the stencil reaches.
    pub fn reach(&self) -> f64 {
        match self.scheme {
            FdScheme::Central2 => self.step,
            FdScheme::Central4 => 2.0 * self.step,
        }
    }
}

/// Values that can be linearly combined by a difference stencil.
pub trait FdValue: Sized {
    fn combine(terms: &[(f64, Self)]) -> Self;
}

impl FdValue for f64 {
    fn combine(terms: &[(f64, Self)]) -> Self {
        terms.iter().map(|(w, v)| w * v).sum()
    }
}

impl FdValue for DVector<f64> {
    fn combine(terms: &[(f64, Self)]) -> Self {
        let mut acc = DVector::zeros(terms[0].1.len());
        for (w, v) in terms {
            acc.axpy(*w, v, 1.0);
        }
        acc
    }
}

impl FdValue for DMatrix<f64> {
    fn combine(terms: &[(f64, Self)]) -> Self {
        let (r, c) = terms[0].1.shape();
        let mut acc = DMatrix::zeros(r, c);
        for (w, v) in terms {
            acc += v * *w;
        }
        acc
    }
}

impl FdValue for CMatrix {
    fn combine(terms: &[(f64, Self)]) -> Self {
        let (r, c) = terms[0].1.shape();
        let mut acc = CMatrix::zeros(r, c);
        for (w, v) in terms {
            acc += v.map(|z| z * *w);
        }
        acc
    }
}

/// `∂f/∂coords_j` at `p` by the configured central stencil.
pub fn fd_partial<T, F>(mut f: F, p: &[f64], j: usize, fd: &FdConfig) -> Result<T>
where
    T: FdValue,
    F: FnMut(&[f64]) -> Result<T>,
{
    if j >= p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: j,
        });
    }
    let mut q: Vec<f64> = p.to_vec();
    let mut terms = Vec::with_capacity(4);
    for &(offset, weight) in fd.stencil() {
        q[j] = p[j] + offset * fd.step;
        terms.push((weight / fd.step, f(&q)?));
    }
    Ok(T::combine(&terms))
}

/// Every displaced coordinate vector [`fd_jacobian`] evaluates at `p`, in
/// evaluation order; the values are bitwise identical to the ones it uses.
pub fn stencil_points(p: &[f64], fd: &FdConfig) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(p.len() * fd.stencil().len());
    for j in 0..p.len() {
        for &(offset, _) in fd.stencil() {
            let mut q = p.to_vec();
            q[j] = p[j] + offset * fd.step;
            out.push(q);
        }
    }
    out
}

/// All partial derivatives `[∂_0 f, …, ∂_{d−1} f]`.
pub fn fd_jacobian<T, F>(mut f: F, p: &[f64], fd: &FdConfig) -> Result<Vec<T>>
where
    T: FdValue,
    F: FnMut(&[f64]) -> Result<T>,
{
    (0..p.len()).map(|j| fd_partial(&mut f, p, j, fd)).collect()
}

pub fn fd_gradient<F>(f: F, p: &[f64], fd: &FdConfig) -> Result<DVector<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    Ok(DVector::from_vec(fd_jacobian(f, p, fd)?))
}

/// Directional derivative of a plain scalar field along coordinate `j`.
pub fn fd_directional<F>(f: F, p: &ChartPoint, j: usize, fd: &FdConfig) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    fd_partial(|q: &[f64]| Ok(f(q)), &p.coords, j, fd).unwrap_or(f64::NAN)
}
