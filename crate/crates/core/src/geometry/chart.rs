use alloc::vec::Vec;

use nalgebra::Complex;

use crate::linalg::CMatrix;
use crate::{Error, Result};

use super::OrbitSpec;

/// Affine chart of `Gr(k, n)` given by the `k` pivotal rows of the
/// column-span representative `M` (those rows of `M` are the identity).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartId {
    pivots: Vec<usize>,
}

impl ChartId {
    /// The chart centred at `ρ`: pivots `0..k`.
    pub fn standard(k: usize) -> Self {
        Self {
            pivots: (0..k).collect(),
        }
    }

    pub fn new(spec: &OrbitSpec, mut pivots: Vec<usize>) -> Result<Self> {
        pivots.sort_unstable();
        pivots.dedup();
        if pivots.len() != spec.k || pivots.iter().any(|&p| p >= spec.n) {
            return Err(Error::InvalidSpec(alloc::format!(
                "chart needs {} distinct pivots below {}",
                spec.k,
                spec.n
            )));
        }
        Ok(Self { pivots })
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Row indices not in the pivot set, ascending.
    pub fn free_rows(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|r| !self.pivots.contains(r)).collect()
    }

    pub fn is_standard(&self) -> bool {
        self.pivots.iter().enumerate().all(|(i, &p)| i == p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub coords: Vec<f64>,
    pub chart: ChartId,
}

impl ChartPoint {
    pub fn new(spec: &OrbitSpec, coords: Vec<f64>, chart: ChartId) -> Result<Self> {
        if coords.len() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NumericalDegeneracy("non-finite chart coordinate".into()));
        }
        Ok(Self { coords, chart })
    }

    pub fn standard(spec: &OrbitSpec, coords: Vec<f64>) -> Result<Self> {
        Self::new(spec, coords, ChartId::standard(spec.k))
    }

    pub fn origin(spec: &OrbitSpec, chart: ChartId) -> Self {
        Self {
            coords: alloc::vec![0.0; spec.dim()],
            chart,
        }
    }

    pub fn with_coords(&self, coords: &[f64]) -> Self {
        Self {
            coords: coords.to_vec(),
            chart: self.chart.clone(),
        }
    }
}

/// The `(n−k)×k` block `W`: coordinate `r·k + c` is `Re W[r, c]`, and the
/// same index shifted by `k(n−k)` is `Im W[r, c]`.
pub(crate) fn coords_to_block(spec: &OrbitSpec, coords: &[f64]) -> CMatrix {
    let (rows, cols) = (spec.n - spec.k, spec.k);
    let m = rows * cols;
    CMatrix::from_fn(rows, cols, |r, c| {
        let idx = r * cols + c;
        Complex::new(coords[idx], coords[m + idx])
    })
}

/// Places `W` and `I_k` into the `n×k` span representative.
pub(crate) fn span_from_block(spec: &OrbitSpec, chart: &ChartId, block: &CMatrix) -> CMatrix {
    let mut span = CMatrix::zeros(spec.n, spec.k);
    for (i, &p) in chart.pivots().iter().enumerate() {
        span[(p, i)] = Complex::new(1.0, 0.0);
    }
    for (r, &row) in chart.free_rows(spec.n).iter().enumerate() {
        for c in 0..spec.k {
            span[(row, c)] = block[(r, c)];
        }
    }
    span
}

/// `n×(n−k)` matrix spanning the orthogonal complement of the span:
/// `−W†` on the pivot rows and the identity on the free rows.
pub(crate) fn complement_from_block(spec: &OrbitSpec, chart: &ChartId, block: &CMatrix) -> CMatrix {
    let free = chart.free_rows(spec.n);
    let mut comp = CMatrix::zeros(spec.n, spec.n - spec.k);
    for (i, &p) in chart.pivots().iter().enumerate() {
        for r in 0..free.len() {
            comp[(p, r)] = -block[(r, i)].conj();
        }
    }
    for (r, &row) in free.iter().enumerate() {
        comp[(row, r)] = Complex::new(1.0, 0.0);
    }
    comp
}
