//! Affine charts on the adjoint orbit `Gr(k, n) ⊂ u(n)` through
//! `ρ = scale·diag(i,…,i,0,…,0)`, the embedding of chart points as
//! skew-Hermitian matrices, tangent frames and generator solves.

mod chart;
pub mod fd;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

pub use chart::{ChartId, ChartPoint};
pub use fd::{fd_directional, fd_gradient, fd_jacobian, fd_partial, stencil_points, FdConfig, FdScheme};

use crate::linalg::{
    c, commutator, hermitian_eigenvalues, hermitian_inverse_sqrt, realify, skew_hermitian_defect,
    unitary_algebra_basis, CMatrix, LeastSquares, I,
};
use crate::{Error, Result};

/// Largest eigenvalue of `M†M = I + W†W` allowed before a point counts as
/// lying on the chart boundary (the frame shrinks like its inverse).
pub const MAX_CHART_STRETCH: f64 = 1e8;
/// Relative singular-value cutoff used for frame ranks.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Relative residual above which a vector is declared non-tangent.
pub const TANGENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSpec {
    pub n: usize,
    pub k: usize,
    pub scale: f64,
}

impl OrbitSpec {
    pub fn new(n: usize, k: usize, scale: f64) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidSpec(alloc::format!("need 0 < k < n, got k={k}, n={n}")));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidSpec(alloc::format!("scale must be > 0, got {scale}")));
        }
        Ok(Self { n, k, scale })
    }

    /// `Gr(k, n)` with unit scale.
    pub fn grassmannian(k: usize, n: usize) -> Result<Self> {
        Self::new(n, k, 1.0)
    }

    /// `ℂP^d = Gr(1, d + 1)` with unit scale.
    pub fn projective(d: usize) -> Result<Self> {
        Self::new(d + 1, 1, 1.0)
    }

    /// Number of Nijenhuis eigenvalues, `k(n−k)`.
    pub fn half_dim(&self) -> usize {
        self.k * (self.n - self.k)
    }

    /// Real dimension of the orbit, `2k(n−k)`.
    pub fn dim(&self) -> usize {
        2 * self.half_dim()
    }
}

/// A point of the orbit as an `n×n` skew-Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPoint {
    pub matrix: CMatrix,
}

impl EmbeddedPoint {
    pub fn skew_defect(&self) -> f64 {
        skew_hermitian_defect(&self.matrix)
    }

    /// Max distance between the spectrum of `−i·x` and that of `−i·ρ`.
    pub fn spectrum_defect(&self, spec: &OrbitSpec) -> f64 {
        let h = self.matrix.map(|z| z * -I);
        let got = hermitian_eigenvalues(&h);
        let want = rho_spectrum(spec);
        got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Ascending spectrum of `−i·ρ`: `n−k` zeros then `k` copies of `scale`.
pub fn rho_spectrum(spec: &OrbitSpec) -> Vec<f64> {
    (0..spec.n)
        .map(|i| if i < spec.n - spec.k { 0.0 } else { spec.scale })
        .collect()
}

pub fn make_rho(spec: &OrbitSpec) -> EmbeddedPoint {
    let mut m = CMatrix::zeros(spec.n, spec.n);
    for i in 0..spec.k {
        m[(i, i)] = c(0.0, spec.scale);
    }
    EmbeddedPoint { matrix: m }
}

/// The torus-fixed point `scale·diag(0,…,0,i,…,i)`, the opposite vertex to `ρ`.
pub fn base_fixed_point(spec: &OrbitSpec) -> EmbeddedPoint {
    let mut m = CMatrix::zeros(spec.n, spec.n);
    for i in (spec.n - spec.k)..spec.n {
        m[(i, i)] = c(0.0, spec.scale);
    }
    EmbeddedPoint { matrix: m }
}

/// Chart whose origin is [`base_fixed_point`].
pub fn base_chart(spec: &OrbitSpec) -> ChartId {
    ChartId::new(spec, ((spec.n - spec.k)..spec.n).collect()).expect("valid pivots")
}

fn check_point(spec: &OrbitSpec, p: &ChartPoint) -> Result<()> {
    if p.coords.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: p.coords.len(),
        });
    }
    if p.chart.pivots().len() != spec.k {
        return Err(Error::InvalidSpec("chart pivot count differs from k".into()));
    }
    Ok(())
}

/// Span representative, its Gram inverse square root and stretch.
struct SpanData {
    span: CMatrix,
    gram_inv_sqrt: CMatrix,
    stretch: f64,
}

fn span_data(spec: &OrbitSpec, p: &ChartPoint) -> Result<SpanData> {
    check_point(spec, p)?;
    let block = chart::coords_to_block(spec, &p.coords);
    let span = chart::span_from_block(spec, &p.chart, &block);
    let gram = span.adjoint() * &span;
    let stretch = hermitian_eigenvalues(&gram).last().copied().unwrap_or(f64::NAN);
    if !(stretch < MAX_CHART_STRETCH) {
        return Err(Error::NumericalDegeneracy(alloc::format!(
            "chart stretch {stretch:e} exceeds {MAX_CHART_STRETCH:e}"
        )));
    }
    let (gram_inv_sqrt, _) = hermitian_inverse_sqrt(&gram)?;
    Ok(SpanData {
        span,
        gram_inv_sqrt,
        stretch,
    })
}

/// Largest eigenvalue of `M†M` at `p`; `1` at the chart origin, unbounded
/// towards the chart boundary.
pub fn chart_stretch(spec: &OrbitSpec, p: &ChartPoint) -> Result<f64> {
    span_data(spec, p).map(|d| d.stretch)
}

/// `x = scale·i·Q Q†` with `Q` the orthonormalised column span of the chart
/// representative.
pub fn embed(spec: &OrbitSpec, p: &ChartPoint) -> Result<EmbeddedPoint> {
    let d = span_data(spec, p)?;
    let q = &d.span * &d.gram_inv_sqrt;
    let x = (&q * q.adjoint()).map(|z| z * c(0.0, spec.scale));
    Ok(EmbeddedPoint { matrix: x })
}

/// Unitary `g` with `g ρ g† = embed(p)`: the first `k` columns orthonormalise
/// the span, the rest its orthogonal complement.
pub fn chart_unitary(spec: &OrbitSpec, p: &ChartPoint) -> Result<CMatrix> {
    let d = span_data(spec, p)?;
    let block = chart::coords_to_block(spec, &p.coords);
    let comp = chart::complement_from_block(spec, &p.chart, &block);
    let (comp_inv_sqrt, _) = hermitian_inverse_sqrt(&(comp.adjoint() * &comp))?;
    let q = &d.span * &d.gram_inv_sqrt;
    let q_perp = &comp * comp_inv_sqrt;
    let mut g = CMatrix::zeros(spec.n, spec.n);
    g.columns_mut(0, spec.k).copy_from(&q);
    g.columns_mut(spec.k, spec.n - spec.k).copy_from(&q_perp);
    Ok(g)
}

/// Images of the chart coordinate directions under the differential of
/// [`embed`].
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub basis: Vec<CMatrix>,
}

impl TangentFrame {
    /// Real `2n² × dim` matrix whose columns are the realified basis.
    pub fn as_real_matrix(&self) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.basis.iter().map(realify).collect();
        DMatrix::from_columns(&cols)
    }

    pub fn rank(&self) -> usize {
        LeastSquares::new(self.as_real_matrix(), RANK_CUTOFF).rank()
    }

    pub fn solver(&self) -> FrameSolver {
        FrameSolver {
            ls: LeastSquares::new(self.as_real_matrix(), RANK_CUTOFF),
        }
    }

    /// Largest relative residual of `basis[j] = [X_j, x]` over the basis.
    pub fn tangency_residual(&self, x: &EmbeddedPoint) -> f64 {
        let gs = GeneratorSolver::new(x);
        self.basis
            .iter()
            .map(|v| {
                let (_, r) = gs.solve_raw(v);
                r / v.norm().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Expresses tangent vectors in the chart frame.
#[derive(Debug, Clone)]
pub struct FrameSolver {
    ls: LeastSquares,
}

impl FrameSolver {
    pub fn coords_of(&self, v: &CMatrix) -> Result<DVector<f64>> {
        let b = realify(v);
        let (a, residual) = self.ls.solve(&b);
        if residual > TANGENT_TOL * b.norm().max(1.0) {
            return Err(Error::FrameSolveFailure { residual });
        }
        Ok(a)
    }

    pub fn condition(&self) -> f64 {
        self.ls.condition()
    }
}

fn check_rank(frame: &TangentFrame, expected: usize) -> Result<()> {
    let rank = frame.rank();
    if rank < expected {
        return Err(Error::RankDeficiency { rank, expected });
    }
    Ok(())
}

/// Finite-difference frame `∂ embed / ∂ coords_j`.
pub fn tangent_frame(spec: &OrbitSpec, p: &ChartPoint, fd: &FdConfig) -> Result<TangentFrame> {
    check_point(spec, p)?;
    let basis = fd_jacobian(
        |q: &[f64]| embed(spec, &p.with_coords(q)).map(|e| e.matrix),
        &p.coords,
        fd,
    )?;
    let frame = TangentFrame { basis };
    check_rank(&frame, spec.dim())?;
    Ok(frame)
}

/// Frame from the closed-form differential of `x = s·i·M G⁻¹ M†`, `G = M†M`:
/// `dx = s·i·(dM G⁻¹ M† + M G⁻¹ dM† − M G⁻¹ dG G⁻¹ M†)`.
pub fn exact_tangent_frame(spec: &OrbitSpec, p: &ChartPoint) -> Result<TangentFrame> {
    let d = span_data(spec, p)?;
    let g_inv = &d.gram_inv_sqrt * &d.gram_inv_sqrt;
    let m = spec.half_dim();
    let free = p.chart.free_rows(spec.n);
    let m_ginv = &d.span * &g_inv;
    let mut basis = Vec::with_capacity(spec.dim());
    for j in 0..spec.dim() {
        let idx = j % m;
        let (r, col) = (idx / spec.k, idx % spec.k);
        let unit = if j < m { c(1.0, 0.0) } else { I };
        let mut dm = CMatrix::zeros(spec.n, spec.k);
        dm[(free[r], col)] = unit;
        let dgram = dm.adjoint() * &d.span + d.span.adjoint() * &dm;
        let dx = &dm * &g_inv * d.span.adjoint() + &m_ginv * dm.adjoint() - &m_ginv * dgram * m_ginv.adjoint();
        basis.push(dx.map(|z| z * c(0.0, spec.scale)));
    }
    let frame = TangentFrame { basis };
    check_rank(&frame, spec.dim())?;
    Ok(frame)
}

/// Least-squares solver for `[X, x] = v` over `u(n)`, minimum-norm in the
/// invariant metric.
#[derive(Debug, Clone)]
pub struct GeneratorSolver {
    basis: Vec<CMatrix>,
    ls: LeastSquares,
}

impl GeneratorSolver {
    pub fn new(x: &EmbeddedPoint) -> Self {
        let n = x.matrix.nrows();
        let basis = unitary_algebra_basis(n);
        let cols: Vec<DVector<f64>> = basis.iter().map(|b| realify(&commutator(b, &x.matrix))).collect();
        let ls = LeastSquares::new(DMatrix::from_columns(&cols), 1e-10);
        Self { basis, ls }
    }

    fn solve_raw(&self, v: &CMatrix) -> (CMatrix, f64) {
        let (a, residual) = self.ls.solve(&realify(v));
        let n = v.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (coef, b) in a.iter().zip(&self.basis) {
            out += b.map(|z| z * *coef);
        }
        (out, residual)
    }

    pub fn solve(&self, v: &CMatrix) -> Result<CMatrix> {
        let (x, residual) = self.solve_raw(v);
        if residual > TANGENT_TOL * v.norm().max(1.0) {
            return Err(Error::NotTangent { residual });
        }
        Ok(x)
    }
}

/// Minimum-norm `X ∈ u(n)` with `[X, x] = v`.
pub fn solve_generator(x: &EmbeddedPoint, v: &CMatrix) -> Result<CMatrix> {
    GeneratorSolver::new(x).solve(v)
}

/// Everything the model tensors need at one chart point.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub point: EmbeddedPoint,
    pub unitary: CMatrix,
    pub frame: TangentFrame,
    pub frame_solver: FrameSolver,
    pub generators: GeneratorSolver,
}

impl LocalFrame {
    pub fn new(spec: &OrbitSpec, p: &ChartPoint) -> Result<Self> {
        let point = embed(spec, p)?;
        let unitary = chart_unitary(spec, p)?;
        let frame = exact_tangent_frame(spec, p)?;
        let frame_solver = frame.solver();
        let generators = GeneratorSolver::new(&point);
        Ok(Self {
            point,
            unitary,
            frame,
            frame_solver,
            generators,
        })
    }

    /// Chart components of the fundamental vector field `σ_x(X) = [X, x]`.
    pub fn fundamental(&self, generator: &CMatrix) -> Result<DVector<f64>> {
        self.frame_solver.coords_of(&commutator(generator, &self.point.matrix))
    }
}
