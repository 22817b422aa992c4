//! The groupoid over the Gelfand–Tsetlin polytope built from eigenvalue
//! cocycles: structure maps, the `ℝᵐ`-action and the subgroupoids of the
//! degenerate pencil members on `ℂPⁿ`.

use alloc::vec::Vec;

use crate::geometry::OrbitSpec;
use crate::models::{GtPattern, HermitianModel, SlotKind};
use crate::{Error, Result};

/// Absolute tolerance for `target(g₁) = source(g₂)`.
pub const COMPOSE_TOL: f64 = 1e-9;
/// Absolute tolerance for equalities in membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Slack allowed when testing GT inequalities.
pub const POLYTOPE_TOL: f64 = 1e-9;
/// Smallest admissible `|λ + t|` in a logarithm.
pub const LOG_GUARD: f64 = 1e-12;

/// `−t + e^h (λ + t)`, componentwise, evaluated as `λ + (e^h − 1)(λ + t)` so
/// that `h = 0` and `λ = −t` are fixed exactly.
pub fn act(h: &[f64], lambda: &[f64], t: f64) -> Vec<f64> {
    assert_eq!(h.len(), lambda.len(), "action dimension mismatch");
    h.iter()
        .zip(lambda)
        .map(|(hi, li)| li + libm::expm1(*hi) * (li + t))
        .collect()
}

/// The GT polytope of `Gr(k, n)` with top value 2, in the flattened
/// coordinates of [`crate::models::GtSpectrum::flat`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtPolytope {
    pub k: usize,
    pub n: usize,
    pattern: GtPattern,
}

impl GtPolytope {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        let spec = OrbitSpec::new(n, k, 1.0)?;
        Ok(Self {
            k,
            n,
            pattern: GtPattern::counting_rule(&spec),
        })
    }

    /// The simplex `Δ_d = {0 ≤ λ₁ ≤ … ≤ λ_d ≤ 2}` of `ℂP^d`.
    pub fn simplex(d: usize) -> Result<Self> {
        Self::new(1, d + 1)
    }

    pub fn dim(&self) -> usize {
        self.k * (self.n - self.k)
    }

    /// Full triangular pattern with the constant slots filled in.
    pub fn levels(&self, lambda: &[f64]) -> Result<Vec<Vec<f64>>> {
        if lambda.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: lambda.len(),
            });
        }
        let mut free = lambda.iter();
        Ok(self
            .pattern
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|kind| match kind {
                        SlotKind::Zero => 0.0,
                        SlotKind::Top => 2.0,
                        SlotKind::Free => *free.next().expect("length checked"),
                    })
                    .collect()
            })
            .collect())
    }

    /// Largest violation of the GT inequalities (with `λ` in ascending order
    /// within each level); `0` inside the polytope.
    pub fn defect(&self, lambda: &[f64]) -> Result<f64> {
        let levels = self.levels(lambda)?;
        let mut worst = crate::models::interlacing_defect(&levels, 2.0);
        for level in &levels {
            for w in level.windows(2) {
                worst = worst.max(w[0] - w[1]);
            }
        }
        if lambda.iter().any(|v| !v.is_finite()) {
            worst = f64::INFINITY;
        }
        Ok(worst)
    }

    pub fn contains(&self, lambda: &[f64], tol: f64) -> bool {
        matches!(self.defect(lambda), Ok(d) if d <= tol)
    }
}

/// A point of the GT polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopePoint {
    pub lambda: Vec<f64>,
}

impl PolytopePoint {
    pub fn new(polytope: &GtPolytope, lambda: Vec<f64>) -> Result<Self> {
        if !polytope.contains(&lambda, POLYTOPE_TOL) {
            return Err(Error::TargetOutsidePolytope);
        }
        Ok(Self { lambda })
    }
}

/// An arrow `(λ, h)` of the groupoid for the pencil parameter `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidElement {
    pub lambda: Vec<f64>,
    pub h: Vec<f64>,
    pub t: f64,
}

impl GroupoidElement {
    pub fn identity(lambda: Vec<f64>, t: f64) -> Self {
        let h = alloc::vec![0.0; lambda.len()];
        Self { lambda, h, t }
    }

    pub fn source(&self) -> &[f64] {
        &self.lambda
    }

    /// `−t + e^h (λ + t)` without any polytope check.
    pub fn raw_target(&self) -> Vec<f64> {
        act(&self.h, &self.lambda, self.t)
    }
}

/// Where arrows live: over the GT polytope, or the action groupoid over `ℝᵐ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Polytope(GtPolytope),
    Euclidean(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Groupoid {
    pub base: Base,
}

impl Groupoid {
    pub fn over_polytope(polytope: GtPolytope) -> Self {
        Self {
            base: Base::Polytope(polytope),
        }
    }

    pub fn action(dim: usize) -> Self {
        Self {
            base: Base::Euclidean(dim),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.base {
            Base::Polytope(p) => p.dim(),
            Base::Euclidean(m) => *m,
        }
    }

    fn check_shape(&self, g: &GroupoidElement) -> Result<()> {
        for len in [g.lambda.len(), g.h.len()] {
            if len != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: len,
                });
            }
        }
        Ok(())
    }

    fn check_object(&self, lambda: &[f64]) -> Result<()> {
        match &self.base {
            Base::Polytope(p) if !p.contains(lambda, POLYTOPE_TOL) => Err(Error::TargetOutsidePolytope),
            _ => Ok(()),
        }
    }

    /// Source and target both lie in the base.
    pub fn validate(&self, g: &GroupoidElement) -> Result<()> {
        self.check_shape(g)?;
        self.check_object(&g.lambda)?;
        self.check_object(&g.raw_target())
    }

    pub fn source(&self, g: &GroupoidElement) -> Result<Vec<f64>> {
        self.check_shape(g)?;
        Ok(g.lambda.clone())
    }

    pub fn target(&self, g: &GroupoidElement) -> Result<Vec<f64>> {
        self.check_shape(g)?;
        let r = g.raw_target();
        self.check_object(&r)?;
        Ok(r)
    }

    /// `(λ, h₁)·(λ', h₂) = (λ, h₁ + h₂)` when `λ'` is the target of the first.
    pub fn compose(&self, g1: &GroupoidElement, g2: &GroupoidElement) -> Result<GroupoidElement> {
        self.validate(g1)?;
        self.validate(g2)?;
        if g1.t != g2.t {
            return Err(Error::NotComposable {
                gap: (g1.t - g2.t).abs(),
            });
        }
        let gap = g1
            .raw_target()
            .iter()
            .zip(&g2.lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if !(gap < COMPOSE_TOL) {
            return Err(Error::NotComposable { gap });
        }
        let out = GroupoidElement {
            lambda: g1.lambda.clone(),
            h: g1.h.iter().zip(&g2.h).map(|(a, b)| a + b).collect(),
            t: g1.t,
        };
        self.validate(&out)?;
        Ok(out)
    }

    /// `(target(g), −h)`.
    pub fn inverse(&self, g: &GroupoidElement) -> Result<GroupoidElement> {
        Ok(GroupoidElement {
            lambda: self.target(g)?,
            h: g.h.iter().map(|v| -v).collect(),
            t: g.t,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipCase {
    /// `t ∉ [−2, 0]`: the pair groupoid.
    Pair,
    /// `t ∈ (−2, 0)`.
    Interior,
    /// `t ∈ {−2, 0}`.
    Boundary,
}

impl MembershipCase {
    pub fn of(t: f64, tol: f64) -> Self {
        if t.abs() <= tol || (t + 2.0).abs() <= tol {
            MembershipCase::Boundary
        } else if t > -2.0 && t < 0.0 {
            MembershipCase::Interior
        } else {
            MembershipCase::Pair
        }
    }
}

/// Membership in the subgroupoid for `ℂPⁿ` (`λ ∈ Δ_n`):
/// interior `λ_i = λ_{i+1} = −t ⟹ h_i = h_{i+1}`, boundary `λ_i = −t ⟹ h_i = 0`,
/// and every valid arrow in the pair case.
pub fn membership_cpn(g: &GroupoidElement, tol: f64) -> bool {
    let simplex = match GtPolytope::simplex(g.lambda.len()) {
        Ok(s) => s,
        Err(_) => return false,
    };
    if Groupoid::over_polytope(simplex).validate(g).is_err() {
        return false;
    }
    let pinned = |i: usize| (g.lambda[i] + g.t).abs() <= tol;
    match MembershipCase::of(g.t, tol) {
        MembershipCase::Pair => true,
        MembershipCase::Interior => (0..g.lambda.len().saturating_sub(1))
            .all(|i| !(pinned(i) && pinned(i + 1)) || (g.h[i] - g.h[i + 1]).abs() <= tol),
        MembershipCase::Boundary => (0..g.lambda.len()).all(|i| !pinned(i) || g.h[i].abs() <= tol),
    }
}

/// Membership of `g₁·g₂` for two composable members.
pub fn closure_check(g1: &GroupoidElement, g2: &GroupoidElement, tol: f64) -> Result<bool> {
    let simplex = GtPolytope::simplex(g1.lambda.len())?;
    let composite = Groupoid::over_polytope(simplex).compose(g1, g2)?;
    Ok(membership_cpn(&composite, tol))
}

fn shifted_log(value: f64, t: f64) -> Result<f64> {
    let shifted = value + t;
    if !(shifted.abs() > LOG_GUARD) {
        return Err(Error::SingularLog { value: shifted });
    }
    Ok(libm::log(shifted.abs()))
}

/// `log|λ(y)+t| − log|λ(x)+t|` for two values on the same side of `−t`.
pub fn cocycle_from_values(lx: f64, ly: f64, t: f64) -> Result<f64> {
    let (a, b) = (shifted_log(lx, t)?, shifted_log(ly, t)?);
    if (lx + t).signum() != (ly + t).signum() {
        return Err(Error::SingularLog {
            value: (lx + t) * (ly + t),
        });
    }
    Ok(b - a)
}

fn smooth_values(model: &HermitianModel, coords: &[f64]) -> Result<Vec<f64>> {
    let gt = model.gt_at(coords)?;
    if !gt.all_smooth() {
        return Err(Error::NumericalDegeneracy(
            "GT variable outside the smooth locus".into(),
        ));
    }
    Ok(gt.flat())
}

/// `h(x, y) = log(λ_i(y) + t) − log(λ_i(x) + t)` for the `i`-th flattened GT
/// variable; `−t + e^h (λ_i(x) + t) = λ_i(y)`.
pub fn eigenvalue_cocycle(model: &HermitianModel, x: &[f64], y: &[f64], i: usize, t: f64) -> Result<f64> {
    let (lx, ly) = (smooth_values(model, x)?, smooth_values(model, y)?);
    let (a, b) = match (lx.get(i), ly.get(i)) {
        (Some(a), Some(b)) => (*a, *b),
        _ => {
            return Err(Error::CountMismatch {
                expected: i + 1,
                got: lx.len(),
            })
        }
    };
    cocycle_from_values(a, b, t)
}

/// The arrow `(GT(x), h(x, y))` representing the pair `(x, y)`.
pub fn pair_to_element(model: &HermitianModel, x: &[f64], y: &[f64], t: f64) -> Result<GroupoidElement> {
    let (lx, ly) = (smooth_values(model, x)?, smooth_values(model, y)?);
    let h = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| cocycle_from_values(*a, *b, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupoidElement { lambda: lx, h, t })
}

#[cfg(test)]
mod tests;
