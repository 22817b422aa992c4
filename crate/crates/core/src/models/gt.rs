use alloc::vec::Vec;

use crate::geometry::{EmbeddedPoint, OrbitSpec};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::{Error, Result};

/// Distance from `0` or `κ·scale` below which a minor eigenvalue is constant.
pub const CONSTANT_TOL: f64 = 1e-7;

/// Separation defining smooth GT entries and the dense open set `M₀`.
pub const DEFAULT_M0_GAP: f64 = 1e-3;

/// Upper-left `s×s` block of `x`.
pub fn moment_minor(x: &EmbeddedPoint, s: usize) -> CMatrix {
    assert!(s >= 1 && s <= x.matrix.nrows(), "minor size out of range");
    x.matrix.view((0, 0), (s, s)).into_owned()
}

/// Ascending spectra of `κ·(−i)·x_s` for `s = 1..=n`.
pub fn minor_spectra(x: &EmbeddedPoint, kappa: f64) -> Vec<Vec<f64>> {
    (1..=x.matrix.nrows())
        .map(|s| {
            let h = moment_minor(x, s).map(|z| z * crate::linalg::c(0.0, -kappa));
            hermitian_eigenvalues(&h)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Zero,
    Top,
    Free,
}

/// Which slots of each minor spectrum are pinned at `0` or at the top value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtPattern {
    pub levels: Vec<Vec<SlotKind>>,
}

impl GtPattern {
    /// Pattern forced by interlacing: `max(0, s−k)` zeros at the bottom and
    /// `max(0, s−n+k)` top values at level `s`.
    pub fn counting_rule(spec: &OrbitSpec) -> Self {
        let (n, k) = (spec.n, spec.k);
        let levels = (1..=n)
            .map(|s| {
                let zeros = s.saturating_sub(k);
                let tops = s.saturating_sub(n - k);
                (0..s)
                    .map(|j| {
                        if j < zeros {
                            SlotKind::Zero
                        } else if j >= s - tops {
                            SlotKind::Top
                        } else {
                            SlotKind::Free
                        }
                    })
                    .collect()
            })
            .collect();
        Self { levels }
    }

    /// Pattern read off sampled points: a slot is constant when it sits at
    /// `0` or `κ·scale` at every sample.
    pub fn from_samples(spec: &OrbitSpec, kappa: f64, points: &[EmbeddedPoint], tol: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::CalibrationFailure("no samples for GT pattern".into()));
        }
        let top = kappa * spec.scale;
        let spectra: Vec<Vec<Vec<f64>>> = points.iter().map(|x| minor_spectra(x, kappa)).collect();
        let levels = (0..spec.n)
            .map(|s| {
                (0..=s)
                    .map(|j| {
                        let vals = spectra.iter().map(|sp| sp[s][j]);
                        if vals.clone().all(|v| v.abs() < tol) {
                            SlotKind::Zero
                        } else if vals.clone().all(|v| (v - top).abs() < tol) {
                            SlotKind::Top
                        } else {
                            SlotKind::Free
                        }
                    })
                    .collect()
            })
            .collect();
        let pattern = Self { levels };
        let expected = spec.half_dim();
        if pattern.free_count() != expected {
            return Err(Error::CountMismatch {
                expected,
                got: pattern.free_count(),
            });
        }
        Ok(pattern)
    }

    pub fn free_count(&self) -> usize {
        self.levels.iter().flatten().filter(|s| **s == SlotKind::Free).count()
    }
}

/// GT variables at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GtSpectrum {
    /// Full ascending minor spectra, level `s` at index `s−1`.
    pub levels: Vec<Vec<f64>>,
    /// Non-constant entries per level.
    pub values: Vec<Vec<f64>>,
    /// Smoothness flag per non-constant entry.
    pub flags: Vec<Vec<bool>>,
    pub top: f64,
}

impl GtSpectrum {
    /// Non-constant values, level by level.
    pub fn flat(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn count(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn all_smooth(&self) -> bool {
        self.flags.iter().flatten().all(|f| *f)
    }

    /// All non-constant values pairwise `gap`-separated and `gap` away from
    /// `0` and the top value.
    pub fn in_m0(&self, gap: f64) -> bool {
        let mut v = self.flat();
        v.sort_by(f64::total_cmp);
        let inside = v.iter().all(|x| *x > gap && *x < self.top - gap);
        inside && v.windows(2).all(|w| w[1] - w[0] > gap)
    }

    pub fn interlacing_defect(&self) -> f64 {
        interlacing_defect(&self.levels, self.top)
    }
}

/// Largest violation of `0 ≤ λ^(s+1)_i ≤ λ^(s)_i ≤ λ^(s+1)_{i+1} ≤ top`.
pub fn interlacing_defect(levels: &[Vec<f64>], top: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for level in levels {
        for v in level {
            worst = worst.max(-v).max(v - top);
        }
    }
    for pair in levels.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        for (i, v) in cur.iter().enumerate() {
            worst = worst.max(next[i] - v).max(v - next[i + 1]);
        }
    }
    worst
}

/// GT variables of `x` with the constant slots of `pattern` removed.
pub fn gt_spectrum(x: &EmbeddedPoint, spec: &OrbitSpec, kappa: f64, pattern: &GtPattern) -> Result<GtSpectrum> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidSpec("kappa must be positive".into()));
    }
    let expected = spec.half_dim();
    if pattern.free_count() != expected || pattern.levels.len() != spec.n {
        return Err(Error::CountMismatch {
            expected,
            got: pattern.free_count(),
        });
    }
    let top = kappa * spec.scale;
    let levels = minor_spectra(x, kappa);
    let mut values = Vec::with_capacity(spec.n);
    let mut flags = Vec::with_capacity(spec.n);
    for (level, kinds) in levels.iter().zip(&pattern.levels) {
        let mut vs = Vec::new();
        let mut fs = Vec::new();
        for (j, kind) in kinds.iter().enumerate() {
            if *kind != SlotKind::Free {
                continue;
            }
            let v = level[j];
            let below = if j == 0 { 0.0 } else { level[j - 1] };
            let above = level.get(j + 1).copied().unwrap_or(top);
            let gap = DEFAULT_M0_GAP;
            vs.push(v);
            fs.push(v - below > gap && above - v > gap && v > gap && top - v > gap);
        }
        values.push(vs);
        flags.push(fs);
    }
    Ok(GtSpectrum {
        levels,
        values,
        flags,
        top,
    })
}
