use alloc::vec::Vec;

use crate::geometry::{embed, ChartId, ChartPoint, OrbitSpec};
use crate::linalg::general_eigenvalues;
use crate::pn::SpectralCluster;
use crate::{Error, Result};

use super::gt::{GtPattern, CONSTANT_TOL};
use super::HermitianModel;

/// Largest spectrum distance a calibration may leave on its samples.
pub const CALIBRATION_TOL: f64 = 1e-6;

const MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone)]
pub struct Calibration {
    /// r-matrix constant.
    pub c: f64,
    /// GT scaling.
    pub kappa: f64,
    pub pattern: GtPattern,
    /// Worst spectrum distance over the samples at the chosen `c`.
    pub max_distance: f64,
    /// Relative spread of (GT value)/(N eigenvalue) over all samples.
    pub ratio_spread: f64,
}

struct Sample {
    eigen: Vec<f64>,
    gt: Vec<f64>,
}

fn objective(samples: &[Sample], c_norm: f64) -> f64 {
    samples
        .iter()
        .flat_map(|s| s.eigen.iter().zip(&s.gt).map(move |(e, g)| (c_norm * e - g).abs()))
        .fold(0.0, f64::max)
}

/// Fixes `κ` from the spectrum of `ρ`, reads the GT pattern off the samples,
/// then searches the r-matrix constant `c` so that the spectrum of `N`
/// reproduces the non-constant GT values (each twice).
pub fn calibrate(spec: &OrbitSpec, chart: &ChartId, samples: &[ChartPoint]) -> Result<Calibration> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::CalibrationFailure(alloc::format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let kappa = 2.0 / spec.scale;
    let points = samples.iter().map(|p| embed(spec, p)).collect::<Result<Vec<_>>>()?;
    let pattern = GtPattern::from_samples(spec, kappa, &points, CONSTANT_TOL)?;
    let unit = HermitianModel::new(*spec, 1.0, kappa, chart.clone(), pattern.clone())?;

    let mut data = Vec::with_capacity(samples.len());
    for p in samples {
        let n = unit.evaluate(&p.coords)?.n();
        let mut eigen: Vec<f64> = general_eigenvalues(&n.0)?.iter().map(|z| z.re).collect();
        eigen.sort_by(f64::total_cmp);
        let mut gt: Vec<f64> = unit.gt_at(&p.coords)?.flat().iter().flat_map(|v| [*v, *v]).collect();
        gt.sort_by(f64::total_cmp);
        data.push(Sample { eigen, gt });
    }

    let grid: Vec<f64> = (0..=120).map(|i| libm::pow(10.0, -3.0 + 0.05 * i as f64)).collect();
    let best = (0..grid.len())
        .min_by(|a, b| objective(&data, grid[*a]).total_cmp(&objective(&data, grid[*b])))
        .expect("non-empty grid");
    let (mut lo, mut hi) = (
        libm::log(grid[best.saturating_sub(1)]),
        libm::log(grid[(best + 1).min(grid.len() - 1)]),
    );
    let phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let f = |u: f64| objective(&data, libm::exp(u));
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b);
        }
    }
    let c_norm = libm::exp(0.5 * (lo + hi));
    let max_distance = objective(&data, c_norm);
    if !(max_distance < CALIBRATION_TOL) {
        return Err(Error::CalibrationFailure(alloc::format!(
            "best constant c = {c_norm:e} leaves spectrum distance {max_distance:e}"
        )));
    }

    let ratios: Vec<f64> = data
        .iter()
        .flat_map(|s| s.eigen.iter().zip(&s.gt))
        .filter(|(e, _)| e.abs() > 1e-3)
        .map(|(e, g)| g / e)
        .collect();
    let ratio_spread = if ratios.is_empty() {
        0.0
    } else {
        let (mn, mx) = ratios
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(*r), b.max(*r)));
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        (mx - mn) / mean.abs()
    };

    Ok(Calibration {
        c: c_norm,
        kappa,
        pattern,
        max_distance,
        ratio_spread,
    })
}

/// Pairing of Nijenhuis eigenvalues with non-constant GT values.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMatch {
    pub max_distance: f64,
    pub pairs: usize,
    pub unmatched_eigen: Vec<f64>,
    pub unmatched_gt: Vec<f64>,
}

impl SpectrumMatch {
    pub fn within(&self, tol: f64) -> bool {
        self.unmatched_eigen.is_empty() && self.unmatched_gt.is_empty() && self.max_distance <= tol
    }
}

/// Sorted pairing of clusters (each counted `multiplicity/2` times) with the
/// GT values; in one dimension this minimises the largest distance.
pub fn match_spectra(clusters: &[SpectralCluster], gt: &[f64]) -> SpectrumMatch {
    let mut eigen: Vec<f64> = clusters
        .iter()
        .flat_map(|c| core::iter::repeat_n(c.value, (c.multiplicity / 2).max(1)))
        .collect();
    eigen.sort_by(f64::total_cmp);
    let mut gt = gt.to_vec();
    gt.sort_by(f64::total_cmp);
    let pairs = eigen.len().min(gt.len());
    let max_distance = eigen.iter().zip(&gt).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    SpectrumMatch {
        max_distance,
        pairs,
        unmatched_eigen: eigen[pairs..].to_vec(),
        unmatched_gt: gt[pairs..].to_vec(),
    }
}
