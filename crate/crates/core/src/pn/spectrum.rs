use alloc::vec::Vec;

use crate::linalg::general_eigenvalues;
use crate::{Error, Result};

use super::tensor::Endomorphism;

/// Relative gap below which neighbouring eigenvalues are merged.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Distinct eigenvalues of `N` with their (even) multiplicities, ascending.
///
/// Eigenvalues are sorted and merged agglomeratively: a value joins the
/// current cluster when it lies within `tol·max(1, |value|)` of the cluster's
/// last member.
pub fn nijenhuis_spectrum(n: &Endomorphism, tol: f64) -> Result<Vec<SpectralCluster>> {
    let eig = general_eigenvalues(&n.0)?;
    let scale = eig.iter().map(|z| libm::hypot(z.re, z.im)).fold(1.0, f64::max);
    let imag = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > tol * scale {
        return Err(Error::ComplexSpectrum { imag });
    }
    let mut values: Vec<f64> = eig.iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);

    let mut clusters: Vec<(f64, usize, f64)> = Vec::new(); // (sum, count, last)
    for v in values {
        match clusters.last_mut() {
            Some((sum, count, last)) if (v - *last).abs() <= tol * v.abs().max(1.0) => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => clusters.push((v, 1, v)),
        }
    }
    let out: Vec<SpectralCluster> = clusters
        .into_iter()
        .map(|(sum, count, _)| SpectralCluster {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect();
    if let Some(bad) = out.iter().find(|c| c.multiplicity % 2 == 1) {
        return Err(Error::OddMultiplicity {
            value: bad.value,
            multiplicity: bad.multiplicity,
        });
    }
    Ok(out)
}
