use std::collections::BTreeMap;

use pnkit_core::geometry::{FdConfig, OrbitSpec};
use serde::{Deserialize, Serialize};

use crate::checks;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cpn requires k = 1 (got k = {0})")]
    ProjectiveRank(usize),
    #[error("invalid orbit: {0}")]
    Orbit(String),
    #[error("samples must be positive")]
    NoSamples,
    #[error("fd step must be positive and finite (got {0})")]
    FdStep(f64),
    #[error("tolerance {name} must be positive (got {value})")]
    Tolerance { name: String, value: f64 },
    #[error("unknown tolerance name {0}")]
    UnknownTolerance(String),
    #[error("unknown check {0}")]
    UnknownCheck(String),
    #[error("pinned constants must be positive (c = {c}, kappa = {kappa})")]
    Pinned { c: f64, kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manifold {
    Cpn,
    #[serde(rename = "grass")]
    Grassmannian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pinned {
    pub c: f64,
    pub kappa: f64,
}

/// Everything a verification run depends on; the report echoes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub manifold: Manifold,
    /// Matrix size; `ℂP^{n−1}` for `cpn`.
    pub n: usize,
    pub k: usize,
    pub t_values: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    /// Step of the central-4 stencil used for second derivatives.
    pub nested_fd_step: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<String>,
    pub pinned_constants: Option<Pinned>,
    /// Randomised cases per groupoid scenario.
    pub groupoid_cases: usize,
    /// Gap defining the dense open set on which gradients are checked.
    pub m0_gap: f64,
}

pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("spectrum_preservation", 1e-9),
        ("round_trip", 1e-9),
        ("fd_order", 0.25),
        ("schouten", 1e-5),
        ("torsion", 1e-5),
        ("grad", 1e-5),
        ("inv", 1e-6),
        ("np", 1e-9),
        ("shift", 1e-12),
        ("trace_ratio", 1e-9),
        ("kks", 1e-5),
        ("fixed_point", 1e-9),
        ("spectrum", 1e-6),
        ("interlacing", 1e-9),
        ("det", 1e-8),
        ("vandermonde", 1e-8),
        ("groupoid", 1e-12),
        ("cocycle_target", 1e-8),
        ("negative", 1e-2),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

impl RunConfig {
    pub fn new(manifold: Manifold, n: usize, k: usize) -> Self {
        Self {
            manifold,
            n,
            k,
            t_values: vec![-3.0, -1.0, 0.0, 1.0],
            samples: 100,
            seed: 0x5eed,
            fd_step: 1e-5,
            nested_fd_step: 4e-3,
            tolerances: default_tolerances(),
            checks: checks::default_checks(),
            pinned_constants: None,
            groupoid_cases: 10_000,
            m0_gap: 1e-3,
        }
    }

    pub fn cpn(n: usize) -> Self {
        Self::new(Manifold::Cpn, n, 1)
    }

    pub fn grassmannian(k: usize, n: usize) -> Self {
        Self::new(Manifold::Grassmannian, n, k)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.manifold == Manifold::Cpn && self.k != 1 {
            return Err(ConfigError::ProjectiveRank(self.k));
        }
        OrbitSpec::new(self.n, self.k, 1.0).map_err(|e| ConfigError::Orbit(e.to_string()))?;
        if self.samples == 0 {
            return Err(ConfigError::NoSamples);
        }
        for step in [self.fd_step, self.nested_fd_step] {
            if !(step > 0.0 && step.is_finite()) {
                return Err(ConfigError::FdStep(step));
            }
        }
        let known = default_tolerances();
        for (name, value) in &self.tolerances {
            if !known.contains_key(name) {
                return Err(ConfigError::UnknownTolerance(name.clone()));
            }
            if value.is_nan() || *value <= 0.0 {
                return Err(ConfigError::Tolerance {
                    name: name.clone(),
                    value: *value,
                });
            }
        }
        let registry = checks::default_checks();
        if let Some(bad) = self.checks.iter().find(|c| !registry.contains(c)) {
            return Err(ConfigError::UnknownCheck(bad.clone()));
        }
        if let Some(p) = self.pinned_constants {
            if !(p.c > 0.0 && p.kappa > 0.0) {
                return Err(ConfigError::Pinned { c: p.c, kappa: p.kappa });
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> OrbitSpec {
        OrbitSpec::new(self.n, self.k, 1.0).expect("validated config")
    }

    pub fn fd(&self) -> FdConfig {
        FdConfig::central2(self.fd_step)
    }

    pub fn nested_fd(&self) -> FdConfig {
        FdConfig::central4(self.nested_fd_step)
    }

    /// Tolerance by name, falling back to the default table.
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .unwrap_or_else(|| default_tolerances()[name])
    }
}
