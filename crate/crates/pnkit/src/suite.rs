use std::time::Instant;

use pnkit_core::geometry::{embed, ChartId, ChartPoint, OrbitSpec};
use pnkit_core::models::{calibrate, GtPattern, HermitianModel, CONSTANT_TOL};
use pnkit_core::Error;

use crate::cache::Shared;
use crate::checks::{Context, REGISTRY};
use crate::config::{ConfigError, RunConfig};
use crate::report::{CalibrationEcho, CheckResult, Comparison, VerificationReport};
use crate::sampling::{rng, sample_points, Stream};

/// Samples drawn for calibration.
pub const CALIBRATION_SAMPLES: usize = 20;
/// r-matrix constant used when calibration fails.
pub const FALLBACK_C: f64 = 0.5;

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] Error),
}

/// Calibrated (or pinned) model constants with the `calibration` check result.
pub struct Constants {
    pub c: f64,
    pub kappa: f64,
    pub pattern: GtPattern,
    pub pinned: bool,
    pub result: CheckResult,
}

fn pattern_for(spec: &OrbitSpec, kappa: f64, samples: &[ChartPoint]) -> GtPattern {
    samples
        .iter()
        .map(|p| embed(spec, p))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|pts| GtPattern::from_samples(spec, kappa, &pts, CONSTANT_TOL))
        .unwrap_or_else(|_| GtPattern::counting_rule(spec))
}

pub fn constants(cfg: &RunConfig) -> Constants {
    let spec = cfg.spec();
    let chart = ChartId::standard(cfg.k);
    let samples = sample_points(
        &spec,
        &chart,
        CALIBRATION_SAMPLES,
        &mut rng(cfg.seed, Stream::Calibration),
    );
    let tol = cfg.tol("spectrum");
    let mut result = CheckResult {
        name: "calibration".into(),
        points_evaluated: samples.len(),
        points_skipped: 0,
        max_residual: 0.0,
        tolerance: tol,
        comparison: Comparison::AtMost,
        pass: true,
        witnesses: Vec::new(),
        notes: Vec::new(),
    };
    if let Some(p) = cfg.pinned_constants {
        result.points_evaluated = 0;
        result
            .notes
            .push(format!("constants pinned: c = {}, kappa = {}", p.c, p.kappa));
        return Constants {
            c: p.c,
            kappa: p.kappa,
            pattern: pattern_for(&spec, p.kappa, &samples),
            pinned: true,
            result,
        };
    }
    match calibrate(&spec, &chart, &samples) {
        Ok(cal) => {
            result.max_residual = cal.max_distance;
            result.pass = cal.max_distance <= tol;
            result.notes.push(format!(
                "c = {:.12}, kappa = {}, ratio spread {:.3e}",
                cal.c, cal.kappa, cal.ratio_spread
            ));
            Constants {
                c: cal.c,
                kappa: cal.kappa,
                pattern: cal.pattern,
                pinned: false,
                result,
            }
        }
        Err(e) => {
            let kappa = 2.0 / spec.scale;
            result.pass = false;
            result.max_residual = f64::MAX;
            result.notes.push(e.to_string());
            result
                .notes
                .push(format!("falling back to c = {FALLBACK_C}, kappa = {kappa}"));
            Constants {
                c: FALLBACK_C,
                kappa,
                pattern: GtPattern::counting_rule(&spec),
                pinned: false,
                result,
            }
        }
    }
}

pub fn build_model(cfg: &RunConfig, k: &Constants) -> Result<HermitianModel, Error> {
    HermitianModel::new(cfg.spec(), k.c, k.kappa, ChartId::standard(cfg.k), k.pattern.clone())
}

/// Runs every requested check, in registry order. Check failures are recorded
/// and never stop the run.
pub fn run_suite(cfg: &RunConfig) -> Result<VerificationReport, SuiteError> {
    let start = Instant::now();
    cfg.validate()?;
    let spec = cfg.spec();
    let chart = ChartId::standard(cfg.k);
    let eval = sample_points(&spec, &chart, cfg.samples, &mut rng(cfg.seed, Stream::Evaluation));
    let holdout = sample_points(&spec, &chart, cfg.samples, &mut rng(cfg.seed, Stream::Holdout));
    let constants = constants(cfg);
    let model = build_model(cfg, &constants)?;
    let shared = Shared::prepare(&model, &eval, &holdout, &cfg.fd());
    let ctx = Context {
        cfg,
        spec,
        model: &model,
        eval: &eval,
        holdout: &holdout,
        shared: &shared,
        calibration: &constants.result,
    };
    let results = REGISTRY
        .iter()
        .filter(|(name, _)| cfg.checks.iter().any(|c| c == name))
        .map(|(_, run)| run(&ctx))
        .collect();
    Ok(VerificationReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        calibration: CalibrationEcho {
            c: constants.c,
            kappa: constants.kappa,
            pinned: constants.pinned,
        },
        results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
