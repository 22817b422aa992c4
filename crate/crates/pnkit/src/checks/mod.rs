//! The check registry. Every check folds per-point outcomes into one
//! [`CheckResult`]; points are evaluated in parallel and folded in order.

use pnkit_core::geometry::{ChartPoint, FdConfig, OrbitSpec};
use pnkit_core::models::HermitianModel;
use pnkit_core::Result;
use rayon::prelude::*;

use crate::cache::{Memo, Shared};
use crate::config::RunConfig;
use crate::report::{CheckResult, Comparison, Outcome, Tally};

mod geometry;
mod groupoid;
mod models;
mod pn;

pub use crate::controls::negative_controls;

/// Checks that take second derivatives run on at most this many points.
pub const NESTED_SAMPLES: usize = 10;

/// Everything a check may read.
pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub spec: OrbitSpec,
    pub model: &'a HermitianModel,
    pub eval: &'a [ChartPoint],
    pub holdout: &'a [ChartPoint],
    pub shared: &'a Shared<'a>,
    /// Produced while building the model.
    pub calibration: &'a CheckResult,
}

impl Context<'_> {
    pub fn fd(&self) -> FdConfig {
        self.cfg.fd()
    }

    pub fn nested_fd(&self) -> FdConfig {
        self.cfg.nested_fd()
    }

    pub fn nested_points(&self) -> &[ChartPoint] {
        &self.eval[..self.eval.len().min(NESTED_SAMPLES)]
    }

    /// Evaluation and holdout samples together.
    pub fn all_points(&self) -> Vec<ChartPoint> {
        self.eval.iter().chain(self.holdout).cloned().collect()
    }

    /// `t` values of the run, with `extra` appended when missing.
    pub fn t_grid(&self, extra: &[f64]) -> Vec<f64> {
        let mut ts = self.cfg.t_values.clone();
        for t in extra {
            if !ts.contains(t) {
                ts.push(*t);
            }
        }
        ts
    }

    /// `t` values of the run for which the pencil is nondegenerate, or `fallback`.
    pub fn pair_t(&self, fallback: f64) -> Vec<f64> {
        let ts: Vec<f64> = self
            .cfg
            .t_values
            .iter()
            .copied()
            .filter(|t| !(-2.0..=0.0).contains(t))
            .collect();
        if ts.is_empty() {
            vec![fallback]
        } else {
            ts
        }
    }
}

/// Evaluates `f` at every point; `f` returns one value per label (or `None`
/// to skip the point). The tally sees the per-point extreme, and notes record
/// the extreme of each label.
pub fn scan<F>(ctx: &Context<'_>, mut tally: Tally, points: &[ChartPoint], labels: &[String], f: F) -> CheckResult
where
    F: Fn(&Memo<'_, '_>, &ChartPoint) -> Result<Option<Vec<f64>>> + Sync,
{
    let outcomes: Vec<Result<Option<Vec<f64>>>> = points
        .par_iter()
        .map(|p| {
            let memo = ctx.shared.memo();
            f(&memo, p)
        })
        .collect();
    let at_least = tally.comparison() == Comparison::AtLeast;
    let pick = |a: f64, b: f64| if at_least { a.min(b) } else { a.max(b) };
    let mut per_label: Vec<Option<f64>> = vec![None; labels.len()];
    for (p, outcome) in points.iter().zip(outcomes) {
        let outcome = match outcome {
            Ok(None) => Outcome::Skipped,
            Err(e) => Outcome::Failed(e.to_string()),
            Ok(Some(values)) => {
                for (slot, v) in per_label.iter_mut().zip(&values) {
                    *slot = Some(slot.map_or(*v, |s| pick(s, *v)));
                }
                let worst = values.iter().copied().reduce(pick).unwrap_or(0.0);
                if values.iter().any(|v| v.is_nan()) {
                    Outcome::Failed("non-finite residual".into())
                } else {
                    Outcome::Value(worst)
                }
            }
        };
        tally.record(&p.coords, outcome);
    }
    if labels.len() > 1 {
        let parts: Vec<String> = labels
            .iter()
            .zip(&per_label)
            .filter_map(|(l, v)| v.map(|v| format!("{l}: {v:.3e}")))
            .collect();
        tally.note(parts.join(", "));
    }
    tally.finish()
}

pub type Runner = fn(&Context<'_>) -> CheckResult;

/// Check names in report order, with their runners.
pub const REGISTRY: &[(&str, Runner)] = &[
    ("spectrum_preservation", geometry::spectrum_preservation),
    ("frame_rank", geometry::frame_rank),
    ("generator_round_trip", geometry::generator_round_trip),
    ("fd_convergence", geometry::fd_convergence),
    ("calibration", models::calibration),
    ("jacobi", pn::jacobi),
    ("compatibility", pn::compatibility),
    ("hierarchy_compatibility", pn::hierarchy_compatibility),
    ("torsion", pn::torsion),
    ("np_symmetry", pn::np_symmetry),
    ("lenart", pn::lenart),
    ("logdet_extension", pn::logdet_extension),
    ("involution", pn::involution),
    ("koszul_involution", pn::koszul_involution),
    ("double_degeneracy", pn::double_degeneracy),
    ("eigen_equation", pn::eigen_equation),
    ("vandermonde", pn::vandermonde),
    ("hamiltonian_forms", pn::hamiltonian_forms),
    ("modular_vector_field", pn::modular_vector_field),
    ("spectral_shift", pn::spectral_shift),
    ("trace_convention", pn::trace_convention),
    ("kks_closedness", models::kks_closedness),
    ("fixed_point", models::fixed_point),
    ("spectrum_match", models::spectrum_match),
    ("holdout_match", models::holdout_match),
    ("gt_interlacing", models::gt_interlacing),
    ("pencil_nondegeneracy", models::pencil_nondegeneracy),
    ("pencil_degeneracy_witness", models::pencil_degeneracy_witness),
    ("groupoid_axioms", groupoid::axioms),
    ("action_law", groupoid::action_law),
    ("fixed_locus", groupoid::fixed_locus),
    ("membership_closure", groupoid::membership_closure),
    ("cocycle_morphism", groupoid::cocycle_morphism),
    ("cocycle_target", groupoid::cocycle_target),
    ("pair_surjectivity", groupoid::pair_surjectivity),
    ("negative_controls", negative_controls),
];

pub fn default_checks() -> Vec<String> {
    REGISTRY.iter().map(|(name, _)| name.to_string()).collect()
}

pub fn runner(name: &str) -> Option<Runner> {
    REGISTRY.iter().find(|(n, _)| *n == name).map(|(_, r)| *r)
}

/// A documented invariant and the checks that verify it.
#[derive(Debug, Clone, Copy)]
pub struct Invariant {
    pub module: &'static str,
    pub property: &'static str,
    pub checks: &'static [&'static str],
}

pub const INVARIANTS: &[Invariant] = &[
    Invariant {
        module: "geometry",
        property: "spectrum preservation",
        checks: &["spectrum_preservation"],
    },
    Invariant {
        module: "geometry",
        property: "frame rank",
        checks: &["frame_rank"],
    },
    Invariant {
        module: "geometry",
        property: "generator round trip",
        checks: &["generator_round_trip"],
    },
    Invariant {
        module: "geometry",
        property: "finite-difference order",
        checks: &["fd_convergence"],
    },
    Invariant {
        module: "pn",
        property: "Jacobi identity of the pencil",
        checks: &["jacobi"],
    },
    Invariant {
        module: "pn",
        property: "compatibility with the symplectic structure",
        checks: &["compatibility"],
    },
    Invariant {
        module: "pn",
        property: "pairwise hierarchy compatibility",
        checks: &["hierarchy_compatibility"],
    },
    Invariant {
        module: "pn",
        property: "vanishing torsion",
        checks: &["torsion"],
    },
    Invariant {
        module: "pn",
        property: "NP symmetry",
        checks: &["np_symmetry"],
    },
    Invariant {
        module: "pn",
        property: "Lenart relation",
        checks: &["lenart", "logdet_extension"],
    },
    Invariant {
        module: "pn",
        property: "involution",
        checks: &["involution", "koszul_involution"],
    },
    Invariant {
        module: "pn",
        property: "double degeneracy",
        checks: &["double_degeneracy", "trace_convention"],
    },
    Invariant {
        module: "pn",
        property: "eigenvalue equation",
        checks: &["eigen_equation", "vandermonde", "hamiltonian_forms"],
    },
    Invariant {
        module: "pn",
        property: "modular vector field",
        checks: &["modular_vector_field"],
    },
    Invariant {
        module: "pn",
        property: "spectral shift",
        checks: &["spectral_shift"],
    },
    Invariant {
        module: "models",
        property: "KKS closedness",
        checks: &["kks_closedness"],
    },
    Invariant {
        module: "models",
        property: "fixed point of the Bruhat tensor",
        checks: &["fixed_point"],
    },
    Invariant {
        module: "models",
        property: "spectrum match",
        checks: &["calibration", "spectrum_match", "holdout_match"],
    },
    Invariant {
        module: "models",
        property: "GT interlacing",
        checks: &["gt_interlacing"],
    },
    Invariant {
        module: "models",
        property: "pencil nondegeneracy",
        checks: &["pencil_nondegeneracy", "pencil_degeneracy_witness"],
    },
    Invariant {
        module: "models",
        property: "eigenvalue equation on GT variables",
        checks: &["eigen_equation"],
    },
    Invariant {
        module: "groupoid",
        property: "groupoid axioms",
        checks: &["groupoid_axioms"],
    },
    Invariant {
        module: "groupoid",
        property: "action law",
        checks: &["action_law"],
    },
    Invariant {
        module: "groupoid",
        property: "fixed locus",
        checks: &["fixed_locus"],
    },
    Invariant {
        module: "groupoid",
        property: "membership closure",
        checks: &["membership_closure"],
    },
    Invariant {
        module: "groupoid",
        property: "morphism property",
        checks: &["cocycle_morphism", "cocycle_target"],
    },
    Invariant {
        module: "groupoid",
        property: "pair surjectivity",
        checks: &["pair_surjectivity"],
    },
    Invariant {
        module: "cli",
        property: "tolerance non-vacuity",
        checks: &["negative_controls"],
    },
];

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn registry_names_are_unique() {
        let names: BTreeSet<&str> = REGISTRY.iter().map(|(n, _)| *n).collect();
        assert_eq!(names.len(), REGISTRY.len());
    }
}
