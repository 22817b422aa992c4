use pnkit_core::geometry::ChartPoint;
use pnkit_core::models::{base_point_bruhat, match_spectra, ModelTensor};
use pnkit_core::pn::{nijenhuis_spectrum, DEFAULT_CLUSTER_TOL};
use pnkit_core::Error;

use super::{scan, Context};
use crate::report::{CheckResult, Tally};

pub fn calibration(ctx: &Context<'_>) -> CheckResult {
    ctx.calibration.clone()
}

pub fn kks_closedness(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("kks_closedness", ctx.cfg.tol("kks"));
    scan(ctx, tally, ctx.eval, &[], |memo, p| {
        let jet = memo.field(ModelTensor::Omega).jet(p, &ctx.fd())?;
        let d = jet.value.nrows();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in (a + 1)..d {
                for c in (b + 1)..d {
                    let v = jet.partials[a][(b, c)] + jet.partials[b][(c, a)] + jet.partials[c][(a, b)];
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(Some(vec![worst]))
    })
}

pub fn fixed_point(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("fixed_point", ctx.cfg.tol("fixed_point"));
    let origin = vec![0.0; ctx.spec.dim()];
    match base_point_bruhat(&ctx.spec, &ctx.model.r) {
        Ok(pi) => tally.value(&origin, pi.0.norm()),
        Err(e) => tally.record(&origin, crate::report::Outcome::Failed(e.to_string())),
    }
    tally.note("Frobenius norm of the Bruhat tensor at the fixed point, chart centred there");
    tally.finish()
}

fn match_on(ctx: &Context<'_>, name: &str, points: &[ChartPoint]) -> CheckResult {
    let tally = Tally::at_most(name, ctx.cfg.tol("spectrum"));
    scan(ctx, tally, points, &[], |memo, p| {
        let clusters = nijenhuis_spectrum(&memo.get(&p.coords)?.n(), DEFAULT_CLUSTER_TOL)?;
        let gt = memo.gt(&p.coords)?.flat();
        let m = match_spectra(&clusters, &gt);
        if !m.unmatched_eigen.is_empty() || !m.unmatched_gt.is_empty() {
            return Err(Error::CountMismatch {
                expected: gt.len(),
                got: m.pairs,
            });
        }
        Ok(Some(vec![m.max_distance]))
    })
}

pub fn spectrum_match(ctx: &Context<'_>) -> CheckResult {
    match_on(ctx, "spectrum_match", ctx.eval)
}

pub fn holdout_match(ctx: &Context<'_>) -> CheckResult {
    match_on(ctx, "holdout_match", ctx.holdout).with_note("holdout stream, constants fixed beforehand")
}

pub fn gt_interlacing(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("gt_interlacing", ctx.cfg.tol("interlacing"));
    scan(ctx, tally, &ctx.all_points(), &[], |memo, p| {
        Ok(Some(vec![memo.gt(&p.coords)?.interlacing_defect()]))
    })
}

/// Pencil parameters where `π_t` must stay nondegenerate.
pub const NONDEGENERATE_T: [f64; 3] = [-3.0, 0.5, 1.0];

pub fn pencil_nondegeneracy(ctx: &Context<'_>) -> CheckResult {
    let mut ts = NONDEGENERATE_T.to_vec();
    for t in ctx.pair_t(1.0) {
        if !ts.contains(&t) {
            ts.push(t);
        }
    }
    let labels: Vec<String> = ts.iter().map(|t| format!("t={t}")).collect();
    let tally = Tally::at_least("pencil_nondegeneracy", ctx.cfg.tol("det"));
    scan(ctx, tally, ctx.eval, &labels, |memo, p| {
        let m = memo.get(&p.coords)?;
        Ok(Some(ts.iter().map(|t| m.pi_t(*t).0.determinant().abs()).collect()))
    })
    .with_note("max_residual is the smallest |det π_t|")
}

const RAY_END: f64 = 5.0;
const RAY_STEPS: usize = 200;

/// Smallest `|det π_t|` along the ray `s·e_0`, `s ∈ [0, RAY_END]`: grid scan,
/// then golden-section refinement. Returns `(s, |det|)`.
fn ray_minimum(ctx: &Context<'_>, t: f64) -> Result<(f64, f64), Error> {
    let memo = ctx.shared.memo();
    let det = |s: f64| -> Result<f64, Error> {
        let mut q = vec![0.0; ctx.spec.dim()];
        q[0] = s;
        Ok(memo.get(&q)?.pi_t(t).0.determinant().abs())
    };
    let grid = (0..=RAY_STEPS)
        .map(|i| {
            let s = RAY_END * i as f64 / RAY_STEPS as f64;
            det(s).map(|v| (s, v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let best = (0..grid.len())
        .min_by(|a, b| grid[*a].1.total_cmp(&grid[*b].1))
        .expect("non-empty");
    let h = RAY_END / RAY_STEPS as f64;
    let (mut lo, mut hi) = ((grid[best].0 - h).max(0.0), (grid[best].0 + h).min(RAY_END));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fa, mut fb) = (det(a)?, det(b)?);
    for _ in 0..80 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = det(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = det(b)?;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok((s, det(s)?.min(grid[best].1)))
}

pub fn pencil_degeneracy_witness(ctx: &Context<'_>) -> CheckResult {
    let mut ts = vec![-1.0];
    for t in &ctx.cfg.t_values {
        if *t > -2.0 && *t < 0.0 && !ts.contains(t) {
            ts.push(*t);
        }
    }
    let mut tally = Tally::at_most("pencil_degeneracy_witness", ctx.cfg.tol("det"));
    for t in ts {
        let mut q = vec![0.0; ctx.spec.dim()];
        match ray_minimum(ctx, t) {
            Ok((s, v)) => {
                q[0] = s;
                tally.value(&q, v);
                tally.note(format!("t={t}: |det π_t| = {v:.3e} at s = {s:.9}"));
            }
            Err(e) => tally.record(&q, crate::report::Outcome::Failed(e.to_string())),
        }
    }
    tally.note("minimum of |det π_t| along the ray s·e_0 must vanish");
    tally.finish()
}
