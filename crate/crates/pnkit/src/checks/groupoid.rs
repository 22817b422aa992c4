use pnkit_core::groupoid::{
    act, closure_check, cocycle_from_values, membership_cpn, pair_to_element, Groupoid, GroupoidElement, GtPolytope,
    MEMBERSHIP_TOL,
};
use pnkit_core::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Context;
use crate::report::{CheckResult, Outcome, Tally};
use crate::sampling::{random_chain, random_layout, random_simplex_point, rng, Stream};

/// Pencil parameters per membership case: pair, interior, boundary.
fn cases(ctx: &Context<'_>) -> Vec<(&'static str, f64)> {
    let mut out: Vec<(&'static str, f64)> = ctx.pair_t(1.0).into_iter().map(|t| ("pair", t)).collect();
    out.push(("interior", -1.0));
    out.push(("boundary", 0.0));
    out.push(("boundary", -2.0));
    out
}

fn is_projective(ctx: &Context<'_>) -> bool {
    ctx.spec.k == 1
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn element_diff(a: &GroupoidElement, b: &GroupoidElement) -> f64 {
    max_diff(&a.lambda, &b.lambda).max(max_diff(&a.h, &b.h))
}

/// Associativity, identity and inverse defects of a composable triple.
fn axiom_defect(g: &Groupoid, chain: &[GroupoidElement]) -> Result<f64> {
    let (a, b, c) = (&chain[0], &chain[1], &chain[2]);
    let left = g.compose(&g.compose(a, b)?, c)?;
    let right = g.compose(a, &g.compose(b, c)?)?;
    let mut worst = element_diff(&left, &right);
    let id_s = GroupoidElement::identity(a.lambda.clone(), a.t);
    let id_t = GroupoidElement::identity(g.target(a)?, a.t);
    worst = worst.max(element_diff(&g.compose(&id_s, a)?, a));
    worst = worst.max(element_diff(&g.compose(a, &id_t)?, a));
    let inv = g.inverse(a)?;
    worst = worst.max(element_diff(&g.compose(a, &inv)?, &id_s));
    let back = g.compose(&inv, a)?;
    worst = worst
        .max(max_diff(&back.h, &id_t.h))
        .max(max_diff(&back.lambda, &id_t.lambda));
    Ok(worst)
}

/// Composable chain of model-sampled GT points (pair case, any `k`).
fn model_chain(values: &[Vec<f64>], r: &mut ChaCha8Rng, t: f64) -> Result<Vec<GroupoidElement>> {
    let idx: Vec<usize> = (0..4).map(|_| r.random_range(0..values.len())).collect();
    idx.windows(2)
        .map(|w| {
            let (a, b) = (&values[w[0]], &values[w[1]]);
            let h = a
                .iter()
                .zip(b)
                .map(|(x, y)| cocycle_from_values(*x, *y, t))
                .collect::<Result<_>>()?;
            Ok(GroupoidElement {
                lambda: a.clone(),
                h,
                t,
            })
        })
        .collect()
}

fn model_gt_values(ctx: &Context<'_>) -> Vec<Vec<f64>> {
    let memo = ctx.shared.memo();
    ctx.eval
        .iter()
        .filter_map(|p| memo.gt(&p.coords).ok().map(|g| g.flat()))
        .collect()
}

fn polytope(ctx: &Context<'_>) -> GtPolytope {
    GtPolytope::new(ctx.spec.k, ctx.spec.n).expect("valid orbit")
}

pub fn axioms(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("groupoid_axioms", ctx.cfg.tol("groupoid"));
    let g = Groupoid::over_polytope(polytope(ctx));
    let mut r = rng(ctx.cfg.seed, Stream::Groupoid);
    let m = ctx.spec.half_dim();
    let model_values = if is_projective(ctx) {
        Vec::new()
    } else {
        model_gt_values(ctx)
    };
    for (case, t) in cases(ctx) {
        if !is_projective(ctx) && case != "pair" {
            continue;
        }
        let mut worst: f64 = 0.0;
        for _ in 0..ctx.cfg.groupoid_cases {
            let chain = if is_projective(ctx) {
                Ok(random_chain(&mut r, m, t, 3, true))
            } else {
                model_chain(&model_values, &mut r, t)
            };
            let outcome = chain.and_then(|c| {
                let d = axiom_defect(&g, &c)?;
                Ok((c[0].lambda.clone(), d))
            });
            match outcome {
                Ok((lambda, d)) => {
                    worst = worst.max(d);
                    tally.value(&lambda, d);
                }
                Err(e) => tally.record(&[t], Outcome::Failed(e.to_string())),
            }
        }
        tally.note(format!("{case} t={t}: {worst:.3e}"));
    }
    if !is_projective(ctx) {
        tally.note("k ≥ 2: arrows between sampled GT points, pair case only");
    }
    tally.finish()
}

pub fn action_law(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("action_law", ctx.cfg.tol("groupoid"));
    let mut r = rng(ctx.cfg.seed, Stream::Generators);
    let m = ctx.spec.half_dim();
    for (_, t) in cases(ctx) {
        for _ in 0..ctx.cfg.groupoid_cases {
            let lambda: Vec<f64> = (0..m).map(|_| r.random_range(0.0..2.0)).collect();
            let h1: Vec<f64> = (0..m).map(|_| r.random_range(-2.0..2.0)).collect();
            let h2: Vec<f64> = (0..m).map(|_| r.random_range(-2.0..2.0)).collect();
            let sum: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a + b).collect();
            let composed = act(&h1, &act(&h2, &lambda, t), t);
            let direct = act(&sum, &lambda, t);
            let zero = act(&vec![0.0; m], &lambda, t);
            tally.value(&lambda, max_diff(&composed, &direct).max(max_diff(&zero, &lambda)));
        }
    }
    tally.finish()
}

pub fn fixed_locus(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("fixed_locus", 0.0);
    let mut r = rng(ctx.cfg.seed, Stream::Generators);
    let m = ctx.spec.half_dim();
    for t in [-1.0, -0.5, 0.0, -2.0] {
        for _ in 0..ctx.cfg.groupoid_cases {
            let layout = random_layout(&mut r, m, t);
            let lambda = random_simplex_point(&mut r, layout, t);
            let h: Vec<f64> = (0..m).map(|_| r.random_range(-50.0..50.0)).collect();
            let moved = act(&h, &lambda, t);
            let d = lambda
                .iter()
                .zip(&moved)
                .filter(|(l, _)| **l + t == 0.0)
                .map(|(l, v)| (l - v).abs())
                .fold(0.0, f64::max);
            tally.value(&lambda, d);
        }
    }
    tally.note("components with λ_i = −t, h drawn from [−50, 50]");
    tally.finish()
}

pub fn membership_closure(ctx: &Context<'_>) -> CheckResult {
    if !is_projective(ctx) {
        return CheckResult::not_applicable("membership_closure", "membership is defined for k = 1 only");
    }
    let mut tally = Tally::at_most("membership_closure", 0.0);
    let mut r = rng(ctx.cfg.seed, Stream::Pairs);
    let m = ctx.spec.half_dim();
    let g = Groupoid::over_polytope(GtPolytope::simplex(m).expect("m ≥ 1"));
    for (case, t) in cases(ctx) {
        let mut bad = 0usize;
        for _ in 0..ctx.cfg.groupoid_cases {
            let chain = random_chain(&mut r, m, t, 2, true);
            let outcome = (|| -> Result<bool> {
                let closed = closure_check(&chain[0], &chain[1], MEMBERSHIP_TOL)?;
                let inverse = membership_cpn(&g.inverse(&chain[0])?, MEMBERSHIP_TOL);
                Ok(closed && inverse)
            })();
            match outcome {
                Ok(ok) => {
                    bad += usize::from(!ok);
                    tally.value(&chain[0].lambda, if ok { 0.0 } else { 1.0 });
                }
                Err(e) => tally.record(&chain[0].lambda, Outcome::Failed(e.to_string())),
            }
        }
        tally.note(format!("{case} t={t}: {bad} counterexamples"));
    }
    tally.finish()
}

type Triple = (Vec<f64>, Vec<f64>, Vec<f64>);

fn eval_triples(ctx: &Context<'_>) -> Vec<Triple> {
    let n = ctx.eval.len();
    (0..n)
        .map(|i| {
            (
                ctx.eval[i].coords.clone(),
                ctx.eval[(i + 1) % n].coords.clone(),
                ctx.eval[(i + 2) % n].coords.clone(),
            )
        })
        .collect()
}

fn smooth_skip(e: pnkit_core::Error) -> Outcome {
    match e {
        pnkit_core::Error::NumericalDegeneracy(_) => Outcome::Skipped,
        other => Outcome::Failed(other.to_string()),
    }
}

pub fn cocycle_morphism(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("cocycle_morphism", ctx.cfg.tol("groupoid"));
    let g = Groupoid::over_polytope(polytope(ctx));
    for t in ctx.pair_t(1.0) {
        for (x, y, z) in eval_triples(ctx) {
            let outcome = (|| -> Result<f64> {
                let xy = pair_to_element(ctx.model, &x, &y, t)?;
                let yz = pair_to_element(ctx.model, &y, &z, t)?;
                let xz = pair_to_element(ctx.model, &x, &z, t)?;
                Ok(element_diff(&g.compose(&xy, &yz)?, &xz))
            })();
            match outcome {
                Ok(d) => tally.value(&x, d),
                Err(e) => tally.record(&x, smooth_skip(e)),
            }
        }
    }
    tally.note("(x, y)·(y, z) against (x, z), pair-case t values");
    tally.finish()
}

pub fn cocycle_target(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("cocycle_target", ctx.cfg.tol("cocycle_target"));
    let g = Groupoid::over_polytope(polytope(ctx));
    for t in ctx.pair_t(1.0) {
        for (x, y, _) in eval_triples(ctx) {
            let outcome = (|| -> Result<f64> {
                let xy = pair_to_element(ctx.model, &x, &y, t)?;
                Ok(max_diff(&g.target(&xy)?, &ctx.model.gt_at(&y)?.flat()))
            })();
            match outcome {
                Ok(d) => tally.value(&x, d),
                Err(e) => tally.record(&x, smooth_skip(e)),
            }
        }
    }
    tally.finish()
}

pub fn pair_surjectivity(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("pair_surjectivity", ctx.cfg.tol("cocycle_target"));
    let g = Groupoid::over_polytope(polytope(ctx));
    let n = ctx.eval.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| [(i, (i + 1) % n), (i, n - 1 - i)]).collect();
    for t in ctx.pair_t(1.0) {
        for (i, j) in &pairs {
            let (x, y) = (&ctx.eval[*i].coords, &ctx.eval[*j].coords);
            let outcome = (|| -> Result<f64> {
                let e = pair_to_element(ctx.model, x, y, t)?;
                g.validate(&e)?;
                Ok(max_diff(&g.target(&e)?, &ctx.model.gt_at(y)?.flat()))
            })();
            match outcome {
                Ok(d) => tally.value(x, d),
                Err(e) => tally.record(x, smooth_skip(e)),
            }
        }
    }
    tally.note("valid arrow from x to y for every sampled pair, pair-case t values");
    tally.finish()
}
