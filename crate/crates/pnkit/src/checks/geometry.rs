use pnkit_core::geometry::{embed, fd_directional, tangent_frame, ChartPoint, FdConfig, FdScheme, GeneratorSolver};
use pnkit_core::linalg::{commutator, unitary_algebra_basis};

use super::{scan, Context};
use crate::report::{CheckResult, Tally};

pub fn spectrum_preservation(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("spectrum_preservation", ctx.cfg.tol("spectrum_preservation"));
    scan(ctx, tally, &ctx.all_points(), &[], |_, p| {
        Ok(Some(vec![embed(&ctx.spec, p)?.spectrum_defect(&ctx.spec)]))
    })
}

pub fn frame_rank(ctx: &Context<'_>) -> CheckResult {
    let expected = ctx.spec.dim();
    let tally = Tally::at_most("frame_rank", 0.0);
    scan(ctx, tally, ctx.eval, &[], |_, p| {
        let rank = tangent_frame(&ctx.spec, p, &ctx.fd())?.rank();
        Ok(Some(vec![rank.abs_diff(expected) as f64]))
    })
    .with_note(format!("residual is |rank − {expected}|"))
}

pub fn generator_round_trip(ctx: &Context<'_>) -> CheckResult {
    let basis = unitary_algebra_basis(ctx.spec.n);
    let tally = Tally::at_most("generator_round_trip", ctx.cfg.tol("round_trip"));
    scan(ctx, tally, ctx.eval, &[], |memo, p| {
        let x = &memo.get(&p.coords)?.local.point;
        let solver = GeneratorSolver::new(x);
        let mut worst: f64 = 0.0;
        for a in &basis {
            let v = commutator(a, &x.matrix);
            let y = solver.solve(&v)?;
            worst = worst.max((commutator(&y, &x.matrix) - v).norm());
        }
        Ok(Some(vec![worst]))
    })
}

/// `f = Σ_j (q_j⁵ + 10 q_j³)`: `f'''` never vanishes, so both stencils show
/// their nominal order at moderate steps.
fn test_field(q: &[f64]) -> f64 {
    q.iter().map(|v| v.powi(5) + 10.0 * v.powi(3)).sum()
}

fn test_derivative(v: f64) -> f64 {
    5.0 * v.powi(4) + 30.0 * v * v
}

fn observed_order(p: &ChartPoint, j: usize, scheme: FdScheme) -> f64 {
    let exact = test_derivative(p.coords[j]);
    let err = |step: f64| (fd_directional(test_field, p, j, &FdConfig { step, scheme }) - exact).abs();
    (err(1e-2) / err(5e-3)).log2()
}

pub fn fd_convergence(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("fd_convergence", ctx.cfg.tol("fd_order"));
    let labels = ["central2".to_string(), "central4".to_string()];
    scan(ctx, tally, ctx.eval, &labels, |_, p| {
        let mut out = vec![0.0f64; 2];
        for j in 0..p.coords.len() {
            out[0] = out[0].max((observed_order(p, j, FdScheme::Central2) - 2.0).abs());
            out[1] = out[1].max((observed_order(p, j, FdScheme::Central4) - 4.0).abs());
        }
        Ok(Some(out))
    })
    .with_note("residual is |observed order − nominal order|")
}
