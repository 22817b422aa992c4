use nalgebra::DVector;
use pnkit_core::geometry::{fd_gradient, ChartPoint};
use pnkit_core::linalg::general_eigenvalues;
use pnkit_core::models::ModelTensor;
use pnkit_core::pn::{
    check_eigen_equation, check_lenart_canonical, check_logdet_extension, check_np_symmetry, hamiltonian_form_residual,
    koszul_scaled, lie_derivative_bivector, nijenhuis_spectrum, poisson_bracket_scaled, schouten_scaled,
    torsion_scaled, trace_power, vandermonde_checks, Endomorphism, VectorField, DEFAULT_CLUSTER_TOL,
};
use pnkit_core::Result;

use super::{scan, Context};
use crate::cache::Memo;
use crate::report::{CheckResult, Tally};

const SCALED: &str = "residual is |bracket| / max(1, largest sum of absolute terms)";

fn t_labels(prefix: &str, ts: &[f64]) -> Vec<String> {
    ts.iter().map(|t| format!("{prefix}t={t}")).collect()
}

/// Free GT values at `p` when `p` lies in the working dense open set.
fn m0_values(ctx: &Context<'_>, memo: &Memo<'_, '_>, p: &ChartPoint) -> Result<Option<Vec<f64>>> {
    let gt = memo.gt(&p.coords)?;
    Ok(gt.in_m0(ctx.cfg.m0_gap).then(|| gt.flat()))
}

pub fn jacobi(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.cfg.t_values.clone();
    let mut labels = vec!["pi".to_string()];
    labels.extend(t_labels("pi_", &ts));
    let tally = Tally::at_most("jacobi", ctx.cfg.tol("schouten"));
    scan(ctx, tally, ctx.eval, &labels, |memo, p| {
        let fd = ctx.fd();
        let pi = memo.field(ModelTensor::Pi);
        let mut out = vec![schouten_scaled(&pi, &pi, p, &fd)?.relative()];
        for t in &ts {
            let f = memo.field(ModelTensor::PencilPi(*t));
            out.push(schouten_scaled(&f, &f, p, &fd)?.relative());
        }
        Ok(Some(out))
    })
    .with_note(SCALED)
}

pub fn compatibility(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("compatibility", ctx.cfg.tol("schouten"));
    scan(ctx, tally, ctx.eval, &[], |memo, p| {
        let s = schouten_scaled(
            &memo.field(ModelTensor::Pi),
            &memo.field(ModelTensor::OmegaInv),
            p,
            &ctx.fd(),
        )?;
        Ok(Some(vec![s.relative()]))
    })
    .with_note(SCALED)
}

/// Levels `P_1, P_2, P_3` with `P_{j+1} = N_t^j ω⁻¹`.
const HIERARCHY_LEVELS: usize = 3;

pub fn hierarchy_compatibility(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.cfg.t_values.clone();
    let tally = Tally::at_most("hierarchy_compatibility", ctx.cfg.tol("schouten"));
    scan(ctx, tally, ctx.eval, &t_labels("", &ts), |memo, p| {
        let fd = ctx.fd();
        let mut out = Vec::with_capacity(ts.len());
        for t in &ts {
            let fields: Vec<_> = (0..HIERARCHY_LEVELS)
                .map(|j| memo.field(ModelTensor::Hierarchy { j, t: *t }))
                .collect();
            let mut worst: f64 = 0.0;
            for a in 0..HIERARCHY_LEVELS {
                for b in a..HIERARCHY_LEVELS {
                    worst = worst.max(schouten_scaled(&fields[a], &fields[b], p, &fd)?.relative());
                }
            }
            out.push(worst);
        }
        Ok(Some(out))
    })
    .with_note("pairs P_j, P_s for 1 ≤ j ≤ s ≤ 3")
    .with_note(SCALED)
}

pub fn torsion(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.t_grid(&[0.0]);
    let tally = Tally::at_most("torsion", ctx.cfg.tol("torsion"));
    scan(ctx, tally, ctx.eval, &t_labels("", &ts), |memo, p| {
        ts.iter()
            .map(|t| Ok(torsion_scaled(&memo.field(ModelTensor::PencilN(*t)), p, &ctx.fd())?.relative()))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    })
    .with_note(SCALED)
}

pub fn np_symmetry(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.t_grid(&[0.0]);
    let tally = Tally::at_most("np_symmetry", ctx.cfg.tol("np"));
    scan(ctx, tally, ctx.eval, &t_labels("", &ts), |memo, p| {
        let m = memo.get(&p.coords)?;
        Ok(Some(
            ts.iter()
                .map(|t| {
                    let n = m.n_t(*t);
                    check_np_symmetry(&m.omega_inv, &n).max(check_np_symmetry(&m.pi_t(*t), &n))
                })
                .collect(),
        ))
    })
    .with_note("P = ω⁻¹ and P = π_t")
}

pub fn lenart(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.t_grid(&[0.0]);
    let tally = Tally::at_most("lenart", ctx.cfg.tol("grad"));
    scan(ctx, tally, ctx.eval, &t_labels("", &ts), |memo, p| {
        let mut out = Vec::with_capacity(ts.len());
        for t in &ts {
            let n = memo.field(ModelTensor::PencilN(*t));
            let mut worst: f64 = 0.0;
            for k in 1..=4 {
                worst = worst.max(check_lenart_canonical(&n, k, p, &ctx.fd())?);
            }
            out.push(worst);
        }
        Ok(Some(out))
    })
    .with_note("k = 1..4")
}

pub fn logdet_extension(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.pair_t(1.0);
    let min_det = ctx.cfg.tol("det");
    let tally = Tally::at_most("logdet_extension", ctx.cfg.tol("grad"));
    scan(ctx, tally, ctx.eval, &t_labels("", &ts), |memo, p| {
        let n = memo.field(ModelTensor::N);
        ts.iter()
            .map(|t| check_logdet_extension(&n, *t, p, &ctx.fd(), min_det))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    })
    .with_note("t outside [−2, 0], where det N_t stays away from 0")
}

fn gradients(memo: &Memo<'_, '_>, t: f64, p: &ChartPoint, ctx: &Context<'_>) -> Result<Vec<DVector<f64>>> {
    (1..=3)
        .map(|k| {
            let f = memo.hamiltonian(k, t);
            fd_gradient(|q: &[f64]| f.eval(q), &p.coords, &ctx.fd())
        })
        .collect()
}

pub fn involution(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.t_grid(&[0.0]);
    let tally = Tally::at_most("involution", ctx.cfg.tol("inv"));
    scan(ctx, tally, ctx.eval, &t_labels("", &ts), |memo, p| {
        let m = memo.get(&p.coords)?;
        let mut out = Vec::with_capacity(ts.len());
        for t in &ts {
            let grads = gradients(memo, *t, p, ctx)?;
            let hier = [m.hierarchy(0, *t)?, m.hierarchy(1, *t)?];
            let mut worst: f64 = 0.0;
            for ps in &hier {
                for k in 0..3 {
                    for r in (k + 1)..3 {
                        worst = worst.max(poisson_bracket_scaled(ps, &grads[k], &grads[r]).relative());
                    }
                }
            }
            out.push(worst);
        }
        Ok(Some(out))
    })
    .with_note("{I_k, I_r}_{P_s} for k, r ≤ 3, s ∈ {1, 2}")
    .with_note(SCALED)
}

pub fn koszul_involution(ctx: &Context<'_>) -> CheckResult {
    let t = ctx.cfg.t_values.first().copied().unwrap_or(0.0);
    let tally = Tally::at_most("koszul_involution", ctx.cfg.tol("grad"));
    scan(ctx, tally, ctx.nested_points(), &[], |memo, p| {
        let fd = ctx.nested_fd();
        let mut worst: f64 = 0.0;
        for s in 0..2 {
            let ps = memo.field(ModelTensor::Hierarchy { j: s, t });
            for (k, r) in [(1, 2), (1, 3), (2, 3)] {
                let b = koszul_scaled(&ps, &memo.hamiltonian(k, t), &memo.hamiltonian(r, t), p, &fd)?;
                worst = worst.max(b.relative());
            }
        }
        Ok(Some(vec![worst]))
    })
    .with_note(format!("{{dI_k, dI_r}}_{{P_s}} at t = {t}, k < r ≤ 3, s ∈ {{1, 2}}"))
    .with_note(SCALED)
}

pub fn double_degeneracy(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("double_degeneracy", 0.0);
    scan(ctx, tally, &ctx.all_points(), &[], |memo, p| {
        let n = memo.get(&p.coords)?.n();
        Ok(Some(vec![match nijenhuis_spectrum(&n, DEFAULT_CLUSTER_TOL) {
            Ok(_) => 0.0,
            Err(_) => 1.0,
        }]))
    })
    .with_note("residual counts odd-multiplicity or complex spectra")
}

pub fn eigen_equation(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("eigen_equation", ctx.cfg.tol("grad"));
    scan(ctx, tally, ctx.eval, &[], |memo, p| {
        let Some(values) = m0_values(ctx, memo, p)? else {
            return Ok(None);
        };
        let n = memo.field(ModelTensor::N);
        let mut worst: f64 = 0.0;
        for i in 0..values.len() {
            worst = worst.max(check_eigen_equation(&memo.gt_value(i), &n, p, &ctx.fd())?);
        }
        Ok(Some(vec![worst]))
    })
    .with_note("points outside the working dense open set are skipped")
}

pub fn vandermonde(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_least("vandermonde", ctx.cfg.tol("det"));
    scan(ctx, tally, ctx.eval, &[], |memo, p| {
        let Some(mut values) = m0_values(ctx, memo, p)? else {
            return Ok(None);
        };
        values.sort_by(f64::total_cmp);
        Ok(Some(vec![vandermonde_checks(&values).0.abs()]))
    })
    .with_note("max_residual is the smallest |det B|")
}

pub fn hamiltonian_forms(ctx: &Context<'_>) -> CheckResult {
    let tally = Tally::at_most("hamiltonian_forms", ctx.cfg.tol("grad"));
    let labels = ["d(N*dλ)".to_string(), "d(dλ) floor".to_string()];
    scan(ctx, tally, ctx.nested_points(), &labels, |memo, p| {
        let Some(values) = m0_values(ctx, memo, p)? else {
            return Ok(None);
        };
        let n = memo.field(ModelTensor::N);
        let (mut twisted, mut floor) = (0.0f64, 0.0f64);
        for i in 0..values.len() {
            let (f, t) = hamiltonian_form_residual(&memo.gt_value(i), &n, p, &ctx.nested_fd())?;
            floor = floor.max(f);
            twisted = twisted.max(t);
        }
        Ok(Some(vec![twisted, floor]))
    })
}

pub fn modular_vector_field(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.cfg.t_values.clone();
    let tally = Tally::at_most("modular_vector_field", ctx.cfg.tol("schouten"));
    scan(ctx, tally, ctx.nested_points(), &t_labels("", &ts), |memo, p| {
        let fd = ctx.nested_fd();
        let i1 = memo.hamiltonian(1, 0.0);
        let sigma = VectorField::new(|q: &[f64]| {
            let grad = fd_gradient(|r: &[f64]| i1.eval(r), q, &fd)?;
            Ok(memo.get(q)?.omega_inv.0.tr_mul(&grad))
        });
        ts.iter()
            .map(|t| {
                Ok(
                    lie_derivative_bivector(&sigma, &memo.field(ModelTensor::PencilPi(*t)), p, &fd)?
                        .0
                        .amax(),
                )
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    })
    .with_note("L_σ π_t with σ = ω⁻¹ dI_1")
}

fn sorted_real_spectrum(n: &Endomorphism) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = general_eigenvalues(&n.0)?.iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn spectral_shift(ctx: &Context<'_>) -> CheckResult {
    let ts = ctx.cfg.t_values.clone();
    let tally = Tally::at_most("spectral_shift", ctx.cfg.tol("shift"));
    scan(ctx, tally, ctx.eval, &t_labels("", &ts), |memo, p| {
        let m = memo.get(&p.coords)?;
        let base = sorted_real_spectrum(&m.n())?;
        ts.iter()
            .map(|t| {
                let shifted = sorted_real_spectrum(&m.n_t(*t))?;
                Ok(base
                    .iter()
                    .zip(&shifted)
                    .map(|(a, b)| (a + t - b).abs())
                    .fold(0.0, f64::max))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    })
}

pub fn trace_convention(ctx: &Context<'_>) -> CheckResult {
    let mut tally = Tally::at_most("trace_convention", ctx.cfg.tol("trace_ratio"));
    let ratios: Vec<Option<f64>> = ctx
        .eval
        .iter()
        .map(|p| {
            let memo = ctx.shared.memo();
            m0_values(ctx, &memo, p).ok().flatten()?;
            let n = memo.get(&p.coords).ok()?.n();
            let distinct: f64 = nijenhuis_spectrum(&n, DEFAULT_CLUSTER_TOL)
                .ok()?
                .iter()
                .map(|c| c.value)
                .sum();
            (distinct.abs() > 1e-6).then(|| trace_power(&n, 1) / distinct)
        })
        .collect();
    for (p, r) in ctx.eval.iter().zip(&ratios) {
        match r {
            Some(r) => tally.value(&p.coords, (r - 2.0).abs()),
            None => tally.record(&p.coords, crate::report::Outcome::Skipped),
        }
    }
    let found: Vec<f64> = ratios.iter().flatten().copied().collect();
    if !found.is_empty() {
        let mean = found.iter().sum::<f64>() / found.len() as f64;
        tally.note(format!(
            "Tr N / Σ distinct eigenvalues = {mean:.12} on average; residual is |ratio − 2|"
        ));
    }
    tally.finish()
}
