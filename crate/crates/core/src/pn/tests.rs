use super::*;
use crate::geometry::{fd_gradient, ChartId, ChartPoint, FdConfig};
use crate::Error;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(coords: Vec<f64>) -> ChartPoint {
    ChartPoint {
        coords,
        chart: ChartId::standard(1),
    }
}

fn canonical_form(m: usize) -> DMatrix<f64> {
    // ω = Σ dx_i ∧ dp_i with coordinates (x_1..x_m, p_1..p_m).
    let mut w = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        w[(i, m + i)] = 1.0;
        w[(m + i, i)] = -1.0;
    }
    w
}

fn random_antisym(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    &a - a.transpose()
}

/// `P(x) = A + Σ_l x_l B_l`.
struct LinearBivector {
    a: DMatrix<f64>,
    b: Vec<DMatrix<f64>>,
}

impl LinearBivector {
    fn random(seed: u64, d: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            a: random_antisym(&mut rng, d),
            b: (0..d).map(|_| random_antisym(&mut rng, d)).collect(),
        }
    }

    fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        let mut p = self.a.clone();
        for (xl, bl) in x.iter().zip(&self.b) {
            p += bl * *xl;
        }
        p
    }

    fn field(&self) -> TensorField<'_> {
        TensorField::new(TensorKind::Bivector, move |x| Ok(self.eval(x)))
    }
}

#[test]
fn schouten_of_constant_fields_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = TensorField::constant(TensorKind::Bivector, random_antisym(&mut rng, 4));
    let s = schouten_bivector_bivector(&p, &p, &pt(vec![0.1; 4]), &FdConfig::default()).unwrap();
    assert_eq!(s.max_abs(), 0.0);
    let inv = canonical_form(2).try_inverse().unwrap();
    let q = TensorField::constant(TensorKind::Bivector, inv);
    let s = schouten_bivector_bivector(&q, &q, &pt(vec![0.3; 4]), &FdConfig::default()).unwrap();
    assert_eq!(s.max_abs(), 0.0);
}

#[test]
fn schouten_matches_jacobiator_of_coordinate_brackets() {
    // Oracle: [P,P]^{ijk} = −2 Σ_cyc {x^i, {x^j, x^k}} with exact derivatives.
    let lin = LinearBivector::random(7, 4);
    let x = vec![0.2, -0.4, 0.7, 0.1];
    let p = lin.eval(&x);
    let bracket_with_coordinate =
        |i: usize, j: usize, k: usize| -> f64 { (0..4).map(|l| p[(i, l)] * lin.b[l][(j, k)]).sum() };
    let fd = FdConfig::default();
    let field = lin.field();
    let s = schouten_bivector_bivector(&field, &field, &pt(x.clone()), &fd).unwrap();
    assert!(s.max_abs() > 1e-3, "random linear bivector should not be Poisson");
    assert!(s.antisymmetry_defect() < 1e-9);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let jac = bracket_with_coordinate(i, j, k)
                    + bracket_with_coordinate(j, k, i)
                    + bracket_with_coordinate(k, i, j);
                assert!((s.get(i, j, k) + 2.0 * jac).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn lie_poisson_so3_satisfies_jacobi() {
    // {x_i, x_j} = ε_{ijk} x_k.
    let field = TensorField::new(TensorKind::Bivector, |x| {
        Ok(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, x[2], -x[1], -x[2], 0.0, x[0], x[1], -x[0], 0.0],
        ))
    });
    let s = schouten_bivector_bivector(&field, &field, &pt(vec![0.3, -1.1, 0.8]), &FdConfig::default()).unwrap();
    assert!(s.max_abs() < 1e-9);
}

#[test]
fn schouten_rejects_wrong_kind() {
    let n = TensorField::constant(TensorKind::Endomorphism, DMatrix::identity(2, 2));
    let r = schouten_bivector_bivector(&n, &n, &pt(vec![0.0; 2]), &FdConfig::default());
    assert!(matches!(r, Err(Error::KindMismatch { .. })));
}

#[test]
fn lie_derivative_cases() {
    let fd = FdConfig::default();
    let p = TensorField::constant(TensorKind::Bivector, canonical_form(2).try_inverse().unwrap());
    let zero = VectorField::new(|_| Ok(DVector::zeros(4)));
    assert_eq!(
        lie_derivative_bivector(&zero, &p, &pt(vec![0.2; 4]), &fd)
            .unwrap()
            .0
            .norm(),
        0.0
    );
    let constant = VectorField::new(|_| Ok(DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0])));
    assert_eq!(
        lie_derivative_bivector(&constant, &p, &pt(vec![0.2; 4]), &fd)
            .unwrap()
            .0
            .norm(),
        0.0
    );

    // Hamiltonian vector field of H = x1² p2 + sin(x2) p1 preserves P.
    let pinv = canonical_form(2).try_inverse().unwrap();
    let ham = {
        let pinv = pinv.clone();
        VectorField::new(move |x: &[f64]| {
            let grad = DVector::from_vec(vec![2.0 * x[0] * x[3], x[1].cos() * x[2], x[1].sin(), x[0] * x[0]]);
            Ok(pinv.tr_mul(&grad))
        })
    };
    let l = lie_derivative_bivector(&ham, &p, &pt(vec![0.4, -0.3, 1.2, 0.7]), &fd).unwrap();
    assert!(l.0.norm() < 1e-7, "{}", l.0.norm());
}

#[test]
fn torsion_of_multiples_of_identity_is_zero() {
    let fd = FdConfig::default();
    for c in [1.0, -2.5] {
        let n = TensorField::constant(TensorKind::Endomorphism, DMatrix::identity(4, 4) * c);
        assert_eq!(
            nijenhuis_torsion_all(&n, &pt(vec![0.1; 4]), &fd).unwrap().max_abs(),
            0.0
        );
        assert_eq!(nijenhuis_torsion(&n, 0, 3, &pt(vec![0.1; 4]), &fd).unwrap().norm(), 0.0);
    }
}

#[test]
fn torsion_of_separated_diagonal_field_vanishes() {
    // N = diag(f(x0), g(x1)) is Nijenhuis.
    let n = TensorField::new(TensorKind::Endomorphism, |x| {
        Ok(DMatrix::from_diagonal(&DVector::from_vec(vec![
            x[0] * x[0] + 1.0,
            (2.0 * x[1]).sin(),
        ])))
    });
    let t = nijenhuis_torsion_all(&n, &pt(vec![0.7, -0.2]), &FdConfig::default()).unwrap();
    assert!(t.max_abs() < 1e-9);
}

#[test]
fn torsion_negative_control_and_pair_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
    let b: Vec<DMatrix<f64>> = (0..4)
        .map(|_| DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)))
        .collect();
    let n = TensorField::new(TensorKind::Endomorphism, move |x| {
        let mut m = a.clone();
        for (xl, bl) in x.iter().zip(&b) {
            m += bl * (*xl * *xl);
        }
        Ok(m)
    });
    let p = pt(vec![0.3, 0.5, -0.4, 0.9]);
    let fd = FdConfig::default();
    let all = nijenhuis_torsion_all(&n, &p, &fd).unwrap();
    assert!(all.max_abs() > 1e-2);
    let t12 = nijenhuis_torsion(&n, 1, 2, &p, &fd).unwrap();
    for i in 0..4 {
        assert!((t12[i] - all.get(i, 1, 2)).abs() < 1e-14);
        assert!((all.get(i, 2, 1) + all.get(i, 1, 2)).abs() < 1e-14);
    }
}

#[test]
fn hierarchy_bivector_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = Bivector(random_antisym(&mut rng, 4));
    assert_eq!(hierarchy_bivector(&p, &Endomorphism::identity(4), 0).unwrap(), p);
    let scaled = hierarchy_bivector(&p, &Endomorphism(DMatrix::identity(4, 4) * 3.0), 1).unwrap();
    assert!((scaled.0 - &p.0 * 3.0).norm() < 1e-15);
    let random = Endomorphism(DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)));
    assert!(matches!(
        hierarchy_bivector(&p, &random, 1),
        Err(Error::AsymmetryResidual { .. })
    ));
}

#[test]
fn np_symmetry_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = Bivector(random_antisym(&mut rng, 4));
    assert_eq!(check_np_symmetry(&p, &Endomorphism::identity(4)), 0.0);
    // N = π ω with P = ω⁻¹ is compatible by construction.
    let omega = canonical_form(2);
    let pi = random_antisym(&mut rng, 4);
    let n = Endomorphism(&pi * &omega);
    let pinv = Bivector(omega.try_inverse().unwrap());
    assert!(check_np_symmetry(&pinv, &n) < 1e-12);
    let random = Endomorphism(DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)));
    assert!(check_np_symmetry(&p, &random) > 1e-2);
}

#[test]
fn canonical_hamiltonian_values() {
    let id = TensorField::constant(TensorKind::Endomorphism, DMatrix::identity(6, 6));
    assert_eq!(canonical_hamiltonian(&id, 1, &pt(vec![0.0; 6])).unwrap(), 6.0);
    let (a, b) = (0.7, -1.3);
    let d = Endomorphism(DMatrix::from_diagonal(&DVector::from_vec(vec![a, a, b, b])));
    assert!((trace_power(&d, 2) - (a * a + b * b)).abs() < 1e-15);
}

fn diagonal_nijenhuis<'a>() -> TensorField<'a> {
    // Coordinates (x1, y1, x2, y2); eigenvalues f(x1), g(x2) each doubled.
    TensorField::new(TensorKind::Endomorphism, |x| {
        let f = 1.0 + x[0] * x[0];
        let g = (x[2]).exp();
        Ok(DMatrix::from_diagonal(&DVector::from_vec(vec![f, f, g, g])))
    })
}

#[test]
fn lenart_relation() {
    let fd = FdConfig::default();
    let p = pt(vec![0.4, 0.1, -0.3, 0.2]);
    let c = TensorField::constant(TensorKind::Endomorphism, DMatrix::identity(4, 4) * 1.7);
    for k in 1..=4 {
        assert!(check_lenart_canonical(&c, k, &p, &fd).unwrap() < 1e-12);
        assert!(check_lenart_canonical(&diagonal_nijenhuis(), k, &p, &fd).unwrap() < 1e-7);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let b: Vec<DMatrix<f64>> = (0..4)
        .map(|_| DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)))
        .collect();
    let random = TensorField::new(TensorKind::Endomorphism, move |x| {
        let mut m = DMatrix::identity(4, 4);
        for (xl, bl) in x.iter().zip(&b) {
            m += bl * *xl;
        }
        Ok(m)
    });
    assert!(check_lenart_canonical(&random, 1, &p, &fd).unwrap() > 1e-2);
}

#[test]
fn logdet_extension_cases() {
    let fd = FdConfig::default();
    let p = pt(vec![0.4, 0.1, -0.3, 0.2]);
    let c = TensorField::constant(TensorKind::Endomorphism, DMatrix::identity(4, 4) * 2.0);
    assert!(check_logdet_extension(&c, 0.5, &p, &fd, 1e-10).unwrap() < 1e-12);
    assert!(check_logdet_extension(&diagonal_nijenhuis(), 1.0, &p, &fd, 1e-10).unwrap() < 1e-7);
    // N = 2·id, t = −2: N_t = 0.
    let r = check_logdet_extension(&c, -2.0, &p, &fd, 1e-10);
    assert!(matches!(r, Err(Error::SingularNt { .. })));
}

#[test]
fn koszul_bracket_of_exact_forms() {
    let fd = FdConfig::central2(1e-4);
    let lin = LinearBivector::random(11, 4);
    let field = lin.field();
    let f = ScalarField::new(|x| Ok(x[0] * x[1] + x[2].powi(2)));
    let g = ScalarField::new(|x| Ok(x[3] * x[0] - 0.5 * x[1].powi(2)));
    let p = pt(vec![0.3, -0.2, 0.5, 0.8]);
    let self_bracket = koszul_bracket(&field, &f, &f, &p, &fd).unwrap();
    assert!(self_bracket.norm() < 1e-6);
    let kb = koszul_bracket(&field, &f, &g, &p, &fd).unwrap();
    // Oracle: gradient of the function {f, g} with exact inner gradients.
    let pb = |x: &[f64]| -> crate::Result<f64> {
        let df = DVector::from_vec(vec![x[1], x[0], 2.0 * x[2], 0.0]);
        let dg = DVector::from_vec(vec![x[3], -x[1], 0.0, x[0]]);
        Ok(poisson_bracket(&Bivector(lin.eval(x)), &df, &dg))
    };
    let expected = fd_gradient(pb, &p.coords, &FdConfig::default()).unwrap();
    assert!((kb - expected).norm() < 1e-6);
}

#[test]
fn poisson_bracket_values() {
    let p = Bivector(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    let dx = DVector::from_vec(vec![1.0, 0.0]);
    let dp = DVector::from_vec(vec![0.0, 1.0]);
    assert_eq!(poisson_bracket(&p, &dx, &dp), 1.0);
    assert_eq!(poisson_bracket(&p, &dx, &dx), 0.0);
}

#[test]
fn spectrum_clustering() {
    let (a, b) = (0.3, 1.7);
    let d = Endomorphism(DMatrix::from_diagonal(&DVector::from_vec(vec![b, a, a, b])));
    let s = nijenhuis_spectrum(&d, DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(
        s,
        vec![
            SpectralCluster {
                value: a,
                multiplicity: 2
            },
            SpectralCluster {
                value: b,
                multiplicity: 2
            }
        ]
    );
    let s = nijenhuis_spectrum(&Endomorphism::identity(4), DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(
        s,
        vec![SpectralCluster {
            value: 1.0,
            multiplicity: 4
        }]
    );
    let odd = Endomorphism(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 2.0])));
    assert!(matches!(
        nijenhuis_spectrum(&odd, 1e-6),
        Err(Error::OddMultiplicity { .. })
    ));
    let rot = Endomorphism(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    assert!(matches!(
        nijenhuis_spectrum(&rot, 1e-6),
        Err(Error::ComplexSpectrum { .. })
    ));
}

#[test]
fn eigen_equation_cases() {
    let fd = FdConfig::default();
    let p = pt(vec![0.4, 0.1, -0.3, 0.2]);
    let c = TensorField::constant(TensorKind::Endomorphism, DMatrix::identity(4, 4) * 2.0);
    let constant = ScalarField::new(|_| Ok(2.0));
    assert_eq!(check_eigen_equation(&constant, &c, &p, &fd).unwrap(), 0.0);
    let lam = ScalarField::new(|x| Ok(1.0 + x[0] * x[0]));
    assert!(check_eigen_equation(&lam, &diagonal_nijenhuis(), &p, &fd).unwrap() < 1e-9);
    let coordinate = ScalarField::new(|x| Ok(x[2]));
    assert!(check_eigen_equation(&coordinate, &diagonal_nijenhuis(), &p, &fd).unwrap() > 1e-2);
}

#[test]
fn hamiltonian_form_cases() {
    let fd = FdConfig::central2(1e-4);
    let p = pt(vec![0.4, 0.1, -0.3, 0.2]);
    let lam = ScalarField::new(|x| Ok(1.0 + x[0] * x[0]));
    let (closed, n_closed) = hamiltonian_form_residual(&lam, &diagonal_nijenhuis(), &p, &fd).unwrap();
    assert!(closed < 1e-6 && n_closed < 1e-6, "{closed} {n_closed}");
    let mixed = ScalarField::new(|x| Ok(x[0] * x[2]));
    let (closed, n_closed) = hamiltonian_form_residual(&mixed, &diagonal_nijenhuis(), &p, &fd).unwrap();
    assert!(closed < 1e-6);
    assert!(n_closed > 1e-2);
}

#[test]
fn vandermonde_values() {
    assert_eq!(vandermonde_checks(&[1.0, 2.0]), (1.0, 2.0));
    assert_eq!(vandermonde_checks(&[1.0, 1.0]).0, 0.0);
}

proptest! {
    #[test]
    fn vandermonde_matches_determinant(l in prop::collection::vec(-2.0f64..2.0, 1..6)) {
        let m = l.len();
        let b = DMatrix::from_fn(m, m, |i, k| l[i].powi(k as i32));
        let a = DMatrix::from_fn(m, m, |i, k| l[i].powi(k as i32 + 1));
        let (db, da) = vandermonde_checks(&l);
        prop_assert!((db - b.determinant()).abs() < 1e-9 * (1.0 + db.abs()));
        prop_assert!((da - a.determinant()).abs() < 1e-9 * (1.0 + da.abs()));
    }

    #[test]
    fn spectral_shift_is_exact(vals in prop::collection::vec(-3.0f64..3.0, 1..4), t in -2.0f64..2.0) {
        let mut diag = Vec::new();
        for v in &vals { diag.push(*v); diag.push(*v); }
        let n = Endomorphism(DMatrix::from_diagonal(&DVector::from_vec(diag)));
        if let (Ok(a), Ok(b)) = (nijenhuis_spectrum(&n, 1e-9), nijenhuis_spectrum(&n.shifted(t), 1e-9)) {
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.value + t - y.value).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn scaled_brackets_agree_with_raw_ones() {
    let fd = FdConfig::default();
    let lin = LinearBivector::random(13, 4);
    let field = lin.field();
    let p = pt(vec![0.3, -0.2, 0.5, 0.8]);
    let raw = schouten_bivector_bivector(&field, &field, &p, &fd).unwrap().max_abs();
    let scaled = schouten_scaled(&field, &field, &p, &fd).unwrap();
    assert_eq!(scaled.residual, raw);
    assert!(scaled.scale >= scaled.residual);

    // [λP, λP] = λ²[P, P]: the relative residual does not move once scale > 1.
    let big = TensorField::new(TensorKind::Bivector, |x| Ok(lin.eval(x) * 1e3));
    let s_big = schouten_scaled(&big, &big, &p, &fd).unwrap();
    assert!(scaled.scale > 1.0);
    assert!((s_big.relative() - scaled.relative()).abs() < 1e-6 * scaled.relative());

    let n = TensorField::new(TensorKind::Endomorphism, |x| {
        Ok(DMatrix::from_fn(3, 3, |i, j| x[i] * x[j] + (i + 2 * j) as f64))
    });
    let q = pt(vec![0.4, -0.7, 1.1]);
    let t = torsion_scaled(&n, &q, &fd).unwrap();
    assert_eq!(t.residual, nijenhuis_torsion_all(&n, &q, &fd).unwrap().max_abs());
    assert!(t.scale >= t.residual && t.residual > 1e-3);

    let f = ScalarField::new(|x| Ok(x[0] * x[1] + x[2].powi(2)));
    let g = ScalarField::new(|x| Ok(x[3] * x[0]));
    let fd4 = FdConfig::central2(1e-4);
    let k = koszul_scaled(&field, &f, &g, &p, &fd4).unwrap();
    assert_eq!(k.residual, koszul_bracket(&field, &f, &g, &p, &fd4).unwrap().amax());
    assert!(k.scale > 0.0);
}

#[test]
fn scaled_poisson_bracket() {
    // Canonical P on R², df = (1, 0), dg = (0, 1): {f, g} = 1 with scale 1.
    let p = Bivector(canonical_form(1).try_inverse().unwrap());
    let (dx, dp) = (DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0]));
    let b = poisson_bracket_scaled(&p, &dx, &dp);
    assert!((b.residual - 1.0).abs() < 1e-15 && (b.scale - 1.0).abs() < 1e-15);
    // Cancelling terms: df = dg = (1, 1).
    let ones = DVector::from_vec(vec![1.0, 1.0]);
    let b = poisson_bracket_scaled(&p, &ones, &(&ones * 1e3));
    assert!(b.residual < 1e-12 && (b.scale - 2e3).abs() < 1e-9);
}
