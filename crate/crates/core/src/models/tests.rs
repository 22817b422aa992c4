use super::*;
use crate::geometry::{base_chart, embed, exact_tangent_frame, make_rho, ChartId, ChartPoint, FdConfig, OrbitSpec};
use crate::linalg::{hermitian_eigenvalues, skew_hermitian_defect};
use crate::pn::{nijenhuis_spectrum, schouten_bivector_bivector, DEFAULT_CLUSTER_TOL};
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn specs() -> Vec<OrbitSpec> {
    vec![
        OrbitSpec::projective(1).unwrap(),
        OrbitSpec::projective(2).unwrap(),
        OrbitSpec::projective(3).unwrap(),
        OrbitSpec::grassmannian(2, 4).unwrap(),
    ]
}

fn samples(spec: &OrbitSpec, count: usize, seed: u64) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.7).unwrap();
    (0..count)
        .map(|_| {
            let coords = (0..spec.dim()).map(|_| normal.sample(&mut rng)).collect();
            ChartPoint::standard(spec, coords).unwrap()
        })
        .collect()
}

fn model(spec: &OrbitSpec) -> HermitianModel {
    HermitianModel::new(
        *spec,
        0.5,
        2.0 / spec.scale,
        ChartId::standard(spec.k),
        GtPattern::counting_rule(spec),
    )
    .unwrap()
}

#[test]
fn standard_r_matrix_shape() {
    let r = RMatrixSpec::standard(4, 0.5).unwrap();
    assert_eq!(r.pairs.len(), 6);
    for (a, b) in &r.pairs {
        assert_eq!(skew_hermitian_defect(a), 0.0);
        assert_eq!(skew_hermitian_defect(b), 0.0);
    }
    assert!(RMatrixSpec::standard(3, 0.0).is_err());
}

#[test]
fn kks_on_cp1_at_origin() {
    // Frame at ρ: ∂_Re = i(E12+E21), ∂_Im = E12−E21; generators −A12 and B12;
    // ⟨ρ, [−A12, B12]⟩ = −Re Tr(diag(i,0)·diag(−2i, 2i)) = −2.
    let spec = OrbitSpec::projective(1).unwrap();
    let p = ChartPoint::standard(&spec, vec![0.0, 0.0]).unwrap();
    let frame = exact_tangent_frame(&spec, &p).unwrap();
    let w = kks_form(&spec, &p, &frame).unwrap();
    let expected = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
    assert!((w.0 - expected).norm() < 1e-12);
}

#[test]
fn kks_is_antisymmetric_and_closed() {
    let fd = FdConfig::default();
    for spec in specs() {
        let m = model(&spec);
        let field = m.field(ModelTensor::Omega);
        for p in samples(&spec, 3, 1) {
            let w = field.at(&p).unwrap();
            assert_eq!((&w + w.transpose()).norm(), 0.0);
            let jet = field.jet(&p, &fd).unwrap();
            let d = spec.dim();
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        let dw = jet.partials[a][(b, c)] + jet.partials[b][(c, a)] + jet.partials[c][(a, b)];
                        assert!(dw.abs() < 1e-6, "{dw}");
                    }
                }
            }
        }
    }
}

#[test]
fn bruhat_vanishes_at_base_fixed_point() {
    for spec in specs() {
        let r = RMatrixSpec::standard(spec.n, 0.5).unwrap();
        let pi = base_point_bruhat(&spec, &r).unwrap();
        assert!(pi.0.norm() < 1e-9, "{}", pi.0.norm());
    }
}

#[test]
fn bruhat_at_rho_is_twice_the_symplectic_inverse() {
    for spec in specs() {
        let m = model(&spec).evaluate(&vec![0.0; spec.dim()]).unwrap();
        assert!((&m.pi.0 - &m.omega_inv.0 * 2.0).norm() < 1e-10);
        assert!((m.n().0 - DMatrix::identity(spec.dim(), spec.dim()) * 2.0).norm() < 1e-10);
    }
}

#[test]
fn bruhat_is_independent_of_the_lift() {
    // Right-multiplying h by a unitary fixing the base point leaves π unchanged.
    let spec = OrbitSpec::grassmannian(2, 4).unwrap();
    let p = &samples(&spec, 1, 4)[0];
    let local = crate::geometry::LocalFrame::new(&spec, p).unwrap();
    let r = RMatrixSpec::standard(4, 0.5).unwrap();
    let h = base_unitary(&spec, &local.unitary);
    let theta = [0.3, -1.1];
    let mut k = CMatrix::identity(4, 4);
    // U(2) × U(2) element: a rotation in the first block, phases in the second.
    k[(0, 0)] = c(libm::cos(theta[0]), 0.0);
    k[(0, 1)] = c(-libm::sin(theta[0]), 0.0);
    k[(1, 0)] = c(libm::sin(theta[0]), 0.0);
    k[(1, 1)] = c(libm::cos(theta[0]), 0.0);
    k[(2, 2)] = c(libm::cos(theta[1]), libm::sin(theta[1]));
    k[(3, 3)] = I;
    let a = bruhat_with_unitary(&r, &local, &h).unwrap();
    let b = bruhat_with_unitary(&r, &local, &(&h * k)).unwrap();
    assert!((a.0 - b.0).norm() < 1e-10);
}

#[test]
fn bruhat_satisfies_jacobi_on_cp2() {
    let spec = OrbitSpec::projective(2).unwrap();
    let m = model(&spec);
    let pi = m.field(ModelTensor::Pi);
    for p in samples(&spec, 10, 2) {
        let s = schouten_bivector_bivector(&pi, &pi, &p, &FdConfig::default()).unwrap();
        assert!(s.max_abs() < 1e-5, "{}", s.max_abs());
    }
}

#[test]
fn pencil_examples() {
    let spec = OrbitSpec::projective(2).unwrap();
    let m = model(&spec).evaluate(&samples(&spec, 1, 3)[0].coords).unwrap();
    assert_eq!(pencil_bivector(&m.pi, &m.omega, 0.0).unwrap(), m.pi);
    let zero = Bivector(DMatrix::zeros(4, 4));
    let inv = pencil_bivector(&zero, &m.omega, 1.0).unwrap();
    assert!((inv.0 - &m.omega_inv.0).norm() < 1e-14);
    assert_eq!(nijenhuis_operator(&zero, &m.omega).0, DMatrix::zeros(4, 4));
    let id = nijenhuis_operator(&m.omega_inv, &m.omega);
    assert!((id.0 - DMatrix::identity(4, 4)).norm() < 1e-12);
    for p in samples(&spec, 20, 5) {
        let mp = model(&spec).evaluate(&p.coords).unwrap();
        assert!(mp.pi_t(-3.0).0.determinant().abs() > 1e-8);
    }
}

#[test]
fn moment_minor_examples() {
    let spec = OrbitSpec::projective(1).unwrap();
    let rho = make_rho(&spec);
    assert_eq!(moment_minor(&rho, 2), rho.matrix);
    assert_eq!(moment_minor(&rho, 1)[(0, 0)], I);
    let x = embed(&spec, &samples(&spec, 1, 6)[0]).unwrap();
    let minor = moment_minor(&x, 1);
    assert!(minor[(0, 0)].re.abs() < 1e-15);
}

#[test]
fn gt_examples() {
    let cp1 = OrbitSpec::projective(1).unwrap();
    let gt = gt_spectrum(&make_rho(&cp1), &cp1, 2.0, &GtPattern::counting_rule(&cp1)).unwrap();
    assert_eq!(gt.flat(), vec![2.0]);
    let cp2 = OrbitSpec::projective(2).unwrap();
    for p in samples(&cp2, 10, 7) {
        let gt = model(&cp2).gt_at(&p.coords).unwrap();
        assert_eq!(gt.count(), 2);
        assert!(gt.flat().iter().all(|v| *v > 0.0 && *v < 2.0));
    }
}

#[test]
fn gt_pattern_detection_matches_counting_rule() {
    for spec in specs() {
        let points: Vec<_> = samples(&spec, 12, 8).iter().map(|p| embed(&spec, p).unwrap()).collect();
        let detected = GtPattern::from_samples(&spec, 2.0, &points, CONSTANT_TOL).unwrap();
        assert_eq!(detected, GtPattern::counting_rule(&spec));
    }
}

#[test]
fn gt_count_guard() {
    let spec = OrbitSpec::projective(2).unwrap();
    let wrong = GtPattern {
        levels: (1..=3).map(|s| vec![SlotKind::Free; s]).collect(),
    };
    let x = make_rho(&spec);
    assert!(matches!(
        gt_spectrum(&x, &spec, 2.0, &wrong),
        Err(Error::CountMismatch { .. })
    ));
}

#[test]
fn nijenhuis_spectrum_matches_gt_values() {
    for spec in specs() {
        let m = model(&spec);
        for p in samples(&spec, 5, 9) {
            let n = m.evaluate(&p.coords).unwrap().n();
            let clusters = nijenhuis_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
            let gt = m.gt_at(&p.coords).unwrap();
            let report = match_spectra(&clusters, &gt.flat());
            assert!(report.within(1e-8), "{spec:?} {report:?}");
        }
    }
}

#[test]
fn calibration_recovers_constants() {
    for spec in [
        OrbitSpec::projective(2).unwrap(),
        OrbitSpec::grassmannian(2, 4).unwrap(),
    ] {
        let cal = calibrate(&spec, &ChartId::standard(spec.k), &samples(&spec, 12, 10)).unwrap();
        assert!((cal.kappa - 2.0).abs() < 1e-15);
        assert!((cal.c - 0.5).abs() < 1e-8, "{}", cal.c);
        assert!(cal.ratio_spread < 1e-6);
    }
    let scaled = OrbitSpec::new(3, 1, 2.0).unwrap();
    let cal = calibrate(&scaled, &ChartId::standard(1), &samples(&scaled, 12, 11)).unwrap();
    assert!((cal.kappa - 1.0).abs() < 1e-15);
    assert!(cal.max_distance < CALIBRATION_TOL);
    assert!(calibrate(&scaled, &ChartId::standard(1), &samples(&scaled, 3, 11)).is_err());
}

#[test]
fn match_spectra_examples() {
    let clusters = vec![
        SpectralCluster {
            value: 0.5,
            multiplicity: 2,
        },
        SpectralCluster {
            value: 1.5,
            multiplicity: 2,
        },
    ];
    let exact = match_spectra(&clusters, &[1.5, 0.5]);
    assert_eq!(exact.max_distance, 0.0);
    assert!(exact.within(0.0));
    let off = match_spectra(&clusters, &[0.5 + 1e-8, 1.5]);
    assert!((off.max_distance - 1e-8).abs() < 1e-15);
    let short = match_spectra(&clusters, &[0.5]);
    assert_eq!(short.unmatched_eigen, vec![1.5]);
}

use crate::pn::SpectralCluster;

fn cauchy_oracle(x: &EmbeddedPoint) -> f64 {
    // Interlacing of consecutive Hermitian minors of −i·x, checked directly.
    let n = x.matrix.nrows();
    let mut worst: f64 = 0.0;
    for s in 1..n {
        let h = |size: usize| -> Vec<f64> {
            hermitian_eigenvalues(&x.matrix.view((0, 0), (size, size)).map(|z| z * c(0.0, -1.0)))
        };
        let (a, b) = (h(s), h(s + 1));
        for i in 0..s {
            worst = worst.max(b[i] - a[i]).max(a[i] - b[i + 1]);
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn gt_interlacing_holds(coords in prop::collection::vec(-2.0f64..2.0, 8)) {
        let spec = OrbitSpec::grassmannian(2, 4).unwrap();
        let p = ChartPoint::standard(&spec, coords).unwrap();
        let x = embed(&spec, &p).unwrap();
        let gt = gt_spectrum(&x, &spec, 2.0, &GtPattern::counting_rule(&spec)).unwrap();
        prop_assert!(gt.interlacing_defect() < 1e-9);
        prop_assert!(cauchy_oracle(&x) < 1e-9);
        for level in &gt.levels {
            for v in level {
                prop_assert!(*v > -1e-9 && *v < 2.0 + 1e-9);
            }
        }
    }

    #[test]
    fn minor_eigenvalues_are_imaginary(coords in prop::collection::vec(-2.0f64..2.0, 6)) {
        let spec = OrbitSpec::projective(3).unwrap();
        let x = embed(&spec, &ChartPoint::standard(&spec, coords).unwrap()).unwrap();
        for s in 1..=4 {
            let m = moment_minor(&x, s);
            prop_assert!(skew_hermitian_defect(&m) < 1e-12);
        }
    }
}

#[test]
fn base_chart_is_centred_at_base_point() {
    let spec = OrbitSpec::grassmannian(2, 4).unwrap();
    let p = ChartPoint::origin(&spec, base_chart(&spec));
    let gt = gt_spectrum(&embed(&spec, &p).unwrap(), &spec, 2.0, &GtPattern::counting_rule(&spec)).unwrap();
    assert!(gt.flat().iter().all(|v| v.abs() < 1e-12));
}
