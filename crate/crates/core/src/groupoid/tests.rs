use super::*;
use crate::geometry::{ChartId, OrbitSpec};
use crate::models::GtPattern;
use alloc::vec;
use proptest::prelude::*;

const LN2: f64 = core::f64::consts::LN_2;

fn el(lambda: &[f64], h: &[f64], t: f64) -> GroupoidElement {
    GroupoidElement {
        lambda: lambda.to_vec(),
        h: h.to_vec(),
        t,
    }
}

fn delta(d: usize) -> Groupoid {
    Groupoid::over_polytope(GtPolytope::simplex(d).unwrap())
}

#[test]
fn source_and_target_examples() {
    let g = delta(1);
    assert_eq!(g.source(&el(&[0.5], &[0.1], 1.0)).unwrap(), vec![0.5]);
    assert_eq!(g.target(&el(&[0.5], &[0.0], 1.0)).unwrap(), vec![0.5]);
    let t = g.target(&el(&[0.0], &[LN2], 1.0)).unwrap();
    assert!((t[0] - 1.0).abs() < 1e-15);
    let r = g.target(&el(&[1.0], &[libm::log(3.0)], -2.0));
    assert_eq!(r, Err(Error::TargetOutsidePolytope));
}

#[test]
fn compose_examples() {
    let g = delta(1);
    let a = el(&[0.0], &[LN2], 1.0);
    let id = GroupoidElement::identity(g.target(&a).unwrap(), 1.0);
    assert_eq!(g.compose(&a, &id).unwrap(), a);
    let b = el(&[1.0], &[libm::log(3.0)], 1.0);
    assert_eq!(g.compose(&a, &b), Err(Error::TargetOutsidePolytope));
    let over_r = Groupoid::action(1).compose(&a, &b).unwrap();
    assert!((over_r.h[0] - libm::log(6.0)).abs() < 1e-15);
    assert!((over_r.raw_target()[0] - 5.0).abs() < 1e-14);
    let far = el(&[0.3], &[0.0], 1.0);
    assert!(matches!(g.compose(&a, &far), Err(Error::NotComposable { .. })));
}

#[test]
fn inverse_examples() {
    let g = delta(1);
    let a = el(&[0.0], &[LN2], 1.0);
    let inv = g.inverse(&a).unwrap();
    assert!((inv.lambda[0] - 1.0).abs() < 1e-15 && inv.h[0] == -LN2);
    let back = g.inverse(&inv).unwrap();
    assert!((back.lambda[0] - a.lambda[0]).abs() < 1e-15 && back.h == a.h);
    let still = el(&[0.7], &[0.0], 1.0);
    assert_eq!(g.inverse(&still).unwrap(), still);
    let loop_ = g.compose(&a, &inv).unwrap();
    assert_eq!(loop_, GroupoidElement::identity(vec![0.0], 1.0));
}

#[test]
fn action_examples() {
    assert_eq!(act(&[0.0, 0.0], &[0.3, 1.2], 0.5), vec![0.3, 1.2]);
    for h in [-3.0, 0.0, 2.5] {
        assert_eq!(act(&[h], &[1.0], -1.0), vec![1.0]);
    }
}

#[test]
fn membership_examples() {
    assert!(membership_cpn(
        &el(&[1.0, 1.0, 1.5], &[3.0, 3.0, 0.2], -1.0),
        MEMBERSHIP_TOL
    ));
    assert!(!membership_cpn(
        &el(&[1.0, 1.0, 1.5], &[3.0, 2.0, 0.2], -1.0),
        MEMBERSHIP_TOL
    ));
    assert!(!membership_cpn(&el(&[0.0, 0.5], &[0.1, 0.3], 0.0), MEMBERSHIP_TOL));
    assert!(membership_cpn(&el(&[0.0, 0.5], &[0.0, 0.3], 0.0), MEMBERSHIP_TOL));
    assert!(membership_cpn(&el(&[0.2, 0.5], &[0.1, 0.3], 1.0), MEMBERSHIP_TOL));
    assert_eq!(MembershipCase::of(-2.0, 1e-9), MembershipCase::Boundary);
    assert_eq!(MembershipCase::of(-0.5, 1e-9), MembershipCase::Interior);
    assert_eq!(MembershipCase::of(-3.0, 1e-9), MembershipCase::Pair);
}

#[test]
fn closure_examples() {
    // Interior t = −1 with a collision block at 1.
    let g1 = el(&[0.2, 1.0, 1.0], &[-0.4, 0.7, 0.7], -1.0);
    let mid = delta(3).target(&g1).unwrap();
    let g2 = el(&mid, &[-0.1, -2.0, -2.0], -1.0);
    assert!(closure_check(&g1, &g2, MEMBERSHIP_TOL).unwrap());
    let inv = delta(3).inverse(&g1).unwrap();
    assert!(closure_check(&g1, &inv, MEMBERSHIP_TOL).unwrap());
    // Boundary t = 0 with pinned zero slot.
    let b1 = el(&[0.0, 0.5], &[0.0, 0.3], 0.0);
    let b2 = el(&delta(2).target(&b1).unwrap(), &[0.0, -0.6], 0.0);
    assert!(closure_check(&b1, &b2, MEMBERSHIP_TOL).unwrap());
}

#[test]
fn polytope_for_grassmannian() {
    let p = GtPolytope::new(2, 4).unwrap();
    assert_eq!(p.dim(), 4);
    // Levels: (a), (b0 b1), (0 c 2)... flattened as a, b0, b1, c.
    assert!(p.contains(&[1.0, 0.5, 1.5, 1.0], 1e-12));
    assert!(!p.contains(&[1.0, 1.2, 1.5, 1.0], 1e-12));
    assert!(!p.contains(&[1.0, 0.5, 1.5], 1e-12));
    let levels = p.levels(&[1.0, 0.5, 1.5, 1.0]).unwrap();
    assert_eq!(levels[3], vec![0.0, 0.0, 2.0, 2.0]);
}

#[test]
fn cocycle_from_values_examples() {
    assert!((cocycle_from_values(0.0, 1.0, 1.0).unwrap() - LN2).abs() < 1e-15);
    assert_eq!(cocycle_from_values(0.4, 0.4, 1.0).unwrap(), 0.0);
    assert!(matches!(
        cocycle_from_values(1.0, 0.5, -1.0),
        Err(Error::SingularLog { .. })
    ));
    assert!(matches!(
        cocycle_from_values(0.5, 1.5, -1.0),
        Err(Error::SingularLog { .. })
    ));
}

fn cp2_model() -> HermitianModel {
    let spec = OrbitSpec::projective(2).unwrap();
    let pattern = GtPattern::counting_rule(&spec);
    HermitianModel::new(spec, 0.5, 2.0, ChartId::standard(1), pattern).unwrap()
}

#[test]
fn pair_map_on_cp2() {
    let m = cp2_model();
    let (x, y, z) = ([0.3, -0.2, 0.5, 0.1], [0.9, 0.4, -0.3, 0.2], [-0.5, 0.6, 0.2, -0.8]);
    let id = pair_to_element(&m, &x, &x, 1.0).unwrap();
    assert_eq!(id.h, vec![0.0, 0.0]);
    let xy = pair_to_element(&m, &x, &y, 1.0).unwrap();
    let yz = pair_to_element(&m, &y, &z, 1.0).unwrap();
    let xz = pair_to_element(&m, &x, &z, 1.0).unwrap();
    let g = delta(2);
    let target = g.target(&xy).unwrap();
    let gy = m.gt_at(&y).unwrap().flat();
    for (a, b) in target.iter().zip(&gy) {
        assert!((a - b).abs() < 1e-12);
    }
    let comp = g.compose(&xy, &yz).unwrap();
    for (a, b) in comp.h.iter().zip(&xz.h) {
        assert!((a - b).abs() < 1e-12);
    }
    let h0 = eigenvalue_cocycle(&m, &x, &y, 0, 1.0).unwrap();
    assert_eq!(h0, xy.h[0]);
}

fn simplex_point(raw: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = raw.iter().map(|r| 2.0 * r).collect();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #[test]
    fn action_law(h1 in prop::collection::vec(-2.0f64..2.0, 3),
                  h2 in prop::collection::vec(-2.0f64..2.0, 3),
                  l in prop::collection::vec(-3.0f64..3.0, 3),
                  t in -3.0f64..3.0) {
        let sum: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a + b).collect();
        let lhs = act(&sum, &l, t);
        let rhs = act(&h1, &act(&h2, &l, t), t);
        for (a, b) in lhs.iter().zip(&rhs) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn associativity_in_pair_case(raw in prop::collection::vec(0.0f64..1.0, 12), t in 0.1f64..3.0) {
        let pts: Vec<Vec<f64>> = raw.chunks(3).map(simplex_point).collect();
        let g = delta(3);
        let arrow = |a: &[f64], b: &[f64]| el(a, &a.iter().zip(b).map(|(x, y)| cocycle_from_values(*x, *y, t).unwrap()).collect::<Vec<_>>(), t);
        let (f1, f2, f3) = (arrow(&pts[0], &pts[1]), arrow(&pts[1], &pts[2]), arrow(&pts[2], &pts[3]));
        let left = g.compose(&g.compose(&f1, &f2).unwrap(), &f3).unwrap();
        let right = g.compose(&f1, &g.compose(&f2, &f3).unwrap()).unwrap();
        for (a, b) in left.h.iter().zip(&right.h) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let inv = g.inverse(&f1).unwrap();
        let back = g.compose(&f1, &inv).unwrap();
        prop_assert!(back.h.iter().all(|v| v.abs() < 1e-12));
    }
}
