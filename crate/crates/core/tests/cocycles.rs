mod common;

use std::sync::OnceLock;

use hyperlab_core::cocycles::{
    affine_action_check, build_delta_with, busemann_coboundary, busemann_group, haagerup_coboundary,
    haagerup_value, lp_norm, properness_check, DeltaDomain, TestVector,
};
use hyperlab_core::group::{enumerate_ball, Group, GroupElement};
use hyperlab_core::metrics::{MetricStructure, MetricValue};
use hyperlab_core::Rational;
use proptest::prelude::*;

use common::{element, free2};

fn word() -> MetricStructure {
    MetricStructure::word(&free2()).unwrap()
}

fn delta_k1() -> &'static DeltaDomain {
    static D: OnceLock<DeltaDomain> = OnceLock::new();
    D.get_or_init(|| build_delta_with(&word(), 1.0, 0.0, 6).unwrap())
}

#[test]
fn surface_busemann_forms_agree() {
    let g = Group::surface(2).unwrap();
    let m = MetricStructure::word_with_table(&g, 5).unwrap();
    let ball = enumerate_ball(&g, 2).unwrap();
    for x in ball.elements() {
        for h in ball.elements().step_by(5) {
            busemann_group(&m, &h, &x).unwrap();
        }
    }
}

#[test]
fn affine_action_with_larger_k() {
    let m = word();
    let delta = build_delta_with(&m, 2.0, 0.5, 4).unwrap();
    let gs: Vec<GroupElement> = enumerate_ball(m.group(), 1).unwrap().elements().collect();
    let phi = TestVector::random_within(&delta, 6, 2, 11);
    assert_eq!(phi.entries.len(), 6);
    let r = affine_action_check(&delta, &gs, &phi, 2.0).unwrap();
    assert!(r.holds());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn busemann_cocycle_identity(g in element(free2(), 4), h in element(free2(), 4), x in element(free2(), 5)) {
        let m = word();
        let grp = m.group();
        let gh = grp.multiply(&g, &h).unwrap();
        let gix = grp.multiply(&grp.invert(&g), &x).unwrap();
        let lhs = busemann_group(&m, &gh, &x).unwrap();
        let rhs = busemann_group(&m, &g, &x).unwrap() + busemann_group(&m, &h, &gix).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn busemann_is_one_lipschitz(g in element(free2(), 5), x in element(free2(), 5)) {
        let m = word();
        let b = busemann_coboundary(&m, &g, &x).unwrap().to_f64();
        prop_assert!(b.abs() <= g.len() as f64);
    }

    #[test]
    fn haagerup_forms_and_antisymmetry(g in element(free2(), 4), x in element(free2(), 5), y in element(free2(), 5)) {
        let m = word();
        let v = haagerup_value(&m, &g, &x, &y).unwrap();
        prop_assert_eq!(v.clone(), haagerup_coboundary(&m, &g, &x, &y).unwrap());
        prop_assert_eq!(-v, haagerup_value(&m, &g, &y, &x).unwrap());
    }

    #[test]
    fn haagerup_pointwise_bound(g in element(free2(), 4), x in element(free2(), 5), y in element(free2(), 5)) {
        // |c_g(x,y)| ≤ d(x,y) and ≤ |g|
        let m = word();
        let c = haagerup_value(&m, &g, &x, &y).unwrap().to_f64().abs();
        prop_assert!(c <= m.distance(&x, &y).unwrap().to_f64());
        prop_assert!(c <= g.len() as f64);
    }

    #[test]
    fn norm_law(g in element(free2(), 5), p in 1u8..=4) {
        let r = lp_norm(delta_k1(), &g, p as f64).unwrap();
        prop_assert_eq!(r.exact, Some(Rational::from_integer(2 * g.len() as i128)));
        prop_assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn properness_certificates_hold(g in element(free2(), 6)) {
        prop_assume!(!g.is_empty());
        let c = properness_check(delta_k1(), &g, 1.0).unwrap();
        prop_assert!(c.holds(), "{:?}", c.failures);
        prop_assert!(c.actual.norm_p >= c.lower_bound);
        prop_assert!(c.n + 1 >= g.len());
    }

    #[test]
    fn delta_pairs_are_swap_closed(i in 0usize..5000) {
        let d = delta_k1();
        let pairs = d.index_pairs();
        let (x, y) = pairs[i % pairs.len()];
        prop_assert!(pairs.contains(&(y, x)));
        let (gx, gy) = (d.ball().element(x as usize), d.ball().element(y as usize));
        let dist = d.metric().distance(&gx, &gy).unwrap();
        prop_assert_eq!(dist, MetricValue::from_int(1));
    }

    #[test]
    fn affine_action_law(seed in any::<u64>()) {
        let m = word();
        let delta = build_delta_with(&m, 1.0, 0.0, 3).unwrap();
        let gs: Vec<GroupElement> = enumerate_ball(m.group(), 1).unwrap().elements().collect();
        let phi = TestVector::random_within(&delta, 5, 2, seed);
        let r = affine_action_check(&delta, &gs, &phi, 2.0).unwrap();
        prop_assert!(r.holds());
    }
}
