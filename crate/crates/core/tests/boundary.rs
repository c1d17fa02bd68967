mod common;

use hyperlab_core::boundary::{BoundaryPoint, Extended, FreeBoundary};
use hyperlab_core::group::{Group, GroupElement, Letter};
use proptest::prelude::*;

use common::{element, free2};

fn bd() -> FreeBoundary {
    FreeBoundary::new(&free2()).unwrap()
}

fn point() -> impl Strategy<Value = BoundaryPoint> {
    any::<u64>().prop_map(|seed| bd().random_points(1, 4, 3, seed).remove(0))
}

#[test]
fn non_free_groups_have_no_exact_boundary() {
    assert!(FreeBoundary::new(&Group::surface(2).unwrap()).is_err());
}

#[test]
fn cylinder_measures_sum_to_one() {
    let b = bd();
    for depth in 1..=4 {
        let total: hyperlab_core::Rational = b.cylinders(depth).iter().map(|c| b.cylinder_measure(c)).sum();
        assert_eq!(total, 1.into());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn action_is_a_group_action(g in element(free2(), 4), h in element(free2(), 4), xi in point()) {
        let b = bd();
        let grp = free2();
        let gh = grp.multiply(&g, &h).unwrap();
        prop_assert_eq!(b.act(&gh, &xi).unwrap(), b.act(&g, &b.act(&h, &xi).unwrap()).unwrap());
        prop_assert_eq!(b.act(&grp.identity(), &xi).unwrap(), xi);
    }

    #[test]
    fn busemann_is_locally_constant(g in element(free2(), 4), xi in point(), choices in prop::collection::vec(0usize..3, 1..6)) {
        // any point sharing the first |g| + 1 letters of ξ has the same b(g)
        let b = bd();
        let grp = free2();
        let a = grp.alphabet();
        let mut u = xi.prefix(g.len() + 1);
        for c in &choices {
            let last = *u.last().unwrap();
            let next: Vec<Letter> = a.letters().filter(|&l| l != a.inverse(last)).collect();
            u.push(next[*c]);
        }
        let last = *u.last().unwrap();
        let period = a.letters().find(|&l| l != a.inverse(last)).unwrap();
        let eta = b.point(&u, &[period]).unwrap();
        prop_assert_eq!(b.busemann(&g, &eta).unwrap(), b.busemann(&g, &xi).unwrap());
    }

    #[test]
    fn busemann_cocycle_on_boundary(g in element(free2(), 4), h in element(free2(), 4), xi in point()) {
        let b = bd();
        let grp = free2();
        let gh = grp.multiply(&g, &h).unwrap();
        let moved = b.act(&grp.invert(&g), &xi).unwrap();
        prop_assert_eq!(b.busemann(&gh, &xi).unwrap(), b.busemann(&g, &xi).unwrap() + b.busemann(&h, &moved).unwrap());
    }

    #[test]
    fn conformal_identity(g in element(free2(), 4), xi in point(), eta in point()) {
        prop_assume!(xi != eta);
        let id = bd().conformal_identity_check(&g, &xi, &eta).unwrap();
        prop_assert!(id.holds(), "{:?}", id);
    }

    #[test]
    fn visual_metric_is_an_ultrametric(a in point(), b2 in point(), c in point()) {
        let b = bd();
        let d = |x, y| b.visual_distance(x, y);
        prop_assert!(d(&a, &b2) <= d(&a, &c).max(d(&c, &b2)) + 1e-15);
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(b.gromov(&a, &a), Extended::Infinite);
    }

    #[test]
    fn conformality_holds(g in element(free2(), 3)) {
        prop_assume!(!g.is_empty());
        let r = bd().conformality_check(&g, g.len() + 1).unwrap();
        prop_assert_eq!(r.failures(), 0);
    }

    #[test]
    fn fixed_points_are_fixed(g in element(free2(), 5)) {
        prop_assume!(!g.is_empty());
        let b = bd();
        let (plus, minus, len) = b.fixed_points(&g).unwrap();
        prop_assert_eq!(b.act(&g, &plus).unwrap(), plus.clone());
        prop_assert_eq!(b.act(&g, &minus).unwrap(), minus.clone());
        prop_assert_eq!(b.busemann(&g, &plus).unwrap(), len as i64);
        let g_inv: GroupElement = free2().invert(&g);
        prop_assert_eq!(b.fixed_points(&g_inv).unwrap().0, minus);
    }

    #[test]
    fn serialization_round_trip(xi in point()) {
        let b = bd();
        prop_assert_eq!(b.parse(&b.format(&xi)).unwrap(), xi);
    }
}
