mod common;

use hyperlab_core::group::{enumerate_ball, free_reduce, Group};
use proptest::prelude::*;

use common::{element, free2};

#[test]
fn free_sphere_sizes() {
    assert!(Group::free(1).is_err());
    for k in 2..=3usize {
        let g = Group::free(k).unwrap();
        let ball = enumerate_ball(&g, 4).unwrap();
        let expected: Vec<usize> = (0..=4)
            .map(|n| if n == 0 { 1 } else { 2 * k * (2 * k - 1).pow(n as u32 - 1) })
            .collect();
        assert_eq!(ball.sphere_sizes(), expected);
    }
}

#[test]
fn surface_ball_words_are_distinct_and_geodesic() {
    let g = Group::surface(2).unwrap();
    let ball = enumerate_ball(&g, 3).unwrap();
    assert_eq!(ball.sphere_sizes()[..3], [1, 8, 56]);
    for i in 0..ball.len() {
        assert_eq!(ball.word(i).len(), ball.depth(i));
        assert_eq!(ball.locate(&ball.word(i)), Some(i));
    }
}

proptest! {
    #[test]
    fn free_reduction_is_idempotent(x in element(free2(), 10)) {
        let g = free2();
        prop_assert_eq!(free_reduce(g.alphabet(), x.word()), x.word().to_vec());
    }

    #[test]
    fn multiplication_is_associative(x in element(free2(), 6), y in element(free2(), 6), z in element(free2(), 6)) {
        let g = free2();
        let l = g.multiply(&g.multiply(&x, &y).unwrap(), &z).unwrap();
        let r = g.multiply(&x, &g.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn inverses_cancel_in_surface_group(x in element(Group::surface(2).unwrap(), 8)) {
        let g = Group::surface(2).unwrap();
        let e = g.multiply(&x, &g.invert(&x)).unwrap();
        prop_assert!(g.is_trivial(&e));
        prop_assert!(g.equal(&g.invert(&g.invert(&x)), &x));
    }

    #[test]
    fn dehn_forms_never_lengthen(x in element(Group::surface(2).unwrap(), 10)) {
        let g = Group::surface(2).unwrap();
        let again = g.normalize(x.word()).unwrap();
        prop_assert!(again.len() <= x.len());
        prop_assert!(g.equal(&again, &x));
    }

    #[test]
    fn modular_group_torsion(x in element(Group::modular().unwrap(), 8)) {
        let g = Group::modular().unwrap();
        let s = g.parse("s").unwrap();
        let t = g.parse("t").unwrap();
        prop_assert!(g.is_trivial(&g.power(&s, 2)));
        prop_assert!(g.is_trivial(&g.power(&t, 3)));
        let conj = g.multiply(&g.multiply(&x, &s).unwrap(), &g.invert(&x)).unwrap();
        prop_assert!(g.is_trivial(&g.power(&conj, 2)));
    }

    #[test]
    fn format_parse_round_trip(x in element(free2(), 10)) {
        let g = free2();
        prop_assert_eq!(g.parse(&g.format(&x)).unwrap(), x);
    }
}
