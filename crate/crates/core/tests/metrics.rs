mod common;

use std::sync::OnceLock;

use hyperlab_core::group::{enumerate_ball, Group};
use hyperlab_core::metrics::{
    build_green_metric, check_strong_hyperbolicity, GreenWalk, MetricStructure, MetricValue, ScanMode,
};
use hyperlab_core::Rational;
use proptest::prelude::*;

use common::{element, free2};

fn green() -> &'static MetricStructure {
    static M: OnceLock<MetricStructure> = OnceLock::new();
    M.get_or_init(|| build_green_metric(&free2(), &GreenWalk::simple(&free2(), 10, 1e-12)).unwrap())
}

#[test]
fn green_lengths_follow_the_tree() {
    let m = green();
    let d = 3f64.ln();
    for g in enumerate_ball(m.group(), 3).unwrap().elements() {
        let (v, err) = m.length_f64(g.word()).unwrap();
        assert!((v - d * g.len() as f64).abs() <= 1e-6, "{v} vs {}", g.len());
        assert!(err < 1e-6);
    }
}

#[test]
fn surface_word_metric_sampled_scan_reports_delta() {
    let g = Group::surface(2).unwrap();
    let m = MetricStructure::word_with_table(&g, 4).unwrap();
    let ball = enumerate_ball(&g, 2).unwrap();
    let r = check_strong_hyperbolicity(&m, &ball, ScanMode::Sampled { samples: 20_000, seed: 3 }).unwrap();
    assert_eq!(r.checked, 20_000);
    assert!(r.gromov_delta >= 0.0);
}

#[test]
fn tree_and_word_metrics_agree() {
    let g = free2();
    let t = MetricStructure::tree(&g).unwrap();
    let w = MetricStructure::word(&g).unwrap();
    let ball = enumerate_ball(&g, 3).unwrap();
    let els: Vec<_> = ball.elements().collect();
    for x in &els {
        for y in els.iter().step_by(7) {
            assert_eq!(t.distance(x, y).unwrap(), w.distance(x, y).unwrap());
            assert_eq!(t.gromov_product(x, y).unwrap(), w.gromov_product(x, y).unwrap());
        }
    }
    assert!(MetricStructure::tree(&Group::surface(2).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_metric_is_left_invariant(g in element(free2(), 5), x in element(free2(), 5), y in element(free2(), 5)) {
        let m = MetricStructure::word(&free2()).unwrap();
        let grp = m.group();
        let gx = grp.multiply(&g, &x).unwrap();
        let gy = grp.multiply(&g, &y).unwrap();
        prop_assert_eq!(m.distance(&gx, &gy).unwrap(), m.distance(&x, &y).unwrap());
    }

    #[test]
    fn green_metric_is_left_invariant(g in element(free2(), 2), x in element(free2(), 2), y in element(free2(), 2)) {
        let m = green();
        let grp = m.group();
        let gx = grp.multiply(&g, &x).unwrap();
        let gy = grp.multiply(&g, &y).unwrap();
        let (a, b) = (m.distance(&gx, &gy).unwrap(), m.distance(&x, &y).unwrap());
        prop_assert!(a.agrees_with(&b, 1e-9));
    }

    #[test]
    fn gromov_product_identity(o in element(free2(), 4), x in element(free2(), 4), y in element(free2(), 4)) {
        // ⟨x,y⟩_o = ⟨o⁻¹x, o⁻¹y⟩ and the tree product is the common prefix
        let m = MetricStructure::tree(&free2()).unwrap();
        let grp = m.group();
        let oi = grp.invert(&o);
        let moved = m.gromov_product(&grp.multiply(&oi, &x).unwrap(), &grp.multiply(&oi, &y).unwrap()).unwrap();
        prop_assert_eq!(m.gromov_product_at(&o, &x, &y).unwrap(), moved);
        let two = m.gromov_product(&x, &y).unwrap().scale(Rational::from_integer(2));
        let direct = m.length(&x).unwrap() + m.length(&y).unwrap() - m.distance(&x, &y).unwrap();
        prop_assert_eq!(two, direct);
    }

    #[test]
    fn scaling_multiplies_distances(eps in 0.1f64..3.0, x in element(free2(), 5), y in element(free2(), 5)) {
        let base = MetricStructure::word(&free2()).unwrap();
        let scaled = MetricStructure::word(&free2()).unwrap().with_scale(eps).unwrap();
        let d0 = base.distance(&x, &y).unwrap().to_f64();
        let d1 = scaled.distance(&x, &y).unwrap().to_f64();
        prop_assert!((d1 - eps * d0).abs() <= 1e-12 * d0.max(1.0));
    }

    #[test]
    fn triangle_inequality(x in element(free2(), 5), y in element(free2(), 5), z in element(free2(), 5)) {
        let m = MetricStructure::word(&free2()).unwrap();
        let d = |a, b| m.distance(a, b).unwrap().to_f64();
        prop_assert!(d(&x, &y) <= d(&x, &z) + d(&z, &y));
        prop_assert_eq!(d(&x, &y), d(&y, &x));
    }

    #[test]
    fn sampled_scans_respect_log_two(seed in any::<u64>(), eps in 0.2f64..2.0) {
        let m = MetricStructure::tree(&free2()).unwrap().with_scale(eps).unwrap();
        let ball = enumerate_ball(m.group(), 3).unwrap();
        let r = check_strong_hyperbolicity(&m, &ball, ScanMode::Sampled { samples: 2_000, seed }).unwrap();
        prop_assert_eq!(r.max_defect, 0.0);
        prop_assert!(r.gromov_delta <= std::f64::consts::LN_2);
    }

    #[test]
    fn exact_values_carry_no_error(x in element(free2(), 6)) {
        let m = MetricStructure::word(&free2()).unwrap();
        let v = m.length(&x).unwrap();
        prop_assert_eq!(v.error(), 0.0);
        prop_assert_eq!(v, MetricValue::from_int(x.len() as i64));
    }
}
