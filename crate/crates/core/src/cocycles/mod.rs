//! The Busemann cocycle `b(g)(x) = |x| − |g⁻¹x|` and the Haagerup cocycle
//! `c_g(x, y) = ⟨g,x⟩ − ⟨g,y⟩` on the coarse edge set
//! `Δ = {(x, y) : K − C ≤ |x,y| ≤ K + C}`, with ℓ^p norms, properness
//! certificates and checks of the affine action `g.φ + c_g`.

mod action;
mod norms;

use std::sync::Arc;

pub use action::{
    affine_action_check, cocycle_identity_scan, AffineReport, IdentityReport, TestVector,
};
pub use norms::{
    critical_exponent_scan, lp_norm, properness_check, CriticalRow, LpNormReport,
    PropernessCertificate,
};

use crate::error::{input, Error, Result};
use crate::group::{enumerate_ball, Ball, BallOptions, GroupElement, Letter};
use crate::metrics::{MetricStructure, MetricValue, NUMERIC_FLOOR};
use crate::Rational;

/// `b(g)(x)`, computed as `2⟨g,x⟩ − |g|` and cross-checked against `|x| − |g⁻¹x|`.
pub fn busemann_group(m: &MetricStructure, g: &GroupElement, x: &GroupElement) -> Result<MetricValue> {
    let via_product = m.gromov_product(g, x)?.scale(Rational::from_integer(2)) - m.length(g)?;
    let via_coboundary = busemann_coboundary(m, g, x)?;
    if !via_product.agrees_with(&via_coboundary, NUMERIC_FLOOR) {
        return Err(Error::InvariantViolation(format!(
            "Busemann forms disagree at g={}, x={}: {via_product} vs {via_coboundary}",
            m.group().format(g),
            m.group().format(x)
        )));
    }
    Ok(via_product)
}

/// `b(g)(x) = |x| − |g⁻¹x|`.
pub fn busemann_coboundary(m: &MetricStructure, g: &GroupElement, x: &GroupElement) -> Result<MetricValue> {
    let group = m.group();
    group.check_member(g)?;
    group.check_member(x)?;
    let shifted = m.quotient_word(g.word(), x.word());
    Ok(m.length_value(x.word())? - m.length_value(&shifted)?)
}

/// `c_g(x, y) = ⟨g,x⟩ − ⟨g,y⟩`.
pub fn haagerup_value(
    m: &MetricStructure,
    g: &GroupElement,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<MetricValue> {
    Ok(m.gromov_product(g, x)? - m.gromov_product(g, y)?)
}

/// `c_g(x, y) = F(x, y) − F(g⁻¹x, g⁻¹y)` with `F(x, y) = ½(|x| − |y|)`.
pub fn haagerup_coboundary(
    m: &MetricStructure,
    g: &GroupElement,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<MetricValue> {
    let group = m.group();
    let gi = group.invert(g);
    let f = |a: &GroupElement, b: &GroupElement| -> Result<MetricValue> {
        Ok((m.length(a)? - m.length(b)?).scale(Rational::new(1, 2)))
    };
    Ok(f(x, y)? - f(&group.multiply(&gi, x)?, &group.multiply(&gi, y)?)?)
}

/// Ordered pairs of a ball window at distance within `C` of `K`.
#[derive(Clone, Debug)]
pub struct DeltaDomain {
    metric: MetricStructure,
    ball: Arc<Ball>,
    k: f64,
    c: f64,
    /// Index pairs into the window ball, sorted lexicographically.
    pairs: Vec<(u32, u32)>,
    pub warning: Option<String>,
}

/// Δ restricted to the radius-`radius` ball, with `C` taken from the metric.
pub fn build_delta(m: &MetricStructure, k: f64, radius: usize) -> Result<DeltaDomain> {
    build_delta_with(m, k, m.rough_constant(), radius)
}

/// Δ with an explicit rough-geodesic constant `C`.
pub fn build_delta_with(m: &MetricStructure, k: f64, c: f64, radius: usize) -> Result<DeltaDomain> {
    let ball = Arc::new(Ball::build(m.group(), radius, BallOptions::default())?);
    DeltaDomain::on_ball(m, k, c, ball)
}

impl DeltaDomain {
    pub fn on_ball(m: &MetricStructure, k: f64, c: f64, ball: Arc<Ball>) -> Result<DeltaDomain> {
        if !(k.is_finite() && k > 0.0) {
            return input(format!("K must be positive, got {k}"));
        }
        if !(c.is_finite() && c >= 0.0) {
            return input(format!("C must be nonnegative, got {c}"));
        }
        if k <= 2.0 * c {
            return input(format!("K = {k} must exceed 2C = {}", 2.0 * c));
        }
        if ball.group().id() != m.group().id() {
            return input("ball and metric belong to different groups");
        }
        let (lo, hi) = (k - c, k + c);
        let within = |d: f64| d >= lo - NUMERIC_FLOOR * lo.max(1.0) && d <= hi + NUMERIC_FLOOR * hi.max(1.0);
        let mut pairs = Vec::new();
        if m.is_integral() {
            // every y with |x,y| ≤ K+C is x·s for s in the ball of that radius
            let reach = (hi / m.scale() + NUMERIC_FLOOR).floor() as usize;
            let offsets_ball = enumerate_ball(m.group(), reach.min(ball.radius() * 2))?;
            let offsets: Vec<Vec<Letter>> = (0..offsets_ball.len())
                .filter(|&i| within(m.scale() * offsets_ball.depth(i) as f64))
                .map(|i| offsets_ball.word(i))
                .collect();
            for x in 0..ball.len() {
                let mut row: Vec<u32> = Vec::new();
                for s in &offsets {
                    let y = ball.walk(x, s).or_else(|| {
                        let mut w = ball.word(x);
                        w.extend_from_slice(s);
                        ball.locate(&w)
                    });
                    if let Some(y) = y {
                        row.push(y as u32);
                    }
                }
                row.sort_unstable();
                row.dedup();
                pairs.extend(row.into_iter().map(|y| (x as u32, y)));
            }
        } else {
            let dm = m.distance_matrix(&ball)?;
            for x in 0..ball.len() {
                for y in 0..ball.len() {
                    if x != y && within(dm.get(x, y)) {
                        pairs.push((x as u32, y as u32));
                    }
                }
            }
        }
        let warning = pairs.is_empty().then(|| {
            format!(
                "Δ is empty inside the radius-{} ball for K = {k}, C = {c}",
                ball.radius()
            )
        });
        Ok(DeltaDomain {
            metric: m.clone(),
            ball,
            k,
            c,
            pairs,
            warning,
        })
    }

    pub fn metric(&self) -> &MetricStructure {
        &self.metric
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn pairs(&self) -> impl Iterator<Item = (GroupElement, GroupElement)> + '_ {
        self.pairs
            .iter()
            .map(|&(x, y)| (self.ball.element(x as usize), self.ball.element(y as usize)))
    }

    /// Whether a distance lies in `[K − C, K + C]`.
    pub fn admits(&self, d: f64) -> bool {
        let (lo, hi) = (self.k - self.c, self.k + self.c);
        d >= lo - NUMERIC_FLOOR * lo.max(1.0) && d <= hi + NUMERIC_FLOOR * hi.max(1.0)
    }

    /// `b(g)(x)` for every element of the window, unscaled.
    pub(crate) fn busemann_field(&self, g: &GroupElement) -> Result<Vec<f64>> {
        let m = &self.metric;
        m.group().check_member(g)?;
        let gi = m.group().alphabet().invert_word(g.word());
        (0..self.ball.len())
            .map(|x| {
                let xw = self.ball.word(x);
                let mut shifted = gi.clone();
                shifted.extend_from_slice(&xw);
                Ok(m.raw_length(&xw)? - m.raw_length(&shifted)?)
            })
            .collect()
    }

    /// Whether values are exact half-integers (unscaled word or tree metric).
    pub(crate) fn exact(&self) -> bool {
        self.metric.is_integral()
    }
}

/// Exact conversion of a float known to be a multiple of 1/2.
pub(crate) fn half_integer(v: f64) -> Rational {
    Rational::new((2.0 * v).round() as i128, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    fn f2() -> (Arc<crate::group::Group>, MetricStructure) {
        let g = Group::free(2).unwrap();
        let m = MetricStructure::word(&g).unwrap();
        (g, m)
    }

    #[test]
    fn busemann_examples() {
        let (g, m) = f2();
        let p = |s| g.parse(s).unwrap();
        let one = g.identity();
        let x = p("ab'a");
        assert_eq!(busemann_group(&m, &x, &one).unwrap(), MetricValue::from_int(-3));
        assert_eq!(busemann_group(&m, &x, &x).unwrap(), MetricValue::from_int(3));
        assert_eq!(busemann_group(&m, &p("a"), &p("ab")).unwrap(), MetricValue::from_int(1));
    }

    #[test]
    fn haagerup_examples() {
        let (g, m) = f2();
        let p = |s| g.parse(s).unwrap();
        let one = g.identity();
        let a = p("a");
        assert_eq!(haagerup_value(&m, &a, &a, &one).unwrap(), MetricValue::from_int(1));
        assert_eq!(haagerup_value(&m, &a, &one, &a).unwrap(), MetricValue::from_int(-1));
        assert_eq!(haagerup_value(&m, &a, &p("b"), &p("ba")).unwrap(), MetricValue::from_int(0));
        assert_eq!(haagerup_value(&m, &one, &p("b"), &p("ba")).unwrap(), MetricValue::from_int(0));
        for (x, y) in [("a", "1"), ("b", "ba"), ("ab", "a"), ("a'", "1")] {
            let (x, y) = (p(x), p(y));
            assert_eq!(
                haagerup_value(&m, &p("ab"), &x, &y).unwrap(),
                haagerup_coboundary(&m, &p("ab"), &x, &y).unwrap()
            );
        }
    }

    #[test]
    fn delta_on_free_group_is_the_edge_set() {
        let (_, m) = f2();
        let d = build_delta(&m, 1.0, 2).unwrap();
        assert_eq!(d.len(), 32);
        for (x, y) in d.pairs() {
            assert_eq!(m.distance(&x, &y).unwrap(), MetricValue::from_int(1));
        }
        let empty = build_delta(&m, 5.0, 2).unwrap();
        assert!(empty.is_empty());
        assert!(empty.warning.is_some());
    }

    #[test]
    fn delta_requires_k_above_twice_c() {
        let (_, m) = f2();
        assert!(matches!(build_delta_with(&m, 1.0, 0.5, 2), Err(Error::Input(_))));
        assert!(build_delta_with(&m, 1.1, 0.5, 2).is_ok());
    }

    #[test]
    fn surface_delta_matches_brute_scan() {
        let s = Group::surface(2).unwrap();
        let m = MetricStructure::word_with_table(&s, 6).unwrap();
        let d = build_delta(&m, 3.0, 2).unwrap();
        let ball = d.ball().clone();
        let mut brute = Vec::new();
        for x in 0..ball.len() {
            for y in 0..ball.len() {
                let dist = m.distance(&ball.element(x), &ball.element(y)).unwrap();
                if dist == MetricValue::from_int(3) {
                    brute.push((x as u32, y as u32));
                }
            }
        }
        assert_eq!(d.index_pairs(), &brute[..]);
    }
}
