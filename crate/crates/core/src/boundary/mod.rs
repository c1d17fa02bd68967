//! Exact boundary of a free group: eventually periodic reduced words `u·c·c·c⋯`,
//! the visual metric, the boundary Busemann cocycle, the uniform cylinder measure
//! and its conformality.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input, Error, Result};
use crate::group::{free_reduce, is_cyclically_reduced, Group, GroupElement, GroupKind, Letter};
use crate::Rational;

/// An eventually periodic boundary point `u·c^∞` in canonical form: `u` is the
/// shortest possible preperiod and `c` is primitive. With `u` minimal the rotation
/// of `c` is forced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPoint {
    u: Vec<Letter>,
    c: Vec<Letter>,
}

impl BoundaryPoint {
    pub fn preperiod(&self) -> &[Letter] {
        &self.u
    }

    pub fn period(&self) -> &[Letter] {
        &self.c
    }

    /// Letter at position `i` of the infinite word.
    pub fn letter(&self, i: usize) -> Letter {
        if i < self.u.len() {
            self.u[i]
        } else {
            self.c[(i - self.u.len()) % self.c.len()]
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Vec<Letter> {
        (0..n).map(|i| self.letter(i)).collect()
    }
}

/// `⟨·,·⟩` on the bordification; equal boundary points have product `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Extended {
    Finite(u64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<u64> {
        match self {
            Extended::Finite(n) => Some(n),
            Extended::Infinite => None,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(n) => write!(f, "{n}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// A cylinder `C_w`: boundary points whose word begins with `w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cylinder {
    w: Vec<Letter>,
}

impl Cylinder {
    pub fn prefix(&self) -> &[Letter] {
        &self.w
    }

    pub fn depth(&self) -> usize {
        self.w.len()
    }

    pub fn contains(&self, xi: &BoundaryPoint) -> bool {
        self.w.iter().enumerate().all(|(i, &l)| xi.letter(i) == l)
    }
}

/// The uniform measure `μ(C_w) = 1/(2k(2k−1)^{|w|−1})`, of dimension `D = log(2k−1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryMeasure {
    pub rank: usize,
}

impl BoundaryMeasure {
    pub fn dimension(&self) -> f64 {
        ((2 * self.rank - 1) as f64).ln()
    }

    /// `2k − 1`, the base with `e^{D·m} = (2k−1)^m`.
    pub fn base(&self) -> i128 {
        (2 * self.rank - 1) as i128
    }
}

/// One row of a conformality scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalityRow {
    pub cylinder: Cylinder,
    /// `μ(g⁻¹C_w) / μ(C_w)`.
    pub ratio: Rational,
    /// `b(g)(ξ)` for `ξ ∈ C_w`.
    pub busemann: i64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConformalityReport {
    pub g: GroupElement,
    pub depth: usize,
    pub rows: Vec<ConformalityRow>,
}

impl ConformalityReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds).count()
    }
}

/// Both sides of `2⟨gξ,gη⟩ = −b(g⁻¹)(ξ) − b(g⁻¹)(η) + 2⟨ξ,η⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConformalIdentity {
    pub lhs: i64,
    pub rhs: i64,
}

impl ConformalIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The boundary of a free group.
#[derive(Clone, Debug)]
pub struct FreeBoundary {
    group: Arc<Group>,
    rank: usize,
}

impl FreeBoundary {
    pub fn new(group: &Arc<Group>) -> Result<FreeBoundary> {
        if group.kind() != GroupKind::Free {
            return Err(Error::Unsupported(format!(
                "exact boundary model needs a free group, got {}",
                group.name()
            )));
        }
        Ok(FreeBoundary {
            group: group.clone(),
            rank: group.free_rank().expect("free groups have a rank"),
        })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn measure(&self) -> BoundaryMeasure {
        BoundaryMeasure { rank: self.rank }
    }

    /// Canonical form of `u·c^∞` for a word `u` and a nonempty cyclically reduced `c`.
    pub fn point(&self, u: &[Letter], c: &[Letter]) -> Result<BoundaryPoint> {
        let a = self.group.alphabet();
        if let Some(bad) = u.iter().chain(c).find(|l| !a.contains(**l)) {
            return input(format!("unknown symbol index {}", bad.0));
        }
        if c.is_empty() {
            return input("boundary period must be nonempty");
        }
        if !is_cyclically_reduced(a, c) {
            return input(format!("period {} is not cyclically reduced", a.format_word(c)));
        }
        let mut u = free_reduce(a, u);
        let mut c = primitive_root(c).to_vec();
        // cancel u against the periodic tail
        while let Some(&last) = u.last() {
            if a.inverse(last) != c[0] {
                break;
            }
            u.pop();
            c.rotate_left(1);
        }
        // absorb trailing copies of the period's last letter
        while let (Some(&last), Some(&cl)) = (u.last(), c.last()) {
            if last != cl {
                break;
            }
            u.pop();
            c.rotate_right(1);
        }
        Ok(BoundaryPoint { u, c })
    }

    /// Parses `u|c` with the group's word syntax.
    pub fn parse(&self, s: &str) -> Result<BoundaryPoint> {
        let (u, c) = s
            .split_once('|')
            .ok_or_else(|| Error::Input(format!("boundary point {s:?} is not of the form u|c")))?;
        let a = self.group.alphabet();
        self.point(&a.parse_word(u.trim())?, &a.parse_word(c.trim())?)
    }

    pub fn format(&self, xi: &BoundaryPoint) -> String {
        let a = self.group.alphabet();
        format!("{}|{}", a.format_word(&xi.u), a.format_word(&xi.c))
    }

    pub fn cylinder(&self, w: &[Letter]) -> Result<Cylinder> {
        let a = self.group.alphabet();
        if w.is_empty() {
            return input("cylinder prefix must be nonempty");
        }
        if free_reduce(a, w).len() != w.len() {
            return input(format!("cylinder prefix {} is not reduced", a.format_word(w)));
        }
        Ok(Cylinder { w: w.to_vec() })
    }

    /// All cylinders of the given depth, in shortlex order.
    pub fn cylinders(&self, depth: usize) -> Vec<Cylinder> {
        let a = self.group.alphabet();
        let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..depth {
            level = level
                .into_iter()
                .flat_map(|w| {
                    a.letters()
                        .filter(|&l| w.last().is_none_or(|&p| a.inverse(p) != l))
                        .map(|l| {
                            let mut v = w.clone();
                            v.push(l);
                            v
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        level.into_iter().map(|w| Cylinder { w }).collect()
    }

    /// A point of the cylinder: `w` followed by a constant tail.
    pub fn point_in(&self, cyl: &Cylinder) -> BoundaryPoint {
        let a = self.group.alphabet();
        let last = *cyl.w.last().expect("cylinders are nonempty");
        let tail = a
            .letters()
            .find(|&l| l != a.inverse(last))
            .expect("free groups have at least two letters");
        self.point(&cyl.w, &[tail]).expect("valid by construction")
    }

    pub fn act(&self, g: &GroupElement, xi: &BoundaryPoint) -> Result<BoundaryPoint> {
        self.group.check_member(g)?;
        let mut u = g.word().to_vec();
        u.extend_from_slice(&xi.u);
        self.point(&u, &xi.c)
    }

    /// `⟨ξ, η⟩`: the common prefix length, `+∞` when the points agree.
    pub fn gromov(&self, xi: &BoundaryPoint, eta: &BoundaryPoint) -> Extended {
        if xi == eta {
            return Extended::Infinite;
        }
        // two periodic tails agreeing on |c₁|+|c₂| letters are equal
        let bound = xi.u.len().max(eta.u.len()) + xi.c.len() + eta.c.len();
        let n = (0..bound).take_while(|&i| xi.letter(i) == eta.letter(i)).count();
        debug_assert!(n < bound, "distinct canonical points must diverge");
        Extended::Finite(n as u64)
    }

    /// `⟨g, ξ⟩` for a group element.
    pub fn gromov_mixed(&self, g: &GroupElement, xi: &BoundaryPoint) -> Result<u64> {
        self.group.check_member(g)?;
        Ok(g.word()
            .iter()
            .enumerate()
            .take_while(|&(i, &l)| xi.letter(i) == l)
            .count() as u64)
    }

    /// `e^{−⟨ξ,η⟩}`.
    pub fn visual_distance(&self, xi: &BoundaryPoint, eta: &BoundaryPoint) -> f64 {
        match self.gromov(xi, eta) {
            Extended::Finite(n) => (-(n as f64)).exp(),
            Extended::Infinite => 0.0,
        }
    }

    /// `b(g)(ξ) = 2⟨g,ξ⟩ − |g|`.
    pub fn busemann(&self, g: &GroupElement, xi: &BoundaryPoint) -> Result<i64> {
        Ok(2 * self.gromov_mixed(g, xi)? as i64 - g.len() as i64)
    }

    /// `c_g(ξ, η) = ⟨g,ξ⟩ − ⟨g,η⟩`.
    pub fn haagerup(&self, g: &GroupElement, xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<i64> {
        Ok(self.gromov_mixed(g, xi)? as i64 - self.gromov_mixed(g, eta)? as i64)
    }

    /// Attracting and repelling fixed points and the translation length of `g ≠ 1`.
    pub fn fixed_points(&self, g: &GroupElement) -> Result<(BoundaryPoint, BoundaryPoint, usize)> {
        let (conj, core) = self.group.cyclically_reduce(g)?;
        let a = self.group.alphabet();
        let plus = self.point(conj.word(), core.word())?;
        let minus = self.point(conj.word(), &a.invert_word(core.word()))?;
        Ok((plus, minus, core.len()))
    }

    pub fn cylinder_measure(&self, cyl: &Cylinder) -> Rational {
        let k = self.rank as i128;
        let base = Rational::from_integer(2 * k - 1);
        Rational::new(1, 2 * k) / base.pow(cyl.depth() as i32 - 1)
    }

    /// `μ(g⁻¹C_w)`, defined when `b(g)` is constant on `C_w`.
    fn translated_measure(&self, g: &GroupElement, cyl: &Cylinder) -> Result<Rational> {
        let a = self.group.alphabet();
        let w = cyl.prefix();
        let common = g.word().iter().zip(w).take_while(|(x, y)| x == y).count();
        if common == w.len() && w.len() < g.len() {
            return input(format!(
                "b({}) is not constant on the cylinder {}; use depth at least {}",
                self.group.format(g),
                a.format_word(w),
                g.len() + 1
            ));
        }
        if w == g.word() {
            // g⁻¹C_g is everything outside the cylinder of the inverse of g's last letter
            let k = self.rank as i128;
            return Ok(Rational::from_integer(1) - Rational::new(1, 2 * k));
        }
        let mut raw = a.invert_word(g.word());
        raw.extend_from_slice(w);
        let v = free_reduce(a, &raw);
        Ok(self.cylinder_measure(&Cylinder { w: v }))
    }

    /// Checks `μ(g⁻¹C_w)/μ(C_w) = (2k−1)^{b(g)(ξ)}` on every cylinder of the given depth.
    pub fn conformality_check(&self, g: &GroupElement, depth: usize) -> Result<ConformalityReport> {
        self.group.check_member(g)?;
        if depth == 0 {
            return input("cylinder depth must be positive");
        }
        let base = Rational::from_integer(self.measure().base());
        let rows = self
            .cylinders(depth)
            .into_iter()
            .map(|cyl| {
                let ratio = self.translated_measure(g, &cyl)? / self.cylinder_measure(&cyl);
                let b = self.busemann(g, &self.point_in(&cyl))?;
                let expected = base.pow(b as i32);
                Ok(ConformalityRow {
                    holds: ratio == expected,
                    cylinder: cyl,
                    ratio,
                    busemann: b,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConformalityReport {
            g: g.clone(),
            depth,
            rows,
        })
    }

    /// Both sides of the conformal identity for the visual metric, in exponent form.
    pub fn conformal_identity_check(
        &self,
        g: &GroupElement,
        xi: &BoundaryPoint,
        eta: &BoundaryPoint,
    ) -> Result<ConformalIdentity> {
        let (Extended::Finite(before), Extended::Finite(after)) = (
            self.gromov(xi, eta),
            self.gromov(&self.act(g, xi)?, &self.act(g, eta)?),
        ) else {
            return input("conformal identity needs distinct boundary points");
        };
        let gi = self.group.invert(g);
        Ok(ConformalIdentity {
            lhs: 2 * after as i64,
            rhs: -self.busemann(&gi, xi)? - self.busemann(&gi, eta)? + 2 * before as i64,
        })
    }

    /// A seeded family of boundary points with preperiods of length at most
    /// `max_pre` and periods of length 1 to `max_period`.
    pub fn random_points(&self, count: usize, max_pre: usize, max_period: usize, seed: u64) -> Vec<BoundaryPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let pre = rng.gen_range(0..=max_pre);
                let u = self.random_reduced(&mut rng, pre);
                let c = loop {
                    let len = rng.gen_range(1..=max_period.max(1));
                    let c = self.random_reduced(&mut rng, len);
                    if is_cyclically_reduced(self.group.alphabet(), &c) {
                        break c;
                    }
                };
                self.point(&u, &c).expect("valid by construction")
            })
            .collect()
    }

    fn random_reduced(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<Letter> {
        let a = self.group.alphabet();
        let letters: Vec<Letter> = a.letters().collect();
        let mut w: Vec<Letter> = Vec::with_capacity(len);
        while w.len() < len {
            let l = letters[rng.gen_range(0..letters.len())];
            if w.last().is_none_or(|&p| a.inverse(p) != l) {
                w.push(l);
            }
        }
        w
    }
}

/// Shortest `r` with `c = r^m`.
fn primitive_root(c: &[Letter]) -> &[Letter] {
    let n = c.len();
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| &c[..d])
        .find(|r| c.chunks(r.len()).all(|ch| ch == *r))
        .expect("the word is its own root")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Arc<Group>, FreeBoundary) {
        let g = Group::free(2).unwrap();
        let b = FreeBoundary::new(&g).unwrap();
        (g, b)
    }

    #[test]
    fn canonical_forms() {
        let (_, bd) = setup();
        let p = |s| bd.parse(s).unwrap();
        assert_eq!(bd.format(&p("b|ab")), "|ba");
        assert_eq!(bd.format(&p("a|bb")), "a|b");
        assert_eq!(bd.format(&p("ab'|ba")), "a|ab");
        assert_eq!(bd.format(&p("aa'|b")), "|b");
        assert!(bd.parse("a|aba'").is_err());
        assert!(bd.parse("a|").is_err());
    }

    #[test]
    fn action_examples() {
        let (g, bd) = setup();
        let p = |s| bd.parse(s).unwrap();
        let e = |s| g.parse(s).unwrap();
        assert_eq!(bd.act(&e("a"), &p("|b")).unwrap(), p("a|b"));
        assert_eq!(bd.act(&e("a'"), &p("|a")).unwrap(), p("|a"));
        assert_eq!(bd.act(&e("a'"), &p("a|b")).unwrap(), p("|b"));
        // finite prefixes agree with the action on words
        let xi = p("ab'|ba");
        let g1 = e("ba'b'");
        let moved = bd.act(&g1, &xi).unwrap();
        let mut raw = g1.word().to_vec();
        raw.extend(xi.prefix(30));
        let approx = free_reduce(g.alphabet(), &raw);
        assert_eq!(&approx[..20], &moved.prefix(20)[..]);
    }

    #[test]
    fn gromov_examples() {
        let (g, bd) = setup();
        let p = |s| bd.parse(s).unwrap();
        assert_eq!(bd.gromov_mixed(&g.parse("abb").unwrap(), &p("a|b")).unwrap(), 3);
        assert_eq!(bd.gromov(&p("|a"), &p("|b")), Extended::Finite(0));
        assert_eq!(bd.gromov(&p("a|b"), &p("a|b")), Extended::Infinite);
        assert_eq!(bd.visual_distance(&p("|a"), &p("|b")), 1.0);
        assert_eq!(bd.visual_distance(&p("a|b"), &p("ab'|a")), (-1f64).exp());
        assert_eq!(bd.visual_distance(&p("a|b"), &p("a|b")), 0.0);
    }

    #[test]
    fn busemann_and_haagerup_examples() {
        let (g, bd) = setup();
        let p = |s| bd.parse(s).unwrap();
        let a = g.parse("a").unwrap();
        assert_eq!(bd.busemann(&a, &p("|a")).unwrap(), 1);
        assert_eq!(bd.busemann(&a, &p("|b")).unwrap(), -1);
        assert_eq!(bd.busemann(&g.identity(), &p("|b")).unwrap(), 0);
        assert_eq!(bd.haagerup(&a, &p("|a"), &p("|b")).unwrap(), 1);
        assert_eq!(bd.haagerup(&g.identity(), &p("|a"), &p("|b")).unwrap(), 0);
    }

    #[test]
    fn fixed_point_examples() {
        let (g, bd) = setup();
        let (plus, minus, len) = bd.fixed_points(&g.parse("ab").unwrap()).unwrap();
        assert_eq!(bd.format(&plus), "|ab");
        assert_eq!(bd.format(&minus), "|b'a'");
        assert_eq!(len, 2);
        let (plus, _, len) = bd.fixed_points(&g.parse("aba'").unwrap()).unwrap();
        assert_eq!(bd.format(&plus), "a|b");
        assert_eq!(len, 1);
        assert!(bd.fixed_points(&g.identity()).is_err());
    }

    #[test]
    fn measure_examples() {
        let (g, bd) = setup();
        let w = |s| bd.cylinder(&g.alphabet().parse_word(s).unwrap()).unwrap();
        assert_eq!(bd.cylinder_measure(&w("a")), Rational::new(1, 4));
        assert_eq!(bd.cylinder_measure(&w("ab")), Rational::new(1, 12));
        let total: Rational = bd.cylinders(3).iter().map(|c| bd.cylinder_measure(c)).sum();
        assert_eq!(total, Rational::from_integer(1));
        assert!(bd.cylinder(&g.alphabet().parse_word("aa'").unwrap()).is_err());
    }

    #[test]
    fn conformality_examples() {
        let (g, bd) = setup();
        let a = g.parse("a").unwrap();
        let report = bd.conformality_check(&a, 2).unwrap();
        assert_eq!(report.failures(), 0);
        let row = |s: &str| {
            let w = g.alphabet().parse_word(s).unwrap();
            report.rows.iter().find(|r| r.cylinder.prefix() == w).unwrap().clone()
        };
        assert_eq!((row("ab").ratio, row("ab").busemann), (Rational::from_integer(3), 1));
        let depth1 = bd.conformality_check(&a, 1).unwrap();
        let b_row = depth1
            .rows
            .iter()
            .find(|r| g.alphabet().format_word(r.cylinder.prefix()) == "b")
            .unwrap();
        assert_eq!((b_row.ratio, b_row.busemann), (Rational::new(1, 3), -1));
        let err = bd.conformality_check(&g.parse("ab").unwrap(), 1).unwrap_err();
        assert!(err.to_string().contains("cylinder a"));
    }

    #[test]
    fn conformal_identity_example() {
        let (g, bd) = setup();
        let p = |s| bd.parse(s).unwrap();
        let r = bd
            .conformal_identity_check(&g.parse("a").unwrap(), &p("|b"), &p("|b'"))
            .unwrap();
        assert_eq!(r, ConformalIdentity { lhs: 2, rhs: 2 });
        assert!(bd
            .conformal_identity_check(&g.parse("a").unwrap(), &p("|b"), &p("|b"))
            .is_err());
    }

    #[test]
    fn surface_groups_have_no_exact_boundary() {
        let s = Group::surface(2).unwrap();
        assert!(matches!(FreeBoundary::new(&s), Err(Error::Unsupported(_))));
    }
}
