use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{haagerup_coboundary, lp_norm, DeltaDomain, LpNormReport};
use crate::error::{Error, Result};
use crate::group::{GroupElement, Letter};
use crate::metrics::{MetricStructure, MetricValue, NUMERIC_FLOOR};
use crate::Rational;

/// Witnesses kept per report.
const MAX_WITNESSES: usize = 20;

/// A finitely supported function on Δ ∩ window, indexed by pair position.
#[derive(Clone, Debug, PartialEq)]
pub struct TestVector {
    pub entries: Vec<(usize, Rational)>,
}

impl TestVector {
    /// `support` distinct pairs with nonzero values in `{±1/2, ±1, …, ±3}`.
    pub fn random(delta: &DeltaDomain, support: usize, seed: u64) -> TestVector {
        let all: Vec<usize> = (0..delta.len()).collect();
        Self::sample(&all, support, seed)
    }

    /// Like [`TestVector::random`], using only pairs with both ends in the ball of `radius`.
    pub fn random_within(delta: &DeltaDomain, support: usize, radius: usize, seed: u64) -> TestVector {
        let ball = delta.ball();
        let near: Vec<usize> = delta
            .index_pairs()
            .iter()
            .enumerate()
            .filter(|(_, &(x, y))| ball.depth(x as usize) <= radius && ball.depth(y as usize) <= radius)
            .map(|(i, _)| i)
            .collect();
        Self::sample(&near, support, seed)
    }

    fn sample(candidates: &[usize], support: usize, seed: u64) -> TestVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = candidates.len();
        let mut chosen: Vec<usize> = Vec::new();
        while chosen.len() < support.min(n) {
            let i = candidates[rng.gen_range(0..n)];
            if !chosen.contains(&i) {
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        let entries = chosen
            .into_iter()
            .map(|i| {
                let mut v = rng.gen_range(-6i128..=5);
                if v >= 0 {
                    v += 1;
                }
                (i, Rational::new(v, 2))
            })
            .collect();
        TestVector { entries }
    }
}

#[derive(Clone, Debug)]
pub struct AffineReport {
    pub compositions_checked: u64,
    pub composition_failures: u64,
    /// `(g, h, x, y)` where `A_g A_h φ ≠ A_{gh} φ`.
    pub composition_witnesses: Vec<[GroupElement; 4]>,
    pub isometry_failures: Vec<GroupElement>,
    /// `‖A_g(0)‖_p^p = ‖c_g‖_p^p` per element.
    pub displacements: Vec<LpNormReport>,
}

impl AffineReport {
    pub fn holds(&self) -> bool {
        self.composition_failures == 0 && self.isometry_failures.is_empty()
    }
}

/// Checks `A_g(A_h φ) = A_{gh} φ` on every window pair of Δ, that `φ ↦ g.φ` preserves
/// the multiset of values (hence every ℓ^p norm), and records displacements.
pub fn affine_action_check(
    delta: &DeltaDomain,
    gs: &[GroupElement],
    phi: &TestVector,
    p: f64,
) -> Result<AffineReport> {
    let m = delta.metric();
    let group = m.group();
    let ball = delta.ball();
    let pairs = delta.index_pairs();
    let phi_map: HashMap<(u32, u32), Rational> = phi
        .entries
        .iter()
        .map(|&(i, v)| (pairs[i], v))
        .collect();
    let lookup = |a: &GroupElement, b: &GroupElement| -> MetricValue {
        let v = match (ball.index_of(a), ball.index_of(b)) {
            (Some(i), Some(j)) => phi_map.get(&(i as u32, j as u32)).copied(),
            _ => None,
        };
        MetricValue::Exact(v.unwrap_or_else(|| Rational::from_integer(0)))
    };
    let points: Vec<GroupElement> = ball.elements().collect();
    let mut report = AffineReport {
        compositions_checked: 0,
        composition_failures: 0,
        composition_witnesses: Vec::new(),
        isometry_failures: Vec::new(),
        displacements: Vec::new(),
    };
    for g in gs {
        group.check_member(g)?;
        let gi = group.invert(g);
        for h in gs {
            let hi = group.invert(h);
            let ghi = group.invert(&group.mul(g, h));
            let gh = group.mul(g, h);
            for &(xi, yi) in pairs {
                let (x, y) = (&points[xi as usize], &points[yi as usize]);
                let (gx, gy) = (group.mul(&gi, x), group.mul(&gi, y));
                let lhs = lookup(&group.mul(&hi, &gx), &group.mul(&hi, &gy))
                    + haagerup_coboundary(m, h, &gx, &gy)?
                    + haagerup_coboundary(m, g, x, y)?;
                let rhs = lookup(&group.mul(&ghi, x), &group.mul(&ghi, y))
                    + haagerup_coboundary(m, &gh, x, y)?;
                report.compositions_checked += 1;
                if !lhs.agrees_with(&rhs, NUMERIC_FLOOR) {
                    report.composition_failures += 1;
                    if report.composition_witnesses.len() < MAX_WITNESSES {
                        report
                            .composition_witnesses
                            .push([g.clone(), h.clone(), x.clone(), y.clone()]);
                    }
                }
            }
        }
        // the translated support must stay inside the window
        for &(i, _) in &phi.entries {
            let (x, y) = pairs[i];
            for e in [x, y] {
                if ball.index_of(&group.mul(g, &points[e as usize])).is_none() {
                    return Err(Error::Resource(format!(
                        "translate of the test vector by {} leaves the window; radius {} needed",
                        group.format(g),
                        delta.radius() + g.len()
                    )));
                }
            }
        }
        let mut before: Vec<Rational> = phi.entries.iter().map(|e| e.1).collect();
        let mut after: Vec<Rational> = pairs
            .iter()
            .filter_map(|&(x, y)| {
                let v = lookup(&group.mul(&gi, &points[x as usize]), &group.mul(&gi, &points[y as usize]));
                v.as_exact().filter(|q| *q != Rational::from_integer(0))
            })
            .collect();
        before.sort();
        after.sort();
        if before != after {
            report.isometry_failures.push(g.clone());
        }
        report.displacements.push(lp_norm(delta, g, p)?);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub elements: usize,
    pub pairs: usize,
    pub checked: u64,
    pub failures: u64,
    /// `(g, h, x, y)` violating `c_{gh}(x,y) = c_g(x,y) + c_h(g⁻¹x, g⁻¹y)`.
    pub witnesses: Vec<[GroupElement; 4]>,
}

/// Canonical handle on an element for repeated length queries: a table index when
/// the metric has a length table, otherwise the normal form.
#[derive(Clone, Debug)]
enum Key {
    Index(usize),
    Word(Vec<Letter>),
}

struct Oracle<'a> {
    m: &'a MetricStructure,
}

impl Oracle<'_> {
    fn key(&self, word: &[Letter]) -> Result<Key> {
        match self.m.table() {
            Some(t) => t.locate(word).map(Key::Index).ok_or_else(|| {
                Error::Resource(format!(
                    "element of length {} lies outside the radius-{} length table",
                    word.len(),
                    t.radius()
                ))
            }),
            None => Ok(Key::Word(self.m.group().reduce_word(word))),
        }
    }

    fn length(&self, key: &Key) -> Result<f64> {
        match key {
            Key::Index(i) => Ok(self.m.table_length(*i)),
            Key::Word(w) => self.m.raw_length(w),
        }
    }

    fn word(&self, key: &Key) -> Vec<Letter> {
        match key {
            Key::Index(i) => self.m.table().expect("indexed keys need a table").word(*i),
            Key::Word(w) => w.clone(),
        }
    }

    /// Key of `key·word` if it is representable.
    fn times(&self, key: &Key, word: &[Letter]) -> Result<Key> {
        match key {
            Key::Index(i) => {
                let t = self.m.table().expect("indexed keys need a table");
                match t.walk(*i, word) {
                    Some(j) => Ok(Key::Index(j)),
                    None => {
                        let mut w = t.word(*i);
                        w.extend_from_slice(word);
                        self.key(&w)
                    }
                }
            }
            Key::Word(w) => {
                let mut raw = w.clone();
                raw.extend_from_slice(word);
                Ok(Key::Word(self.m.group().reduce_word(&raw)))
            }
        }
    }

    /// Length of `key·word`, falling back to the metric's own length rule.
    fn length_times(&self, key: &Key, word: &[Letter]) -> Result<f64> {
        if let Key::Index(i) = key {
            let t = self.m.table().expect("indexed keys need a table");
            if let Some(j) = t.walk(*i, word) {
                return Ok(self.m.table_length(j));
            }
        }
        let mut w = self.word(key);
        w.extend_from_slice(word);
        self.m.raw_length(&w)
    }
}

/// Exhaustive check of `c_{gh}(x,y) = c_g(x,y) + c_h(g⁻¹x, g⁻¹y)` for all `g, h` in
/// `gs` and all pairs of Δ.
///
/// The left side goes through the product `gh` and `|(gh)⁻¹x|`; the right side
/// translates `x` by `g⁻¹` first and then measures `|h⁻¹·(g⁻¹x)|`, so the two
/// sides share no intermediate length.
pub fn cocycle_identity_scan(delta: &DeltaDomain, gs: &[GroupElement]) -> Result<IdentityReport> {
    let m = delta.metric();
    let group = m.group();
    let ball = delta.ball();
    let oracle = Oracle { m };
    let n = ball.len();
    let words: Vec<Vec<Letter>> = (0..n).map(|i| ball.word(i)).collect();
    let own: Vec<f64> = words
        .iter()
        .map(|w| m.raw_length(w))
        .collect::<Result<_>>()?;
    let alphabet = group.alphabet();
    let tol = if m.is_integral() { 0.0 } else { NUMERIC_FLOOR };

    // per g: key of g⁻¹x and |g⁻¹x|
    let mut shifted: Vec<Vec<Key>> = Vec::with_capacity(gs.len());
    let mut shifted_len: Vec<Vec<f64>> = Vec::with_capacity(gs.len());
    for g in gs {
        group.check_member(g)?;
        let gi = oracle.key(&alphabet.invert_word(g.word()))?;
        let keys: Vec<Key> = words
            .iter()
            .map(|w| oracle.times(&gi, w))
            .collect::<Result<_>>()?;
        shifted_len.push(keys.iter().map(|k| oracle.length(k)).collect::<Result<_>>()?);
        shifted.push(keys);
    }
    let inverse_keys: Vec<Key> = gs
        .iter()
        .map(|h| oracle.key(&alphabet.invert_word(h.word())))
        .collect::<Result<_>>()?;

    let mut report = IdentityReport {
        elements: gs.len(),
        pairs: delta.len(),
        checked: 0,
        failures: 0,
        witnesses: Vec::new(),
    };
    // b(gh)(x) on one side, b(g)(x) and b(h)(g⁻¹x) on the other
    let mut b_gh = vec![0.0; n];
    let mut b_g = vec![0.0; n];
    let mut b_h = vec![0.0; n];
    for (a, g) in gs.iter().enumerate() {
        for x in 0..n {
            b_g[x] = own[x] - shifted_len[a][x];
        }
        for (b, h) in gs.iter().enumerate() {
            let ghi = oracle.key(&alphabet.invert_word(group.mul(g, h).word()))?;
            for x in 0..n {
                b_gh[x] = own[x] - oracle.length_times(&ghi, &words[x])?;
                let hgx = oracle.length_times(&inverse_keys[b], &oracle.word(&shifted[a][x]))?;
                b_h[x] = shifted_len[a][x] - hgx;
            }
            for &(x, y) in delta.index_pairs() {
                let (x, y) = (x as usize, y as usize);
                let left = 0.5 * (b_gh[x] - b_gh[y]);
                let right = 0.5 * (b_g[x] - b_g[y]) + 0.5 * (b_h[x] - b_h[y]);
                report.checked += 1;
                if (left - right).abs() > tol {
                    report.failures += 1;
                    if report.witnesses.len() < MAX_WITNESSES {
                        report.witnesses.push([
                            g.clone(),
                            h.clone(),
                            ball.element(x),
                            ball.element(y),
                        ]);
                    }
                }
            }
        }
    }
    Ok(report)
}
