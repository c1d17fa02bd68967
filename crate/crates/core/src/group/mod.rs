//! Finitely generated groups with a solvable word problem.
//!
//! Free groups and free products of cyclic groups have unique normal forms
//! (reduced syllable sequences). C′(1/6) small-cancellation groups use Dehn's
//! algorithm; their reduced words are not canonical, so equality goes through
//! [`Group::is_trivial`].

mod alphabet;
mod ball;
mod dehn;
mod keys;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use alphabet::{Alphabet, Letter};
pub use ball::{enumerate_ball, Ball, BallOptions, DEFAULT_BALL_CAP};
pub use dehn::{free_reduce, is_cyclically_reduced, RelatorFamily};

use crate::error::{input, Error, Result};
use keys::KeyScheme;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Free,
    FreeProductOfCyclics,
    SmallCancellation,
}

/// A finitely presented group: alphabet, cyclically reduced relators and the kind
/// that selects the word-problem machinery.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Vec<Letter>>,
    pub kind: GroupKind,
    /// Order of each generator, 0 for infinite order.
    pub orders: Vec<u32>,
}

/// A group element in canonical form (Dehn-reduced form for small-cancellation groups).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    word: Vec<Letter>,
    group: u64,
}

impl GroupElement {
    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    /// Length of the stored word. For free groups and free products of cyclics this
    /// is the word length; for small-cancellation groups it is only an upper bound.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn group_id(&self) -> u64 {
        self.group
    }
}

#[derive(Debug)]
pub struct Group {
    name: String,
    presentation: GroupPresentation,
    id: u64,
    dehn: Option<RelatorFamily>,
    keys: KeyScheme,
}

impl Group {
    /// Builds a group from a presentation, classifying it and checking the
    /// C′(1/6) condition when neither normal-form machinery applies.
    pub fn from_presentation(
        name: &str,
        alphabet: Alphabet,
        relators: Vec<Vec<Letter>>,
    ) -> Result<Arc<Group>> {
        for r in &relators {
            if r.is_empty() {
                return input("empty relator");
            }
            if !r.iter().all(|&l| l == r[0]) && !is_cyclically_reduced(&alphabet, r) {
                return input(format!(
                    "relator {:?} is not cyclically reduced",
                    alphabet.format_word(r)
                ));
            }
        }
        let mut orders = vec![0u32; alphabet.generator_count()];
        let power_of_one = |r: &[Letter]| r.iter().all(|&l| l == r[0]);
        let kind = if relators.is_empty()
            && alphabet.letters().all(|l| !alphabet.is_self_inverse(l))
        {
            GroupKind::Free
        } else if relators.iter().all(|r| power_of_one(r)) {
            for r in &relators {
                let g = alphabet.generator_of(r[0]);
                let n = r.len() as u32;
                orders[g] = if orders[g] == 0 { n } else { gcd(orders[g], n) };
            }
            for l in alphabet.letters() {
                if alphabet.is_self_inverse(l) {
                    let g = alphabet.generator_of(l);
                    if orders[g] != 2 {
                        return input(format!(
                            "self-inverse generator {} needs the relator {}{}",
                            alphabet.name(l),
                            alphabet.name(l),
                            alphabet.name(l)
                        ));
                    }
                }
            }
            if orders.contains(&1) {
                return input("a generator of order 1 is trivial; drop it from the presentation");
            }
            GroupKind::FreeProductOfCyclics
        } else {
            GroupKind::SmallCancellation
        };

        let dehn = if kind == GroupKind::SmallCancellation {
            if alphabet.letters().any(|l| alphabet.is_self_inverse(l)) {
                return input("self-inverse generators are only supported for free products of cyclics");
            }
            for r in &relators {
                if is_proper_power(r) {
                    return input(format!(
                        "relator {:?} is a proper power",
                        alphabet.format_word(r)
                    ));
                }
            }
            let fam = RelatorFamily::new(&alphabet, &relators);
            let piece = fam.max_piece();
            if 6 * piece >= fam.min_len() {
                return input(format!(
                    "presentation is not C'(1/6): piece of length {piece} against minimal relator length {}",
                    fam.min_len()
                ));
            }
            Some(fam)
        } else {
            None
        };
        let keys = if dehn.is_some() {
            KeyScheme::for_relators(&alphabet, &relators)
        } else {
            KeyScheme::Trivial
        };

        let mut h = DefaultHasher::new();
        name.hash(&mut h);
        alphabet.generator_names().hash(&mut h);
        for r in &relators {
            r.hash(&mut h);
        }
        let id = h.finish();

        Ok(Arc::new(Group {
            name: name.to_string(),
            presentation: GroupPresentation {
                alphabet,
                relators,
                kind,
                orders,
            },
            id,
            dehn,
            keys,
        }))
    }

    pub fn free(rank: usize) -> Result<Arc<Group>> {
        if rank < 2 {
            return input("free groups need rank at least 2 to be non-elementary");
        }
        Group::from_presentation(&format!("free:{rank}"), Alphabet::free(rank)?, Vec::new())
    }

    /// Fundamental group of the closed genus-`g` surface, `[a1,b1]...[ag,bg]`.
    pub fn surface(genus: usize) -> Result<Arc<Group>> {
        if genus < 2 {
            return input("surface groups need genus at least 2 to be hyperbolic");
        }
        let names: Vec<String> = (0..2 * genus)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let alphabet = Alphabet::new(&refs, &vec![false; 2 * genus])?;
        let mut rel = Vec::new();
        for i in 0..genus {
            let x = alphabet.generator_letter(2 * i);
            let y = alphabet.generator_letter(2 * i + 1);
            rel.extend([x, y, alphabet.inverse(x), alphabet.inverse(y)]);
        }
        Group::from_presentation(&format!("surface:{genus}"), alphabet, vec![rel])
    }

    /// PSL(2, Z) = Z/2 * Z/3 with generators `s` (order 2) and `t` (order 3).
    pub fn modular() -> Result<Arc<Group>> {
        let alphabet = Alphabet::new(&["s", "t"], &[true, false])?;
        let s = alphabet.parse_word("ss")?;
        let t = alphabet.parse_word("ttt")?;
        Group::from_presentation("modular", alphabet, vec![s, t])
    }

    /// `free:k`, `surface:g` or `modular`.
    pub fn preset(spec: &str) -> Result<Arc<Group>> {
        let spec = spec.trim();
        if spec == "modular" {
            return Group::modular();
        }
        let parse_n = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Input(format!("bad group spec {spec:?}")))
        };
        if let Some(k) = spec.strip_prefix("free:") {
            return Group::free(parse_n(k)?);
        }
        if let Some(g) = spec.strip_prefix("surface:") {
            return Group::surface(parse_n(g)?);
        }
        input(format!(
            "unknown group spec {spec:?}; expected free:k, surface:g, modular or a presentation file"
        ))
    }

    /// Parses the plain-text presentation format:
    ///
    /// ```text
    /// generators: a b c d
    /// a b a' b' c d c' d'
    /// ```
    ///
    /// Blank lines and lines starting with `#` are ignored. A generator that appears
    /// in a relator `xx` is treated as self-inverse when listed as `x!`.
    pub fn from_text(name: &str, text: &str) -> Result<Arc<Group>> {
        let mut gens: Option<Vec<(String, bool)>> = None;
        let mut relator_lines = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("generators:") {
                if gens.is_some() {
                    return input("duplicate generators line");
                }
                gens = Some(
                    rest.split_whitespace()
                        .map(|g| match g.strip_suffix('!') {
                            Some(base) => (base.to_string(), true),
                            None => (g.to_string(), false),
                        })
                        .collect(),
                );
            } else {
                relator_lines.push(line.to_string());
            }
        }
        let Some(gens) = gens else {
            return input("missing `generators:` line");
        };
        let names: Vec<&str> = gens.iter().map(|(n, _)| n.as_str()).collect();
        let flags: Vec<bool> = gens.iter().map(|(_, f)| *f).collect();
        let alphabet = Alphabet::new(&names, &flags)?;
        let relators = relator_lines
            .iter()
            .map(|l| alphabet.parse_word(l))
            .collect::<Result<Vec<_>>>()?;
        Group::from_presentation(name, alphabet, relators)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn kind(&self) -> GroupKind {
        self.presentation.kind
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.presentation.alphabet
    }

    /// Rank of a free group, `None` for other kinds.
    pub fn free_rank(&self) -> Option<usize> {
        (self.kind() == GroupKind::Free).then(|| self.alphabet().generator_count())
    }

    pub fn is_torsion_free(&self) -> bool {
        self.kind() != GroupKind::FreeProductOfCyclics
    }

    /// Whether stored words are unique normal forms.
    pub fn has_normal_forms(&self) -> bool {
        self.dehn.is_none()
    }

    pub(crate) fn keys(&self) -> &KeyScheme {
        &self.keys
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            word: Vec::new(),
            group: self.id,
        }
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        self.alphabet()
            .letters()
            .map(|l| self.element_unchecked(vec![l]))
            .collect()
    }

    /// Canonical form of a raw symbol sequence.
    pub fn normalize(&self, raw: &[Letter]) -> Result<GroupElement> {
        if let Some(bad) = raw.iter().find(|l| !self.alphabet().contains(**l)) {
            return input(format!("unknown symbol index {} for {}", bad.0, self.name));
        }
        Ok(self.element_unchecked(self.reduce_word(raw)))
    }

    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        let raw = self.alphabet().parse_word(s)?;
        self.normalize(&raw)
    }

    pub fn format(&self, g: &GroupElement) -> String {
        if g.word.is_empty() {
            "1".to_string()
        } else {
            self.alphabet().format_word(&g.word)
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_member(g)?;
        self.check_member(h)?;
        Ok(self.mul(g, h))
    }

    pub fn invert(&self, g: &GroupElement) -> GroupElement {
        self.element_unchecked(self.reduce_word(&self.alphabet().invert_word(&g.word)))
    }

    pub fn is_trivial(&self, g: &GroupElement) -> bool {
        match &self.dehn {
            Some(fam) => fam.is_trivial(self.alphabet(), &g.word),
            None => g.word.is_empty(),
        }
    }

    pub fn equal(&self, g: &GroupElement, h: &GroupElement) -> bool {
        if self.has_normal_forms() {
            return g.word == h.word;
        }
        g.word == h.word || self.words_equal(&g.word, &h.word)
    }

    /// Splits `g = u·c·u⁻¹` with `c` cyclically reduced.
    ///
    /// For free groups `|c|` is the translation length `lim |gⁿ|/n`.
    pub fn cyclically_reduce(&self, g: &GroupElement) -> Result<(GroupElement, GroupElement)> {
        self.check_member(g)?;
        if self.is_trivial(g) {
            return input("cyclic reduction of the identity");
        }
        let a = self.alphabet();
        let w = &g.word;
        let mut k = 0;
        while 2 * k + 1 < w.len() && a.inverse(w[k]) == w[w.len() - 1 - k] {
            k += 1;
        }
        let mut conj = w[..k].to_vec();
        let mut core = w[k..w.len() - k].to_vec();
        if self.kind() == GroupKind::FreeProductOfCyclics {
            // merge the wrap-around syllable so the core is cyclically reduced there too
            while core.len() > 1
                && a.generator_of(core[0]) == a.generator_of(core[core.len() - 1])
                && core.iter().any(|&l| a.generator_of(l) != a.generator_of(core[0]))
            {
                let l = core[core.len() - 1];
                let mut rotated = vec![l];
                rotated.extend_from_slice(&core[..core.len() - 1]);
                core = self.reduce_word(&rotated);
                conj.push(a.inverse(l));
            }
            conj = self.reduce_word(&conj);
        }
        Ok((self.element_unchecked(conj), self.element_unchecked(core)))
    }

    pub fn power(&self, g: &GroupElement, n: i64) -> GroupElement {
        let base = if n < 0 { self.invert(g) } else { g.clone() };
        let mut raw = Vec::with_capacity(base.word.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            raw.extend_from_slice(&base.word);
        }
        self.element_unchecked(self.reduce_word(&raw))
    }

    pub(crate) fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let mut raw = g.word.clone();
        raw.extend_from_slice(&h.word);
        self.element_unchecked(self.reduce_word(&raw))
    }

    pub(crate) fn element_unchecked(&self, word: Vec<Letter>) -> GroupElement {
        GroupElement { word, group: self.id }
    }

    pub(crate) fn check_member(&self, g: &GroupElement) -> Result<()> {
        if g.group != self.id {
            return input(format!("element does not belong to {}", self.name));
        }
        Ok(())
    }

    pub(crate) fn words_equal(&self, a: &[Letter], b: &[Letter]) -> bool {
        let mut w = a.to_vec();
        w.extend(self.alphabet().invert_word(b));
        match &self.dehn {
            Some(fam) => fam.is_trivial(self.alphabet(), &w),
            None => self.reduce_word(&w).is_empty(),
        }
    }

    /// Word-level canonicalization; unique except for small-cancellation groups.
    pub(crate) fn reduce_word(&self, raw: &[Letter]) -> Vec<Letter> {
        let a = self.alphabet();
        match self.kind() {
            GroupKind::Free => free_reduce(a, raw),
            GroupKind::FreeProductOfCyclics => reduce_syllables(a, &self.presentation.orders, raw),
            GroupKind::SmallCancellation => self
                .dehn
                .as_ref()
                .expect("small-cancellation groups carry relators")
                .reduce(a, raw),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

fn is_proper_power(r: &[Letter]) -> bool {
    (1..r.len()).any(|p| r.len() % p == 0 && (p..r.len()).all(|i| r[i] == r[i - p]))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Normal form in a free product of cyclic groups: maximal syllables `x^e` with
/// the exponent reduced into `(-n/2, n/2]` for finite order `n`.
fn reduce_syllables(a: &Alphabet, orders: &[u32], raw: &[Letter]) -> Vec<Letter> {
    let mut syllables: Vec<(usize, i64)> = Vec::new();
    for &l in raw {
        let g = a.generator_of(l);
        let e = a.exponent_of(l) as i64;
        match syllables.last_mut() {
            Some((lg, le)) if *lg == g => {
                *le += e;
                let n = orders[g] as i64;
                if n > 0 {
                    *le = canonical_exponent(*le, n);
                }
                if *le == 0 {
                    syllables.pop();
                }
            }
            _ => {
                let n = orders[g] as i64;
                let e = if n > 0 { canonical_exponent(e, n) } else { e };
                if e != 0 {
                    syllables.push((g, e));
                }
            }
        }
    }
    let mut out = Vec::new();
    for (g, e) in syllables {
        let pos = a.generator_letter(g);
        let l = if e > 0 { pos } else { a.inverse(pos) };
        out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
    }
    out
}

fn canonical_exponent(e: i64, n: i64) -> i64 {
    let mut r = e.rem_euclid(n);
    if 2 * r > n {
        r -= n;
    }
    r
}
