use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use super::{Group, GroupElement, GroupKind, Letter};
use crate::error::{Error, Result};

/// Element cap applied by [`enumerate_ball`].
pub const DEFAULT_BALL_CAP: usize = 4_000_000;

const NONE: u32 = u32::MAX;
const UNSET: u32 = u32::MAX - 1;

#[derive(Clone, Copy, Debug)]
pub struct BallOptions {
    pub cap: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions {
            cap: DEFAULT_BALL_CAP,
        }
    }
}

#[derive(Debug)]
enum Index {
    /// Reduced words are geodesic paths from the root.
    Walk,
    NormalForm(HashMap<Vec<Letter>, u32>),
    Buckets {
        keys: Vec<Vec<u64>>,
        map: HashMap<Vec<u64>, Vec<u32>>,
    },
}

/// The ball of radius `R` in the Cayley graph, in shortlex order, together with its
/// right-multiplication table.
///
/// Index 0 is the identity; sphere `n` occupies [`Ball::sphere`]`(n)`. Each element's
/// representative word is its shortlex-least geodesic.
#[derive(Debug)]
pub struct Ball {
    group: Arc<Group>,
    radius: usize,
    parent: Vec<u32>,
    last: Vec<Letter>,
    depth: Vec<u8>,
    sphere_start: Vec<usize>,
    adjacency: Vec<u32>,
    index: Index,
}

pub fn enumerate_ball(group: &Arc<Group>, radius: usize) -> Result<Ball> {
    Ball::build(group, radius, BallOptions::default())
}

impl Ball {
    pub fn build(group: &Arc<Group>, radius: usize, opts: BallOptions) -> Result<Ball> {
        if radius > u8::MAX as usize {
            return Err(Error::Resource(format!("radius {radius} exceeds 255")));
        }
        let letters = group.alphabet().len();
        let index = match group.kind() {
            GroupKind::Free => Index::Walk,
            GroupKind::FreeProductOfCyclics => {
                Index::NormalForm(HashMap::from([(Vec::new(), 0u32)]))
            }
            GroupKind::SmallCancellation => {
                let root = group.keys().identity_key(group.alphabet());
                Index::Buckets {
                    keys: vec![root.clone()],
                    map: HashMap::from([(root, vec![0u32])]),
                }
            }
        };
        let mut ball = Ball {
            group: group.clone(),
            radius,
            parent: vec![NONE],
            last: vec![Letter(0)],
            depth: vec![0],
            sphere_start: vec![0],
            adjacency: vec![UNSET; letters],
            index,
        };

        let mut x = 0usize;
        for n in 0..=radius {
            let end = ball.parent.len();
            ball.sphere_start.push(end);
            while x < end {
                for l in group.alphabet().letters() {
                    if ball.adjacency[x * letters + l.index()] != UNSET {
                        continue;
                    }
                    let found = ball.find_product(x, l);
                    let target = match found {
                        Some(y) => y as u32,
                        None if n < radius => ball.push_child(x, l, opts.cap)?,
                        None => NONE,
                    };
                    ball.adjacency[x * letters + l.index()] = target;
                    if target != NONE {
                        let inv = group.alphabet().inverse(l);
                        ball.adjacency[target as usize * letters + inv.index()] = x as u32;
                    }
                }
                x += 1;
            }
        }
        debug_assert!(!ball.adjacency.contains(&UNSET));
        Ok(ball)
    }

    fn push_child(&mut self, x: usize, l: Letter, cap: usize) -> Result<u32> {
        let idx = self.parent.len();
        if idx >= cap {
            return Err(Error::Resource(format!(
                "ball of radius {} in {} exceeds the element cap {cap}",
                self.radius,
                self.group.name()
            )));
        }
        self.parent.push(x as u32);
        self.last.push(l);
        self.depth.push(self.depth[x] + 1);
        self.adjacency
            .extend(std::iter::repeat_n(UNSET, self.group.alphabet().len()));
        let alphabet = self.group.alphabet();
        let word = match self.index {
            Index::NormalForm(_) => {
                let mut w = self.word_of(x);
                w.push(l);
                w
            }
            _ => Vec::new(),
        };
        match &mut self.index {
            Index::Walk => {}
            Index::NormalForm(map) => {
                map.insert(word, idx as u32);
            }
            Index::Buckets { keys, map } => {
                let key = self.group.keys().step(alphabet, &keys[x], l);
                keys.push(key.clone());
                map.entry(key).or_default().push(idx as u32);
            }
        }
        Ok(idx as u32)
    }

    /// Finds `x·l` among the elements discovered so far.
    fn find_product(&self, x: usize, l: Letter) -> Option<usize> {
        let alphabet = self.group.alphabet();
        match &self.index {
            Index::Walk => {
                // in a tree the only earlier neighbour is the parent
                (x != 0 && alphabet.inverse(self.last[x]) == l).then(|| self.parent[x] as usize)
            }
            Index::NormalForm(map) => {
                let mut w = self.word_of(x);
                w.push(l);
                map.get(&self.group.reduce_word(&w)).map(|&i| i as usize)
            }
            Index::Buckets { keys, map } => {
                let key = self.group.keys().step(alphabet, &keys[x], l);
                let bucket = map.get(&key)?;
                let mut w = self.word_of(x);
                w.push(l);
                bucket
                    .iter()
                    .find(|&&m| self.group.words_equal(&w, &self.word_of(m as usize)))
                    .map(|&m| m as usize)
            }
        }
    }

    fn word_of(&self, mut i: usize) -> Vec<Letter> {
        let mut w = Vec::with_capacity(self.depth[i] as usize);
        while i != 0 {
            w.push(self.last[i]);
            i = self.parent[i] as usize;
        }
        w.reverse();
        w
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn sphere(&self, n: usize) -> Range<usize> {
        self.sphere_start[n]..self.sphere_start[n + 1]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.radius).map(|n| self.sphere(n).len()).collect()
    }

    /// Word length of element `i`.
    #[inline]
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i] as usize
    }

    /// Shortlex-least geodesic word of element `i`.
    pub fn word(&self, i: usize) -> Vec<Letter> {
        self.word_of(i)
    }

    pub fn element(&self, i: usize) -> GroupElement {
        self.group.element_unchecked(self.word_of(i))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.len()).map(|i| self.element(i))
    }

    /// Parent on the shortlex geodesic (`None` for the identity).
    pub fn parent(&self, i: usize) -> Option<usize> {
        (i != 0).then(|| self.parent[i] as usize)
    }

    /// Right multiplication by a letter, `None` when the product leaves the ball.
    #[inline]
    pub fn step(&self, i: usize, l: Letter) -> Option<usize> {
        let t = self.adjacency[i * self.group.alphabet().len() + l.index()];
        (t != NONE).then_some(t as usize)
    }

    /// Right multiplication by a word along the Cayley graph, staying inside the ball.
    pub fn walk(&self, start: usize, word: &[Letter]) -> Option<usize> {
        word.iter().try_fold(start, |i, &l| self.step(i, l))
    }

    /// Index of the element represented by an arbitrary word, if it lies in the ball.
    pub fn locate(&self, word: &[Letter]) -> Option<usize> {
        match &self.index {
            Index::Walk => self.walk(0, &self.group.reduce_word(word)),
            Index::NormalForm(map) => map
                .get(&self.group.reduce_word(word))
                .map(|&i| i as usize),
            Index::Buckets { map, .. } => {
                if let Some(i) = self.walk(0, word) {
                    return Some(i);
                }
                let reduced = self.group.reduce_word(word);
                if let Some(i) = self.walk(0, &reduced) {
                    return Some(i);
                }
                let key = self.group.keys().key_of(self.group.alphabet(), &reduced);
                map.get(&key)?
                    .iter()
                    .find(|&&m| self.group.words_equal(&reduced, &self.word_of(m as usize)))
                    .map(|&m| m as usize)
            }
        }
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        if g.group_id() != self.group.id() {
            return None;
        }
        self.locate(g.word())
    }

    /// Word length of an arbitrary word. Exact inside the ball and one sphere beyond
    /// it; lengths further out are a resource error for groups without normal forms.
    pub fn word_length(&self, word: &[Letter]) -> Result<usize> {
        if self.group.has_normal_forms() {
            return Ok(self.group.reduce_word(word).len());
        }
        if let Some(i) = self.locate(word) {
            return Ok(self.depth(i));
        }
        let reduced = self.group.reduce_word(word);
        if reduced.len().min(word.len()) <= self.radius + 1 {
            return Ok(self.radius + 1);
        }
        Err(Error::Resource(format!(
            "word of length {} lies outside the radius-{} length table of {}",
            reduced.len(),
            self.radius,
            self.group.name()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_ball_sizes() {
        let g = Group::free(2).unwrap();
        assert_eq!(enumerate_ball(&g, 0).unwrap().len(), 1);
        assert_eq!(enumerate_ball(&g, 1).unwrap().len(), 5);
        let b = enumerate_ball(&g, 2).unwrap();
        assert_eq!(b.len(), 17);
        assert_eq!(b.sphere_sizes(), vec![1, 4, 12]);
    }

    #[test]
    fn shortlex_order() {
        let g = Group::free(2).unwrap();
        let b = enumerate_ball(&g, 2).unwrap();
        let words: Vec<String> = b.elements().map(|e| g.format(&e)).collect();
        assert_eq!(&words[..5], &["1", "a", "a'", "b", "b'"]);
        assert_eq!(&words[5..8], &["aa", "ab", "ab'"]);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Group::free(2).unwrap();
        let err = Ball::build(&g, 6, BallOptions { cap: 100 });
        assert!(matches!(err, Err(Error::Resource(_))));
    }

    #[test]
    fn modular_ball() {
        let g = Group::modular().unwrap();
        let b = enumerate_ball(&g, 3).unwrap();
        // spheres of Z/2 * Z/3 with generators s, t, t': 1, 3, 4, 6
        assert_eq!(b.sphere_sizes(), vec![1, 3, 4, 6]);
    }

    #[test]
    fn surface_ball_and_lookup() {
        let g = Group::surface(2).unwrap();
        let b = enumerate_ball(&g, 3).unwrap();
        assert_eq!(b.sphere_sizes(), vec![1, 8, 56, 392]);
        let r = g.alphabet().parse_word("aba'b'cdc'd'").unwrap();
        assert_eq!(b.locate(&r), Some(0));
        // a·b·a'·b'·c equals d·c'·d' read backwards through the relator
        let w = g.alphabet().parse_word("aba'b'c").unwrap();
        let v = g.alphabet().parse_word("dcd'").unwrap();
        assert_eq!(b.locate(&w), b.locate(&v));
        assert_eq!(b.word_length(&w).unwrap(), 3);
    }

    #[test]
    fn length_beyond_radius() {
        let g = Group::surface(2).unwrap();
        let b = enumerate_ball(&g, 2).unwrap();
        let w = g.alphabet().parse_word("abc").unwrap();
        assert_eq!(b.word_length(&w).unwrap(), 3);
        let far = g.alphabet().parse_word("abcda").unwrap();
        assert!(b.word_length(&far).is_err());
    }
}
