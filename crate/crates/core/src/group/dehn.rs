//! Dehn's algorithm for C′(1/6) presentations.

use super::alphabet::{Alphabet, Letter};

/// Cancels adjacent letter/inverse pairs.
pub fn free_reduce(alphabet: &Alphabet, word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last().is_some_and(|&p| alphabet.inverse(p) == l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn is_cyclically_reduced(alphabet: &Alphabet, word: &[Letter]) -> bool {
    free_reduce(alphabet, word).len() == word.len()
        && match (word.first(), word.last()) {
            (Some(&f), Some(&l)) => word.len() == 1 || alphabet.inverse(l) != f,
            _ => true,
        }
}

/// Every cyclic conjugate of every relator and of its inverse.
#[derive(Clone, Debug)]
pub struct RelatorFamily {
    words: Vec<Vec<Letter>>,
    min_len: usize,
}

impl RelatorFamily {
    pub fn new(alphabet: &Alphabet, relators: &[Vec<Letter>]) -> Self {
        let mut words: Vec<Vec<Letter>> = Vec::new();
        for r in relators {
            for w in [r.clone(), alphabet.invert_word(r)] {
                for shift in 0..w.len() {
                    let mut c = w[shift..].to_vec();
                    c.extend_from_slice(&w[..shift]);
                    if !words.contains(&c) {
                        words.push(c);
                    }
                }
            }
        }
        let min_len = relators.iter().map(Vec::len).min().unwrap_or(0);
        RelatorFamily { words, min_len }
    }

    pub fn words(&self) -> &[Vec<Letter>] {
        &self.words
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    /// Longest piece: the longest common prefix of two distinct family members.
    pub fn max_piece(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.words.iter().enumerate() {
            for b in &self.words[i + 1..] {
                let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                best = best.max(common);
            }
        }
        best
    }

    /// Free reduction followed by greedy replacement of more-than-half relator
    /// subwords by the shorter complement, repeated to a fixed point.
    pub fn reduce(&self, alphabet: &Alphabet, word: &[Letter]) -> Vec<Letter> {
        let mut w = free_reduce(alphabet, word);
        while let Some((pos, rel, len)) = self.find_long_match(&w) {
            let r = &self.words[rel];
            let replacement = alphabet.invert_word(&r[len..]);
            let mut next = Vec::with_capacity(w.len() + replacement.len() - len);
            next.extend_from_slice(&w[..pos]);
            next.extend_from_slice(&replacement);
            next.extend_from_slice(&w[pos + len..]);
            w = free_reduce(alphabet, &next);
        }
        w
    }

    pub fn is_trivial(&self, alphabet: &Alphabet, word: &[Letter]) -> bool {
        self.reduce(alphabet, word).is_empty()
    }

    fn find_long_match(&self, w: &[Letter]) -> Option<(usize, usize, usize)> {
        for pos in 0..w.len() {
            let mut best: Option<(usize, usize)> = None;
            for (idx, r) in self.words.iter().enumerate() {
                let m = w[pos..].iter().zip(r).take_while(|(a, b)| a == b).count();
                if 2 * m > r.len() && best.is_none_or(|(_, bm)| m > bm) {
                    best = Some((idx, m));
                }
            }
            if let Some((idx, m)) = best {
                return Some((pos, idx, m));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface() -> (Alphabet, RelatorFamily) {
        let a = Alphabet::new(&["a", "b", "c", "d"], &[false; 4]).unwrap();
        let r = a.parse_word("aba'b'cdc'd'").unwrap();
        let fam = RelatorFamily::new(&a, &[r]);
        (a, fam)
    }

    #[test]
    fn family_has_sixteen_conjugates() {
        let (_, fam) = surface();
        assert_eq!(fam.words().len(), 16);
        assert_eq!(fam.max_piece(), 1);
        assert_eq!(fam.min_len(), 8);
    }

    #[test]
    fn relator_and_conjugates_reduce_to_identity() {
        let (a, fam) = surface();
        for w in fam.words() {
            assert!(fam.is_trivial(&a, w));
        }
        let w = a.parse_word("a c aba'b'cdc'd' c' a'").unwrap();
        assert!(fam.is_trivial(&a, &w));
    }

    #[test]
    fn long_subword_is_shortened() {
        let (a, fam) = surface();
        // five letters of the relator become the inverse of the remaining three
        let w = a.parse_word("aba'b'c").unwrap();
        assert_eq!(fam.reduce(&a, &w), a.parse_word("dcd'").unwrap());
    }

    #[test]
    fn generators_are_not_trivial() {
        let (a, fam) = surface();
        for l in a.letters() {
            assert!(!fam.is_trivial(&a, &[l]));
        }
    }
}
