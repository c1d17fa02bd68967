use crate::error::{input, Result};

/// Index of a symbol (a generator or a formal inverse) in an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct LetterInfo {
    name: String,
    generator: usize,
    exponent: i8,
}

/// Ordered symbol set with its inverse pairing.
///
/// Every generator `x` contributes the letter `x` and, unless it is marked
/// self-inverse, the formal inverse `x'` placed right after it. The letter
/// order is the shortlex order used throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    generators: Vec<String>,
    letters: Vec<LetterInfo>,
    inverse: Vec<Letter>,
}

impl Alphabet {
    pub fn new(generators: &[&str], self_inverse: &[bool]) -> Result<Self> {
        if generators.is_empty() {
            return input("alphabet needs at least one generator");
        }
        if self_inverse.len() != generators.len() {
            return input("self-inverse flags must match the generator count");
        }
        let mut letters = Vec::new();
        let mut inverse = Vec::new();
        for (i, name) in generators.iter().enumerate() {
            if name.is_empty()
                || *name == "1"
                || !name.chars().all(|c| c.is_alphanumeric() || c == '_')
            {
                return input(format!("invalid generator name {name:?}"));
            }
            if generators[..i].contains(name) {
                return input(format!("duplicate generator {name:?}"));
            }
            let base = letters.len();
            letters.push(LetterInfo {
                name: name.to_string(),
                generator: i,
                exponent: 1,
            });
            if self_inverse[i] {
                inverse.push(Letter(base as u8));
            } else {
                letters.push(LetterInfo {
                    name: format!("{name}'"),
                    generator: i,
                    exponent: -1,
                });
                inverse.push(Letter(base as u8 + 1));
                inverse.push(Letter(base as u8));
            }
        }
        if letters.len() > u8::MAX as usize {
            return input("alphabet too large");
        }
        Ok(Alphabet {
            generators: generators.iter().map(|s| s.to_string()).collect(),
            letters,
            inverse,
        })
    }

    /// Free-group alphabet on `a, b, c, ...`.
    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return input(format!("free rank {rank} out of range 1..=26"));
        }
        let names: Vec<String> = (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Alphabet::new(&refs, &vec![false; rank])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.letters.len()).map(|i| Letter(i as u8))
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generators
    }

    #[inline]
    pub fn inverse(&self, l: Letter) -> Letter {
        self.inverse[l.index()]
    }

    pub fn is_self_inverse(&self, l: Letter) -> bool {
        self.inverse(l) == l
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.letters[l.index()].name
    }

    pub fn generator_of(&self, l: Letter) -> usize {
        self.letters[l.index()].generator
    }

    pub fn exponent_of(&self, l: Letter) -> i8 {
        self.letters[l.index()].exponent
    }

    /// The positive letter of generator `g`.
    pub fn generator_letter(&self, g: usize) -> Letter {
        let pos = self
            .letters
            .iter()
            .position(|info| info.generator == g && info.exponent == 1)
            .expect("generator index in range");
        Letter(pos as u8)
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.index() < self.letters.len()
    }

    pub fn invert_word(&self, w: &[Letter]) -> Vec<Letter> {
        w.iter().rev().map(|&l| self.inverse(l)).collect()
    }

    /// Parses a word written with apostrophe inverses: `ab'a`, `a b' a`, `x1 x2'`.
    /// The empty string and `1` denote the identity.
    pub fn parse_word(&self, s: &str) -> Result<Vec<Letter>> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for token in s.split_whitespace() {
            let mut rest = token;
            while !rest.is_empty() {
                let gen = self
                    .generators
                    .iter()
                    .enumerate()
                    .filter(|(_, name)| rest.starts_with(name.as_str()))
                    .max_by_key(|(_, name)| name.len());
                let Some((g, name)) = gen else {
                    return input(format!("unknown symbol at {rest:?} in word {s:?}"));
                };
                rest = &rest[name.len()..];
                let mut inverted = false;
                loop {
                    if let Some(r) = rest.strip_prefix('\'') {
                        inverted = !inverted;
                        rest = r;
                    } else if let Some(r) = rest.strip_prefix("⁻¹") {
                        inverted = !inverted;
                        rest = r;
                    } else if let Some(r) = rest.strip_prefix("^-1") {
                        inverted = !inverted;
                        rest = r;
                    } else {
                        break;
                    }
                }
                let l = self.generator_letter(g);
                out.push(if inverted { self.inverse(l) } else { l });
            }
        }
        Ok(out)
    }

    /// Inverse of [`parse_word`](Self::parse_word); the identity formats as the empty string.
    pub fn format_word(&self, w: &[Letter]) -> String {
        let compact = self.generators.iter().all(|g| g.chars().count() == 1);
        let names = w.iter().map(|&l| self.name(l));
        if compact {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(" ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_order_and_inverses() {
        let a = Alphabet::free(2).unwrap();
        let names: Vec<_> = a.letters().map(|l| a.name(l).to_string()).collect();
        assert_eq!(names, ["a", "a'", "b", "b'"]);
        for l in a.letters() {
            assert_ne!(a.inverse(l), l);
            assert_eq!(a.inverse(a.inverse(l)), l);
        }
    }

    #[test]
    fn self_inverse_generators() {
        let a = Alphabet::new(&["s", "t"], &[true, false]).unwrap();
        assert_eq!(a.len(), 3);
        let s = a.parse_word("s").unwrap()[0];
        assert!(a.is_self_inverse(s));
        assert_eq!(a.parse_word("s'").unwrap(), vec![s]);
    }

    #[test]
    fn parse_and_format() {
        let a = Alphabet::free(2).unwrap();
        let w = a.parse_word("a b' a'").unwrap();
        assert_eq!(a.format_word(&w), "ab'a'");
        assert_eq!(a.parse_word("ab'a'").unwrap(), w);
        assert_eq!(a.parse_word("ab⁻¹").unwrap(), a.parse_word("ab'").unwrap());
        assert!(a.parse_word("1").unwrap().is_empty());
        assert!(a.parse_word("ac").is_err());
    }

    #[test]
    fn multichar_generators_use_spaces() {
        let a = Alphabet::new(&["x1", "x2"], &[false, false]).unwrap();
        let w = a.parse_word("x1 x2' x1").unwrap();
        assert_eq!(a.format_word(&w), "x1 x2' x1");
        assert_eq!(a.parse_word("x1x2'x1").unwrap(), w);
    }

    #[test]
    fn rejects_bad_names() {
        assert!(Alphabet::new(&["a", "a"], &[false, false]).is_err());
        assert!(Alphabet::new(&["1"], &[false]).is_err());
        assert!(Alphabet::new(&["a'"], &[false]).is_err());
    }
}
