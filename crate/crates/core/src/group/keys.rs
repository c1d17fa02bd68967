//! Hash keys for small-cancellation elements.
//!
//! Dehn-reduced words are not unique, so ball enumeration buckets candidates by
//! an invariant of the element (equal elements always share a key) and
//! confirms equality inside a bucket with Dehn's algorithm. For genus-two
//! surface relators `[x,y][z,w]` the invariant is the image under a few
//! homomorphisms into SL(2, F_p); otherwise it is the exponent-sum vector
//! when that is well defined.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alphabet::{Alphabet, Letter};

const P: u64 = 2_147_483_647; // 2^31 - 1, congruent to 3 mod 4
const HOMS: usize = 3;

type Mat = [u64; 4];

fn mul(a: &Mat, b: &Mat) -> Mat {
    [
        (a[0] * b[0] + a[1] * b[2]) % P,
        (a[0] * b[1] + a[1] * b[3]) % P,
        (a[2] * b[0] + a[3] * b[2]) % P,
        (a[2] * b[1] + a[3] * b[3]) % P,
    ]
}

fn inv(a: &Mat) -> Mat {
    // det = 1
    [a[3], (P - a[1]) % P, (P - a[2]) % P, a[0]]
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat {
    loop {
        let a = rng.gen_range(1..P);
        let b = rng.gen_range(0..P);
        let c = rng.gen_range(0..P);
        // d = (1 + b c) / a
        let d = (1 + b * c % P) % P * pow_mod(a, P - 2) % P;
        let m = [a, b, c, d];
        if m != [1, 0, 0, 1] {
            return m;
        }
    }
}

#[derive(Clone, Debug)]
pub enum KeyScheme {
    /// Images in SL(2, F_p) under several representations; `images[h][letter]`.
    Sl2 { images: Vec<Vec<Mat>> },
    /// Exponent sum of each generator; an invariant when every relator has zero exponent sums.
    ExponentSum,
    /// No usable invariant: a single bucket.
    Trivial,
}

impl KeyScheme {
    pub fn for_relators(alphabet: &Alphabet, relators: &[Vec<Letter>]) -> KeyScheme {
        if relators.len() == 1 {
            if let Some(quad) = commutator_pair_shape(alphabet, &relators[0]) {
                return KeyScheme::sl2(alphabet, quad);
            }
        }
        let balanced = relators.iter().all(|r| {
            let mut sums = vec![0i64; alphabet.generator_count()];
            for &l in r {
                sums[alphabet.generator_of(l)] += alphabet.exponent_of(l) as i64;
            }
            sums.iter().all(|&s| s == 0)
        });
        if balanced {
            KeyScheme::ExponentSum
        } else {
            KeyScheme::Trivial
        }
    }

    fn sl2(alphabet: &Alphabet, quad: [Letter; 4]) -> KeyScheme {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_5u64);
        let mut images = Vec::with_capacity(HOMS);
        while images.len() < HOMS {
            let a = random_sl2(&mut rng);
            let b = random_sl2(&mut rng);
            // [B, A] = B A B^-1 A^-1; X = alpha I + beta [B,A] commutes with it.
            let m = mul(&mul(&b, &a), &mul(&inv(&b), &inv(&a)));
            let t = (m[0] + m[3]) % P;
            let beta = rng.gen_range(1..P);
            let disc = (beta * beta % P * t % P * t % P + 4 * (P + 1 - beta * beta % P)) % P;
            let s = pow_mod(disc, (P + 1) / 4);
            if s * s % P != disc {
                continue;
            }
            let half = pow_mod(2, P - 2);
            let alpha = (s + P - beta * t % P) % P * half % P;
            let x = [
                (alpha + beta * m[0]) % P,
                beta * m[1] % P,
                beta * m[2] % P,
                (alpha + beta * m[3]) % P,
            ];
            let c = mul(&mul(&x, &b), &inv(&x));
            let d = mul(&mul(&x, &a), &inv(&x));
            // letter images: x -> A, y -> B, z -> C, w -> D
            let mut per_gen: Vec<Option<Mat>> = vec![None; alphabet.generator_count()];
            for (l, img) in quad.iter().zip([a, b, c, d]) {
                let g = alphabet.generator_of(*l);
                per_gen[g] = Some(if alphabet.exponent_of(*l) == 1 { img } else { inv(&img) });
            }
            let per_letter = alphabet
                .letters()
                .map(|l| {
                    let g = per_gen[alphabet.generator_of(l)].expect("all generators covered");
                    if alphabet.exponent_of(l) == 1 {
                        g
                    } else {
                        inv(&g)
                    }
                })
                .collect();
            images.push(per_letter);
        }
        KeyScheme::Sl2 { images }
    }

    pub fn identity_key(&self, alphabet: &Alphabet) -> Vec<u64> {
        match self {
            KeyScheme::Sl2 { images } => images.iter().flat_map(|_| [1, 0, 0, 1]).collect(),
            KeyScheme::ExponentSum => vec![0; alphabet.generator_count()],
            KeyScheme::Trivial => Vec::new(),
        }
    }

    pub fn step(&self, alphabet: &Alphabet, key: &[u64], l: Letter) -> Vec<u64> {
        match self {
            KeyScheme::Sl2 { images } => {
                let mut out = Vec::with_capacity(key.len());
                for (h, img) in images.iter().enumerate() {
                    let cur: Mat = key[4 * h..4 * h + 4].try_into().expect("4 entries");
                    out.extend_from_slice(&mul(&cur, &img[l.index()]));
                }
                out
            }
            KeyScheme::ExponentSum => {
                let mut out = key.to_vec();
                let g = alphabet.generator_of(l);
                out[g] = out[g].wrapping_add(alphabet.exponent_of(l) as i64 as u64);
                out
            }
            KeyScheme::Trivial => Vec::new(),
        }
    }

    pub fn key_of(&self, alphabet: &Alphabet, word: &[Letter]) -> Vec<u64> {
        word.iter()
            .fold(self.identity_key(alphabet), |k, &l| self.step(alphabet, &k, l))
    }
}

/// Recognizes `x y x' y' z w z' w'` on four distinct generators.
fn commutator_pair_shape(alphabet: &Alphabet, r: &[Letter]) -> Option<[Letter; 4]> {
    if r.len() != 8 {
        return None;
    }
    let inv = |l: Letter| alphabet.inverse(l);
    let [x, y, xi, yi, z, w, zi, wi] = [r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7]];
    if xi != inv(x) || yi != inv(y) || zi != inv(z) || wi != inv(w) {
        return None;
    }
    let gens = [x, y, z, w].map(|l| alphabet.generator_of(l));
    for i in 0..4 {
        if alphabet.is_self_inverse([x, y, z, w][i]) {
            return None;
        }
        for j in i + 1..4 {
            if gens[i] == gens[j] {
                return None;
            }
        }
    }
    Some([x, y, z, w])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_relator_maps_to_identity() {
        let a = Alphabet::new(&["a", "b", "c", "d"], &[false; 4]).unwrap();
        let r = a.parse_word("aba'b'cdc'd'").unwrap();
        let scheme = KeyScheme::for_relators(&a, &[r.clone()]);
        assert!(matches!(scheme, KeyScheme::Sl2 { .. }));
        assert_eq!(scheme.key_of(&a, &r), scheme.identity_key(&a));
        // generators are separated
        let keys: Vec<_> = a.letters().map(|l| scheme.key_of(&a, &[l])).collect();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                assert_ne!(keys[i], keys[j]);
            }
        }
    }

    #[test]
    fn unbalanced_relators_fall_back() {
        let a = Alphabet::new(&["a", "b"], &[false; 2]).unwrap();
        let r = a.parse_word("aaabbb").unwrap();
        assert!(matches!(KeyScheme::for_relators(&a, &[r]), KeyScheme::Trivial));
    }
}
