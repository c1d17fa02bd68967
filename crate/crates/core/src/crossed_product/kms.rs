use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use super::{CrossedAlgebra, CrossedElement, StepFunction};
use crate::error::{input, Error, Result};
use crate::group::{Ball, GroupElement, Letter};
use crate::Rational;

/// Flow time: real `t`, or imaginary `iβ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowParameter {
    Real(f64),
    Imaginary(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KmsReport {
    pub beta: f64,
    /// `β = m·D`.
    pub multiple: i64,
    /// `ω(B·σ_{iβ}(A))`.
    pub lhs: Rational,
    /// `ω(A·B)`.
    pub rhs: Rational,
}

impl KmsReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KmsScan {
    pub radius: usize,
    pub depth: usize,
    pub multiple: i64,
    pub pairs: u64,
    /// Pairs whose group parts are mutually inverse, so both sides can be nonzero.
    pub paired: u64,
    pub failures: u64,
    /// `(A, B, lhs, rhs)` for the first failing pair in scan order.
    pub first_failure: Option<(String, String, Rational, Rational)>,
}

impl KmsScan {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonVanishingRow {
    pub g: GroupElement,
    pub plus: i64,
    pub minus: i64,
    pub translation_length: usize,
}

impl NonVanishingRow {
    pub fn holds(&self) -> bool {
        self.plus > 0 && self.minus < 0 && self.plus == self.translation_length as i64 && self.minus == -self.plus
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonVanishingReport {
    pub rows: Vec<NonVanishingRow>,
    pub note: &'static str,
}

impl NonVanishingReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds()).count()
    }
}

/// `b(g)` on a cylinder of depth at least `|g|`.
fn busemann_on(g: &[Letter], prefix: &[Letter]) -> i64 {
    let common = g.iter().zip(prefix).take_while(|(x, y)| x == y).count();
    2 * common as i64 - g.len() as i64
}

impl CrossedAlgebra {
    /// `D = log(2k − 1)`.
    pub fn critical_temperature(&self) -> f64 {
        self.boundary.measure().dimension()
    }

    /// The integer `m` with `β = m·D`, or an input error.
    pub fn temperature_multiple(&self, beta: f64) -> Result<i64> {
        let d = self.critical_temperature();
        if !beta.is_finite() || d <= 0.0 {
            return input(format!("inverse temperature {beta} is not usable"));
        }
        let m = (beta / d).round();
        if (beta - m * d).abs() > 1e-9 * beta.abs().max(1.0) {
            return input(format!(
                "β = {beta} is not an integer multiple of D = {d}; exact evaluation needs β = m·D, use float mode otherwise"
            ));
        }
        Ok(m as i64)
    }

    /// `σ_{iβ}` at `β = m·D`: the `g`-term is multiplied by `(2k−1)^{−m·b(g)}`,
    /// which is constant on cylinders of depth `|g| + 1`.
    pub fn flow_exact(&self, x: &CrossedElement<Rational>, m: i64) -> Result<CrossedElement<Rational>> {
        let base = self.boundary.measure().base();
        let mut terms = BTreeMap::new();
        for (g, phi) in &x.terms {
            let f = self.refine(phi, phi.depth().max(g.len() + 1));
            let mut values = BTreeMap::new();
            for (w, v) in &f.values {
                let e = -m * busemann_on(g.word(), w);
                if e.abs() > 60 {
                    return Err(Error::Numeric(format!("flow factor exponent {e} overflows exact arithmetic")));
                }
                let factor = Rational::from_integer(base).pow(e as i32);
                values.insert(w.clone(), *v * factor);
            }
            terms.insert(g.clone(), self.canonical(&StepFunction { depth: f.depth(), values }));
        }
        Ok(CrossedElement { terms })
    }

    /// `σ_{iβ}` for `β` given as a real number; it must be a multiple of `D`.
    pub fn flow_at_beta(&self, x: &CrossedElement<Rational>, beta: f64) -> Result<CrossedElement<Rational>> {
        let m = self.temperature_multiple(beta)?;
        self.flow_exact(x, m)
    }

    /// Float-mode flow: `e^{itb(g)}` for real `t`, `e^{−βb(g)}` for `iβ`.
    pub fn apply_flow(&self, x: &CrossedElement<Rational>, s: FlowParameter) -> Result<CrossedElement<Complex64>> {
        let factor = |b: i64| match s {
            FlowParameter::Real(t) => Complex64::from_polar(1.0, t * b as f64),
            FlowParameter::Imaginary(beta) => Complex64::new((-beta * b as f64).exp(), 0.0),
        };
        let (FlowParameter::Real(v) | FlowParameter::Imaginary(v)) = s;
        {
            if !v.is_finite() {
                return input(format!("flow parameter {v} is not finite"));
            }
        }
        let complex = self.complexify(x);
        let mut terms = BTreeMap::new();
        for (g, phi) in &complex.terms {
            let f = self.refine(phi, phi.depth().max(g.len() + 1));
            let values = f
                .values
                .iter()
                .map(|(w, v)| (w.clone(), *v * factor(busemann_on(g.word(), w))))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            terms.insert(g.clone(), self.canonical(&StepFunction { depth: f.depth(), values }));
        }
        Ok(CrossedElement { terms })
    }
}

/// Compare `ω(B·σ_{iβ}(A))` with `ω(AB)` exactly.
pub fn kms_check(
    alg: &CrossedAlgebra,
    a: &CrossedElement<Rational>,
    b: &CrossedElement<Rational>,
    beta: f64,
) -> Result<KmsReport> {
    let m = alg.temperature_multiple(beta)?;
    let flowed = alg.flow_exact(a, m)?;
    Ok(KmsReport {
        beta,
        multiple: m,
        lhs: alg.state_of_product(b, &flowed),
        rhs: alg.state_of_product(a, b),
    })
}

/// All pairs of monomials `1_{C_w}·g` with `|g| ≤ radius` and `|w| = depth`, at `β = m·D`.
pub fn kms_scan(alg: &CrossedAlgebra, radius: usize, depth: usize, m: i64) -> Result<KmsScan> {
    if depth == 0 {
        return input("cylinder depth must be at least 1");
    }
    let group = alg.boundary().group().clone();
    let ball = crate::group::enumerate_ball(&group, radius)?;
    let one = Rational::from_integer(1);
    let monomials: Vec<CrossedElement<Rational>> = ball
        .elements()
        .flat_map(|g| {
            alg.boundary()
                .cylinders(depth)
                .into_iter()
                .map(move |c| CrossedElement::monomial(StepFunction::indicator(&c, one), g.clone()))
        })
        .collect();
    let flowed = monomials
        .iter()
        .map(|a| alg.flow_exact(a, m))
        .collect::<Result<Vec<_>>>()?;
    let group_of = |x: &CrossedElement<Rational>| x.terms.keys().next().cloned().expect("monomials are nonzero");
    let inverses: Vec<GroupElement> = monomials.iter().map(|x| group.invert(&group_of(x))).collect();

    let per_a: Vec<(u64, u64, Option<(usize, usize, Rational, Rational)>)> = (0..monomials.len())
        .into_par_iter()
        .map(|i| {
            let mut paired = 0;
            let mut failures = 0;
            let mut first = None;
            for (j, b) in monomials.iter().enumerate() {
                let (lhs, rhs) = if group_of(b) == inverses[i] {
                    paired += 1;
                    (
                        alg.state_of_product(b, &flowed[i]),
                        alg.state_of_product(&monomials[i], b),
                    )
                } else {
                    (Rational::zero(), Rational::zero())
                };
                if lhs != rhs {
                    failures += 1;
                    if first.is_none() {
                        first = Some((i, j, lhs, rhs));
                    }
                }
            }
            (paired, failures, first)
        })
        .collect();

    let n = monomials.len() as u64;
    let mut scan = KmsScan {
        radius,
        depth,
        multiple: m,
        pairs: n * n,
        paired: 0,
        failures: 0,
        first_failure: None,
    };
    for (paired, failures, first) in per_a {
        scan.paired += paired;
        scan.failures += failures;
        if scan.first_failure.is_none() {
            scan.first_failure = first.map(|(i, j, l, r)| (alg.describe(&monomials[i]), alg.describe(&monomials[j]), l, r));
        }
    }
    Ok(scan)
}

/// Sign certificate for `b(g)` at the fixed points of every nontrivial `g` in the ball.
pub fn nonvanishing_certificate(alg: &CrossedAlgebra, ball: &Ball) -> Result<NonVanishingReport> {
    let bd = alg.boundary();
    if !ball.group().is_torsion_free() {
        return Err(Error::Unsupported("the group has torsion".into()));
    }
    if ball.group().id() != bd.group().id() {
        return input("ball and boundary belong to different groups");
    }
    let mut rows = Vec::new();
    for g in ball.elements().filter(|g| !g.is_empty()) {
        let (plus, minus, len) = bd.fixed_points(&g)?;
        rows.push(NonVanishingRow {
            plus: bd.busemann(&g, &plus)?,
            minus: bd.busemann(&g, &minus)?,
            translation_length: len,
            g,
        });
    }
    Ok(NonVanishingReport {
        rows,
        note: "b(g) is nonzero at both fixed points of every listed g; this supports, but does not prove, uniqueness of the KMS state",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::FreeBoundary;
    use crate::group::Group;

    fn alg(k: usize) -> CrossedAlgebra {
        CrossedAlgebra::new(FreeBoundary::new(&Group::free(k).unwrap()).unwrap())
    }

    fn mono(alg: &CrossedAlgebra, w: &str, g: &str) -> CrossedElement<Rational> {
        let group = alg.boundary().group();
        let cyl = alg.boundary().cylinder(&group.alphabet().parse_word(w).unwrap()).unwrap();
        CrossedElement::monomial(StepFunction::indicator(&cyl, Rational::from_integer(1)), group.parse(g).unwrap())
    }

    #[test]
    fn flow_on_worked_monomial() {
        let alg = alg(2);
        let x = mono(&alg, "a", "a");
        let f = alg.flow_exact(&x, 1).unwrap();
        let coeff = f.coefficient(&alg.boundary().group().parse("a").unwrap()).unwrap();
        let al = alg.boundary().group().alphabet();
        for w in ["aa", "ab", "ab'"] {
            assert_eq!(coeff.value_at(&al.parse_word(w).unwrap()), Rational::new(1, 3));
        }
        assert_eq!(coeff.value_at(&al.parse_word("ba").unwrap()), Rational::zero());
        assert_eq!(alg.flow_exact(&x, 0).unwrap(), alg.flow_exact(&alg.flow_exact(&x, 0).unwrap(), 0).unwrap());
    }

    #[test]
    fn worked_kms_pair() {
        let alg = alg(2);
        let d = alg.critical_temperature();
        let a = mono(&alg, "a", "a");
        let b = mono(&alg, "aa", "a'");
        let r = kms_check(&alg, &a, &b, d).unwrap();
        assert_eq!((r.lhs, r.rhs), (Rational::new(1, 36), Rational::new(1, 36)));
        let r = kms_check(&alg, &a, &b, 2.0 * d).unwrap();
        assert_eq!(r.lhs, Rational::new(1, 108));
        assert!(!r.holds());
        let one = alg.unit::<Rational>();
        let r = kms_check(&alg, &one, &one, d).unwrap();
        assert_eq!((r.lhs, r.rhs), (Rational::from_integer(1), Rational::from_integer(1)));
        assert!(kms_check(&alg, &a, &b, 1.0).is_err());
    }

    #[test]
    fn small_scan_holds_only_at_d() {
        let alg = alg(2);
        let s = kms_scan(&alg, 1, 2, 1).unwrap();
        assert!(s.holds());
        assert_eq!(s.pairs, 60 * 60);
        let s = kms_scan(&alg, 1, 2, 2).unwrap();
        assert!(s.failures > 0);
    }

    #[test]
    fn flow_is_multiplicative_and_additive() {
        let alg = alg(2);
        let x = mono(&alg, "ab", "ab'");
        let y = mono(&alg, "b'", "ba");
        let xy = alg.multiply(&x, &y).unwrap();
        for m in [-1, 1, 2] {
            let lhs = alg.flow_exact(&xy, m).unwrap();
            let rhs = alg
                .multiply(&alg.flow_exact(&x, m).unwrap(), &alg.flow_exact(&y, m).unwrap())
                .unwrap();
            assert_eq!(normalize(&alg, &lhs, &rhs).0, normalize(&alg, &lhs, &rhs).1);
        }
        let two = alg.flow_exact(&alg.flow_exact(&x, 1).unwrap(), 1).unwrap();
        let direct = alg.flow_exact(&x, 2).unwrap();
        let (p, q) = normalize(&alg, &two, &direct);
        assert_eq!(p, q);
    }

    /// Refine matching terms to a common depth so structural equality is value equality.
    fn normalize(
        alg: &CrossedAlgebra,
        x: &CrossedElement<Rational>,
        y: &CrossedElement<Rational>,
    ) -> (CrossedElement<Rational>, CrossedElement<Rational>) {
        let mut xs = x.clone();
        let mut ys = y.clone();
        for (g, f) in x.terms() {
            if let Some(h) = y.coefficient(g) {
                let d = f.depth().max(h.depth());
                xs.terms.insert(g.clone(), alg.refine(f, d));
                ys.terms.insert(g.clone(), alg.refine(h, d));
            }
        }
        (xs, ys)
    }

    #[test]
    fn real_flow_is_unitary_and_trivial_at_zero() {
        let alg = alg(2);
        let x = mono(&alg, "a", "ab");
        let z = alg.apply_flow(&x, FlowParameter::Real(0.0)).unwrap();
        for (_, f) in z.terms() {
            for (_, v) in f.entries() {
                assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            }
        }
        let z = alg.apply_flow(&x, FlowParameter::Real(0.7)).unwrap();
        for (_, f) in z.terms() {
            for (_, v) in f.entries() {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
        let d = alg.critical_temperature();
        let z = alg.apply_flow(&x, FlowParameter::Imaginary(d)).unwrap();
        let e = alg.complexify(&alg.flow_exact(&x, 1).unwrap());
        for ((_, f), (_, h)) in z.terms().zip(e.terms()) {
            for ((_, v), (_, w)) in f.entries().zip(h.entries()) {
                assert!((v - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn nonvanishing_on_radius_three() {
        let alg = alg(2);
        let ball = crate::group::enumerate_ball(alg.boundary().group(), 3).unwrap();
        let r = nonvanishing_certificate(&alg, &ball).unwrap();
        assert_eq!(r.rows.len(), ball.len() - 1);
        assert_eq!(r.failures(), 0);
        let g = alg.boundary().group().parse("ab").unwrap();
        let row = r.rows.iter().find(|row| row.g == g).unwrap();
        assert_eq!(row.plus, 2);
    }
}
