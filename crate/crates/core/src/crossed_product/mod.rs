//! The algebraic crossed product `C(∂F) ⋊ F` with locally constant coefficients,
//! its Busemann flow, the state `ω_μ` and the KMS condition.

mod kms;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::{One, Zero};

pub use kms::{
    kms_check, kms_scan, nonvanishing_certificate, FlowParameter, KmsReport, KmsScan,
    NonVanishingReport, NonVanishingRow,
};

use crate::boundary::{Cylinder, FreeBoundary};
use crate::error::Result;
use crate::group::{free_reduce, GroupElement, Letter};
use crate::Rational;

/// Scalars for step-function coefficients.
pub trait Coefficient:
    Clone + PartialEq + fmt::Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> + Send + Sync
{
    fn conj(&self) -> Self;
}

impl Coefficient for Rational {
    fn conj(&self) -> Self {
        *self
    }
}

impl Coefficient for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

/// A locally constant function on the boundary: values on the cylinders of one
/// depth, zero on cylinders not listed. Depth 0 stores a constant under the empty word.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<T> {
    depth: usize,
    values: BTreeMap<Vec<Letter>, T>,
}

impl<T: Coefficient> StepFunction<T> {
    pub fn zero() -> Self {
        StepFunction {
            depth: 0,
            values: BTreeMap::new(),
        }
    }

    pub fn constant(v: T) -> Self {
        let mut values = BTreeMap::new();
        if !v.is_zero() {
            values.insert(Vec::new(), v);
        }
        StepFunction { depth: 0, values }
    }

    /// `v·1_{C_w}`.
    pub fn indicator(cyl: &Cylinder, v: T) -> Self {
        let mut values = BTreeMap::new();
        if !v.is_zero() {
            values.insert(cyl.prefix().to_vec(), v);
        }
        StepFunction {
            depth: cyl.depth(),
            values,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Nonzero cylinder values in shortlex-by-letter order.
    pub fn entries(&self) -> impl Iterator<Item = (&[Letter], &T)> {
        self.values.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Value on a cylinder of depth at least `self.depth()`.
    pub fn value_at(&self, prefix: &[Letter]) -> T {
        self.values
            .get(&prefix[..self.depth.min(prefix.len())])
            .cloned()
            .unwrap_or_else(T::zero)
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        let values = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        StepFunction {
            depth: self.depth,
            values,
        }
    }
}

/// A finite sum `Σ φ_g·g`, with no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement<T> {
    terms: BTreeMap<GroupElement, StepFunction<T>>,
}

impl<T: Coefficient> CrossedElement<T> {
    pub fn zero() -> Self {
        CrossedElement {
            terms: BTreeMap::new(),
        }
    }

    /// Coefficients should be in coarsest form (see [`CrossedAlgebra::canonical`])
    /// for `==` to mean equality of elements.
    pub fn monomial(phi: StepFunction<T>, g: GroupElement) -> Self {
        let mut terms = BTreeMap::new();
        if !phi.is_zero() {
            terms.insert(g, phi);
        }
        CrossedElement { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &StepFunction<T>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &GroupElement) -> Option<&StepFunction<T>> {
        self.terms.get(g)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Step-function and crossed-product arithmetic over a free-group boundary.
#[derive(Clone, Debug)]
pub struct CrossedAlgebra {
    boundary: FreeBoundary,
}

impl CrossedAlgebra {
    pub fn new(boundary: FreeBoundary) -> Self {
        CrossedAlgebra { boundary }
    }

    pub fn boundary(&self) -> &FreeBoundary {
        &self.boundary
    }

    /// `1_{∂F}·1`.
    pub fn unit<T: Coefficient>(&self) -> CrossedElement<T> {
        CrossedElement::monomial(StepFunction::constant(T::one()), self.boundary.group().identity())
    }

    /// Reduced extensions of `w` to length `depth`.
    fn extensions(&self, w: &[Letter], depth: usize) -> Vec<Vec<Letter>> {
        let a = self.boundary.group().alphabet();
        let mut level = vec![w.to_vec()];
        for _ in w.len()..depth {
            level = level
                .into_iter()
                .flat_map(|v| {
                    a.letters()
                        .filter(|&l| v.last().is_none_or(|&p| a.inverse(p) != l))
                        .map(|l| {
                            let mut x = v.clone();
                            x.push(l);
                            x
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        level
    }

    /// The same function on cylinders of a larger depth.
    pub fn refine<T: Coefficient>(&self, f: &StepFunction<T>, depth: usize) -> StepFunction<T> {
        if depth <= f.depth {
            return f.clone();
        }
        let mut values = BTreeMap::new();
        for (w, v) in &f.values {
            for x in self.extensions(w, depth) {
                values.insert(x, v.clone());
            }
        }
        StepFunction { depth, values }
    }

    /// The coarsest depth representing the same function.
    pub fn canonical<T: Coefficient>(&self, f: &StepFunction<T>) -> StepFunction<T> {
        let letters = self.boundary.group().alphabet().len();
        let mut f = f.clone();
        f.values.retain(|_, v| !v.is_zero());
        if f.values.is_empty() {
            return StepFunction::zero();
        }
        while f.depth > 0 {
            let children = if f.depth == 1 { letters } else { letters - 1 };
            let mut parents: BTreeMap<Vec<Letter>, (usize, T)> = BTreeMap::new();
            let mut uniform = true;
            for (w, v) in &f.values {
                let p = w[..w.len() - 1].to_vec();
                match parents.get_mut(&p) {
                    Some((n, u)) if u == v => *n += 1,
                    Some(_) => {
                        uniform = false;
                        break;
                    }
                    None => {
                        parents.insert(p, (1, v.clone()));
                    }
                }
            }
            if !uniform || parents.values().any(|(n, _)| *n != children) {
                break;
            }
            f = StepFunction {
                depth: f.depth - 1,
                values: parents.into_iter().map(|(p, (_, v))| (p, v)).collect(),
            };
        }
        f
    }

    pub fn add_functions<T: Coefficient>(&self, f: &StepFunction<T>, g: &StepFunction<T>) -> StepFunction<T> {
        let depth = f.depth.max(g.depth);
        let mut out = self.refine(f, depth);
        for (w, v) in self.refine(g, depth).values {
            let e = out.values.entry(w).or_insert_with(T::zero);
            *e = e.clone() + v;
        }
        self.canonical(&out)
    }

    pub fn multiply_functions<T: Coefficient>(&self, f: &StepFunction<T>, g: &StepFunction<T>) -> StepFunction<T> {
        let depth = f.depth.max(g.depth);
        let (f, g) = (self.refine(f, depth), self.refine(g, depth));
        let values = f
            .values
            .iter()
            .filter_map(|(w, v)| {
                let p = v.clone() * g.values.get(w)?.clone();
                (!p.is_zero()).then(|| (w.clone(), p))
            })
            .collect();
        self.canonical(&StepFunction { depth, values })
    }

    /// `(g.ψ)(ξ) = ψ(g⁻¹ξ)`: each cylinder is split to depth `|w| + |g|` so that
    /// `g` maps every piece onto a cylinder, then everything is refined to `|w| + 2|g|`.
    pub fn translate<T: Coefficient>(&self, g: &GroupElement, f: &StepFunction<T>) -> StepFunction<T> {
        if g.is_empty() || f.depth == 0 {
            return f.clone();
        }
        let a = self.boundary.group().alphabet();
        let depth = f.depth + 2 * g.len();
        let mut values = BTreeMap::new();
        for (w, v) in &f.values {
            for piece in self.extensions(w, w.len() + g.len()) {
                let mut raw = g.word().to_vec();
                raw.extend_from_slice(&piece);
                let image = free_reduce(a, &raw);
                for x in self.extensions(&image, depth) {
                    values.insert(x, v.clone());
                }
            }
        }
        self.canonical(&StepFunction { depth, values })
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: &StepFunction<Rational>) -> Rational {
        f.values
            .iter()
            .map(|(w, v)| {
                if w.is_empty() {
                    *v
                } else {
                    *v * self.boundary.cylinder_measure(&self.boundary.cylinder(w).expect("stored prefixes are reduced"))
                }
            })
            .sum()
    }

    pub fn add<T: Coefficient>(&self, x: &CrossedElement<T>, y: &CrossedElement<T>) -> CrossedElement<T> {
        let mut terms = x.terms.clone();
        for (g, f) in &y.terms {
            let sum = match terms.get(g) {
                Some(e) => self.add_functions(e, f),
                None => f.clone(),
            };
            if sum.is_zero() {
                terms.remove(g);
            } else {
                terms.insert(g.clone(), sum);
            }
        }
        CrossedElement { terms }
    }

    /// `(φg)(ψh) = φ(g.ψ)gh`, extended bilinearly.
    pub fn multiply<T: Coefficient>(&self, x: &CrossedElement<T>, y: &CrossedElement<T>) -> Result<CrossedElement<T>> {
        let group = self.boundary.group();
        let mut out = CrossedElement::zero();
        for (g, phi) in &x.terms {
            group.check_member(g)?;
            for (h, psi) in &y.terms {
                group.check_member(h)?;
                let coeff = self.multiply_functions(phi, &self.translate(g, psi));
                let term = CrossedElement::monomial(coeff, group.multiply(g, h)?);
                out = self.add(&out, &term);
            }
        }
        Ok(out)
    }

    /// `(φg)* = (g⁻¹.φ̄)·g⁻¹`.
    pub fn adjoint<T: Coefficient>(&self, x: &CrossedElement<T>) -> CrossedElement<T> {
        let group = self.boundary.group();
        let mut out = CrossedElement::zero();
        for (g, phi) in &x.terms {
            let gi = group.invert(g);
            let coeff = self.translate(&gi, &phi.map(T::conj));
            out = self.add(&out, &CrossedElement::monomial(coeff, gi));
        }
        out
    }

    /// `ω_μ(Σφ_g g) = ∫ φ_1 dμ`.
    pub fn state(&self, x: &CrossedElement<Rational>) -> Rational {
        x.terms
            .get(&self.boundary.group().identity())
            .map(|f| self.integrate(f))
            .unwrap_or_else(Rational::zero)
    }

    /// `ω_μ(xy)` from the identity component only: `Σ_g ∫ φ_g·(g.ψ_{g⁻¹}) dμ`.
    pub fn state_of_product(&self, x: &CrossedElement<Rational>, y: &CrossedElement<Rational>) -> Rational {
        let group = self.boundary.group();
        x.terms
            .iter()
            .filter_map(|(g, phi)| {
                let psi = y.terms.get(&group.invert(g))?;
                Some(self.integrate(&self.multiply_functions(phi, &self.translate(g, psi))))
            })
            .sum()
    }

    /// Real-valued coefficients as complex ones.
    pub fn complexify(&self, x: &CrossedElement<Rational>) -> CrossedElement<Complex64> {
        let terms = x
            .terms
            .iter()
            .map(|(g, f)| {
                let values = f
                    .values
                    .iter()
                    .map(|(w, v)| (w.clone(), Complex64::new(to_f64(v), 0.0)))
                    .collect();
                (g.clone(), StepFunction { depth: f.depth, values })
            })
            .collect();
        CrossedElement { terms }
    }

    /// Display form: `φ_g·g` terms with cylinder values, for reports.
    pub fn describe<T: Coefficient + fmt::Display>(&self, x: &CrossedElement<T>) -> String {
        let group = self.boundary.group();
        let a = group.alphabet();
        if x.is_zero() {
            return "0".into();
        }
        x.terms
            .iter()
            .map(|(g, f)| {
                let coeff: Vec<String> = f
                    .values
                    .iter()
                    .map(|(w, v)| {
                        if w.is_empty() {
                            format!("{v}")
                        } else {
                            format!("{v}·1[{}]", a.format_word(w))
                        }
                    })
                    .collect();
                format!("({})·{}", coeff.join(" + "), group.format(g))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub(crate) fn to_f64(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
