//! Admissible metrics on group models: word and tree metrics with exact values,
//! Green metrics of symmetric random walks, Gromov products, rough geodesics and
//! the strong-hyperbolicity four-point scan.

mod four_point;
mod green;

use std::fmt;
use std::sync::Arc;

pub use four_point::{check_strong_hyperbolicity, check_strong_hyperbolicity_capped, FourPointReport, ScanMode, FOUR_POINT_CAP};
pub use green::{build_green_metric, BoundaryClosure, GreenSolution, GreenWalk};

use crate::error::{input, Error, Result};
use crate::group::{Ball, BallOptions, Group, GroupElement, GroupKind, Letter};
use crate::Rational;

/// Float discrepancies at or below this are treated as zero.
pub const NUMERIC_FLOOR: f64 = 1e-9;

/// Radius of the length table built for small-cancellation word metrics by default.
pub const DEFAULT_LENGTH_TABLE_RADIUS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    Word,
    TreeExact,
    Green,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Word => "word",
            MetricKind::TreeExact => "tree",
            MetricKind::Green => "green",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueMode {
    ExactRational,
    FloatWithError,
}

/// A distance, Gromov product or cocycle value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricValue {
    Exact(Rational),
    Approx { value: f64, error: f64 },
}

impl MetricValue {
    pub fn from_int(n: i64) -> Self {
        MetricValue::Exact(Rational::from_integer(n as i128))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            MetricValue::Exact(q) => *q.numer() as f64 / *q.denom() as f64,
            MetricValue::Approx { value, .. } => *value,
        }
    }

    pub fn as_exact(&self) -> Option<Rational> {
        match self {
            MetricValue::Exact(q) => Some(*q),
            MetricValue::Approx { .. } => None,
        }
    }

    pub fn error(&self) -> f64 {
        match self {
            MetricValue::Exact(_) => 0.0,
            MetricValue::Approx { error, .. } => *error,
        }
    }

    /// Exact equality when both sides are exact, otherwise agreement within
    /// `tol` plus the tracked errors.
    pub fn agrees_with(&self, other: &MetricValue, tol: f64) -> bool {
        match (self, other) {
            (MetricValue::Exact(a), MetricValue::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol + self.error() + other.error(),
        }
    }

    fn combine(self, other: MetricValue, exact: impl Fn(Rational, Rational) -> Rational, float: impl Fn(f64, f64) -> f64) -> MetricValue {
        match (self, other) {
            (MetricValue::Exact(a), MetricValue::Exact(b)) => MetricValue::Exact(exact(a, b)),
            _ => MetricValue::Approx {
                value: float(self.to_f64(), other.to_f64()),
                error: self.error() + other.error(),
            },
        }
    }

    pub fn scale(self, k: Rational) -> MetricValue {
        match self {
            MetricValue::Exact(a) => MetricValue::Exact(a * k),
            MetricValue::Approx { value, error } => {
                let kf = *k.numer() as f64 / *k.denom() as f64;
                MetricValue::Approx {
                    value: value * kf,
                    error: error * kf.abs(),
                }
            }
        }
    }
}

impl std::ops::Add for MetricValue {
    type Output = MetricValue;
    fn add(self, rhs: MetricValue) -> MetricValue {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl std::ops::Sub for MetricValue {
    type Output = MetricValue;
    fn sub(self, rhs: MetricValue) -> MetricValue {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl std::ops::Neg for MetricValue {
    type Output = MetricValue;
    fn neg(self) -> MetricValue {
        match self {
            MetricValue::Exact(a) => MetricValue::Exact(-a),
            MetricValue::Approx { value, error } => MetricValue::Approx { value: -value, error },
        }
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Exact(q) if *q.denom() == 1 => write!(f, "{}", q.numer()),
            MetricValue::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            MetricValue::Approx { value, error } => write!(f, "{value} ± {error:e}"),
        }
    }
}

#[derive(Clone, Debug)]
enum LengthSource {
    NormalForm,
    Table(Arc<Ball>),
    Green(Arc<GreenSolution>),
}

/// An equivariant, roughly geodesic metric on a group, always based at the identity.
///
/// Every such metric is `d(x, y) = ℓ(x⁻¹y)` for its length function `ℓ`, which is
/// what the structure stores.
#[derive(Clone, Debug)]
pub struct MetricStructure {
    group: Arc<Group>,
    kind: MetricKind,
    scale: f64,
    rough_constant: f64,
    lengths: LengthSource,
}

impl MetricStructure {
    /// Word metric for the presentation's generating set.
    pub fn word(group: &Arc<Group>) -> Result<Self> {
        Self::word_with_table(group, DEFAULT_LENGTH_TABLE_RADIUS)
    }

    /// Word metric; for small-cancellation groups lengths up to `table_radius + 1`
    /// are exact and longer queries are a resource error.
    pub fn word_with_table(group: &Arc<Group>, table_radius: usize) -> Result<Self> {
        let lengths = if group.has_normal_forms() {
            LengthSource::NormalForm
        } else {
            LengthSource::Table(Arc::new(Ball::build(group, table_radius, BallOptions::default())?))
        };
        Ok(MetricStructure {
            group: group.clone(),
            kind: MetricKind::Word,
            scale: 1.0,
            rough_constant: 0.0,
            lengths,
        })
    }

    /// Word metric on a free group with Gromov products read off common prefixes.
    pub fn tree(group: &Arc<Group>) -> Result<Self> {
        if group.kind() != GroupKind::Free {
            return Err(Error::Unsupported(format!(
                "tree-exact metric needs a free group, got {}",
                group.name()
            )));
        }
        Ok(MetricStructure {
            group: group.clone(),
            kind: MetricKind::TreeExact,
            scale: 1.0,
            rough_constant: 0.0,
            lengths: LengthSource::NormalForm,
        })
    }

    pub(crate) fn from_green(group: &Arc<Group>, solution: GreenSolution, rough_constant: f64) -> Self {
        MetricStructure {
            group: group.clone(),
            kind: MetricKind::Green,
            scale: 1.0,
            rough_constant,
            lengths: LengthSource::Green(Arc::new(solution)),
        }
    }

    /// Rescales the metric to `ε·d`. The rough-geodesic constant scales with it.
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return input(format!("metric scale must be positive, got {scale}"));
        }
        self.rough_constant *= scale / self.scale;
        self.scale = scale;
        Ok(self)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rough_constant(&self) -> f64 {
        self.rough_constant
    }

    pub fn value_mode(&self) -> ValueMode {
        if self.kind != MetricKind::Green && self.scale == 1.0 {
            ValueMode::ExactRational
        } else {
            ValueMode::FloatWithError
        }
    }

    /// Integer-valued before scaling (word and tree metrics).
    pub fn is_integral(&self) -> bool {
        self.kind != MetricKind::Green
    }

    pub fn green_solution(&self) -> Option<&GreenSolution> {
        match &self.lengths {
            LengthSource::Green(s) => Some(s),
            _ => None,
        }
    }

    /// Unscaled integer length of a word, for word and tree metrics.
    pub fn length_units(&self, word: &[Letter]) -> Result<i64> {
        match &self.lengths {
            LengthSource::NormalForm => Ok(self.group.reduce_word(word).len() as i64),
            LengthSource::Table(ball) => Ok(ball.word_length(word)? as i64),
            LengthSource::Green(_) => Err(Error::Unsupported(
                "Green metrics have no integer lengths".into(),
            )),
        }
    }

    /// The ball whose elements carry precomputed lengths, if any.
    pub(crate) fn table(&self) -> Option<&Arc<Ball>> {
        match &self.lengths {
            LengthSource::Table(b) => Some(b),
            LengthSource::Green(s) => Some(s.ball()),
            LengthSource::NormalForm => None,
        }
    }

    /// Unscaled length of table element `i`.
    pub(crate) fn table_length(&self, i: usize) -> f64 {
        match &self.lengths {
            LengthSource::Green(s) => -s.hitting_probability(i).ln(),
            LengthSource::Table(b) => b.depth(i) as f64,
            LengthSource::NormalForm => unreachable!("normal-form metrics have no table"),
        }
    }

    /// Unscaled length as a float: exact integers for word and tree metrics.
    pub fn raw_length(&self, word: &[Letter]) -> Result<f64> {
        match &self.lengths {
            LengthSource::Green(sol) => Ok(sol.length(word)?.0),
            _ => Ok(self.length_units(word)? as f64),
        }
    }

    /// Scaled length `ℓ(w) = d(1, w)` as a float, with its error bound.
    pub fn length_f64(&self, word: &[Letter]) -> Result<(f64, f64)> {
        match &self.lengths {
            LengthSource::Green(sol) => {
                let (v, e) = sol.length(word)?;
                Ok((self.scale * v, self.scale * e))
            }
            _ => Ok((self.scale * self.length_units(word)? as f64, 0.0)),
        }
    }

    pub fn length_value(&self, word: &[Letter]) -> Result<MetricValue> {
        if self.value_mode() == ValueMode::ExactRational {
            return Ok(MetricValue::from_int(self.length_units(word)?));
        }
        let (value, error) = self.length_f64(word)?;
        Ok(MetricValue::Approx { value, error })
    }

    /// `|g| = d(1, g)`.
    pub fn length(&self, g: &GroupElement) -> Result<MetricValue> {
        self.group.check_member(g)?;
        self.length_value(g.word())
    }

    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<MetricValue> {
        self.group.check_member(x)?;
        self.group.check_member(y)?;
        self.length_value(&self.quotient_word(x.word(), y.word()))
    }

    /// `⟨x, y⟩` based at the identity.
    pub fn gromov_product(&self, x: &GroupElement, y: &GroupElement) -> Result<MetricValue> {
        self.group.check_member(x)?;
        self.group.check_member(y)?;
        if self.kind == MetricKind::TreeExact {
            let common = x
                .word()
                .iter()
                .zip(y.word())
                .take_while(|(a, b)| a == b)
                .count() as i64;
            return Ok(self.scaled_int(common));
        }
        self.gromov_product_at(&self.group.identity(), x, y)
    }

    /// `⟨x, y⟩_o = ½(|o,x| + |o,y| − |x,y|)`.
    pub fn gromov_product_at(
        &self,
        o: &GroupElement,
        x: &GroupElement,
        y: &GroupElement,
    ) -> Result<MetricValue> {
        let ox = self.distance(o, x)?;
        let oy = self.distance(o, y)?;
        let xy = self.distance(x, y)?;
        Ok((ox + oy - xy).scale(Rational::new(1, 2)))
    }

    fn scaled_int(&self, n: i64) -> MetricValue {
        if self.value_mode() == ValueMode::ExactRational {
            MetricValue::from_int(n)
        } else {
            MetricValue::Approx {
                value: self.scale * n as f64,
                error: 0.0,
            }
        }
    }

    /// The raw word `x⁻¹y`.
    pub(crate) fn quotient_word(&self, x: &[Letter], y: &[Letter]) -> Vec<Letter> {
        let mut w = self.group.alphabet().invert_word(x);
        w.extend_from_slice(y);
        w
    }

    /// Pairwise distances on a ball, row-major.
    pub fn distance_matrix(&self, ball: &Ball) -> Result<DistanceMatrix> {
        if !Arc::ptr_eq(ball.group(), &self.group) && ball.group().id() != self.group.id() {
            return input("ball and metric belong to different groups");
        }
        let n = ball.len();
        let words: Vec<Vec<Letter>> = (0..n).map(|i| ball.word(i)).collect();
        let mut units = self.is_integral().then(|| vec![0i64; n * n]);
        let mut values = vec![0f64; n * n];
        let mut error = 0f64;
        for i in 0..n {
            for j in i + 1..n {
                let w = self.quotient_word(&words[i], &words[j]);
                if let Some(u) = units.as_mut() {
                    let d = self.length_units(&w)?;
                    u[i * n + j] = d;
                    u[j * n + i] = d;
                    values[i * n + j] = self.scale * d as f64;
                } else {
                    let (d, e) = self.length_f64(&w)?;
                    values[i * n + j] = d;
                    error = error.max(e);
                }
                values[j * n + i] = values[i * n + j];
            }
        }
        Ok(DistanceMatrix {
            n,
            units,
            values,
            error,
        })
    }

    /// A path from `x` to `y` with parameters `t_i = d(x, γ_i)`, following a geodesic
    /// word for `x⁻¹y`, and the smallest constant `C` making it a rough geodesic.
    pub fn rough_geodesic(&self, x: &GroupElement, y: &GroupElement) -> Result<RoughGeodesic> {
        self.group.check_member(x)?;
        self.group.check_member(y)?;
        let q = self.quotient_word(x.word(), y.word());
        let path_word = match &self.lengths {
            LengthSource::Table(ball) => {
                let i = ball.locate(&q).ok_or_else(|| {
                    Error::Resource("rough geodesic endpoint outside the length table".into())
                })?;
                ball.word(i)
            }
            LengthSource::Green(sol) => sol.geodesic_word(&q)?,
            LengthSource::NormalForm => self.group.reduce_word(&q),
        };
        let mut points = vec![x.clone()];
        let mut raw = x.word().to_vec();
        for &l in &path_word {
            raw.push(l);
            points.push(self.group.element_unchecked(self.group.reduce_word(&raw)));
        }
        let params = points
            .iter()
            .map(|p| self.distance(x, p).map(|d| d.to_f64()))
            .collect::<Result<Vec<_>>>()?;
        let mut c: f64 = 0.0;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = self.distance(&points[i], &points[j])?.to_f64();
                c = c.max((d - (params[j] - params[i]).abs()).abs());
            }
        }
        if c <= NUMERIC_FLOOR {
            c = 0.0;
        }
        Ok(RoughGeodesic {
            points,
            params,
            constant: c,
        })
    }
}

/// Output of [`MetricStructure::rough_geodesic`].
#[derive(Clone, Debug)]
pub struct RoughGeodesic {
    pub points: Vec<GroupElement>,
    pub params: Vec<f64>,
    /// Smallest `C` with `|s−t| − C ≤ |γ(s),γ(t)| ≤ |s−t| + C` on the sampled parameters.
    pub constant: f64,
}

impl RoughGeodesic {
    /// Element at parameter `t`: the last vertex whose parameter does not exceed `t`.
    pub fn at(&self, t: f64) -> &GroupElement {
        let i = self
            .params
            .iter()
            .rposition(|&p| p <= t + 1e-12)
            .unwrap_or(0);
        &self.points[i]
    }

    pub fn start(&self) -> f64 {
        self.params[0]
    }

    pub fn end(&self) -> f64 {
        *self.params.last().expect("path has a start point")
    }
}

/// Pairwise distances on a ball. `units` holds the unscaled integers for word and
/// tree metrics.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    pub n: usize,
    pub units: Option<Vec<i64>>,
    pub values: Vec<f64>,
    pub error: f64,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Least-squares slope of `log |S_n|` over `n = 1..=R`.
pub fn growth_exponent(ball: &Ball) -> Result<f64> {
    if ball.radius() < 3 {
        return Err(Error::Numeric(format!(
            "growth estimate needs radius at least 3, got {}",
            ball.radius()
        )));
    }
    let sizes = ball.sphere_sizes();
    if sizes[1..].contains(&0) {
        return Err(Error::Numeric("empty sphere: finite group".into()));
    }
    let pts: Vec<(f64, f64)> = sizes[1..]
        .iter()
        .enumerate()
        .map(|(i, &s)| ((i + 1) as f64, (s as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
