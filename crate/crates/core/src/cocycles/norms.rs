use super::{half_integer, DeltaDomain};
use crate::error::{input, Error, Result};
use crate::group::{GroupElement, GroupKind};
use crate::metrics::{MetricValue, NUMERIC_FLOOR};
use crate::Rational;

/// Truncated `Σ_{Δ ∩ window} |c_g|^p` with a bound on the part outside the window.
#[derive(Clone, Debug, PartialEq)]
pub struct LpNormReport {
    pub g: GroupElement,
    pub p: f64,
    pub k: f64,
    pub c: f64,
    pub radius: usize,
    /// The truncated p-th power of the norm.
    pub norm_p: f64,
    /// Exact truncated value for word and tree metrics and integer `p`.
    pub exact: Option<Rational>,
    pub tail_bound: f64,
    /// Pairs with nonzero cocycle value.
    pub support: usize,
}

pub fn lp_norm(delta: &DeltaDomain, g: &GroupElement, p: f64) -> Result<LpNormReport> {
    if !(p.is_finite() && p >= 1.0) {
        return input(format!("p must be at least 1, got {p}"));
    }
    let field = delta.busemann_field(g)?;
    let scale = delta.metric().scale();
    let exact_power = (delta.exact() && scale == 1.0 && p.fract() == 0.0 && p <= 64.0)
        .then_some(p as i32);
    let mut norm = 0.0;
    let mut exact = exact_power.map(|_| Rational::from_integer(0));
    let mut support = 0;
    for &(x, y) in delta.index_pairs() {
        let raw = 0.5 * (field[x as usize] - field[y as usize]);
        if raw.abs() <= NUMERIC_FLOOR {
            continue;
        }
        support += 1;
        norm += (scale * raw).abs().powf(p);
        if let (Some(sum), Some(e)) = (exact.as_mut(), exact_power) {
            *sum += half_integer(raw.abs()).pow(e);
        }
    }
    if let Some(q) = exact {
        norm = *q.numer() as f64 / *q.denom() as f64;
    }
    let length = delta.metric().raw_length(g.word())?;
    Ok(LpNormReport {
        g: g.clone(),
        p,
        k: delta.k(),
        c: delta.c(),
        radius: delta.radius(),
        norm_p: norm,
        exact,
        tail_bound: tail_bound(delta, length, p),
        support,
    })
}

/// Bound on `Σ |c_g(x,y)|^p` over Δ-pairs with an endpoint outside the window.
///
/// Only free groups with word or tree metrics get a finite bound. There the cocycle
/// vanishes on every missing pair once `R ≥ |g| + ⌊(K+C)/ε⌋ − 1`; otherwise the
/// pointwise bound `|c_g(x,y)| ≤ min(K+C, e^{ε|g|} e^{−⟨x,y⟩})` with
/// `⟨x,y⟩ ≥ ε|x| − (K+C)` is summed against the sphere sizes `L(L−1)^{n−1}`.
fn tail_bound(delta: &DeltaDomain, g_len: f64, p: f64) -> f64 {
    let m = delta.metric();
    let group = m.group();
    if group.kind() != GroupKind::Free || !m.is_integral() {
        return f64::INFINITY;
    }
    let eps = m.scale();
    let kc = delta.k() + delta.c();
    let reach = (kc / eps + NUMERIC_FLOOR).floor();
    let r = delta.radius() as f64;
    if r + 1.0 >= g_len + reach {
        return 0.0;
    }
    let l = group.alphabet().len() as f64;
    let sphere = |n: f64| if n == 0.0 { 1.0 } else { l * (l - 1.0).powf(n - 1.0) };
    let offsets: f64 = (0..=reach as usize).map(|j| sphere(j as f64)).sum();
    let ratio = (l - 1.0) * (-p * eps).exp();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let term = |n: f64| sphere(n) * kc.min((eps * g_len + kc - eps * n).exp()).powf(p);
    let mut sum = 0.0;
    let mut n = r + 1.0;
    // while the cap K+C is active the terms grow; sum them directly
    while (eps * g_len + kc - eps * n).exp() >= kc {
        sum += term(n);
        n += 1.0;
    }
    sum += term(n) / (1.0 - ratio);
    2.0 * offsets * sum
}

/// Partition argument along a rough geodesic from 1 to `g`.
#[derive(Clone, Debug)]
pub struct PropernessCertificate {
    pub g: GroupElement,
    /// `|g|` in the metric.
    pub length: f64,
    pub n: usize,
    pub params: Vec<f64>,
    pub points: Vec<GroupElement>,
    /// `c_g(γ(t_{i+1}), γ(t_i))` for each segment.
    pub segment_values: Vec<MetricValue>,
    /// `(K − 2C)^p · n`.
    pub count_bound: f64,
    /// `(K − 2C)^p · max(0, (|g| − (K+C))/K)`.
    pub lower_bound: f64,
    pub actual: LpNormReport,
    pub failures: Vec<String>,
}

impl PropernessCertificate {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Builds and verifies the properness certificate for `g`.
///
/// Segments are read as `(γ(t_{i+1}), γ(t_i))`, the orientation on which
/// `c_g = ⟨g,·⟩ − ⟨g,·⟩` is positive; Δ is swap-closed so both orientations are
/// available.
pub fn properness_check(delta: &DeltaDomain, g: &GroupElement, p: f64) -> Result<PropernessCertificate> {
    let m = delta.metric();
    let group = m.group();
    let (k, c) = (delta.k(), delta.c());
    let actual = lp_norm(delta, g, p)?;
    let length = m.length(g)?.to_f64();
    let floor = (k - 2.0 * c).powf(p);
    let lower_bound = floor * ((length - (k + c)) / k).max(0.0);
    let one = group.identity();
    let mut cert = PropernessCertificate {
        g: g.clone(),
        length,
        n: 0,
        params: vec![0.0],
        points: vec![one.clone()],
        segment_values: Vec::new(),
        count_bound: 0.0,
        lower_bound,
        actual,
        failures: Vec::new(),
    };
    if group.is_trivial(g) {
        return Ok(cert);
    }
    if delta.ball().index_of(g).is_none() {
        return Err(Error::Resource(format!(
            "certificate for {} needs a window of radius at least {}",
            group.format(g),
            g.len()
        )));
    }
    let path = m.rough_geodesic(&one, g)?;
    let n = ((path.end() - path.start()) / k + NUMERIC_FLOOR).floor() as usize;
    cert.n = n;
    cert.params = (0..=n).map(|i| path.start() + i as f64 * k).collect();
    cert.points = cert.params.iter().map(|&t| path.at(t).clone()).collect();
    for i in 0..n {
        let (a, b) = (&cert.points[i + 1], &cert.points[i]);
        let d = m.distance(a, b)?.to_f64();
        if !delta.admits(d) {
            return Err(Error::InvariantViolation(format!(
                "segment {i} of the partition for {} has length {d}, outside [K−C, K+C]; C is too small",
                group.format(g)
            )));
        }
        let v = super::haagerup_value(m, g, a, b)?;
        if v.to_f64() < k - 2.0 * c - NUMERIC_FLOOR {
            cert.failures
                .push(format!("segment {i} has cocycle value {v} below K − 2C"));
        }
        cert.segment_values.push(v);
    }
    cert.count_bound = floor * n as f64;
    if cert.actual.norm_p < cert.count_bound - NUMERIC_FLOOR {
        cert.failures.push(format!(
            "truncated norm {} is below (K−2C)^p·n = {}",
            cert.actual.norm_p, cert.count_bound
        ));
    }
    if (n as f64) < (length - (k + c)) / k - NUMERIC_FLOOR {
        cert.failures
            .push(format!("partition count {n} is below (|g| − (K+C))/K"));
    }
    Ok(cert)
}

/// Partial sums of `Σ e^{−p⟨x,y⟩}` over Δ-pairs inside growing balls.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalRow {
    pub p: f64,
    /// Entry `r` sums over pairs with both endpoints in the radius-`r` ball.
    pub partial_sums: Vec<f64>,
    /// Ratio of the last two radius increments.
    pub ratio: f64,
    /// `(L−1)·e^{−pε}` for free groups with word or tree metrics.
    pub predicted_ratio: Option<f64>,
    /// `Some(ratio < 1)` when at least two nonzero increments exist.
    pub converges: Option<bool>,
}

pub fn critical_exponent_scan(delta: &DeltaDomain, grid: &[f64]) -> Result<Vec<CriticalRow>> {
    let m = delta.metric();
    let ball = delta.ball();
    let lengths: Vec<f64> = (0..ball.len())
        .map(|i| Ok(m.scale() * m.raw_length(&ball.word(i))?))
        .collect::<Result<_>>()?;
    // (level, ⟨x,y⟩) per pair, level = larger endpoint depth
    let products: Vec<(usize, f64)> = delta
        .index_pairs()
        .iter()
        .map(|&(x, y)| {
            let (x, y) = (x as usize, y as usize);
            let w = m.quotient_word(&ball.word(x), &ball.word(y));
            let d = m.scale() * m.raw_length(&w)?;
            Ok((ball.depth(x).max(ball.depth(y)), 0.5 * (lengths[x] + lengths[y] - d)))
        })
        .collect::<Result<_>>()?;
    let group = m.group();
    let predicted_base = (group.kind() == GroupKind::Free && m.is_integral())
        .then(|| group.alphabet().len() as f64 - 1.0);
    let r = delta.radius();
    grid.iter()
        .map(|&p| {
            if !(p.is_finite() && p >= 1.0) {
                return input(format!("grid exponent must be at least 1, got {p}"));
            }
            let mut increments = vec![0.0; r + 1];
            for &(level, prod) in &products {
                increments[level] += (-p * prod).exp();
            }
            let partial_sums = increments
                .iter()
                .scan(0.0, |acc, v| {
                    *acc += v;
                    Some(*acc)
                })
                .collect();
            let (ratio, converges) = if r >= 2 && increments[r - 1] > 0.0 && increments[r] > 0.0 {
                let ratio = increments[r] / increments[r - 1];
                (ratio, Some(ratio < 1.0 - NUMERIC_FLOOR))
            } else {
                (f64::NAN, None)
            };
            Ok(CriticalRow {
                p,
                partial_sums,
                ratio,
                predicted_ratio: predicted_base.map(|b| b * (-p * m.scale()).exp()),
                converges,
            })
        })
        .collect()
}
