//! The verification suites behind `hyperlab check`.

use std::sync::Arc;

use hyperlab_core::boundary::FreeBoundary;
use hyperlab_core::cocycles::{
    affine_action_check, build_delta_with, cocycle_identity_scan, critical_exponent_scan, lp_norm,
    properness_check, TestVector,
};
use hyperlab_core::crossed_product::{
    kms_check, kms_scan, nonvanishing_certificate, CrossedAlgebra, CrossedElement, StepFunction,
};
use hyperlab_core::group::{enumerate_ball, Group, GroupElement, GroupKind};
use hyperlab_core::metrics::{
    build_green_metric, check_strong_hyperbolicity_capped, GreenWalk, MetricStructure, ScanMode,
};
use hyperlab_core::{Error, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{MetricChoice, ScenarioConfig, Suite};
use crate::report::{Check, Fields, SuiteReport, Witness};
use crate::CliError;

/// Agreement required of float-valued (Green) quantities.
pub const APPROX_TOLERANCE: f64 = 1e-6;
/// Convergence tolerance of the Green-function solve.
pub const GREEN_SOLVE_TOLERANCE: f64 = 1e-12;
/// Number of (g, ξ, η) triples in the conformal identity check.
pub const CONFORMAL_TRIPLES: usize = 200;
/// Elements in the positivity spot-check of the state.
pub const POSITIVITY_SAMPLES: usize = 20;
pub const DEFAULT_CRITICAL_GRID: [f64; 8] = [1.0, 1.05, 1.1, 1.15, 1.25, 1.5, 2.0, 3.0];

pub fn load_group(spec: &str) -> Result<Arc<Group>, CliError> {
    let looks_like_path = spec.contains('/') || spec.ends_with(".txt") || spec.ends_with(".pres");
    if looks_like_path {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::Io(format!("cannot read presentation {spec}: {e}")))?;
        let name = std::path::Path::new(spec)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        return Ok(Group::from_text(&name, &text)?);
    }
    Ok(Group::preset(spec)?)
}

/// Upper bound on `|B_r|` from the generating set alone.
fn ball_bound(group: &Group, r: usize) -> u64 {
    let l = group.alphabet().len() as u64;
    let mut total: u64 = 1;
    let mut sphere: u64 = l;
    for _ in 0..r {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(l.saturating_sub(1).max(1));
    }
    total
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SuiteReport, CliError> {
    let group = load_group(&cfg.group)?;
    let suites = match cfg.suite {
        Suite::All => Suite::ORDER.to_vec(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        match run_suite(s, cfg, &group) {
            Ok(c) => checks.extend(c),
            Err(CliError::Core(Error::Unsupported(msg)) | CliError::Cap(msg)) if cfg.suite == Suite::All => checks.push(Check {
                suite: s.name().into(),
                name: "skipped".into(),
                passed: true,
                fields: Fields::new().text("reason", msg),
                witness: None,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(SuiteReport::new(cfg.suite.name(), &cfg.group, cfg.metric.name(), cfg.seed, checks))
}

fn run_suite(s: Suite, cfg: &ScenarioConfig, group: &Arc<Group>) -> Result<Vec<Check>, CliError> {
    let ctx = Ctx { cfg, group, suite: s.name() };
    match s {
        Suite::StrongHyp => ctx.strong_hyp(),
        Suite::Green => ctx.green(),
        Suite::Cocycle => ctx.cocycle(),
        Suite::Properness => ctx.properness(),
        Suite::Boundary => ctx.boundary(),
        Suite::Kms => ctx.kms(),
        Suite::All => unreachable!("expanded by run_scenario"),
    }
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    group: &'a Arc<Group>,
    suite: &'static str,
}

impl Ctx<'_> {
    fn check(&self, name: &str, passed: bool, fields: Fields, witness: Option<String>) -> Check {
        Check {
            suite: self.suite.into(),
            name: name.into(),
            passed,
            fields,
            witness: witness.map(|detail| Witness { seed: self.cfg.seed, detail }),
        }
    }

    fn fmt(&self, g: &GroupElement) -> String {
        self.group.format(g)
    }

    fn ball_elements(&self, r: usize, what: &str) -> Result<Vec<GroupElement>, CliError> {
        self.cfg.caps.ball(ball_bound(self.group, r), what)?;
        Ok(enumerate_ball(self.group, r)?.elements().collect())
    }

    fn green_metric(&self, reach: usize) -> Result<MetricStructure, CliError> {
        let t = self.cfg.truncation;
        if reach > t {
            return Err(CliError::Usage(format!(
                "Green lengths up to {reach} are needed but the truncation radius is {t}; raise --truncation"
            )));
        }
        self.cfg.caps.ball(ball_bound(self.group, t), "the Green-function solve")?;
        Ok(build_green_metric(
            self.group,
            &GreenWalk::simple(self.group, t, GREEN_SOLVE_TOLERANCE),
        )?)
    }

    /// The configured metric, able to measure words up to length `reach`.
    fn metric(&self, reach: usize) -> Result<MetricStructure, CliError> {
        let m = match self.cfg.metric {
            MetricChoice::Word if self.group.has_normal_forms() => MetricStructure::word(self.group)?,
            MetricChoice::Word => {
                self.cfg.caps.ball(ball_bound(self.group, reach), "the word-length table")?;
                MetricStructure::word_with_table(self.group, reach)?
            }
            MetricChoice::Green => self.green_metric(reach)?,
        };
        Ok(if self.cfg.scale != 1.0 { m.with_scale(self.cfg.scale)? } else { m })
    }

    fn strong_hyp(&self) -> Result<Vec<Check>, CliError> {
        let cfg = self.cfg;
        let radius = cfg.radius.unwrap_or(match cfg.metric {
            MetricChoice::Word => 4,
            MetricChoice::Green => 3,
        });
        let m = self.metric(2 * radius)?;
        self.cfg.caps.ball(ball_bound(self.group, radius), "the four-point scan")?;
        let ball = enumerate_ball(self.group, radius)?;
        let n = ball.len() as u64;
        let (mode, mode_name) = match cfg.samples {
            Some(s) => {
                cfg.caps.work(s, "the sampled four-point scan")?;
                (ScanMode::Sampled { samples: s, seed: cfg.seed }, "sampled")
            }
            None => {
                cfg.caps.work(n.saturating_pow(4), "the exhaustive four-point scan (use --samples)")?;
                (ScanMode::Exhaustive, "exhaustive")
            }
        };
        let r = check_strong_hyperbolicity_capped(&m, &ball, mode, u64::MAX)?;
        let tol = if m.is_integral() { 0.0 } else { APPROX_TOLERANCE };
        let witness = r.witness.as_ref().map(|[x, y, z, o]| {
            format!("x={} y={} z={} o={}", self.fmt(x), self.fmt(y), self.fmt(z), self.fmt(o))
        });
        let four = self.check(
            "four_point",
            r.max_defect <= tol,
            Fields::new()
                .text("metric", m.kind().to_string())
                .float("scale", m.scale())
                .int("radius", radius as i64)
                .int("ball_size", n as i64)
                .text("mode", mode_name)
                .int("checked", r.checked as i64)
                .float("max_defect", r.max_defect)
                .float("tolerance", tol),
            witness,
        );
        let bound = std::f64::consts::LN_2;
        let delta = self.check(
            "delta_bound",
            r.gromov_delta <= bound + tol.max(1e-12),
            Fields::new().float("gromov_delta", r.gromov_delta).float("bound", bound),
            None,
        );
        Ok(vec![four, delta])
    }

    fn green(&self) -> Result<Vec<Check>, CliError> {
        let radius = self.cfg.radius.unwrap_or(4);
        let m = self.green_metric(radius)?;
        let sol = m.green_solution().expect("Green metrics carry their solution");
        let elements = self.ball_elements(radius, "the Green suite")?;
        let mut checks = vec![self.check(
            "solve",
            sol.gap.is_finite(),
            Fields::new()
                .int("truncation", sol.truncation as i64)
                .int("solved_elements", sol.ball().len() as i64)
                .int("sweeps", sol.sweeps as i64)
                .float("tolerance", sol.tolerance)
                .float("gap", sol.gap)
                .float("rough_constant", m.rough_constant()),
            None,
        )];

        let lengths = elements
            .iter()
            .map(|g| m.length_f64(g.word()))
            .collect::<hyperlab_core::Result<Vec<_>>>()?;
        if let (GroupKind::Free, Some(k)) = (self.group.kind(), self.group.free_rank()) {
            let d = ((2 * k - 1) as f64).ln();
            let mut worst = (0.0, None);
            let mut max_err: f64 = 0.0;
            for (g, &(v, err)) in elements.iter().zip(&lengths) {
                let dev = (v - d * g.len() as f64).abs();
                max_err = max_err.max(err);
                if dev > worst.0 {
                    worst = (dev, Some(g));
                }
            }
            let gen = &self.group.generators()[0];
            let idx = sol.ball().index_of(gen).expect("generators lie in the truncation ball");
            let f = sol.hitting_probability(idx);
            let expected = Rational::new(1, 2 * k as i128 - 1);
            let f_dev = (f - 1.0 / (2 * k - 1) as f64).abs();
            let passed = worst.0 <= APPROX_TOLERANCE && f_dev <= APPROX_TOLERANCE;
            checks.push(self.check(
                "closed_form",
                passed,
                Fields::new()
                    .int("radius", radius as i64)
                    .int("elements", elements.len() as i64)
                    .float("max_deviation", worst.0)
                    .float("max_error_estimate", max_err)
                    .float("first_passage", f)
                    .rational("first_passage_expected", expected)
                    .float("tolerance", APPROX_TOLERANCE),
                (!passed).then(|| format!("g={}", worst.1.map(|g| self.fmt(g)).unwrap_or_default())),
            ));
        }

        let mut worst = (0.0, None);
        for (g, &(v, _)) in elements.iter().zip(&lengths) {
            let (w, _) = m.length_f64(self.group.invert(g).word())?;
            let dev = (v - w).abs();
            if dev > worst.0 {
                worst = (dev, Some(g));
            }
        }
        let passed = worst.0 <= APPROX_TOLERANCE;
        checks.push(self.check(
            "symmetry",
            passed,
            Fields::new()
                .int("elements", elements.len() as i64)
                .float("max_asymmetry", worst.0)
                .float("tolerance", APPROX_TOLERANCE),
            (!passed).then(|| format!("g={}", worst.1.map(|g| self.fmt(g)).unwrap_or_default())),
        ));
        Ok(checks)
    }

    fn cocycle(&self) -> Result<Vec<Check>, CliError> {
        let cfg = self.cfg;
        let r = cfg.radius.unwrap_or(3).max(1);
        let ps = cfg.p.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0]);
        let m = self.metric(r + 3)?;
        let k = cfg.k;
        let c = cfg.c.unwrap_or(m.rough_constant());
        let reach = ((k + c) / m.scale() + 1e-9).floor() as usize;
        let law = self.group.kind() == GroupKind::Free
            && m.is_integral()
            && m.scale() == 1.0
            && k == 1.0
            && c == 0.0;
        let mut checks = Vec::new();

        if let Some(word) = &cfg.g {
            let g = self.group.parse(word)?;
            let window = r.max(g.len() + reach);
            self.cfg.caps.ball(ball_bound(self.group, window), "the norm window")?;
            let delta = build_delta_with(&m, k, c, window)?;
            for &p in &ps {
                let rep = lp_norm(&delta, &g, p)?;
                let expected = Rational::from_integer(2 * g.len() as i128);
                let exact_law = law && p.fract() == 0.0;
                let mut f = Fields::new().text("g", self.fmt(&g)).float("p", p).int("window", window as i64);
                f = match rep.exact {
                    Some(q) => f.rational("norm_p", q),
                    None => f.float("norm_p", rep.norm_p),
                };
                f = f.float("tail_bound", rep.tail_bound).int("support", rep.support as i64);
                if exact_law {
                    f = f.rational("expected", expected);
                }
                let passed = !exact_law || rep.exact == Some(expected);
                checks.push(self.check(&format!("norm[p={p}]"), passed, f, None));
            }
            let p = ps[0];
            let cert = properness_check(&delta, &g, p)?;
            let passed = cert.holds();
            checks.push(self.check(
                "properness",
                passed,
                Fields::new()
                    .text("g", self.fmt(&g))
                    .float("p", p)
                    .float("length", cert.length)
                    .int("segments", cert.n as i64)
                    .float("count_bound", cert.count_bound)
                    .float("lower_bound", cert.lower_bound)
                    .float("norm_p", cert.actual.norm_p),
                (!passed).then(|| cert.failures.join("; ")),
            ));
        } else if law {
            let gr = r + 1;
            let window = gr + reach;
            self.cfg.caps.ball(ball_bound(self.group, window), "the norm window")?;
            let delta = build_delta_with(&m, k, c, window)?;
            let elements = self.ball_elements(gr, "the norm law")?;
            self.cfg.caps.work((elements.len() * ps.len() * delta.len()) as u64, "the norm law")?;
            for &p in &ps {
                let mut failures = 0;
                let mut first = None;
                let mut max_tail: f64 = 0.0;
                for g in &elements {
                    let rep = lp_norm(&delta, g, p)?;
                    max_tail = max_tail.max(rep.tail_bound);
                    let expected = 2.0 * g.len() as f64;
                    let ok = match rep.exact {
                        Some(q) => q == Rational::from_integer(2 * g.len() as i128),
                        None => (rep.norm_p - expected).abs() <= 1e-9 * expected.max(1.0),
                    } && rep.tail_bound == 0.0;
                    if !ok {
                        failures += 1;
                        first.get_or_insert_with(|| format!("g={} norm_p={}", self.fmt(g), rep.norm_p));
                    }
                }
                checks.push(self.check(
                    &format!("norm_law[p={p}]"),
                    failures == 0,
                    Fields::new()
                        .float("p", p)
                        .int("radius", gr as i64)
                        .int("window", window as i64)
                        .int("elements", elements.len() as i64)
                        .int("failures", failures)
                        .float("max_tail_bound", max_tail),
                    first,
                ));
            }
        }

        let gr = r - 1;
        self.cfg.caps.ball(ball_bound(self.group, r), "the cocycle identity window")?;
        let delta = build_delta_with(&m, k, c, r)?;
        let gs = self.ball_elements(gr, "the cocycle identity scan")?;
        self.cfg.caps.work(
            (gs.len() as u64).pow(2).saturating_mul(delta.len() as u64),
            "the cocycle identity scan",
        )?;
        let rep = cocycle_identity_scan(&delta, &gs)?;
        let witness = rep.witnesses.first().map(|[g, h, x, y]| {
            format!("g={} h={} x={} y={}", self.fmt(g), self.fmt(h), self.fmt(x), self.fmt(y))
        });
        checks.push(self.check(
            "cocycle_identity",
            rep.failures == 0,
            Fields::new()
                .float("K", k)
                .float("C", c)
                .int("element_radius", gr as i64)
                .int("pair_radius", r as i64)
                .int("elements", rep.elements as i64)
                .int("pairs", rep.pairs as i64)
                .int("checked", rep.checked as i64)
                .int("failures", rep.failures as i64),
            witness,
        ));

        // test vectors live on pairs inside B_s; the window must hold their translates
        let ar = if self.group.kind() == GroupKind::Free { gr } else { gr.min(1) };
        let support_radius = reach.max(1);
        let window = ar + support_radius;
        self.cfg.caps.ball(ball_bound(self.group, window), "the affine action window")?;
        let delta = build_delta_with(&m, k, c, window)?;
        let gs = self.ball_elements(ar, "the affine action check")?;
        self.cfg.caps.work(
            (gs.len() as u64).pow(2).saturating_mul(delta.len() as u64),
            "the affine action check",
        )?;
        let phi = TestVector::random_within(&delta, 8, support_radius, cfg.seed);
        let rep = affine_action_check(&delta, &gs, &phi, ps[0])?;
        let witness = rep
            .composition_witnesses
            .first()
            .map(|[g, h, x, y]| format!("g={} h={} x={} y={}", self.fmt(g), self.fmt(h), self.fmt(x), self.fmt(y)))
            .or_else(|| rep.isometry_failures.first().map(|g| format!("isometry fails for g={}", self.fmt(g))));
        let max_disp = rep.displacements.iter().map(|d| d.norm_p).fold(0.0, f64::max);
        checks.push(self.check(
            "affine_action",
            rep.holds(),
            Fields::new()
                .int("element_radius", ar as i64)
                .int("window", window as i64)
                .int("test_support", phi.entries.len() as i64)
                .int("compositions_checked", rep.compositions_checked as i64)
                .int("composition_failures", rep.composition_failures as i64)
                .int("isometry_failures", rep.isometry_failures.len() as i64)
                .float("p", ps[0])
                .float("max_displacement_p", max_disp),
            witness,
        ));
        Ok(checks)
    }

    fn properness(&self) -> Result<Vec<Check>, CliError> {
        let cfg = self.cfg;
        let r = cfg.radius.unwrap_or(6).max(1);
        let m = self.metric(r + 2)?;
        let (k, c) = (cfg.k, cfg.c.unwrap_or(m.rough_constant()));
        let p = match &cfg.p {
            Some(v) if v.len() == 1 => v[0],
            _ => 1.0,
        };
        self.cfg.caps.ball(ball_bound(self.group, r), "the properness window")?;
        let delta = build_delta_with(&m, k, c, r)?;
        let elements: Vec<GroupElement> = delta.ball().elements().filter(|g| !g.is_empty()).collect();
        self.cfg.caps.work(
            (elements.len() as u64).saturating_mul(delta.len() as u64),
            "the properness certificates",
        )?;
        let mut failures = 0;
        let mut first = None;
        let mut min_margin = f64::INFINITY;
        for g in &elements {
            let cert = properness_check(&delta, g, p)?;
            min_margin = min_margin.min(cert.actual.norm_p - cert.lower_bound);
            if !cert.holds() {
                failures += 1;
                first.get_or_insert_with(|| format!("g={}: {}", self.fmt(g), cert.failures.join("; ")));
            }
        }
        let mut checks = vec![self.check(
            "properness",
            failures == 0,
            Fields::new()
                .int("radius", r as i64)
                .float("K", k)
                .float("C", c)
                .float("p", p)
                .int("elements", elements.len() as i64)
                .int("failures", failures)
                .float("min_margin", min_margin),
            first,
        )];

        let grid: Vec<f64> = match &cfg.p {
            Some(v) if v.len() > 1 => v.clone(),
            _ => DEFAULT_CRITICAL_GRID.to_vec(),
        };
        let rows = critical_exponent_scan(&delta, &grid)?;
        let mut fields = Fields::new().int("radius", r as i64);
        if self.group.kind() == GroupKind::Free && m.is_integral() {
            let l = self.group.alphabet().len() as f64;
            fields = fields.float("threshold", (l - 1.0).ln() / m.scale());
        }
        let mut passed = true;
        let mut witness = None;
        for row in &rows {
            let verdict = match row.converges {
                Some(true) => "converges",
                Some(false) => "diverges",
                None => "undetermined",
            };
            fields = fields.float(&format!("ratio[p={}]", row.p), row.ratio);
            if let Some(pred) = row.predicted_ratio {
                fields = fields.float(&format!("predicted[p={}]", row.p), pred);
                let decisive = (pred - 1.0).abs() > 1e-9;
                if decisive && row.converges != Some(pred < 1.0) {
                    passed = false;
                    witness.get_or_insert_with(|| format!("p={} ratio={} predicted={}", row.p, row.ratio, pred));
                }
            }
            fields = fields.text(&format!("verdict[p={}]", row.p), verdict);
        }
        checks.push(self.check("critical_exponent", passed, fields, witness));
        Ok(checks)
    }

    fn boundary(&self) -> Result<Vec<Check>, CliError> {
        let cfg = self.cfg;
        let bd = FreeBoundary::new(self.group)?;
        let r = cfg.radius.unwrap_or(3);
        let elements = self.ball_elements(r, "the conformality scan")?;
        let mut cylinders = 0;
        let mut failures = 0;
        let mut first = None;
        for g in elements.iter().filter(|g| !g.is_empty()) {
            let depth = cfg.depth.unwrap_or(g.len() + 1);
            let rep = bd.conformality_check(g, depth)?;
            cylinders += rep.rows.len();
            for row in rep.rows.iter().filter(|row| !row.holds) {
                failures += 1;
                first.get_or_insert_with(|| {
                    format!(
                        "g={} cylinder={} ratio={}/{} busemann={}",
                        self.fmt(g),
                        self.group.alphabet().format_word(row.cylinder.prefix()),
                        row.ratio.numer(),
                        row.ratio.denom(),
                        row.busemann
                    )
                });
            }
        }
        let conformality = self.check(
            "conformality",
            failures == 0,
            Fields::new()
                .int("radius", r as i64)
                .int("elements", elements.len() as i64 - 1)
                .int("cylinders", cylinders as i64)
                .int("failures", failures),
            first,
        );

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let pool = bd.random_points(4 * CONFORMAL_TRIPLES, 3, 3, cfg.seed.wrapping_add(1));
        let movers: Vec<&GroupElement> = elements.iter().collect();
        let mut failures = 0;
        let mut first = None;
        let mut triples = 0;
        let mut cursor = 0;
        while triples < CONFORMAL_TRIPLES && cursor + 1 < pool.len() {
            let (xi, eta) = (&pool[cursor], &pool[cursor + 1]);
            cursor += 2;
            if xi == eta {
                continue;
            }
            let g = movers[rng.gen_range(0..movers.len())];
            let id = bd.conformal_identity_check(g, xi, eta)?;
            triples += 1;
            if !id.holds() {
                failures += 1;
                first.get_or_insert_with(|| {
                    format!(
                        "g={} xi={} eta={} lhs={} rhs={}",
                        self.fmt(g),
                        bd.format(xi),
                        bd.format(eta),
                        id.lhs,
                        id.rhs
                    )
                });
            }
        }
        let identity = self.check(
            "conformal_identity",
            failures == 0 && triples == CONFORMAL_TRIPLES,
            Fields::new().int("triples", triples as i64).int("failures", failures),
            first,
        );
        Ok(vec![conformality, identity])
    }

    fn kms(&self) -> Result<Vec<Check>, CliError> {
        let cfg = self.cfg;
        let bd = FreeBoundary::new(self.group)?;
        let alg = CrossedAlgebra::new(bd.clone());
        let r = cfg.radius.unwrap_or(2);
        let depth = cfg.depth.unwrap_or(3);
        let ball = self.ball_elements(r, "the KMS scan")?;
        let cylinders = bd.cylinders(depth);
        let monomials = (ball.len() * cylinders.len()) as u64;
        self.cfg.caps.work(monomials.saturating_mul(monomials), "the KMS pair scan")?;
        let d = alg.critical_temperature();
        let one = Rational::from_integer(1);
        let al = self.group.alphabet();
        let a = al.generator_letter(0);
        let ga = self.group.generators()[0].clone();
        let mono = |w: &[_], g: GroupElement| -> Result<CrossedElement<Rational>, CliError> {
            Ok(CrossedElement::monomial(StepFunction::indicator(&bd.cylinder(w)?, one), g))
        };

        let x = mono(&[a], ga.clone())?;
        let y = mono(&[a, a], self.group.invert(&ga))?;
        let rep = kms_check(&alg, &x, &y, d)?;
        let expected = bd.cylinder_measure(&bd.cylinder(&[a, a, a])?);
        let worked = self.check(
            "kms_worked_example",
            rep.holds() && rep.rhs == expected,
            Fields::new()
                .text("A", alg.describe(&x))
                .text("B", alg.describe(&y))
                .float("beta", d)
                .rational("lhs", rep.lhs)
                .rational("rhs", rep.rhs)
                .rational("expected", expected),
            None,
        );

        let scan = kms_scan(&alg, r, depth, 1)?;
        let scan_check = self.check(
            "kms_scan",
            scan.holds(),
            Fields::new()
                .int("radius", r as i64)
                .int("depth", depth as i64)
                .float("beta", d)
                .int("pairs", scan.pairs as i64)
                .int("paired", scan.paired as i64)
                .int("failures", scan.failures as i64),
            scan.first_failure
                .as_ref()
                .map(|(a, b, l, r)| format!("A={a} B={b} lhs={l} rhs={r}")),
        );

        let hot = kms_scan(&alg, r, depth, 2)?;
        let mut f = Fields::new()
            .float("beta", 2.0 * d)
            .int("pairs", hot.pairs as i64)
            .int("failures", hot.failures as i64);
        if let Some((a, b, l, r)) = &hot.first_failure {
            f = f.text("A", a.clone()).text("B", b.clone()).rational("lhs", *l).rational("rhs", *r);
        }
        let sensitivity = self.check("temperature_sensitivity", hot.failures > 0, f, None);

        let nr = r + 1;
        self.cfg.caps.ball(ball_bound(self.group, nr), "the non-vanishing certificate")?;
        let nball = enumerate_ball(self.group, nr)?;
        let nv = nonvanishing_certificate(&alg, &nball)?;
        let nv_check = self.check(
            "nonvanishing",
            nv.failures() == 0,
            Fields::new()
                .int("radius", nr as i64)
                .int("elements", nv.rows.len() as i64)
                .int("failures", nv.failures() as i64)
                .text("note", nv.note),
            nv.rows.iter().find(|row| !row.holds()).map(|row| {
                format!("g={} plus={} minus={} translation={}", self.fmt(&row.g), row.plus, row.minus, row.translation_length)
            }),
        );

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6b6d73);
        let mut min_value: Option<Rational> = None;
        let mut failures = 0;
        let mut first = None;
        for i in 0..POSITIVITY_SAMPLES {
            let mut x = CrossedElement::zero();
            for _ in 0..3 {
                let cyl = &cylinders[rng.gen_range(0..cylinders.len())];
                let g = ball[rng.gen_range(0..ball.len())].clone();
                let v = Rational::new(rng.gen_range(-4i128..=4), rng.gen_range(1i128..=3));
                let term = CrossedElement::monomial(StepFunction::indicator(cyl, v), g);
                x = alg.add(&x, &term);
            }
            let xs = alg.adjoint(&x);
            let fast = alg.state_of_product(&xs, &x);
            let full = alg.state(&alg.multiply(&xs, &x)?);
            min_value = Some(min_value.map_or(fast, |m| m.min(fast)));
            if fast < Rational::from_integer(0) || fast != full {
                failures += 1;
                first.get_or_insert_with(|| format!("sample {i}: {} gives {fast} and {full}", alg.describe(&x)));
            }
        }
        let positivity = self.check(
            "positivity",
            failures == 0,
            Fields::new()
                .int("samples", POSITIVITY_SAMPLES as i64)
                .int("failures", failures)
                .rational("min_value", min_value.unwrap_or_default()),
            first,
        );
        Ok(vec![worked, scan_check, sensitivity, nv_check, positivity])
    }
}
