//! Scenario configuration: command-line flags over a `key=value` file over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::report::Format;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "hyperlab", version, about = "Desk-scale checks for hyperbolic group metrics, cocycles and boundary flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and emit a report.
    Check(CheckArgs),
}

#[derive(Debug, Default, Clone, Args)]
pub struct CheckArgs {
    /// strong-hyp | green | cocycle | properness | boundary | kms | all
    #[arg(long)]
    pub suite: Option<String>,
    /// free:k, surface:g, modular, or a presentation file
    #[arg(long)]
    pub group: Option<String>,
    /// word | green
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// A single exponent, a list `a,b,c`, or a range `lo:hi:step`
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Group element for the cocycle suite
    #[arg(long = "g")]
    pub g: Option<String>,
    /// Truncation radius of the Green-function solve
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Sample this many quadruples instead of scanning exhaustively
    #[arg(long)]
    pub samples: Option<u64>,
    /// Metric rescaling ε
    #[arg(long)]
    pub scale: Option<f64>,
    /// Largest ball (element count) a suite may build
    #[arg(long = "max-ball")]
    pub max_ball: Option<u64>,
    /// Largest number of elementary checks (quadruples, pairs) a suite may run
    #[arg(long = "max-work")]
    pub max_work: Option<u64>,
    /// Ignore the resource caps
    #[arg(long = "override-caps")]
    pub override_caps: bool,
    /// Flat key=value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    StrongHyp,
    Green,
    Cocycle,
    Properness,
    Boundary,
    Kms,
    All,
}

impl Suite {
    pub const ORDER: [Suite; 6] = [
        Suite::StrongHyp,
        Suite::Green,
        Suite::Cocycle,
        Suite::Properness,
        Suite::Boundary,
        Suite::Kms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::StrongHyp => "strong-hyp",
            Suite::Green => "green",
            Suite::Cocycle => "cocycle",
            Suite::Properness => "properness",
            Suite::Boundary => "boundary",
            Suite::Kms => "kms",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ORDER
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; expected strong-hyp, green, cocycle, properness, boundary, kms or all"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricChoice {
    Word,
    Green,
}

impl MetricChoice {
    pub fn name(self) -> &'static str {
        match self {
            MetricChoice::Word => "word",
            MetricChoice::Green => "green",
        }
    }
}

impl FromStr for MetricChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "word" => Ok(MetricChoice::Word),
            "green" => Ok(MetricChoice::Green),
            _ => Err(format!("unknown metric {s:?}; expected word or green")),
        }
    }
}

/// Limits on what a single run may build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_ball: u64,
    pub max_work: u64,
    pub disabled: bool,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_ball: 2_000_000,
            max_work: 10_000_000_000,
            disabled: false,
        }
    }
}

impl Caps {
    pub fn ball(&self, size: u64, what: &str) -> Result<(), CliError> {
        if !self.disabled && size > self.max_ball {
            return Err(CliError::Cap(format!(
                "{what} needs a ball of up to {size} elements, above the cap {}; lower the radius or pass --override-caps",
                self.max_ball
            )));
        }
        Ok(())
    }

    pub fn work(&self, count: u64, what: &str) -> Result<(), CliError> {
        if !self.disabled && count > self.max_work {
            return Err(CliError::Cap(format!(
                "{what} needs {count} elementary checks, above the cap {}; lower the radius, sample, or pass --override-caps",
                self.max_work
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub suite: Suite,
    pub group: String,
    pub metric: MetricChoice,
    pub radius: Option<usize>,
    pub k: f64,
    pub c: Option<f64>,
    /// `None` when no `--p` was given; suites pick their own defaults.
    pub p: Option<Vec<f64>>,
    pub depth: Option<usize>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub g: Option<String>,
    pub truncation: usize,
    pub samples: Option<u64>,
    pub scale: f64,
    pub caps: Caps,
}

impl ScenarioConfig {
    /// Minimal config for a suite on a group, everything else at defaults.
    pub fn new(suite: Suite, group: &str) -> Self {
        ScenarioConfig {
            suite,
            group: group.into(),
            metric: MetricChoice::Word,
            radius: None,
            k: 1.0,
            c: None,
            p: None,
            depth: None,
            seed: 0,
            format: Format::Json,
            out: None,
            g: None,
            truncation: 12,
            samples: None,
            scale: 1.0,
            caps: Caps::default(),
        }
    }

    pub fn resolve(args: CheckArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());

        let suite: Suite = pick(args.suite, "suite")
            .ok_or_else(|| CliError::Usage("missing --suite".into()))?
            .parse()
            .map_err(CliError::Usage)?;
        let group = pick(args.group, "group").ok_or_else(|| CliError::Usage("missing --group".into()))?;
        let mut cfg = ScenarioConfig::new(suite, &group);
        if let Some(m) = pick(args.metric, "metric") {
            cfg.metric = m.parse().map_err(CliError::Usage)?;
        }
        cfg.radius = parse_opt(pick(args.radius.map(|v| v.to_string()), "radius"), "radius")?;
        if let Some(k) = parse_opt(pick(args.k.map(|v| v.to_string()), "K"), "K")? {
            cfg.k = k;
        }
        cfg.c = parse_opt(pick(args.c.map(|v| v.to_string()), "C"), "C")?;
        if let Some(p) = pick(args.p, "p") {
            cfg.p = Some(parse_p(&p)?);
        }
        cfg.depth = parse_opt(pick(args.depth.map(|v| v.to_string()), "depth"), "depth")?;
        if let Some(s) = parse_opt(pick(args.seed.map(|v| v.to_string()), "seed"), "seed")? {
            cfg.seed = s;
        }
        if let Some(f) = pick(args.format, "format") {
            cfg.format = f.parse().map_err(CliError::Usage)?;
        }
        cfg.out = pick(args.out.map(|p| p.display().to_string()), "out").map(PathBuf::from);
        cfg.g = pick(args.g, "g");
        if let Some(t) = parse_opt(pick(args.truncation.map(|v| v.to_string()), "truncation"), "truncation")? {
            cfg.truncation = t;
        }
        cfg.samples = parse_opt(pick(args.samples.map(|v| v.to_string()), "samples"), "samples")?;
        if let Some(s) = parse_opt(pick(args.scale.map(|v| v.to_string()), "scale"), "scale")? {
            cfg.scale = s;
        }
        if let Some(v) = parse_opt(pick(args.max_ball.map(|v| v.to_string()), "max-ball"), "max-ball")? {
            cfg.caps.max_ball = v;
        }
        if let Some(v) = parse_opt(pick(args.max_work.map(|v| v.to_string()), "max-work"), "max-work")? {
            cfg.caps.max_work = v;
        }
        cfg.caps.disabled = args.override_caps
            || parse_opt::<bool>(file.get("override-caps").cloned(), "override-caps")?.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.k.is_finite() && self.k > 0.0) {
            return bad(format!("K must be positive, got {}", self.k));
        }
        if let Some(c) = self.c {
            if !(c.is_finite() && c >= 0.0) {
                return bad(format!("C must be nonnegative, got {c}"));
            }
            if matches!(self.suite, Suite::Cocycle | Suite::Properness | Suite::All) && self.k <= 2.0 * c {
                return bad(format!("K = {} must exceed 2C = {}", self.k, 2.0 * c));
            }
        }
        if let Some(ps) = &self.p {
            if let Some(p) = ps.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
                return bad(format!("exponents must be positive, got {p}"));
            }
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if self.truncation == 0 {
            return bad("truncation must be positive".into());
        }
        if self.depth == Some(0) {
            return bad("depth must be positive".into());
        }
        Ok(())
    }
}

fn parse_opt<T: FromStr>(v: Option<String>, key: &str) -> Result<Option<T>, CliError> {
    v.map(|s| {
        s.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad value {s:?} for {key}")))
    })
    .transpose()
}

/// `x`, `a,b,c` or `lo:hi:step` (inclusive, step > 0).
pub fn parse_p(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad exponent spec {s:?}; expected x, a,b,c or lo:hi:step"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(num).collect::<Result<_, _>>()?;
        let [lo, hi, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0 && hi >= lo) || (hi - lo) / step > 10_000.0 {
            return Err(bad());
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        // round to kill accumulated binary noise in the grid labels
        return Ok((0..=n).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect());
    }
    s.split(',').map(num).collect()
}

const KEYS: &[&str] = &[
    "suite", "group", "metric", "radius", "K", "C", "p", "depth", "seed", "format", "out", "g", "truncation",
    "samples", "scale", "max-ball", "max-work", "override-caps",
];

/// Flat `key = value` lines; `#` starts a comment line.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key=value", n + 1)));
        };
        let k = k.trim();
        let key = match k {
            "k" => "K",
            "c" => "C",
            other => other,
        };
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!("config line {}: unknown key {k:?}", n + 1)));
        }
        out.insert(key.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_specs() {
        assert_eq!(parse_p("2").unwrap(), vec![2.0]);
        assert_eq!(parse_p("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_p("1:1.3:0.1").unwrap(), vec![1.0, 1.1, 1.2, 1.3]);
        assert!(parse_p("1:0:0.1").is_err());
        assert!(parse_p("x").is_err());
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# comment\nsuite = kms\nk=3\n\nseed=9\n").unwrap();
        assert_eq!(m["suite"], "kms");
        assert_eq!(m["K"], "3");
        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("colour=red").is_err());
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "suite=cocycle\ngroup=free:3\nK=2\nseed=5\n").unwrap();
        let args = CheckArgs {
            group: Some("free:2".into()),
            config: Some(path),
            ..Default::default()
        };
        let cfg = ScenarioConfig::resolve(args).unwrap();
        assert_eq!(cfg.suite, Suite::Cocycle);
        assert_eq!(cfg.group, "free:2");
        assert_eq!(cfg.k, 2.0);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.truncation, 12);
    }

    #[test]
    fn invalid_configs() {
        let base = || CheckArgs {
            suite: Some("cocycle".into()),
            group: Some("free:2".into()),
            ..Default::default()
        };
        assert!(ScenarioConfig::resolve(CheckArgs { k: Some(1.0), c: Some(0.5), ..base() }).is_err());
        assert!(ScenarioConfig::resolve(CheckArgs { suite: Some("nope".into()), ..base() }).is_err());
        assert!(ScenarioConfig::resolve(CheckArgs { group: None, ..base() }).is_err());
        let missing = ScenarioConfig::resolve(CheckArgs { config: Some("/nonexistent/x.conf".into()), ..base() });
        assert!(matches!(missing, Err(CliError::Io(_))));
    }
}
