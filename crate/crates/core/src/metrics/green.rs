use std::collections::VecDeque;
use std::sync::Arc;

use super::MetricStructure;
use crate::error::{input, Error, Result};
use crate::group::{Ball, BallOptions, Group, GroupElement, Letter};

const MAX_SWEEPS: usize = 20_000;

/// How the solver treats neighbours that fall outside the truncation ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryClosure {
    /// The walk is killed on leaving the ball.
    Absorbing,
    /// An off-ball neighbour `x·s` takes the value `u(s)·u(x)`, which is still a lower
    /// bound for the hitting probability and is exact for nearest-neighbour walks on trees.
    SubMultiplicative,
}

/// A symmetric, finitely supported random walk with its solver settings.
#[derive(Clone, Debug)]
pub struct GreenWalk {
    pub steps: Vec<(GroupElement, f64)>,
    pub truncation: usize,
    pub tolerance: f64,
    pub closure: BoundaryClosure,
}

impl GreenWalk {
    /// Uniform measure on the generating letters.
    pub fn simple(group: &Group, truncation: usize, tolerance: f64) -> GreenWalk {
        let gens = group.generators();
        let w = 1.0 / gens.len() as f64;
        GreenWalk {
            steps: gens.into_iter().map(|g| (g, w)).collect(),
            truncation,
            tolerance,
            closure: BoundaryClosure::SubMultiplicative,
        }
    }

    pub fn with_closure(mut self, closure: BoundaryClosure) -> GreenWalk {
        self.closure = closure;
        self
    }

    fn validate(&self, group: &Group) -> Result<()> {
        if self.steps.is_empty() {
            return input("random walk has empty support");
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return input(format!("solver tolerance must be positive, got {}", self.tolerance));
        }
        if self.truncation == 0 {
            return input("truncation radius must be positive");
        }
        let mut total = 0.0;
        for (g, w) in &self.steps {
            group.check_member(g)?;
            if !(w.is_finite() && *w > 0.0) {
                return input(format!("step weight {w} is not positive"));
            }
            if group.is_trivial(g) {
                return input("random walk support contains the identity");
            }
            total += w;
            let inv = group.invert(g);
            let mirrored: f64 = self
                .steps
                .iter()
                .filter(|(h, _)| group.equal(h, &inv))
                .map(|(_, v)| v)
                .sum();
            let own: f64 = self
                .steps
                .iter()
                .filter(|(h, _)| group.equal(h, g))
                .map(|(_, v)| v)
                .sum();
            if (mirrored - own).abs() > 1e-12 {
                return input(format!(
                    "random walk is not symmetric at {}",
                    group.format(g)
                ));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return input(format!("step weights sum to {total}, not 1"));
        }
        Ok(())
    }
}

/// Hitting probabilities `u(x) = P_x(hit 1)` on the truncation ball; `F(x, y) = u(y⁻¹x)`.
#[derive(Clone, Debug)]
pub struct GreenSolution {
    ball: Arc<Ball>,
    u: Vec<f64>,
    pub truncation: usize,
    pub tolerance: f64,
    pub sweeps: usize,
    /// Largest change of `−log u` on the coarser ball when the truncation radius grows by two.
    pub gap: f64,
}

impl GreenSolution {
    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    /// `−log u(w)` and its error bound.
    pub fn length(&self, word: &[Letter]) -> Result<(f64, f64)> {
        let i = self.ball.locate(word).ok_or_else(|| {
            Error::Resource(format!(
                "Green metric query of length {} outside the truncation radius {}",
                word.len(),
                self.truncation
            ))
        })?;
        let u = self.u[i];
        Ok((-u.ln(), self.gap + 10.0 * self.tolerance / u))
    }

    pub fn hitting_probability(&self, i: usize) -> f64 {
        self.u[i]
    }

    pub(crate) fn geodesic_word(&self, word: &[Letter]) -> Result<Vec<Letter>> {
        let i = self.ball.locate(word).ok_or_else(|| {
            Error::Resource("rough geodesic endpoint outside the truncation ball".into())
        })?;
        Ok(self.ball.word(i))
    }
}

/// Green metric `d_G(x, y) = −log F(x, y)` of a symmetric random walk.
pub fn build_green_metric(group: &Arc<Group>, walk: &GreenWalk) -> Result<MetricStructure> {
    walk.validate(group)?;
    let ball = Arc::new(Ball::build(group, walk.truncation, BallOptions::default())?);
    check_generates(group, &ball, walk)?;
    let (u, sweeps) = solve(&ball, walk)?;
    let gap = if walk.truncation > 2 {
        let coarse_walk = GreenWalk {
            truncation: walk.truncation - 2,
            ..walk.clone()
        };
        let coarse = Ball::build(group, coarse_walk.truncation, BallOptions::default())?;
        let (uc, _) = solve(&coarse, &coarse_walk)?;
        // shortlex order makes the coarse ball a prefix of the fine one
        uc.iter()
            .zip(&u)
            .map(|(a, b)| (a.ln() - b.ln()).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let solution = GreenSolution {
        ball,
        u,
        truncation: walk.truncation,
        tolerance: walk.tolerance,
        sweeps,
        gap,
    };
    let mut m = MetricStructure::from_green(group, solution, 0.0);
    m.rough_constant = empirical_rough_constant(&m)?;
    Ok(m)
}

fn check_generates(group: &Group, ball: &Ball, walk: &GreenWalk) -> Result<()> {
    let targets: Vec<usize> = group
        .alphabet()
        .letters()
        .filter_map(|l| ball.step(0, l))
        .collect();
    let steps: Vec<&[Letter]> = walk.steps.iter().map(|(g, _)| g.word()).collect();
    let mut seen = vec![false; ball.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut missing = targets.len();
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            if let Some(y) = ball.walk(x, s) {
                if !seen[y] {
                    seen[y] = true;
                    if targets.contains(&y) {
                        missing -= 1;
                        if missing == 0 {
                            return Ok(());
                        }
                    }
                    queue.push_back(y);
                }
            }
        }
    }
    if targets.iter().all(|&t| seen[t]) {
        return Ok(());
    }
    input("random walk support does not generate the group within the truncation ball")
}

const OFF: u32 = u32::MAX;

fn solve(ball: &Ball, walk: &GreenWalk) -> Result<(Vec<f64>, usize)> {
    let n = ball.len();
    let m = walk.steps.len();
    let group = ball.group();
    let mut nb = vec![OFF; n * m];
    for x in 0..n {
        for (j, (s, _)) in walk.steps.iter().enumerate() {
            let y = ball.walk(x, s.word()).or_else(|| {
                if s.len() > 1 {
                    let mut w = ball.word(x);
                    w.extend_from_slice(s.word());
                    ball.locate(&w)
                } else {
                    None
                }
            });
            if let Some(y) = y {
                nb[x * m + j] = y as u32;
            }
        }
    }
    let step_idx: Vec<Option<usize>> = walk
        .steps
        .iter()
        .map(|(s, _)| ball.index_of(s))
        .collect();
    if walk.closure == BoundaryClosure::SubMultiplicative && step_idx.iter().any(Option::is_none) {
        return Err(Error::Resource(format!(
            "walk support is longer than the truncation radius of {}",
            group.name()
        )));
    }
    let weights: Vec<f64> = walk.steps.iter().map(|(_, w)| *w).collect();
    let mut u = vec![0.0f64; n];
    u[0] = 1.0;
    for sweep in 1..=MAX_SWEEPS {
        let mut delta: f64 = 0.0;
        for x in 1..n {
            let row = &nb[x * m..(x + 1) * m];
            let mut acc = 0.0;
            let mut off = 0.0;
            for j in 0..m {
                let y = row[j];
                if y != OFF {
                    acc += weights[j] * u[y as usize];
                } else if walk.closure == BoundaryClosure::SubMultiplicative {
                    off += weights[j] * u[step_idx[j].expect("checked above")];
                }
            }
            // u(x) = acc + off·u(x), solved for u(x)
            let new = acc / (1.0 - off);
            delta = delta.max((new - u[x]).abs());
            u[x] = new;
        }
        if !delta.is_finite() {
            return Err(Error::Numeric("Green solver diverged".into()));
        }
        if delta < walk.tolerance {
            if u.iter().any(|&v| v <= 0.0) {
                return Err(Error::Numeric(
                    "Green solver produced a vanishing hitting probability".into(),
                ));
            }
            return Ok((u, sweep));
        }
    }
    Err(Error::Numeric(format!(
        "Green solver did not reach tolerance {} in {MAX_SWEEPS} sweeps",
        walk.tolerance
    )))
}

/// Largest deviation from the rough-geodesic inequality along word-geodesic paths
/// from the identity to the radius-2 ball.
fn empirical_rough_constant(m: &MetricStructure) -> Result<f64> {
    let group = m.group().clone();
    let small = crate::group::enumerate_ball(&group, 2)?;
    let one = group.identity();
    let mut c: f64 = 0.0;
    for y in small.elements().skip(1) {
        c = c.max(m.rough_geodesic(&one, &y)?.constant);
    }
    Ok(c)
}
