use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{MetricStructure, NUMERIC_FLOOR};
use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement};

/// Largest number of ordered quadruples an exhaustive scan will visit.
pub const FOUR_POINT_CAP: u64 = 60_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// Outcome of the scan of `e^{−⟨x,y⟩_o} ≤ e^{−⟨x,z⟩_o} + e^{−⟨z,y⟩_o}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourPointReport {
    /// Largest violation, 0 when every defect is at most [`NUMERIC_FLOOR`].
    pub max_defect: f64,
    /// `(x, y, z, o)` attaining the largest defect; present iff `max_defect > 0`.
    pub witness: Option<[GroupElement; 4]>,
    pub checked: u64,
    /// Smallest `δ` with `⟨x,y⟩_o ≥ min(⟨x,z⟩_o, ⟨z,y⟩_o) − δ` on the checked quadruples.
    pub gromov_delta: f64,
}

pub fn check_strong_hyperbolicity(
    m: &MetricStructure,
    ball: &Ball,
    mode: ScanMode,
) -> Result<FourPointReport> {
    check_strong_hyperbolicity_capped(m, ball, mode, FOUR_POINT_CAP)
}

/// Best value found for one basepoint: defect and `(x, y, z)`.
#[derive(Clone, Copy)]
struct Best {
    defect: f64,
    at: [usize; 3],
    delta: f64,
}

pub fn check_strong_hyperbolicity_capped(
    m: &MetricStructure,
    ball: &Ball,
    mode: ScanMode,
    cap: u64,
) -> Result<FourPointReport> {
    let n = ball.len();
    if n == 0 {
        return Err(Error::Input("empty ball".into()));
    }
    let dist = m.distance_matrix(ball)?;
    let d = &dist.values;
    // ⟨x,y⟩_o for a fixed o, row-major
    let products = |o: usize| -> Vec<f64> {
        let mut p = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                p[x * n + y] = 0.5 * (d[o * n + x] + d[o * n + y] - d[x * n + y]);
            }
        }
        p
    };

    let (best, checked) = match mode {
        ScanMode::Exhaustive => {
            let total = (n as u64).pow(4);
            if total > cap {
                return Err(Error::Resource(format!(
                    "exhaustive four-point scan over {n} elements needs {total} quadruples, cap is {cap}"
                )));
            }
            let per_o: Vec<(usize, Best)> = (0..n)
                .into_par_iter()
                .map(|o| (o, scan_basepoint(n, &products(o))))
                .collect();
            let mut best: Option<(usize, Best)> = None;
            for (o, b) in per_o {
                // strict improvement keeps the lexicographically first witness
                best = match best {
                    Some((bo, bb)) if bb.defect >= b.defect => Some((bo, Best {
                        delta: bb.delta.max(b.delta),
                        ..bb
                    })),
                    Some((_, bb)) => Some((o, Best {
                        delta: bb.delta.max(b.delta),
                        ..b
                    })),
                    None => Some((o, b)),
                };
            }
            (best.expect("ball is nonempty"), total)
        }
        ScanMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = (
                0,
                Best {
                    defect: f64::NEG_INFINITY,
                    at: [0; 3],
                    delta: f64::NEG_INFINITY,
                },
            );
            for _ in 0..samples {
                let [o, x, y, z] = [0; 4].map(|_| rng.gen_range(0..n));
                let g = |a: usize, b: usize| 0.5 * (d[o * n + a] + d[o * n + b] - d[a * n + b]);
                let (a, b, c) = (g(x, y), g(x, z), g(z, y));
                let defect = (-a).exp() - (-b).exp() - (-c).exp();
                if defect > best.1.defect {
                    best.0 = o;
                    best.1.defect = defect;
                    best.1.at = [x, y, z];
                }
                best.1.delta = best.1.delta.max(b.min(c) - a);
            }
            (best, samples)
        }
    };
    let (o, b) = best;
    let defect = if b.defect > NUMERIC_FLOOR { b.defect } else { 0.0 };
    let witness = (defect > 0.0).then(|| {
        let [x, y, z] = b.at;
        [ball.element(x), ball.element(y), ball.element(z), ball.element(o)]
    });
    Ok(FourPointReport {
        max_defect: defect,
        witness,
        checked,
        gromov_delta: if b.delta > NUMERIC_FLOOR { b.delta } else { 0.0 },
    })
}

/// Exhaustive scan over `(x, y, z)` for one basepoint, using
/// `defect(x,y) = e^{−⟨x,y⟩} − min_z (e^{−⟨x,z⟩} + e^{−⟨z,y⟩})`.
fn scan_basepoint(n: usize, p: &[f64]) -> Best {
    let e: Vec<f64> = p.iter().map(|v| (-v).exp()).collect();
    // column access for ⟨z, y⟩ through the symmetric matrix: row y
    let mut best = Best {
        defect: f64::NEG_INFINITY,
        at: [0; 3],
        delta: f64::NEG_INFINITY,
    };
    for x in 0..n {
        let ex = &e[x * n..(x + 1) * n];
        let px = &p[x * n..(x + 1) * n];
        for y in 0..n {
            let ey = &e[y * n..(y + 1) * n];
            let py = &p[y * n..(y + 1) * n];
            let mut min_sum = f64::INFINITY;
            let mut max_min = f64::NEG_INFINITY;
            for z in 0..n {
                min_sum = min_sum.min(ex[z] + ey[z]);
                max_min = max_min.max(px[z].min(py[z]));
            }
            let defect = e[x * n + y] - min_sum;
            if defect > best.defect {
                let z = (0..n)
                    .find(|&z| ex[z] + ey[z] == min_sum)
                    .expect("minimum is attained");
                best.defect = defect;
                best.at = [x, y, z];
            }
            best.delta = best.delta.max(max_min - p[x * n + y]);
        }
    }
    best
}
