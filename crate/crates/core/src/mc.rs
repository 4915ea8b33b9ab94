//! Statistical cross-checks: particle survival for the escape rate and
//! cylinder enumeration for the dimension.
//!
//! Seed splitting: points are drawn in batches of [`BATCH_SIZE`]. Batch `b`
//! uses `ChaCha8Rng::seed_from_u64(seed)` moved to stream `b`, so the series
//! depends only on `(seed, n_points)` and not on how batches are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::McError;
use crate::map_model::ValidatedMap;
use crate::spectral::rational_to_f64;

pub const BATCH_SIZE: usize = 1 << 16;
pub const MIN_POINTS: usize = 1000;
pub const MAX_CYLINDERS: usize = 10_000_000;
pub const MAX_CYLINDER_DEPTH: usize = 12;
const BREAKPOINT_GUARD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalSeries {
    pub n_points: usize,
    /// Survivors after `k = 0..=k_max` iterations.
    pub counts: Vec<u64>,
    pub seed: u64,
}

/// The map in double precision.
#[derive(Clone, Debug)]
struct FloatMap {
    lo: f64,
    hi: f64,
    lap_lo: Vec<f64>,
    lap_hi: Vec<f64>,
    slope: Vec<f64>,
    intercept: Vec<f64>,
    hole: (f64, f64),
    breakpoints: Vec<f64>,
}

impl FloatMap {
    fn new(map: &ValidatedMap) -> Self {
        let laps = map.laps();
        let (lo, hi) = map.domain();
        let (h0, h1) = map.hole();
        FloatMap {
            lo: rational_to_f64(lo),
            hi: rational_to_f64(hi),
            lap_lo: laps.iter().map(|l| rational_to_f64(&l.lo)).collect(),
            lap_hi: laps.iter().map(|l| rational_to_f64(&l.hi)).collect(),
            slope: laps.iter().map(|l| rational_to_f64(&l.slope)).collect(),
            intercept: laps.iter().map(|l| rational_to_f64(&l.intercept)).collect(),
            hole: (rational_to_f64(h0), rational_to_f64(h1)),
            breakpoints: map.breakpoints().iter().map(rational_to_f64).collect(),
        }
    }

    fn in_hole(&self, x: f64) -> bool {
        x > self.hole.0 && x < self.hole.1
    }

    fn near_breakpoint(&self, x: f64) -> bool {
        self.breakpoints.iter().any(|b| (x - b).abs() < BREAKPOINT_GUARD)
    }

    /// Image of a point outside the hole.
    fn step(&self, x: f64) -> f64 {
        // last lap whose left end is <= x
        let i = self.lap_lo.partition_point(|&l| l <= x).saturating_sub(1);
        let y = self.slope[i] * x + self.intercept[i];
        y.clamp(self.lo, self.hi)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let u: f64 = rng.random();
            let x = self.lo + (self.hi - self.lo) * u;
            if !self.near_breakpoint(x) {
                return x;
            }
        }
    }
}

fn run_batch(fm: &FloatMap, seed: u64, batch: usize, size: usize, k_max: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    let mut counts = vec![0u64; k_max + 1];
    for _ in 0..size {
        let mut x = fm.sample(&mut rng);
        for c in counts.iter_mut() {
            if fm.in_hole(x) {
                break;
            }
            *c += 1;
            x = fm.step(x);
        }
    }
    counts
}

/// Iterates `n_points` uniform points for up to `k_max` steps; a point dies
/// when it lands in the open hole.
pub fn simulate_survival(
    map: &ValidatedMap,
    n_points: usize,
    k_max: usize,
    seed: u64,
) -> Result<SurvivalSeries, McError> {
    if n_points < MIN_POINTS {
        return Err(McError::Invalid(format!(
            "n_points must be at least {MIN_POINTS}, got {n_points}"
        )));
    }
    let fm = FloatMap::new(map);
    let n_batches = n_points.div_ceil(BATCH_SIZE);
    let per_batch: Vec<Vec<u64>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let size = BATCH_SIZE.min(n_points - b * BATCH_SIZE);
            run_batch(&fm, seed, b, size, k_max)
        })
        .collect();
    let mut counts = vec![0u64; k_max + 1];
    for c in per_batch {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
    }
    Ok(SurvivalSeries {
        n_points,
        counts,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeEstimate {
    pub gamma_hat: f64,
    pub std_err: f64,
    /// Number of `(k, log count)` pairs in the fit.
    pub points_used: usize,
}

pub const MIN_FIT_POINTS: usize = 5;
pub const MIN_FIT_COUNT: u64 = 100;

/// Negated least-squares slope of `log counts[k]` against `k` for
/// `k >= burn_in`, stopping at the first count of at most 100.
pub fn estimate_escape_rate(series: &SurvivalSeries, burn_in: usize) -> Result<EscapeEstimate, McError> {
    let pts: Vec<(f64, f64)> = series
        .counts
        .iter()
        .enumerate()
        .skip(burn_in)
        .take_while(|(_, &c)| c > MIN_FIT_COUNT)
        .map(|(k, &c)| (k as f64, (c as f64).ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(McError::InsufficientData {
            needed: MIN_FIT_POINTS,
            threshold: MIN_FIT_COUNT,
            have: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let std_err = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(EscapeEstimate {
        // -0.0 for constant counts reads oddly in reports
        gamma_hat: -slope + 0.0,
        std_err,
        points_used: pts.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderDimension {
    /// Extrapolated dimension at the deepest level.
    pub dimension: f64,
    /// `s_k` solving `sum |C|^s = 1` over depth-`k` cylinders, `k = 0..=depth`.
    pub per_depth: Vec<f64>,
    /// Cylinder counts per depth.
    pub counts: Vec<usize>,
}

/// Survivor cylinders: `C_0` are the two components of `I \ H`; a depth-`k`
/// cylinder is `L ∩ F_L^{-1}(C)` for a lap `L` and a depth-`(k-1)` cylinder
/// `C`. Lengths are computed in double precision.
fn cylinder_lengths(map: &ValidatedMap, depth: usize) -> Result<Vec<Vec<f64>>, McError> {
    let fm = FloatMap::new(map);
    let mut level: Vec<(f64, f64)> = vec![(fm.lo, fm.hole.0), (fm.hole.1, fm.hi)];
    let mut out = vec![level.iter().map(|c| c.1 - c.0).collect::<Vec<_>>()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for i in 0..fm.slope.len() {
            let (s, b) = (fm.slope[i], fm.intercept[i]);
            let (llo, lhi) = (fm.lap_lo[i], fm.lap_hi[i]);
            for &(c0, c1) in &level {
                let (p, q) = ((c0 - b) / s, (c1 - b) / s);
                let (lo, hi) = (p.min(q).max(llo), p.max(q).min(lhi));
                if hi > lo {
                    next.push((lo, hi));
                }
            }
            if next.len() > MAX_CYLINDERS {
                return Err(McError::CombinatorialBlowup {
                    count: next.len(),
                    limit: MAX_CYLINDERS,
                });
            }
        }
        out.push(next.iter().map(|c| c.1 - c.0).collect());
        level = next;
    }
    Ok(out)
}

fn log_partition_sum(lengths: &[f64], s: f64) -> f64 {
    lengths.iter().map(|l| l.powf(s)).sum::<f64>().ln()
}

fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    if f(b) >= 0.0 {
        return 1.0;
    }
    if f(a) <= 0.0 {
        return 0.0;
    }
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Dimension from cylinder lengths. Each `s_k` solves `Z_k(s) = 1` where
/// `Z_k(s) = sum |C|^s`; these converge like `1/k`. The returned estimate
/// instead solves `Z_k(s) = Z_{k-1}(s)`, the growth rate of the partition
/// sums, which removes the `1/k` term.
pub fn cylinder_dimension(map: &ValidatedMap, depth: usize) -> Result<CylinderDimension, McError> {
    if depth == 0 || depth > MAX_CYLINDER_DEPTH {
        return Err(McError::Invalid(format!(
            "depth must be in 1..={MAX_CYLINDER_DEPTH}, got {depth}"
        )));
    }
    let levels = cylinder_lengths(map, depth)?;
    let per_depth = levels.iter().map(|l| bisect(|s| log_partition_sum(l, s))).collect();
    let (prev, last) = (&levels[depth - 1], &levels[depth]);
    let dimension = bisect(|s| log_partition_sum(last, s) - log_partition_sum(prev, s));
    Ok(CylinderDimension {
        dimension,
        per_depth,
        counts: levels.iter().map(|l| l.len()).collect(),
    })
}
