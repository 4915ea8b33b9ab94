//! Random Markov maps for property testing.
//!
//! Laps have grid endpoints `k/G` and integer slopes, so every grid point maps
//! to a grid point and all breakpoint orbits are eventually periodic or escape.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::map_model::{int, rat, validate_map, HoleMap, Lap, Piece, Rational, ValidatedMap};
use crate::markov::{build_markov_partition, transition_matrix};
use crate::spectral::{spectral_radius, PowerOptions};
use crate::symbolic::{kneading_data, OrbitOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusOptions {
    /// Inclusive range of grid denominators.
    pub grid: (i64, i64),
    /// Inclusive range of lap counts.
    pub laps: (usize, usize),
    /// Every lap maps onto the whole domain.
    pub full_branch: bool,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            grid: (8, 16),
            laps: (2, 4),
            full_branch: false,
        }
    }
}

fn g(k: i64, den: i64) -> Rational {
    rat(k, den)
}

/// One random map on `[0, 1]` with fixed endpoints. The hole is one of the
/// interior grid intervals between laps.
pub fn random_markov_map(rng: &mut ChaCha8Rng, opts: &CorpusOptions) -> HoleMap {
    loop {
        let den = rng.random_range(opts.grid.0..=opts.grid.1);
        let n = rng.random_range(opts.laps.0..=opts.laps.1);
        if (n as i64) + 1 > den {
            continue;
        }
        // n cuts split [0, den] into n laps plus the hole
        let mut cuts: Vec<i64> = Vec::new();
        while cuts.len() < n {
            let c = rng.random_range(1..den);
            if !cuts.contains(&c) {
                cuts.push(c);
            }
        }
        cuts.sort_unstable();
        let mut ends = vec![0];
        ends.extend(&cuts);
        ends.push(den);
        let hole = rng.random_range(1..n);
        let mut laps = Vec::with_capacity(n);
        let mut ok = true;
        for i in 0..=n {
            if i == hole {
                continue;
            }
            let (lo, hi) = (ends[i], ends[i + 1]);
            let m = hi - lo;
            let max_slope = den / m;
            if max_slope < 2 || (opts.full_branch && den % m != 0) {
                ok = false;
                break;
            }
            let (img_lo, img_hi, increasing) = if opts.full_branch {
                let inc = i == 0 || i == n || rng.random_bool(0.5);
                (0, den, inc)
            } else {
                let len = m * rng.random_range(2..=max_slope);
                if i == 0 {
                    (0, len, true)
                } else if i == n {
                    (den - len, den, true)
                } else {
                    let start = rng.random_range(0..=den - len);
                    (start, start + len, rng.random_bool(0.5))
                }
            };
            let (from, to) = if increasing { (img_lo, img_hi) } else { (img_hi, img_lo) };
            // F(lo) = from, F(hi) = to on the grid
            let slope = rat(to - from, m);
            let intercept = g(from, den) - &slope * g(lo, den);
            laps.push(Lap::new(g(lo, den), g(hi, den), slope, intercept));
        }
        if !ok {
            continue;
        }
        return HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps,
            hole: (g(ends[hole], den), g(ends[hole + 1], den)),
        };
    }
}

/// Whether the transition graph on the non-hole intervals of the Markov
/// partition is strongly connected with Perron root above 1.
///
/// Non-transitive maps can have a transient cycle (typically a fixed
/// endpoint) whose weight dominates the Perron root at some `beta`. That root
/// is a root of `R(t)`, invisible to the determinant, and the two numerical
/// routes then disagree.
pub fn is_transitive(map: &ValidatedMap) -> bool {
    let Ok(data) = kneading_data(map, &OrbitOptions::default()) else {
        return false;
    };
    let Ok(part) = build_markov_partition(map, &data) else {
        return false;
    };
    let a = transition_matrix(map, &part);
    let live: Vec<usize> = (0..part.m())
        .filter(|&i| part.intervals[i].piece != Piece::Hole)
        .collect();
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = live.iter().map(|_| g.add_node(())).collect();
    for (x, &i) in live.iter().enumerate() {
        for (y, &j) in live.iter().enumerate() {
            if a[i][j] == 1 {
                g.add_edge(nodes[y], nodes[x], ());
            }
        }
    }
    if tarjan_scc(&g).len() != 1 {
        return false;
    }
    let af: Vec<Vec<f64>> = live
        .iter()
        .map(|&i| live.iter().map(|&j| a[i][j] as f64).collect())
        .collect();
    spectral_radius(&af, &PowerOptions::default()).is_ok_and(|r| r.value > 1.0 + 1e-9)
}

/// `count` validated transitive maps from `seed`; every fourth one
/// is full-branch.
pub fn corpus(seed: u64, count: usize) -> Vec<ValidatedMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let opts = CorpusOptions {
            full_branch: out.len() % 4 == 3,
            ..CorpusOptions::default()
        };
        let mut h = random_markov_map(&mut rng, &opts);
        h.name = Some(format!("corpus-{seed}-{}", out.len()));
        if let Ok(m) = validate_map(h, true) {
            if is_transitive(&m) {
                out.push(m);
            }
        }
    }
    out
}
