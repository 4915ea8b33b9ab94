//! Markov partition refined by the critical orbits, the transfer matrices
//! `A` and `Q`, the chain-level matrices `B`, `V`, `U`, `K`, `Pi`, `Theta`,
//! and exact verification of the factorization identities.

use std::fmt;

use num_bigint::BigInt;

use crate::error::MarkovError;
use crate::map_model::{Piece, Rational, SidedPoint, Side, ValidatedMap};
use crate::matrix::{char_poly, PolyMatrix};
use crate::poly::{product, CyclotomicFactor, Monomial, WeightPoly, WeightRationalFn};
use crate::symbolic::KneadingData;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub piece: Piece,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovPartition {
    /// Sorted distinct points `b_1 < ... < b_{m+1}`.
    pub points: Vec<Rational>,
    pub intervals: Vec<MarkovInterval>,
}

impl MarkovPartition {
    pub fn m(&self) -> usize {
        self.intervals.len()
    }

    /// Indices of the intervals that make up the hole.
    pub fn hole_indices(&self) -> Vec<usize> {
        (0..self.m())
            .filter(|&j| self.intervals[j].piece == Piece::Hole)
            .collect()
    }

    fn contains_point(&self, x: &Rational) -> bool {
        self.points.binary_search(x).is_ok()
    }
}

pub fn build_markov_partition(map: &ValidatedMap, data: &KneadingData) -> Result<MarkovPartition, MarkovError> {
    let mut points: Vec<Rational> = map.breakpoints().to_vec();
    for e in data.entries.iter().chain(&data.endpoints) {
        if e.orbit.class.is_truncated() {
            return Err(MarkovError::NotMarkov(e.point.label()));
        }
        points.extend(e.orbit.points.iter().map(|p| p.x.clone()));
    }
    points.sort();
    points.dedup();
    let intervals: Vec<MarkovInterval> = points
        .windows(2)
        .map(|w| {
            let piece = map.locate(&SidedPoint::new(w[0].clone(), Side::Right));
            MarkovInterval {
                lo: w[0].clone(),
                hi: w[1].clone(),
                piece,
            }
        })
        .collect();
    let part = MarkovPartition { points, intervals };
    for iv in &part.intervals {
        if let Piece::Lap(l) = iv.piece {
            let lap = map.lap(l);
            for x in [&iv.lo, &iv.hi] {
                let y = lap.apply(x);
                if !part.contains_point(&y) {
                    return Err(MarkovError::NotMarkov(format!("image {y} of partition point {x}")));
                }
            }
        }
    }
    Ok(part)
}

/// `a_ij = 1` iff `F(int J_j)` covers `int J_i`; hole columns are zero.
pub fn transition_matrix(map: &ValidatedMap, part: &MarkovPartition) -> Vec<Vec<u8>> {
    let m = part.m();
    let mut a = vec![vec![0u8; m]; m];
    for (j, src) in part.intervals.iter().enumerate() {
        let Piece::Lap(l) = src.piece else { continue };
        let lap = map.lap(l);
        let (y0, y1) = (lap.apply(&src.lo), lap.apply(&src.hi));
        let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        for (i, dst) in part.intervals.iter().enumerate() {
            if lo <= dst.lo && dst.hi <= hi {
                a[i][j] = 1;
            }
        }
    }
    a
}

/// `Q = A * diag(w_{lap(J_j)})`.
pub fn weighted_transition_matrix(map: &ValidatedMap, a: &[Vec<u8>], part: &MarkovPartition) -> PolyMatrix {
    let n = map.n_laps();
    let m = part.m();
    let mut q = PolyMatrix::zeros(m, m, n);
    for (j, iv) in part.intervals.iter().enumerate() {
        let Piece::Lap(l) = iv.piece else { continue };
        for (i, row) in a.iter().enumerate() {
            if row[j] == 1 {
                q.set(i, j, WeightPoly::weight(n, l));
            }
        }
    }
    q
}

/// A chain point: a lateral point of a breakpoint (with side) or an orbit
/// point that is not a breakpoint (no side).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPoint {
    pub x: Rational,
    pub side: Option<Side>,
    /// Lap containing the point, `None` for hole points.
    pub lap: Option<usize>,
}

impl fmt::Display for ChainPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Some(s) => write!(f, "{}{}", self.x, s.sign_char()),
            None => write!(f, "{}", self.x),
        }
    }
}

/// The 0-chain basis in spatial order (`y`) and in orbit-enumeration order
/// (`z`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainData {
    pub points: Vec<ChainPoint>,
    /// `(k, k + 1)` for the two sides of each interior breakpoint.
    pub pairs: Vec<(usize, usize)>,
    /// `z_of_y[i]` is the position of `y_i` in the `z` enumeration.
    pub z_of_y: Vec<usize>,
}

impl ChainData {
    pub fn q(&self) -> usize {
        self.points.len()
    }

    /// Index of the chain point at `x`, resolving breakpoints by `side`.
    pub fn lookup(&self, x: &Rational, side: Side) -> Option<usize> {
        let idx = self.points.partition_point(|p| p.x < *x);
        let first = self.points.get(idx)?;
        if first.x != *x {
            return None;
        }
        match self.points.get(idx + 1) {
            Some(next) if next.x == *x => Some(if side == Side::Left { idx } else { idx + 1 }),
            _ => Some(idx),
        }
    }
}

pub fn build_chain(map: &ValidatedMap, data: &KneadingData, part: &MarkovPartition) -> ChainData {
    let (lo, hi) = map.domain();
    let mut points = Vec::new();
    let mut pairs = Vec::new();
    let lap_of = |x: &Rational, side: Side| match map.locate(&SidedPoint::new(x.clone(), side)) {
        Piece::Lap(l) => Some(l),
        Piece::Hole => None,
    };
    for b in &part.points {
        if map.is_interior_breakpoint(b) {
            pairs.push((points.len(), points.len() + 1));
            for side in [Side::Left, Side::Right] {
                points.push(ChainPoint {
                    x: b.clone(),
                    side: Some(side),
                    lap: lap_of(b, side),
                });
            }
        } else {
            let side = if b == lo {
                Some(Side::Right)
            } else if b == hi {
                Some(Side::Left)
            } else {
                None
            };
            points.push(ChainPoint {
                x: b.clone(),
                side,
                lap: lap_of(b, side.unwrap_or(Side::Right)),
            });
        }
    }
    let mut chain = ChainData {
        points,
        pairs,
        z_of_y: Vec::new(),
    };

    let q = chain.q();
    let mut z_of_y = vec![usize::MAX; q];
    let mut next = 0;
    let mut visit = |i: usize, z: &mut Vec<usize>| {
        if z[i] == usize::MAX {
            z[i] = next;
            next += 1;
        }
    };
    for e in data.entries.iter().chain(&data.endpoints) {
        for p in &e.orbit.points {
            let i = chain.lookup(&p.x, p.side).expect("orbit points are chain points");
            visit(i, &mut z_of_y);
        }
    }
    for cp in &data.hole_inner {
        let p = cp.point(map);
        let i = chain.lookup(&p.x, p.side).expect("breakpoints are chain points");
        visit(i, &mut z_of_y);
    }
    for i in 0..q {
        visit(i, &mut z_of_y);
    }
    chain.z_of_y = z_of_y;
    chain
}

/// Incidence matrix: column `j` has `-1` at the lower and `+1` at the upper
/// chain point of `J_j`, taking breakpoint sides that face into `J_j`.
pub fn incidence_matrix(part: &MarkovPartition, chain: &ChainData) -> Vec<Vec<i64>> {
    let mut b = vec![vec![0i64; part.m()]; chain.q()];
    for (j, iv) in part.intervals.iter().enumerate() {
        let lower = chain.lookup(&iv.lo, Side::Right).expect("partition point");
        let upper = chain.lookup(&iv.hi, Side::Left).expect("partition point");
        b[lower][j] = -1;
        b[upper][j] = 1;
    }
    b
}

fn signed_weight(map: &ValidatedMap, lap: usize) -> WeightPoly {
    let n = map.n_laps();
    let mut exps = vec![0u32; n];
    exps[lap] = 1;
    WeightPoly::term(n, BigInt::from(map.lap(lap).sign()), Monomial::new(0, &exps))
}

/// The chain map on 0-chains. Column `j` sends `y_j` to `v * y_i` where
/// `F(y_j) = y_i` and `v = eps * w`, plus `+-v` on every breakpoint pair
/// crossed between `j` and `i` (upward: `+v` on the left side, `-v` on the
/// right side; downward: the opposite). Hole points map to zero.
pub fn v_matrix(map: &ValidatedMap, chain: &ChainData) -> Result<PolyMatrix, MarkovError> {
    let q = chain.q();
    let mut v = PolyMatrix::zeros(q, q, map.n_laps());
    for (j, y) in chain.points.iter().enumerate() {
        let Some(l) = y.lap else { continue };
        let lap = map.lap(l);
        let side = y.side.unwrap_or(Side::Right);
        let side = if lap.sign() < 0 { side.flip() } else { side };
        let image = lap.apply(&y.x);
        let i = chain.lookup(&image, side).ok_or_else(|| MarkovError::ImageNotInChain {
            point: y.to_string(),
            image: image.to_string(),
        })?;
        let w = signed_weight(map, l);
        let neg = -&w;
        v.add_to(i, j, &w);
        for &(minus, plus) in &chain.pairs {
            if i > j && j <= minus && plus <= i {
                v.add_to(minus, j, &w);
                v.add_to(plus, j, &neg);
            } else if i < j && i <= minus && plus <= j {
                v.add_to(minus, j, &neg);
                v.add_to(plus, j, &w);
            }
        }
    }
    Ok(v)
}

/// `U` (laps x chain points, 1 where the point lies in the lap).
pub fn u_matrix(map: &ValidatedMap, chain: &ChainData) -> Vec<Vec<u8>> {
    let mut u = vec![vec![0u8; chain.q()]; map.n_laps()];
    for (i, y) in chain.points.iter().enumerate() {
        if let Some(l) = y.lap {
            u[l][i] = 1;
        }
    }
    u
}

/// `K = diag(eps_i w_i)`.
pub fn k_matrix(map: &ValidatedMap) -> PolyMatrix {
    let n = map.n_laps();
    let mut k = PolyMatrix::zeros(n, n, n);
    for l in 0..n {
        k.set(l, l, signed_weight(map, l));
    }
    k
}

/// Permutation matrix with `Pi[z(i)][i] = 1`.
pub fn pi_matrix(chain: &ChainData, nvars: usize) -> PolyMatrix {
    let q = chain.q();
    let mut p = PolyMatrix::zeros(q, q, nvars);
    for (i, &z) in chain.z_of_y.iter().enumerate() {
        p.set(z, i, WeightPoly::one(nvars));
    }
    p
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixBundle {
    pub partition: MarkovPartition,
    pub chain: ChainData,
    pub a: Vec<Vec<u8>>,
    pub q: PolyMatrix,
    pub b: Vec<Vec<i64>>,
    pub v: PolyMatrix,
    pub u: Vec<Vec<u8>>,
    pub k: PolyMatrix,
    pub pi: PolyMatrix,
    pub theta: PolyMatrix,
}

impl MatrixBundle {
    pub fn b_poly(&self) -> PolyMatrix {
        PolyMatrix::from_ints(&self.b, self.q.nvars())
    }

    pub fn u_poly(&self) -> PolyMatrix {
        let rows: Vec<Vec<i64>> = self
            .u
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        PolyMatrix::from_ints(&rows, self.q.nvars())
    }
}

pub fn build_bundle(map: &ValidatedMap, data: &KneadingData) -> Result<MatrixBundle, MarkovError> {
    let partition = build_markov_partition(map, data)?;
    let a = transition_matrix(map, &partition);
    let q = weighted_transition_matrix(map, &a, &partition);
    let chain = build_chain(map, data, &partition);
    let b = incidence_matrix(&partition, &chain);
    let v = v_matrix(map, &chain)?;
    let u = u_matrix(map, &chain);
    let k = k_matrix(map);
    let pi = pi_matrix(&chain, map.n_laps());
    let theta = pi.mul(&v).mul(&pi.transpose());
    Ok(MatrixBundle {
        partition,
        chain,
        a,
        q,
        b,
        v,
        u,
        k,
        pi,
        theta,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<IdentityCheck>,
    pub char_poly_q: WeightPoly,
    pub char_poly_v: WeightPoly,
    pub char_poly_k: WeightPoly,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn matrix_check(name: &str, left: &PolyMatrix, right: &PolyMatrix) -> IdentityCheck {
    let detail = left.first_difference(right).map(|(i, j)| {
        format!(
            "entry ({}, {}): {} != {}",
            i + 1,
            j + 1,
            left.get(i, j),
            right.get(i, j)
        )
    });
    IdentityCheck {
        name: name.into(),
        passed: detail.is_none(),
        detail,
    }
}

fn poly_check(name: &str, left: &WeightPoly, right: &WeightPoly) -> IdentityCheck {
    let diff = left - right;
    let detail = diff
        .terms()
        .next()
        .map(|(m, c)| format!("differ in the coefficient of {}: {}", WeightPoly::term(diff.nvars(), BigInt::from(1), m.clone()), c));
    IdentityCheck {
        name: name.into(),
        passed: detail.is_none(),
        detail,
    }
}

/// Column-constancy of `U V` over the chain points of each lap.
fn column_constancy_check(bundle: &MatrixBundle, uv: &PolyMatrix) -> IdentityCheck {
    let laps = bundle.u.len();
    for l in 0..laps {
        let cols: Vec<usize> = (0..bundle.chain.q()).filter(|&i| bundle.u[l][i] == 1).collect();
        if let Some((&first, rest)) = cols.split_first() {
            for &c in rest {
                if let Some(r) = (0..uv.rows()).find(|&r| uv.get(r, c) != uv.get(r, first)) {
                    return IdentityCheck {
                        name: "uv_columns_constant".into(),
                        passed: false,
                        detail: Some(format!(
                            "lap {}: columns {} and {} differ in row {}",
                            l + 1,
                            first + 1,
                            c + 1,
                            r + 1
                        )),
                    };
                }
            }
        }
    }
    IdentityCheck {
        name: "uv_columns_constant".into(),
        passed: true,
        detail: None,
    }
}

/// Checks `B Q = V B`, column-constancy of `U V` per lap, `U V = K U`,
/// `P_V = P_Q P_K` and `num(D) R = P_Q den(D)`, all exactly.
pub fn verify_identities(bundle: &MatrixBundle, d: &WeightRationalFn, r: &[CyclotomicFactor]) -> VerificationReport {
    let b = bundle.b_poly();
    let u = bundle.u_poly();
    let uv = u.mul(&bundle.v);
    let bq = matrix_check("bq_eq_vb", &b.mul(&bundle.q), &bundle.v.mul(&b));
    let columns = column_constancy_check(bundle, &uv);
    let uv = matrix_check("uv_eq_ku", &uv, &bundle.k.mul(&u));
    let (p_q, (p_v, p_k)) = rayon::join(
        || char_poly(&bundle.q),
        || rayon::join(|| char_poly(&bundle.v), || char_poly(&bundle.k)),
    );
    let split = poly_check("charpoly_v_eq_q_k", &p_v, &(&p_q * &p_k));
    let nvars = bundle.q.nvars();
    let determinant = poly_check(
        "d_r_eq_charpoly_q",
        &(&d.numerator * &product(r, nvars)),
        &(&p_q * &d.denominator_poly()),
    );
    VerificationReport {
        checks: vec![bq, columns, uv, split, determinant],
        char_poly_q: p_q,
        char_poly_v: p_v,
        char_poly_k: p_k,
    }
}

/// `zeta(t) = 1 / det(I - tQ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaFunction {
    pub denominator: WeightPoly,
}

pub fn zeta_function(q: &PolyMatrix) -> ZetaFunction {
    ZetaFunction {
        denominator: char_poly(q),
    }
}
