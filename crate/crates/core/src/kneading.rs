//! Weighted invariant coordinates, kneading increments, the kneading matrix
//! and its determinant.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::KneadingError;
use crate::map_model::{Piece, Side, ValidatedMap};
use crate::matrix::PolyMatrix;
use crate::poly::{multiset_difference, multiset_lcm, product, CyclotomicFactor, Monomial, WeightPoly, WeightRationalFn};
use crate::symbolic::{CriticalPoint, Itinerary, KneadingData, OrbitClass, Symbol};

/// Signed weight monomial `tau_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Tau {
    sign: i8,
    exps: Vec<u32>,
}

impl Tau {
    fn one(n: usize) -> Self {
        Tau {
            sign: 1,
            exps: vec![0; n],
        }
    }

    fn step(&self, map: &ValidatedMap, s: Symbol) -> Tau {
        match s {
            Piece::Hole => Tau {
                sign: 0,
                exps: self.exps.clone(),
            },
            Piece::Lap(j) => {
                let mut exps = self.exps.clone();
                exps[j] += 1;
                Tau {
                    sign: self.sign * map.lap(j).sign(),
                    exps,
                }
            }
        }
    }

    fn term(&self, k: u32) -> WeightPoly {
        WeightPoly::term(self.exps.len(), BigInt::from(self.sign), Monomial::new(k, &self.exps))
    }
}

/// Factor `1 - c t^q` of the cycle `symbols[p..p+q]`.
fn cycle_factor(map: &ValidatedMap, cycle: &[Symbol]) -> CyclotomicFactor {
    let mut tau = Tau::one(map.n_laps());
    for &s in cycle {
        tau = tau.step(map, s);
    }
    CyclotomicFactor {
        period: cycle.len() as u32,
        exps: tau.exps,
        sign: tau.sign,
    }
}

/// `theta = sum_k tau_k t^k S_k` grouped by lap symbol. Recurrent tails are
/// summed in closed form over `1 - c t^q`; each component is returned with
/// that factor cancelled where it divides.
pub fn invariant_coordinate(it: &Itinerary, map: &ValidatedMap) -> Vec<WeightRationalFn> {
    let n = map.n_laps();
    let mut comps = vec![WeightPoly::zero(n); n];
    let mut tau = Tau::one(n);
    match it.class.recurrence() {
        None => {
            for (k, &s) in it.symbols.iter().enumerate() {
                match s {
                    Piece::Hole => break,
                    Piece::Lap(j) => comps[j].add_term(Monomial::new(k as u32, &tau.exps), BigInt::from(tau.sign)),
                }
                tau = tau.step(map, s);
            }
            comps.into_iter().map(WeightRationalFn::from_poly).collect()
        }
        Some((p, q)) => {
            let factor = cycle_factor(map, &it.symbols[p..p + q]);
            let closing = factor.to_poly();
            for (k, &s) in it.symbols.iter().enumerate() {
                let Piece::Lap(j) = s else {
                    unreachable!("recurrent itineraries never visit the hole")
                };
                let term = tau.term(k as u32);
                let term = if k < p { &term * &closing } else { term };
                comps[j] = &comps[j] + &term;
                tau = tau.step(map, s);
            }
            comps
                .into_iter()
                .map(|c| WeightRationalFn::new(c, vec![factor.clone()]).normalized())
                .collect()
        }
    }
}

/// Rows of `N(t)`: one per interior breakpoint, one column per lap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneadingMatrix {
    pub rows: Vec<Vec<WeightRationalFn>>,
    /// Breakpoint index of each row.
    pub breakpoints: Vec<usize>,
    /// One cyclotomic factor per distinct periodic cycle in the kneading data.
    pub cycle_factors: Vec<CyclotomicFactor>,
    /// Truncation depth when some itinerary was cut off.
    pub truncation: Option<usize>,
}

impl KneadingMatrix {
    pub fn n(&self) -> usize {
        self.rows.len()
    }
}

/// Invariant coordinates of all kneading entries, in entry order.
pub fn coordinates(map: &ValidatedMap, data: &KneadingData) -> BTreeMap<CriticalPoint, Vec<WeightRationalFn>> {
    data.entries
        .iter()
        .map(|e| (e.point, invariant_coordinate(&e.itinerary, map)))
        .collect()
}

fn increment_from(
    map: &ValidatedMap,
    coords: &BTreeMap<CriticalPoint, Vec<WeightRationalFn>>,
    breakpoint: usize,
) -> Vec<WeightRationalFn> {
    let h = map.hole_interval();
    let get = |side| {
        coords
            .get(&CriticalPoint { breakpoint, side })
            .expect("kneading data covers every tracked critical point")
    };
    if breakpoint == h {
        get(Side::Left).clone()
    } else if breakpoint == h + 1 {
        get(Side::Right).clone()
    } else {
        get(Side::Right)
            .iter()
            .zip(get(Side::Left))
            .map(|(p, m)| (p - m).normalized())
            .collect()
    }
}

/// `nu_{a_i}`: the two-sided difference `theta(a_i^+) - theta(a_i^-)`, or the
/// outer one-sided coordinate at a hole endpoint.
pub fn kneading_increment(map: &ValidatedMap, data: &KneadingData, breakpoint: usize) -> Vec<WeightRationalFn> {
    let n = map.breakpoints().len();
    assert!(breakpoint > 0 && breakpoint + 1 < n, "interior breakpoint required");
    increment_from(map, &coordinates(map, data), breakpoint)
}

/// Canonical rotation of a cycle word.
fn canonical_rotation(cycle: &[Symbol]) -> Vec<Symbol> {
    (0..cycle.len())
        .map(|r| {
            let mut v = cycle[r..].to_vec();
            v.extend_from_slice(&cycle[..r]);
            v
        })
        .min()
        .unwrap_or_default()
}

/// `R(t)` as a list of factors, one per distinct periodic cycle among the
/// itineraries of the kneading entries and of the two domain endpoints.
pub fn r_polynomial(map: &ValidatedMap, data: &KneadingData) -> Vec<CyclotomicFactor> {
    let mut cycles: BTreeMap<Vec<Symbol>, CyclotomicFactor> = BTreeMap::new();
    for e in data.entries.iter().chain(&data.endpoints) {
        if let Some((p, q)) = e.itinerary.class.recurrence() {
            let cycle = &e.itinerary.symbols[p..p + q];
            cycles
                .entry(canonical_rotation(cycle))
                .or_insert_with(|| cycle_factor(map, cycle));
        }
    }
    let mut out: Vec<CyclotomicFactor> = cycles.into_values().collect();
    out.sort();
    out
}

pub fn kneading_matrix(map: &ValidatedMap, data: &KneadingData) -> Result<KneadingMatrix, KneadingError> {
    let coords = coordinates(map, data);
    let n = map.breakpoints().len();
    let breakpoints: Vec<usize> = (1..n - 1).collect();
    let rows: Vec<Vec<WeightRationalFn>> = breakpoints.iter().map(|&k| increment_from(map, &coords, k)).collect();
    let cols = map.n_laps();
    if rows.len() != cols {
        return Err(KneadingError::NonSquare {
            rows: rows.len(),
            cols,
        });
    }
    let truncation = data.entries.iter().find_map(|e| match e.orbit.class {
        OrbitClass::Truncated { depth } => Some(depth),
        _ => None,
    });
    Ok(KneadingMatrix {
        rows,
        breakpoints,
        cycle_factors: r_polynomial(map, data),
        truncation,
    })
}

/// `D(t) = det N(t)`, computed by clearing each row's denominator and taking
/// a fraction-free determinant. Repeated denominator factors beyond one copy
/// per distinct cycle are cancelled when they divide the numerator exactly.
///
/// At `t = 0` the matrix is bidiagonal with determinant `(-1)^(h-1)`, `h` the
/// number of laps left of the hole; the result is multiplied by that sign so
/// that `D(0) = 1`.
pub fn kneading_determinant(n: &KneadingMatrix) -> WeightRationalFn {
    let size = n.rows.len();
    let nvars = n.rows.first().map_or(0, |r| r.first().map_or(0, |e| e.nvars()));
    if size == 0 {
        return WeightRationalFn::from_poly(WeightPoly::one(nvars));
    }
    let mut scaled = PolyMatrix::zeros(size, size, nvars);
    let mut den = Vec::new();
    for (i, row) in n.rows.iter().enumerate() {
        let row_den = row
            .iter()
            .fold(Vec::new(), |acc, e| multiset_lcm(&acc, &e.denominator));
        for (j, e) in row.iter().enumerate() {
            scaled.set(i, j, e.numerator_over(&row_den));
        }
        den.extend(row_den);
    }
    let mut num = scaled.det();
    den.sort();
    let keep: Vec<CyclotomicFactor> = {
        let mut distinct = n.cycle_factors.clone();
        for f in &den {
            if !distinct.contains(f) {
                distinct.push(f.clone());
            }
        }
        distinct
    };
    let surplus = multiset_difference(&den, &keep);
    let mut remaining = den.clone();
    for f in surplus {
        if let Some(q) = num.exact_div(&f.to_poly()) {
            num = q;
            let pos = remaining.iter().position(|g| *g == f).unwrap();
            remaining.remove(pos);
        }
    }
    if num.constant_term() < BigInt::from(0) {
        num = -num;
    }
    WeightRationalFn::new(num, remaining)
}

/// `D(t) * R(t)` with the factored denominator cleared, i.e. the polynomial
/// that should equal `det(I - tQ)`: returns `(num(D) * R, den(D))`.
pub fn determinant_times_r(d: &WeightRationalFn, r: &[CyclotomicFactor]) -> (WeightPoly, WeightPoly) {
    let nvars = d.nvars();
    (&d.numerator * &product(r, nvars), d.denominator_poly())
}
