//! Piecewise-linear expanding maps with one open hole, evaluated exactly on
//! side-tagged rational points.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::MapError;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Which one-sided limit a point stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn sign_char(self) -> char {
        match self {
            Side::Left => '-',
            Side::Right => '+',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SidedPoint {
    pub x: Rational,
    pub side: Side,
}

impl SidedPoint {
    pub fn new(x: Rational, side: Side) -> Self {
        SidedPoint { x, side }
    }
}

impl fmt::Display for SidedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.x, self.side.sign_char())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lap {
    pub lo: Rational,
    pub hi: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

impl Lap {
    pub fn new(lo: Rational, hi: Rational, slope: Rational, intercept: Rational) -> Self {
        Lap {
            lo,
            hi,
            slope,
            intercept,
        }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// Image of the lap domain as an ordered interval.
    pub fn image(&self) -> (Rational, Rational) {
        let a = self.apply(&self.lo);
        let b = self.apply(&self.hi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn sign(&self) -> i8 {
        if self.slope.is_negative() {
            -1
        } else {
            1
        }
    }
}

/// Unvalidated map description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleMap {
    pub name: Option<String>,
    pub domain: (Rational, Rational),
    pub laps: Vec<Lap>,
    pub hole: (Rational, Rational),
}

impl HoleMap {
    /// Builds the expanding map from contractions `f_i(x) = rho_i x + shift_i`
    /// of `domain`: each lap is `f_i(domain)` with the inverse branch on it.
    /// The images must leave exactly one gap, which becomes the hole.
    pub fn from_ifs(
        domain: (Rational, Rational),
        contractions: &[(Rational, Rational)],
    ) -> Result<HoleMap, MapError> {
        let mut laps = Vec::with_capacity(contractions.len());
        for (rho, shift) in contractions {
            if rho.is_zero() {
                return Err(MapError::NonExpandingLap {
                    lap: laps.len() + 1,
                    slope: rho.clone(),
                });
            }
            let a = rho * &domain.0 + shift;
            let b = rho * &domain.1 + shift;
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let slope = rho.recip();
            let intercept = -(shift / rho);
            laps.push(Lap::new(lo, hi, slope, intercept));
        }
        laps.sort_by(|p, q| p.lo.cmp(&q.lo));
        let mut gaps = Vec::new();
        for w in laps.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(MapError::OverlappingLaps { at: w[1].lo.clone() });
            }
            if w[1].lo > w[0].hi {
                gaps.push((w[0].hi.clone(), w[1].lo.clone()));
            }
        }
        match gaps.len() {
            1 => Ok(HoleMap {
                name: None,
                domain,
                laps,
                hole: gaps.pop().unwrap(),
            }),
            0 => Err(MapError::CoverageMismatch(
                "contractions leave no gap for the hole".into(),
            )),
            _ => Err(MapError::GapNotHole {
                lo: gaps[1].0.clone(),
                hi: gaps[1].1.clone(),
            }),
        }
    }
}

/// A partition interval of the domain: a lap (by lap index) or the hole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    Lap(usize),
    Hole,
}

/// Returned by [`ValidatedMap::eval_sided`] for points in the hole.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InHole;

/// A map that passed [`validate_map`]. Laps are stored in real-line order.
#[derive(Clone, Debug)]
pub struct ValidatedMap {
    map: HoleMap,
    strict: bool,
    breakpoints: Vec<Rational>,
    pieces: Vec<Piece>,
    hole_interval: usize,
}

pub fn validate_map(map: HoleMap, strict: bool) -> Result<ValidatedMap, MapError> {
    let mut map = map;
    let (a, b) = map.domain.clone();
    if a >= b {
        return Err(MapError::DegenerateInterval {
            what: "domain".into(),
            lo: a,
            hi: b,
        });
    }
    if map.hole.0 >= map.hole.1 {
        return Err(MapError::DegenerateInterval {
            what: "hole".into(),
            lo: map.hole.0.clone(),
            hi: map.hole.1.clone(),
        });
    }
    for (i, lap) in map.laps.iter().enumerate() {
        if lap.lo >= lap.hi {
            return Err(MapError::DegenerateInterval {
                what: format!("lap {}", i + 1),
                lo: lap.lo.clone(),
                hi: lap.hi.clone(),
            });
        }
    }
    map.laps.sort_by(|p, q| p.lo.cmp(&q.lo));

    // Tile the domain with laps and the hole closure.
    let mut intervals: Vec<(Rational, Rational, Piece)> = map
        .laps
        .iter()
        .enumerate()
        .map(|(i, l)| (l.lo.clone(), l.hi.clone(), Piece::Lap(i)))
        .collect();
    intervals.push((map.hole.0.clone(), map.hole.1.clone(), Piece::Hole));
    intervals.sort_by(|p, q| p.0.cmp(&q.0).then(p.1.cmp(&q.1)));
    if intervals[0].0 < a || intervals.last().unwrap().1 > b {
        return Err(MapError::CoverageMismatch(
            "an interval extends beyond the domain".into(),
        ));
    }
    if intervals[0].0 > a {
        return Err(MapError::GapNotHole {
            lo: a,
            hi: intervals[0].0.clone(),
        });
    }
    if intervals.last().unwrap().1 < b {
        return Err(MapError::GapNotHole {
            lo: intervals.last().unwrap().1.clone(),
            hi: b,
        });
    }
    for w in intervals.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(MapError::OverlappingLaps { at: w[1].0.clone() });
        }
        if w[1].0 > w[0].1 {
            return Err(MapError::GapNotHole {
                lo: w[0].1.clone(),
                hi: w[1].0.clone(),
            });
        }
    }
    let hole_interval = intervals
        .iter()
        .position(|iv| iv.2 == Piece::Hole)
        .expect("hole inserted above");
    if hole_interval == 0 || hole_interval + 1 == intervals.len() {
        return Err(MapError::HoleTouchesBoundary);
    }

    for (i, lap) in map.laps.iter().enumerate() {
        if lap.slope.abs() <= Rational::one() {
            return Err(MapError::NonExpandingLap {
                lap: i + 1,
                slope: lap.slope.clone(),
            });
        }
        let (lo, hi) = lap.image();
        if lo < a || hi > b {
            return Err(MapError::ImageEscapesDomain { lap: i + 1, lo, hi });
        }
    }
    if strict {
        let first = &map.laps[0];
        let image = first.apply(&a);
        if image != a {
            return Err(MapError::EndpointNotFixed { at: a, image });
        }
        let last = map.laps.last().unwrap();
        let image = last.apply(&b);
        if image != b {
            return Err(MapError::EndpointNotFixed { at: b, image });
        }
    }

    let mut breakpoints: Vec<Rational> = intervals.iter().map(|iv| iv.0.clone()).collect();
    breakpoints.push(b);
    let pieces = intervals.into_iter().map(|iv| iv.2).collect();
    Ok(ValidatedMap {
        map,
        strict,
        breakpoints,
        pieces,
        hole_interval,
    })
}

impl ValidatedMap {
    pub fn name(&self) -> Option<&str> {
        self.map.name.as_deref()
    }

    pub fn hole_map(&self) -> &HoleMap {
        &self.map
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn n_laps(&self) -> usize {
        self.map.laps.len()
    }

    /// Number of partition intervals (laps plus the hole).
    pub fn n_intervals(&self) -> usize {
        self.pieces.len()
    }

    pub fn laps(&self) -> &[Lap] {
        &self.map.laps
    }

    pub fn lap(&self, i: usize) -> &Lap {
        &self.map.laps[i]
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.map.domain.0, &self.map.domain.1)
    }

    pub fn hole(&self) -> (&Rational, &Rational) {
        (&self.map.hole.0, &self.map.hole.1)
    }

    /// Breakpoints `a_1 < ... < a_{n+1}` of the lap/hole partition.
    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    /// Position of the hole among the partition intervals (0-based), so the
    /// hole is `(breakpoints[h], breakpoints[h + 1])`.
    pub fn hole_interval(&self) -> usize {
        self.hole_interval
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn interval_of_lap(&self, lap: usize) -> usize {
        if lap < self.hole_interval {
            lap
        } else {
            lap + 1
        }
    }

    /// Index of `x` among the breakpoints, if it is one.
    pub fn breakpoint_index(&self, x: &Rational) -> Option<usize> {
        self.breakpoints.binary_search(x).ok()
    }

    /// True for breakpoints strictly inside the domain.
    pub fn is_interior_breakpoint(&self, x: &Rational) -> bool {
        matches!(self.breakpoint_index(x), Some(k) if k > 0 && k + 1 < self.breakpoints.len())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        *x >= self.map.domain.0 && *x <= self.map.domain.1
    }

    /// Clamps the side tag at the domain endpoints, where only one side is
    /// inside the domain.
    pub fn normalize(&self, p: SidedPoint) -> SidedPoint {
        if p.x == self.map.domain.0 {
            SidedPoint::new(p.x, Side::Right)
        } else if p.x == self.map.domain.1 {
            SidedPoint::new(p.x, Side::Left)
        } else {
            p
        }
    }

    /// Partition interval containing the side-resolved point.
    pub fn interval_index(&self, x: &Rational, side: Side) -> usize {
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|b| b < x);
        if idx < n && self.breakpoints[idx] == *x {
            if idx == 0 {
                0
            } else if idx == n - 1 {
                n - 2
            } else {
                match side {
                    Side::Left => idx - 1,
                    Side::Right => idx,
                }
            }
        } else {
            assert!(idx > 0 && idx < n, "point {x} outside the domain");
            idx - 1
        }
    }

    pub fn locate(&self, p: &SidedPoint) -> Piece {
        self.pieces[self.interval_index(&p.x, p.side)]
    }

    pub fn eval_sided(&self, p: &SidedPoint) -> Result<SidedPoint, InHole> {
        match self.locate(p) {
            Piece::Hole => Err(InHole),
            Piece::Lap(i) => {
                let lap = &self.map.laps[i];
                let side = if lap.slope.is_negative() {
                    p.side.flip()
                } else {
                    p.side
                };
                Ok(self.normalize(SidedPoint::new(lap.apply(&p.x), side)))
            }
        }
    }

    /// Sign of the slope and its absolute value, the base of the lap weight.
    pub fn lap_weight(&self, lap: usize) -> (i8, Rational) {
        let l = &self.map.laps[lap];
        (l.sign(), l.slope.abs())
    }

    /// True when every lap maps onto the whole domain.
    pub fn is_full_branch(&self) -> bool {
        let (a, b) = self.domain();
        self.map.laps.iter().all(|l| {
            let (lo, hi) = l.image();
            lo == *a && hi == *b
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn paper_example() -> HoleMap {
        HoleMap {
            name: Some("paper-example".into()),
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), rat(1, 8), int(4), int(0)),
                Lap::new(rat(1, 8), rat(1, 4), int(-4), int(1)),
                Lap::new(rat(1, 4), rat(7, 12), int(3), rat(-3, 4)),
                Lap::new(rat(2, 3), int(1), int(2), int(-1)),
            ],
            hole: (rat(7, 12), rat(2, 3)),
        }
    }

    pub fn middle_thirds() -> HoleMap {
        HoleMap {
            name: Some("cantor".into()),
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), rat(1, 3), int(3), int(0)),
                Lap::new(rat(2, 3), int(1), int(3), int(-2)),
            ],
            hole: (rat(1, 3), rat(2, 3)),
        }
    }

    fn sp(n: i64, d: i64, side: Side) -> SidedPoint {
        SidedPoint::new(rat(n, d), side)
    }

    #[test]
    fn example_validates() {
        let m = validate_map(paper_example(), true).unwrap();
        assert_eq!(m.n_laps(), 4);
        assert_eq!(m.n_intervals(), 5);
        assert_eq!(m.hole_interval(), 3);
        assert_eq!(m.breakpoints()[3], rat(7, 12));
        assert_eq!(m.breakpoints()[4], rat(2, 3));
        assert!(validate_map(middle_thirds(), true).is_ok());
    }

    #[test]
    fn eval_sided_examples() {
        let m = validate_map(paper_example(), true).unwrap();
        assert_eq!(
            m.eval_sided(&sp(1, 8, Side::Left)).unwrap(),
            sp(1, 2, Side::Left)
        );
        assert_eq!(
            m.eval_sided(&sp(1, 8, Side::Right)).unwrap(),
            sp(1, 2, Side::Left)
        );
        assert_eq!(m.eval_sided(&sp(3, 5, Side::Left)), Err(InHole));
        assert_eq!(m.eval_sided(&sp(3, 5, Side::Right)), Err(InHole));
        // hole endpoints belong to the adjacent laps
        assert_eq!(
            m.eval_sided(&sp(7, 12, Side::Left)).unwrap(),
            sp(1, 1, Side::Left)
        );
        assert_eq!(m.eval_sided(&sp(7, 12, Side::Right)), Err(InHole));
        assert_eq!(m.eval_sided(&sp(2, 3, Side::Left)), Err(InHole));
        assert_eq!(
            m.eval_sided(&sp(2, 3, Side::Right)).unwrap(),
            sp(1, 3, Side::Right)
        );
    }

    #[test]
    fn lap_weights() {
        let m = validate_map(paper_example(), true).unwrap();
        assert_eq!(m.lap_weight(1), (-1, int(4)));
        assert_eq!(m.lap_weight(3), (1, int(2)));
        let c = validate_map(middle_thirds(), true).unwrap();
        assert_eq!(c.lap_weight(0), (1, int(3)));
        assert!(c.is_full_branch());
        assert!(!m.is_full_branch());
    }

    #[test]
    fn rejects_non_expanding() {
        let mut m = middle_thirds();
        m.laps[0].slope = rat(1, 2);
        assert!(matches!(
            validate_map(m, false),
            Err(MapError::NonExpandingLap { lap: 1, .. })
        ));
    }

    #[test]
    fn rejects_bad_tilings() {
        let mut m = middle_thirds();
        m.laps[0].hi = rat(1, 4);
        m.laps[0].slope = int(4);
        assert!(matches!(
            validate_map(m, true),
            Err(MapError::GapNotHole { .. })
        ));

        let mut m = middle_thirds();
        m.laps[1].lo = rat(1, 2);
        assert!(matches!(
            validate_map(m, true),
            Err(MapError::OverlappingLaps { .. })
        ));

        let m = HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps: vec![Lap::new(int(0), rat(1, 2), int(2), int(0))],
            hole: (rat(1, 2), int(1)),
        };
        assert_eq!(validate_map(m, true).unwrap_err(), MapError::HoleTouchesBoundary);
    }

    #[test]
    fn rejects_escaping_image_and_unfixed_endpoint() {
        let mut m = middle_thirds();
        m.laps[1].intercept = int(-1);
        assert!(matches!(
            validate_map(m, false),
            Err(MapError::ImageEscapesDomain { lap: 2, .. })
        ));

        // tent-like first lap: 0 maps to 1
        let m = HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), rat(1, 3), int(-3), int(1)),
                Lap::new(rat(2, 3), int(1), int(3), int(-2)),
            ],
            hole: (rat(1, 3), rat(2, 3)),
        };
        assert!(matches!(
            validate_map(m.clone(), true),
            Err(MapError::EndpointNotFixed { .. })
        ));
        assert!(validate_map(m, false).is_ok());
    }

    #[test]
    fn from_ifs_inverts_contractions() {
        let h = HoleMap::from_ifs(
            (int(0), int(1)),
            &[(rat(1, 3), int(0)), (rat(1, 3), rat(2, 3))],
        )
        .unwrap();
        assert_eq!(h.laps, middle_thirds().laps);
        assert_eq!(h.hole, middle_thirds().hole);
    }
}
