//! Exact orbits of lateral critical points, itineraries and kneading data.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::OrbitError;
use crate::map_model::{Piece, SidedPoint, Side, ValidatedMap};

pub const DEFAULT_CAP: usize = 10_000;
pub const DEFAULT_DENOMINATOR_BITS: u64 = 4096;

/// Symbols are partition intervals; `Piece::Hole` is `H`.
pub type Symbol = Piece;

/// Names for the partition intervals: `L`, `M1`..`Mk`, `H`, `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    n_laps: usize,
    hole_interval: usize,
}

impl Alphabet {
    pub fn new(map: &ValidatedMap) -> Self {
        Alphabet {
            n_laps: map.n_laps(),
            hole_interval: map.hole_interval(),
        }
    }

    /// Symbols in real-line order.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = (0..self.n_laps).map(Piece::Lap).collect();
        out.insert(self.hole_interval, Piece::Hole);
        out
    }

    pub fn name(&self, s: Symbol) -> String {
        match s {
            Piece::Hole => "H".to_string(),
            Piece::Lap(0) => "L".to_string(),
            Piece::Lap(i) if i + 1 == self.n_laps => "R".to_string(),
            Piece::Lap(i) => format!("M{i}"),
        }
    }

    pub fn lap_names(&self) -> Vec<String> {
        (0..self.n_laps).map(|i| self.name(Piece::Lap(i))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitClass {
    Periodic { period: usize },
    EventuallyPeriodic { preperiod: usize, period: usize },
    Escaped { steps: usize },
    Truncated { depth: usize },
}

impl OrbitClass {
    pub fn is_truncated(&self) -> bool {
        matches!(self, OrbitClass::Truncated { .. })
    }

    /// `(preperiod, period)` for recurrent classes.
    pub fn recurrence(&self) -> Option<(usize, usize)> {
        match *self {
            OrbitClass::Periodic { period } => Some((0, period)),
            OrbitClass::EventuallyPeriodic { preperiod, period } => Some((preperiod, period)),
            _ => None,
        }
    }
}

/// Orbit of a sided point. For `Escaped { steps }` the last of the
/// `steps + 1` points is the one that lies in the hole; for recurrent classes
/// the points are `preperiod + period` distinct states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub start: SidedPoint,
    pub points: Vec<SidedPoint>,
    pub class: OrbitClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitOptions {
    pub cap: usize,
    pub max_denominator_bits: u64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            cap: DEFAULT_CAP,
            max_denominator_bits: DEFAULT_DENOMINATOR_BITS,
        }
    }
}

pub fn orbit(
    map: &ValidatedMap,
    start: &SidedPoint,
    opts: &OrbitOptions,
) -> Result<OrbitRecord, OrbitError> {
    assert!(opts.cap >= 1, "orbit cap must be at least 1");
    let start = map.normalize(start.clone());
    let mut seen: HashMap<SidedPoint, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut current = start.clone();
    loop {
        let bits = current.x.denom().bits();
        if bits > opts.max_denominator_bits {
            return Err(OrbitError::DenominatorBlowup {
                start: start.to_string(),
                steps: points.len(),
                bits,
            });
        }
        if points.len() == opts.cap {
            return Ok(OrbitRecord {
                start,
                points,
                class: OrbitClass::Truncated { depth: opts.cap },
            });
        }
        seen.insert(current.clone(), points.len());
        points.push(current.clone());
        match map.eval_sided(&current) {
            Err(_) => {
                let steps = points.len() - 1;
                return Ok(OrbitRecord {
                    start,
                    points,
                    class: OrbitClass::Escaped { steps },
                });
            }
            Ok(next) => {
                if let Some(&j) = seen.get(&next) {
                    let period = points.len() - j;
                    let class = if j == 0 {
                        OrbitClass::Periodic { period }
                    } else {
                        OrbitClass::EventuallyPeriodic {
                            preperiod: j,
                            period,
                        }
                    };
                    return Ok(OrbitRecord {
                        start,
                        points,
                        class,
                    });
                }
                current = next;
            }
        }
    }
}

/// Symbolic orbit: `symbols` holds the preperiod followed by one copy of the
/// cycle (recurrent classes), the full finite word ending in `H` (escaped), or
/// the first `depth` symbols (truncated). Recurrent itineraries are reduced to
/// the minimal period and preperiod of the symbol sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Itinerary {
    pub symbols: Vec<Symbol>,
    pub signs: Vec<i8>,
    pub class: OrbitClass,
}

fn sign_of(map: &ValidatedMap, s: Symbol) -> i8 {
    match s {
        Piece::Hole => 0,
        Piece::Lap(i) => map.lap(i).sign(),
    }
}

pub fn itinerary(map: &ValidatedMap, rec: &OrbitRecord) -> Itinerary {
    let mut symbols: Vec<Symbol> = rec.points.iter().map(|p| map.locate(p)).collect();
    let class = match rec.class.recurrence() {
        None => rec.class,
        Some((p, q)) => {
            let cycle = &symbols[p..p + q];
            let d = (1..=q)
                .find(|d| q % d == 0 && (0..q).all(|k| cycle[k] == cycle[(k + d) % q]))
                .unwrap();
            let mut pre = p;
            symbols.truncate(p + d);
            while pre > 0 && symbols[pre - 1] == symbols[pre + d - 1] {
                symbols.pop();
                pre -= 1;
            }
            if pre == 0 {
                OrbitClass::Periodic { period: d }
            } else {
                OrbitClass::EventuallyPeriodic {
                    preperiod: pre,
                    period: d,
                }
            }
        }
    };
    let signs = symbols.iter().map(|&s| sign_of(map, s)).collect();
    Itinerary {
        symbols,
        signs,
        class,
    }
}

impl Itinerary {
    /// Renders e.g. `L(M2R)^∞`, `M1L^∞`, `LM1H`, `LRM1...`.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        let names: Vec<String> = self.symbols.iter().map(|&s| alphabet.name(s)).collect();
        match self.class.recurrence() {
            Some((p, q)) => {
                let mut out: String = names[..p].concat();
                if q == 1 {
                    out.push_str(&names[p]);
                } else {
                    out.push('(');
                    out.push_str(&names[p..].concat());
                    out.push(')');
                }
                out.push_str("^∞");
                out
            }
            None if self.class.is_truncated() => names.concat() + "...",
            None => names.concat(),
        }
    }

    /// Symbol at position `k` of the infinite (or finite) sequence.
    pub fn symbol_at(&self, k: usize) -> Option<Symbol> {
        match self.class.recurrence() {
            Some((p, q)) => Some(if k < p {
                self.symbols[k]
            } else {
                self.symbols[p + (k - p) % q]
            }),
            None => self.symbols.get(k).copied(),
        }
    }
}

/// A lateral critical point `a_i^±`, by breakpoint index (0-based into
/// [`ValidatedMap::breakpoints`]) and side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriticalPoint {
    pub breakpoint: usize,
    pub side: Side,
}

impl CriticalPoint {
    pub fn point(&self, map: &ValidatedMap) -> SidedPoint {
        SidedPoint::new(map.breakpoints()[self.breakpoint].clone(), self.side)
    }

    /// Label such as `a2-` (breakpoints numbered from 1).
    pub fn label(&self) -> String {
        format!("a{}{}", self.breakpoint + 1, self.side.sign_char())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneadingEntry {
    pub point: CriticalPoint,
    pub orbit: OrbitRecord,
    pub itinerary: Itinerary,
}

/// Itineraries of the tracked lateral critical points in breakpoint order,
/// plus the two domain endpoints and the hole-inner lateral points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneadingData {
    pub alphabet: Alphabet,
    pub entries: Vec<KneadingEntry>,
    /// Orbits of `a_1^+` and `a_{n+1}^-` (fixed points in strict mode).
    pub endpoints: Vec<KneadingEntry>,
    /// `a_h^+` and `a_{h+1}^-`, recorded without orbits.
    pub hole_inner: [CriticalPoint; 2],
}

impl KneadingData {
    pub fn is_truncated(&self) -> bool {
        self.entries
            .iter()
            .chain(&self.endpoints)
            .any(|e| e.orbit.class.is_truncated())
    }

    pub fn entry(&self, point: CriticalPoint) -> Option<&KneadingEntry> {
        self.entries.iter().find(|e| e.point == point)
    }
}

/// Tracked lateral critical points in breakpoint order.
pub fn critical_points(map: &ValidatedMap) -> Vec<CriticalPoint> {
    let h = map.hole_interval();
    let mut out = Vec::new();
    for k in 1..map.breakpoints().len() - 1 {
        for side in [Side::Left, Side::Right] {
            let hole_facing = (k == h && side == Side::Right) || (k == h + 1 && side == Side::Left);
            if !hole_facing {
                out.push(CriticalPoint {
                    breakpoint: k,
                    side,
                });
            }
        }
    }
    out
}

pub fn kneading_data(map: &ValidatedMap, opts: &OrbitOptions) -> Result<KneadingData, OrbitError> {
    let n = map.breakpoints().len();
    let h = map.hole_interval();
    let mut points = critical_points(map);
    points.push(CriticalPoint {
        breakpoint: 0,
        side: Side::Right,
    });
    points.push(CriticalPoint {
        breakpoint: n - 1,
        side: Side::Left,
    });
    let mut entries = points
        .par_iter()
        .map(|&cp| {
            let rec = orbit(map, &cp.point(map), opts)?;
            let itinerary = itinerary(map, &rec);
            Ok(KneadingEntry {
                point: cp,
                orbit: rec,
                itinerary,
            })
        })
        .collect::<Result<Vec<_>, OrbitError>>()?;
    let endpoints = entries.split_off(entries.len() - 2);
    Ok(KneadingData {
        alphabet: Alphabet::new(map),
        entries,
        endpoints,
        hole_inner: [
            CriticalPoint {
                breakpoint: h,
                side: Side::Right,
            },
            CriticalPoint {
                breakpoint: h + 1,
                side: Side::Left,
            },
        ],
    })
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitClass::Periodic { period } => write!(f, "periodic({period})"),
            OrbitClass::EventuallyPeriodic { preperiod, period } => {
                write!(f, "eventually-periodic({preperiod}, {period})")
            }
            OrbitClass::Escaped { steps } => write!(f, "escaped({steps})"),
            OrbitClass::Truncated { depth } => write!(f, "truncated({depth})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_model::tests::{middle_thirds, paper_example};
    use crate::map_model::{int, rat, validate_map, HoleMap, Lap};

    fn example() -> ValidatedMap {
        validate_map(paper_example(), true).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let m = example();
        let opts = OrbitOptions {
            cap: 100,
            ..Default::default()
        };
        let r = orbit(&m, &SidedPoint::new(rat(1, 8), Side::Left), &opts).unwrap();
        assert_eq!(
            r.class,
            OrbitClass::EventuallyPeriodic {
                preperiod: 1,
                period: 2
            }
        );
        let xs: Vec<_> = r.points.iter().map(|p| p.x.clone()).collect();
        assert_eq!(xs, vec![rat(1, 8), rat(1, 2), rat(3, 4)]);

        let r = orbit(&m, &SidedPoint::new(rat(2, 3), Side::Right), &opts).unwrap();
        assert_eq!(
            r.class,
            OrbitClass::EventuallyPeriodic {
                preperiod: 3,
                period: 1
            }
        );
        let xs: Vec<_> = r.points.iter().map(|p| p.x.clone()).collect();
        assert_eq!(xs, vec![rat(2, 3), rat(1, 3), rat(1, 4), int(0)]);

        let c = validate_map(middle_thirds(), true).unwrap();
        let opts = OrbitOptions {
            cap: 10,
            ..Default::default()
        };
        let r = orbit(&c, &SidedPoint::new(rat(1, 3), Side::Left), &opts).unwrap();
        assert_eq!(
            r.class,
            OrbitClass::EventuallyPeriodic {
                preperiod: 1,
                period: 1
            }
        );
        assert_eq!(r.points[1].x, int(1));
    }

    #[test]
    fn escape_and_truncation() {
        let m = example();
        // 5/8 is in the hole itself
        let r = orbit(&m, &SidedPoint::new(rat(5, 8), Side::Left), &OrbitOptions::default()).unwrap();
        assert_eq!(r.class, OrbitClass::Escaped { steps: 0 });
        // 11/24 is in lap 3 and maps to 5/8
        let r = orbit(&m, &SidedPoint::new(rat(11, 24), Side::Left), &OrbitOptions::default()).unwrap();
        assert_eq!(r.class, OrbitClass::Escaped { steps: 1 });
        let it = itinerary(&m, &r);
        assert_eq!(it.symbols, vec![Piece::Lap(2), Piece::Hole]);
        assert_eq!(it.signs, vec![1, 0]);

        // 1/7 -> 3/7 -> 15/28 -> 6/7 -> 5/7 -> 3/7 recurs only after 5 points
        let opts = OrbitOptions {
            cap: 3,
            ..Default::default()
        };
        let r = orbit(&m, &SidedPoint::new(rat(1, 7), Side::Left), &opts).unwrap();
        assert_eq!(r.class, OrbitClass::Truncated { depth: 3 });
        assert_eq!(r.points.len(), 3);
    }

    #[test]
    fn denominator_blowup() {
        // non-integer slopes grow denominators
        let h = HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), rat(2, 5), rat(5, 2), int(0)),
                Lap::new(rat(3, 5), int(1), rat(5, 2), rat(-3, 2)),
            ],
            hole: (rat(2, 5), rat(3, 5)),
        };
        let m = validate_map(h, true).unwrap();
        let opts = OrbitOptions {
            cap: 10_000,
            max_denominator_bits: 16,
        };
        let r = orbit(&m, &SidedPoint::new(rat(1, 3), Side::Left), &opts);
        match r {
            Err(OrbitError::DenominatorBlowup { .. }) => {}
            Ok(rec) => assert!(matches!(rec.class, OrbitClass::Escaped { .. })),
        }
    }

    #[test]
    fn example_kneading_data() {
        let m = example();
        let data = kneading_data(&m, &OrbitOptions::default()).unwrap();
        let shown: Vec<String> = data
            .entries
            .iter()
            .map(|e| e.itinerary.display(&data.alphabet))
            .collect();
        assert_eq!(
            shown,
            vec!["L(M2R)^∞", "M1(M2R)^∞", "M1L^∞", "M2L^∞", "M2R^∞", "RM2M2L^∞"]
        );
        let labels: Vec<String> = data.entries.iter().map(|e| e.point.label()).collect();
        assert_eq!(labels, vec!["a2-", "a2+", "a3-", "a3+", "a4-", "a5+"]);
        assert_eq!(data.entries[1].itinerary.signs[0], -1);
        assert_eq!(data.hole_inner[0].label(), "a4+");
        assert_eq!(data.hole_inner[1].label(), "a5-");
        assert_eq!(data.endpoints.len(), 2);
        assert_eq!(data.endpoints[0].orbit.class, OrbitClass::Periodic { period: 1 });
    }

    #[test]
    fn middle_thirds_kneading_data() {
        let m = validate_map(middle_thirds(), true).unwrap();
        let data = kneading_data(&m, &OrbitOptions::default()).unwrap();
        let shown: Vec<String> = data
            .entries
            .iter()
            .map(|e| e.itinerary.display(&data.alphabet))
            .collect();
        assert_eq!(shown, vec!["LR^∞", "RL^∞"]);
        assert_eq!(data.alphabet.symbols().len(), 3);
        assert_eq!(data.alphabet.name(Piece::Hole), "H");
    }

    #[test]
    fn itinerary_reduces_doubled_period() {
        // lap 2 has negative slope, so the state (x, side) of a fixed point in
        // it alternates sides while the symbol stays the same.
        let h = HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), rat(1, 4), int(4), int(0)),
                Lap::new(rat(1, 4), rat(1, 2), int(-4), int(2)),
                Lap::new(rat(3, 4), int(1), int(4), int(-3)),
            ],
            hole: (rat(1, 2), rat(3, 4)),
        };
        let m = validate_map(h, true).unwrap();
        // 2/5 is fixed by -4x + 2
        let r = orbit(&m, &SidedPoint::new(rat(2, 5), Side::Left), &OrbitOptions::default()).unwrap();
        assert_eq!(r.class, OrbitClass::Periodic { period: 2 });
        let it = itinerary(&m, &r);
        assert_eq!(it.class, OrbitClass::Periodic { period: 1 });
        assert_eq!(it.display(&Alphabet::new(&m)), "M1^∞");
    }

    #[test]
    fn itinerary_reduces_preperiod() {
        let m = validate_map(middle_thirds(), true).unwrap();
        // 1 is fixed; starting at 1 from the left gives R^∞ with no preperiod
        let r = orbit(&m, &SidedPoint::new(int(1), Side::Left), &OrbitOptions::default()).unwrap();
        let it = itinerary(&m, &r);
        assert_eq!(it.class, OrbitClass::Periodic { period: 1 });
        assert_eq!(it.symbol_at(7), Some(Piece::Lap(1)));
    }
}
