//! File formats: map specifications, analysis reports and sweep templates.
//!
//! Exact quantities are written as strings (`"7/12"`, `"-4"`), never as
//! binary floats. Computed reals carry 15 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::map_model::{HoleMap, Lap, Rational, ValidatedMap};
use crate::matrix::PolyMatrix;
use crate::pipeline::{Analysis, AnalyzeOptions};
use crate::poly::{CyclotomicFactor, Monomial, WeightPoly, WeightRationalFn};
use crate::spectral::RealPoly;
use crate::symbolic::{KneadingEntry, OrbitClass};

pub const TOOL_NAME: &str = "kneading";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parses `n` or `p/q` with integer `n`, `p` and positive-length digit
/// strings; decimals, exponents, signs on denominators and whitespace are
/// rejected.
pub fn parse_rational(field: &str, value: &str) -> Result<Rational, ParseError> {
    let bad = || ParseError::InvalidRational {
        field: field.into(),
        value: value.into(),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let body = value.strip_prefix('-').unwrap_or(value);
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if !digits(num) || den.is_some_and(|d| !digits(d)) {
        return Err(bad());
    }
    let r = Rational::from_str(value).map_err(|_| bad())?;
    Ok(r)
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LapSpec {
    pub interval: [String; 2],
    pub slope: String,
    pub intercept: String,
}

/// A map as written in a spec file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub domain: [String; 2],
    pub laps: Vec<LapSpec>,
    pub hole: [String; 2],
}

fn syntax(e: serde_json::Error) -> ParseError {
    ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl MapSpecFile {
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(syntax)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes") + "\n"
    }

    pub fn from_hole_map(map: &HoleMap) -> Self {
        MapSpecFile {
            name: map.name.clone(),
            domain: [format_rational(&map.domain.0), format_rational(&map.domain.1)],
            laps: map
                .laps
                .iter()
                .map(|l| LapSpec {
                    interval: [format_rational(&l.lo), format_rational(&l.hi)],
                    slope: format_rational(&l.slope),
                    intercept: format_rational(&l.intercept),
                })
                .collect(),
            hole: [format_rational(&map.hole.0), format_rational(&map.hole.1)],
        }
    }

    pub fn to_hole_map(&self) -> Result<HoleMap, ParseError> {
        self.map_fields(parse_rational)
    }

    fn map_fields(&self, mut f: impl FnMut(&str, &str) -> Result<Rational, ParseError>) -> Result<HoleMap, ParseError> {
        let domain = (f("domain[0]", &self.domain[0])?, f("domain[1]", &self.domain[1])?);
        let hole = (f("hole[0]", &self.hole[0])?, f("hole[1]", &self.hole[1])?);
        if self.laps.is_empty() {
            return Err(ParseError::Field {
                field: "laps".into(),
                message: "at least one lap is required".into(),
            });
        }
        let mut laps = Vec::with_capacity(self.laps.len());
        for (i, l) in self.laps.iter().enumerate() {
            laps.push(Lap::new(
                f(&format!("laps[{i}].interval[0]"), &l.interval[0])?,
                f(&format!("laps[{i}].interval[1]"), &l.interval[1])?,
                f(&format!("laps[{i}].slope"), &l.slope)?,
                f(&format!("laps[{i}].intercept"), &l.intercept)?,
            ));
        }
        Ok(HoleMap {
            name: self.name.clone(),
            domain,
            laps,
            hole,
        })
    }

    /// Instantiates a template whose fields are rational expressions in one
    /// parameter.
    pub fn instantiate(&self, param: &str, value: &Rational) -> Result<HoleMap, ParseError> {
        self.map_fields(|field, s| {
            let e = Expr::parse(s, param).map_err(|e| ParseError::Field {
                field: field.into(),
                message: e.to_string(),
            })?;
            e.eval(value).map_err(|e| ParseError::Field {
                field: field.into(),
                message: e.to_string(),
            })
        })
    }
}

pub fn read_text(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| ParseError::Field {
        field: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_map_spec(path: &Path) -> Result<MapSpecFile, ParseError> {
    MapSpecFile::from_json(&read_text(path)?)
}

/// Rational expression in one parameter: integers, the parameter name,
/// `+ - * /`, unary minus and parentheses.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Param,
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    param: &'a str,
}

impl ExprParser<'_> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Expression {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op as char, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op as char, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.src.get(self.pos) == Some(&b'.') {
                    return Err(self.err("decimal numbers are not allowed; write p/q"));
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                Ok(Expr::Num(s.parse().expect("digits parse")))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                if name == self.param {
                    Ok(Expr::Param)
                } else {
                    self.pos = start;
                    Err(self.err(format!("unknown name {name:?} (the parameter is {:?})", self.param)))
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

impl Expr {
    pub fn parse(text: &str, param: &str) -> Result<Expr, ParseError> {
        let mut p = ExprParser {
            src: text.as_bytes(),
            pos: 0,
            param,
        };
        let e = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, param: &Rational) -> Result<Rational, ParseError> {
        Ok(match self {
            Expr::Num(n) => Rational::from_integer(n.clone()),
            Expr::Param => param.clone(),
            Expr::Neg(e) => -e.eval(param)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(param)?, b.eval(param)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => {
                        if b.is_zero() {
                            return Err(ParseError::Expression {
                                offset: 0,
                                message: "division by zero".into(),
                            });
                        }
                        a / b
                    }
                }
            }
        })
    }
}

/// One term `coeff * t^t * prod w_i^exps_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub t: u32,
    pub exps: Vec<u32>,
}

pub fn poly_to_terms(p: &WeightPoly) -> Vec<TermJson> {
    p.terms()
        .map(|(m, c)| TermJson {
            coeff: c.to_string(),
            t: m.t_degree(),
            exps: m.exps().to_vec(),
        })
        .collect()
}

pub fn terms_to_poly(nvars: usize, terms: &[TermJson]) -> Result<WeightPoly, ParseError> {
    let mut p = WeightPoly::zero(nvars);
    for (i, t) in terms.iter().enumerate() {
        let c = BigInt::from_str(&t.coeff).map_err(|_| ParseError::InvalidRational {
            field: format!("terms[{i}].coeff"),
            value: t.coeff.clone(),
        })?;
        if t.exps.len() != nvars {
            return Err(ParseError::Field {
                field: format!("terms[{i}].exps"),
                message: format!("expected {nvars} exponents, got {}", t.exps.len()),
            });
        }
        p.add_term(Monomial::new(t.t, &t.exps), c);
    }
    Ok(p)
}

/// `1 - sign * w^exps * t^period`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub period: u32,
    pub exps: Vec<u32>,
    pub sign: i8,
}

impl From<&CyclotomicFactor> for FactorJson {
    fn from(f: &CyclotomicFactor) -> Self {
        FactorJson {
            period: f.period,
            exps: f.exps.clone(),
            sign: f.sign,
        }
    }
}

impl From<&FactorJson> for CyclotomicFactor {
    fn from(f: &FactorJson) -> Self {
        CyclotomicFactor {
            period: f.period,
            exps: f.exps.clone(),
            sign: f.sign,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFnJson {
    pub numerator: Vec<TermJson>,
    pub denominator: Vec<FactorJson>,
    /// Human-readable form with `w_i` names.
    pub text: String,
}

impl RationalFnJson {
    pub fn new(f: &WeightRationalFn, names: &[String]) -> Self {
        RationalFnJson {
            numerator: poly_to_terms(&f.numerator),
            denominator: f.denominator.iter().map(FactorJson::from).collect(),
            text: f.format_with(names),
        }
    }

    pub fn to_rational_fn(&self, nvars: usize) -> Result<WeightRationalFn, ParseError> {
        Ok(WeightRationalFn::new(
            terms_to_poly(nvars, &self.numerator)?,
            self.denominator.iter().map(CyclotomicFactor::from).collect(),
        ))
    }
}

/// Rows of entries, each entry a term list.
pub type MatrixJson = Vec<Vec<Vec<TermJson>>>;

pub fn matrix_to_json(m: &PolyMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(poly_to_terms).collect())
        .collect()
}

pub fn matrix_from_json(nvars: usize, rows: &MatrixJson) -> Result<PolyMatrix, ParseError> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m = PolyMatrix::zeros(rows.len(), cols, nvars);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(ParseError::Field {
                field: format!("row {}", i + 1),
                message: "ragged matrix".into(),
            });
        }
        for (j, e) in row.iter().enumerate() {
            m.set(i, j, terms_to_poly(nvars, e)?);
        }
    }
    Ok(m)
}

fn int_matrix<T: Copy + Into<i64>>(rows: &[Vec<T>], nvars: usize) -> PolyMatrix {
    let ints: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&v| v.into()).collect()).collect();
    PolyMatrix::from_ints(&ints, nvars)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatricesJson {
    pub a: MatrixJson,
    pub q: MatrixJson,
    pub b: MatrixJson,
    pub v: MatrixJson,
    pub u: MatrixJson,
    pub k: MatrixJson,
    pub pi: MatrixJson,
    pub theta: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub checks: Vec<CheckJson>,
    pub char_poly_q: Vec<TermJson>,
    pub char_poly_v: Vec<TermJson>,
    pub char_poly_k: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub point: String,
    pub itinerary: String,
    pub orbit: OrbitClass,
    /// Orbit points with sides, e.g. `"1/8-"`.
    pub points: Vec<String>,
}

/// Real value with 15 significant digits and the residual of its defining
/// equation at that value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealJson {
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        x.to_string()
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    f64::from_str(s).ok()
}

impl RealJson {
    pub fn new(value: f64, residual: Option<f64>) -> Self {
        RealJson {
            value: format_real(value),
            residual: residual.map(format_real),
        }
    }

    pub fn value(&self) -> f64 {
        parse_real(&self.value).unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteJson {
    pub hausdorff_dimension: String,
    pub escape_rate: String,
    pub topological_entropy: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsJson {
    /// Residual: pressure at the reported dimension.
    pub hausdorff_dimension: RealJson,
    /// Residual: `num D(e^gamma, 1)`.
    pub escape_rate: RealJson,
    /// Residual: `num D(e^(-h_top), 0)`.
    pub topological_entropy: RealJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure_route: Option<RouteJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determinant_route: Option<RouteJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route_difference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moran_dimension: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<RealJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<RealJson>,
    pub bisection_iterations: usize,
    pub power_iterations: usize,
    /// Truncation depth when the values are approximate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approximate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolJson {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionsJson {
    pub cap: usize,
    pub precision: usize,
    pub tol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncate_depth: Option<usize>,
}

/// Everything `analyze` produces, in a byte-stable layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: ToolJson,
    pub options: OptionsJson,
    pub map: MapSpecFile,
    pub alphabet: Vec<String>,
    pub weights: Vec<String>,
    pub kneading_data: Vec<EntryJson>,
    pub endpoints: Vec<EntryJson>,
    pub determinant: RationalFnJson,
    pub r_factors: Vec<FactorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<MatricesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationJson>,
    pub invariants: InvariantsJson,
}

fn entry_json(e: &KneadingEntry, alphabet: &crate::symbolic::Alphabet) -> EntryJson {
    EntryJson {
        point: e.point.label(),
        itinerary: e.itinerary.display(alphabet),
        orbit: e.orbit.class,
        points: e.orbit.points.iter().map(|p| p.to_string()).collect(),
    }
}

pub fn weight_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

impl ReportFile {
    pub fn from_analysis(a: &Analysis, opts: &AnalyzeOptions) -> Self {
        let nvars = a.map.n_laps();
        let names = weight_names(nvars);
        let alphabet = &a.data.alphabet;
        let inv = &a.invariants;
        let d = &a.diagnostics_polys();
        let route = |r: &crate::spectral::RouteValues| RouteJson {
            hausdorff_dimension: format_real(r.hausdorff_dimension),
            escape_rate: format_real(r.escape_rate),
            topological_entropy: format_real(r.topological_entropy),
        };
        let matrices = a.bundle.as_ref().map(|b| MatricesJson {
            a: matrix_to_json(&int_matrix(&b.a, nvars)),
            q: matrix_to_json(&b.q),
            b: matrix_to_json(&int_matrix(&b.b, nvars)),
            v: matrix_to_json(&b.v),
            u: matrix_to_json(&int_matrix(&b.u, nvars)),
            k: matrix_to_json(&b.k),
            pi: matrix_to_json(&b.pi),
            theta: matrix_to_json(&b.theta),
        });
        let verification = a.verification.as_ref().map(|v| VerificationJson {
            checks: v
                .checks
                .iter()
                .map(|c| CheckJson {
                    name: c.name.clone(),
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect(),
            char_poly_q: poly_to_terms(&v.char_poly_q),
            char_poly_v: poly_to_terms(&v.char_poly_v),
            char_poly_k: poly_to_terms(&v.char_poly_k),
        });
        let diag = &inv.diagnostics;
        ReportFile {
            tool: ToolJson {
                name: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
            },
            options: OptionsJson {
                cap: opts.orbit.cap,
                precision: opts.spectral.precision,
                tol: format_real(opts.spectral.tol),
                truncate_depth: opts.truncate_depth,
            },
            map: MapSpecFile::from_hole_map(a.map.hole_map()),
            alphabet: alphabet.symbols().into_iter().map(|s| alphabet.name(s)).collect(),
            weights: (0..nvars)
                .map(|i| {
                    let (sign, s) = a.map.lap_weight(i);
                    let sign = if sign < 0 { "-" } else { "" };
                    format!("{} = |{sign}{}|^-beta", names[i], format_rational(&s))
                })
                .collect(),
            kneading_data: a.data.entries.iter().map(|e| entry_json(e, alphabet)).collect(),
            endpoints: a.data.endpoints.iter().map(|e| entry_json(e, alphabet)).collect(),
            determinant: RationalFnJson::new(&a.determinant, &names),
            r_factors: a.r.iter().map(FactorJson::from).collect(),
            matrices,
            verification,
            invariants: InvariantsJson {
                hausdorff_dimension: RealJson::new(inv.hausdorff_dimension, diag.pressure_residual),
                escape_rate: RealJson::new(inv.escape_rate, Some(d.0.eval(inv.escape_rate.exp()))),
                topological_entropy: RealJson::new(inv.topological_entropy, Some(d.1.eval((-inv.topological_entropy).exp()))),
                pressure_route: inv.pressure_route.as_ref().map(route),
                determinant_route: inv.determinant_route.as_ref().map(route),
                route_difference: inv.route_difference.map(format_real),
                moran_dimension: inv.moran_dimension.map(format_real),
                t0: diag.t0.map(|t| RealJson::new(t, diag.t0_residual)),
                t1: diag.t1.map(|t| RealJson::new(t, diag.t1_residual)),
                bisection_iterations: diag.bisection_iterations,
                power_iterations: diag.power_iterations,
                approximate: inv.approximate,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(syntax)
    }

    pub fn nvars(&self) -> usize {
        self.map.laps.len()
    }

    pub fn all_checks_passed(&self) -> bool {
        self.verification
            .as_ref()
            .is_none_or(|v| v.checks.iter().all(|c| c.passed))
    }
}

impl Analysis {
    /// Numerator of `D` at `beta = 1` and `beta = 0`, as real polynomials.
    fn diagnostics_polys(&self) -> (RealPoly, RealPoly) {
        let eval = crate::spectral::BetaEvaluator::new(&self.map, crate::spectral::DEFAULT_PRECISION);
        (
            RealPoly(eval.t_coefficients(&self.determinant.numerator, 1.0)),
            RealPoly(eval.t_coefficients(&self.determinant.numerator, 0.0)),
        )
    }
}

/// Short plain-text summary of an analysis.
pub fn human_summary(a: &Analysis) -> String {
    let mut s = String::new();
    let names = weight_names(a.map.n_laps());
    let alphabet = &a.data.alphabet;
    let title = a.map.name().unwrap_or("map");
    let _ = writeln!(s, "{title}: {} laps, hole ({}, {})", a.map.n_laps(), a.map.hole().0, a.map.hole().1);
    let _ = writeln!(s, "kneading data:");
    for e in &a.data.entries {
        let _ = writeln!(s, "  {:<5} {}", e.point.label(), e.itinerary.display(alphabet));
    }
    let _ = writeln!(s, "D(t) = {}", a.determinant.format_with(&names));
    if let Some(v) = &a.verification {
        let passed = v.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "identities: {passed}/{} passed", v.checks.len());
        for c in v.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(s, "  FAIL {}: {}", c.name, c.detail.as_deref().unwrap_or(""));
        }
    }
    let inv = &a.invariants;
    if let Some(k) = inv.approximate {
        let _ = writeln!(s, "approximate: itineraries truncated at depth {k}");
    }
    let _ = writeln!(s, "dim_H = {}", format_real(inv.hausdorff_dimension));
    let _ = writeln!(s, "gamma = {}", format_real(inv.escape_rate));
    let _ = writeln!(s, "h_top = {}", format_real(inv.topological_entropy));
    if let Some(m) = inv.moran_dimension {
        let _ = writeln!(s, "moran = {}", format_real(m));
    }
    if let Some(d) = inv.route_difference {
        let note = if d > 1e-8 { "  (routes disagree)" } else { "" };
        let _ = writeln!(s, "route difference = {d:.3e}{note}");
    }
    s
}

/// Checks that a validated map round-trips through its spec form.
pub fn spec_round_trips(map: &ValidatedMap) -> bool {
    let spec = MapSpecFile::from_hole_map(map.hole_map());
    MapSpecFile::from_json(&spec.to_json())
        .and_then(|s| s.to_hole_map())
        .is_ok_and(|h| &h == map.hole_map())
}

/// Rational sweep values `from + i (to - from) / (steps - 1)`.
pub fn sweep_values(from: &Rational, to: &Rational, steps: usize) -> Vec<Rational> {
    match steps {
        0 => Vec::new(),
        1 => vec![from.clone()],
        _ => {
            let h = (to - from) / Rational::from_integer(BigInt::from(steps - 1));
            (0..steps)
                .map(|i| from + &h * Rational::from_integer(BigInt::from(i)))
                .collect()
        }
    }
}

/// Exact fields of a report, for round-trip checks: the determinant, `R`
/// and all matrices, keyed by name.
pub fn exact_fields(r: &ReportFile) -> Result<BTreeMap<String, String>, ParseError> {
    let n = r.nvars();
    let names = weight_names(n);
    let mut out = BTreeMap::new();
    let d = r.determinant.to_rational_fn(n)?;
    out.insert("determinant".into(), d.format_with(&names));
    let rf: Vec<CyclotomicFactor> = r.r_factors.iter().map(CyclotomicFactor::from).collect();
    out.insert(
        "r".into(),
        WeightRationalFn::new(crate::poly::product(&rf, n), Vec::new()).format_with(&names),
    );
    if let Some(m) = &r.matrices {
        for (k, v) in [
            ("a", &m.a),
            ("q", &m.q),
            ("b", &m.b),
            ("v", &m.v),
            ("u", &m.u),
            ("k", &m.k),
            ("pi", &m.pi),
            ("theta", &m.theta),
        ] {
            out.insert(k.into(), matrix_from_json(n, v)?.format_with(&names));
        }
    }
    Ok(out)
}
