//! Numerical evaluation at real `beta`: pressure via the Perron root of
//! `Q_beta`, determinant roots, and the dimension / escape rate / entropy.

use std::str::FromStr;

use dashu_float::FBig;
use dashu_int::IBig;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::SpectralError;
use crate::map_model::{Rational, ValidatedMap};
use crate::matrix::PolyMatrix;
use crate::poly::{CyclotomicFactor, WeightPoly, WeightRationalFn};

pub const DEFAULT_PRECISION: usize = 128;

type Real = FBig;

fn big_to_ibig(n: &num_bigint::BigInt) -> IBig {
    IBig::from_str(&n.to_string()).expect("decimal integer")
}

/// Substitutes `w_i = |slope_i|^(-beta)` at a fixed binary precision.
#[derive(Clone, Debug)]
pub struct BetaEvaluator {
    log_slopes: Vec<Real>,
    abs_slopes: Vec<f64>,
    precision: usize,
}

impl BetaEvaluator {
    pub fn new(map: &ValidatedMap, precision: usize) -> Self {
        let precision = precision.max(64);
        let mut log_slopes = Vec::new();
        let mut abs_slopes = Vec::new();
        for i in 0..map.n_laps() {
            let (_, s) = map.lap_weight(i);
            log_slopes.push(Self::ln_rational(&s, precision));
            abs_slopes.push(rational_to_f64(&s));
        }
        BetaEvaluator {
            log_slopes,
            abs_slopes,
            precision,
        }
    }

    fn ln_rational(r: &Rational, precision: usize) -> Real {
        let num = Real::from(big_to_ibig(r.numer())).with_precision(precision).value();
        let den = Real::from(big_to_ibig(r.denom())).with_precision(precision).value();
        num.ln() - den.ln()
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.abs_slopes.iter().cloned().fold(0.0, f64::max)
    }

    fn beta(&self, beta: f64) -> Real {
        Real::try_from(beta)
            .expect("finite beta")
            .with_precision(self.precision)
            .value()
    }

    /// `prod_i w_i^{e_i}` at `beta`, in working precision.
    fn weight_product(&self, exps: &[u32], beta: &Real) -> Real {
        let mut s = Real::ZERO.with_precision(self.precision).value();
        let mut any = false;
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                s += &self.log_slopes[i] * Real::from(e);
                any = true;
            }
        }
        if !any {
            return Real::ONE.with_precision(self.precision).value();
        }
        (-(s * beta)).exp()
    }

    pub fn weights(&self, beta: f64) -> Vec<f64> {
        let b = self.beta(beta);
        (0..self.log_slopes.len())
            .map(|i| {
                let mut e = vec![0u32; self.log_slopes.len()];
                e[i] = 1;
                self.weight_product(&e, &b).to_f64().value()
            })
            .collect()
    }

    /// Coefficients of `t^k` of `p` at `beta`, summed in working precision.
    pub fn t_coefficients(&self, p: &WeightPoly, beta: f64) -> Vec<f64> {
        let b = self.beta(beta);
        let deg = p.t_degree().unwrap_or(0) as usize;
        let mut acc: Vec<Real> = vec![Real::ZERO.with_precision(self.precision).value(); deg + 1];
        for (m, c) in p.terms() {
            let w = self.weight_product(m.exps(), &b);
            acc[m.t_degree() as usize] += w * Real::from(big_to_ibig(c));
        }
        acc.iter().map(|x| x.to_f64().value()).collect()
    }

    /// A matrix with t-free entries, evaluated at `beta`.
    pub fn matrix(&self, m: &PolyMatrix, beta: f64) -> Vec<Vec<f64>> {
        (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|p| {
                        assert!(p.t_degree().unwrap_or(0) == 0, "matrix entries must be t-free");
                        self.t_coefficients(p, beta).first().copied().unwrap_or(0.0)
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("finite rational")
}

/// Real polynomial in `t`, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly(pub Vec<f64>);

impl RealPoly {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> RealPoly {
        RealPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Sum of `|c_k| t^k`, the natural scale of rounding error at `t`.
    pub fn magnitude(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t.abs() + c.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerOptions {
    pub tol: f64,
    pub cap: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-14,
            cap: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralRadius {
    pub value: f64,
    pub iterations: usize,
    /// Relative gap between the Collatz-Wielandt bounds at termination.
    pub residual: f64,
}

/// Perron root of a nonnegative matrix: maximum over strongly connected
/// components of a shifted power iteration bracketed by Collatz-Wielandt
/// bounds. Zero for nilpotent matrices.
pub fn spectral_radius(m: &[Vec<f64>], opts: &PowerOptions) -> Result<SpectralRadius, SpectralError> {
    let n = m.len();
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if m[i][j] > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut best = SpectralRadius {
        value: 0.0,
        iterations: 0,
        residual: 0.0,
    };
    for scc in tarjan_scc(&g) {
        let idx: Vec<usize> = scc.iter().map(|v| v.index()).collect();
        if idx.len() == 1 && m[idx[0]][idx[0]] <= 0.0 {
            continue;
        }
        let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j]).collect()).collect();
        let r = irreducible_radius(&sub, opts)?;
        best.iterations = best.iterations.max(r.iterations);
        if r.value > best.value {
            best.value = r.value;
            best.residual = r.residual;
        }
    }
    Ok(best)
}

fn irreducible_radius(m: &[Vec<f64>], opts: &PowerOptions) -> Result<SpectralRadius, SpectralError> {
    let n = m.len();
    let max_row = m.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let shift = 0.5 * max_row;
    let mut x = vec![1.0; n];
    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    let mut y = vec![0.0; n];
    for it in 1..=opts.cap {
        for i in 0..n {
            y[i] = shift * x[i] + m[i].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        lower = lower.max(lo);
        upper = upper.min(hi);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            x[i] = y[i] / norm;
        }
        let gap = (upper - lower) / upper;
        if gap <= opts.tol {
            return Ok(SpectralRadius {
                value: 0.5 * (lower + upper) - shift,
                iterations: it,
                residual: gap,
            });
        }
    }
    let gap = (upper - lower) / upper;
    if gap < 1e-11 {
        // rounding floor reached before the requested tolerance
        return Ok(SpectralRadius {
            value: 0.5 * (lower + upper) - shift,
            iterations: opts.cap,
            residual: gap,
        });
    }
    Err(SpectralError::NoConvergence {
        iterations: opts.cap,
        residual: gap,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureValue {
    /// `log` of the spectral radius; `-inf` when `Q_beta` is nilpotent.
    pub value: f64,
    pub spectral_radius: f64,
    pub iterations: usize,
    pub residual: f64,
}

pub fn pressure(
    eval: &BetaEvaluator,
    q: &PolyMatrix,
    beta: f64,
    opts: &PowerOptions,
) -> Result<PressureValue, SpectralError> {
    let m = eval.matrix(q, beta);
    let r = spectral_radius(&m, opts)?;
    Ok(PressureValue {
        value: if r.value > 0.0 { r.value.ln() } else { f64::NEG_INFINITY },
        spectral_radius: r.value,
        iterations: r.iterations,
        residual: r.residual,
    })
}

/// Bisection for a decreasing function on `[lo, hi]`; returns the root and
/// the iteration count.
fn bisect_decreasing<F>(mut f: F, lo: f64, hi: f64, tol: f64, what: &str) -> Result<(f64, usize), SpectralError>
where
    F: FnMut(f64) -> Result<f64, SpectralError>,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa < 0.0 || fb > 0.0 {
        return Err(SpectralError::NoBracket {
            what: what.into(),
            lo,
            hi,
        });
    }
    if fa == 0.0 {
        return Ok((a, 0));
    }
    if fb == 0.0 {
        return Ok((b, 0));
    }
    let mut it = 0;
    while b - a > tol && it < 200 {
        let mid = 0.5 * (a + b);
        let v = f(mid)?;
        if v > 0.0 {
            a = mid;
        } else if v < 0.0 {
            b = mid;
        } else {
            return Ok((mid, it + 1));
        }
        it += 1;
    }
    Ok((0.5 * (a + b), it))
}

/// Positive roots of the denominator factors at `beta`.
fn factor_roots(eval: &BetaEvaluator, factors: &[CyclotomicFactor], beta: f64) -> Vec<f64> {
    factors
        .iter()
        .filter_map(|f| {
            let c = eval.t_coefficients(&crate::poly::WeightPoly::monomial(1, 0, &f.exps), beta)[0] * f.sign as f64;
            (c > 0.0).then(|| c.powf(-1.0 / f.period as f64))
        })
        .collect()
}

/// Least positive root of `p` on `(0, t_max]`, skipping roots within 1e-9
/// of any value in `exclude`. Scans `steps` points for a sign change (or a
/// touching extremum), then bisects.
pub fn least_positive_root(p: &RealPoly, t_max: f64, steps: usize, exclude: &[f64]) -> Option<f64> {
    let dp = p.derivative();
    let h = t_max / steps as f64;
    let excluded = |t: f64| exclude.iter().any(|&r| (r - t).abs() < 1e-9);
    let mut prev_t = 0.0;
    let mut prev_v = p.eval(0.0);
    let mut prev_d = dp.eval(0.0);
    for k in 1..=steps {
        let t = k as f64 * h;
        let v = p.eval(t);
        let d = dp.eval(t);
        let mut candidate = None;
        if v == 0.0 {
            candidate = Some(t);
        } else if prev_v != 0.0 && (v > 0.0) != (prev_v > 0.0) {
            candidate = Some(bisect_sign(p, prev_t, t));
        } else if (d > 0.0) != (prev_d > 0.0) {
            let e = bisect_sign(&dp, prev_t, t);
            if p.eval(e).abs() <= 1e-12 * p.magnitude(e) {
                candidate = Some(e);
            }
        }
        if let Some(r) = candidate {
            if !excluded(r) {
                return Some(r);
            }
        }
        prev_t = t;
        prev_v = v;
        prev_d = d;
    }
    None
}

fn bisect_sign(p: &RealPoly, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let sa = p.eval(a) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = p.eval(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    pub precision: usize,
    /// Bisection tolerance in `beta`.
    pub tol: f64,
    pub power: PowerOptions,
    pub scan_steps: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            precision: DEFAULT_PRECISION,
            tol: 1e-13,
            power: PowerOptions::default(),
            scan_steps: 10_000,
        }
    }
}

/// The determinant route: roots of the numerator of `D(t, beta)`.
pub struct DeterminantRoute<'a> {
    eval: &'a BetaEvaluator,
    numerator: &'a WeightPoly,
    denominator: &'a [CyclotomicFactor],
    t_max: f64,
    steps: usize,
}

impl<'a> DeterminantRoute<'a> {
    pub fn new(eval: &'a BetaEvaluator, d: &'a WeightRationalFn, steps: usize) -> Self {
        DeterminantRoute {
            eval,
            numerator: &d.numerator,
            denominator: &d.denominator,
            t_max: 2.0 * eval.max_abs_slope(),
            steps,
        }
    }

    pub fn polynomial(&self, beta: f64) -> RealPoly {
        RealPoly(self.eval.t_coefficients(self.numerator, beta))
    }

    /// Least positive root `t(beta)` of the numerator, ignoring roots of the
    /// factored denominator.
    pub fn root(&self, beta: f64) -> Result<f64, SpectralError> {
        let p = self.polynomial(beta);
        let exclude = factor_roots(self.eval, self.denominator, beta);
        least_positive_root(&p, self.t_max, self.steps, &exclude)
            .ok_or_else(|| SpectralError::NoRoot(format!("the kneading determinant at beta = {beta}")))
    }
}

/// Invariants from one route.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RouteValues {
    pub hausdorff_dimension: f64,
    pub escape_rate: f64,
    pub topological_entropy: f64,
}

impl RouteValues {
    pub fn max_difference(&self, other: &RouteValues) -> f64 {
        [
            (self.hausdorff_dimension - other.hausdorff_dimension).abs(),
            (self.escape_rate - other.escape_rate).abs(),
            (self.topological_entropy - other.topological_entropy).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub dimension_bracket: (f64, f64),
    pub bisection_iterations: usize,
    pub power_iterations: usize,
    /// `P(dim)` at the reported dimension.
    pub pressure_residual: Option<f64>,
    /// Least positive roots of the determinant numerator at beta = 0 and 1.
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    /// `num D(t0, 0)` and `num D(t1, 1)`.
    pub t0_residual: Option<f64>,
    pub t1_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    pub hausdorff_dimension: f64,
    pub escape_rate: f64,
    pub topological_entropy: f64,
    pub pressure_route: Option<RouteValues>,
    pub determinant_route: Option<RouteValues>,
    /// Largest disagreement between the two routes.
    pub route_difference: Option<f64>,
    pub moran_dimension: Option<f64>,
    pub diagnostics: Diagnostics,
    /// Truncation depth when computed from truncated itineraries.
    pub approximate: Option<usize>,
}

/// `h_top = P(0)`.
pub fn topological_entropy(eval: &BetaEvaluator, q: &PolyMatrix, opts: &SpectralOptions) -> Result<f64, SpectralError> {
    Ok(pressure(eval, q, 0.0, &opts.power)?.value)
}

/// `gamma = -P(1)`.
pub fn escape_rate(eval: &BetaEvaluator, q: &PolyMatrix, opts: &SpectralOptions) -> Result<f64, SpectralError> {
    Ok(-pressure(eval, q, 1.0, &opts.power)?.value)
}

/// Root of `P(beta) = 0` on `[0, 1]`.
pub fn hausdorff_dimension(
    eval: &BetaEvaluator,
    q: &PolyMatrix,
    opts: &SpectralOptions,
) -> Result<(f64, usize), SpectralError> {
    bisect_decreasing(
        |b| Ok(pressure(eval, q, b, &opts.power)?.value),
        0.0,
        1.0,
        opts.tol,
        "the pressure",
    )
}

fn determinant_route(route: &DeterminantRoute, opts: &SpectralOptions) -> Result<(RouteValues, f64, f64), SpectralError> {
    let t0 = route.root(0.0)?;
    let t1 = route.root(1.0)?;
    let (dim, _) = bisect_decreasing(|b| Ok(-route.root(b)?.ln()), 0.0, 1.0, opts.tol, "log t(beta)")?;
    Ok((
        RouteValues {
            hausdorff_dimension: dim,
            escape_rate: t1.ln(),
            topological_entropy: -t0.ln(),
        },
        t0,
        t1,
    ))
}

/// Solves `sum_i |slope_i|^(-s) = 1` for full-branch maps.
pub fn moran_dimension(map: &ValidatedMap) -> Option<f64> {
    if !map.is_full_branch() {
        return None;
    }
    let logs: Vec<f64> = (0..map.n_laps())
        .map(|i| rational_to_f64(&map.lap_weight(i).1).ln())
        .collect();
    let f = |s: f64| Ok(logs.iter().map(|l| (-s * l).exp()).sum::<f64>() - 1.0);
    bisect_decreasing(f, 0.0, 1.0, 1e-15, "the Moran sum").ok().map(|r| r.0)
}

/// Both routes when `Q` is available (pressure primary), otherwise the
/// determinant route alone.
pub fn compute_invariants(
    map: &ValidatedMap,
    d: &WeightRationalFn,
    q: Option<&PolyMatrix>,
    truncation: Option<usize>,
    opts: &SpectralOptions,
) -> Result<InvariantReport, SpectralError> {
    let eval = BetaEvaluator::new(map, opts.precision);
    let route = DeterminantRoute::new(&eval, d, opts.scan_steps);
    let det = determinant_route(&route, opts);
    let mut diagnostics = Diagnostics {
        dimension_bracket: (0.0, 1.0),
        bisection_iterations: 0,
        power_iterations: 0,
        pressure_residual: None,
        t0: None,
        t1: None,
        t0_residual: None,
        t1_residual: None,
    };
    let det_values = match &det {
        Ok((values, t0, t1)) => {
            diagnostics.t0 = Some(*t0);
            diagnostics.t1 = Some(*t1);
            diagnostics.t0_residual = Some(route.polynomial(0.0).eval(*t0));
            diagnostics.t1_residual = Some(route.polynomial(1.0).eval(*t1));
            Some(*values)
        }
        Err(_) => None,
    };
    let pressure_values = match q {
        Some(q) => {
            let h = pressure(&eval, q, 0.0, &opts.power)?;
            let g = pressure(&eval, q, 1.0, &opts.power)?;
            let (dim, iters) = hausdorff_dimension(&eval, q, opts)?;
            let at_dim = pressure(&eval, q, dim, &opts.power)?;
            diagnostics.bisection_iterations = iters;
            diagnostics.power_iterations = h.iterations.max(g.iterations).max(at_dim.iterations);
            diagnostics.pressure_residual = Some(at_dim.value);
            Some(RouteValues {
                hausdorff_dimension: dim,
                escape_rate: -g.value,
                topological_entropy: h.value,
            })
        }
        None => None,
    };
    let primary = match (pressure_values, det_values) {
        (Some(p), _) => p,
        (None, Some(d)) => d,
        (None, None) => match det {
            Err(e) => return Err(e),
            Ok(_) => unreachable!("determinant route produced values"),
        },
    };
    Ok(InvariantReport {
        hausdorff_dimension: primary.hausdorff_dimension,
        escape_rate: primary.escape_rate,
        topological_entropy: primary.topological_entropy,
        pressure_route: pressure_values,
        determinant_route: det_values,
        route_difference: match (pressure_values, det_values) {
            (Some(p), Some(d)) => Some(p.max_difference(&d)),
            _ => None,
        },
        moran_dimension: moran_dimension(map),
        diagnostics,
        approximate: truncation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_model::tests::{middle_thirds, paper_example};
    use crate::map_model::{int, validate_map, HoleMap, Lap};
    use crate::markov::build_bundle;
    use crate::kneading::{kneading_determinant, kneading_matrix};
    use crate::symbolic::{kneading_data, OrbitOptions};

    fn invariants(h: HoleMap) -> InvariantReport {
        let m = validate_map(h, true).unwrap();
        let data = kneading_data(&m, &OrbitOptions::default()).unwrap();
        let d = kneading_determinant(&kneading_matrix(&m, &data).unwrap());
        let b = build_bundle(&m, &data).unwrap();
        compute_invariants(&m, &d, Some(&b.q), None, &SpectralOptions::default()).unwrap()
    }

    #[test]
    fn evaluator_weights() {
        let m = validate_map(paper_example(), true).unwrap();
        let e = BetaEvaluator::new(&m, 128);
        let w = e.weights(1.0);
        assert!((w[0] - 0.25).abs() < 1e-16);
        assert!((w[2] - 1.0 / 3.0).abs() < 1e-16);
        let w = e.weights(0.5);
        assert!((w[3] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spectral_radius_cases() {
        let opts = PowerOptions::default();
        let r = spectral_radius(&[vec![0.0, 1.0], vec![1.0, 0.0]], &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        let r = spectral_radius(&[vec![0.0, 1.0], vec![0.0, 0.0]], &opts).unwrap();
        assert_eq!(r.value, 0.0);
        // reducible: the larger block wins
        let r = spectral_radius(
            &[vec![2.0, 1.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.0, 1.0, 3.0]],
            &opts,
        )
        .unwrap();
        assert!((r.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn least_root_skips_excluded() {
        // (1 - 2t)(1 - t) with 1/2 excluded
        let p = RealPoly(vec![1.0, -3.0, 2.0]);
        let r = least_positive_root(&p, 4.0, 10_000, &[]).unwrap();
        assert!((r - 0.5).abs() < 1e-14);
        let r = least_positive_root(&p, 4.0, 10_000, &[0.5]).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        // double root (1 - t)^2 has no sign change
        let p = RealPoly(vec![1.0, -2.0, 1.0]);
        let r = least_positive_root(&p, 4.0, 10_000, &[]).unwrap();
        assert!((r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn middle_thirds_invariants() {
        let r = invariants(middle_thirds());
        assert!((r.hausdorff_dimension - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
        assert!((r.escape_rate - 1.5f64.ln()).abs() < 1e-10);
        assert!((r.topological_entropy - 2f64.ln()).abs() < 1e-10);
        assert!(r.route_difference.unwrap() < 1e-8);
        assert!((r.moran_dimension.unwrap() - r.hausdorff_dimension).abs() < 1e-10);
    }

    #[test]
    fn example_invariants_match_oracle() {
        let r = invariants(paper_example());
        // frozen from an independent mpmath computation
        assert!((r.hausdorff_dimension - 0.919_940_025_028_615_9).abs() < 1e-10);
        assert!((r.escape_rate - 0.087_776_856_202_925_9).abs() < 1e-10);
        assert!((r.topological_entropy - 1.115_308_713_813_007_2).abs() < 1e-10);
        assert!(r.route_difference.unwrap() < 1e-8);
        assert!(r.moran_dimension.is_none());
    }

    #[test]
    fn pressure_values_for_middle_thirds() {
        let m = validate_map(middle_thirds(), true).unwrap();
        let data = kneading_data(&m, &OrbitOptions::default()).unwrap();
        let b = build_bundle(&m, &data).unwrap();
        let e = BetaEvaluator::new(&m, 128);
        let p1 = pressure(&e, &b.q, 1.0, &PowerOptions::default()).unwrap();
        assert!((p1.value - (2.0f64 / 3.0).ln()).abs() < 1e-10);
        let p0 = pressure(&e, &b.q, 0.0, &PowerOptions::default()).unwrap();
        assert!((p0.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn moran_for_slopes_two_and_four() {
        let h = HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), crate::map_model::rat(1, 2), int(2), int(0)),
                Lap::new(crate::map_model::rat(3, 4), int(1), int(4), int(-3)),
            ],
            hole: (crate::map_model::rat(1, 2), crate::map_model::rat(3, 4)),
        };
        let m = validate_map(h.clone(), true).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let s = moran_dimension(&m).unwrap();
        assert!((s - golden.ln() / 2f64.ln()).abs() < 1e-12);
        let r = invariants(h);
        assert!((r.hausdorff_dimension - s).abs() < 1e-10);
        assert!(moran_dimension(&validate_map(paper_example(), true).unwrap()).is_none());
    }
}
