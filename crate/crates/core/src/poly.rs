//! Sparse polynomials in `t` and per-lap weight indeterminates `w_1..w_n`
//! with integer coefficients, and quotients by weighted cyclotomic factors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

/// Exponent vector: index 0 is the degree in `t`, index `i + 1` the exponent
/// of `w_{i+1}`. Ordered lexicographically, which is a monomial order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(SmallVec<[u32; 8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars + 1))
    }

    pub fn new(t: u32, exps: &[u32]) -> Self {
        let mut v = SmallVec::with_capacity(exps.len() + 1);
        v.push(t);
        v.extend_from_slice(exps);
        Monomial(v)
    }

    pub fn t_degree(&self) -> u32 {
        self.0[0]
    }

    pub fn exps(&self) -> &[u32] {
        &self.0[1..]
    }

    pub fn nvars(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller checks divisibility.
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    fn shift_t(&self, k: u32) -> Monomial {
        let mut m = self.clone();
        m.0[0] += k;
        m
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl WeightPoly {
    pub fn zero(nvars: usize) -> Self {
        WeightPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn constant(nvars: usize, c: i64) -> Self {
        Self::term(nvars, BigInt::from(c), Monomial::one(nvars))
    }

    pub fn term(nvars: usize, coeff: BigInt, mono: Monomial) -> Self {
        assert_eq!(mono.nvars(), nvars, "monomial arity");
        let mut p = Self::zero(nvars);
        p.add_term(mono, coeff);
        p
    }

    /// `coeff * t^t * prod w_i^{exps_i}`.
    pub fn monomial(coeff: i64, t: u32, exps: &[u32]) -> Self {
        Self::term(exps.len(), BigInt::from(coeff), Monomial::new(t, exps))
    }

    /// The indeterminate `t`.
    pub fn t(nvars: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[0] = 1;
        Self::term(nvars, BigInt::one(), m)
    }

    /// The weight indeterminate of lap `i` (0-based).
    pub fn weight(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[i + 1] = 1;
        Self::term(nvars, BigInt::one(), m)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing (t-degree, exponents) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add_scaled_term_product(&mut self, other: &WeightPoly, coeff: &BigInt, mono: &Monomial) {
        for (m, c) in &other.terms {
            self.add_term(m.mul(mono), c * coeff);
        }
    }

    pub fn t_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.t_degree()).max()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Constant term (coefficient of the monomial 1).
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> WeightPoly {
        let mut out = WeightPoly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    pub fn mul_t_pow(&self, k: u32) -> WeightPoly {
        WeightPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.shift_t(k), c.clone()))
                .collect(),
        }
    }

    /// Drops all terms of t-degree above `k`.
    pub fn truncate_t(&self, k: u32) -> WeightPoly {
        WeightPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t_degree() <= k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `t^k`, as a polynomial in the weights only.
    pub fn t_coefficient(&self, k: u32) -> WeightPoly {
        WeightPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t_degree() == k)
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.0[0] = 0;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`
    /// over the integers.
    pub fn exact_div(&self, d: &WeightPoly) -> Option<WeightPoly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if d.is_one() {
            return Some(self.clone());
        }
        let (dm, dc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = WeightPoly::zero(self.nvars);
        while let Some((rm, rc)) = r.leading_term() {
            if !dm.divides(rm) {
                return None;
            }
            let (qc, rem) = rc.div_rem(&dc);
            if !rem.is_zero() {
                return None;
            }
            let qm = dm.quotient_of(rm);
            let neg = -&qc;
            r.add_scaled_term_product(d, &neg, &qm);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Replaces each weight `w_i` by `w_{map[i]}` in a ring with `nvars`
    /// weights.
    pub fn merge_weights(&self, map: &[usize], nvars: usize) -> WeightPoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = WeightPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; nvars];
            for (i, &e) in m.exps().iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial::new(m.t_degree(), &exps), c.clone());
        }
        out
    }

    /// Sets every weight to 1 and returns the integer coefficients of `t^k`.
    pub fn unweighted_coefficients(&self) -> Vec<BigInt> {
        let deg = self.t_degree().unwrap_or(0) as usize;
        let mut out = vec![BigInt::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m.t_degree() as usize] += c;
        }
        out
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for (k, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[k].clone()),
                    _ => factors.push(format!("{}^{}", names[k], e)),
                }
            }
            match m.t_degree() {
                0 => {}
                1 => factors.push("t".into()),
                d => factors.push(format!("t^{d}")),
            }
            if factors.is_empty() || !abs.is_one() {
                factors.insert(0, abs.to_string());
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    fn default_names(&self) -> Vec<String> {
        (1..=self.nvars).map(|i| format!("w{i}")).collect()
    }
}

impl fmt::Debug for WeightPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightPoly({})", self.format_with(&self.default_names()))
    }
}

impl fmt::Display for WeightPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&self.default_names()))
    }
}

impl Add<&WeightPoly> for &WeightPoly {
    type Output = WeightPoly;
    fn add(self, rhs: &WeightPoly) -> WeightPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&WeightPoly> for &WeightPoly {
    type Output = WeightPoly;
    fn sub(self, rhs: &WeightPoly) -> WeightPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul<&WeightPoly> for &WeightPoly {
    type Output = WeightPoly;
    fn mul(self, rhs: &WeightPoly) -> WeightPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = WeightPoly::zero(self.nvars);
        let (small, large) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        for (m, c) in &small.terms {
            out.add_scaled_term_product(large, c, m);
        }
        out
    }
}

impl Neg for &WeightPoly {
    type Output = WeightPoly;
    fn neg(self) -> WeightPoly {
        WeightPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<WeightPoly> for WeightPoly {
            type Output = WeightPoly;
            fn $method(self, rhs: WeightPoly) -> WeightPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&WeightPoly> for WeightPoly {
            type Output = WeightPoly;
            fn $method(self, rhs: &WeightPoly) -> WeightPoly {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for WeightPoly {
    type Output = WeightPoly;
    fn neg(self) -> WeightPoly {
        -&self
    }
}

/// The factor `1 - sign * w^exps * t^period` closing a periodic tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclotomicFactor {
    pub period: u32,
    pub exps: Vec<u32>,
    pub sign: i8,
}

impl CyclotomicFactor {
    pub fn to_poly(&self) -> WeightPoly {
        let n = self.exps.len();
        let mut p = WeightPoly::one(n);
        p.add_term(
            Monomial::new(self.period, &self.exps),
            BigInt::from(-(self.sign as i64)),
        );
        p
    }

    pub fn merge_weights(&self, map: &[usize], nvars: usize) -> CyclotomicFactor {
        let mut exps = vec![0u32; nvars];
        for (i, &e) in self.exps.iter().enumerate() {
            exps[map[i]] += e;
        }
        CyclotomicFactor {
            period: self.period,
            exps,
            sign: self.sign,
        }
    }
}

pub fn product(factors: &[CyclotomicFactor], nvars: usize) -> WeightPoly {
    factors
        .iter()
        .fold(WeightPoly::one(nvars), |acc, f| &acc * &f.to_poly())
}

/// Quotient of a weight polynomial by a product of cyclotomic factors, kept
/// factored and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightRationalFn {
    pub numerator: WeightPoly,
    pub denominator: Vec<CyclotomicFactor>,
}

impl WeightRationalFn {
    pub fn new(numerator: WeightPoly, mut denominator: Vec<CyclotomicFactor>) -> Self {
        denominator.sort();
        WeightRationalFn {
            numerator,
            denominator,
        }
    }

    pub fn from_poly(p: WeightPoly) -> Self {
        WeightRationalFn {
            numerator: p,
            denominator: Vec::new(),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(WeightPoly::zero(nvars))
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn denominator_poly(&self) -> WeightPoly {
        product(&self.denominator, self.nvars())
    }

    /// Equality as rational functions, by cross-multiplication.
    pub fn equals(&self, other: &WeightRationalFn) -> bool {
        if self.denominator == other.denominator {
            return self.numerator == other.numerator;
        }
        &self.numerator * &other.denominator_poly() == &other.numerator * &self.denominator_poly()
    }

    /// Numerator rescaled to the denominator `target`, which must contain
    /// this function's denominator as a sub-multiset.
    pub fn numerator_over(&self, target: &[CyclotomicFactor]) -> WeightPoly {
        let extra = multiset_difference(target, &self.denominator);
        &self.numerator * &product(&extra, self.nvars())
    }

    /// Cancels every denominator factor that divides the numerator exactly.
    pub fn normalized(&self) -> WeightRationalFn {
        let mut num = self.numerator.clone();
        let mut den = Vec::new();
        for f in &self.denominator {
            match num.exact_div(&f.to_poly()) {
                Some(q) => num = q,
                None => den.push(f.clone()),
            }
        }
        WeightRationalFn::new(num, den)
    }

    pub fn format_with(&self, names: &[String]) -> String {
        let num = self.numerator.format_with(names);
        if self.denominator.is_empty() {
            return num;
        }
        let den: Vec<String> = self
            .denominator
            .iter()
            .map(|f| format!("({})", f.to_poly().format_with(names)))
            .collect();
        format!("({num}) / {}", den.join(""))
    }
}

/// Multiset union by maximum multiplicity.
pub fn multiset_lcm(a: &[CyclotomicFactor], b: &[CyclotomicFactor]) -> Vec<CyclotomicFactor> {
    let mut out = a.to_vec();
    out.extend(multiset_difference(b, a));
    out.sort();
    out
}

/// `a - b` as multisets (elements of `b` missing from `a` are ignored).
pub fn multiset_difference(a: &[CyclotomicFactor], b: &[CyclotomicFactor]) -> Vec<CyclotomicFactor> {
    let mut counts: BTreeMap<&CyclotomicFactor, usize> = BTreeMap::new();
    for f in b {
        *counts.entry(f).or_default() += 1;
    }
    let mut out = Vec::new();
    for f in a {
        match counts.get_mut(f) {
            Some(c) if *c > 0 => *c -= 1,
            _ => out.push(f.clone()),
        }
    }
    out
}

impl Add<&WeightRationalFn> for &WeightRationalFn {
    type Output = WeightRationalFn;
    fn add(self, rhs: &WeightRationalFn) -> WeightRationalFn {
        let den = multiset_lcm(&self.denominator, &rhs.denominator);
        let num = &self.numerator_over(&den) + &rhs.numerator_over(&den);
        WeightRationalFn::new(num, den)
    }
}

impl Sub<&WeightRationalFn> for &WeightRationalFn {
    type Output = WeightRationalFn;
    fn sub(self, rhs: &WeightRationalFn) -> WeightRationalFn {
        let den = multiset_lcm(&self.denominator, &rhs.denominator);
        let num = &self.numerator_over(&den) - &rhs.numerator_over(&den);
        WeightRationalFn::new(num, den)
    }
}

impl Mul<&WeightRationalFn> for &WeightRationalFn {
    type Output = WeightRationalFn;
    fn mul(self, rhs: &WeightRationalFn) -> WeightRationalFn {
        let mut den = self.denominator.clone();
        den.extend(rhs.denominator.iter().cloned());
        WeightRationalFn::new(&self.numerator * &rhs.numerator, den)
    }
}

impl Neg for &WeightRationalFn {
    type Output = WeightRationalFn;
    fn neg(self) -> WeightRationalFn {
        WeightRationalFn {
            numerator: -&self.numerator,
            denominator: self.denominator.clone(),
        }
    }
}
