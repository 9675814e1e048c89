//! Symmetric-function algebra over commutative rings.
//!
//! Power sums `P_j` and elementary symmetric functions `s_k` are related by
//! the Newton recurrence
//!
//! ```text
//! P_k - s_1 P_{k-1} + s_2 P_{k-2} - ... + (-1)^{k-1} s_{k-1} P_1 + (-1)^k k s_k = 0
//! ```
//!
//! The routines here are generic over [`RingElement`], so the same code runs
//! on exact rationals, on polynomials in the power sums (used to polarize
//! `s_k`), and on pointwise even-degree differential forms.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Minimal commutative ring interface.
///
/// `zero_like`/`one_like` take a template so that elements carrying shape
/// information (dimension of an exterior algebra, number of indeterminates)
/// can produce matching constants.
pub trait RingElement: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn scaled(&self, q: &BigRational) -> Self;
}

impl RingElement for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scaled(&self, q: &BigRational) -> Self {
        self * q
    }
}

impl RingElement for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scaled(&self, q: &BigRational) -> Self {
        self * rational_to_f64(q)
    }
}

impl RingElement for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scaled(&self, q: &BigRational) -> Self {
        self * rational_to_f64(q)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: usize) -> BigRational {
    let mut acc = BigInt::one();
    for m in 2..=n {
        acc *= BigInt::from(m);
    }
    BigRational::from_integer(acc)
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_order(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("symmetric function order must be positive".into()));
    }
    if k > available {
        return Err(Error::Argument(format!(
            "order {k} requested but only {available} inputs supplied"
        )));
    }
    Ok(())
}

/// `s_0, ..., s_k` from the power sums `powers = [P_1, P_2, ...]`.
pub fn elementary_sequence<R: RingElement>(powers: &[R], k: usize) -> Result<Vec<R>> {
    check_order(k, powers.len())?;
    let mut e = Vec::with_capacity(k + 1);
    e.push(powers[0].one_like());
    for m in 1..=k {
        let mut acc = powers[0].zero_like();
        for i in 1..=m {
            let term = e[m - i].times(&powers[i - 1]);
            acc = if i % 2 == 1 { acc.plus(&term) } else { acc.minus(&term) };
        }
        e.push(acc.scaled(&ratio(1, m as i64)));
    }
    Ok(e)
}

/// The elementary symmetric function `s_k` expressed through power sums.
pub fn elementary_from_power<R: RingElement>(powers: &[R], k: usize) -> Result<R> {
    let mut e = elementary_sequence(powers, k)?;
    Ok(e.swap_remove(k))
}

/// The power sum `P_k` expressed through `elementaries = [s_1, s_2, ...]`.
pub fn power_from_elementary<R: RingElement>(elementaries: &[R], k: usize) -> Result<R> {
    check_order(k, elementaries.len())?;
    let mut p: Vec<R> = Vec::with_capacity(k);
    for m in 1..=k {
        let mut acc = elementaries[m - 1].scaled(&ratio(m as i64, 1));
        if m % 2 == 0 {
            acc = acc.zero_like().minus(&acc);
        }
        for i in 1..m {
            let term = elementaries[i - 1].times(&p[m - i - 1]);
            acc = if i % 2 == 1 { acc.plus(&term) } else { acc.minus(&term) };
        }
        p.push(acc);
    }
    Ok(p.swap_remove(k - 1))
}

/// Graded even element `sum_j component_j`, where component `j` sits in
/// degree `2j` and carries the Chern-character normalization
/// `component_j = P_j / j!`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenAggregate<R> {
    components: Vec<R>,
}

impl<R> EvenAggregate<R> {
    pub fn new(components: Vec<R>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Argument("aggregate needs at least the degree-0 component".into()));
        }
        Ok(Self { components })
    }

    /// Largest stored index `J`; higher components are zero.
    pub fn top_index(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[R] {
        &self.components
    }

    pub fn map<S, F: Fn(&R) -> S>(&self, f: F) -> EvenAggregate<S> {
        EvenAggregate { components: self.components.iter().map(f).collect() }
    }
}

impl<R: RingElement> EvenAggregate<R> {
    pub fn component(&self, j: usize) -> R {
        match self.components.get(j) {
            Some(c) => c.clone(),
            None => self.components[0].zero_like(),
        }
    }

    /// Recovers `P_1..P_k` via `P_j = j! * component_j`.
    pub fn power_sums(&self, k: usize) -> Vec<R> {
        (1..=k).map(|j| self.component(j).scaled(&factorial(j))).collect()
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        let n = self.components.len().max(rhs.components.len());
        let components = (0..n).map(|j| self.component(j).plus(&rhs.component(j))).collect();
        Self { components }
    }
}

/// `s_k` of an even aggregate: the k-th elementary symmetric function of the
/// power sums `j! * component_j`.
pub fn sk_of_aggregate<R: RingElement>(agg: &EvenAggregate<R>, k: usize) -> Result<R> {
    if k == 0 {
        return Err(Error::Argument("s_k needs k >= 1".into()));
    }
    if agg.top_index() < k {
        return Err(Error::Argument(format!(
            "aggregate has components up to {} but s_{k} was requested",
            agg.top_index()
        )));
    }
    elementary_from_power(&agg.power_sums(k), k)
}

/// Sparse polynomial with rational coefficients in the indeterminates
/// `u_1..u_J`, where `u_j` stands for the power sum `P_j` and has weight `j`.
#[derive(Clone, PartialEq, Eq)]
pub struct SymPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl SymPolynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.insert(vec![0; nvars], c);
        p
    }

    /// The indeterminate `u_j` (1-based).
    pub fn variable(nvars: usize, j: usize) -> Result<Self> {
        if j == 0 || j > nvars {
            return Err(Error::Argument(format!("variable u_{j} outside u_1..u_{nvars}")));
        }
        let mut exps = vec![0; nvars];
        exps[j - 1] = 1;
        let mut p = Self::zero(nvars);
        p.insert(exps, BigRational::one());
        Ok(p)
    }

    fn insert(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Indices `j` whose indeterminate actually occurs.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|e| e[v] > 0))
            .map(|v| v + 1)
            .collect()
    }

    /// Total weight of every monomial if they all agree.
    pub fn weight(&self) -> Option<u32> {
        let mut weights = self
            .terms
            .keys()
            .map(|e| e.iter().enumerate().map(|(v, &x)| (v as u32 + 1) * x).sum::<u32>());
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    /// Partial derivative with respect to `u_j` (1-based).
    pub fn partial(&self, j: usize) -> Result<Self> {
        if j == 0 || j > self.nvars {
            return Err(Error::Argument(format!("variable u_{j} outside u_1..u_{}", self.nvars)));
        }
        let mut out = Self::zero(self.nvars);
        for (exps, c) in &self.terms {
            let e = exps[j - 1];
            if e == 0 {
                continue;
            }
            let mut lowered = exps.clone();
            lowered[j - 1] -= 1;
            out.insert(lowered, c * BigRational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Evaluates at `values[v] = u_{v+1}`; `one` supplies the ring unit.
    pub fn eval<R: RingElement>(&self, one: &R, values: &[R]) -> R {
        assert!(values.len() >= self.nvars, "not enough values for polynomial evaluation");
        let mut acc = one.zero_like();
        for (exps, c) in &self.terms {
            let mut mono = one.clone();
            for (v, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    mono = mono.times(&values[v]);
                }
            }
            acc = acc.plus(&mono.scaled(c));
        }
        acc
    }
}

impl RingElement for SymPolynomial {
    fn zero_like(&self) -> Self {
        Self::zero(self.nvars)
    }
    fn one_like(&self) -> Self {
        Self::constant(self.nvars, BigRational::one())
    }
    fn plus(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }
    fn minus(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), -c.clone());
        }
        out
    }
    fn times(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }
    fn scaled(&self, q: &BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.insert(e.clone(), c * q);
        }
        out
    }
}

impl fmt::Debug for SymPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*P{}", v + 1)?,
                    _ => write!(f, "*P{}^{}", v + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// `s_k` as a polynomial in the power sums `P_1..P_J`.
pub fn sk_polynomial(k: usize, nvars: usize) -> Result<SymPolynomial> {
    if k == 0 || k > nvars {
        return Err(Error::Argument(format!("need 1 <= k <= J, got k={k}, J={nvars}")));
    }
    let vars = (1..=nvars)
        .map(|j| SymPolynomial::variable(nvars, j))
        .collect::<Result<Vec<_>>>()?;
    elementary_from_power(&vars, k)
}

/// `d s_k / d P_j` as an exact polynomial in `P_1..P_{k-j}`.
pub fn sk_partial_derivative(k: usize, j: usize, nvars: usize) -> Result<SymPolynomial> {
    if j == 0 || j > k || k > nvars {
        return Err(Error::Argument(format!(
            "need 1 <= j <= k <= J, got j={j}, k={k}, J={nvars}"
        )));
    }
    sk_polynomial(k, nvars)?.partial(j)
}

/// Rounds a rational to the nearest integer (ties away from zero).
pub fn round_rational(q: &BigRational) -> BigInt {
    let half = ratio(1, 2);
    if q.is_negative() {
        -((-q) + half).floor().to_integer()
    } else {
        (q + half).floor().to_integer()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn newton_examples() {
        assert_eq!(elementary_from_power(&[q(3), q(5)], 2).unwrap(), q(2));
        assert_eq!(elementary_from_power(&[q(5), q(13)], 2).unwrap(), q(6));
        assert_eq!(elementary_from_power(&[q(0), q(0), q(0)], 3).unwrap(), q(0));
        assert_eq!(power_from_elementary(&[q(3), q(2)], 2).unwrap(), q(5));
        assert_eq!(power_from_elementary(&[q(5), q(6)], 2).unwrap(), q(13));
        assert_eq!(power_from_elementary(&[q(0), q(0)], 2).unwrap(), q(0));
    }

    #[test]
    fn order_errors() {
        assert!(elementary_from_power(&[q(1)], 0).is_err());
        assert!(elementary_from_power(&[q(1)], 2).is_err());
        assert!(power_from_elementary::<BigRational>(&[], 1).is_err());
    }

    #[test]
    fn sk_of_aggregate_examples() {
        // rank one: (1, x, x^2/2) with x = 7
        let agg = EvenAggregate::new(vec![q(1), q(7), ratio(49, 2)]).unwrap();
        assert_eq!(sk_of_aggregate(&agg, 2).unwrap(), q(0));
        assert_eq!(sk_of_aggregate(&agg, 1).unwrap(), q(7));
        let agg = EvenAggregate::new(vec![q(2), q(5), ratio(13, 2)]).unwrap();
        assert_eq!(sk_of_aggregate(&agg, 2).unwrap(), q(6));
        assert!(sk_of_aggregate(&agg, 3).is_err());
    }

    #[test]
    fn partial_derivative_examples() {
        let d11 = sk_partial_derivative(1, 1, 3).unwrap();
        assert_eq!(d11, SymPolynomial::constant(3, q(1)));
        let d22 = sk_partial_derivative(2, 2, 2).unwrap();
        assert_eq!(d22, SymPolynomial::constant(2, ratio(-1, 2)));
        let d21 = sk_partial_derivative(2, 1, 2).unwrap();
        assert_eq!(d21.eval(&q(1), &[q(5), q(13)]), q(5));
        assert_eq!(d21.support(), vec![1]);
        assert!(sk_partial_derivative(2, 3, 3).is_err());
        assert!(sk_partial_derivative(4, 1, 3).is_err());
    }

    #[test]
    fn sk_polynomials_are_weighted_homogeneous() {
        for k in 1..=5 {
            let p = sk_polynomial(k, 5).unwrap();
            assert_eq!(p.weight(), Some(k as u32));
            for j in 1..=k {
                let d = p.partial(j).unwrap();
                assert_eq!(d.weight(), Some((k - j) as u32));
                assert!(d.support().iter().all(|&v| v <= k - j));
            }
        }
    }

    #[test]
    fn s3_matches_closed_form() {
        // s3 = (P1^3 - 3 P1 P2 + 2 P3) / 6
        let p = sk_polynomial(3, 3).unwrap();
        assert_eq!(p.coefficient(&[3, 0, 0]), ratio(1, 6));
        assert_eq!(p.coefficient(&[1, 1, 0]), ratio(-1, 2));
        assert_eq!(p.coefficient(&[0, 0, 1]), ratio(1, 3));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_rational(&ratio(7, 2)), BigInt::from(4));
        assert_eq!(round_rational(&ratio(-7, 2)), BigInt::from(-4));
        assert_eq!(round_rational(&ratio(-1, 3)), BigInt::from(0));
    }
}
