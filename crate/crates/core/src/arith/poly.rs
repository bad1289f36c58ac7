use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::Rational;

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are stored in a `BTreeMap` keyed by [`Monomial`]; zero coefficients
/// are never stored, so `==` is equality of polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(Monomial::var(name), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Leading term under the built-in graded order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, vars: &BTreeSet<String>) -> u32 {
        self.terms.keys().map(|m| m.degree_in(vars)).max().unwrap_or(0)
    }

    /// Least total degree in `vars` over all terms (the `vars`-adic order).
    pub fn order_in(&self, vars: &BTreeSet<String>) -> Option<u32> {
        self.terms.keys().map(|m| m.degree_in(vars)).min()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn involves(&self, var: &str) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: &str) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(var);
            if e == 0 {
                continue;
            }
            let m = rest.mul(&Monomial::from_powers([(var, e - 1)]));
            out.add_term(m, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Simultaneous substitution; variables without an image are kept.
    pub fn substitute(&self, assignment: &BTreeMap<String, Polynomial>) -> Polynomial {
        self.substitute_with(assignment, |a, b| a * b)
    }

    /// Substitution where every product is truncated at order `n` in `series_vars`.
    pub fn substitute_truncated(
        &self,
        assignment: &BTreeMap<String, Polynomial>,
        n: u32,
        series_vars: &BTreeSet<String>,
    ) -> Polynomial {
        self.substitute_with(assignment, |a, b| a.mul_truncated(b, n, series_vars))
            .truncate(n, series_vars)
    }

    fn substitute_with<F>(&self, assignment: &BTreeMap<String, Polynomial>, mul: F) -> Polynomial
    where
        F: Fn(&Polynomial, &Polynomial) -> Polynomial,
    {
        let mut power_cache: BTreeMap<(String, u32), Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            let mut kept = Vec::new();
            for (v, e) in m.powers() {
                match assignment.get(v) {
                    Some(image) => {
                        let key = (v.clone(), *e);
                        if !power_cache.contains_key(&key) {
                            let mut acc = Polynomial::one();
                            for _ in 0..*e {
                                acc = mul(&acc, image);
                            }
                            power_cache.insert(key.clone(), acc);
                        }
                        term = mul(&term, &power_cache[&key]);
                    }
                    None => kept.push((v.clone(), *e)),
                }
            }
            if !kept.is_empty() {
                term = term.mul_monomial(&Monomial::from_powers(kept), &Rational::one());
            }
            out = out + term;
        }
        out
    }

    /// Drops every term whose total degree in `series_vars` is at least `n`.
    pub fn truncate(&self, n: u32, series_vars: &BTreeSet<String>) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(series_vars) < n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn mul_truncated(&self, other: &Polynomial, n: u32, series_vars: &BTreeSet<String>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree_in(series_vars);
            if d1 >= n {
                continue;
            }
            for (m2, c2) in &other.terms {
                if d1 + m2.degree_in(series_vars) >= n {
                    continue;
                }
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = d.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            rem = rem - d.mul_monomial(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Splits off the part of `self` homogeneous of degree `k` in `vars`.
    pub fn homogeneous_part(&self, vars: &BTreeSet<String>, k: u32) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(vars) == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients of `self` viewed as a polynomial in `var`.
    pub fn coefficients_in(&self, var: &str) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(var);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    /// Multiplies by the positive rational making the coefficients coprime
    /// integers; returns the primitive polynomial.
    pub fn primitive(&self) -> Polynomial {
        use num_integer::Integer;
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        if num.is_zero() {
            return Polynomial::zero();
        }
        self.scale(&Rational::new(den, num))
    }

    pub fn max_coefficient_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        if self.terms.len() < rhs.terms.len() {
            return rhs + self;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -self.clone()
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |a, b| a + b)
    }
}

impl From<i64> for Polynomial {
    fn from(n: i64) -> Self {
        Polynomial::integer(n)
    }
}

impl From<Rational> for Polynomial {
    fn from(c: Rational) -> Self {
        Polynomial::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }
    fn y() -> Polynomial {
        Polynomial::var("y")
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = &(&x() + &y()) - &x();
        assert_eq!(p, y());
        assert_eq!((&x() - &x()).num_terms(), 0);
    }

    #[test]
    fn derivative_power_rule() {
        // d/dY2 (Y1^2 Y2 + Y2^3) = Y1^2 + 3 Y2^2
        let y1 = Polynomial::var("Y1");
        let y2 = Polynomial::var("Y2");
        let f = &(&y1.pow(2) * &y2) + &y2.pow(3);
        let expected = &y1.pow(2) + &y2.pow(2).scale(&Rational::from_integer(3.into()));
        assert_eq!(f.derivative("Y2"), expected);
        assert!(Polynomial::integer(7).derivative("Y1").is_zero());
    }

    #[test]
    fn exact_division() {
        let f = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(f.div_exact(&(&x() + &y())), Some(&x() - &y()));
        assert_eq!(x().div_exact(&y()), None);
        assert_eq!(Polynomial::zero().div_exact(&x()), Some(Polynomial::zero()));
    }

    #[test]
    fn display_is_descending() {
        let p = &(&x().pow(2) - &y()) + &Polynomial::integer(3);
        assert_eq!(p.to_string(), "x^2 - y + 3");
        let half = Polynomial::constant(Rational::new(1.into(), 2.into()));
        assert_eq!((&half * &x()).to_string(), "1/2*x");
    }

    #[test]
    fn truncation_uses_series_degree() {
        let vars: BTreeSet<String> = ["x".to_string()].into();
        let p = &(&x().pow(3) * &y()) + &x();
        assert_eq!(p.truncate(2, &vars), x());
        assert_eq!(p.truncate(4, &vars), p);
    }
}
