//! Truncated power-series arithmetic on top of [`Polynomial`].
//!
//! A truncated ring is described by a set of series variables `x` and an
//! order `N`; its elements are the polynomials of total `x`-degree below `N`.

use std::collections::BTreeSet;

use super::{Monomial, Polynomial, Rational};
use crate::error::{Error, Result};

/// x-adic truncation order `N >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationOrder(u32);

impl TruncationOrder {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("truncation order must be at least 1".into()));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

pub fn truncate(f: &Polynomial, n: TruncationOrder, series_vars: &BTreeSet<String>) -> Polynomial {
    f.truncate(n.get(), series_vars)
}

/// Unit test in the truncated ring: the constant term (in the series
/// variables) must be invertible.
pub fn is_unit(f: &Polynomial, series_vars: &BTreeSet<String>) -> bool {
    !f.homogeneous_part(series_vars, 0).is_zero()
}

/// Inverse of a unit modulo `(x)^N`, by Newton iteration `g <- g(2 - f g)`.
///
/// The constant part must be a nonzero rational.
pub fn inverse(f: &Polynomial, n: TruncationOrder, series_vars: &BTreeSet<String>) -> Result<Polynomial> {
    let c0 = f.homogeneous_part(series_vars, 0);
    if c0.is_zero() || !c0.is_constant() {
        return Err(Error::NotUnit(f.to_string()));
    }
    let f = f.truncate(n.get(), series_vars);
    let two = Polynomial::integer(2);
    let mut g = Polynomial::constant(Rational::from_integer(1.into()) / c0.constant_term());
    let mut prec = 1;
    while prec < n.get() {
        prec = (prec * 2).min(n.get());
        let fg = f.mul_truncated(&g, prec, series_vars);
        g = g.mul_truncated(&(&two - &fg), prec, series_vars);
    }
    Ok(g)
}

/// Quotient `f / d` in the truncated ring.
///
/// `d` must factor as a monomial times a unit. The quotient is determined
/// modulo the annihilator of `d`, so it is returned truncated at
/// `N - deg(monomial)`; multiplying back reproduces `f` at order `N`.
pub fn exact_divide(
    f: &Polynomial,
    d: &Polynomial,
    n: TruncationOrder,
    series_vars: &BTreeSet<String>,
) -> Result<Polynomial> {
    let f = f.truncate(n.get(), series_vars);
    let d = d.truncate(n.get(), series_vars);
    if d.is_zero() {
        return Err(Error::NotDivisible(format!("division by `{d}` vanishing at order {}", n.get())));
    }
    if f.is_zero() {
        return Ok(Polynomial::zero());
    }
    let content = series_content(&d, series_vars);
    let unit = d.div_exact(&Polynomial::monomial(content.clone(), Rational::from_integer(1.into())))
        .expect("monomial content divides");
    if !is_unit(&unit, series_vars) {
        return Err(Error::NotDivisible(format!(
            "divisor `{d}` is not a monomial times a unit"
        )));
    }
    let shift = content.total_degree();
    let mut shifted = Polynomial::zero();
    for (m, c) in f.terms() {
        match m.div(&content) {
            Some(q) => shifted.add_term(q, c.clone()),
            None => {
                return Err(Error::NotDivisible(format!(
                    "`{f}` has order below `{d}` (term {m})"
                )))
            }
        }
    }
    let prec = TruncationOrder(n.get() - shift);
    let inv = inverse(&unit, prec, series_vars)?;
    Ok(shifted.mul_truncated(&inv, prec.get(), series_vars))
}

/// Greatest monomial in the series variables dividing every term.
fn series_content(d: &Polynomial, series_vars: &BTreeSet<String>) -> Monomial {
    let mut content: Option<Monomial> = None;
    for (m, _) in d.terms() {
        let restricted =
            Monomial::from_powers(m.powers().iter().filter(|(v, _)| series_vars.contains(v)).cloned());
        content = Some(match content {
            None => restricted,
            Some(c) => c.gcd(&restricted),
        });
    }
    content.unwrap_or_default()
}

/// The x-adic order of `f`, i.e. the least total series degree of a term.
pub fn order(f: &Polynomial, series_vars: &BTreeSet<String>) -> Option<u32> {
    f.order_in(series_vars)
}

pub fn is_zero_at(f: &Polynomial, n: u32, series_vars: &BTreeSet<String>) -> bool {
    f.truncate(n, series_vars).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_polynomial, VarContext};

    fn vars() -> BTreeSet<String> {
        ["t".to_string()].into()
    }
    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &VarContext::new(["t", "x", "y"])).unwrap()
    }

    #[test]
    fn truncate_boundary() {
        let n = TruncationOrder::new(5).unwrap();
        assert!(truncate(&p("t^5"), n, &vars()).is_zero());
        assert_eq!(truncate(&p("1 + t^4"), n, &vars()), p("1 + t^4"));
    }

    #[test]
    fn inverse_of_one_plus_t() {
        let n = TruncationOrder::new(4).unwrap();
        let inv = inverse(&p("1 + t"), n, &vars()).unwrap();
        assert_eq!(inv, p("1 - t + t^2 - t^3"));
        assert_eq!(p("1 + t").mul_truncated(&inv, 4, &vars()), Polynomial::one());
        assert!(matches!(inverse(&p("t"), n, &vars()), Err(Error::NotUnit(_))));
    }

    #[test]
    fn exact_divide_examples() {
        let n = TruncationOrder::new(12).unwrap();
        assert_eq!(exact_divide(&p("t^3*(1+t)"), &p("2*t^2*(1+t)"), n, &vars()).unwrap(), p("t/2"));
        assert!(exact_divide(&Polynomial::zero(), &p("t"), n, &vars()).unwrap().is_zero());
        assert!(matches!(
            exact_divide(&p("t"), &p("t^2"), n, &vars()),
            Err(Error::NotDivisible(_))
        ));
    }

    #[test]
    fn multivariate_series() {
        let xy: BTreeSet<String> = ["x".to_string(), "y".to_string()].into();
        let n = TruncationOrder::new(6).unwrap();
        let inv = inverse(&p("1 + x + y"), n, &xy).unwrap();
        assert_eq!(p("1 + x + y").mul_truncated(&inv, 6, &xy), Polynomial::one());
        let q = exact_divide(&p("x*y + x^2*y"), &p("x*(1 + x)"), n, &xy).unwrap();
        assert_eq!(q, p("y"));
    }
}
