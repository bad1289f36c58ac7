use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Polynomial;
use crate::error::{Error, Result};

/// `num / den` where `den` is a unit of the base ring (a tracked denominator).
///
/// Nothing here checks that `den` is a unit; [`super::BaseRing::certify_unit`]
/// does that when an element is admitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Frac {
    #[serde(with = "crate::serde_poly")]
    num: Polynomial,
    #[serde(with = "crate::serde_poly")]
    den: Polynomial,
}

impl Frac {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(q) = num.div_exact(&den) {
            return Self { num: q, den: Polynomial::one() };
        }
        // make the denominator's leading coefficient 1
        let lc = den.leading_term().map(|(_, c)| c.clone()).unwrap();
        let inv = num_traits::Inv::inv(lc);
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero() -> Self {
        Self { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::from(Polynomial::one())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, o: &Frac) -> Frac {
        if self.den == o.den {
            return Self::normalized(&self.num + &o.num, self.den.clone());
        }
        Self::normalized(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &Frac) -> Frac {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Frac {
        Frac { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &Frac) -> Frac {
        Self::normalized(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Frac {
        Self::normalized(&self.num * p, self.den.clone())
    }

    pub fn pow(&self, k: u32) -> Frac {
        Self::normalized(self.num.pow(k), self.den.pow(k))
    }

    /// Same element of the localization. Cross-multiplication is exact in a domain of
    /// polynomials; over a quotient base the caller compares normal forms instead.
    pub fn same_as(&self, o: &Frac) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }

    /// Division by a polynomial that must divide the numerator exactly.
    pub fn div_poly(&self, d: &Polynomial) -> Result<Frac> {
        let q = self
            .num
            .div_exact(d)
            .ok_or_else(|| Error::NotDivisible(format!("`{}` by `{d}`", self.num)))?;
        Ok(Self::normalized(q, self.den.clone()))
    }

    pub fn derivative(&self, var: &str) -> Frac {
        // den is a base unit and never involves presentation variables
        debug_assert!(!self.den.involves(var));
        Self::normalized(self.num.derivative(var), self.den.clone())
    }
}

/// Simultaneous substitution of elements with tracked denominators.
///
/// Terms are brought over the common denominator `δ^k`, `δ` being the product
/// of the distinct image denominators and `k` the top substituted degree.
pub fn substitute(f: &Polynomial, images: &BTreeMap<String, Frac>) -> Frac {
    let mut dens: Vec<Polynomial> = Vec::new();
    for img in images.values() {
        if !img.den.is_one() && !dens.contains(&img.den) {
            dens.push(img.den.clone());
        }
    }
    let delta: Polynomial = dens.iter().fold(Polynomial::one(), |acc, d| &acc * d);
    let lifted: BTreeMap<String, Polynomial> = images
        .iter()
        .map(|(v, img)| {
            let scale = delta.div_exact(&img.den).expect("denominator divides the product");
            (v.clone(), &img.num * &scale)
        })
        .collect();
    if delta.is_one() {
        return Frac::from(f.substitute(&lifted));
    }
    let vars: BTreeSet<String> = images.keys().cloned().collect();
    let top = f.degree_in(&vars);
    let mut num = Polynomial::zero();
    for k in 0..=top {
        let part = f.homogeneous_part(&vars, k);
        if part.is_zero() {
            continue;
        }
        num = num + &part.substitute(&lifted) * &delta.pow(top - k);
    }
    Frac::normalized(num, delta.pow(top))
}

impl From<Polynomial> for Frac {
    fn from(p: Polynomial) -> Self {
        Frac { num: p, den: Polynomial::one() }
    }
}

impl PartialEq for Frac {
    fn eq(&self, o: &Frac) -> bool {
        self.same_as(o)
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serde_poly::parse_free;

    fn p(s: &str) -> Polynomial {
        parse_free(s).unwrap()
    }

    #[test]
    fn substitution_over_common_denominator() {
        let imgs = BTreeMap::from([
            ("Y".to_string(), Frac::new(p("t"), p("1 + t")).unwrap()),
            ("Z".to_string(), Frac::new(p("1"), p("2 - t")).unwrap()),
        ]);
        let got = substitute(&p("Y^2*Z + Y + 3"), &imgs);
        let y = Frac::new(p("t"), p("1 + t")).unwrap();
        let z = Frac::new(p("1"), p("2 - t")).unwrap();
        let want = y.mul(&y).mul(&z).add(&y).add(&Frac::from(p("3")));
        assert_eq!(got, want);
    }

    #[test]
    fn arithmetic_and_normalization() {
        let a = Frac::new(p("2*Y^2"), p("1 + t")).unwrap();
        let b = Frac::new(p("Y^2 - t^2 - t^3"), p("1 + t")).unwrap().mul_poly(&p("-2"));
        let d = a.add(&b);
        assert_eq!(d, Frac::from(p("2*t^2")));
        assert!(d.is_polynomial());
        assert!(Frac::new(p("1"), Polynomial::zero()).is_err());
        assert_eq!(Frac::new(p("2"), p("2 + 2*t")).unwrap().den(), &p("1 + t"));
    }
}
