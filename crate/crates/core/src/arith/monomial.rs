use std::cmp::Ordering;
use std::fmt;

/// A power product of named variables.
///
/// Exponents are kept sorted by variable name and zero exponents are never
/// stored, so structural equality is monomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    powers: Vec<(String, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(name: &str) -> Self {
        Self::from_powers([(name.to_string(), 1)])
    }

    pub fn from_powers<I, S>(powers: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut out: Vec<(String, u32)> = Vec::new();
        for (name, exp) in powers {
            let name = name.into();
            match out.binary_search_by(|(v, _)| v.as_str().cmp(name.as_str())) {
                Ok(i) => out[i].1 += exp,
                Err(i) => out.insert(i, (name, exp)),
            }
        }
        out.retain(|(_, e)| *e > 0);
        Self { powers: out }
    }

    pub fn powers(&self) -> &[(String, u32)] {
        &self.powers
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.powers.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.powers
            .binary_search_by(|(v, _)| v.as_str().cmp(var))
            .map(|i| self.powers[i].1)
            .unwrap_or(0)
    }

    /// Total degree restricted to the given variables.
    pub fn degree_in<'a, I: IntoIterator<Item = &'a String>>(&self, vars: I) -> u32 {
        vars.into_iter().map(|v| self.exponent(v)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.powers.len() + other.powers.len());
        let (mut i, mut j) = (0, 0);
        while i < self.powers.len() && j < other.powers.len() {
            let (a, b) = (&self.powers[i], &other.powers[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0.clone(), a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.powers[i..]);
        out.extend_from_slice(&other.powers[j..]);
        Monomial { powers: out }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            powers: self.powers.iter().map(|(v, e)| (v.clone(), e * k)).collect(),
        }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.powers.clone();
        for (v, e) in &other.powers {
            let i = out.binary_search_by(|(w, _)| w.as_str().cmp(v)).ok()?;
            if out[i].1 < *e {
                return None;
            }
            out[i].1 -= e;
        }
        out.retain(|(_, e)| *e > 0);
        Some(Monomial { powers: out })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.powers.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(
            self.powers
                .iter()
                .map(|(v, e)| (v.clone(), (*e).min(other.exponent(v)))),
        )
    }

    /// Removes the variable, returning its exponent and the remaining monomial.
    pub fn split_off(&self, var: &str) -> (u32, Monomial) {
        let e = self.exponent(var);
        let rest = Monomial {
            powers: self.powers.iter().filter(|(v, _)| v != var).cloned().collect(),
        };
        (e, rest)
    }
}

impl Ord for Monomial {
    /// Graded order; ties broken lexicographically with alphabetically
    /// earlier variables more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| lex_cmp(&self.powers, &other.powers))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn lex_cmp(a: &[(String, u32)], b: &[(String, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                // `a` has a variable that `b` lacks at this position.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match x.1.cmp(&y.1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            },
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.powers.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.powers.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_exponents_are_dropped() {
        let m = Monomial::from_powers([("x", 2), ("y", 0), ("x", 1)]);
        assert_eq!(m.powers(), &[("x".to_string(), 3)]);
        assert_eq!(m.total_degree(), 3);
    }

    #[test]
    fn graded_then_lex() {
        let x = Monomial::var("x");
        let y = Monomial::var("y");
        assert!(x > y);
        assert!(y.mul(&y) > x);
        assert!(x.mul(&y) < x.mul(&x));
        assert!(Monomial::one() < y);
    }

    #[test]
    fn division() {
        let a = Monomial::from_powers([("x", 2), ("y", 1)]);
        let b = Monomial::var("x");
        assert_eq!(a.div(&b), Some(Monomial::from_powers([("x", 1), ("y", 1)])));
        assert_eq!(b.div(&a), None);
        assert!(b.divides(&a));
    }
}
