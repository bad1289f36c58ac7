//! Exact arithmetic: rationals, sparse polynomials, parsing and truncated
//! power series.

mod monomial;
mod parse;
mod poly;
pub mod series;

use std::collections::BTreeSet;

pub use monomial::Monomial;
pub use parse::parse_polynomial;
pub use poly::Polynomial;
pub use series::TruncationOrder;

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Ordered list of declared variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VarContext {
    names: Vec<String>,
}

impl VarContext {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.into();
            if !out.contains(&n) {
                out.push(n);
            }
        }
        Self { names: out }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn extend<I, S>(&self, more: I) -> VarContext
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VarContext::new(self.names.iter().cloned().chain(more.into_iter().map(Into::into)))
    }

    pub fn to_set(&self) -> BTreeSet<String> {
        self.names.iter().cloned().collect()
    }

    /// Fails with `UndeclaredVariable` if `f` uses a name outside the context.
    pub fn check(&self, f: &Polynomial) -> Result<()> {
        match f.variables().into_iter().find(|v| !self.contains(v)) {
            Some(v) => Err(Error::UndeclaredVariable(v)),
            None => Ok(()),
        }
    }

    /// A name not in the context, derived from `stem`.
    pub fn fresh(&self, stem: &str) -> String {
        if !self.contains(stem) {
            return stem.to_string();
        }
        (1..).map(|i| format!("{stem}_{i}")).find(|n| !self.contains(n)).unwrap()
    }
}

pub fn differentiate(f: &Polynomial, var: &str, ctx: &VarContext) -> Result<Polynomial> {
    if !ctx.contains(var) {
        return Err(Error::UndeclaredVariable(var.to_string()));
    }
    ctx.check(f)?;
    Ok(f.derivative(var))
}

pub fn substitute(
    f: &Polynomial,
    assignment: &std::collections::BTreeMap<String, Polynomial>,
    ctx: &VarContext,
) -> Result<Polynomial> {
    ctx.check(f)?;
    if let Some(v) = assignment.keys().find(|v| !ctx.contains(v)) {
        return Err(Error::UndeclaredVariable(v.clone()));
    }
    Ok(f.substitute(assignment))
}
