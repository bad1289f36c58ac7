use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Frac;
use crate::arith::series::{self, TruncationOrder};
use crate::arith::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::ideal::{Budget, Ideal, MonomialOrder, RadicalMembership};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TargetKind {
    /// Q[x]/(x)^N, the model of a complete local ring.
    Truncated { series: Vec<String>, order: u32 },
    /// The polynomial ring Q[x] with exact equality.
    Exact { vars: Vec<String> },
}

/// The target A' together with the images of the base variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRing {
    #[serde(flatten)]
    pub kind: TargetKind,
    /// Image of each base variable; variables not listed map to themselves.
    #[serde(default, with = "crate::serde_poly::map")]
    pub structure: BTreeMap<String, Polynomial>,
}

impl TargetRing {
    pub fn truncated<S: Into<String>>(series: impl IntoIterator<Item = S>, n: TruncationOrder) -> Self {
        Self {
            kind: TargetKind::Truncated { series: series.into_iter().map(Into::into).collect(), order: n.get() },
            structure: BTreeMap::new(),
        }
    }

    pub fn exact<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        Self { kind: TargetKind::Exact { vars: vars.into_iter().map(Into::into).collect() }, structure: BTreeMap::new() }
    }

    pub fn vars(&self) -> &[String] {
        match &self.kind {
            TargetKind::Truncated { series, .. } => series,
            TargetKind::Exact { vars } => vars,
        }
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.vars().iter().cloned().collect()
    }

    /// Truncation order, `None` for exact targets.
    pub fn precision(&self) -> Option<u32> {
        match &self.kind {
            TargetKind::Truncated { order, .. } => Some(*order),
            TargetKind::Exact { .. } => None,
        }
    }

    pub fn check(&self, f: &Polynomial) -> Result<()> {
        match f.variables().into_iter().find(|v| !self.vars().contains(v)) {
            Some(v) => Err(Error::UndeclaredVariable(v)),
            None => Ok(()),
        }
    }

    /// Canonical representative of `f` at precision `prec` (defaults to `N`).
    pub fn reduce_at(&self, f: &Polynomial, prec: Option<u32>) -> Polynomial {
        match (&self.kind, prec.or(self.precision())) {
            (TargetKind::Truncated { .. }, Some(n)) => f.truncate(n, &self.var_set()),
            _ => f.clone(),
        }
    }

    pub fn reduce(&self, f: &Polynomial) -> Polynomial {
        self.reduce_at(f, None)
    }

    pub fn is_zero_at(&self, f: &Polynomial, prec: Option<u32>) -> bool {
        self.reduce_at(f, prec).is_zero()
    }

    pub fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        match &self.kind {
            TargetKind::Truncated { order, .. } => a.mul_truncated(b, *order, &self.var_set()),
            TargetKind::Exact { .. } => a * b,
        }
    }

    /// Evaluates a polynomial whose variables all have images in `assignment`
    /// (base variables fall back to the structure map).
    pub fn evaluate(&self, f: &Polynomial, assignment: &BTreeMap<String, Polynomial>) -> Polynomial {
        let mut full = assignment.clone();
        for v in f.variables() {
            if !full.contains_key(&v) {
                if let Some(img) = self.structure.get(&v) {
                    full.insert(v, img.clone());
                }
            }
        }
        match &self.kind {
            TargetKind::Truncated { order, .. } => f.substitute_truncated(&full, *order, &self.var_set()),
            TargetKind::Exact { .. } => f.substitute(&full),
        }
    }

    pub fn evaluate_frac(&self, f: &Frac, assignment: &BTreeMap<String, Polynomial>) -> Result<Polynomial> {
        let num = self.evaluate(f.num(), assignment);
        if f.is_polynomial() {
            return Ok(num);
        }
        let den = self.evaluate(f.den(), assignment);
        let inv = self.inverse(&den)?;
        Ok(self.mul(&num, &inv))
    }

    pub fn is_unit(&self, f: &Polynomial) -> bool {
        match &self.kind {
            TargetKind::Truncated { .. } => series::is_unit(f, &self.var_set()),
            TargetKind::Exact { .. } => f.is_constant() && !f.is_zero(),
        }
    }

    pub fn inverse(&self, f: &Polynomial) -> Result<Polynomial> {
        match &self.kind {
            TargetKind::Truncated { order, .. } => {
                series::inverse(f, TruncationOrder::new(*order)?, &self.var_set())
            }
            TargetKind::Exact { .. } => {
                if self.is_unit(f) {
                    Ok(Polynomial::constant(num_traits::Inv::inv(f.constant_term())))
                } else {
                    Err(Error::NotUnit(f.to_string()))
                }
            }
        }
    }

    /// `f / d` in the target. Truncated quotients are determined only modulo
    /// the annihilator of `d`, so they come back at reduced precision.
    pub fn divide(&self, f: &Polynomial, d: &Polynomial) -> Result<Polynomial> {
        match &self.kind {
            TargetKind::Truncated { order, .. } => {
                series::exact_divide(f, d, TruncationOrder::new(*order)?, &self.var_set())
            }
            TargetKind::Exact { .. } => {
                if f.is_zero() {
                    return Ok(Polynomial::zero());
                }
                f.div_exact(d).ok_or_else(|| Error::NotDivisible(format!("`{f}` by `{d}`")))
            }
        }
    }

    /// x-adic order for truncated targets; for exact targets, the least total
    /// degree of a term (so "divisible by x^k" has the same reading).
    pub fn order_of(&self, f: &Polynomial) -> Option<u32> {
        f.order_in(&self.var_set())
    }

    /// The ideal `(gens) + (x)^N` of Q[x] modelling `(gens) A'`.
    pub fn ideal(&self, gens: &[Polynomial]) -> Ideal {
        let mut all: Vec<Polynomial> = gens.iter().map(|g| self.reduce(g)).collect();
        if let TargetKind::Truncated { series, order } = &self.kind {
            all.extend(monomials_of_degree(series, *order));
        }
        Ideal::new(all, MonomialOrder::degrevlex(self.vars().iter().cloned()), Budget::default())
    }

    /// Whether `f` lies in `(gens) A'`.
    pub fn ideal_contains(&self, gens: &[Polynomial], f: &Polynomial) -> Result<bool> {
        self.ideal(gens).contains(&self.reduce(f))
    }

    /// Radical membership of `f` in `(gens) A'`.
    ///
    /// In a truncated target the quotient is Artinian and the Rabinowitsch test
    /// degenerates, so this is a power search `f^k` for `k <= N`.
    pub fn radical_membership(&self, gens: &[Polynomial], f: &Polynomial) -> Result<RadicalMembership> {
        let ideal = self.ideal(gens);
        match &self.kind {
            TargetKind::Truncated { order, .. } => {
                let f = self.reduce(f);
                let mut power = f.clone();
                for k in 1..=*order {
                    if ideal.contains(&power)? {
                        return Ok(RadicalMembership { member: true, exponent: Some(k) });
                    }
                    power = self.mul(&power, &f);
                }
                Ok(RadicalMembership { member: false, exponent: None })
            }
            TargetKind::Exact { .. } => ideal.radical_membership(f, ideal.budget().max_degree),
        }
    }
}

fn monomials_of_degree(vars: &[String], n: u32) -> Vec<Polynomial> {
    let mut out = Vec::new();
    let mut current: Vec<(String, u32)> = Vec::new();
    fn rec(vars: &[String], left: u32, cur: &mut Vec<(String, u32)>, out: &mut Vec<Polynomial>) {
        if vars.len() == 1 {
            cur.push((vars[0].clone(), left));
            out.push(Polynomial::monomial(Monomial::from_powers(cur.clone()), crate::arith::rational(1, 1)));
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push((vars[0].clone(), k));
            rec(&vars[1..], left - k, cur, out);
            cur.pop();
        }
    }
    if !vars.is_empty() {
        rec(vars, n, &mut current, &mut out);
    }
    out
}
