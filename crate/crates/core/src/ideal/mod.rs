//! Ideals of polynomial rings over Q: Groebner bases, certified membership,
//! quotients, intersections, radical membership and unit inversion.

mod groebner;
mod order;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use groebner::{basis_strings, Budget, GroebnerBasis, Reduction};
pub use order::{MonomialOrder, OrderKind};

use crate::arith::{Polynomial, VarContext};
use crate::error::{Error, Result};

/// Witness that `input = sum cofactors[i] * generators[i] + remainder`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    #[serde(with = "crate::serde_poly::vec")]
    pub cofactors: Vec<Polynomial>,
    #[serde(with = "crate::serde_poly")]
    pub remainder: Polynomial,
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        self.remainder.is_zero()
    }

    /// Multiply-back check against the generator list the certificate refers to.
    pub fn verify(&self, input: &Polynomial, generators: &[Polynomial]) -> bool {
        if self.cofactors.len() != generators.len() {
            return false;
        }
        let combo: Polynomial = self
            .cofactors
            .iter()
            .zip(generators)
            .map(|(c, g)| c * g)
            .sum();
        &combo + &self.remainder == *input
    }
}

/// A finitely generated ideal with lazily computed Groebner bases.
#[derive(Debug)]
pub struct Ideal {
    generators: Vec<Polynomial>,
    order: MonomialOrder,
    budget: Budget,
    plain: OnceLock<GroebnerBasis>,
    tracked: OnceLock<GroebnerBasis>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let out = Ideal::new(self.generators.clone(), self.order.clone(), self.budget);
        if let Some(g) = self.plain.get() {
            let _ = out.plain.set(g.clone());
        }
        if let Some(g) = self.tracked.get() {
            let _ = out.tracked.set(g.clone());
        }
        out
    }
}

impl Ideal {
    /// Zero generators are dropped; the zero ideal has an empty generator list.
    pub fn new(generators: Vec<Polynomial>, order: MonomialOrder, budget: Budget) -> Self {
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Self { generators, order, budget, plain: OnceLock::new(), tracked: OnceLock::new() }
    }

    /// Degree-reverse-lexicographic order on the sorted variables of the generators
    /// plus `extra`.
    pub fn with_default_order(generators: Vec<Polynomial>, extra: &[String]) -> Self {
        let mut vars: BTreeSet<String> = generators.iter().flat_map(Polynomial::variables).collect();
        vars.extend(extra.iter().cloned());
        Self::new(generators, MonomialOrder::degrevlex(vars), Budget::default())
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn context(&self) -> VarContext {
        VarContext::new(self.order.vars().iter().cloned())
    }

    /// Same generators under an order extended by the variables of `f`.
    fn covering(&self, f: &Polynomial) -> Option<Ideal> {
        let missing: Vec<String> =
            f.variables().into_iter().filter(|v| self.order.index_of(v).is_none()).collect();
        if missing.is_empty() {
            None
        } else {
            Some(Ideal::new(self.generators.clone(), self.order.with_vars(missing), self.budget))
        }
    }

    pub fn groebner(&self) -> Result<&GroebnerBasis> {
        if let Some(g) = self.tracked.get() {
            return Ok(g);
        }
        if let Some(g) = self.plain.get() {
            return Ok(g);
        }
        let g = GroebnerBasis::compute(&self.generators, &self.order, &self.budget, false)?;
        let _ = self.plain.set(g);
        Ok(self.plain.get().unwrap())
    }

    /// Seeds the untracked basis, e.g. from an on-disk cache.
    pub fn seed_groebner(&self, g: GroebnerBasis) {
        let _ = self.plain.set(g);
    }

    pub fn tracked_groebner(&self) -> Result<&GroebnerBasis> {
        if let Some(g) = self.tracked.get() {
            return Ok(g);
        }
        let g = GroebnerBasis::compute(&self.generators, &self.order, &self.budget, true)?;
        let _ = self.tracked.set(g);
        Ok(self.tracked.get().unwrap())
    }

    pub fn reduced_basis(&self) -> Result<Vec<Polynomial>> {
        Ok(self.groebner()?.basis())
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        if let Some(wider) = self.covering(f) {
            return wider.contains(f);
        }
        self.groebner()?.contains(f)
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner()?.is_unit())
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Normal form of `f` together with a cofactor certificate over the generators.
    pub fn normal_form(&self, f: &Polynomial) -> Result<(Polynomial, MembershipCertificate)> {
        if let Some(wider) = self.covering(f) {
            return wider.normal_form(f);
        }
        if self.generators.is_empty() {
            return Ok((f.clone(), MembershipCertificate { cofactors: vec![], remainder: f.clone() }));
        }
        let red = self.tracked_groebner()?.reduce(f)?;
        let cert = MembershipCertificate {
            cofactors: red.cofactors.expect("tracked basis"),
            remainder: red.remainder.clone(),
        };
        Ok((red.remainder, cert))
    }

    /// Ideal equality via reduced bases (same order required).
    pub fn same_as(&self, other: &Ideal) -> Result<bool> {
        if self.order != other.order {
            let other = Ideal::new(other.generators.clone(), self.order.clone(), self.budget);
            return Ok(self.reduced_basis()? == other.reduced_basis()?);
        }
        Ok(self.reduced_basis()? == other.reduced_basis()?)
    }

    /// `self ⊆ other`
    pub fn is_subset_of(&self, other: &Ideal) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let order = self.order.with_vars(other.order.vars().iter().cloned());
        Ideal::new(gens, order, self.budget)
    }

    pub fn with_generators(&self, more: &[Polynomial]) -> Ideal {
        let mut gens = self.generators.clone();
        gens.extend(more.iter().cloned());
        let extra: BTreeSet<String> = more.iter().flat_map(Polynomial::variables).collect();
        Ideal::new(gens, self.order.with_vars(extra), self.budget)
    }

    /// Elements of the ideal not involving `vars`, computed with an
    /// elimination order.
    pub fn eliminate(&self, vars: &[String]) -> Result<Ideal> {
        let order = self.order.eliminating(vars);
        let big = Ideal::new(self.generators.clone(), order, self.budget);
        let kept: Vec<Polynomial> = big
            .reduced_basis()?
            .into_iter()
            .filter(|g| vars.iter().all(|v| !g.involves(v)))
            .collect();
        let rest: Vec<String> =
            self.order.vars().iter().filter(|v| !vars.contains(v)).cloned().collect();
        let rest_order = MonomialOrder::new(self.order.kind(), rest);
        Ok(Ideal::new(kept, rest_order, self.budget))
    }

    pub fn intersect(&self, other: &Ideal) -> Result<Ideal> {
        if self.is_zero() || other.is_zero() {
            return Ok(Ideal::new(vec![], self.order.with_vars(other.order.vars().iter().cloned()), self.budget));
        }
        let ctx = VarContext::new(self.order.vars().iter().chain(other.order.vars()).cloned());
        let z = ctx.fresh("elim_z");
        let zp = Polynomial::var(&z);
        let one_minus_z = &Polynomial::one() - &zp;
        let mut gens: Vec<Polynomial> = self.generators.iter().map(|g| &zp * g).collect();
        gens.extend(other.generators.iter().map(|g| &one_minus_z * g));
        let order = self.order.with_vars(other.order.vars().iter().cloned()).with_vars([z.clone()]);
        Ideal::new(gens, order, self.budget).eliminate(&[z])
    }

    /// `(self : g)` for a single polynomial.
    pub fn quotient_by(&self, g: &Polynomial) -> Result<Ideal> {
        let order = self.order.with_vars(g.variables());
        if g.is_zero() {
            return Ok(Ideal::new(vec![Polynomial::one()], order, self.budget));
        }
        if self.is_zero() {
            return Ok(Ideal::new(vec![], order, self.budget));
        }
        let principal = Ideal::new(vec![g.clone()], order.clone(), self.budget);
        let inter = Ideal::new(self.generators.clone(), order.clone(), self.budget).intersect(&principal)?;
        let mut gens = Vec::new();
        for h in inter.reduced_basis()? {
            let q = h
                .div_exact(g)
                .ok_or_else(|| Error::NotDivisible(format!("intersection element `{h}` by `{g}`")))?;
            gens.push(q);
        }
        let out = Ideal::new(gens, order, self.budget);
        // reduce to canonical generators
        let basis = out.reduced_basis()?;
        Ok(Ideal::new(basis, out.order.clone(), self.budget))
    }

    /// `(self : J)`, as the intersection of the single-generator quotients.
    pub fn quotient(&self, j: &Ideal) -> Result<Ideal> {
        let order = self.order.with_vars(j.order.vars().iter().cloned());
        let base = Ideal::new(self.generators.clone(), order.clone(), self.budget);
        let mut acc: Option<Ideal> = None;
        for g in j.generators() {
            let q = base.quotient_by(g)?;
            acc = Some(match acc {
                None => q,
                Some(a) => {
                    let i = a.intersect(&q)?;
                    let basis = i.reduced_basis()?;
                    Ideal::new(basis, order.clone(), self.budget)
                }
            });
        }
        Ok(acc.unwrap_or_else(|| Ideal::new(vec![Polynomial::one()], order, self.budget)))
    }

    /// Rabinowitsch test `1 ∈ I + (1 - z f)`; when true also searches the least
    /// `k <= max_power` with `f^k ∈ I`.
    pub fn radical_membership(&self, f: &Polynomial, max_power: u32) -> Result<RadicalMembership> {
        if f.is_zero() {
            return Ok(RadicalMembership { member: true, exponent: Some(1) });
        }
        let ctx = VarContext::new(self.order.vars().iter().cloned().chain(f.variables()));
        let z = ctx.fresh("rab_z");
        let rab = &Polynomial::one() - &(&Polynomial::var(&z) * f);
        let order = self.order.with_vars(f.variables()).with_vars([z]);
        let mut gens = self.generators.clone();
        gens.push(rab);
        let member = Ideal::new(gens, order, self.budget).is_unit()?;
        if !member {
            return Ok(RadicalMembership { member: false, exponent: None });
        }
        let mut power = f.clone();
        for k in 1..=max_power {
            if self.contains(&power)? {
                return Ok(RadicalMembership { member: true, exponent: Some(k) });
            }
            power = &power * f;
        }
        Ok(RadicalMembership { member: true, exponent: None })
    }

    /// `g` with `f g ≡ 1 mod self`, from the cofactor of `f` in a representation
    /// of 1 in `self + (f)`.
    pub fn unit_inverse(&self, f: &Polynomial) -> Result<Polynomial> {
        let order = self.order.with_vars(f.variables());
        let mut gens = vec![f.clone()];
        gens.extend(self.generators.iter().cloned());
        if f.is_zero() {
            return Err(Error::NotUnit(f.to_string()));
        }
        let with_f = Ideal::new(gens.clone(), order.clone(), self.budget);
        let gb = with_f.tracked_groebner()?;
        if !gb.is_unit() {
            return Err(Error::NotUnit(f.to_string()));
        }
        let red = gb.reduce(&Polynomial::one())?;
        let cof = red.cofactors.expect("tracked");
        // generators may have lost zero entries; position 0 is f since f != 0
        let a = cof[0].clone();
        let base = Ideal::new(self.generators.clone(), order, self.budget);
        if base.is_zero() {
            return Ok(a);
        }
        Ok(base.normal_form(&a)?.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadicalMembership {
    pub member: bool,
    /// Least `k` with `f^k` in the ideal, when found within the bound.
    pub exponent: Option<u32>,
}

/// Least `e >= floor` with `(J : d^e) = (J : d^{e+1})`, together with the chain
/// of quotient ideals `(J : d^0), (J : d^1), ...` up to `e + 1`.
pub fn annihilator_chain(j: &Ideal, d: &Polynomial, floor: u32, max_e: u32) -> Result<(u32, Vec<Ideal>)> {
    let mut chain: Vec<Ideal> = Vec::new();
    let order = j.order().with_vars(d.variables());
    let j = Ideal::new(j.generators().to_vec(), order, j.budget());
    let mut power = Polynomial::one();
    chain.push(j.quotient_by(&power)?);
    for e in 0..=max_e {
        power = &power * d;
        let next = j.quotient_by(&power)?;
        let stable = chain[e as usize].same_as(&next)?;
        chain.push(next);
        if stable && e >= floor {
            return Ok((e, chain));
        }
    }
    Err(Error::DegreeBudgetExceeded(format!(
        "annihilator chain of `{d}` did not stabilize by exponent {max_e}"
    )))
}
