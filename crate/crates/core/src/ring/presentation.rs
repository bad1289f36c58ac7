use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Frac;
use crate::arith::{Polynomial, VarContext};
use crate::error::{Error, Result};
use crate::ideal::{annihilator_chain, Budget, Ideal, MonomialOrder, OrderKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseKind {
    /// Q itself; `vars` must be empty.
    Field,
    /// Q[t]/(J); `relations = []` is the polynomial ring.
    Quotient {
        #[serde(with = "crate::serde_poly::vec")]
        relations: Vec<Polynomial>,
    },
    /// Q[t] localized at the prime generated by `prime`.
    Localized {
        #[serde(with = "crate::serde_poly::vec")]
        prime: Vec<Polynomial>,
    },
}

/// Computation settings shared by every ideal a presentation builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub order: OrderKind,
    pub budget: Budget,
}

impl Default for Settings {
    fn default() -> Self {
        Self { order: OrderKind::DegRevLex, budget: Budget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseRing {
    pub vars: Vec<String>,
    #[serde(flatten)]
    pub kind: BaseKind,
    #[serde(skip)]
    pub settings: Settings,
}

impl BaseRing {
    pub fn field() -> Self {
        Self { vars: vec![], kind: BaseKind::Field, settings: Settings::default() }
    }

    pub fn polynomial<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        Self::quotient(vars, vec![])
    }

    pub fn quotient<S: Into<String>>(vars: impl IntoIterator<Item = S>, relations: Vec<Polynomial>) -> Self {
        Self {
            vars: vars.into_iter().map(Into::into).collect(),
            kind: BaseKind::Quotient { relations },
            settings: Settings::default(),
        }
    }

    pub fn localized<S: Into<String>>(vars: impl IntoIterator<Item = S>, prime: Vec<Polynomial>) -> Self {
        Self {
            vars: vars.into_iter().map(Into::into).collect(),
            kind: BaseKind::Localized { prime },
            settings: Settings::default(),
        }
    }

    pub fn with_settings(mut self, settings: Settings) -> Self {
        self.settings = settings;
        self
    }

    pub fn context(&self) -> VarContext {
        VarContext::new(self.vars.iter().cloned())
    }

    pub fn relations(&self) -> &[Polynomial] {
        match &self.kind {
            BaseKind::Quotient { relations } => relations,
            _ => &[],
        }
    }

    pub fn is_localized(&self) -> bool {
        matches!(self.kind, BaseKind::Localized { .. })
    }

    pub fn prime(&self) -> Option<&[Polynomial]> {
        match &self.kind {
            BaseKind::Localized { prime } => Some(prime),
            _ => None,
        }
    }

    pub fn ideal(&self, gens: Vec<Polynomial>) -> Ideal {
        Ideal::new(gens, MonomialOrder::new(self.settings.order, self.vars.clone()), self.settings.budget)
    }

    pub fn check(&self, f: &Polynomial) -> Result<()> {
        self.context().check(f)
    }

    /// Whether a base element may serve as a tracked denominator.
    pub fn is_unit(&self, u: &Polynomial) -> Result<bool> {
        self.check(u)?;
        if u.is_zero() {
            return Ok(false);
        }
        match &self.kind {
            BaseKind::Field => Ok(u.is_constant()),
            BaseKind::Quotient { relations } => {
                if u.is_constant() {
                    return Ok(true);
                }
                let j = self.ideal(relations.clone());
                match j.unit_inverse(u) {
                    Ok(_) => Ok(true),
                    Err(Error::NotUnit(_)) => Ok(false),
                    Err(e) => Err(e),
                }
            }
            BaseKind::Localized { prime } => Ok(!self.ideal(prime.clone()).contains(u)?),
        }
    }

    pub fn certify_unit(&self, u: &Polynomial) -> Result<()> {
        if self.is_unit(u)? {
            Ok(())
        } else {
            Err(Error::NotUnit(format!("`{u}` is not a unit of the base")))
        }
    }

    /// True when `prime` is generated by the variables themselves, i.e. the
    /// localization is at the origin.
    fn localized_at_origin(&self) -> bool {
        match &self.kind {
            BaseKind::Localized { prime } => {
                let vs: BTreeSet<String> = self.vars.iter().map(|v| Polynomial::var(v).to_string()).collect();
                let ps: BTreeSet<String> = prime.iter().map(|p| p.to_string()).collect();
                vs == ps
            }
            _ => false,
        }
    }

    /// Splits `d = m * u` with `u` a base unit, moving as much as possible into
    /// `u`. Only localizations at the origin split off anything.
    pub fn split_unit(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        if self.localized_at_origin() {
            let base: BTreeSet<String> = self.vars.iter().cloned().collect();
            let order = d.order_in(&base).unwrap_or(0);
            let low = d.homogeneous_part(&base, order);
            if low.num_terms() == 1 && !d.variables().iter().any(|v| !base.contains(v)) {
                let (m, _) = low.leading_term().unwrap();
                let mono = Polynomial::monomial(m.clone(), crate::arith::rational(1, 1));
                let u = d.div_exact(&mono).expect("monomial divides its multiple");
                return (mono, u);
            }
        }
        if d.is_constant() && !d.is_zero() {
            return (Polynomial::one(), d.clone());
        }
        (d.clone(), Polynomial::one())
    }

    /// `f / d` for a base element `d`: unit factors of `d` become denominators,
    /// the rest must divide the numerator exactly.
    pub fn divide(&self, f: &Frac, d: &Frac) -> Result<Frac> {
        let (core, unit) = self.split_unit(d.num());
        let q = f.div_poly(&core)?;
        Frac::new(&q.num().clone() * d.den(), &q.den().clone() * &unit)
    }

    /// Least `e >= floor` with `(0 : d^e) = (0 : d^{e+1})` in the base.
    pub fn annihilator_exponent(&self, d: &Polynomial, floor: u32) -> Result<(u32, Vec<Ideal>)> {
        self.check(d)?;
        match &self.kind {
            BaseKind::Quotient { relations } if !relations.is_empty() => {
                let (e, chain) = annihilator_chain(&self.ideal(relations.clone()), d, 0, self.settings.budget.max_degree)?;
                Ok((e.max(floor), chain))
            }
            // domains: every annihilator is zero
            _ => Ok((floor, vec![])),
        }
    }
}

/// `multiplier * f = sum cofactors[i] * generators[i]` with `multiplier` a base unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCertificate {
    #[serde(with = "crate::serde_poly")]
    pub multiplier: Polynomial,
    #[serde(with = "crate::serde_poly::vec")]
    pub cofactors: Vec<Polynomial>,
}

impl LocalCertificate {
    pub fn verify(&self, f: &Polynomial, generators: &[Polynomial]) -> bool {
        if self.cofactors.len() != generators.len() || self.multiplier.is_zero() {
            return false;
        }
        let combo: Polynomial = self.cofactors.iter().zip(generators).map(|(c, g)| c * g).sum();
        combo == &self.multiplier * f
    }
}

/// `B = A[Y]/I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitePresentation {
    pub base: BaseRing,
    pub vars: Vec<String>,
    #[serde(with = "crate::serde_poly::vec")]
    pub relations: Vec<Polynomial>,
}

impl FinitePresentation {
    pub fn new(base: BaseRing, vars: Vec<String>, relations: Vec<Polynomial>) -> Result<Self> {
        let out = Self { base, vars, relations };
        let ctx = out.context();
        for r in &out.relations {
            ctx.check(r)?;
        }
        for v in &out.vars {
            if out.base.vars.contains(v) {
                return Err(Error::ContextMismatch(format!("`{v}` is both a base and a presentation variable")));
            }
        }
        Ok(out)
    }

    /// The base itself, with no variables and no relations.
    pub fn of_base(base: BaseRing) -> Self {
        Self { base, vars: vec![], relations: vec![] }
    }

    pub fn context(&self) -> VarContext {
        VarContext::new(self.vars.iter().chain(&self.base.vars).cloned())
    }

    /// Presentation relations followed by the base relations.
    pub fn all_relations(&self) -> Vec<Polynomial> {
        let mut out = self.relations.clone();
        out.extend(self.base.relations().iter().cloned());
        out
    }

    pub fn order(&self) -> MonomialOrder {
        MonomialOrder::new(self.base.settings.order, self.context().names().to_vec())
    }

    pub fn ideal(&self) -> Ideal {
        Ideal::new(self.all_relations(), self.order(), self.base.settings.budget)
    }

    pub fn ideal_of(&self, gens: Vec<Polynomial>) -> Ideal {
        Ideal::new(gens, self.order(), self.base.settings.budget)
    }

    /// Membership in the relation ideal of the (possibly localized) ring.
    ///
    /// Over a localized base `f` is a member iff `(I : f)` meets the base
    /// outside the prime; the first such base element becomes the multiplier.
    pub fn certify_member(&self, f: &Polynomial) -> Result<Option<LocalCertificate>> {
        self.context().check(f)?;
        let gens = self.all_relations();
        let ideal = self.ideal();
        let (rem, cert) = ideal.normal_form(f)?;
        if rem.is_zero() {
            return Ok(Some(LocalCertificate { multiplier: Polynomial::one(), cofactors: expand_cofactors(&gens, ideal.generators(), &cert.cofactors) }));
        }
        if !self.base.is_localized() {
            return Ok(None);
        }
        let colon = ideal.quotient_by(f)?;
        let contracted = if self.vars.is_empty() { colon } else { colon.eliminate(&self.vars)? };
        for u in contracted.reduced_basis()? {
            if u.variables().iter().all(|v| self.base.vars.contains(v)) && self.base.is_unit(&u)? {
                let (rem, cert) = ideal.normal_form(&(&u * f))?;
                if rem.is_zero() {
                    return Ok(Some(LocalCertificate {
                        multiplier: u,
                        cofactors: expand_cofactors(&gens, ideal.generators(), &cert.cofactors),
                    }));
                }
            }
        }
        Ok(None)
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.certify_member(f)?.is_some())
    }

    /// `B[S]/(I, s S - 1)`, clearing the tracked denominator of `s`.
    pub fn localize(&self, s: &Frac, name: &str) -> Result<FinitePresentation> {
        let ctx = self.context();
        ctx.check(s.num())?;
        if ctx.contains(name) {
            return Err(Error::ContextMismatch(format!("localization variable `{name}` already declared")));
        }
        let mut vars = self.vars.clone();
        vars.push(name.to_string());
        let mut relations = self.relations.clone();
        relations.push(&(s.num() * &Polynomial::var(name)) - s.den());
        FinitePresentation::new(self.base.clone(), vars, relations)
    }

    /// `B / d^k B`.
    pub fn reduce_mod_power(&self, d: &Polynomial, k: u32) -> Result<FinitePresentation> {
        self.context().check(d)?;
        let mut relations = self.relations.clone();
        relations.push(d.pow(k));
        FinitePresentation::new(self.base.clone(), self.vars.clone(), relations)
    }

    pub fn is_zero_ring(&self) -> Result<bool> {
        self.contains(&Polynomial::one())
    }

    /// Relations in reduced Groebner form, for canonical printing.
    pub fn canonical_relations(&self) -> Result<Vec<Polynomial>> {
        self.ideal().reduced_basis()
    }
}

/// Cofactors over `ideal_gens` (zero generators dropped) spread back over `gens`.
fn expand_cofactors(gens: &[Polynomial], ideal_gens: &[Polynomial], cof: &[Polynomial]) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::zero(); gens.len()];
    let mut k = 0;
    for (i, g) in gens.iter().enumerate() {
        if k < ideal_gens.len() && !g.is_zero() && &ideal_gens[k] == g {
            out[i] = cof[k].clone();
            k += 1;
        }
    }
    out
}

impl fmt::Display for FinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match &self.base.kind {
            BaseKind::Field => "Q".to_string(),
            BaseKind::Quotient { relations } if relations.is_empty() => format!("Q[{}]", self.base.vars.join(",")),
            BaseKind::Quotient { relations } => format!(
                "Q[{}]/({})",
                self.base.vars.join(","),
                relations.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
            ),
            BaseKind::Localized { prime } => format!(
                "Q[{}]_({})",
                self.base.vars.join(","),
                prime.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
            ),
        };
        let rels: Vec<String> = self.relations.iter().map(|r| r.to_string()).collect();
        write!(f, "{base}[{}]/({})", self.vars.join(","), rels.join(", "))
    }
}
