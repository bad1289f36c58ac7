//! Jacobians, minor ideals, the Elkik ideal in pre-radical form and
//! standard-smoothness certificates.

pub mod matrix;

use serde::{Deserialize, Serialize};

use crate::arith::Polynomial;
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ring::{FinitePresentation, Frac, LocalCertificate};
pub use matrix::{adjugate, determinant, FracMatrix, Matrix};

pub fn jacobian(f: &[Polynomial], vars: &[String]) -> Matrix {
    f.iter().map(|fi| vars.iter().map(|v| fi.derivative(v)).collect()).collect()
}

/// Column subsets of size `k` of `0..n`, lexicographically.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The Jacobian of `f` completed by the unit rows `e_c` for `c` in `unit_columns`.
pub fn completion(jac: &Matrix, n: usize, unit_columns: &[usize]) -> Matrix {
    let mut h = jac.clone();
    for &c in unit_columns {
        h.push((0..n).map(|j| if j == c { Polynomial::one() } else { Polynomial::zero() }).collect());
    }
    h
}

/// All `r x r` minors of the Jacobian, each realized as the determinant of a
/// completion. Returned with the unit columns used.
pub fn completed_minors(f: &[Polynomial], vars: &[String]) -> Vec<(Vec<usize>, Polynomial)> {
    let n = vars.len();
    let r = f.len();
    let jac = jacobian(f, vars);
    subsets(n, n - r)
        .into_iter()
        .map(|cols| {
            let h = completion(&jac, n, &cols);
            let m = determinant(&h);
            (cols, m)
        })
        .collect()
}

/// `Δ_f`, the ideal of maximal minors. The empty system gives `(1)`.
pub fn delta_ideal(b: &FinitePresentation, f: &[Polynomial]) -> Result<Ideal> {
    if f.len() > b.vars.len() {
        return Err(Error::Invalid(format!("{} relations in {} variables", f.len(), b.vars.len())));
    }
    let gens: Vec<Polynomial> = completed_minors(f, &b.vars).into_iter().map(|(_, m)| m).filter(|m| !m.is_zero()).collect();
    Ok(b.ideal_of(gens))
}

/// `((f) : I)` computed in the polynomial ring (base relations included).
pub fn system_colon(b: &FinitePresentation, f: &[Polynomial]) -> Result<Ideal> {
    let mut fgens = f.to_vec();
    fgens.extend(b.base.relations().iter().cloned());
    b.ideal_of(fgens).quotient(&b.ideal())
}

/// A system `f` with completions `H_j`, witnesses `N_j` and the element `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianSystem {
    #[serde(with = "crate::serde_poly::vec")]
    pub f: Vec<Polynomial>,
    pub vars: Vec<String>,
    /// Per completion, the columns of the appended unit rows.
    pub unit_columns: Vec<Vec<usize>>,
    pub witnesses: Vec<Frac>,
    pub d: Frac,
    #[serde(skip)]
    pub completions: Vec<Matrix>,
    #[serde(skip)]
    pub minors: Vec<Polynomial>,
    #[serde(skip)]
    pub p: Frac,
}

impl Default for Frac {
    fn default() -> Self {
        Frac::zero()
    }
}

impl JacobianSystem {
    pub fn new(
        b: &FinitePresentation,
        f: Vec<Polynomial>,
        unit_columns: Vec<Vec<usize>>,
        witnesses: Vec<Frac>,
        d: Frac,
    ) -> Result<Self> {
        let n = b.vars.len();
        let r = f.len();
        if r > n {
            return Err(Error::Invalid(format!("system of {r} relations in {n} variables")));
        }
        if unit_columns.len() != witnesses.len() {
            return Err(Error::Invalid("one witness per completion is required".into()));
        }
        let ctx = b.context();
        for g in &f {
            ctx.check(g)?;
        }
        for w in &witnesses {
            ctx.check(w.num())?;
            b.base.certify_unit(w.den())?;
        }
        b.base.check(d.num())?;
        b.base.certify_unit(d.den())?;
        let jac = jacobian(&f, &b.vars);
        let mut completions = Vec::new();
        let mut minors = Vec::new();
        for cols in &unit_columns {
            let mut sorted = cols.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if cols.len() != n - r || sorted.len() != cols.len() || cols.iter().any(|&c| c >= n) {
                return Err(Error::Invalid(format!("completion rows {cols:?} do not complete a {r} x {n} Jacobian")));
            }
            let h = completion(&jac, n, cols);
            minors.push(determinant(&h));
            completions.push(h);
        }
        let p = witnesses.iter().zip(&minors).fold(Frac::zero(), |acc, (w, m)| acc.add(&w.mul_poly(m)));
        Ok(Self { f, vars: b.vars.clone(), unit_columns, witnesses, d, completions, minors, p })
    }

    /// Rebuilds the derived fields after deserialization.
    pub fn rebuild(&self, b: &FinitePresentation) -> Result<Self> {
        Self::new(b, self.f.clone(), self.unit_columns.clone(), self.witnesses.clone(), self.d.clone())
    }

    pub fn r(&self) -> usize {
        self.f.len()
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Every `f_i` must lie in `I`.
    pub fn check_in_ideal(&self, b: &FinitePresentation) -> Result<Vec<LocalCertificate>> {
        self.f
            .iter()
            .map(|g| {
                b.certify_member(g)?
                    .ok_or_else(|| Error::SystemNotInIdeal(format!("`{g}` is not in the relation ideal")))
            })
            .collect()
    }

    /// Certificates `N_j q ∈ (f)` for every generator `q` of `I`, in order
    /// `[j][q]`; `None` marks a failed witness.
    pub fn witness_certificates(&self, b: &FinitePresentation) -> Result<Vec<Vec<Option<LocalCertificate>>>> {
        let system = FinitePresentation::new(b.base.clone(), b.vars.clone(), self.f.clone())?;
        self.witnesses
            .iter()
            .map(|w| b.relations.iter().map(|q| system.certify_member(&(w.num() * q))).collect())
            .collect()
    }

    /// `d ≡ P` modulo `I`.
    pub fn verify_d_congruence(&self, b: &FinitePresentation) -> Result<LocalCertificate> {
        let diff = self.d.sub(&self.p);
        match b.certify_member(diff.num())? {
            Some(c) => Ok(c),
            None => Err(Error::CongruenceFails(b.ideal().normal_form(diff.num())?.0.to_string())),
        }
    }
}

/// `Σ_f ((f):I) Δ_f + I` over the listed systems, never radicalized.
#[derive(Debug, Clone)]
pub struct ElkikIdeal {
    pub ideal: Ideal,
    pub systems: Vec<Vec<Polynomial>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemSearch {
    /// Maximum number of generator subsets tried when no system is given.
    pub max_systems: usize,
}

impl Default for SystemSearch {
    fn default() -> Self {
        Self { max_systems: 32 }
    }
}

/// Candidate systems: the given ones, else generator subsets of size `r <= n`
/// (largest first, since those carry the fewest completions).
pub fn candidate_systems(b: &FinitePresentation, given: &[Vec<Polynomial>], search: SystemSearch) -> Vec<Vec<Polynomial>> {
    if !given.is_empty() {
        return given.to_vec();
    }
    let gens = &b.relations;
    let mut out = Vec::new();
    let max_r = gens.len().min(b.vars.len());
    for r in (0..=max_r).rev() {
        for idx in subsets(gens.len(), r) {
            if out.len() >= search.max_systems {
                return out;
            }
            out.push(idx.iter().map(|&i| gens[i].clone()).collect());
        }
    }
    out
}

fn colon_times_delta(b: &FinitePresentation, f: &[Polynomial]) -> Result<Vec<(Polynomial, Polynomial, Vec<usize>)>> {
    let colon = system_colon(b, f)?;
    let minors = completed_minors(f, &b.vars);
    let mut out = Vec::new();
    for c in colon.reduced_basis()? {
        for (cols, m) in &minors {
            if !m.is_zero() {
                out.push((c.clone(), m.clone(), cols.clone()));
            }
        }
    }
    Ok(out)
}

pub fn elkik_ideal(b: &FinitePresentation, systems: &[Vec<Polynomial>], search: SystemSearch) -> Result<ElkikIdeal> {
    let systems = candidate_systems(b, systems, search);
    let mut gens = Vec::new();
    for f in &systems {
        for g in f {
            if !b.contains(g)? {
                return Err(Error::SystemNotInIdeal(format!("`{g}` is not in the relation ideal")));
            }
        }
        gens.extend(colon_times_delta(b, f)?.into_iter().map(|(c, m, _)| &c * &m));
    }
    gens.extend(b.all_relations());
    Ok(ElkikIdeal { ideal: b.ideal_of(gens), systems })
}

/// `1 = P + Σ c_i I_i` with `P = Σ N_k M_k`, over the generators of `I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessCertificate {
    pub system: JacobianSystem,
    /// Cofactors of the relations (presentation relations, then base ones).
    pub relation_cofactors: Vec<Frac>,
}

impl SmoothnessCertificate {
    /// Multiply-back: `P + Σ c_i I_i = 1` exactly.
    pub fn verify(&self, b: &FinitePresentation) -> bool {
        let rels = b.all_relations();
        if rels.len() != self.relation_cofactors.len() {
            return false;
        }
        let total = rels
            .iter()
            .zip(&self.relation_cofactors)
            .fold(self.system.p.clone(), |acc, (g, c)| acc.add(&c.mul_poly(g)));
        total == Frac::one()
    }
}

/// Searches candidate systems for an explicit representation of 1 in
/// `((f):I) Δ_f + I`. `None` means the search was exhausted, which proves nothing.
pub fn certify_standard_smooth(
    b: &FinitePresentation,
    systems: &[Vec<Polynomial>],
    search: SystemSearch,
) -> Result<Option<SmoothnessCertificate>> {
    for f in candidate_systems(b, systems, search) {
        if f.iter().map(|g| b.contains(g)).collect::<Result<Vec<_>>>()?.contains(&false) {
            continue;
        }
        let products = colon_times_delta(b, &f)?;
        let rels = b.all_relations();
        let np = products.len();
        let mut gens: Vec<Polynomial> = products.iter().map(|(c, m, _)| c * m).collect();
        gens.extend(b.relations.iter().cloned());
        // all_relations of `k` is the products followed by `rels`
        let k = FinitePresentation::new(b.base.clone(), b.vars.clone(), gens)?;
        let Some(cert) = k.certify_member(&Polynomial::one())? else { continue };
        let inv = Frac::new(Polynomial::one(), cert.multiplier.clone())?;
        let mut unit_columns = Vec::new();
        let mut witnesses = Vec::new();
        for ((c, _, cols), a) in products.iter().zip(&cert.cofactors[..np]) {
            if a.is_zero() {
                continue;
            }
            unit_columns.push(cols.clone());
            witnesses.push(inv.mul_poly(&(a * c)));
        }
        let relation_cofactors: Vec<Frac> = cert.cofactors[np..np + rels.len()].iter().map(|c| inv.mul_poly(c)).collect();
        let system = JacobianSystem::new(b, f, unit_columns, witnesses, Frac::one())?;
        let out = SmoothnessCertificate { system, relation_cofactors };
        if !out.verify(b) {
            return Err(Error::IdentityFails("smoothness certificate does not multiply back".into()));
        }
        return Ok(Some(out));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::BaseRing;
    use crate::serde_poly::parse_free;

    fn p(s: &str) -> Polynomial {
        parse_free(s).unwrap()
    }

    fn pres(base: BaseRing, vars: &[&str], rels: &[&str]) -> FinitePresentation {
        FinitePresentation::new(base, vars.iter().map(|v| v.to_string()).collect(), rels.iter().map(|r| p(r)).collect()).unwrap()
    }

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian(&[p("Y^2 - u")], &vars(&["Y"])), vec![vec![p("2*Y")]]);
        assert_eq!(
            jacobian(&[p("Y1 + Y2"), p("Y1*Y2")], &vars(&["Y1", "Y2"])),
            vec![vec![p("1"), p("1")], vec![p("Y2"), p("Y1")]]
        );
        let lin = jacobian(&[p("3*Y1 - Y2 + t")], &vars(&["Y1", "Y2"]));
        assert!(lin[0].iter().all(Polynomial::is_constant));
    }

    #[test]
    fn delta_examples() {
        let base = BaseRing::polynomial(["u"]);
        let b = pres(base.clone(), &["Y"], &["Y^2 - u"]);
        assert_eq!(delta_ideal(&b, &b.relations).unwrap().reduced_basis().unwrap(), vec![p("Y")]);
        let b2 = pres(base.clone(), &["Y1", "Y2"], &["Y1 + Y2", "Y1*Y2"]);
        assert_eq!(delta_ideal(&b2, &b2.relations).unwrap().generators(), &[p("Y1 - Y2")]);
        let b3 = pres(base, &["Y1", "Y2"], &["Y1^2 + Y2^2"]);
        let minors: Vec<_> = completed_minors(&b3.relations, &b3.vars).into_iter().map(|(_, m)| m).collect();
        // completing with e_1 leaves the Y2 column and vice versa, with signs
        assert_eq!(minors, vec![p("-2*Y2"), p("2*Y1")]);
    }

    #[test]
    fn elkik_examples() {
        let base = BaseRing::localized(["t"], vec![p("t")]);
        let b = pres(base.clone(), &["Y"], &["Y^2 - (1+t)"]);
        let h = elkik_ideal(&b, &[], SystemSearch::default()).unwrap();
        assert!(h.ideal.radical_membership(&p("1 + t"), 8).unwrap().member);
        let b = pres(base.clone(), &["Y"], &["Y^2 - t^2*(1+t)"]);
        let h = elkik_ideal(&b, &[], SystemSearch::default()).unwrap();
        assert!(h.ideal.radical_membership(&p("2*t^2*(1+t)"), 8).unwrap().member);
        let free = pres(base, &["Y"], &[]);
        assert!(elkik_ideal(&free, &[], SystemSearch::default()).unwrap().ideal.is_unit().unwrap());
    }

    #[test]
    fn smoothness_certificates() {
        let base = BaseRing::localized(["t"], vec![p("t")]);
        let b = pres(base.clone(), &["Y"], &["Y^2 - (1+t)"]);
        let cert = certify_standard_smooth(&b, &[], SystemSearch::default()).unwrap().unwrap();
        assert!(cert.verify(&b));
        assert_eq!(cert.system.minors, vec![p("2*Y")]);
        assert_eq!(cert.system.witnesses, vec![Frac::new(p("Y"), p("2 + 2*t")).unwrap()]);

        let free = pres(base.clone(), &["Y"], &[]);
        let cert = certify_standard_smooth(&free, &[], SystemSearch::default()).unwrap().unwrap();
        assert!(cert.system.f.is_empty());
        assert_eq!(cert.system.p, Frac::one());

        let nil = pres(base, &["Y"], &["Y^2"]);
        assert!(certify_standard_smooth(&nil, &[], SystemSearch::default()).unwrap().is_none());
    }

    #[test]
    fn run1_system() {
        let base = BaseRing::localized(["t"], vec![p("t")]);
        let b = pres(base, &["Y"], &["Y^2 - t^2*(1+t)"]);
        let n1 = Frac::new(p("Y"), p("1 + t")).unwrap();
        let sys = JacobianSystem::new(&b, b.relations.clone(), vec![vec![]], vec![n1], Frac::from(p("2*t^2"))).unwrap();
        assert_eq!(sys.minors, vec![p("2*Y")]);
        assert_eq!(sys.p, Frac::new(p("2*Y^2"), p("1 + t")).unwrap());
        let cert = sys.verify_d_congruence(&b).unwrap();
        let diff = sys.d.sub(&sys.p);
        assert!(cert.verify(diff.num(), &b.all_relations()));
        assert!(sys.witness_certificates(&b).unwrap()[0][0].is_some());
        let wrong = JacobianSystem::new(&b, b.relations.clone(), vec![vec![]], vec![Frac::one()], Frac::from(p("2*t^2"))).unwrap();
        assert!(matches!(wrong.verify_d_congruence(&b), Err(Error::CongruenceFails(_))));
    }
}
