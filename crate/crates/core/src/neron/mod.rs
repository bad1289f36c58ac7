//! One desingularization step: from an approximate solution `y'` in a smooth
//! intermediate `D` to a smooth factor `B'` of `v`, with certificates.

pub mod instances;
pub mod taylor;
mod verify;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::arith::Polynomial;
use crate::error::{Error, Result};
use crate::ring::{substitute_frac, AlgebraMorphism, FinitePresentation, Frac, LocalCertificate, TargetRing};
use crate::smooth::{self, adjugate, determinant, elkik_ideal, FracMatrix, JacobianSystem, SystemSearch};
use taylor::{cleared_eval, difference_cofactors, split_by_degree};
pub use verify::verify_step;

/// Everything the step consumes. `d_system` describes `H_{D/A}`; when absent
/// `D` must have no relations and the empty system is used.
#[derive(Debug, Clone)]
pub struct StepInput {
    pub b: FinitePresentation,
    pub v: AlgebraMorphism,
    pub system: JacobianSystem,
    pub d_ring: FinitePresentation,
    pub d_system: Option<JacobianSystem>,
    pub omega: AlgebraMorphism,
    pub y_prime: Vec<Frac>,
    pub e_floor: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// `multiplier * claim = Σ cofactors[i] * generators[i]`, all with tracked
/// denominators. The multiplier is a unit of the ring the claim lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracCertificate {
    pub multiplier: Frac,
    pub cofactors: Vec<Frac>,
}

impl FracCertificate {
    pub fn verify(&self, claim: &Frac, generators: &[Frac]) -> bool {
        if self.cofactors.len() != generators.len() {
            return false;
        }
        let rhs = self.cofactors.iter().zip(generators).fold(Frac::zero(), |acc, (c, g)| acc.add(&c.mul(g)));
        self.multiplier.mul(claim) == rhs
    }
}

/// `s^p f_i = Σ_k h_cof[k] h_k + d^{e+1} g_i + Σ_l d_cof[l] (relations of D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorCertificate {
    pub h_cofactors: Vec<Frac>,
    pub d_cofactors: Vec<Frac>,
}

/// `u P - Σ c_k ℓ_k = 1` where `ℓ_k` are the localization relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCertificate {
    pub p: Frac,
    pub unit: Frac,
    pub exponents: Vec<u32>,
    pub loc_cofactors: Vec<Frac>,
}

/// The system of `B'` over A that witnesses `H_{B'/A}`: D's system followed
/// by `(h, g, localizations)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedSystem {
    #[serde(with = "crate::serde_poly::vec")]
    pub f: Vec<Polynomial>,
    pub vars: Vec<String>,
    pub unit_columns: Vec<Vec<usize>>,
    pub witnesses: Vec<Frac>,
    #[serde(with = "crate::serde_poly::vec")]
    pub minors: Vec<Polynomial>,
    pub p: Frac,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepOutput {
    pub e: u32,
    pub p_degree: u32,
    pub s: Frac,
    pub b: Vec<Frac>,
    #[serde(with = "crate::serde_poly::vec")]
    pub nu: Vec<Polynomial>,
    pub nu_precision: Option<u32>,
    pub adjoints: Vec<FracMatrix>,
    pub adjoints_at_y: Vec<FracMatrix>,
    pub t_vars: Vec<String>,
    #[serde(with = "crate::serde_poly::map")]
    pub t_images: BTreeMap<String, Polynomial>,
    pub h: Vec<Frac>,
    pub q: Vec<Frac>,
    pub g: Vec<Frac>,
    pub taylor: Vec<TaylorCertificate>,
    pub s_prime: Frac,
    pub s_double_prime: Frac,
    /// `d s'' = s^m P(Y0) - Σ η_l (relations of D)`.
    pub s_double_prime_reduction: Vec<Frac>,
    pub loc_vars: Vec<String>,
    pub e_ring: FinitePresentation,
    pub b_prime: FinitePresentation,
    pub psi: AlgebraMorphism,
    pub w: AlgebraMorphism,
    pub iota: AlgebraMorphism,
    pub d_to_b_prime: AlgebraMorphism,
    /// One per generator `q` of I: `s^p (d s'' q) ∈ (h, g) + (relations of D)`.
    pub kill: Vec<FracCertificate>,
    pub step_witness: Frac,
    pub smooth_over_d: Option<UnitCertificate>,
    pub combined: CombinedSystem,
    #[serde(with = "crate::serde_poly::vec")]
    pub h_d: Vec<Polynomial>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepReport {
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<StepOutput>,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

struct Ledger {
    checks: Vec<Check>,
}

impl Ledger {
    fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
        passed
    }
}

/// `e` with floor 1; see [`crate::ring::BaseRing::annihilator_exponent`].
pub fn compute_exponent(input: &StepInput) -> Result<u32> {
    Ok(input.b.base.annihilator_exponent(input.system.d.num(), input.e_floor.max(1))?.0)
}

/// Runs the whole step. Failed preconditions stop the pipeline and are
/// reported as failed checks; the report is returned either way.
pub fn run_step(input: &StepInput) -> StepReport {
    let mut ledger = Ledger { checks: Vec::new() };
    match build(input, &mut ledger) {
        Ok(out) => {
            ledger.checks.extend(verify_step(input, &out));
            StepReport { checks: ledger.checks, failure: None, output: Some(out) }
        }
        Err(e) => StepReport { checks: ledger.checks, failure: Some(e.to_string()), output: None },
    }
}

fn frac_vec_str(v: &[Frac]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Adjoints `G_j = N_j adj(H_j)` with the identities
/// `G_j H_j = H_j G_j = M_j N_j Id` and `(∂f/∂Y) G_j = (M_j N_j Id_r | 0)`.
pub fn build_adjoint_system(sys: &JacobianSystem) -> Result<Vec<FracMatrix>> {
    let n = sys.n();
    let r = sys.r();
    let mut out = Vec::new();
    for (j, h) in sys.completions.iter().enumerate() {
        let adj = adjugate(h);
        let g = smooth::matrix::scale(&adj, &sys.witnesses[j]);
        let mn = sys.witnesses[j].mul_poly(&sys.minors[j]);
        let hf = smooth::matrix::to_frac(h);
        let id = smooth::matrix::scaled_identity(n, n, &mn);
        if !smooth::matrix::frac_eq(&smooth::matrix::mul_frac(&g, &hf), &id)
            || !smooth::matrix::frac_eq(&smooth::matrix::mul_frac(&hf, &g), &id)
        {
            return Err(Error::IdentityFails(format!("adjoint identity for completion {}", j + 1)));
        }
        let jac = smooth::matrix::to_frac(&h[..r].to_vec());
        if !smooth::matrix::frac_eq(&smooth::matrix::mul_frac(&jac, &g), &smooth::matrix::scaled_identity(r, n, &mn)) {
            return Err(Error::IdentityFails(format!("Jacobian identity for completion {}", j + 1)));
        }
        out.push(g);
    }
    Ok(out)
}

/// Reduction modulo the relations of D, `f = nf + Σ c_l rel_l`.
struct DReducer {
    ring: FinitePresentation,
}

impl DReducer {
    fn gens(&self) -> Vec<Frac> {
        self.ring.all_relations().into_iter().map(Frac::from).collect()
    }

    fn reduce(&self, f: &Frac) -> Result<(Frac, Vec<Frac>)> {
        let rels = self.ring.all_relations();
        if rels.is_empty() {
            return Ok((f.clone(), vec![]));
        }
        let ideal = self.ring.ideal();
        let (nf, cert) = ideal.normal_form(f.num())?;
        let inv = Frac::new(Polynomial::one(), f.den().clone())?;
        let cof = spread(&rels, ideal.generators(), &cert.cofactors).into_iter().map(|c| inv.mul_poly(&c)).collect();
        Ok((Frac::new(nf, f.den().clone())?, cof))
    }

    /// Cofactors for an element that must lie in the relation ideal.
    fn member(&self, f: &Frac) -> Result<Option<Vec<Frac>>> {
        if f.is_zero() {
            return Ok(Some(vec![Frac::zero(); self.ring.all_relations().len()]));
        }
        if self.ring.all_relations().is_empty() {
            return Ok(None);
        }
        Ok(self.ring.certify_member(f.num())?.map(|c| local_to_frac(&c, f.den())))
    }
}

fn spread(gens: &[Polynomial], used: &[Polynomial], cof: &[Polynomial]) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::zero(); gens.len()];
    let mut k = 0;
    for (i, g) in gens.iter().enumerate() {
        if k < used.len() && !g.is_zero() && &used[k] == g {
            out[i] = cof[k].clone();
            k += 1;
        }
    }
    out
}

/// `(mult f_num = Σ c g)` turned into cofactors of `f_num / den`.
fn local_to_frac(c: &LocalCertificate, den: &Polynomial) -> Vec<Frac> {
    let inv = Frac::new(Polynomial::one(), &c.multiplier * den).expect("nonzero");
    c.cofactors.iter().map(|x| inv.mul_poly(x)).collect()
}

fn build(input: &StepInput, ledger: &mut Ledger) -> Result<StepOutput> {
    let b = &input.b;
    let base = &b.base;
    let sys = &input.system;
    let n = b.vars.len();
    let r = sys.r();
    if input.d_ring.base != *base {
        return Err(Error::ContextMismatch("D is not over the base of B".into()));
    }
    if input.y_prime.len() != n {
        return Err(Error::Invalid(format!("y' has {} entries, expected {n}", input.y_prime.len())));
    }
    let target: TargetRing = input.v.target().cloned().ok_or_else(|| Error::ContextMismatch("v must land in a target ring".into()))?;
    if input.omega.target() != Some(&target) {
        return Err(Error::ContextMismatch("ω and v have different targets".into()));
    }
    let n_target = target.precision();

    match input.v.validate() {
        Ok(_) => ledger.record("v well-defined", true, "every relation of B vanishes"),
        Err(e) => {
            ledger.record("v well-defined", false, e.to_string());
            return Err(e);
        }
    };
    match input.omega.validate() {
        Ok(_) => ledger.record("ω well-defined", true, "every relation of D vanishes"),
        Err(e) => {
            ledger.record("ω well-defined", false, e.to_string());
            return Err(e);
        }
    };

    // hypotheses on the system
    let in_ideal = sys.check_in_ideal(b);
    ledger.record("system in I", in_ideal.is_ok(), in_ideal.as_ref().err().map_or("f ⊆ I".into(), |e| e.to_string()));
    in_ideal?;
    let wit = sys.witness_certificates(b)?;
    let mut all_wit = true;
    for (j, row) in wit.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            let ok = c.is_some();
            all_wit &= ok;
            ledger.record(
                &format!("witness N_{} in ((f):I) on generator {}", j + 1, k + 1),
                ok,
                if ok { format!("N_{} * q_{} ∈ (f) certified", j + 1, k + 1) } else { format!("N_{} = {} fails", j + 1, sys.witnesses[j]) },
            );
        }
    }
    if !all_wit {
        return Err(Error::Invalid("((f):I) witness certificate fails".into()));
    }
    match sys.verify_d_congruence(b) {
        Ok(_) => ledger.record("d ≡ P mod I", true, format!("d = {}, P = {}", sys.d, sys.p)),
        Err(e) => {
            ledger.record("d ≡ P mod I", false, e.to_string());
            return Err(e);
        }
    };

    let e = compute_exponent(input)?;
    ledger.record("annihilator exponent", e >= 1, format!("e = {e}"));
    let d = sys.d.clone();
    let d_pow = |k: u32| d.pow(k);

    let z_vars = input.d_ring.vars.clone();
    let reducer_ctx: Vec<String> = z_vars.iter().chain(&b.vars).cloned().collect();
    let y_images: BTreeMap<String, Frac> = b.vars.iter().cloned().zip(input.y_prime.iter().cloned()).collect();
    for y in &input.y_prime {
        input.d_ring.context().check(y.num())?;
        base.certify_unit(y.den())?;
    }

    // T and localization variable names, fresh against everything in sight
    let mut ctx = input.d_ring.context().extend(b.vars.iter().cloned());
    let mut t_vars: Vec<String> = Vec::new();
    let mut t_of: Vec<Vec<String>> = Vec::new();
    for i in 0..r {
        let name = ctx.fresh(&format!("T{}", i + 1));
        ctx = ctx.extend([name.clone()]);
        t_vars.push(name);
    }
    for j in 0..sys.completions.len() {
        let mut row: Vec<String> = t_vars[..r].to_vec();
        for k in r..n {
            let name = ctx.fresh(&format!("T{}_{}", j + 1, k + 1));
            ctx = ctx.extend([name.clone()]);
            row.push(name.clone());
            t_vars.push(name);
        }
        t_of.push(row);
    }
    let loc_vars: Vec<String> = ["S", "Sp", "Spp"]
        .iter()
        .map(|stem| {
            let name = ctx.fresh(stem);
            ctx = ctx.extend([name.clone()]);
            name
        })
        .collect();
    let everything: Vec<String> = reducer_ctx.iter().chain(&t_vars).chain(&loc_vars).cloned().collect();
    let reducer = DReducer {
        ring: FinitePresentation::new(base.clone(), everything, input.d_ring.relations.clone())?,
    };
    let d_gens = reducer.gens();

    // I(y') ≡ 0 mod d^{2e+1} D
    let mut b_vec = Vec::new();
    for (k, q) in b.relations.iter().enumerate() {
        let (val, _) = reducer.reduce(&substitute_frac(q, &y_images))?;
        let ok = base.divide(&val, &d_pow(2 * e + 1)).is_ok();
        ledger.record(
            &format!("I(y') ≡ 0 mod d^(2e+1), generator {}", k + 1),
            ok,
            if ok { format!("q(y') = {val}") } else { format!("q(y') = {val} is not divisible by d^{}", 2 * e + 1) },
        );
        if !ok {
            return Err(Error::NotDivisible(format!("I(y') by d^{}", 2 * e + 1)));
        }
    }
    for fi in &sys.f {
        let (val, _) = reducer.reduce(&substitute_frac(fi, &y_images))?;
        let bi = base.divide(&val, &d_pow(e + 1))?;
        let ok = base.divide(&bi, &d_pow(e)).is_ok();
        ledger.record("b ∈ d^e D", ok, format!("b = {bi}"));
        if !ok {
            return Err(Error::NotDivisible("b by d^e".into()));
        }
        b_vec.push(bi);
    }

    // ν with y - ω(y') = d^{e+1} ν, ν ∈ d^e A'
    let d_img = input.omega.apply_frac(&d)?.num().clone();
    let d_e1 = target_pow(&target, &d_img, e + 1);
    let d_e = target_pow(&target, &d_img, e);
    let mut nu = Vec::new();
    for (k, yv) in b.vars.iter().enumerate() {
        let y = input.v.image(yv).cloned().unwrap_or_default();
        let ytilde = input.omega.apply_frac(&input.y_prime[k])?.num().clone();
        let diff = target.reduce(&(&y - &ytilde));
        let nk = match target.divide(&diff, &d_e1) {
            Ok(x) => x,
            Err(err) => {
                ledger.record("y ≡ ω(y') mod d^(2e+1)", false, format!("y - ω(y') = {diff}: {err}"));
                return Err(err);
            }
        };
        let ok = target.divide(&nk, &d_e).is_ok();
        ledger.record("ν ∈ d^e A'", ok, format!("ν_{} = {nk}", k + 1));
        if !ok {
            return Err(Error::NotDivisible("ν by d^e".into()));
        }
        nu.push(nk);
    }
    let nu_precision = n_target.map(|nn| nn - target.order_of(&d_e1).unwrap_or(0));

    // s with P(y') = d s
    let (p_at, _) = reducer.reduce(&substitute_frac_frac(&sys.p, &y_images))?;
    let s = base.divide(&p_at, &d)?;
    let s_minus_one = s.sub(&Frac::one());
    let congruent = base.divide(&s_minus_one, &d).is_ok() || s_minus_one.is_zero();
    ledger.record("s ≡ 1 mod d", congruent, format!("s = {s}"));
    let omega_s = input.omega.apply_frac(&s)?.num().clone();
    if !target.is_unit(&omega_s) {
        ledger.record("ω(s) unit", false, format!("ω(s) = {omega_s}"));
        return Err(Error::NotUnit(format!("ω(s) = {omega_s}")));
    }
    ledger.record("ω(s) unit", true, format!("ω(s) = {omega_s}"));

    // adjoint system
    let adjoints = build_adjoint_system(sys)?;
    ledger.record("adjoint identities", true, "G_j H_j = H_j G_j = M_j N_j Id and (∂f/∂Y) G_j = (M_j N_j Id_r | 0)");
    let mut adjoints_at_y = Vec::new();
    for g in &adjoints {
        let mut m = Vec::new();
        for row in g {
            let mut out_row = Vec::new();
            for x in row {
                out_row.push(reducer.reduce(&substitute_frac_frac(x, &y_images))?.0);
            }
            m.push(out_row);
        }
        adjoints_at_y.push(m);
    }

    // t_j = H_j(y') ν in A'
    let mut t_images = BTreeMap::new();
    for (j, h) in sys.completions.iter().enumerate() {
        for (row_idx, row) in h.iter().enumerate() {
            let mut acc = Polynomial::zero();
            for (col, entry) in row.iter().enumerate() {
                let at = input.omega.apply_frac(&substitute_frac(entry, &y_images))?.num().clone();
                acc = acc + target.mul(&at, &nu[col]);
            }
            t_images.insert(t_of[j][row_idx].clone(), target.reduce(&acc));
        }
    }

    // h = s (Y - y') - d^e Σ G_j(y') T_j, written as s Y - L
    let mut l_vec = Vec::new();
    for k in 0..n {
        let mut acc = s.mul(&input.y_prime[k]);
        for (j, g) in adjoints_at_y.iter().enumerate() {
            for (c, tv) in t_of[j].iter().enumerate() {
                acc = acc.add(&d_pow(e).mul(&g[k][c]).mul_poly(&Polynomial::var(tv)));
            }
        }
        l_vec.push(acc);
    }
    let h: Vec<Frac> = b.vars.iter().zip(&l_vec).map(|(y, l)| s.mul_poly(&Polynomial::var(y)).sub(l)).collect();

    // Taylor expansion, Q and g
    let p_deg = sys.f.iter().map(|f| f.degree_in(&b.vars.iter().cloned().collect())).max().unwrap_or(1).max(1);
    let t_set: BTreeSet<String> = t_vars.iter().cloned().collect();
    let mut q_vec = Vec::new();
    let mut g_vec = Vec::new();
    let mut taylor = Vec::new();
    let mut q_ok = true;
    for (i, fi) in sys.f.iter().enumerate() {
        let expanded = cleared_eval(fi, &b.vars, &l_vec, &s, p_deg);
        let parts = split_by_degree(&expanded, &t_set);
        let high = parts.iter().filter(|(k, _)| **k >= 2).fold(Frac::zero(), |acc, (_, x)| acc.add(x));
        let qi = base.divide(&high, &d_pow(2 * e))?;
        q_ok &= qi.num().terms().all(|(m, _)| m.degree_in(&t_set) >= 2);
        let gi = s.pow(p_deg).mul(&b_vec[i])
            .add(&s.pow(p_deg).mul_poly(&Polynomial::var(&t_vars[i])))
            .add(&d_pow(e - 1).mul(&qi));
        let eps = expanded.sub(&d_pow(e + 1).mul(&gi));
        let d_cof = reducer.member(&eps)?.ok_or_else(|| {
            Error::IdentityFails(format!("Taylor residual for f_{} is not in the relations of D: {eps}", i + 1))
        })?;
        let h_cof: Vec<Frac> = {
            let inv = Frac::one();
            difference_cofactors(fi, &b.vars, &l_vec, &s, p_deg).into_iter().map(|c| c.mul(&inv)).collect()
        };
        taylor.push(TaylorCertificate { h_cofactors: h_cof, d_cofactors: d_cof });
        q_vec.push(qi);
        g_vec.push(gi);
    }
    ledger.record("Q ∈ (T)^2", q_ok, format!("Q = [{}]", frac_vec_str(&q_vec)));

    // s' = det(∂g/∂T_1..T_r)
    let num_matrix: Vec<Vec<Polynomial>> =
        g_vec.iter().map(|g| t_vars[..r].iter().map(|t| g.num().derivative(t)).collect()).collect();
    let den_prod = g_vec.iter().fold(Polynomial::one(), |acc, g| &acc * g.den());
    let s_prime = Frac::new(determinant(&num_matrix), den_prod)?;

    // s'' from P(Y0): d s'' = s^m P(Y0) - (relations of D)
    let m_deg = sys.p.num().degree_in(&b.vars.iter().cloned().collect()).max(1);
    let p_y0 = cleared_eval(sys.p.num(), &b.vars, &l_vec, &s, m_deg).mul(&Frac::new(Polynomial::one(), sys.p.den().clone())?);
    let (p_y0_nf, eta) = reducer.reduce(&p_y0)?;
    let s_double_prime = base.divide(&p_y0_nf, &d).map_err(|err| Error::SDoublePrimeNotFound(err.to_string()))?;
    let eta = if eta.is_empty() { vec![Frac::zero(); d_gens.len()] } else { eta };

    // localizations
    let mut e_rels = input.d_ring.relations.clone();
    e_rels.extend(b.relations.iter().cloned());
    e_rels.extend(h.iter().map(|x| x.num().clone()));
    e_rels.extend(g_vec.iter().map(|x| x.num().clone()));
    let e_vars: Vec<String> = z_vars.iter().chain(&b.vars).chain(&t_vars).cloned().collect();
    let e_ring = FinitePresentation::new(base.clone(), e_vars, e_rels)?;
    let b1 = e_ring.localize(&s, &loc_vars[0])?;
    let b2 = b1.localize(&s_prime, &loc_vars[1])?;
    let b_prime = b2.localize(&s_double_prime, &loc_vars[2])?;

    // ψ : E -> A' and w : B' -> A'
    let mut psi_images: BTreeMap<String, Polynomial> = BTreeMap::new();
    for z in &z_vars {
        psi_images.insert(z.clone(), input.omega.image(z).cloned().unwrap_or_default());
    }
    for y in &b.vars {
        psi_images.insert(y.clone(), input.v.image(y).cloned().unwrap_or_default());
    }
    psi_images.extend(t_images.clone());
    let mut psi = AlgebraMorphism::to_target(e_ring.clone(), target.clone(), psi_images)?;
    if let Some(np) = nu_precision {
        psi = psi.with_precision(np);
    }
    let psi_sp = psi.apply_frac(&s_prime)?.num().clone();
    if !target.is_unit(&psi_sp) {
        ledger.record("ψ(s') unit", false, format!("ψ(s') = {psi_sp}"));
        return Err(Error::SPrimeNotUnit(format!("ψ(s') = {psi_sp}")));
    }
    ledger.record("ψ(s') unit", true, format!("ψ(s') = {psi_sp}"));
    let psi_spp = psi.apply_frac(&s_double_prime)?.num().clone();
    if !target.is_unit(&psi_spp) {
        ledger.record("ψ(s'') unit", false, format!("ψ(s'') = {psi_spp}"));
        return Err(Error::SDoublePrimeNotFound(format!("ψ(s'') = {psi_spp} is not a unit")));
    }
    ledger.record("ψ(s'') unit", true, format!("ψ(s'') = {psi_spp}"));
    let w = psi
        .extend_to_localization(&b1, &s, &loc_vars[0])?
        .extend_to_localization(&b2, &s_prime, &loc_vars[1])?
        .extend_to_localization(&b_prime, &s_double_prime, &loc_vars[2])?;

    let iota_images = b.vars.iter().map(|y| (y.clone(), Polynomial::var(y))).collect();
    let iota = AlgebraMorphism::to_presentation(b.clone(), b_prime.clone(), iota_images)?;
    let dz_images = z_vars.iter().map(|z| (z.clone(), Polynomial::var(z))).collect();
    let d_to_b_prime = AlgebraMorphism::to_presentation(input.d_ring.clone(), b_prime.clone(), dz_images)?;

    // d s'' q ∈ (h, g) after inverting s, for every generator q of I
    let p_cof: Vec<Frac> = difference_cofactors(sys.p.num(), &b.vars, &l_vec, &s, m_deg)
        .into_iter()
        .map(|c| c.mul(&Frac::new(Polynomial::one(), sys.p.den().clone()).unwrap()))
        .collect();
    let base_offset = input.d_ring.relations.len();
    let mut kill = Vec::new();
    for (k, q) in b.relations.iter().enumerate() {
        let qf = Frac::from(q.clone());
        let mut h_cof = vec![Frac::zero(); n];
        let mut g_cof = vec![Frac::zero(); r];
        let mut d_cof = vec![Frac::zero(); d_gens.len()];
        let sm = s.pow(m_deg);
        for (j, row) in wit.iter().enumerate() {
            let cert = row[k].as_ref().expect("checked above");
            let scale = Frac::new(Polynomial::one(), &cert.multiplier * sys.witnesses[j].den())?;
            let mj = Frac::from(sys.minors[j].clone());
            for i in 0..r {
                let c_ji = scale.mul_poly(&cert.cofactors[i]);
                let coef = sm.mul(&mj).mul(&c_ji);
                for kk in 0..n {
                    h_cof[kk] = h_cof[kk].add(&coef.mul(&taylor[i].h_cofactors[kk]));
                }
                g_cof[i] = g_cof[i].add(&coef.mul(&d_pow(e + 1)));
                for l in 0..d_gens.len() {
                    d_cof[l] = d_cof[l].add(&coef.mul(&taylor[i].d_cofactors[l]));
                }
            }
            // base relations of the system presentation follow f
            for (bi, c) in cert.cofactors[r..].iter().enumerate() {
                let coef = s.pow(m_deg + p_deg).mul(&mj).mul(&scale.mul_poly(c));
                d_cof[base_offset + bi] = d_cof[base_offset + bi].add(&coef);
            }
        }
        let sp = s.pow(p_deg);
        for kk in 0..n {
            h_cof[kk] = h_cof[kk].sub(&sp.mul(&qf).mul(&p_cof[kk]));
        }
        for l in 0..d_gens.len() {
            d_cof[l] = d_cof[l].sub(&sp.mul(&qf).mul(&eta[l]));
        }
        let mut cofactors = h_cof;
        cofactors.extend(g_cof);
        cofactors.extend(d_cof);
        kill.push(FracCertificate { multiplier: sp, cofactors });
    }

    // N_step: s^p when I is generated by the system, else s^p d s''
    let only_system = b.relations.iter().all(|q| sys.f.contains(q));
    let step_witness = if only_system { s.pow(p_deg) } else { s.pow(p_deg).mul(&d).mul(&s_double_prime) };

    // Jacobian of (h, g, localizations) in (Y, T, S), completed on the extra T
    let step_rels: Vec<Polynomial> = b_prime.relations[b_prime.relations.len() - (n + r + 3)..].to_vec();
    let step_vars: Vec<String> = b.vars.iter().chain(&t_vars).chain(&loc_vars).cloned().collect();
    let extra_cols: Vec<usize> = (n + r..n + t_vars.len()).collect();
    let step_jac = smooth::completion(&smooth::jacobian(&step_rels, &step_vars), step_vars.len(), &extra_cols);
    let m_step = determinant(&step_jac);
    let p_step = step_witness.mul_poly(&m_step);
    let loc_elems = [s.clone(), s_prime.clone(), s_double_prime.clone()];
    let smooth_over_d = unit_certificate(&p_step, &loc_elems, &loc_vars, base);

    // combined system over A
    let d_sys = match &input.d_system {
        Some(ds) => ds.clone(),
        None => {
            if !input.d_ring.relations.is_empty() {
                return Err(Error::Invalid("D has relations but no Jacobian system".into()));
            }
            let cols = (0..z_vars.len()).collect();
            JacobianSystem::new(&input.d_ring, vec![], vec![cols], vec![Frac::one()], Frac::one())?
        }
    };
    let combined = combine(&d_sys, &step_rels, &step_vars, &extra_cols, &step_witness, &z_vars)?;
    let h_d = elkik_ideal(&input.d_ring, &[d_sys.f.clone()], SystemSearch::default())?.ideal.generators().to_vec();

    Ok(StepOutput {
        e,
        p_degree: p_deg,
        s,
        b: b_vec,
        nu,
        nu_precision,
        adjoints,
        adjoints_at_y,
        t_vars,
        t_images,
        h,
        q: q_vec,
        g: g_vec,
        taylor,
        s_prime,
        s_double_prime,
        s_double_prime_reduction: eta,
        loc_vars,
        e_ring,
        b_prime,
        psi,
        w,
        iota,
        d_to_b_prime,
        kill,
        step_witness,
        smooth_over_d,
        combined,
        h_d,
    })
}

/// Substitution into an element that already carries a denominator.
fn substitute_frac_frac(f: &Frac, images: &BTreeMap<String, Frac>) -> Frac {
    substitute_frac(f.num(), images).mul(&Frac::new(Polynomial::one(), f.den().clone()).expect("nonzero"))
}

fn target_pow(t: &TargetRing, x: &Polynomial, k: u32) -> Polynomial {
    (0..k).fold(Polynomial::one(), |acc, _| t.mul(&acc, x))
}

/// Writes `p = κ Π x_k^{a_k}` by trial division (κ a base unit) and produces
/// `u p - Σ c_k ℓ_k = 1` with `ℓ_k = x_k S_k - δ_k`.
fn unit_certificate(p: &Frac, elems: &[Frac], vars: &[String], base: &crate::ring::BaseRing) -> Option<UnitCertificate> {
    // innermost first: s' and s'' usually carry factors of s
    let mut rest = p.num().clone();
    let mut exps = vec![0; elems.len()];
    for (k, x) in elems.iter().enumerate().rev() {
        if !x.num().is_constant() {
            while let Some(q) = rest.div_exact(x.num()) {
                rest = q;
                exps[k] += 1;
            }
        }
    }
    if !rest.variables().iter().all(|v| base.vars.contains(v)) || !base.is_unit(&rest).unwrap_or(false) {
        return None;
    }
    // X_k = x_k S_k / δ_k, so X_k - 1 = ℓ_k / δ_k
    let xs: Vec<Frac> = elems
        .iter()
        .zip(vars)
        .map(|(x, v)| Frac::new(x.num() * &Polynomial::var(v), x.den().clone()).unwrap())
        .collect();
    let kappa = Frac::new(rest, p.den().clone()).ok()?;
    let mut unit = Frac::new(Polynomial::one(), kappa.num().clone()).ok()?.mul_poly(kappa.den());
    for ((x, v), a) in elems.iter().zip(vars).zip(&exps) {
        unit = unit.mul(&Frac::new(Polynomial::var(v).pow(*a), x.den().pow(*a)).ok()?);
    }
    let mut cof = Vec::new();
    let mut prefix = Frac::one();
    for (k, a) in exps.iter().enumerate() {
        let mut geo = Frac::zero();
        let mut pow = Frac::one();
        for _ in 0..*a {
            geo = geo.add(&pow);
            pow = pow.mul(&xs[k]);
        }
        let inv_delta = Frac::new(Polynomial::one(), elems[k].den().clone()).ok()?;
        cof.push(geo.mul(&prefix).mul(&inv_delta));
        prefix = prefix.mul(&pow);
    }
    Some(UnitCertificate { p: p.clone(), unit, exponents: exps, loc_cofactors: cof })
}

fn combine(
    d_sys: &JacobianSystem,
    step_rels: &[Polynomial],
    step_vars: &[String],
    extra_cols: &[usize],
    step_witness: &Frac,
    z_vars: &[String],
) -> Result<CombinedSystem> {
    let mut f = d_sys.f.clone();
    f.extend(step_rels.iter().cloned());
    let vars: Vec<String> = z_vars.iter().chain(step_vars).cloned().collect();
    let nz = z_vars.len();
    let jac = smooth::jacobian(&f, &vars);
    let mut unit_columns = Vec::new();
    let mut witnesses = Vec::new();
    let mut minors = Vec::new();
    let mut p = Frac::zero();
    for (j, cols) in d_sys.unit_columns.iter().enumerate() {
        let mut all: Vec<usize> = cols.clone();
        all.extend(extra_cols.iter().map(|c| c + nz));
        let h = smooth::completion(&jac, vars.len(), &all);
        let m = determinant(&h);
        let w = d_sys.witnesses[j].mul(step_witness);
        p = p.add(&w.mul_poly(&m));
        unit_columns.push(all);
        witnesses.push(w);
        minors.push(m);
    }
    Ok(CombinedSystem { f, vars, unit_columns, witnesses, minors, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serde_poly::parse_free;

    fn p(s: &str) -> Polynomial {
        parse_free(s).unwrap()
    }

    fn failed(r: &StepReport) -> Vec<String> {
        r.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }

    #[test]
    fn node_step_passes_every_check() {
        let input = instances::node_step(12).unwrap();
        let r = run_step(&input);
        assert!(r.failure.is_none(), "{:?} {:?}", r.failure, failed(&r));
        assert!(r.passed(), "{:?}", failed(&r));
        let out = r.output.unwrap();
        assert_eq!(out.e, 1);
        assert_eq!(out.nu_precision, Some(8));
        assert_eq!(out.b_prime.vars.len(), 1 + 1 + 3);
        // s = q^2 / (1+t) with q = 1 + t/2 - t^2/8 + t^3/16 - 5t^4/128
        let q = instances::sqrt_series("t", 5);
        assert_eq!(out.s, Frac::new(q.pow(2), p("1+t")).unwrap());
        let b = Frac::new(q.pow(2) - p("1+t"), p("4*t^2")).unwrap();
        assert_eq!(out.b[0], b);
        let g = Frac::new(&p("t") * &q, p("1+t")).unwrap();
        assert_eq!(out.adjoints_at_y[0][0][0], g);
        assert_eq!(out.q[0], g.pow(2).mul_poly(&p("T1^2")));
    }

    #[test]
    fn perturbed_approximation_is_reported() {
        let mut input = instances::node_step(12).unwrap();
        input.y_prime[0] = input.y_prime[0].add(&Frac::from(p("1/7*t^4")));
        let r = run_step(&input);
        assert!(!r.passed());
        let c = r.checks.iter().find(|c| !c.passed).unwrap();
        assert!(c.name.starts_with("I(y')"), "{c:?}");
    }

    #[test]
    fn perturbed_witness_is_reported() {
        let mut input = instances::node_step(12).unwrap();
        let b = input.b.clone();
        input.system = JacobianSystem::new(&b, b.relations.clone(), vec![vec![]], vec![Frac::new(p("Y+t"), p("1+t")).unwrap()], Frac::from(p("2*t^2"))).unwrap();
        let r = run_step(&input);
        let c = r.checks.iter().find(|c| !c.passed).unwrap();
        // I = (f) makes every witness valid; the damage shows in d ≡ P
        assert_eq!(c.name, "d ≡ P mod I", "{c:?}");
    }

    #[test]
    fn exponent_is_floored() {
        let input = instances::node_step(12).unwrap();
        assert_eq!(compute_exponent(&input).unwrap(), 1);
    }

    #[test]
    fn product_step_through_a_double_cover() {
        let input = instances::product_step().unwrap();
        let r = run_step(&input);
        assert!(r.failure.is_none(), "{:?} {:?}", r.failure, failed(&r));
        let out = r.output.unwrap();
        assert_eq!(out.s, Frac::one());
        assert!(out.nu.iter().all(|x| x.is_zero()));
        assert!(out.t_images.values().all(|x| x.is_zero()));
        let fails = failed(&StepReport { checks: r.checks, failure: None, output: None });
        assert!(fails.is_empty(), "{fails:?}");
    }
}
