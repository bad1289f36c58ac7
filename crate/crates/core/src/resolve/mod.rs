//! Constructions around the step: homogenization, the annihilator extension,
//! lifting modulo a power of `d`, parameter adjunction and the chain driver.

mod chain;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::{Polynomial, VarContext};
use crate::error::{Error, Result};
use crate::neron::Check;
use crate::ring::{AlgebraMorphism, BaseRing, FinitePresentation, TargetKind, TargetRing};
use crate::smooth::{determinant, jacobian};
pub use chain::{resolve_chain, ChainIteration, ChainProblem, ChainReport, ChainStatus, PrimeData, StepData, StepProvider, UnitIdeal};

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// `lhs == Σ cof_i gens_i`, by multiplying back.
fn combination(lhs: &Polynomial, cof: &[Polynomial], gens: &[Polynomial]) -> bool {
    let rhs: Polynomial = cof.iter().zip(gens).map(|(c, g)| c * g).sum();
    &rhs == lhs
}

fn unit_vector(len: usize, i: usize, c: Polynomial) -> Vec<Polynomial> {
    let mut v = vec![Polynomial::zero(); len];
    v[i] = c;
    v
}

/// `Z_0^c g(Z / Z_0)` with `c = deg_Z g`.
pub fn homogenize(g: &Polynomial, z_vars: &[String], z0: &str) -> (Polynomial, u32) {
    let set: BTreeSet<String> = z_vars.iter().cloned().collect();
    let c = g.degree_in(&set);
    let mut out = Polynomial::zero();
    for (m, coef) in g.terms() {
        let k = m.degree_in(&set);
        let term = Polynomial::monomial(m.clone(), coef.clone()) * Polynomial::var(z0).pow(c - k);
        out = out + term;
    }
    (out, c)
}

/// `G(λZ, λZ_0) = λ^c G(Z, Z_0)` with a symbolic `λ`.
pub fn is_homogeneous(big_g: &Polynomial, vars: &[String], c: u32) -> bool {
    let ctx = VarContext::new(big_g.variables().into_iter().chain(vars.iter().cloned()));
    let lambda = ctx.fresh("lambda");
    let scaled: BTreeMap<String, Polynomial> =
        vars.iter().map(|v| (v.clone(), Polynomial::var(&lambda) * Polynomial::var(v))).collect();
    big_g.substitute(&scaled) == Polynomial::var(&lambda).pow(c) * big_g.clone()
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogenizationData {
    #[serde(with = "crate::serde_poly::vec")]
    pub g: Vec<Polynomial>,
    pub degrees: Vec<u32>,
    #[serde(with = "crate::serde_poly::vec")]
    pub homogenized: Vec<Polynomial>,
    pub z0_var: String,
    #[serde(with = "crate::serde_poly")]
    pub scaling: Polynomial,
    #[serde(with = "crate::serde_poly::vec")]
    pub z: Vec<Polynomial>,
    #[serde(with = "crate::serde_poly")]
    pub z0: Polynomial,
    pub c: FinitePresentation,
    pub beta: AlgebraMorphism,
    pub checks: Vec<Check>,
}

/// Builds `C = B[Z, Z_0]/(G)` and `β : C -> A'` sending `(Z, Z_0)` to
/// `(az, az_0)`. Without a supplied `a`, powers of the first series variable
/// are tried; a scaling that also kills `(a z_0)^c` is degenerate and refused.
pub fn homogenize_and_clear(
    b: &FinitePresentation,
    v: &AlgebraMorphism,
    z_vars: &[String],
    g: &[Polynomial],
    z: &[Polynomial],
    z0: &Polynomial,
    a: Option<&Polynomial>,
) -> Result<HomogenizationData> {
    let target = v.target().ok_or_else(|| Error::ContextMismatch("v must land in a target ring".into()))?.clone();
    if z.len() != z_vars.len() {
        return Err(Error::Invalid(format!("{} images for {} variables", z.len(), z_vars.len())));
    }
    if target.reduce(z0).is_zero() {
        return Err(Error::Invalid("z0 maps to zero".into()));
    }
    let ctx = b.context().extend(z_vars.iter().cloned());
    for gi in g {
        ctx.check(gi)?;
    }
    let z0_var = ctx.fresh("Z0");
    let mut homogenized = Vec::new();
    let mut degrees = Vec::new();
    let mut checks = Vec::new();
    let hom_vars: Vec<String> = z_vars.iter().cloned().chain([z0_var.clone()]).collect();
    for gi in g {
        let (big, c) = homogenize(gi, z_vars, &z0_var);
        let ok = is_homogeneous(&big, &hom_vars, c);
        checks.push(check(format!("G = Z0^{c} g(Z/Z0) is homogeneous"), ok, big.to_string()));
        homogenized.push(big);
        degrees.push(c);
    }
    let mut assignment: BTreeMap<String, Polynomial> = b.vars.iter().map(|y| (y.clone(), v.image(y).cloned().unwrap_or_default())).collect();
    for (var, img) in z_vars.iter().zip(z) {
        assignment.insert(var.clone(), target.reduce(img));
    }
    assignment.insert(z0_var.clone(), target.reduce(z0));
    let residuals: Vec<Polynomial> = homogenized.iter().map(|big| target.evaluate(big, &assignment)).collect();
    let c_max = degrees.iter().copied().max().unwrap_or(0);
    let clears = |a: &Polynomial| {
        let scaled_z0 = target.mul(a, &target.reduce(z0));
        residuals.iter().zip(&degrees).all(|(r, c)| target.mul(&power(&target, a, *c), r).is_zero())
            && !power(&target, &scaled_z0, c_max).is_zero()
    };
    let scaling = match a {
        Some(a) => {
            if !clears(a) {
                return Err(Error::CannotClear(format!("a = {a} does not clear the residuals")));
            }
            a.clone()
        }
        None => candidates(&target)
            .into_iter()
            .find(|a| clears(a))
            .ok_or_else(|| Error::CannotClear(format!("residuals [{}]", join(&residuals))))?,
    };
    let z_scaled: Vec<Polynomial> = z.iter().map(|x| target.mul(&scaling, x)).collect();
    let z0_scaled = target.mul(&scaling, z0);
    let mut vars = b.vars.clone();
    vars.extend(hom_vars.iter().cloned());
    let mut relations = b.relations.clone();
    relations.extend(homogenized.iter().cloned());
    let c = FinitePresentation::new(b.base.clone(), vars, relations)?;
    let mut images: BTreeMap<String, Polynomial> = b.vars.iter().map(|y| (y.clone(), v.image(y).cloned().unwrap_or_default())).collect();
    for (var, img) in z_vars.iter().zip(&z_scaled) {
        images.insert(var.clone(), img.clone());
    }
    images.insert(z0_var.clone(), z0_scaled.clone());
    let mut beta = AlgebraMorphism::to_target(c.clone(), target, images)?;
    if let Some(p) = v.effective_precision() {
        beta = beta.with_precision(p);
    }
    beta.validate()?;
    checks.push(check("G(az, az0) = 0 in A'", true, format!("a = {scaling}")));
    Ok(HomogenizationData {
        g: g.to_vec(),
        degrees,
        homogenized,
        z0_var,
        scaling,
        z: z_scaled,
        z0: z0_scaled,
        c,
        beta,
        checks,
    })
}

fn join(v: &[Polynomial]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn power(t: &TargetRing, x: &Polynomial, k: u32) -> Polynomial {
    (0..k).fold(Polynomial::one(), |acc, _| t.mul(&acc, x))
}

fn candidates(t: &TargetRing) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one()];
    if let TargetKind::Truncated { series, order } = &t.kind {
        if let Some(x) = series.first() {
            out.extend((1..*order).map(|k| Polynomial::var(x).pow(k)));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilatorExtension {
    #[serde(with = "crate::serde_poly::vec")]
    pub h_b: Vec<Polynomial>,
    pub k: u32,
    /// The degree-k products of the generators, the images of `U`.
    #[serde(with = "crate::serde_poly::vec")]
    pub products: Vec<Polynomial>,
    #[serde(with = "crate::serde_poly")]
    pub w: Polynomial,
    pub u_vars: Vec<String>,
    pub v_vars: Vec<Vec<String>>,
    pub w_var: String,
    pub e: FinitePresentation,
    pub delta: AlgebraMorphism,
    pub checks: Vec<Check>,
}

/// `E = B[Z, U, V, W]/(g_j - Σ U_i V_ij, W U_i)` with `δ` sending `U` to the
/// `k`-fold products of `h_B`, `V` to 0 and `W` to `w`.
#[allow(clippy::too_many_arguments)]
pub fn annihilator_extension(
    b: &FinitePresentation,
    v: &AlgebraMorphism,
    z_vars: &[String],
    g: &[Polynomial],
    z: &[Polynomial],
    h_b: &[Polynomial],
    k: u32,
    w: &Polynomial,
) -> Result<AnnihilatorExtension> {
    let target = v.target().ok_or_else(|| Error::ContextMismatch("v must land in a target ring".into()))?.clone();
    if k == 0 {
        return Err(Error::NilpotencyUncertified("k = 0".into()));
    }
    let images: Vec<Polynomial> = h_b.iter().map(|x| v.apply(x)).collect();
    if let Some(u) = images.iter().find(|x| target.is_unit(x)) {
        return Err(Error::NilpotencyUncertified(format!("h_B is the unit ideal (contains the unit {u})")));
    }
    let products: Vec<Polynomial> = multisets(h_b.len(), k as usize)
        .into_iter()
        .map(|idx| idx.iter().fold(Polynomial::one(), |acc, &i| &acc * &h_b[i]))
        .collect();
    for p in &products {
        let img = target.mul(w, &v.apply(p));
        if !target.reduce(&img).is_zero() {
            return Err(Error::NilpotencyUncertified(format!("w * ({p}) = {img} in A'")));
        }
    }
    let mut ctx = b.context().extend(z_vars.iter().cloned());
    let mut fresh = |stem: String| {
        let n = ctx.fresh(&stem);
        ctx = ctx.extend([n.clone()]);
        n
    };
    let u_vars: Vec<String> = (1..=products.len()).map(|i| fresh(format!("U{i}"))).collect();
    let v_vars: Vec<Vec<String>> =
        (1..=products.len()).map(|i| (1..=g.len()).map(|j| fresh(format!("V{i}_{j}"))).collect()).collect();
    let w_var = fresh("W".into());
    let f: Vec<Polynomial> = g
        .iter()
        .enumerate()
        .map(|(j, gj)| {
            let sum: Polynomial = u_vars.iter().zip(&v_vars).map(|(u, vs)| Polynomial::var(u) * Polynomial::var(&vs[j])).sum();
            gj - &sum
        })
        .collect();
    let wu: Vec<Polynomial> = u_vars.iter().map(|u| Polynomial::var(&w_var) * Polynomial::var(u)).collect();
    let mut vars: Vec<String> = b.vars.iter().chain(z_vars).chain(&u_vars).cloned().collect();
    vars.extend(v_vars.iter().flatten().cloned());
    vars.push(w_var.clone());
    let mut relations = b.relations.clone();
    relations.extend(f.iter().cloned());
    relations.extend(wu.iter().cloned());
    let e = FinitePresentation::new(b.base.clone(), vars, relations)?;
    let mut imgs: BTreeMap<String, Polynomial> = b.vars.iter().map(|y| (y.clone(), v.image(y).cloned().unwrap_or_default())).collect();
    for (var, x) in z_vars.iter().zip(z) {
        imgs.insert(var.clone(), x.clone());
    }
    for (u, p) in u_vars.iter().zip(&products) {
        imgs.insert(u.clone(), target.reduce(&v.apply(p)));
    }
    for var in v_vars.iter().flatten() {
        imgs.insert(var.clone(), Polynomial::zero());
    }
    imgs.insert(w_var.clone(), w.clone());
    let delta = AlgebraMorphism::to_target(e.clone(), target, imgs)?;
    delta.validate()?;
    let mut checks = vec![check("δ : E → A' well-defined", true, format!("{} relations vanish", e.all_relations().len()))];
    for i in 0..u_vars.len() {
        checks.push(localized_at_u(b, g, &f, &u_vars, &v_vars, &w_var, i));
    }
    checks.push(localized_at_w(b, g, &f, &u_vars, &v_vars, &w_var));
    Ok(AnnihilatorExtension { h_b: h_b.to_vec(), k, products, w: w.clone(), u_vars, v_vars, w_var, e, delta, checks })
}

/// Index multisets of size `k` from `0..n`, nondecreasing.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `E_{U_i}` against `B[Z, U, V_l (l != i), U_i^{-1}]`: `V_ij` is solved from
/// `f_j` and `W` dies. Both directions are checked relation by relation.
fn localized_at_u(
    b: &FinitePresentation,
    g: &[Polynomial],
    f: &[Polynomial],
    u_vars: &[String],
    v_vars: &[Vec<String>],
    w_var: &str,
    i: usize,
) -> Check {
    let ctx = VarContext::new(b.context().names().iter().cloned().chain(u_vars.iter().cloned()).chain(v_vars.iter().flatten().cloned()).chain([w_var.to_string()]));
    let s = ctx.fresh("Sinv");
    let sv = Polynomial::var(&s);
    let ui = Polynomial::var(&u_vars[i]);
    let inv_rel = &(&ui * &sv) - &Polynomial::one();
    // φ : E_{U_i} -> P
    let mut phi: BTreeMap<String, Polynomial> = BTreeMap::new();
    for (j, gj) in g.iter().enumerate() {
        let rest: Polynomial = (0..u_vars.len())
            .filter(|&l| l != i)
            .map(|l| Polynomial::var(&u_vars[l]) * Polynomial::var(&v_vars[l][j]))
            .sum();
        phi.insert(v_vars[i][j].clone(), &sv * &(gj - &rest));
    }
    phi.insert(w_var.to_string(), Polynomial::zero());
    let p_gens: Vec<Polynomial> = b.relations.iter().cloned().chain([inv_rel.clone()]).collect();
    let mut ok = true;
    for (j, fj) in f.iter().enumerate() {
        let img = fj.substitute(&phi);
        let rest: Polynomial = (0..u_vars.len())
            .filter(|&l| l != i)
            .map(|l| Polynomial::var(&u_vars[l]) * Polynomial::var(&v_vars[l][j]))
            .sum();
        let cof = unit_vector(p_gens.len(), p_gens.len() - 1, -(&g[j] - &rest));
        ok &= combination(&img, &cof, &p_gens);
    }
    for q in &b.relations {
        ok &= q.substitute(&phi) == *q;
    }
    // ψ ∘ φ on the solved generators, inside E_{U_i}
    let e_gens: Vec<Polynomial> = f
        .iter()
        .cloned()
        .chain(u_vars.iter().map(|u| Polynomial::var(w_var) * Polynomial::var(u)))
        .chain([inv_rel.clone()])
        .collect();
    let n = e_gens.len();
    for j in 0..g.len() {
        let vij = Polynomial::var(&v_vars[i][j]);
        let diff = &vij - &phi[&v_vars[i][j]];
        let mut cof = unit_vector(n, j, -sv.clone());
        cof[n - 1] = -vij;
        ok &= combination(&diff, &cof, &e_gens);
    }
    let wv = Polynomial::var(w_var);
    let mut cof = unit_vector(n, f.len() + i, sv.clone());
    cof[n - 1] = -wv.clone();
    ok &= combination(&wv, &cof, &e_gens);
    check(format!("E_{} polynomial over B[{}, {}^-1]", u_vars[i], u_vars[i], u_vars[i]), ok, "substitution round-trip with explicit cofactors")
}

/// `E_W` against `C[V, W, W^{-1}]`: `U` dies and `f` becomes `g`.
fn localized_at_w(b: &FinitePresentation, g: &[Polynomial], f: &[Polynomial], u_vars: &[String], v_vars: &[Vec<String>], w_var: &str) -> Check {
    let ctx = VarContext::new(b.context().names().iter().cloned().chain(u_vars.iter().cloned()).chain(v_vars.iter().flatten().cloned()).chain([w_var.to_string()]));
    let s = ctx.fresh("Winv");
    let sv = Polynomial::var(&s);
    let wv = Polynomial::var(w_var);
    let inv_rel = &(&wv * &sv) - &Polynomial::one();
    let alpha: BTreeMap<String, Polynomial> = u_vars.iter().map(|u| (u.clone(), Polynomial::zero())).collect();
    // α : E_W -> C[V, W, W^-1]
    let c_gens: Vec<Polynomial> = b.relations.iter().chain(g).cloned().chain([inv_rel.clone()]).collect();
    let mut ok = true;
    for (j, fj) in f.iter().enumerate() {
        let cof = unit_vector(c_gens.len(), b.relations.len() + j, Polynomial::one());
        ok &= combination(&fj.substitute(&alpha), &cof, &c_gens);
    }
    for u in u_vars {
        ok &= (&wv * &Polynomial::var(u)).substitute(&alpha).is_zero();
    }
    // β : C[V, W, W^-1] -> E_W, and β ∘ α on U
    let e_gens: Vec<Polynomial> = f
        .iter()
        .cloned()
        .chain(u_vars.iter().map(|u| &wv * &Polynomial::var(u)))
        .chain([inv_rel])
        .collect();
    let n = e_gens.len();
    for (j, gj) in g.iter().enumerate() {
        let mut cof = unit_vector(n, j, Polynomial::one());
        for (i, u) in u_vars.iter().enumerate() {
            let vij = Polynomial::var(&v_vars[i][j]);
            cof[f.len() + i] = &vij * &sv;
            cof[n - 1] = &cof[n - 1] - &(&vij * &Polynomial::var(u));
        }
        ok &= combination(gj, &cof, &e_gens);
    }
    for (i, u) in u_vars.iter().enumerate() {
        let uv = Polynomial::var(u);
        let mut cof = unit_vector(n, f.len() + i, sv.clone());
        cof[n - 1] = -uv.clone();
        ok &= combination(&uv, &cof, &e_gens);
    }
    check("E_W ≅ C[V, W, W^-1]", ok, "substitution round-trip with explicit cofactors")
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftedAlgebra {
    pub d_ring: FinitePresentation,
    pub omega: AlgebraMorphism,
    pub t_vars: Vec<String>,
    #[serde(with = "crate::serde_poly::vec")]
    pub t: Vec<Polynomial>,
    /// The minor of the Jacobian on the T columns, `(-d^{2e+1})^s`.
    #[serde(with = "crate::serde_poly")]
    pub minor: Polynomial,
    /// `d^exponent ∈ H_{D/A}` up to sign.
    pub exponent: u32,
    pub checks: Vec<Check>,
}

/// `D = A[Z, T]/(g_i - d^{2e+1} T_i)` with `ω(Z, T) = (z, g(z)/d^{2e+1})`.
pub fn lift_mod_power(
    base: &BaseRing,
    target: &TargetRing,
    z_vars: &[String],
    g: &[Polynomial],
    z: &[Polynomial],
    d: &Polynomial,
    e: u32,
) -> Result<LiftedAlgebra> {
    let mut ctx = base.context().extend(z_vars.iter().cloned());
    for gi in g {
        ctx.check(gi)?;
    }
    base.check(d)?;
    let dk = d.pow(2 * e + 1);
    let mut t_vars = Vec::new();
    for i in 1..=g.len() {
        let name = ctx.fresh(&format!("T{i}"));
        ctx = ctx.extend([name.clone()]);
        t_vars.push(name);
    }
    let f: Vec<Polynomial> = g.iter().zip(&t_vars).map(|(gi, t)| gi - &(&dk * &Polynomial::var(t))).collect();
    let vars: Vec<String> = z_vars.iter().chain(&t_vars).cloned().collect();
    let d_ring = FinitePresentation::new(base.clone(), vars.clone(), f.clone())?;
    let assignment: BTreeMap<String, Polynomial> = z_vars.iter().cloned().zip(z.iter().map(|x| target.reduce(x))).collect();
    let d_img = target.evaluate(&dk, &BTreeMap::new());
    let mut t = Vec::new();
    for (i, gi) in g.iter().enumerate() {
        let residual = target.evaluate(gi, &assignment);
        let ti = target
            .divide(&residual, &d_img)
            .map_err(|_| Error::NotDivisible(format!("g_{}(z) = {residual} by d^{}", i + 1, 2 * e + 1)))?;
        t.push(ti);
    }
    let mut images = assignment;
    images.extend(t_vars.iter().cloned().zip(t.iter().cloned()));
    let mut omega = AlgebraMorphism::to_target(d_ring.clone(), target.clone(), images)?;
    if let Some(n) = target.precision() {
        omega = omega.with_precision(n - target.order_of(&d_img).unwrap_or(0));
    }
    omega.validate()?;
    let mut checks = vec![check("ω : D → A' well-defined", true, format!("precision {:?}", omega.effective_precision()))];
    let jac = jacobian(&f, &vars);
    let t_block: Vec<Vec<Polynomial>> = jac.iter().map(|row| row[z_vars.len()..].to_vec()).collect();
    let minor = determinant(&t_block);
    let s = g.len() as u32;
    let expected = (-dk.clone()).pow(s);
    checks.push(check("T-minor is (-d^(2e+1))^s", minor == expected, minor.to_string()));
    let reduces = f.iter().zip(g).zip(&t_vars).all(|((fi, gi), tv)| (fi - gi) + &dk * &Polynomial::var(tv) == Polynomial::zero());
    checks.push(check("D / d^(2e+1) D ≅ D̄[T]", reduces, "f ≡ g modulo d^(2e+1)"));
    Ok(LiftedAlgebra { d_ring, omega, t_vars, t, minor, exponent: (2 * e + 1) * s, checks })
}

/// `B[Z]` with `v` extended by `Z ↦ z`, and the inclusion `B -> B[Z]`.
pub fn adjoin_parameters(
    b: &FinitePresentation,
    v: &AlgebraMorphism,
    params: &[(String, Polynomial)],
) -> Result<(FinitePresentation, AlgebraMorphism, AlgebraMorphism)> {
    let target = v.target().ok_or_else(|| Error::ContextMismatch("v must land in a target ring".into()))?.clone();
    let ctx = b.context();
    let mut vars = b.vars.clone();
    for (name, img) in params {
        if ctx.contains(name) || vars.contains(name) {
            return Err(Error::ContextMismatch(format!("parameter `{name}` already declared")));
        }
        target.check(img)?;
        vars.push(name.clone());
    }
    let extended = FinitePresentation::new(b.base.clone(), vars, b.relations.clone())?;
    let mut images: BTreeMap<String, Polynomial> = b.vars.iter().map(|y| (y.clone(), v.image(y).cloned().unwrap_or_default())).collect();
    images.extend(params.iter().map(|(n, x)| (n.clone(), target.reduce(x))));
    let mut ext_v = AlgebraMorphism::to_target(extended.clone(), target, images)?;
    if let Some(p) = v.effective_precision() {
        ext_v = ext_v.with_precision(p);
    }
    ext_v.validate()?;
    let incl = AlgebraMorphism::to_presentation(b.clone(), extended.clone(), b.vars.iter().map(|y| (y.clone(), Polynomial::var(y))).collect())?;
    Ok((extended, ext_v, incl))
}
