//! Independent re-check of a step: nothing here trusts the builder beyond the
//! objects it handed over.

use std::collections::{BTreeMap, BTreeSet};

use super::taylor::cleared_eval;
use super::{Check, StepInput, StepOutput, UnitCertificate};
use crate::arith::Polynomial;
use crate::ring::Frac;

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), passed, detail: detail.into() }
}

fn lin(cof: &[Frac], gens: &[Frac]) -> Frac {
    cof.iter().zip(gens).fold(Frac::zero(), |acc, (c, g)| acc.add(&c.mul(g)))
}

pub fn verify_step(input: &StepInput, out: &StepOutput) -> Vec<Check> {
    let mut checks = Vec::new();
    let b = &input.b;
    let sys = &input.system;
    let n = b.vars.len();
    let r = sys.r();
    let e = out.e;
    let d = &sys.d;
    let target = input.v.target().expect("checked by the builder").clone();
    let n_full = target.precision();
    let t_set: BTreeSet<String> = out.t_vars.iter().cloned().collect();
    let d_gens: Vec<Frac> = {
        let mut g: Vec<Frac> = input.d_ring.relations.iter().cloned().map(Frac::from).collect();
        g.extend(b.base.relations().iter().cloned().map(Frac::from));
        g
    };

    // (ii) Q has T-degree at least 2
    let bad: Vec<String> = out
        .q
        .iter()
        .flat_map(|q| q.num().terms().filter(|(m, _)| m.degree_in(&t_set) < 2).map(|(m, _)| m.to_string()).collect::<Vec<_>>())
        .collect();
    checks.push(check("(ii) Q monomials have T-degree ≥ 2", bad.is_empty(), if bad.is_empty() {
        format!("Q = [{}]", super::frac_vec_str(&out.q))
    } else {
        format!("low-degree monomials: {}", bad.join(", "))
    }));

    // g_i = s^p b_i + s^p T_i + d^{e-1} Q_i
    let sp = out.s.pow(out.p_degree);
    let shape = (0..r).all(|i| {
        let expect = sp.mul(&out.b[i]).add(&sp.mul_poly(&Polynomial::var(&out.t_vars[i]))).add(&d.pow(e - 1).mul(&out.q[i]));
        expect == out.g[i]
    });
    checks.push(check("g = s^p b + s^p T + d^(e-1) Q", shape, format!("g = [{}]", super::frac_vec_str(&out.g))));

    // Taylor certificates: s^p f_i - d^{e+1} g_i ∈ (h) + (relations of D)
    let taylor_ok = out.taylor.iter().zip(&sys.f).zip(&out.g).all(|((c, f), g)| {
        let lhs = sp.mul_poly(f).sub(&d.pow(e + 1).mul(g));
        c.h_cofactors.len() == n && c.d_cofactors.len() == d_gens.len() && lhs == lin(&c.h_cofactors, &out.h).add(&lin(&c.d_cofactors, &d_gens))
    });
    checks.push(check("d^(e+1) g ≡ s^p f mod (h) + I_D", taylor_ok, format!("{} multiply-back identities", out.taylor.len())));

    // (iii) s' ∈ s^{rp} + (T)
    let zero_t: BTreeMap<String, Polynomial> = out.t_vars.iter().map(|t| (t.clone(), Polynomial::zero())).collect();
    let sp_at0 = Frac::new(out.s_prime.num().substitute(&zero_t), out.s_prime.den().clone()).ok();
    let srp = out.s.pow(r as u32 * out.p_degree);
    let iii = sp_at0.as_ref().is_some_and(|x| *x == srp);
    checks.push(check("(iii) s' ∈ s^(rp) + (T)", iii, format!("s' = {}, s^(rp) = {srp}", out.s_prime)));

    // s'' against its defining identity: d s'' = s^m P(Y0) - Σ η I_D
    let m = sys.p.num().degree_in(&b.vars.iter().cloned().collect()).max(1);
    let l: Vec<Frac> = out.h.iter().zip(&b.vars).map(|(h, y)| out.s.mul_poly(&Polynomial::var(y)).sub(h)).collect();
    let p_y0 = cleared_eval(sys.p.num(), &b.vars, &l, &out.s, m).mul(&Frac::new(Polynomial::one(), sys.p.den().clone()).unwrap());
    let ident = d.mul(&out.s_double_prime) == p_y0.sub(&lin(&out.s_double_prime_reduction, &d_gens));
    checks.push(check("d s'' = s^m P(Y0) mod I_D", ident, format!("s'' = {}", out.s_double_prime)));
    let spp_at0 = Frac::new(out.s_double_prime.num().substitute(&zero_t), out.s_double_prime.den().clone()).unwrap();
    let tail = out.s_double_prime.sub(&spp_at0);
    let head_ok = spp_at0.sub(&out.s.pow(m + 1)).is_zero() || input.d_ring.certify_member(spp_at0.sub(&out.s.pow(m + 1)).num()).ok().flatten().is_some();
    let tail_ok = tail.is_zero() || b.base.divide(&tail, &d.pow(e - 1)).is_ok();
    checks.push(check("s'' ∈ s^(m+1) + d^(e-1)(T)", head_ok && tail_ok, format!("s''|T=0 = {spp_at0}")));

    // (iv) units
    let omega_s = input.omega.apply_frac(&out.s).map(|x| x.num().clone());
    let psi_sp = out.psi.apply_frac(&out.s_prime).map(|x| x.num().clone());
    let psi_spp = out.psi.apply_frac(&out.s_double_prime).map(|x| x.num().clone());
    let units = [omega_s, psi_sp, psi_spp];
    let iv = units.iter().all(|u| u.as_ref().is_ok_and(|u| target.is_unit(u)));
    let shown: Vec<String> = units.iter().map(|u| u.as_ref().map_or_else(|e| e.to_string(), |u| u.to_string())).collect();
    checks.push(check("(iv) ω(s), ψ(s'), ψ(s'') units", iv, format!("constant terms of [{}]", shown.join("; "))));

    // ψ(h) = 0 at N, ψ(g) = 0 where ν is known
    let h_zero = out.h.iter().all(|h| out.psi.apply_frac(h).is_ok_and(|x| target.is_zero_at(x.num(), n_full)));
    checks.push(check("ψ(h) = 0 at N", h_zero, format!("precision {n_full:?}")));
    let g_zero = out.g.iter().all(|g| out.psi.apply_frac(g).is_ok_and(|x| target.is_zero_at(x.num(), out.nu_precision)));
    checks.push(check("ψ(g) = 0 at the precision of ν", g_zero, format!("precision {:?}", out.nu_precision)));

    // morphisms
    let w_ok = out.w.validate();
    checks.push(check("w : B' → A' well-defined", w_ok.is_ok(), w_ok.err().map_or(format!("precision {:?}", out.w.effective_precision()), |e| e.to_string())));
    let iota_ok = out.iota.validate();
    checks.push(check("ι : B → B' well-defined", iota_ok.is_ok(), iota_ok.err().map_or("I maps into the relations of B'".into(), |e| e.to_string())));
    let dz = out.d_to_b_prime.validate();
    checks.push(check("D → B' well-defined", dz.is_ok(), dz.err().map_or("relations of D map to zero".into(), |e| e.to_string())));

    // (i) w ∘ ι = v on Y, exactly at N
    let mut mismatch = Vec::new();
    for y in &b.vars {
        let via = out.w.apply(out.iota.image(y).unwrap_or(&Polynomial::zero()));
        let direct = input.v.image(y).cloned().unwrap_or_default();
        let diff = target.reduce_at(&(&via - &direct), n_full);
        if !diff.is_zero() {
            mismatch.push(format!("{y}: {diff}"));
        }
    }
    checks.push(check("(i) w ∘ ι = v at N", mismatch.is_empty(), if mismatch.is_empty() {
        format!("Y images agree at precision {n_full:?}")
    } else {
        mismatch.join("; ")
    }));

    // (v) kill certificates
    let mut gens: Vec<Frac> = out.h.clone();
    gens.extend(out.g.iter().cloned());
    gens.extend(d_gens.iter().cloned());
    let kill_ok = out.kill.len() == b.relations.len()
        && out.kill.iter().zip(&b.relations).all(|(c, q)| {
            input.d_ring.base.is_unit(c.multiplier.num()).unwrap_or(false) || out.loc_unit(&c.multiplier)
        } && c.verify(&d.mul(&out.s_double_prime).mul_poly(q), &gens));
    checks.push(check("(v) d s'' q ∈ (h, g) for q in I", kill_ok, format!("{} certificates, multiplier s^p", out.kill.len())));

    // standard smoothness over D
    match &out.smooth_over_d {
        Some(c) => {
            let ok = verify_unit(c, &out.b_prime.relations[out.b_prime.relations.len() - 3..]);
            checks.push(check("B' standard smooth over D", ok, format!("unit certificate with exponents {:?}", c.exponents)));
        }
        None => checks.push(check("B' standard smooth over D", false, "P of the (h, g) system is not a product of the inverted elements")),
    }

    // (vi) h_D ⊆ h_{B'} via radical membership in the target
    let p_img = out.w.apply_frac(&out.combined.p).map(|x| x.num().clone());
    match p_img {
        Ok(p_img) => {
            let mut fails = Vec::new();
            let mut ok = true;
            for g in &out.h_d {
                let img = input.omega.apply(g);
                match target.radical_membership(std::slice::from_ref(&p_img), &img) {
                    Ok(rm) if rm.member => {}
                    Ok(_) => {
                        ok = false;
                        fails.push(img.to_string());
                    }
                    Err(e) => {
                        ok = false;
                        fails.push(e.to_string());
                    }
                }
            }
            checks.push(check("(vi) h_D ⊆ h_B'", ok, if ok {
                format!("{} generators of ω(H_D) in the radical of ({p_img})", out.h_d.len())
            } else {
                format!("outside the radical: {}", fails.join(", "))
            }));
        }
        Err(e) => checks.push(check("(vi) h_D ⊆ h_B'", false, e.to_string())),
    }

    checks
}

fn verify_unit(c: &UnitCertificate, loc: &[Polynomial]) -> bool {
    if c.loc_cofactors.len() != loc.len() {
        return false;
    }
    let combo = loc.iter().zip(&c.loc_cofactors).fold(Frac::zero(), |acc, (l, k)| acc.add(&k.mul_poly(l)));
    c.unit.mul(&c.p).sub(&combo) == Frac::one()
}

impl StepOutput {
    /// Powers of `s` are units of `B'`.
    fn loc_unit(&self, x: &Frac) -> bool {
        let mut rest = x.num().clone();
        if !self.s.num().is_constant() {
            while let Some(q) = rest.div_exact(self.s.num()) {
                rest = q;
            }
        }
        rest.is_constant() && !rest.is_zero()
    }
}
