//! Evaluation at `Y0 = L / s` with denominators cleared by powers of `s`, and
//! the explicit cofactors that tie `s^p F(Y)` to it modulo `h = s Y - L`.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{Monomial, Polynomial};
use crate::ring::{substitute_frac, Frac};

/// `s^p F(L / s) = Σ_k s^(p-k) F_k(L)`, where `F_k` is the part of `F` of
/// degree `k` in `vars` and `p >= deg_vars F`.
pub fn cleared_eval(f: &Polynomial, vars: &[String], l: &[Frac], s: &Frac, p: u32) -> Frac {
    let set: BTreeSet<String> = vars.iter().cloned().collect();
    let images: BTreeMap<String, Frac> = vars.iter().cloned().zip(l.iter().cloned()).collect();
    let top = f.degree_in(&set);
    assert!(top <= p, "clearing exponent below the degree");
    let mut out = Frac::zero();
    for k in 0..=top {
        let part = f.homogeneous_part(&set, k);
        if part.is_zero() {
            continue;
        }
        out = out.add(&substitute_frac(&part, &images).mul(&s.pow(p - k)));
    }
    out
}

/// Cofactors `c_j` with `s^p F(Y) - s^p F(L/s) = Σ_j c_j (s Y_j - L_j)`.
///
/// Per monomial, `a^m - b^m` telescopes over the variables and
/// `a^e - b^e = (a - b) Σ a^u b^(e-1-u)` with `a = s Y`, `b = L`.
pub fn difference_cofactors(f: &Polynomial, vars: &[String], l: &[Frac], s: &Frac, p: u32) -> Vec<Frac> {
    let n = vars.len();
    let a: Vec<Frac> = vars.iter().map(|v| s.mul_poly(&Polynomial::var(v))).collect();
    let mut a_pows: Vec<Vec<Frac>> = vec![vec![Frac::one()]; n];
    let mut b_pows: Vec<Vec<Frac>> = vec![vec![Frac::one()]; n];
    let power = |cache: &mut Vec<Vec<Frac>>, base: &Frac, j: usize, e: usize| -> Frac {
        while cache[j].len() <= e {
            let next = cache[j].last().unwrap().mul(base);
            cache[j].push(next);
        }
        cache[j][e].clone()
    };
    let mut out = vec![Frac::zero(); n];
    for (m, c) in f.terms() {
        let exps: Vec<usize> = vars.iter().map(|v| m.exponent(v) as usize).collect();
        let deg: usize = exps.iter().sum();
        let rest = Monomial::from_powers(m.powers().iter().filter(|(v, _)| !vars.contains(v)).cloned());
        let coeff = Frac::from(Polynomial::monomial(rest, c.clone())).mul(&s.pow(p - deg as u32));
        for j in 0..n {
            if exps[j] == 0 {
                continue;
            }
            let mut outer = coeff.clone();
            for i in 0..n {
                if i < j {
                    outer = outer.mul(&power(&mut b_pows, &l[i], i, exps[i]));
                } else if i > j {
                    outer = outer.mul(&power(&mut a_pows, &a[i], i, exps[i]));
                }
            }
            let e = exps[j];
            let mut inner = Frac::zero();
            for u in 0..e {
                let au = power(&mut a_pows, &a[j], j, u);
                let bu = power(&mut b_pows, &l[j], j, e - 1 - u);
                inner = inner.add(&au.mul(&bu));
            }
            out[j] = out[j].add(&outer.mul(&inner));
        }
    }
    out
}

/// Parts of `f` by total degree in `vars`.
pub fn split_by_degree(f: &Frac, vars: &BTreeSet<String>) -> BTreeMap<u32, Frac> {
    let mut out = BTreeMap::new();
    let top = f.num().degree_in(vars);
    for k in 0..=top {
        let part = f.num().homogeneous_part(vars, k);
        if !part.is_zero() {
            out.insert(k, Frac::new(part, f.den().clone()).expect("nonzero denominator"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serde_poly::parse_free;

    fn p(s: &str) -> Polynomial {
        parse_free(s).unwrap()
    }

    #[test]
    fn cofactors_reconstruct_difference() {
        let vars = vec!["Y1".to_string(), "Y2".to_string()];
        let s = Frac::new(p("1 + t"), p("1 - t")).unwrap();
        let l = vec![Frac::from(p("t + T")), Frac::new(p("t^2*T"), p("1 + 2*t")).unwrap()];
        let f = p("Y1^2*Y2 - t*Y2 + 3*Y1 - t^2");
        let lhs = s.pow(3).mul_poly(&f).sub(&cleared_eval(&f, &vars, &l, &s, 3));
        let cof = difference_cofactors(&f, &vars, &l, &s, 3);
        let h: Vec<Frac> = vars.iter().zip(&l).map(|(v, lj)| s.mul_poly(&Polynomial::var(v)).sub(lj)).collect();
        let rhs = cof.iter().zip(&h).fold(Frac::zero(), |acc, (c, hj)| acc.add(&c.mul(hj)));
        assert_eq!(lhs, rhs);
    }
}
