//! Macaulay-matrix membership over Q, independent of the Groebner code.
//!
//! For homogeneous generators the rows `m * g` with `deg(m g) = D` span the
//! degree-`D` component of the ideal exactly, so membership of a homogeneous
//! `f` of degree `D` is a rank question.

use std::collections::BTreeMap;

use nforge_core::arith::{Monomial, Polynomial, Rational};
use num_traits::Zero;

pub fn monomials(vars: &[String], deg: u32) -> Vec<Monomial> {
    fn rec(vars: &[String], deg: u32, cur: &mut Vec<(String, u32)>, out: &mut Vec<Monomial>) {
        if vars.len() == 1 {
            let mut p = cur.clone();
            p.push((vars[0].clone(), deg));
            out.push(Monomial::from_powers(p));
            return;
        }
        for k in 0..=deg {
            cur.push((vars[0].clone(), k));
            rec(&vars[1..], deg - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if vars.is_empty() {
        if deg == 0 {
            out.push(Monomial::one());
        }
        return out;
    }
    rec(vars, deg, &mut Vec::new(), &mut out);
    out
}

type Row = BTreeMap<Monomial, Rational>;

/// Rows in echelon form, keyed by their largest monomial.
#[derive(Default)]
pub struct Echelon {
    rows: BTreeMap<Monomial, Row>,
}

impl Echelon {
    fn reduce(&self, mut v: Row) -> Row {
        loop {
            let Some(top) = v.keys().rev().find(|m| self.rows.contains_key(*m)).cloned() else {
                return v;
            };
            let row = &self.rows[&top];
            let c = v[&top].clone() / row[&top].clone();
            for (m, a) in row {
                let e = v.entry(m.clone()).or_insert_with(Rational::zero);
                *e -= c.clone() * a.clone();
                if e.is_zero() {
                    v.remove(m);
                }
            }
        }
    }

    pub fn insert(&mut self, p: &Polynomial) {
        let v: Row = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        let r = self.reduce(v);
        if let Some(top) = r.keys().next_back().cloned() {
            self.rows.insert(top, r);
        }
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// The degree-`d` component of the ideal of homogeneous `gens`.
pub fn component(gens: &[Polynomial], vars: &[String], d: u32) -> Echelon {
    let mut e = Echelon::default();
    for g in gens {
        let dg = g.total_degree();
        if g.is_zero() || dg > d {
            continue;
        }
        for m in monomials(vars, d - dg) {
            e.insert(&g.mul_monomial(&m, &Rational::from_integer(1.into())));
        }
    }
    e
}
