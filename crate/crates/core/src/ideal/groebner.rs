//! Buchberger's algorithm with the Gebauer-Moeller pair criteria and
//! optional cofactor tracking.
//!
//! Internally polynomials are dense exponent vectors over the order's
//! variable list, stored in ascending order so the leading term is last.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::order::MonomialOrder;
use crate::arith::{Monomial, Polynomial, Rational};
use crate::error::{Error, Result};

/// Work bound for Groebner computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Budget {
    pub max_degree: u32,
    pub max_pairs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_degree: 24, max_pairs: 50_000 }
    }
}

impl Budget {
    pub fn with_degree(max_degree: u32) -> Self {
        Self { max_degree, ..Self::default() }
    }
}

type Exp = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct DPoly {
    // ascending under the order; leading term last
    terms: Vec<(Exp, Rational)>,
}

impl DPoly {
    fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn leading(&self) -> Option<&(Exp, Rational)> {
        self.terms.last()
    }

    fn from_poly(p: &Polynomial, order: &MonomialOrder) -> Result<Self> {
        let n = order.vars().len();
        let mut terms = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            let mut e = vec![0u32; n];
            for (v, k) in m.powers() {
                let i = order
                    .index_of(v)
                    .ok_or_else(|| Error::UndeclaredVariable(v.clone()))?;
                e[i] = *k;
            }
            terms.push((e, c.clone()));
        }
        terms.sort_by(|a, b| order.cmp_exp(&a.0, &b.0));
        Ok(Self { terms })
    }

    fn to_poly(&self, order: &MonomialOrder) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(e, c)| {
            let m = Monomial::from_powers(
                order.vars().iter().zip(e).filter(|(_, k)| **k > 0).map(|(v, k)| (v.clone(), *k)),
            );
            (m, c.clone())
        }))
    }

    fn scale(&mut self, c: &Rational) {
        for t in &mut self.terms {
            t.1 *= c;
        }
    }

    /// `self + c * m * other`
    fn add_scaled(&self, c: &Rational, m: &[u32], other: &DPoly, order: &MonomialOrder) -> DPoly {
        let shifted = other.terms.iter().map(|(e, a)| (mul_exp(e, m), a * c));
        merge(self.terms.iter().cloned(), shifted, order)
    }

    fn add(&self, other: &DPoly, order: &MonomialOrder) -> DPoly {
        merge(self.terms.iter().cloned(), other.terms.iter().cloned(), order)
    }

    fn max_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }
}

fn merge<I, J>(a: I, b: J, order: &MonomialOrder) -> DPoly
where
    I: Iterator<Item = (Exp, Rational)>,
    J: Iterator<Item = (Exp, Rational)>,
{
    let mut a = a.peekable();
    let mut b = b.peekable();
    let mut out = Vec::new();
    loop {
        match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(_), None) => out.push(a.next().unwrap()),
            (None, Some(_)) => out.push(b.next().unwrap()),
            (Some(x), Some(y)) => match order.cmp_exp(&x.0, &y.0) {
                Ordering::Less => out.push(a.next().unwrap()),
                Ordering::Greater => out.push(b.next().unwrap()),
                Ordering::Equal => {
                    let (e, c1) = a.next().unwrap();
                    let (_, c2) = b.next().unwrap();
                    let c = c1 + c2;
                    if !c.is_zero() {
                        out.push((e, c));
                    }
                }
            },
        }
    }
    DPoly { terms: out }
}

fn mul_exp(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn div_exp(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lcm_exp(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Cofactor vector: one entry per original generator.
type Cofactors = Vec<DPoly>;

fn cof_add_scaled(
    acc: &mut Cofactors,
    c: &Rational,
    m: &[u32],
    other: &Cofactors,
    order: &MonomialOrder,
) {
    for (a, b) in acc.iter_mut().zip(other) {
        if !b.is_zero() {
            *a = a.add_scaled(c, m, b, order);
        }
    }
}

#[derive(Clone)]
struct Element {
    poly: DPoly,
    lm: Exp,
    cof: Option<Cofactors>,
}

/// A reduced Groebner basis, optionally with the transformation expressing
/// each basis element in terms of the input generators.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    order: MonomialOrder,
    generators: Vec<Polynomial>,
    dense: Vec<DPoly>,
    transform: Option<Vec<Cofactors>>,
}

/// Result of reducing a polynomial modulo a basis.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub remainder: Polynomial,
    /// `input = sum cofactors[i] * generators[i] + remainder`; present when the
    /// basis tracks cofactors.
    pub cofactors: Option<Vec<Polynomial>>,
}

impl GroebnerBasis {
    pub fn compute(
        generators: &[Polynomial],
        order: &MonomialOrder,
        budget: &Budget,
        track: bool,
    ) -> Result<Self> {
        let engine = Engine { order, budget, track, m: generators.len() };
        let (dense, transform) = engine.run(generators)?;
        Ok(Self { order: order.clone(), generators: generators.to_vec(), dense, transform })
    }

    /// Reassembles a basis loaded from a cache; no cofactors are available.
    pub fn from_reduced(order: &MonomialOrder, generators: &[Polynomial], basis: &[Polynomial]) -> Result<Self> {
        let mut dense = basis.iter().map(|p| DPoly::from_poly(p, order)).collect::<Result<Vec<_>>>()?;
        dense.sort_by(|a, b| order.cmp_exp(&a.leading().unwrap().0, &b.leading().unwrap().0));
        Ok(Self { order: order.clone(), generators: generators.to_vec(), dense, transform: None })
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn tracks_cofactors(&self) -> bool {
        self.transform.is_some()
    }

    pub fn basis(&self) -> Vec<Polynomial> {
        self.dense.iter().map(|p| p.to_poly(&self.order)).collect()
    }

    pub fn len(&self) -> usize {
        self.dense.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dense.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.dense.len() == 1 && self.dense[0].terms.len() == 1 && self.dense[0].terms[0].0.iter().all(|e| *e == 0)
    }

    /// Expression of each basis element in the generators (tracked bases only).
    pub fn transform(&self) -> Option<Vec<Vec<Polynomial>>> {
        self.transform.as_ref().map(|t| {
            t.iter().map(|row| row.iter().map(|p| p.to_poly(&self.order)).collect()).collect()
        })
    }

    pub fn reduce(&self, f: &Polynomial) -> Result<Reduction> {
        let f = DPoly::from_poly(f, &self.order)?;
        let mut quotients: Vec<DPoly> = vec![DPoly::zero(); self.dense.len()];
        let mut rem_terms: Vec<(Exp, Rational)> = Vec::new();
        let mut p = f;
        while let Some((lm, lc)) = p.terms.last().cloned() {
            match self.dense.iter().position(|g| divides(&g.leading().unwrap().0, &lm)) {
                Some(k) => {
                    let g = &self.dense[k];
                    let (glm, glc) = g.leading().unwrap();
                    let m = div_exp(&lm, glm);
                    let c = &lc / glc;
                    p = p.add_scaled(&-c.clone(), &m, g, &self.order);
                    quotients[k] = quotients[k].add(&DPoly { terms: vec![(m, c)] }, &self.order);
                }
                None => {
                    p.terms.pop();
                    rem_terms.push((lm, lc));
                }
            }
        }
        rem_terms.reverse();
        let remainder = DPoly { terms: rem_terms }.to_poly(&self.order);
        let cofactors = self.transform.as_ref().map(|t| {
            let mut acc: Cofactors = vec![DPoly::zero(); self.generators.len()];
            for (q, row) in quotients.iter().zip(t) {
                if q.is_zero() {
                    continue;
                }
                for (a, r) in acc.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *a = a.add(&mul_dpoly(q, r, &self.order), &self.order);
                    }
                }
            }
            acc.iter().map(|p| p.to_poly(&self.order)).collect()
        });
        Ok(Reduction { remainder, cofactors })
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        Ok(self.reduce(f)?.remainder)
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }
}

fn mul_dpoly(a: &DPoly, b: &DPoly, order: &MonomialOrder) -> DPoly {
    let mut acc = DPoly::zero();
    for (e, c) in &a.terms {
        acc = acc.add_scaled(c, e, b, order);
    }
    acc
}

struct Engine<'a> {
    order: &'a MonomialOrder,
    budget: &'a Budget,
    track: bool,
    m: usize,
}

#[derive(Clone, PartialEq, Eq)]
struct Pair {
    degree: u32,
    lcm: Exp,
    i: usize,
    j: usize,
}

impl Engine<'_> {
    fn run(&self, generators: &[Polynomial]) -> Result<(Vec<DPoly>, Option<Vec<Cofactors>>)> {
        let order = self.order;
        let mut inputs = Vec::new();
        for (k, g) in generators.iter().enumerate() {
            let p = DPoly::from_poly(g, order)?;
            if p.is_zero() {
                continue;
            }
            let cof = self.track.then(|| {
                let mut v = vec![DPoly::zero(); self.m];
                v[k] = DPoly { terms: vec![(vec![0; order.vars().len()], Rational::one())] };
                v
            });
            inputs.push((p, cof));
        }
        // smaller generators first keeps the run deterministic and cheap
        inputs.sort_by(|a, b| order.cmp_exp(&a.0.leading().unwrap().0, &b.0.leading().unwrap().0));

        let mut basis: Vec<Element> = Vec::new();
        let mut active: Vec<bool> = Vec::new();
        let mut pairs: Vec<Pair> = Vec::new();

        for (p, cof) in inputs {
            if let Some(e) = self.reduce_full(p, cof, &basis, &active)? {
                self.insert(e, &mut basis, &mut active, &mut pairs)?;
            }
        }

        let mut processed = 0usize;
        while !pairs.is_empty() {
            processed += 1;
            if processed > self.budget.max_pairs {
                return Err(Error::DegreeBudgetExceeded(format!(
                    "more than {} S-pairs",
                    self.budget.max_pairs
                )));
            }
            let idx = pairs
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    a.degree
                        .cmp(&b.degree)
                        .then_with(|| order.cmp_exp(&a.lcm, &b.lcm))
                        .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
                })
                .map(|(k, _)| k)
                .unwrap();
            let pair = pairs.swap_remove(idx);
            let (s, cof) = self.spoly(&basis[pair.i], &basis[pair.j], &pair.lcm);
            if let Some(e) = self.reduce_full(s, cof, &basis, &active)? {
                if e.poly.max_degree() > self.budget.max_degree {
                    return Err(Error::DegreeBudgetExceeded(format!(
                        "basis element of degree {} exceeds {}",
                        e.poly.max_degree(),
                        self.budget.max_degree
                    )));
                }
                self.insert(e, &mut basis, &mut active, &mut pairs)?;
            }
        }

        let mut reduced: Vec<Element> =
            basis.into_iter().zip(active).filter(|(_, a)| *a).map(|(e, _)| e).collect();
        reduced.sort_by(|a, b| order.cmp_exp(&a.lm, &b.lm));
        // interreduce tails
        for k in 0..reduced.len() {
            let others: Vec<Element> =
                reduced.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, e)| e.clone()).collect();
            let flags = vec![true; others.len()];
            let e = reduced[k].clone();
            let (lead, rest) = split_leading(e.poly);
            let (mut tail, tail_cof) = self.reduce_all(rest, e.cof, &others, &flags);
            tail.terms.push(lead);
            reduced[k] = Element { lm: e.lm, poly: tail, cof: tail_cof };
        }
        let transform = self.track.then(|| reduced.iter().map(|e| e.cof.clone().unwrap()).collect());
        Ok((reduced.into_iter().map(|e| e.poly).collect(), transform))
    }

    fn spoly(&self, a: &Element, b: &Element, lcm: &[u32]) -> (DPoly, Option<Cofactors>) {
        let order = self.order;
        let ma = div_exp(lcm, &a.lm);
        let mb = div_exp(lcm, &b.lm);
        // elements are monic
        let zero = DPoly::zero();
        let s = zero.add_scaled(&Rational::one(), &ma, &a.poly, order).add_scaled(
            &-Rational::one(),
            &mb,
            &b.poly,
            order,
        );
        let cof = self.track.then(|| {
            let mut acc = vec![DPoly::zero(); self.m];
            cof_add_scaled(&mut acc, &Rational::one(), &ma, a.cof.as_ref().unwrap(), order);
            cof_add_scaled(&mut acc, &-Rational::one(), &mb, b.cof.as_ref().unwrap(), order);
            acc
        });
        (s, cof)
    }

    /// Full reduction; returns a monic element or `None` for zero.
    fn reduce_full(
        &self,
        p: DPoly,
        cof: Option<Cofactors>,
        basis: &[Element],
        active: &[bool],
    ) -> Result<Option<Element>> {
        let (mut p, mut cof) = self.reduce_all(p, cof, basis, active);
        let Some((lm, lc)) = p.leading().cloned() else {
            return Ok(None);
        };
        let inv = Rational::one() / lc;
        p.scale(&inv);
        if let Some(c) = cof.as_mut() {
            for q in c.iter_mut() {
                q.scale(&inv);
            }
        }
        Ok(Some(Element { poly: p, lm, cof }))
    }

    fn reduce_all(
        &self,
        mut p: DPoly,
        mut cof: Option<Cofactors>,
        basis: &[Element],
        active: &[bool],
    ) -> (DPoly, Option<Cofactors>) {
        let order = self.order;
        let mut rem: Vec<(Exp, Rational)> = Vec::new();
        while let Some((lm, lc)) = p.terms.last().cloned() {
            let hit = basis
                .iter()
                .zip(active)
                .position(|(g, a)| *a && divides(&g.lm, &lm));
            match hit {
                Some(k) => {
                    let g = &basis[k];
                    let m = div_exp(&lm, &g.lm);
                    let c = -lc;
                    p = p.add_scaled(&c, &m, &g.poly, order);
                    if let Some(acc) = cof.as_mut() {
                        cof_add_scaled(acc, &c, &m, g.cof.as_ref().unwrap(), order);
                    }
                }
                None => {
                    p.terms.pop();
                    rem.push((lm, lc));
                }
            }
        }
        rem.reverse();
        (DPoly { terms: rem }, cof)
    }

    fn insert(
        &self,
        h: Element,
        basis: &mut Vec<Element>,
        active: &mut Vec<bool>,
        pairs: &mut Vec<Pair>,
    ) -> Result<()> {
        let t = basis.len();
        let candidates: Vec<usize> = (0..t).filter(|&i| active[i]).collect();
        let lcm_of = |i: usize| lcm_exp(&basis[i].lm, &h.lm);

        // Gebauer-Moeller: pairs with the new element
        let mut c: Vec<usize> = candidates.clone();
        let mut d: Vec<usize> = Vec::new();
        while let Some(i) = c.pop() {
            let li = lcm_of(i);
            let keep = coprime(&basis[i].lm, &h.lm)
                || (!c.iter().any(|&j| divides(&lcm_of(j), &li))
                    && !d.iter().any(|&j| divides(&lcm_of(j), &li)));
            if keep {
                d.push(i);
            }
        }
        let new_pairs: Vec<Pair> = d
            .into_iter()
            .filter(|&i| !coprime(&basis[i].lm, &h.lm))
            .map(|i| {
                let lcm = lcm_of(i);
                Pair { degree: lcm.iter().sum(), lcm, i, j: t }
            })
            .collect();

        // drop old pairs made redundant by the new leading monomial
        pairs.retain(|p| {
            !(divides(&h.lm, &p.lcm)
                && lcm_exp(&basis[p.i].lm, &h.lm) != p.lcm
                && lcm_exp(&basis[p.j].lm, &h.lm) != p.lcm)
        });
        pairs.extend(new_pairs);

        for i in candidates {
            if divides(&h.lm, &basis[i].lm) {
                active[i] = false;
            }
        }
        basis.push(h);
        active.push(true);
        Ok(())
    }
}

fn split_leading(mut p: DPoly) -> ((Exp, Rational), DPoly) {
    let lead = p.terms.pop().expect("nonzero");
    (lead, p)
}

/// Convenience for tests and the CLI: the reduced basis as printed strings.
pub fn basis_strings(gb: &GroebnerBasis) -> Vec<String> {
    gb.basis().iter().map(ToString::to_string).collect()
}
