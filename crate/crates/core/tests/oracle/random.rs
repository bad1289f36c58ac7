//! Seeded random homogeneous ideals for the oracle comparisons.

use nforge_core::arith::{rational, Monomial, Polynomial};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::macaulay::monomials;

pub fn vars(n: usize) -> Vec<String> {
    ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
}

/// A homogeneous polynomial of degree `deg` with up to `terms` small integer terms.
pub fn homogeneous(rng: &mut ChaCha8Rng, vars: &[String], deg: u32, terms: usize) -> Polynomial {
    let mons = monomials(vars, deg);
    let mut out = Polynomial::zero();
    for _ in 0..terms {
        let m: &Monomial = &mons[rng.gen_range(0..mons.len())];
        let c = rng.gen_range(-4i64..=4);
        out = out + Polynomial::monomial(m.clone(), rational(c, 1));
    }
    if out.is_zero() {
        out = Polynomial::monomial(mons[0].clone(), rational(1, 1));
    }
    out
}

/// Two or three generators of degree 2 or 3 in three variables.
pub fn ideal(rng: &mut ChaCha8Rng) -> (Vec<String>, Vec<Polynomial>) {
    let v = vars(3);
    let count = rng.gen_range(2..=3);
    let gens = (0..count).map(|_| {
        let d = rng.gen_range(2..=3);
        homogeneous(rng, &v, d, 3)
    }).collect();
    (v, gens)
}
