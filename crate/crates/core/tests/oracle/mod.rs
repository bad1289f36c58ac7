//! Independent reference computations shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

pub mod macaulay;
pub mod random;

use nforge_core::arith::Polynomial;
use nforge_core::ideal::{Ideal, MonomialOrder};
use rand_chacha::ChaCha8Rng;

use macaulay::{component, monomials, Echelon};

/// Compares the Groebner side against the Macaulay matrix at degree `d`:
/// the dimension of `I_d` and membership of `probes` random elements.
pub fn agree_at_degree(rng: &mut ChaCha8Rng, vars: &[String], gens: &[Polynomial], d: u32, probes: usize) -> Result<(), String> {
    let ideal = Ideal::new(gens.to_vec(), MonomialOrder::degrevlex(vars.iter().cloned()), Default::default());
    let oracle = component(gens, vars, d);
    // dim of the quotient in degree d from normal forms
    let mut quotient = Echelon::default();
    let mons = monomials(vars, d);
    for m in &mons {
        let p = Polynomial::monomial(m.clone(), nforge_core::arith::rational(1, 1));
        let (nf, _) = ideal.normal_form(&p).map_err(|e| e.to_string())?;
        quotient.insert(&nf);
    }
    if oracle.rank() + quotient.rank() != mons.len() {
        return Err(format!("dim I_{d}: oracle {} vs groebner {}", oracle.rank(), mons.len() - quotient.rank()));
    }
    for k in 0..probes {
        let f = if k % 2 == 0 {
            // a member: random homogeneous combination
            gens.iter()
                .filter(|g| g.total_degree() <= d)
                .map(|g| random::homogeneous(rng, vars, d - g.total_degree(), 2) * g.clone())
                .sum()
        } else {
            random::homogeneous(rng, vars, d, 4)
        };
        let a = ideal.contains(&f).map_err(|e| e.to_string())?;
        let b = oracle.contains(&f);
        if a != b {
            return Err(format!("membership of {f}: groebner {a}, oracle {b}"));
        }
    }
    Ok(())
}
