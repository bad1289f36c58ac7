//! Seeded random Jacobian systems over Q.

use nforge_core::arith::{rational, Monomial, Polynomial};
use nforge_core::error::Result;
use nforge_core::ring::{BaseRing, FinitePresentation, Frac};
use nforge_core::smooth::{subsets, JacobianSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_vars: usize,
    pub max_relations: usize,
    /// Bound on the degree of Jacobian entries.
    pub max_entry_degree: u32,
}

impl Default for Shape {
    fn default() -> Self {
        Self { max_vars: 3, max_relations: 2, max_entry_degree: 2 }
    }
}

fn poly(rng: &mut ChaCha8Rng, vars: &[String], max_degree: u32, max_terms: usize) -> Polynomial {
    let terms = rng.gen_range(1..=max_terms);
    let mut out = Polynomial::zero();
    for _ in 0..terms {
        let mut budget = rng.gen_range(0..=max_degree);
        let mut powers = Vec::new();
        for v in vars {
            if budget == 0 {
                break;
            }
            let k = rng.gen_range(0..=budget);
            budget -= k;
            powers.push((v.as_str(), k));
        }
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-5i64..=5);
        }
        out = out + Polynomial::monomial(Monomial::from_powers(powers), rational(c, 1));
    }
    out
}

/// `n <= max_vars` variables, `r <= max_relations` relations of degree at most
/// `max_entry_degree + 1`, every completion, random witnesses and `d = 0`.
pub fn jacobian_system(rng: &mut ChaCha8Rng, shape: Shape) -> Result<(FinitePresentation, JacobianSystem)> {
    let n = rng.gen_range(1..=shape.max_vars);
    let r = rng.gen_range(1..=shape.max_relations.min(n));
    let vars: Vec<String> = (1..=n).map(|i| format!("Y{i}")).collect();
    let mut shuffled = vars.clone();
    for i in (1..shuffled.len()).rev() {
        let j = rng.gen_range(0..=i);
        shuffled.swap(i, j);
    }
    let f: Vec<Polynomial> = (0..r).map(|_| poly(rng, &shuffled, shape.max_entry_degree + 1, 4)).collect();
    let b = FinitePresentation::new(BaseRing::field(), vars.clone(), f.clone())?;
    let cols = subsets(n, n - r);
    let witnesses: Vec<Frac> = cols.iter().map(|_| Frac::from(poly(rng, &vars, 1, 2))).collect();
    let sys = JacobianSystem::new(&b, f, cols, witnesses, Frac::zero())?;
    Ok((b, sys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn shapes_respect_the_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let (b, sys) = jacobian_system(&mut rng, Shape::default()).unwrap();
            assert!(b.vars.len() <= 3 && sys.r() <= 2 && sys.r() <= b.vars.len());
            for row in &nforge_core::smooth::jacobian(&sys.f, &sys.vars) {
                assert!(row.iter().all(|e| e.total_degree() <= 2));
            }
        }
    }

    #[test]
    fn same_seed_same_systems() {
        let a = jacobian_system(&mut ChaCha8Rng::seed_from_u64(9), Shape::default()).unwrap();
        let b = jacobian_system(&mut ChaCha8Rng::seed_from_u64(9), Shape::default()).unwrap();
        assert_eq!(a.1, b.1);
    }
}
