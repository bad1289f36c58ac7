use std::collections::BTreeSet;

use nforge_core::arith::{rational, Monomial, Polynomial, TruncationOrder};
use nforge_core::ideal::{Ideal, MonomialOrder};
use nforge_core::neron::build_adjoint_system;
use nforge_core::ring::{BaseRing, FinitePresentation, Frac, TargetRing};
use nforge_core::smooth::{determinant, JacobianSystem, Matrix};
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn poly(max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0..=max_exp, 0..=max_exp, 0..=max_exp), -5i64..=5), 0..=max_terms).prop_map(|terms| {
        terms
            .into_iter()
            .map(|((a, b, c), k)| {
                Polynomial::monomial(Monomial::from_powers([("x", a), ("y", b), ("z", c)]), rational(k, 1))
            })
            .sum()
    })
}

fn series_vars() -> BTreeSet<String> {
    ["x".to_string()].into()
}

/// Determinant by expansion along the first row.
fn laplace(m: &Matrix) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    let mut out = Polynomial::zero();
    for j in 0..n {
        let minor: Matrix = m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * &laplace(&minor);
        out = if j % 2 == 0 { out + term } else { out - term };
    }
    out
}

proptest! {
    #[test]
    fn ring_axioms(f in poly(3, 4), g in poly(3, 4), h in poly(3, 4)) {
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn leibniz_rule(f in poly(3, 4), g in poly(3, 4)) {
        for v in VARS {
            let lhs = (&f * &g).derivative(v);
            let rhs = &(&f.derivative(v) * &g) + &(&f * &g.derivative(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn truncated_product_is_truncation_of_product(f in poly(4, 5), g in poly(4, 5), n in 1u32..8) {
        let s = series_vars();
        prop_assert_eq!(f.mul_truncated(&g, n, &s), (&f * &g).truncate(n, &s));
        prop_assert_eq!(f.truncate(n, &s).truncate(n, &s), f.truncate(n, &s));
    }

    #[test]
    fn series_inverse(f in poly(3, 4)) {
        let t = TargetRing::truncated(["x"], TruncationOrder::new(6).unwrap());
        let u = &Polynomial::one() + &(&Polynomial::var("x") * &f.truncate(6, &series_vars()));
        let u = t.reduce(&u);
        let inv = t.inverse(&u).unwrap();
        prop_assert_eq!(t.mul(&u, &inv), t.reduce(&Polynomial::one()));
    }

    #[test]
    fn determinant_agrees_with_cofactor_expansion(entries in prop::collection::vec(poly(2, 2), 9)) {
        let m: Matrix = entries.chunks(3).map(|r| r.to_vec()).collect();
        prop_assert_eq!(determinant(&m), laplace(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_certificates_multiply_back(g1 in poly(2, 3), g2 in poly(2, 3), f in poly(3, 4)) {
        let ideal = Ideal::new(vec![g1, g2], MonomialOrder::degrevlex(VARS), Default::default());
        let (_, cert) = ideal.normal_form(&f).unwrap();
        prop_assert!(cert.verify(&f, ideal.generators()));
    }

    #[test]
    fn quotient_is_sound(g1 in poly(2, 3), g2 in poly(2, 3), q in poly(2, 2)) {
        prop_assume!(!q.is_zero());
        let ideal = Ideal::new(vec![g1, g2], MonomialOrder::degrevlex(VARS), Default::default());
        let colon = ideal.quotient_by(&q).unwrap();
        for h in colon.reduced_basis().unwrap() {
            prop_assert!(ideal.contains(&(&h * &q)).unwrap());
        }
        for g in ideal.generators() {
            prop_assert!(colon.contains(g).unwrap());
        }
    }

    #[test]
    fn adjoint_identities_hold(f1 in poly(2, 3), f2 in poly(2, 3), two in any::<bool>()) {
        let base = BaseRing::field();
        let vars: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
        let f = if two { vec![f1, f2] } else { vec![f1] };
        let b = FinitePresentation::new(base, vars, f.clone()).unwrap();
        let n = 3;
        let r = f.len();
        let cols: Vec<Vec<usize>> = nforge_core::smooth::subsets(n, n - r);
        let witnesses = vec![Frac::one(); cols.len()];
        let sys = JacobianSystem::new(&b, f, cols, witnesses, Frac::zero()).unwrap();
        prop_assert!(build_adjoint_system(&sys).is_ok());
    }
}
