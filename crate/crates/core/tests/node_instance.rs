use std::collections::BTreeSet;

use nforge_core::arith::{rational, Polynomial, Rational};
use nforge_core::neron::{instances, run_step};
use nforge_core::serde_poly::parse_free;
use num_traits::Zero;

fn p(s: &str) -> Polynomial {
    parse_free(s).unwrap()
}

/// Coefficients of r with r^2 = 1 + t, solved degree by degree from the
/// convolution 2 r_0 r_k + Σ_{0<i<k} r_i r_{k-i} = [k = 1].
fn square_root_oracle(n: usize) -> Vec<Rational> {
    let mut r = vec![rational(1, 1)];
    for k in 1..n {
        let target = if k == 1 { rational(1, 1) } else { Rational::zero() };
        let inner: Rational = (1..k).map(|i| r[i].clone() * r[k - i].clone()).sum();
        r.push((target - inner) / rational(2, 1));
    }
    r
}

fn series(coeffs: &[Rational]) -> Polynomial {
    coeffs.iter().enumerate().map(|(k, c)| Polynomial::constant(c.clone()) * Polynomial::var("t").pow(k as u32)).sum()
}

fn t_set() -> BTreeSet<String> {
    ["t".to_string()].into()
}

#[test]
fn approximation_coefficients() {
    let r = square_root_oracle(5);
    assert_eq!(r, vec![rational(1, 1), rational(1, 2), rational(-1, 8), rational(1, 16), rational(-5, 128)]);
    assert_eq!(instances::sqrt_series("t", 5), series(&r));
}

#[test]
fn nu_matches_oracle_where_known() {
    let out = run_step(&instances::node_step(12).unwrap()).output.unwrap();
    let r = series(&square_root_oracle(12));
    let q = series(&square_root_oracle(5));
    let diff = (&p("t") * &(&r - &q)).truncate(12, &t_set());
    let nu = diff.div_exact(&p("4*t^4")).unwrap().truncate(8, &t_set());
    assert_eq!(out.nu_precision, Some(8));
    assert_eq!(out.nu[0].truncate(8, &t_set()), nu);
    assert_eq!(nu, p("715/262144*t^6 - 429/131072*t^5 + 33/8192*t^4 - 21/4096*t^3 + 7/1024*t^2 - 2431/1048576*t^7"));
}

#[test]
fn frozen_step_values() {
    let out = run_step(&instances::node_step(12).unwrap()).output.unwrap();
    let t1 = out.t_images["T1"].truncate(8, &t_set());
    assert_eq!(t1, p("-25/65536*t^6 + 5/4096*t^5 - 7/2048*t^4 + 7/512*t^3"));
    // s' = s^2 + 2 G(y')^2 T1 with G(y') = t q/(1+t), s = q^2/(1+t)
    let q = instances::sqrt_series("t", 5);
    let s_prime = nforge_core::ring::Frac::new(&q.pow(4) + &(&p("2*t^2*T1") * &q.pow(2)), p("(1+t)^2")).unwrap();
    assert_eq!(out.s_prime, s_prime);
    assert_eq!(out.kill.len(), 1);
    assert_eq!(out.b_prime.vars, ["Y", "T1", "S", "Sp", "Spp"].map(String::from));
    // w(S) inverts ω(s) = q^2/(1+t)
    let ws = out.w.image("S").unwrap().clone();
    assert_eq!((&ws * &q.pow(2)).truncate(12, &t_set()), p("1+t"));
}

#[test]
fn reduction_mod_d_cubed() {
    let input = instances::node_step(12).unwrap();
    let red = input.b.reduce_mod_power(&p("2*t^2"), 3).unwrap();
    assert!(red.relations.contains(&p("8*t^6")));
}
