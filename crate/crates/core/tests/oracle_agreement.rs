mod oracle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn groebner_matches_macaulay_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..40 {
        let (vars, gens) = oracle::random::ideal(&mut rng);
        for d in [4, 6] {
            if let Err(e) = oracle::agree_at_degree(&mut rng, &vars, &gens, d, 4) {
                panic!("ideal {i} {gens:?}: {e}");
            }
        }
    }
}

#[test]
fn macaulay_rows_of_a_principal_ideal() {
    let vars = oracle::random::vars(2);
    let g = nforge_core::serde_poly::parse_free("x*y").unwrap();
    let c = oracle::macaulay::component(&[g], &vars, 3);
    // x^2 y, x y^2
    assert_eq!(c.rank(), 2);
}
