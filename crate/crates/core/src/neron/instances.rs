//! Worked instances used by the tests, the CLI examples and the acceptance run.

use std::collections::BTreeMap;

use super::StepInput;
use crate::arith::{rational, Polynomial, TruncationOrder};
use crate::error::Result;
use crate::resolve::{ChainProblem, PrimeData, StepData};
use crate::ring::{AlgebraMorphism, BaseRing, FinitePresentation, Frac, TargetRing};
use crate::serde_poly::parse_free;
use crate::smooth::JacobianSystem;

fn p(s: &str) -> Polynomial {
    parse_free(s).expect("literal parses")
}

/// Binomial series of `sqrt(1 + var)` up to degree `n - 1`.
pub fn sqrt_series(var: &str, n: u32) -> Polynomial {
    let mut c = rational(1, 1);
    let mut out = Polynomial::zero();
    for k in 0..n {
        out = out + Polynomial::constant(c.clone()) * Polynomial::var(var).pow(k);
        c = c * (rational(1, 2) - rational(k as i64, 1)) / rational(k as i64 + 1, 1);
    }
    out
}

/// `A = Q[t]_(t)`, `B = A[Y]/(Y^2 - t^2(1+t))`, `v(Y) = t sqrt(1+t)`, `D = A`,
/// `y' = t q` with `q` the degree-4 truncation of `sqrt(1+t)`.
pub fn node_step(n: u32) -> Result<StepInput> {
    let base = BaseRing::localized(["t"], vec![p("t")]);
    let target = TargetRing::truncated(["t"], TruncationOrder::new(n)?);
    let b = FinitePresentation::new(base.clone(), vec!["Y".into()], vec![p("Y^2 - t^2*(1+t)")])?;
    let vy = target.reduce(&(p("t") * sqrt_series("t", n)));
    let v = AlgebraMorphism::to_target(b.clone(), target.clone(), BTreeMap::from([("Y".to_string(), vy)]))?;
    let system = JacobianSystem::new(
        &b,
        b.relations.clone(),
        vec![vec![]],
        vec![Frac::new(p("Y"), p("1+t"))?],
        Frac::from(p("2*t^2")),
    )?;
    let d_ring = FinitePresentation::of_base(base);
    let omega = AlgebraMorphism::to_target(d_ring.clone(), target, BTreeMap::new())?;
    let y_prime = vec![Frac::from(p("t") * sqrt_series("t", 5))];
    Ok(StepInput { b, v, system, d_ring, d_system: None, omega, y_prime, e_floor: 1 })
}

/// `A = Q[x,z]`, `B = A[Y]/(Y^2 - x^2 z^2)`, `v(Y) = xz` into the exact target,
/// through `D = A[Z]/(Z^2 - x^2)` with `ω(Z) = x` and `y' = Zz`.
pub fn product_step() -> Result<StepInput> {
    let base = BaseRing::polynomial(["x", "z"]);
    let target = TargetRing::exact(["x", "z"]);
    let b = FinitePresentation::new(base.clone(), vec!["Y".into()], vec![p("Y^2 - x^2*z^2")])?;
    let v = AlgebraMorphism::to_target(b.clone(), target.clone(), BTreeMap::from([("Y".to_string(), p("x*z"))]))?;
    let system = JacobianSystem::new(&b, b.relations.clone(), vec![vec![]], vec![Frac::from(p("Y"))], Frac::from(p("2*x^2*z^2")))?;
    let d_ring = FinitePresentation::new(base, vec!["Z".into()], vec![p("Z^2 - x^2")])?;
    // only the relations, completions and witnesses of D's system are used
    let d_system = JacobianSystem::new(&d_ring, d_ring.relations.clone(), vec![vec![]], vec![Frac::one()], Frac::zero())?;
    let omega = AlgebraMorphism::to_target(d_ring.clone(), target, BTreeMap::from([("Z".to_string(), p("x"))]))?;
    Ok(StepInput { b, v, system, d_ring, d_system: Some(d_system), omega, y_prime: vec![Frac::from(p("Z*z"))], e_floor: 1 })
}

/// Splits a step input into the chain problem over `B` and its step data.
pub fn as_chain(input: StepInput) -> (ChainProblem, Vec<StepData>) {
    let problem = ChainProblem {
        b: input.b,
        v: input.v,
        systems: vec![input.system.f.clone()],
        prime: PrimeData::Maximal,
        max_iterations: 8,
    };
    let data = StepData {
        system: input.system,
        d_ring: input.d_ring,
        d_system: input.d_system,
        omega: input.omega,
        y_prime: input.y_prime,
        e_floor: input.e_floor,
    };
    (problem, vec![data])
}

/// `B = A[Y]/(Y^2 - (1+t))` with `v(Y) = sqrt(1+t)`: already smooth at the
/// closed point.
pub fn smooth_chain(n: u32) -> Result<ChainProblem> {
    let base = BaseRing::localized(["t"], vec![p("t")]);
    let target = TargetRing::truncated(["t"], TruncationOrder::new(n)?);
    let b = FinitePresentation::new(base, vec!["Y".into()], vec![p("Y^2 - (1+t)")])?;
    let v = AlgebraMorphism::to_target(b.clone(), target, BTreeMap::from([("Y".to_string(), sqrt_series("t", n))]))?;
    Ok(ChainProblem { systems: vec![b.relations.clone()], b, v, prime: PrimeData::Maximal, max_iterations: 8 })
}
