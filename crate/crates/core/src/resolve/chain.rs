use serde::{Deserialize, Serialize};

use crate::arith::Polynomial;
use crate::error::{Error, Result};
use crate::ideal::{MembershipCertificate, RadicalMembership};
use crate::neron::{run_step, Check, StepInput, StepReport};
use crate::ring::{AlgebraMorphism, FinitePresentation, Frac, TargetRing};
use crate::smooth::{elkik_ideal, JacobianSystem, SystemSearch};

/// Step data for one iteration, phrased over the current `B_i`.
#[derive(Debug, Clone)]
pub struct StepData {
    pub system: JacobianSystem,
    pub d_ring: FinitePresentation,
    pub d_system: Option<JacobianSystem>,
    pub omega: AlgebraMorphism,
    pub y_prime: Vec<Frac>,
    pub e_floor: u32,
}

/// Supplies step data for iteration `i` given the current ring and map.
/// `None` means the data is not available and the chain stalls.
pub trait StepProvider {
    fn step(&mut self, iteration: usize, b: &FinitePresentation, w: &AlgebraMorphism) -> Option<StepData>;
}

impl StepProvider for Vec<StepData> {
    fn step(&mut self, iteration: usize, _b: &FinitePresentation, _w: &AlgebraMorphism) -> Option<StepData> {
        self.get(iteration).cloned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PrimeData {
    Maximal,
    /// Experimental: a principal irreducible factor over a polynomial target.
    Principal {
        #[serde(with = "crate::serde_poly")]
        factor: Polynomial,
    },
}

#[derive(Debug, Clone)]
pub struct ChainProblem {
    pub b: FinitePresentation,
    pub v: AlgebraMorphism,
    /// Systems used for `H_{B_0/A}`; empty means search.
    pub systems: Vec<Vec<Polynomial>>,
    pub prime: PrimeData,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ChainStatus {
    Terminated { iteration: usize },
    Stalled { iteration: usize },
}

/// `1 = Σ c_i gens_i` in the target.
#[derive(Debug, Clone, Serialize)]
pub struct UnitIdeal {
    #[serde(with = "crate::serde_poly::vec")]
    pub generators: Vec<Polynomial>,
    pub certificate: MembershipCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainIteration {
    pub index: usize,
    /// Generators of the image of the pre-radical ideal in A'.
    #[serde(with = "crate::serde_poly::vec")]
    pub ideal: Vec<Polynomial>,
    /// Element of this ideal outside the radical of the previous one.
    #[serde(with = "crate::serde_poly::option")]
    pub witness: Option<Polynomial>,
    pub witness_here: Option<RadicalMembership>,
    pub witness_before: Option<RadicalMembership>,
    /// Radical membership of each previous generator in this ideal.
    pub contains_previous: Vec<RadicalMembership>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<UnitIdeal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<StepReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub prime: PrimeData,
    #[serde(flatten)]
    pub status: ChainStatus,
    pub iterations: Vec<ChainIteration>,
    pub checks: Vec<Check>,
}

fn unit_certificate(target: &TargetRing, gens: &[Polynomial]) -> Result<Option<UnitIdeal>> {
    if !target.radical_membership(gens, &Polynomial::one())?.member {
        return Ok(None);
    }
    let ideal = target.ideal(gens);
    let (_, certificate) = ideal.normal_form(&Polynomial::one())?;
    if !certificate.is_member() {
        return Ok(None);
    }
    Ok(Some(UnitIdeal { generators: ideal.generators().to_vec(), certificate }))
}

/// Iterates the step until `1` lies in the image of the pre-radical ideal or
/// the provider runs out. Each accepted iteration must enlarge the radical.
pub fn resolve_chain(problem: &ChainProblem, provider: &mut dyn StepProvider) -> Result<ChainReport> {
    let target = problem.v.target().ok_or_else(|| Error::ContextMismatch("v must land in a target ring".into()))?.clone();
    let mut checks = Vec::new();
    let v_ok = problem.v.validate();
    checks.push(Check { name: "v well-defined".into(), passed: v_ok.is_ok(), detail: v_ok.as_ref().err().map_or("relations vanish".into(), |e| e.to_string()) });
    v_ok?;
    let h0 = elkik_ideal(&problem.b, &problem.systems, SystemSearch::default())?;
    let ideal0: Vec<Polynomial> = h0.ideal.generators().iter().map(|g| target.reduce(&problem.v.apply(g))).filter(|g| !g.is_zero()).collect();
    let unit = unit_certificate(&target, &ideal0)?;
    let done = unit.is_some();
    let mut iterations = vec![ChainIteration {
        index: 0,
        ideal: ideal0,
        witness: None,
        witness_here: None,
        witness_before: None,
        contains_previous: vec![],
        unit,
        step: None,
    }];
    if done {
        checks.push(Check { name: "unit ideal".into(), passed: true, detail: "reached at iteration 0".into() });
        return Ok(ChainReport { prime: problem.prime.clone(), status: ChainStatus::Terminated { iteration: 0 }, iterations, checks });
    }
    let mut b = problem.b.clone();
    let mut w = problem.v.clone();
    for i in 0..problem.max_iterations {
        let Some(data) = provider.step(i, &b, &w) else {
            checks.push(Check { name: "step data".into(), passed: true, detail: format!("withheld at iteration {}", i + 1) });
            return Ok(ChainReport { prime: problem.prime.clone(), status: ChainStatus::Stalled { iteration: i }, iterations, checks });
        };
        let input = StepInput {
            b: b.clone(),
            v: w.clone(),
            system: data.system,
            d_ring: data.d_ring,
            d_system: data.d_system,
            omega: data.omega,
            y_prime: data.y_prime,
            e_floor: data.e_floor,
        };
        let report = run_step(&input);
        let passed = report.passed();
        checks.push(Check {
            name: format!("step {}", i + 1),
            passed,
            detail: report.failure.clone().unwrap_or_else(|| format!("{} checks", report.checks.len())),
        });
        let Some(out) = report.output.clone() else {
            iterations.push(empty_iteration(i + 1, report));
            return Ok(ChainReport { prime: problem.prime.clone(), status: ChainStatus::Stalled { iteration: i }, iterations, checks });
        };
        let p_img = target.reduce(out.w.apply_frac(&out.combined.p)?.num());
        let ideal: Vec<Polynomial> = vec![p_img].into_iter().filter(|g| !g.is_zero()).collect();
        let prev = iterations.last().expect("iteration 0 is recorded").ideal.clone();
        let contains_previous = prev.iter().map(|g| target.radical_membership(&ideal, g)).collect::<Result<Vec<_>>>()?;
        if let Some(k) = contains_previous.iter().position(|m| !m.member) {
            return Err(Error::ChainNotIncreasing {
                iteration: i + 1,
                detail: format!("previous generator {} is not in the radical of ({})", prev[k], join(&ideal)),
            });
        }
        let mut witness = None;
        for g in &ideal {
            let before = target.radical_membership(&prev, g)?;
            if !before.member {
                witness = Some((g.clone(), target.radical_membership(&ideal, g)?, before));
                break;
            }
        }
        let Some((wg, here, before)) = witness else {
            return Err(Error::ChainNotIncreasing {
                iteration: i + 1,
                detail: format!("every generator of ({}) is already in the radical of ({})", join(&ideal), join(&prev)),
            });
        };
        let unit = unit_certificate(&target, &ideal)?;
        let done = unit.is_some();
        iterations.push(ChainIteration {
            index: i + 1,
            ideal,
            witness: Some(wg),
            witness_here: Some(here),
            witness_before: Some(before),
            contains_previous,
            unit,
            step: Some(report),
        });
        if !passed {
            return Ok(ChainReport { prime: problem.prime.clone(), status: ChainStatus::Stalled { iteration: i + 1 }, iterations, checks });
        }
        if done {
            checks.push(Check { name: "unit ideal".into(), passed: true, detail: format!("reached at iteration {}", i + 1) });
            return Ok(ChainReport { prime: problem.prime.clone(), status: ChainStatus::Terminated { iteration: i + 1 }, iterations, checks });
        }
        b = out.b_prime.clone();
        w = out.w.clone();
    }
    let n = iterations.len() - 1;
    Ok(ChainReport { prime: problem.prime.clone(), status: ChainStatus::Stalled { iteration: n }, iterations, checks })
}

fn empty_iteration(index: usize, report: StepReport) -> ChainIteration {
    ChainIteration {
        index,
        ideal: vec![],
        witness: None,
        witness_here: None,
        witness_before: None,
        contains_previous: vec![],
        unit: None,
        step: Some(report),
    }
}

fn join(v: &[Polynomial]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
