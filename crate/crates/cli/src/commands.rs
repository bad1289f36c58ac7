//! One function per subcommand, each returning checks plus a structured result.

use std::collections::BTreeMap;

use nforge_core::arith::{Polynomial, VarContext};
use nforge_core::ideal::{basis_strings, Budget, Ideal, MonomialOrder};
use nforge_core::neron::{build_adjoint_system, run_step, verify_step, Check, StepOutput};
use nforge_core::resolve::{self, ChainProblem, PrimeData, StepData};
use nforge_core::ring::{Frac, TargetRing};
use nforge_core::smooth::{self, FracMatrix, JacobianSystem, SystemSearch};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cache::{self, GroebnerCache, Lookup};
use crate::error::{CliError, Locate};
use crate::problem::{parse_all, parse_in, Options, Problem};
use crate::random;
use crate::report::Report;

pub const COMMANDS: [&str; 15] = [
    "groebner",
    "normal-form",
    "quotient",
    "radical-member",
    "jacobian",
    "delta",
    "elkik",
    "certify-smooth",
    "neron-step",
    "verify",
    "homogenize",
    "annihilator-ext",
    "lift",
    "adjoin",
    "resolve-chain",
];

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub result: Value,
    pub notes: Vec<String>,
    /// How the Gröbner cache answered, when it was consulted.
    pub cache: Option<Lookup>,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

fn strings(ps: &[Polynomial]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

pub fn run_command(cmd: &str, pb: &Problem, opts: &Options) -> Result<Outcome, CliError> {
    match cmd {
        "groebner" => groebner(pb, opts),
        "normal-form" => normal_form(pb, opts),
        "quotient" => quotient(pb, opts),
        "radical-member" => radical_member(pb, opts),
        "jacobian" => jacobian(pb, opts),
        "delta" => delta(pb),
        "elkik" => elkik(pb),
        "certify-smooth" => certify_smooth(pb),
        "neron-step" => neron_step(pb),
        "verify" => verify(pb, opts),
        "homogenize" => homogenize(pb),
        "annihilator-ext" => annihilator_ext(pb),
        "lift" => lift(pb),
        "adjoin" => adjoin(pb),
        "resolve-chain" => resolve_chain(pb),
        other => Err(CliError::schema("command", format!("unknown subcommand `{other}`"))),
    }
}

// ---- ideals ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdealSpec {
    #[serde(default)]
    ring: Option<String>,
    #[serde(default)]
    target: Option<String>,
    #[serde(default)]
    vars: Option<Vec<String>>,
    generators: Vec<String>,
}

/// An ideal in Q[vars], in a ring (relations added) or in a target (`(x)^N` added).
struct Ambient {
    ideal: Ideal,
    ctx: VarContext,
    gens: Vec<Polynomial>,
    target: Option<TargetRing>,
}

impl Ambient {
    fn element(&self, text: &str, loc: &str) -> Result<Polynomial, CliError> {
        let f = parse_in(text, &self.ctx, loc)?;
        Ok(match &self.target {
            Some(t) => t.reduce(&f),
            None => f,
        })
    }
}

fn ambient(pb: &Problem, spec: &IdealSpec, opts: &Options, loc: &str) -> Result<Ambient, CliError> {
    let gloc = format!("{loc}.generators");
    match (&spec.ring, &spec.target, &spec.vars) {
        (Some(r), None, None) => {
            let ring = pb.ring(r, loc)?;
            let ctx = ring.context();
            let gens = parse_all(&spec.generators, &ctx, &gloc)?;
            let mut all = gens.clone();
            all.extend(ring.all_relations());
            Ok(Ambient { ideal: ring.ideal_of(all), ctx, gens, target: None })
        }
        (None, Some(t), None) => {
            let target = pb.target(t, loc)?;
            let ctx = VarContext::new(target.vars().iter().cloned());
            let gens = parse_all(&spec.generators, &ctx, &gloc)?;
            Ok(Ambient { ideal: target.ideal(&gens), ctx, gens, target: Some(target.clone()) })
        }
        (None, None, Some(vars)) => {
            let ctx = VarContext::new(vars.iter().cloned());
            let gens = parse_all(&spec.generators, &ctx, &gloc)?;
            let order = MonomialOrder::new(opts.order, vars.iter().cloned());
            Ok(Ambient { ideal: Ideal::new(gens.clone(), order, Budget::with_degree(opts.degree_budget)), ctx, gens, target: None })
        }
        _ => Err(CliError::schema(loc, "an ideal needs exactly one of `ring`, `target`, `vars`")),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdealOnly {
    ideal: IdealSpec,
}

fn groebner(pb: &Problem, opts: &Options) -> Result<Outcome, CliError> {
    let loc = "commands.groebner";
    let p: IdealOnly = pb.params("groebner")?;
    let amb = ambient(pb, &p.ideal, opts, loc)?;
    let dir = cache::resolve_dir(opts.cache_dir.as_deref());
    let (gb, lookup) = match dir {
        Some(d) => {
            let (gb, how) = GroebnerCache::new(d).groebner(&amb.ideal).at(|| loc.into())?;
            (gb, Some(how))
        }
        None => (amb.ideal.groebner().at(|| loc.into())?, None),
    };
    let mut bad = Vec::new();
    for g in amb.ideal.generators() {
        if !gb.contains(g).at(|| loc.into())? {
            bad.push(g.to_string());
        }
    }
    let checks = vec![check(
        "generators reduce to zero",
        bad.is_empty(),
        if bad.is_empty() { format!("{} generators", amb.ideal.generators().len()) } else { format!("nonzero remainder: {}", bad.join(", ")) },
    )];
    let result = json!({
        "order": amb.ideal.order().descriptor(),
        "generators": strings(amb.ideal.generators()),
        "basis": basis_strings(gb),
    });
    Ok(Outcome { checks, result, notes: vec![], cache: lookup })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Elements {
    ideal: IdealSpec,
    elements: Vec<String>,
    #[serde(default)]
    expect: Option<Vec<bool>>,
}

fn normal_form(pb: &Problem, opts: &Options) -> Result<Outcome, CliError> {
    let loc = "commands.normal-form";
    let p: Elements = pb.params("normal-form")?;
    let amb = ambient(pb, &p.ideal, opts, loc)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, text) in p.elements.iter().enumerate() {
        let f = amb.element(text, &format!("{loc}.elements[{i}]"))?;
        let (rem, cert) = amb.ideal.normal_form(&f).at(|| loc.into())?;
        let ok = cert.verify(&f, amb.ideal.generators()) && cert.remainder == rem;
        checks.push(check(format!("certificate for element {}", i + 1), ok, format!("{f} = Σ c_i g_i + ({rem})")));
        rows.push(json!({"element": f.to_string(), "remainder": rem.to_string(), "member": rem.is_zero(), "certificate": to_json(&cert)}));
    }
    let result = json!({"generators": strings(amb.ideal.generators()), "order": amb.ideal.order().descriptor(), "elements": rows});
    Ok(Outcome { checks, result, ..Outcome::default() })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientParams {
    ideal: IdealSpec,
    by: Vec<String>,
}

fn quotient(pb: &Problem, opts: &Options) -> Result<Outcome, CliError> {
    let loc = "commands.quotient";
    let p: QuotientParams = pb.params("quotient")?;
    let amb = ambient(pb, &p.ideal, opts, loc)?;
    let by: Vec<Polynomial> = p.by.iter().enumerate().map(|(i, t)| amb.element(t, &format!("{loc}.by[{i}]"))).collect::<Result<_, _>>()?;
    let j = Ideal::new(by.clone(), amb.ideal.order().clone(), amb.ideal.budget());
    let q = amb.ideal.quotient(&j).at(|| loc.into())?;
    let basis = q.reduced_basis().at(|| loc.into())?;
    let mut sound = true;
    for a in &basis {
        for b in &by {
            sound &= amb.ideal.contains(&(a * b)).at(|| loc.into())?;
        }
    }
    let mut contains = true;
    for g in amb.ideal.generators() {
        contains &= q.contains(g).at(|| loc.into())?;
    }
    let checks = vec![
        check("J (I : J) ⊆ I", sound, format!("{} x {} products", basis.len(), by.len())),
        check("I ⊆ (I : J)", contains, format!("{} generators", amb.ideal.generators().len())),
    ];
    Ok(Outcome { checks, result: json!({"quotient": strings(&basis), "order": q.order().descriptor()}), ..Outcome::default() })
}

fn radical_member(pb: &Problem, opts: &Options) -> Result<Outcome, CliError> {
    let loc = "commands.radical-member";
    let p: Elements = pb.params("radical-member")?;
    let amb = ambient(pb, &p.ideal, opts, loc)?;
    if let Some(e) = &p.expect {
        if e.len() != p.elements.len() {
            return Err(CliError::schema(loc, "`expect` must match `elements`"));
        }
    }
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, text) in p.elements.iter().enumerate() {
        let f = amb.element(text, &format!("{loc}.elements[{i}]"))?;
        let rm = match &amb.target {
            Some(t) => t.radical_membership(&amb.gens, &f),
            None => amb.ideal.radical_membership(&f, opts.degree_budget),
        }
        .at(|| loc.into())?;
        let mut row = json!({"element": f.to_string(), "membership": to_json(&rm)});
        if let Some(k) = rm.exponent {
            let power = match &amb.target {
                Some(t) => t.reduce(&f.pow(k)),
                None => f.pow(k),
            };
            let (rem, cert) = amb.ideal.normal_form(&power).at(|| loc.into())?;
            let ok = rem.is_zero() && cert.verify(&power, amb.ideal.generators());
            checks.push(check(format!("element {}: f^{k} ∈ I certified", i + 1), ok, format!("f = {f}")));
            row["certificate"] = to_json(&cert);
        } else {
            let how = if rm.member { "Rabinowitsch test, no power within the budget" } else { "outside the radical" };
            checks.push(check(format!("element {}: decision", i + 1), true, format!("{how}: f = {f}")));
        }
        if let Some(e) = &p.expect {
            checks.push(check(format!("element {}: expected", i + 1), rm.member == e[i], format!("member = {}, expected {}", rm.member, e[i])));
        }
        rows.push(row);
    }
    Ok(Outcome { checks, result: json!({"generators": strings(amb.ideal.generators()), "elements": rows}), ..Outcome::default() })
}

// ---- smooth locus ----

/// `(∂f/∂Y) G = (M N Id_r | 0)`, recomputed from derivatives and a plain
/// matrix product.
pub fn jacobian_identity(sys: &JacobianSystem, g: &FracMatrix, j: usize) -> bool {
    let n = sys.n();
    let r = sys.r();
    let mn = sys.witnesses[j].mul_poly(&sys.minors[j]);
    if g.len() != n || g.iter().any(|row| row.len() != n) {
        return false;
    }
    for (i, f) in sys.f.iter().enumerate() {
        let grad: Vec<Polynomial> = sys.vars.iter().map(|y| f.derivative(y)).collect();
        for c in 0..n {
            let entry = (0..n).fold(Frac::zero(), |acc, k| acc.add(&g[k][c].mul_poly(&grad[k])));
            let expected = if i == c && c < r { mn.clone() } else { Frac::zero() };
            if entry != expected {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomSpec {
    count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JacobianParams {
    #[serde(default)]
    system: Option<String>,
    #[serde(default)]
    random: Option<RandomSpec>,
}

fn jacobian(pb: &Problem, opts: &Options) -> Result<Outcome, CliError> {
    let loc = "commands.jacobian";
    let p: JacobianParams = pb.params("jacobian")?;
    let mut checks = Vec::new();
    let mut result = serde_json::Map::new();
    if let Some(name) = &p.system {
        let sys = pb.system(name, loc)?;
        let b = pb.ring(&pb.system_rings[name], loc)?;
        match sys.check_in_ideal(b) {
            Ok(c) => {
                let ok = c.iter().zip(&sys.f).all(|(c, f)| c.verify(f, &b.all_relations()));
                checks.push(check("system in I", ok, format!("{} certificates", c.len())));
                result.insert("system_certificates".into(), to_json(&c));
            }
            Err(e) => checks.push(check("system in I", false, e.to_string())),
        }
        let witness = sys.witness_certificates(b).at(|| loc.into())?;
        let rels: Vec<Polynomial> = sys.f.iter().cloned().chain(b.base.relations().iter().cloned()).collect();
        for (j, row) in witness.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                let q = &b.relations[k];
                let ok = c.as_ref().is_some_and(|c| c.verify(&(sys.witnesses[j].num() * q), &rels));
                checks.push(check(format!("witness N_{} in ((f):I) on generator {}", j + 1, k + 1), ok, format!("N = {}", sys.witnesses[j])));
            }
        }
        result.insert("witness_certificates".into(), to_json(&witness));
        match sys.verify_d_congruence(b) {
            Ok(c) => {
                let ok = c.verify(sys.d.sub(&sys.p).num(), &b.all_relations());
                checks.push(check("d ≡ P mod I", ok, format!("P = {}", sys.p)));
                result.insert("congruence_certificate".into(), to_json(&c));
            }
            Err(e) => checks.push(check("d ≡ P mod I", false, e.to_string())),
        }
        match build_adjoint_system(sys) {
            Ok(gs) => {
                for (j, g) in gs.iter().enumerate() {
                    checks.push(check(format!("(∂f/∂Y) G_{} = (M N Id | 0)", j + 1), jacobian_identity(sys, g, j), format!("M = {}", sys.minors[j])));
                }
                result.insert("adjoints".into(), json!(gs.iter().map(smooth::matrix::frac_strings).collect::<Vec<_>>()));
            }
            Err(e) => checks.push(check("adjoint identities", false, e.to_string())),
        }
        result.insert("system".into(), to_json(sys));
        result.insert("jacobian".into(), json!(smooth::matrix::to_strings(&smooth::jacobian(&sys.f, &sys.vars))));
        result.insert("minors".into(), json!(strings(&sys.minors)));
        result.insert("p".into(), json!(sys.p.to_string()));
    }
    if let Some(r) = &p.random {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut systems = Vec::new();
        for i in 0..r.count {
            let (_, sys) = random::jacobian_system(&mut rng, random::Shape::default()).at(|| loc.into())?;
            let ok = build_adjoint_system(&sys).is_ok_and(|gs| gs.iter().enumerate().all(|(j, g)| jacobian_identity(&sys, g, j)));
            checks.push(check(format!("random system {}", i + 1), ok, format!("n = {}, r = {}, f = [{}]", sys.n(), sys.r(), strings(&sys.f).join(", "))));
            systems.push(json!({"vars": sys.vars, "f": strings(&sys.f), "witnesses": to_json(&sys.witnesses)}));
        }
        result.insert("random".into(), json!({"seed": opts.seed, "systems": systems}));
    }
    if p.system.is_none() && p.random.is_none() {
        return Err(CliError::schema(loc, "give `system` or `random`"));
    }
    Ok(Outcome { checks, result: Value::Object(result), ..Outcome::default() })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaParams {
    ring: String,
    f: Vec<String>,
}

fn delta(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.delta";
    let p: DeltaParams = pb.params("delta")?;
    let b = pb.ring(&p.ring, loc)?;
    let f = parse_all(&p.f, &b.context(), &format!("{loc}.f"))?;
    let ideal = smooth::delta_ideal(b, &f).at(|| loc.into())?;
    let minors: Vec<Value> = smooth::completed_minors(&f, &b.vars).into_iter().map(|(c, m)| json!({"unit_columns": c, "minor": m.to_string()})).collect();
    let mut checks = Vec::new();
    for (i, g) in f.iter().enumerate() {
        let ok = b.contains(g).at(|| loc.into())?;
        checks.push(check(format!("f_{} in I", i + 1), ok, g.to_string()));
    }
    Ok(Outcome { checks, result: json!({"minors": minors, "generators": strings(ideal.generators())}), ..Outcome::default() })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemsParams {
    ring: String,
    #[serde(default)]
    systems: Vec<Vec<String>>,
}

fn systems_of(pb: &Problem, p: &SystemsParams, loc: &str) -> Result<Vec<Vec<Polynomial>>, CliError> {
    let b = pb.ring(&p.ring, loc)?;
    p.systems.iter().enumerate().map(|(i, s)| parse_all(s, &b.context(), &format!("{loc}.systems[{i}]"))).collect()
}

const SEARCH_NOTE: &str = "the ideal sums over the listed systems, or generator subsets when none are listed; it can be smaller than the full smooth-locus ideal";

fn elkik(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.elkik";
    let p: SystemsParams = pb.params("elkik")?;
    let b = pb.ring(&p.ring, loc)?;
    let systems = systems_of(pb, &p, loc)?;
    let h = smooth::elkik_ideal(b, &systems, SystemSearch::default()).at(|| loc.into())?;
    let used: Vec<Vec<String>> = h.systems.iter().map(|s| strings(s)).collect();
    let checks = vec![check("every system lies in I", true, format!("{} systems", used.len()))];
    Ok(Outcome {
        checks,
        result: json!({"systems": used, "generators": strings(h.ideal.generators())}),
        notes: vec![SEARCH_NOTE.into()],
        cache: None,
    })
}

fn certify_smooth(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.certify-smooth";
    let p: SystemsParams = pb.params("certify-smooth")?;
    let b = pb.ring(&p.ring, loc)?;
    let systems = systems_of(pb, &p, loc)?;
    let search = SystemSearch::default();
    let tried = smooth::candidate_systems(b, &systems, search).len();
    match smooth::certify_standard_smooth(b, &systems, search).at(|| loc.into())? {
        Some(cert) => Ok(Outcome {
            checks: vec![check("P + Σ c_i I_i = 1", cert.verify(b), format!("system [{}]", strings(&cert.system.f).join(", ")))],
            result: to_json(&cert),
            ..Outcome::default()
        }),
        None => Ok(Outcome {
            checks: vec![check("standard smoothness certified", false, format!("NotCertified: no representation of 1 from {tried} candidate systems"))],
            result: json!({"certified": false, "candidates": tried}),
            notes: vec!["an exhausted search proves nothing about smoothness".into()],
            cache: None,
        }),
    }
}

// ---- the step ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepParams {
    step: String,
}

fn neron_step(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.neron-step";
    let p: StepParams = pb.params("neron-step")?;
    let input = pb.step(&p.step, loc)?;
    let report = run_step(input);
    let mut checks = report.checks.clone();
    if let Some(f) = &report.failure {
        checks.push(check("step completed", false, f.clone()));
    }
    Ok(Outcome { checks, result: to_json(&report), ..Outcome::default() })
}

/// Re-runs the independent checks on a step output, either from an emitted
/// report or from a fresh run passed through its own serialization.
fn verify(pb: &Problem, opts: &Options) -> Result<Outcome, CliError> {
    let loc = "commands.verify";
    let p: StepParams = pb.params("verify")?;
    let input = pb.step(&p.step, loc)?;
    let (output, embedded, source) = match &opts.report {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
            let report: Report = serde_json::from_str(&text).map_err(|e| CliError::schema("--report", e.to_string()))?;
            let output = report.result.get("output").cloned().ok_or_else(|| CliError::schema("--report", "no step output in the report"))?;
            (output, report.checks, path.display().to_string())
        }
        None => {
            let report = run_step(input);
            let output = to_json(&report.output.ok_or_else(|| CliError::schema(loc, report.failure.unwrap_or_default()))?);
            (output, report.checks, "fresh run".to_string())
        }
    };
    let out: StepOutput = serde_json::from_value(output).map_err(|e| CliError::schema(format!("{loc} output"), e.to_string()))?;
    let mut checks = verify_step(input, &out);
    let by_name: BTreeMap<&str, &Check> = embedded.iter().map(|c| (c.name.as_str(), c)).collect();
    let mismatched: Vec<String> = checks.iter().filter(|c| by_name.get(c.name.as_str()) != Some(&c)).map(|c| c.name.clone()).collect();
    checks.push(check(
        "embedded table reproduced",
        mismatched.is_empty(),
        if mismatched.is_empty() { format!("{} checks from {source}", checks.len()) } else { format!("differs: {}", mismatched.join("; ")) },
    ));
    Ok(Outcome { checks, result: json!({"source": source}), ..Outcome::default() })
}

// ---- resolution ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HomogenizeParams {
    b: String,
    v: String,
    z_vars: Vec<String>,
    g: Vec<String>,
    z: Vec<String>,
    z0: String,
    #[serde(default)]
    a: Option<String>,
}

fn target_ctx(pb: &Problem, v: &str, loc: &str) -> Result<(VarContext, TargetRing), CliError> {
    let m = pb.morphism(v, loc)?;
    let t = m.target().ok_or_else(|| CliError::schema(loc, format!("`{v}` must land in a target")))?;
    Ok((VarContext::new(t.vars().iter().cloned()), t.clone()))
}

fn homogenize(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.homogenize";
    let p: HomogenizeParams = pb.params("homogenize")?;
    let b = pb.ring(&p.b, loc)?;
    let v = pb.morphism(&p.v, loc)?;
    let (tctx, _) = target_ctx(pb, &p.v, loc)?;
    let g = parse_all(&p.g, &b.context().extend(p.z_vars.iter().cloned()), &format!("{loc}.g"))?;
    let z = parse_all(&p.z, &tctx, &format!("{loc}.z"))?;
    let z0 = parse_in(&p.z0, &tctx, &format!("{loc}.z0"))?;
    let a = p.a.as_ref().map(|a| parse_in(a, &tctx, &format!("{loc}.a"))).transpose()?;
    let data = resolve::homogenize_and_clear(b, v, &p.z_vars, &g, &z, &z0, a.as_ref()).at(|| loc.into())?;
    Ok(Outcome { checks: data.checks.clone(), result: to_json(&data), ..Outcome::default() })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnihilatorParams {
    b: String,
    v: String,
    #[serde(default)]
    z_vars: Vec<String>,
    #[serde(default)]
    g: Vec<String>,
    #[serde(default)]
    z: Vec<String>,
    h_b: Vec<String>,
    k: u32,
    w: String,
}

fn annihilator_ext(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.annihilator-ext";
    let p: AnnihilatorParams = pb.params("annihilator-ext")?;
    let b = pb.ring(&p.b, loc)?;
    let v = pb.morphism(&p.v, loc)?;
    let (tctx, _) = target_ctx(pb, &p.v, loc)?;
    let g = parse_all(&p.g, &b.context().extend(p.z_vars.iter().cloned()), &format!("{loc}.g"))?;
    let z = parse_all(&p.z, &tctx, &format!("{loc}.z"))?;
    let h_b = parse_all(&p.h_b, &b.context(), &format!("{loc}.h_b"))?;
    let w = parse_in(&p.w, &tctx, &format!("{loc}.w"))?;
    let ext = resolve::annihilator_extension(b, v, &p.z_vars, &g, &z, &h_b, p.k, &w).at(|| loc.into())?;
    Ok(Outcome { checks: ext.checks.clone(), result: to_json(&ext), ..Outcome::default() })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftParams {
    ring: String,
    target: String,
    z_vars: Vec<String>,
    g: Vec<String>,
    z: Vec<String>,
    d: String,
    e: u32,
}

fn lift(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.lift";
    let p: LiftParams = pb.params("lift")?;
    let base = &pb.ring(&p.ring, loc)?.base;
    let target = pb.target(&p.target, loc)?;
    let tctx = VarContext::new(target.vars().iter().cloned());
    let g = parse_all(&p.g, &base.context().extend(p.z_vars.iter().cloned()), &format!("{loc}.g"))?;
    let z = parse_all(&p.z, &tctx, &format!("{loc}.z"))?;
    let d = parse_in(&p.d, &base.context(), &format!("{loc}.d"))?;
    let lifted = resolve::lift_mod_power(base, target, &p.z_vars, &g, &z, &d, p.e).at(|| loc.into())?;
    Ok(Outcome { checks: lifted.checks.clone(), result: to_json(&lifted), ..Outcome::default() })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdjoinParams {
    b: String,
    v: String,
    params: Vec<(String, String)>,
}

fn adjoin(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.adjoin";
    let p: AdjoinParams = pb.params("adjoin")?;
    let b = pb.ring(&p.b, loc)?;
    let v = pb.morphism(&p.v, loc)?;
    let (tctx, target) = target_ctx(pb, &p.v, loc)?;
    let params = p
        .params
        .iter()
        .enumerate()
        .map(|(i, (n, t))| Ok((n.clone(), parse_in(t, &tctx, &format!("{loc}.params[{i}]"))?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let (ext, ext_v, incl) = resolve::adjoin_parameters(b, v, &params).at(|| loc.into())?;
    let incl_ok = incl.validate();
    let agree = b.vars.iter().all(|y| {
        let via = ext_v.apply(incl.image(y).unwrap_or(&Polynomial::zero()));
        target.reduce(&(&via - v.image(y).unwrap_or(&Polynomial::zero()))).is_zero()
    });
    let checks = vec![
        check("extended map well-defined", true, format!("{} parameters", params.len())),
        check("inclusion well-defined", incl_ok.is_ok(), incl_ok.err().map_or("relations map to relations".into(), |e| e.to_string())),
        check("extension restricts to v", agree, "Y images agree"),
    ];
    Ok(Outcome { checks, result: json!({"ring": to_json(&ext), "map": to_json(&ext_v), "inclusion": to_json(&incl)}), ..Outcome::default() })
}

fn maximal() -> PrimeData {
    PrimeData::Maximal
}

fn eight() -> usize {
    8
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainParams {
    b: String,
    v: String,
    #[serde(default)]
    systems: Vec<Vec<String>>,
    #[serde(default = "maximal")]
    prime: PrimeData,
    #[serde(default = "eight")]
    max_iterations: usize,
    /// Step data per iteration; running out stalls the chain.
    #[serde(default)]
    steps: Vec<String>,
}

fn resolve_chain(pb: &Problem) -> Result<Outcome, CliError> {
    let loc = "commands.resolve-chain";
    let p: ChainParams = pb.params("resolve-chain")?;
    let b = pb.ring(&p.b, loc)?.clone();
    let v = pb.morphism(&p.v, loc)?.clone();
    let systems = p.systems.iter().enumerate().map(|(i, s)| parse_all(s, &b.context(), &format!("{loc}.systems[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    let mut steps = Vec::new();
    for name in &p.steps {
        let s = pb.step(name, loc)?;
        steps.push(StepData {
            system: s.system.clone(),
            d_ring: s.d_ring.clone(),
            d_system: s.d_system.clone(),
            omega: s.omega.clone(),
            y_prime: s.y_prime.clone(),
            e_floor: s.e_floor,
        });
    }
    let problem = ChainProblem { b, v, systems, prime: p.prime, max_iterations: p.max_iterations };
    let report = resolve::resolve_chain(&problem, &mut steps).at(|| loc.into())?;
    let mut checks = report.checks.clone();
    for it in report.iterations.iter().skip(1) {
        let grows = it.witness_here.is_some_and(|m| m.member)
            && it.witness_before.is_some_and(|m| !m.member)
            && it.contains_previous.iter().all(|m| m.member);
        let w = it.witness.as_ref().map_or("none".to_string(), |w| w.to_string());
        checks.push(check(format!("iteration {} enlarges the radical", it.index), grows, format!("witness {w}")));
    }
    for it in &report.iterations {
        if let Some(u) = &it.unit {
            checks.push(check(
                format!("iteration {}: 1 ∈ ideal certified", it.index),
                u.certificate.is_member() && u.certificate.verify(&Polynomial::one(), &u.generators),
                format!("{} generators", u.generators.len()),
            ));
        }
    }
    Ok(Outcome { checks, result: to_json(&report), ..Outcome::default() })
}
