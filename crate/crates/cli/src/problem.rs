//! Problem files: declarations of rings, targets, morphisms, systems and step
//! contexts, resolved in order and validated on load.

use std::collections::BTreeMap;
use std::path::PathBuf;

use nforge_core::arith::{parse_polynomial, rational, Polynomial, TruncationOrder, VarContext};
use nforge_core::ideal::{Budget, OrderKind};
use nforge_core::neron::StepInput;
use nforge_core::ring::{AlgebraMorphism, BaseRing, FinitePresentation, Frac, MorphismCertificate, Settings, TargetRing};
use nforge_core::smooth::JacobianSystem;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, Locate};

pub const DEFAULT_TRUNCATION: u32 = 12;

#[derive(Debug, Clone)]
pub struct Options {
    /// Overrides the order of every truncated target when set.
    pub truncation_order: Option<u32>,
    pub order: OrderKind,
    pub degree_budget: u32,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
    /// A previously emitted step report, for `verify`.
    pub report: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Self { truncation_order: None, order: OrderKind::DegRevLex, degree_budget: 24, cache_dir: None, seed: 0, report: None }
    }
}

impl Options {
    pub fn settings(&self) -> Settings {
        Settings { order: self.order, budget: Budget::with_degree(self.degree_budget) }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub rings: Vec<RingDecl>,
    #[serde(default)]
    pub targets: Vec<TargetDecl>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub systems: Vec<SystemDecl>,
    #[serde(default)]
    pub steps: Vec<StepDecl>,
    /// Parameters per subcommand.
    #[serde(default)]
    pub commands: BTreeMap<String, Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDecl {
    pub kind: String,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub prime: Vec<String>,
}

/// Either `base` (a fresh A) or `over` (the A of an earlier ring).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDecl {
    pub name: String,
    #[serde(default)]
    pub base: Option<BaseDecl>,
    #[serde(default)]
    pub over: Option<String>,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDecl {
    pub name: String,
    pub kind: String,
    pub vars: Vec<String>,
    #[serde(default)]
    pub order: Option<u32>,
    #[serde(default)]
    pub structure: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ImageSpec {
    Expr(String),
    /// `times * sqrt(sqrt)` in a truncated target; the radicand needs constant term 1.
    Sqrt {
        sqrt: String,
        #[serde(default)]
        times: Option<String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub name: String,
    pub source: String,
    /// A target or a ring.
    pub target: String,
    #[serde(default)]
    pub images: BTreeMap<String, ImageSpec>,
    #[serde(default)]
    pub precision: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FracSpec {
    Poly(String),
    Frac { num: String, den: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDecl {
    pub name: String,
    pub ring: String,
    pub f: Vec<String>,
    pub unit_columns: Vec<Vec<usize>>,
    pub witnesses: Vec<FracSpec>,
    pub d: FracSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDecl {
    pub name: String,
    pub b: String,
    pub v: String,
    pub system: String,
    pub d_ring: String,
    #[serde(default)]
    pub d_system: Option<String>,
    pub omega: String,
    pub y_prime: Vec<FracSpec>,
    #[serde(default = "one")]
    pub e_floor: u32,
}

fn one() -> u32 {
    1
}

/// The resolved object graph.
#[derive(Debug, Default)]
pub struct Problem {
    pub rings: BTreeMap<String, FinitePresentation>,
    pub targets: BTreeMap<String, TargetRing>,
    pub morphisms: BTreeMap<String, AlgebraMorphism>,
    /// Certificates from validating each morphism on load.
    pub morphism_certificates: BTreeMap<String, MorphismCertificate>,
    pub systems: BTreeMap<String, JacobianSystem>,
    pub system_rings: BTreeMap<String, String>,
    pub steps: BTreeMap<String, StepInput>,
    pub commands: BTreeMap<String, Value>,
}

pub fn parse_in(text: &str, ctx: &VarContext, loc: &str) -> Result<Polynomial, CliError> {
    parse_polynomial(text, ctx).at(|| format!("{loc}: `{text}`"))
}

pub fn parse_all(texts: &[String], ctx: &VarContext, loc: &str) -> Result<Vec<Polynomial>, CliError> {
    texts.iter().enumerate().map(|(i, t)| parse_in(t, ctx, &format!("{loc}[{i}]"))).collect()
}

pub fn parse_frac(spec: &FracSpec, ctx: &VarContext, loc: &str) -> Result<Frac, CliError> {
    match spec {
        FracSpec::Poly(t) => Ok(Frac::from(parse_in(t, ctx, loc)?)),
        FracSpec::Frac { num, den } => {
            let n = parse_in(num, ctx, &format!("{loc}.num"))?;
            let d = parse_in(den, ctx, &format!("{loc}.den"))?;
            Frac::new(n, d).at(|| loc.to_string())
        }
    }
}

/// `f^(1/2)` in a truncated target by Newton iteration from 1.
pub fn series_sqrt(target: &TargetRing, f: &Polynomial) -> nforge_core::error::Result<Polynomial> {
    let n = target.precision().ok_or_else(|| nforge_core::error::Error::Invalid("sqrt needs a truncated target".into()))?;
    let f = target.reduce(f);
    if f.constant_term() != rational(1, 1) {
        return Err(nforge_core::error::Error::Invalid(format!("sqrt needs constant term 1, got {f}")));
    }
    let half = rational(1, 2);
    let mut r = Polynomial::one();
    // precision doubles per round
    for _ in 0..=(32 - n.leading_zeros()) + 1 {
        let q = target.mul(&f, &target.inverse(&r)?);
        r = (&r + &q).scale(&half);
    }
    Ok(target.reduce(&r))
}

impl Problem {
    pub fn ring(&self, name: &str, loc: &str) -> Result<&FinitePresentation, CliError> {
        self.rings.get(name).ok_or_else(|| CliError::schema(loc, format!("undeclared ring `{name}`")))
    }

    pub fn target(&self, name: &str, loc: &str) -> Result<&TargetRing, CliError> {
        self.targets.get(name).ok_or_else(|| CliError::schema(loc, format!("undeclared target `{name}`")))
    }

    pub fn morphism(&self, name: &str, loc: &str) -> Result<&AlgebraMorphism, CliError> {
        self.morphisms.get(name).ok_or_else(|| CliError::schema(loc, format!("undeclared morphism `{name}`")))
    }

    pub fn system(&self, name: &str, loc: &str) -> Result<&JacobianSystem, CliError> {
        self.systems.get(name).ok_or_else(|| CliError::schema(loc, format!("undeclared system `{name}`")))
    }

    pub fn step(&self, name: &str, loc: &str) -> Result<&StepInput, CliError> {
        self.steps.get(name).ok_or_else(|| CliError::schema(loc, format!("undeclared step `{name}`")))
    }

    /// Parameters of one subcommand, deserialized.
    pub fn params<T: for<'de> Deserialize<'de>>(&self, command: &str) -> Result<T, CliError> {
        let loc = format!("commands.{command}");
        let v = self.commands.get(command).cloned().ok_or_else(|| CliError::schema(&loc, "missing parameters"))?;
        serde_json::from_value(v).map_err(|e| CliError::schema(loc, e.to_string()))
    }

    fn claim(&self, name: &str, loc: &str) -> Result<(), CliError> {
        let taken = self.rings.contains_key(name)
            || self.targets.contains_key(name)
            || self.morphisms.contains_key(name)
            || self.systems.contains_key(name)
            || self.steps.contains_key(name);
        if taken {
            return Err(CliError::schema(loc, format!("duplicate name `{name}`")));
        }
        Ok(())
    }
}

pub fn load_str(text: &str, opts: &Options) -> Result<Problem, CliError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::schema("problem file", e.to_string()))?;
    resolve(file, opts)
}

pub fn load_problem(path: &std::path::Path, opts: &Options) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    load_str(&text, opts)
}

fn base_ring(decl: &BaseDecl, opts: &Options, loc: &str) -> Result<BaseRing, CliError> {
    let ctx = VarContext::new(decl.vars.iter().cloned());
    let base = match decl.kind.as_str() {
        "field" => {
            if !decl.vars.is_empty() {
                return Err(CliError::schema(loc, "a field base takes no variables"));
            }
            BaseRing::field()
        }
        "polynomial" => BaseRing::polynomial(decl.vars.clone()),
        "quotient" => BaseRing::quotient(decl.vars.clone(), parse_all(&decl.relations, &ctx, &format!("{loc}.relations"))?),
        "localized" => {
            if decl.prime.is_empty() {
                return Err(CliError::schema(loc, "a localized base needs prime generators"));
            }
            BaseRing::localized(decl.vars.clone(), parse_all(&decl.prime, &ctx, &format!("{loc}.prime"))?)
        }
        other => return Err(CliError::schema(loc, format!("unknown base kind `{other}`"))),
    };
    Ok(base.with_settings(opts.settings()))
}

fn resolve(file: ProblemFile, opts: &Options) -> Result<Problem, CliError> {
    if file.rings.is_empty() {
        return Err(CliError::schema("rings", "at least one ring must be declared"));
    }
    let mut pb = Problem { commands: file.commands, ..Problem::default() };

    for (i, r) in file.rings.iter().enumerate() {
        let loc = format!("rings[{i}] `{}`", r.name);
        pb.claim(&r.name, &loc)?;
        let base = match (&r.base, &r.over) {
            (Some(b), None) => base_ring(b, opts, &loc)?,
            (None, Some(o)) => {
                let under = pb.ring(o, &loc)?;
                if !under.vars.is_empty() {
                    return Err(CliError::schema(&loc, format!("`over` must name a base ring, `{o}` has variables")));
                }
                under.base.clone()
            }
            _ => return Err(CliError::schema(&loc, "exactly one of `base` and `over` is required")),
        };
        let ctx = base.context().extend(r.vars.iter().cloned());
        let rels = parse_all(&r.relations, &ctx, &format!("{loc}.relations"))?;
        let p = FinitePresentation::new(base, r.vars.clone(), rels).at(|| loc.clone())?;
        pb.rings.insert(r.name.clone(), p);
    }

    for (i, t) in file.targets.iter().enumerate() {
        let loc = format!("targets[{i}] `{}`", t.name);
        pb.claim(&t.name, &loc)?;
        let ctx = VarContext::new(t.vars.iter().cloned());
        let mut target = match t.kind.as_str() {
            "truncated" => {
                let n = opts.truncation_order.or(t.order).unwrap_or(DEFAULT_TRUNCATION);
                TargetRing::truncated(t.vars.clone(), TruncationOrder::new(n).at(|| loc.clone())?)
            }
            "exact" => TargetRing::exact(t.vars.clone()),
            other => return Err(CliError::schema(&loc, format!("unknown target kind `{other}`"))),
        };
        for (var, img) in &t.structure {
            target.structure.insert(var.clone(), parse_in(img, &ctx, &format!("{loc}.structure.{var}"))?);
        }
        pb.targets.insert(t.name.clone(), target);
    }

    for (i, m) in file.morphisms.iter().enumerate() {
        let loc = format!("morphisms[{i}] `{}`", m.name);
        pb.claim(&m.name, &loc)?;
        let source = pb.ring(&m.source, &loc)?.clone();
        let morphism = if let Some(target) = pb.targets.get(&m.target) {
            let ctx = VarContext::new(target.vars().iter().cloned());
            let mut images = BTreeMap::new();
            for (var, spec) in &m.images {
                let iloc = format!("{loc}.images.{var}");
                let img = match spec {
                    ImageSpec::Expr(t) => parse_in(t, &ctx, &iloc)?,
                    ImageSpec::Sqrt { sqrt, times } => {
                        let root = series_sqrt(target, &parse_in(sqrt, &ctx, &iloc)?).at(|| iloc.clone())?;
                        match times {
                            Some(t) => target.mul(&parse_in(t, &ctx, &iloc)?, &root),
                            None => root,
                        }
                    }
                };
                images.insert(var.clone(), target.reduce(&img));
            }
            AlgebraMorphism::to_target(source, target.clone(), images).at(|| loc.clone())?
        } else if let Some(ring) = pb.rings.get(&m.target) {
            let ctx = ring.context();
            let mut images = BTreeMap::new();
            for (var, spec) in &m.images {
                let ImageSpec::Expr(t) = spec else {
                    return Err(CliError::schema(&loc, "sqrt images need a truncated target"));
                };
                images.insert(var.clone(), parse_in(t, &ctx, &format!("{loc}.images.{var}"))?);
            }
            AlgebraMorphism::to_presentation(source, ring.clone(), images).at(|| loc.clone())?
        } else {
            return Err(CliError::schema(&loc, format!("undeclared target `{}`", m.target)));
        };
        let morphism = match m.precision {
            Some(p) => morphism.with_precision(p),
            None => morphism,
        };
        let cert = morphism.validate().at(|| loc.clone())?;
        pb.morphism_certificates.insert(m.name.clone(), cert);
        pb.morphisms.insert(m.name.clone(), morphism);
    }

    for (i, s) in file.systems.iter().enumerate() {
        let loc = format!("systems[{i}] `{}`", s.name);
        pb.claim(&s.name, &loc)?;
        let ring = pb.ring(&s.ring, &loc)?;
        let ctx = ring.context();
        let f = parse_all(&s.f, &ctx, &format!("{loc}.f"))?;
        let witnesses = s
            .witnesses
            .iter()
            .enumerate()
            .map(|(k, w)| parse_frac(w, &ctx, &format!("{loc}.witnesses[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let d = parse_frac(&s.d, &ring.base.context(), &format!("{loc}.d"))?;
        let sys = JacobianSystem::new(ring, f, s.unit_columns.clone(), witnesses, d).at(|| loc.clone())?;
        pb.systems.insert(s.name.clone(), sys);
        pb.system_rings.insert(s.name.clone(), s.ring.clone());
    }

    for (i, s) in file.steps.iter().enumerate() {
        let loc = format!("steps[{i}] `{}`", s.name);
        pb.claim(&s.name, &loc)?;
        let b = pb.ring(&s.b, &loc)?.clone();
        let v = pb.morphism(&s.v, &loc)?.clone();
        let system = pb.system(&s.system, &loc)?.clone();
        let d_ring = pb.ring(&s.d_ring, &loc)?.clone();
        let d_system = match &s.d_system {
            Some(n) => Some(pb.system(n, &loc)?.clone()),
            None => None,
        };
        let omega = pb.morphism(&s.omega, &loc)?.clone();
        for (role, name, ring) in [("v", &s.v, &s.b), ("omega", &s.omega, &s.d_ring)] {
            if pb.morphisms[name].source != pb.rings[ring] {
                return Err(CliError::schema(&loc, format!("`{role}` does not start at `{ring}`")));
            }
        }
        if pb.system_rings[&s.system] != s.b {
            return Err(CliError::schema(&loc, format!("system `{}` is not declared over `{}`", s.system, s.b)));
        }
        let ctx = d_ring.context();
        let y_prime = s
            .y_prime
            .iter()
            .enumerate()
            .map(|(k, y)| parse_frac(y, &ctx, &format!("{loc}.y_prime[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        pb.steps.insert(s.name.clone(), StepInput { b, v, system, d_ring, d_system, omega, y_prime, e_floor: s.e_floor });
    }
    Ok(pb)
}
