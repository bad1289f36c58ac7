//! Acceptance run: one line per criterion, then a single assertion.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use nforge_cli::{execute_str, random, Options, Report};
use nforge_core::arith::{rational, Polynomial, Rational};
use nforge_core::ideal::{Budget, Ideal, MembershipCertificate, MonomialOrder};
use nforge_core::neron::{build_adjoint_system, instances, run_step};
use nforge_core::resolve::{annihilator_extension, homogenize_and_clear, is_homogeneous};
use nforge_core::ring::{BaseRing, FinitePresentation, Frac, TargetRing};
use nforge_core::serde_poly::parse_free;
use nforge_core::smooth::{certify_standard_smooth, JacobianSystem, SystemSearch};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Polynomial {
    parse_free(s).unwrap()
}

fn problem_text(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)).unwrap()
}

fn say(line: &str) {
    // bypasses the harness capture so the table always shows
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// Every machine report produced along the way, for the determinism rerun.
#[derive(Default)]
struct Runs {
    done: Vec<(String, String, Options, String)>,
}

impl Runs {
    fn run(&mut self, cmd: &str, text: &str) -> Report {
        let opts = Options::default();
        let (r, _) = execute_str(cmd, text, &opts);
        self.done.push((cmd.to_string(), text.to_string(), opts, r.to_json()));
        r
    }
}

/// `Σ c_i g_i + r == f`, multiplied out here.
fn multiplies_back(f: &Polynomial, gens: &[Polynomial], c: &MembershipCertificate) -> bool {
    c.cofactors.len() == gens.len() && c.cofactors.iter().zip(gens).fold(c.remainder.clone(), |acc, (a, g)| &acc + &(a * g)) == *f
}

/// Coefficients of r with r^2 = 1 + t from the convolution, degree by degree.
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

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    for i in 0..200 {
        let (vars, gens) = oracle::random::ideal(&mut rng);
        if let Err(e) = oracle::agree_at_degree(&mut rng, &vars, &gens, 8, 6) {
            failures.push(format!("ideal {i}: {e}"));
        }
    }
    outcome(failures.is_empty(), if failures.is_empty() { "200 ideals agree at degree 8".into() } else { failures.join("; ") })
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    let mut count = 0usize;
    let mut bad = Vec::new();
    let mut tally = |ok: bool, what: String| {
        count += 1;
        if !ok {
            bad.push(what);
        }
    };

    // membership certificates from normal forms of random elements
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..40 {
        let (vars, gens) = oracle::random::ideal(&mut rng);
        let ideal = Ideal::new(gens.clone(), MonomialOrder::degrevlex(vars.clone()), Budget::default());
        for d in [3, 5] {
            let f = oracle::random::homogeneous(&mut rng, &vars, d, 5) + gens[0].clone() * oracle::random::homogeneous(&mut rng, &vars, 1, 2);
            let (_, c) = ideal.normal_form(&f).unwrap();
            tally(multiplies_back(&f, ideal.generators(), &c), format!("normal form {i}/{d}"));
        }
    }

    // unit inverses modulo an ideal
    let inv_cases = [("x*y - 1", "x"), ("x^2 - 2", "x + 1"), ("x^3 - 2", "x + 1")];
    for (rel, u) in inv_cases {
        let ideal = Ideal::new(vec![p(rel)], MonomialOrder::degrevlex(["x", "y"]), Budget::default());
        let g = ideal.unit_inverse(&p(u)).unwrap();
        let (rem, _) = ideal.normal_form(&(&(&p(u) * &g) - &Polynomial::one())).unwrap();
        tally(rem.is_zero(), format!("inverse of {u} mod {rel}"));
    }

    // morphism certificates recorded on load
    let pb = nforge_cli::load_str(&problem_text("run1.json"), &Options::default()).unwrap();
    for (name, cert) in &pb.morphism_certificates {
        let m = &pb.morphisms[name];
        for chk in &cert.checks {
            if let Some(c) = &chk.certificate {
                let gens = m.target_presentation().map(|t| t.all_relations()).unwrap_or_default();
                tally(c.verify(&chk.image, &gens), format!("morphism {name}"));
            } else {
                tally(chk.image.is_zero(), format!("morphism {name} residual"));
            }
        }
    }

    // smoothness certificate: P + Σ c_i I_i = 1
    let b = FinitePresentation::new(BaseRing::localized(["t"], vec![p("t")]), vec!["Y".into()], vec![p("Y^2 - (1+t)")]).unwrap();
    let cert = certify_standard_smooth(&b, &[], SystemSearch::default()).unwrap().unwrap();
    let total = b.all_relations().iter().zip(&cert.relation_cofactors).fold(cert.system.p.clone(), |acc, (g, c)| acc.add(&c.mul_poly(g)));
    tally(total == Frac::one() && cert.verify(&b), "smoothness certificate".into());

    // step certificates, through the independent verifier
    for file in ["run1.json", "product.json"] {
        let r = runs.run("verify", &problem_text(file));
        for c in &r.checks {
            tally(c.passed, format!("{file}: {}", c.name));
        }
    }

    // unit-ideal certificates at the end of the chain
    for file in ["run1.json", "smooth.json"] {
        let r = runs.run("resolve-chain", &problem_text(file));
        for it in r.result["iterations"].as_array().unwrap() {
            if let Some(u) = it.get("unit") {
                let gens: Vec<Polynomial> = u["generators"].as_array().unwrap().iter().map(|g| p(g.as_str().unwrap())).collect();
                let c: MembershipCertificate = serde_json::from_value(u["certificate"].clone()).unwrap();
                tally(c.remainder.is_zero() && multiplies_back(&Polynomial::one(), &gens, &c), format!("{file}: unit ideal"));
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{count} certificates multiply back") } else { format!("failing: {}", bad.join(", ")) })
}

/// `(∂f/∂Y) G = (M N Id_r | 0)` with the product formed entry by entry.
fn identity_holds(sys: &JacobianSystem) -> bool {
    let Ok(gs) = build_adjoint_system(sys) else { return false };
    let n = sys.n();
    let r = sys.r();
    gs.iter().enumerate().all(|(j, g)| {
        let mn = sys.witnesses[j].mul_poly(&sys.minors[j]);
        (0..r).all(|i| {
            (0..n).all(|c| {
                let mut acc = Frac::zero();
                for k in 0..n {
                    acc = acc.add(&g[k][c].mul_poly(&sys.f[i].derivative(&sys.vars[k])));
                }
                acc == if i == c { mn.clone() } else { Frac::zero() }
            })
        })
    })
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut bad = Vec::new();
    let mut shapes = BTreeSet::new();
    for i in 0..50 {
        let (_, sys) = random::jacobian_system(&mut rng, random::Shape::default()).unwrap();
        shapes.insert((sys.n(), sys.r()));
        if !identity_holds(&sys) {
            bad.push(format!("system {i}: {:?}", sys.f));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("50 systems, (n, r) shapes {shapes:?}") } else { bad.join("; ") })
}

fn criterion_4() -> Outcome {
    let base = BaseRing::quotient(["t"], vec![p("t^5")]);
    let (e, chain) = base.annihilator_exponent(&p("t^2"), 0).unwrap();
    // (t^5 : t^(2k)) = (t^j) for the least j with j + 2k >= 5
    let direct: Vec<Polynomial> = (0..chain.len() as u32).map(|k| Polynomial::var("t").pow(5u32.saturating_sub(2 * k))).collect();
    let same = chain.iter().zip(&direct).all(|(c, d)| {
        let di = Ideal::new(vec![d.clone()], c.order().clone(), c.budget());
        c.same_as(&di).unwrap()
    });
    let printed: Vec<String> = chain.iter().map(|c| format!("({})", c.reduced_basis().unwrap().iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "))).collect();
    let expected_tail = ["(t^3)", "(t)", "(1)", "(1)"];
    outcome(e == 3 && same && printed[1..] == expected_tail, format!("e = {e}, chain {}", printed.join(" ⊇ ")))
}

fn step_items(r: &Report) -> Vec<(String, bool)> {
    ["(i) ", "(ii) ", "(iii) ", "(iv) ", "(v) ", "(vi) "]
        .iter()
        .map(|tag| {
            let hits: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with(tag)).collect();
            (tag.trim().to_string(), !hits.is_empty() && hits.iter().all(|c| c.passed))
        })
        .collect()
}

fn criterion_5(runs: &mut Runs) -> Outcome {
    let text = problem_text("run1.json");
    // the file's data against the oracle
    let pb = nforge_cli::load_str(&text, &Options::default()).unwrap();
    let t: BTreeSet<String> = ["t".to_string()].into();
    let root = series(&square_root_oracle(12));
    let v_ok = pb.morphisms["v"].image("Y") == Some(&(&p("t") * &root).truncate(12, &t));
    let y_ok = pb.steps["node"].y_prime[0] == Frac::from(&p("t") * &series(&square_root_oracle(5)));
    let r = runs.run("neron-step", &text);
    let items = step_items(&r);
    let all_items = items.iter().all(|(_, ok)| *ok);
    let e = &r.result["output"]["e"];
    let shown: Vec<String> = items.iter().map(|(n, ok)| format!("{n}{}", if *ok { "✓" } else { "✗" })).collect();
    outcome(
        v_ok && y_ok && all_items && r.passed() && e == 1,
        format!("oracle v {v_ok}, oracle y' {y_ok}, e = {e}, {} of {} checks, items {}", r.checks.iter().filter(|c| c.passed).count(), r.checks.len(), shown.join(" ")),
    )
}

fn failing(r: &Report) -> Vec<String> {
    r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
}

fn criterion_6(runs: &mut Runs) -> Outcome {
    let text = problem_text("run1.json");
    let mut notes = Vec::new();
    let mut ok = true;

    let bad_y = text.replace("+ 1/16*t^3", "+ 1/15*t^3");
    assert_ne!(bad_y, text);
    let r = runs.run("neron-step", &bad_y);
    let f = failing(&r);
    let hit = !r.passed() && f.first().is_some_and(|n| n.starts_with("I(y')"));
    ok &= hit;
    notes.push(format!("y' → {}", f.first().map_or("none", String::as_str)));

    let bad_n = text.replace(r#"{"num": "Y", "den": "1+t"}"#, r#"{"num": "3*Y", "den": "1+t"}"#);
    assert_ne!(bad_n, text);
    let r = runs.run("neron-step", &bad_n);
    let f = failing(&r);
    let hit = !r.passed() && f.first().is_some_and(|n| n == "d ≡ P mod I");
    ok &= hit;
    notes.push(format!("N_1 → {}", f.first().map_or("none", String::as_str)));

    let bad_v = text.replace(r#"{"sqrt": "1+t", "times": "t"}"#, r#""t + 1/2*t^2""#);
    assert_ne!(bad_v, text);
    let r = runs.run("neron-step", &bad_v);
    let kind = r.error.as_ref().map_or("none".to_string(), |e| format!("{} at {}", e.kind, e.location.clone().unwrap_or_default()));
    let hit = r.error.as_ref().is_some_and(|e| e.kind == "NotWellDefined" && e.location.as_deref() == Some("morphisms[0] `v`"));
    ok &= hit && r.exit_code() != 0;
    notes.push(format!("v(Y) → {kind}"));
    outcome(ok, notes.join("; "))
}

/// Every term of `big` has total degree `c` in `vars`.
fn terms_homogeneous(big: &Polynomial, vars: &[String], c: u32) -> bool {
    big.terms().all(|(m, _)| m.degree_in(vars) == c)
}

fn criterion_7(runs: &mut Runs) -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    let base = BaseRing::localized(["t"], vec![p("t")]);
    let target = TargetRing::truncated(["t"], nforge_core::arith::TruncationOrder::new(12).unwrap());
    let b = FinitePresentation::of_base(base);
    let v = nforge_core::ring::AlgebraMorphism::to_target(b.clone(), target, BTreeMap::new()).unwrap();
    let root = instances::sqrt_series("t", 12);
    let cases: Vec<(Vec<&str>, Vec<&str>, Vec<Polynomial>)> = vec![
        (vec!["Z"], vec!["Z^2 - (1+t)"], vec![root.clone()]),
        (vec!["Z"], vec!["Z - 1"], vec![p("1")]),
        (vec!["Z1", "Z2"], vec!["Z1*Z2 - 1", "Z1^3 - Z2"], vec![p("1"), p("1")]),
        (vec!["Z1", "Z2"], vec!["Z1^2 - (1+t)*Z2^2"], vec![&root * &p("1 + t"), p("1 + t")]),
    ];
    for (zv, g, z) in &cases {
        let zv: Vec<String> = zv.iter().map(|s| s.to_string()).collect();
        let g: Vec<Polynomial> = g.iter().map(|s| p(s)).collect();
        match homogenize_and_clear(&b, &v, &zv, &g, z, &p("1"), None) {
            Ok(h) => {
                let vars: Vec<String> = zv.iter().cloned().chain([h.z0_var.clone()]).collect();
                for (big, c) in h.homogenized.iter().zip(&h.degrees) {
                    count += 1;
                    if !(is_homogeneous(big, &vars, *c) && terms_homogeneous(big, &vars, *c)) {
                        bad.push(format!("{big} not homogeneous"));
                    }
                }
                if !h.checks.iter().all(|c| c.passed) {
                    bad.push(format!("homogenization checks for {g:?}"));
                }
            }
            Err(e) => bad.push(format!("{g:?}: {e}")),
        }
    }
    let exts: Vec<(Vec<&str>, u32, &str)> = vec![(vec!["t^2"], 3, "1"), (vec!["t^2", "t^3"], 1, "t^4"), (vec!["t"], 2, "t^4"), (vec!["t^3", "t^4"], 2, "1")];
    let v6 = nforge_core::ring::AlgebraMorphism::to_target(
        b.clone(),
        TargetRing::truncated(["t"], nforge_core::arith::TruncationOrder::new(6).unwrap()),
        BTreeMap::new(),
    )
    .unwrap();
    for (h_b, k, w) in &exts {
        let hb: Vec<Polynomial> = h_b.iter().map(|s| p(s)).collect();
        match annihilator_extension(&b, &v6, &["Z".into()], &[p("Z - 1")], &[p("1")], &hb, *k, &p(w)) {
            Ok(ext) => {
                let round_trips = ext.checks.iter().filter(|c| c.name.starts_with("E_")).count();
                count += round_trips;
                if round_trips != ext.products.len() + 1 || !ext.checks.iter().all(|c| c.passed) {
                    bad.push(format!("extension {h_b:?}^{k}: {:?}", ext.checks));
                }
            }
            Err(e) => bad.push(format!("extension {h_b:?}^{k}: {e}")),
        }
    }
    let text = problem_text("extensions.json");
    for cmd in ["homogenize", "annihilator-ext"] {
        let r = runs.run(cmd, &text);
        if !r.passed() {
            bad.push(format!("{cmd}: {:?}", failing(&r)));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{count} exact identities") } else { bad.join("; ") })
}

fn criterion_8(runs: &mut Runs) -> Outcome {
    let mut notes = Vec::new();
    let r = runs.run("resolve-chain", &problem_text("run1.json"));
    let run1 = r.passed() && r.result["status"] == "terminated" && r.result["iteration"] == 1 && r.result["iterations"][1].get("unit").is_some();
    notes.push(format!("node: {} at {}", r.result["status"], r.result["iteration"]));

    let r = runs.run("resolve-chain", &problem_text("smooth.json"));
    let smooth = r.passed() && r.result["status"] == "terminated" && r.result["iteration"] == 0;
    notes.push(format!("smooth: {} at {}", r.result["status"], r.result["iteration"]));

    let r = runs.run("resolve-chain", &problem_text("product.json"));
    let its = r.result["iterations"].as_array().cloned().unwrap_or_default();
    let increasing = its.len() >= 2
        && its[1..].iter().all(|it| {
            it["witness_here"]["member"] == true
                && it["witness_before"]["member"] == false
                && it["contains_previous"].as_array().is_some_and(|v| v.iter().all(|m| m["member"] == true))
        });
    let stalled = r.passed() && r.result["status"] == "stalled" && increasing;
    notes.push(format!("withheld: {} at {}, strictly increasing {increasing}", r.result["status"], r.result["iteration"]));
    outcome(run1 && smooth && stalled, notes.join("; "))
}

fn criterion_9(runs: &Runs) -> Outcome {
    let mut differ = Vec::new();
    for (cmd, text, opts, first) in &runs.done {
        let (again, _) = execute_str(cmd, text, opts);
        if &again.to_json() != first {
            differ.push(cmd.clone());
        }
    }
    // and the library step on its own
    let a = serde_json::to_string(&run_step(&instances::node_step(12).unwrap())).unwrap();
    let b = serde_json::to_string(&run_step(&instances::node_step(12).unwrap())).unwrap();
    if a != b {
        differ.push("library step".into());
    }
    outcome(differ.is_empty(), if differ.is_empty() { format!("{} reports byte-identical on rerun", runs.done.len() + 1) } else { format!("differ: {}", differ.join(", ")) })
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

#[test]
fn acceptance() {
    let mut runs = Runs::default();
    let mut results: Vec<(u32, Outcome, Duration, Option<Duration>)> = Vec::new();
    let (o, t) = timed(criterion_1);
    results.push((1, o, t, Some(Duration::from_secs(60))));
    let (o, t) = timed(|| criterion_2(&mut runs));
    results.push((2, o, t, None));
    let (o, t) = timed(criterion_3);
    results.push((3, o, t, None));
    let (o, t) = timed(criterion_4);
    results.push((4, o, t, Some(Duration::from_secs(1))));
    let (o, t) = timed(|| criterion_5(&mut runs));
    results.push((5, o, t, Some(Duration::from_secs(10))));
    let (o, t) = timed(|| criterion_6(&mut runs));
    results.push((6, o, t, None));
    let (o, t) = timed(|| criterion_7(&mut runs));
    results.push((7, o, t, None));
    let (o, t) = timed(|| criterion_8(&mut runs));
    results.push((8, o, t, Some(Duration::from_secs(15))));
    let (o, t) = timed(|| criterion_9(&runs));
    results.push((9, o, t, None));

    let mut all = true;
    for (n, o, t, limit) in &results {
        let in_time = limit.is_none_or(|l| *t < l);
        let passed = o.passed && in_time;
        all &= passed;
        let budget = limit.map_or(String::new(), |l| format!(" (limit {} s)", l.as_secs()));
        say(&format!("criterion {n}: {}  {:.3} s{budget}  {}", if passed { "PASS" } else { "FAIL" }, t.as_secs_f64(), o.detail));
    }
    assert!(all, "acceptance criteria failed");
}

