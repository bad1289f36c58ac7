use nforge_core::neron::{instances, run_step, verify_step, StepOutput};
use nforge_core::ring::AlgebraMorphism;

#[test]
fn morphisms_survive_json() {
    let input = instances::node_step(12).unwrap();
    let text = serde_json::to_string(&input.v).unwrap();
    let back: AlgebraMorphism = serde_json::from_str(&text).unwrap();
    assert_eq!(back, input.v);
    back.validate().unwrap();
}

#[test]
fn step_output_reverifies_after_json() {
    let input = instances::product_step().unwrap();
    let out = run_step(&input).output.unwrap();
    let text = serde_json::to_string(&out).unwrap();
    let back: StepOutput = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    let checks = verify_step(&input, &back);
    assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    assert_eq!(checks, verify_step(&input, &out));
}
