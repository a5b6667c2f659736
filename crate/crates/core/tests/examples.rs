//! Every runnable example doubles as a smoke test.

#[allow(dead_code)]
#[path = "../examples/layering.rs"]
mod layering;

#[test]
fn layering_runs() {
    layering::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/metrics_engine.rs"]
mod metrics_engine;

#[test]
fn metrics_engine_runs() {
    metrics_engine::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/correlations.rs"]
mod correlations;

#[test]
fn correlations_runs() {
    correlations::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/mdlp_discretize.rs"]
mod mdlp_discretize;

#[test]
fn mdlp_discretize_runs() {
    mdlp_discretize::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/ripper_rules.rs"]
mod ripper_rules;

#[test]
fn ripper_rules_runs() {
    ripper_rules::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/evaluation.rs"]
mod evaluation;

#[test]
fn evaluation_runs() {
    evaluation::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/synthetic_recovery.rs"]
mod synthetic_recovery;

#[test]
fn synthetic_recovery_runs() {
    synthetic_recovery::run().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/class_facts_pipeline.rs"]
mod class_facts_pipeline;

#[test]
fn class_facts_pipeline_runs() {
    class_facts_pipeline::run().unwrap();
}
