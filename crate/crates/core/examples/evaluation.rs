//! Precision and recall from a confusion matrix, the 0/0 convention for
//! layers that are never predicted, and stratified cross-validation.

use std::collections::BTreeMap;

use archlayers::eval::{accuracy_markdown, confusion, cross_validate, precision_recall, EvalMode};
use archlayers::layering::{assign_dlayers, bin_tentative, condense};
use archlayers::model::{ClassId, TentativeLayer};
use archlayers::pipeline::{stage_discretize, stage_layers, stage_stats};
use archlayers::rules::LearnerParams;
use archlayers::synth::{generate, SynthParams};
use archlayers::Result;

pub fn run() -> Result<()> {
    use TentativeLayer::*;
    let pairs = [
        (Infrastructure, Infrastructure, 45),
        (Infrastructure, BusinessLogic, 6),
        (BusinessLogic, Infrastructure, 30),
        (BusinessLogic, BusinessLogic, 20),
        (Controllers, Infrastructure, 12),
    ];
    let (mut truth, mut predicted) = (BTreeMap::new(), BTreeMap::new());
    let mut next = 0;
    for (actual, guess, count) in pairs {
        for _ in 0..count {
            let id = ClassId::new(format!("c{next:03}"))?;
            truth.insert(id.clone(), actual);
            predicted.insert(id, guess);
            next += 1;
        }
    }
    let report = precision_recall(&confusion(&predicted, &truth)?, EvalMode::Resubstitution);
    // Controllers are never predicted and UI never occurs: both report 0 and 0.
    assert_eq!(report.precision_of(Controllers), 0.0);
    assert_eq!(report.recall_of(UserInterface), 0.0);

    let sys = generate(&SynthParams { classes_per_layer: [60; 4], ..SynthParams::default() })?;
    let layers = stage_layers(&sys.graph)?;
    let (_, tentative) = bin_tentative(&assign_dlayers(&condense(&sys.graph)))?;
    assert_eq!(tentative, layers.tentative);
    let stats = stage_stats(&sys.metrics, &layers.assignment, 0.05, true)?;
    let (_, dataset) = stage_discretize(&sys.metrics, &layers, &stats.selected, Default::default())?;
    let cv = cross_validate(&dataset, 10, 1, &LearnerParams::default())?;
    print!("{}", accuracy_markdown(&[("hand matrix", &report), ("synthetic", &cv.report)]));
    println!("10-fold accuracy {:.3}", cv.report.accuracy);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
