//! Round-trip a synthetic system through the class-facts format and run
//! the pipeline from facts, so metrics and the graph are both derived.

use archlayers::pipeline::{analyze, input_from_class_facts};
use archlayers::pipeline::{InputSource, PipelineConfig};
use archlayers::synth::{generate_class_facts, SynthParams};
use archlayers::Result;

pub fn run() -> Result<()> {
    let params = SynthParams { classes_per_layer: [40; 4], down_dep_prob: 0.03, skip_dep_prob: 0.0, ..SynthParams::default() };
    let facts = generate_class_facts(&params)?;
    let document = facts.class_facts_text();
    println!("{} classes, {} bytes of class facts", facts.model.len(), document.len());

    let mut input = input_from_class_facts(&document)?;
    input.truth = Some(facts.truth.clone());
    let bundle = analyze(&input, &PipelineConfig::new(InputSource::Synth(Box::new(params))))?;
    let selected: Vec<&str> = bundle.stats.selected.iter().map(|m| m.name()).collect();
    println!("selected metrics: {}", selected.join(", "));
    print!("{}", archlayers::format_rules(&bundle.ruleset));
    let truth = bundle.truth_evaluation.expect("truth supplied");
    println!("accuracy against planted layers: {:.3}", truth.accuracy);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
