//! Supervised MDLP discretization of one attribute, then of a whole
//! metrics table against tentative layers.

use std::collections::BTreeMap;

use archlayers::discretize::{apply_bins, build_scheme, entropy, mdlp_discretize};
use archlayers::layering::{assign_dlayers, bin_tentative, condense};
use archlayers::model::{ClassId, Metric};
use archlayers::synth::{generate, SynthParams};
use archlayers::Result;

pub fn run() -> Result<()> {
    let values: Vec<f64> = (1..=16).map(f64::from).collect();
    let separable: Vec<u32> = (0..16).map(|i| u32::from(i >= 8)).collect();
    let alternating: Vec<u32> = (0..16).map(|i| i % 2).collect();
    assert_eq!(mdlp_discretize(&values, &separable), vec![8.5]);
    assert!(mdlp_discretize(&values, &alternating).is_empty());
    println!("entropy of an even split: {}", entropy(&separable));

    let sys = generate(&SynthParams { classes_per_layer: [50; 4], ..SynthParams::default() })?;
    let (_, tentative) = bin_tentative(&assign_dlayers(&condense(&sys.graph)))?;
    let labels: BTreeMap<ClassId, u32> = tentative.iter().map(|(id, l)| (id.clone(), u32::from(l.index()))).collect();
    let scheme = build_scheme(&sys.metrics, &labels, &Metric::ALL)?;
    for attr in &scheme.attributes {
        println!("{:>5}: cuts {:?} -> {}", attr.name, attr.cuts, attr.integer_ranges().join(" | "));
    }
    let dataset = apply_bins(&sys.metrics, &tentative, &scheme)?;
    println!("{} rows over {:?}", dataset.len(), dataset.attributes);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
