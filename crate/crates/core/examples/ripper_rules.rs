//! Learn ordered rules on a planted nominal dataset, print them in the
//! listing format and read a published listing back for prediction.

use std::collections::BTreeMap;

use archlayers::discretize::{NominalDataset, NominalRow};
use archlayers::model::{ClassId, TentativeLayer};
use archlayers::rules::{format_rules, learn_ripper, parse_rules, LearnerParams};
use archlayers::Result;

fn planted() -> Result<NominalDataset> {
    // Layer 2 iff CBO bin 3 and RFC bin 2; layer 4 iff DIT bin 2; otherwise layer 1.
    let mut rows = Vec::new();
    for i in 0..600u32 {
        let values = vec![1 + i % 3, 1 + (i / 3) % 4, 1 + (i / 12) % 2];
        let label = match (values[0], values[1], values[2]) {
            (_, _, 2) => TentativeLayer::UserInterface,
            (3, 2, _) => TentativeLayer::BusinessLogic,
            _ => TentativeLayer::Infrastructure,
        };
        rows.push(NominalRow { id: ClassId::new(format!("p.C{i:04}"))?, values, label });
    }
    NominalDataset::new(vec!["CBO".into(), "RFC".into(), "DIT".into()], vec![3, 4, 2], rows)
}

pub fn run() -> Result<()> {
    let dataset = planted()?;
    let ruleset = learn_ripper(&dataset, &LearnerParams::default())?;
    print!("{}", format_rules(&ruleset));
    let wrong = dataset
        .rows
        .iter()
        .filter(|r| ruleset.predict(&dataset.row_map(r)) != r.label)
        .count();
    assert_eq!(wrong, 0);

    let published = parse_rules(
        "1. IF (DITBin = 2) and (CBOBin = 3)THEN layerBin=2\n\
         2. IF (CBOBin = 3) and (RFCBin = 2) THEN layerBin=2\n\
         3. IF (DITBin = 2) and (CBOBin = 2) THEN layerBin=2\n\
         4. ELSE layerBin=1\n",
    )?;
    let row: BTreeMap<String, u32> = [("DIT".into(), 2), ("CBO".into(), 3), ("RFC".into(), 1)].into();
    let layer = published.predict(&row);
    assert_eq!(layer, TentativeLayer::BusinessLogic);
    println!("DIT=2, CBO=3, RFC=1 -> layer {layer} ({})", layer.name());
    print!("{}", published.to_jsonl());
    Ok(())
}

fn main() -> Result<()> {
    run()
}
