//! Confusion matrices, per-layer precision and recall, and stratified
//! cross-validation of the rule learner.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discretize::NominalDataset;
use crate::error::{Error, Result};
use crate::model::{ClassId, TentativeLayer};
use crate::rules::{learn_ripper, LearnerParams};

/// Counts indexed by (actual, predicted) layer slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 4]; 4],
    pub n: u64,
}

impl ConfusionMatrix {
    pub fn add(&mut self, actual: TentativeLayer, predicted: TentativeLayer) {
        self.counts[actual.slot()][predicted.slot()] += 1;
        self.n += 1;
    }

    pub fn get(&self, actual: TentativeLayer, predicted: TentativeLayer) -> u64 {
        self.counts[actual.slot()][predicted.slot()]
    }

    pub fn row_sum(&self, actual: TentativeLayer) -> u64 {
        self.counts[actual.slot()].iter().sum()
    }

    pub fn column_sum(&self, predicted: TentativeLayer) -> u64 {
        self.counts.iter().map(|row| row[predicted.slot()]).sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..4).map(|i| self.counts[i][i]).sum()
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.n += other.n;
    }
}

/// Tallies predictions against truth; both maps must have the same keys.
pub fn confusion(
    predictions: &BTreeMap<ClassId, TentativeLayer>,
    truth: &BTreeMap<ClassId, TentativeLayer>,
) -> Result<ConfusionMatrix> {
    if let Some(id) = predictions.keys().find(|id| !truth.contains_key(*id)) {
        return Err(Error::KeyMismatch(id.to_string()));
    }
    if let Some(id) = truth.keys().find(|id| !predictions.contains_key(*id)) {
        return Err(Error::KeyMismatch(id.to_string()));
    }
    let mut cm = ConfusionMatrix::default();
    for (id, &actual) in truth {
        cm.add(actual, predictions[id]);
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Resubstitution,
    CrossValidation { folds: usize },
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalMode::Resubstitution => f.write_str("resubstitution"),
            EvalMode::CrossValidation { folds } => write!(f, "{folds}-fold cross-validation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub precision: [f64; 4],
    pub recall: [f64; 4],
    pub accuracy: f64,
    pub mode: EvalMode,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Zero denominators yield 0.
pub fn precision_recall(cm: &ConfusionMatrix, mode: EvalMode) -> EvaluationReport {
    let mut precision = [0.0; 4];
    let mut recall = [0.0; 4];
    for layer in TentativeLayer::ALL {
        let hit = cm.get(layer, layer);
        precision[layer.slot()] = ratio(hit, cm.column_sum(layer));
        recall[layer.slot()] = ratio(hit, cm.row_sum(layer));
    }
    EvaluationReport {
        precision,
        recall,
        accuracy: ratio(cm.diagonal(), cm.n),
        mode,
        confusion: *cm,
    }
}

impl EvaluationReport {
    pub fn precision_of(&self, layer: TentativeLayer) -> f64 {
        self.precision[layer.slot()]
    }

    pub fn recall_of(&self, layer: TentativeLayer) -> f64 {
        self.recall[layer.slot()]
    }

    fn present(&self) -> impl Iterator<Item = TentativeLayer> + '_ {
        TentativeLayer::ALL.into_iter().filter(|&l| self.confusion.row_sum(l) > 0)
    }

    /// Mean over layers that occur in the truth.
    pub fn macro_precision(&self) -> f64 {
        let values: Vec<f64> = self.present().map(|l| self.precision_of(l)).collect();
        mean(&values)
    }

    /// Mean over layers that occur in the truth.
    pub fn macro_recall(&self) -> f64 {
        let values: Vec<f64> = self.present().map(|l| self.recall_of(l)).collect();
        mean(&values)
    }

    /// `layer,precision,recall,support,predicted` plus accuracy and mode lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,precision,recall,support,predicted\n");
        for l in TentativeLayer::ALL {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{},{}",
                l,
                self.precision_of(l),
                self.recall_of(l),
                self.confusion.row_sum(l),
                self.confusion.column_sum(l)
            );
        }
        let _ = writeln!(out, "accuracy,{:.6},,{},", self.accuracy, self.confusion.n);
        let _ = writeln!(out, "# mode: {}", self.mode);
        out
    }

    pub fn to_markdown(&self, project: &str) -> String {
        accuracy_markdown(&[(project, self)])
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Three decimals with trailing zeros dropped: `0.518`, `0.5`, `1`, `0`.
pub fn format_measure(value: f64) -> String {
    let s = format!("{value:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// One Precision/Recall column pair per project, one row per layer.
pub fn accuracy_markdown(projects: &[(&str, &EvaluationReport)]) -> String {
    let mut out = String::from("| |");
    for (name, _) in projects {
        let _ = write!(out, " {name} | |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|---|".repeat(projects.len()));
    out.push_str("\n| |");
    out.push_str(&" Precision | Recall |".repeat(projects.len()));
    out.push('\n');
    for l in TentativeLayer::ALL {
        let _ = write!(out, "| D-layer={l} |");
        for (_, r) in projects {
            let _ = write!(out, " {} | {} |", format_measure(r.precision_of(l)), format_measure(r.recall_of(l)));
        }
        out.push('\n');
    }
    let modes: Vec<String> = projects.iter().map(|(name, r)| format!("{name}: {}", r.mode)).collect();
    let _ = writeln!(out, "\nEvaluation: {}", modes.join("; "));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub report: EvaluationReport,
    pub warnings: Vec<String>,
}

/// Fold index per row: each class is shuffled and dealt round-robin,
/// continuing where the previous class stopped.
fn stratified_folds(ds: &NominalDataset, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut fold_of = vec![0; ds.len()];
    let mut next = 0;
    for layer in TentativeLayer::ALL {
        let mut members: Vec<usize> = (0..ds.len()).filter(|&i| ds.rows[i].label == layer).collect();
        members.shuffle(rng);
        for i in members {
            fold_of[i] = next % k;
            next += 1;
        }
    }
    fold_of
}

/// Stratified seeded `k`-fold evaluation; the confusion matrix aggregates
/// every held-out fold.
pub fn cross_validate(ds: &NominalDataset, k: usize, seed: u64, params: &LearnerParams) -> Result<CrossValidation> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("cross-validation needs at least 2 folds, got {k}")));
    }
    if k > ds.len() {
        return Err(Error::InvalidParams(format!("{k} folds exceed {} instances", ds.len())));
    }
    let mut warnings = Vec::new();
    for layer in TentativeLayer::ALL {
        let count = ds.rows.iter().filter(|r| r.label == layer).count();
        if count > 0 && count < k {
            warnings.push(format!("layer {layer} has {count} instances, fewer than {k} folds"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fold_of = stratified_folds(ds, k, &mut rng);
    let mut total = ConfusionMatrix::default();
    for fold in 0..k {
        let train: Vec<usize> = (0..ds.len()).filter(|&i| fold_of[i] != fold).collect();
        let test: Vec<usize> = (0..ds.len()).filter(|&i| fold_of[i] == fold).collect();
        let ruleset = learn_ripper(&ds.subset(&train), params)?;
        let held_out = ds.subset(&test);
        let predicted = ruleset.predict_dataset(&held_out);
        total.merge(&confusion(&predicted, &held_out.labels())?);
    }
    Ok(CrossValidation {
        report: precision_recall(&total, EvalMode::CrossValidation { folds: k }),
        warnings,
    })
}

/// Trains on `ds` and scores on the same rows.
pub fn resubstitution(ds: &NominalDataset, params: &LearnerParams) -> Result<(crate::rules::RuleSet, EvaluationReport)> {
    let ruleset = learn_ripper(ds, params)?;
    let cm = confusion(&ruleset.predict_dataset(ds), &ds.labels())?;
    Ok((ruleset, precision_recall(&cm, EvalMode::Resubstitution)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::NominalRow;

    fn layer(i: u8) -> TentativeLayer {
        TentativeLayer::from_index(i).unwrap()
    }

    fn id(i: usize) -> ClassId {
        ClassId::new(format!("c{i:04}")).unwrap()
    }

    fn cm_from(pairs: &[(u8, u8, u64)]) -> ConfusionMatrix {
        let mut cm = ConfusionMatrix::default();
        for &(a, p, count) in pairs {
            for _ in 0..count {
                cm.add(layer(a), layer(p));
            }
        }
        cm
    }

    #[test]
    fn confusion_counts() {
        let truth: BTreeMap<_, _> = (0..3).map(|i| (id(i), layer(1))).collect();
        let pred: BTreeMap<_, _> = (0..3).map(|i| (id(i), layer(2))).collect();
        let cm = confusion(&pred, &truth).unwrap();
        assert_eq!(cm.get(layer(1), layer(2)), 3);
        assert_eq!(cm.n, 3);
        let empty = confusion(&BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert_eq!(empty, ConfusionMatrix::default());
        let mut short = pred.clone();
        short.remove(&id(0));
        assert!(matches!(confusion(&short, &truth), Err(Error::KeyMismatch(_))));
    }

    #[test]
    fn zero_denominators_report_zero() {
        let cm = cm_from(&[(1, 1, 5), (2, 2, 3), (3, 1, 2)]);
        let r = precision_recall(&cm, EvalMode::Resubstitution);
        assert_eq!(r.precision_of(layer(3)), 0.0);
        assert_eq!(r.recall_of(layer(3)), 0.0);
        assert_eq!(r.precision_of(layer(4)), 0.0);
        assert_eq!(r.recall_of(layer(4)), 0.0);
        assert!((r.precision_of(layer(1)) - 5.0 / 7.0).abs() < 1e-12);
        assert_eq!(r.recall_of(layer(1)), 1.0);
    }

    #[test]
    fn hand_matrix_shape() {
        // Column L1: 45 of 87 predicted; row L1: 45 of 51 actual.
        let cm = cm_from(&[(1, 1, 45), (1, 2, 6), (2, 1, 30), (3, 1, 12), (2, 2, 20)]);
        let r = precision_recall(&cm, EvalMode::Resubstitution);
        assert_eq!(format_measure(r.precision_of(layer(1))), "0.517");
        assert_eq!(format_measure(r.recall_of(layer(1))), "0.882");
    }

    #[test]
    fn measure_formatting() {
        assert_eq!(format_measure(0.5), "0.5");
        assert_eq!(format_measure(1.0), "1");
        assert_eq!(format_measure(0.0), "0");
        assert_eq!(format_measure(0.6666), "0.667");
    }

    #[test]
    fn markdown_layout() {
        let cm = cm_from(&[(1, 1, 2), (2, 2, 2)]);
        let r = precision_recall(&cm, EvalMode::Resubstitution);
        let md = r.to_markdown("Demo");
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines[0], "| | Demo | |");
        assert_eq!(lines[2], "| | Precision | Recall |");
        assert_eq!(lines[3], "| D-layer=1 | 1 | 1 |");
        assert_eq!(lines[5], "| D-layer=3 | 0 | 0 |");
    }

    fn planted(n: usize) -> NominalDataset {
        let rows = (0..n)
            .map(|i| {
                let a = 1 + (i % 2) as u32;
                let b = 1 + ((i / 2) % 3) as u32;
                NominalRow { id: id(i), values: vec![a, b], label: if a == 1 { layer(1) } else { layer(3) } }
            })
            .collect();
        NominalDataset::new(vec!["A".into(), "B".into()], vec![2, 3], rows).unwrap()
    }

    #[test]
    fn leave_one_out_on_planted_rule() {
        let ds = planted(30);
        let cv = cross_validate(&ds, ds.len(), 7, &LearnerParams::default()).unwrap();
        assert_eq!(cv.report.accuracy, 1.0);
        assert!(cv.warnings.is_empty() || cv.warnings.iter().all(|w| w.contains("fewer than")));
    }

    #[test]
    fn single_class_cv_uses_default_rule() {
        let rows = (0..6).map(|i| NominalRow { id: id(i), values: vec![1], label: layer(2) }).collect();
        let ds = NominalDataset::new(vec!["A".into()], vec![1], rows).unwrap();
        let cv = cross_validate(&ds, 2, 1, &LearnerParams::default()).unwrap();
        assert_eq!(cv.report.accuracy, 1.0);
    }

    #[test]
    fn cv_is_deterministic_and_validates_k() {
        let ds = planted(40);
        let a = cross_validate(&ds, 5, 3, &LearnerParams::default()).unwrap();
        let b = cross_validate(&ds, 5, 3, &LearnerParams::default()).unwrap();
        assert_eq!(a, b);
        assert!(cross_validate(&ds, 1, 3, &LearnerParams::default()).is_err());
        assert!(cross_validate(&ds, 41, 3, &LearnerParams::default()).is_err());
    }

    #[test]
    fn small_class_warns() {
        let mut rows: Vec<NominalRow> = (0..10).map(|i| NominalRow { id: id(i), values: vec![1], label: layer(1) }).collect();
        rows.push(NominalRow { id: id(10), values: vec![2], label: layer(4) });
        let ds = NominalDataset::new(vec!["A".into()], vec![2], rows).unwrap();
        let cv = cross_validate(&ds, 3, 1, &LearnerParams::default()).unwrap();
        assert_eq!(cv.warnings, vec!["layer 4 has 1 instances, fewer than 3 folds".to_string()]);
    }
}
