//! End-to-end orchestration: ingest, layering, metrics, correlation-based
//! metric selection, discretization, rule learning and evaluation, plus the
//! report bundle written to disk.
//!
//! Each stage is a standalone function so the staged CLI subcommands and
//! [`run_pipeline`] share one code path. Errors carry the stage name.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::discretize::{apply_bins, build_scheme, BinningScheme, NominalDataset};
use crate::error::{Error, Result, Stage, StageExt};
use crate::eval::{self, accuracy_markdown, confusion, precision_recall, EvalMode, EvaluationReport};
use crate::ingest::{format_layer_csv, parse_ckjm_metrics, parse_class_facts, parse_edges, parse_layer_csv};
use crate::layering::{assign_dlayers, bin_tentative, build_graph, condense, layer_csv, BinEdges, DependencyGraph, LayerAssignment};
use crate::metrics::compute_metrics;
use crate::model::{ClassId, Metric, MetricsTable, TentativeLayer};
use crate::rules::{format_rules, learn_ripper, LearnerParams, RuleSet};
use crate::stats::{correlation_matrix, describe, select_correlated, select_defined, stat_columns, CorrelationMatrix, DecimalStyle, DescriptiveStats, DLAYER};
use crate::synth::{generate, SynthParams};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    ClassFacts(PathBuf),
    MetricsEdges { metrics: PathBuf, edges: PathBuf },
    Synth(Box<SynthParams>),
}

/// Labels that supervise discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Supervision {
    #[default]
    Tentative,
    DLayer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: InputSource,
    /// Significance threshold for metric selection.
    pub alpha: f64,
    pub learner: LearnerParams,
    pub eval: EvalMode,
    pub decimal: DecimalStyle,
    pub supervise: Supervision,
    /// Off keeps every metric with a defined correlation.
    pub filter_by_significance: bool,
    /// Optional `class,layer` ground truth.
    pub truth: Option<PathBuf>,
    pub project: String,
}

impl PipelineConfig {
    pub fn new(input: InputSource) -> Self {
        PipelineConfig {
            input,
            alpha: 0.05,
            learner: LearnerParams::default(),
            eval: EvalMode::Resubstitution,
            decimal: DecimalStyle::Dot,
            supervise: Supervision::Tentative,
            filter_by_significance: true,
            truth: None,
            project: "system".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParams(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if let EvalMode::CrossValidation { folds } = self.eval {
            if folds < 2 {
                return Err(Error::InvalidParams(format!("cross-validation needs at least 2 folds, got {folds}")));
            }
        }
        Ok(())
    }
}

/// Parsed inputs shared by every entry mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineInput {
    pub graph: DependencyGraph,
    pub metrics: MetricsTable,
    pub truth: Option<BTreeMap<ClassId, TentativeLayer>>,
}

/// Graph nodes are the metric rows; an edge endpoint outside them is an error.
pub fn input_from_texts(metrics: &str, edges: &str) -> Result<PipelineInput> {
    let metrics = parse_ckjm_metrics(metrics).stage(Stage::Ingest)?;
    let edges = parse_edges(edges).stage(Stage::Ingest)?;
    let graph = DependencyGraph::from_edge_list(metrics.keys().cloned(), &edges).stage(Stage::Ingest)?;
    Ok(PipelineInput { graph, metrics, truth: None })
}

pub fn input_from_class_facts(document: &str) -> Result<PipelineInput> {
    let model = parse_class_facts(document).stage(Stage::Ingest)?;
    let graph = build_graph(&model);
    let metrics = compute_metrics(&model);
    Ok(PipelineInput { graph, metrics, truth: None })
}

pub fn load_input(config: &PipelineConfig) -> Result<PipelineInput> {
    let mut input = match &config.input {
        InputSource::ClassFacts(path) => input_from_class_facts(&read_text(path)?)?,
        InputSource::MetricsEdges { metrics, edges } => input_from_texts(&read_text(metrics)?, &read_text(edges)?)?,
        InputSource::Synth(params) => {
            let sys = generate(params).stage(Stage::Synth)?;
            PipelineInput { graph: sys.graph, metrics: sys.metrics, truth: Some(sys.truth) }
        }
    };
    if let Some(path) = &config.truth {
        input.truth = Some(parse_layer_csv(&read_text(path)?).stage(Stage::Ingest)?);
    }
    Ok(input)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerStage {
    pub assignment: LayerAssignment,
    pub bins: BinEdges,
    pub tentative: BTreeMap<ClassId, TentativeLayer>,
    pub components: usize,
}

impl LayerStage {
    /// `class,dlayer,tentative_layer`.
    pub fn to_csv(&self) -> String {
        layer_csv(&self.assignment, &self.tentative)
    }

    /// Inverse of [`LayerStage::to_csv`]; `components` is not recoverable and is left 0.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut dlayer_of = BTreeMap::new();
        let mut tentative = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() || row.starts_with('#') || (line == 1 && row.starts_with("class,")) {
                continue;
            }
            let schema = |message: String| Error::Schema { line, message };
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            let [class, dlayer, layer] = fields[..] else {
                return Err(schema(format!("expected 3 fields, found {}", fields.len())));
            };
            let id = ClassId::new(class)?;
            let d: u32 = dlayer.parse().map_err(|_| schema(format!("bad D-layer `{dlayer}`")))?;
            let l = layer
                .parse::<u8>()
                .ok()
                .and_then(TentativeLayer::from_index)
                .ok_or_else(|| schema(format!("bad layer `{layer}`")))?;
            if dlayer_of.insert(id.clone(), d).is_some() {
                return Err(Error::DuplicateClass(id.to_string()));
            }
            tentative.insert(id, l);
        }
        let max_layer = dlayer_of.values().copied().max().unwrap_or(0);
        let bins = BinEdges::for_max_layer(max_layer)?;
        Ok(LayerStage {
            assignment: LayerAssignment { dlayer_of, max_layer },
            bins,
            tentative,
            components: 0,
        })
    }
}

pub fn stage_layers(graph: &DependencyGraph) -> Result<LayerStage> {
    let cond = condense(graph);
    let assignment = assign_dlayers(&cond);
    let (bins, tentative) = bin_tentative(&assignment).stage(Stage::Layering)?;
    Ok(LayerStage { assignment, bins, tentative, components: cond.components.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsStage {
    /// D-layer first, then metrics in listing order.
    pub descriptive: Vec<(String, DescriptiveStats)>,
    pub correlations: CorrelationMatrix,
    pub selected: Vec<Metric>,
}

/// Halts with [`Error::NoSignificantMetric`] when nothing is selected.
pub fn stage_stats(metrics: &MetricsTable, assignment: &LayerAssignment, alpha: f64, filter: bool) -> Result<StatsStage> {
    let run = || -> Result<StatsStage> {
        let columns = stat_columns(metrics, assignment)?;
        let descriptive = columns
            .iter()
            .map(|(name, values)| describe(values).map(|d| (name.clone(), d)))
            .collect::<Result<_>>()?;
        let correlations = correlation_matrix(metrics, assignment)?;
        let selected = if filter { select_correlated(&correlations, alpha) } else { select_defined(&correlations) };
        if selected.is_empty() {
            return Err(Error::NoSignificantMetric(alpha));
        }
        Ok(StatsStage { descriptive, correlations, selected })
    };
    run().stage(Stage::Stats)
}

/// Bins the selected metrics and labels each class with its tentative layer.
pub fn stage_discretize(
    metrics: &MetricsTable,
    layers: &LayerStage,
    selected: &[Metric],
    supervise: Supervision,
) -> Result<(BinningScheme, NominalDataset)> {
    let run = || -> Result<(BinningScheme, NominalDataset)> {
        let labels: BTreeMap<ClassId, u32> = match supervise {
            Supervision::Tentative => layers.tentative.iter().map(|(id, l)| (id.clone(), u32::from(l.index()))).collect(),
            Supervision::DLayer => layers.assignment.dlayer_of.clone(),
        };
        let scheme = build_scheme(metrics, &labels, selected)?;
        if scheme.usable().next().is_none() {
            return Err(Error::NoUsableAttribute);
        }
        let dataset = apply_bins(metrics, &layers.tentative, &scheme)?;
        Ok((scheme, dataset))
    };
    run().stage(Stage::Discretize)
}

pub fn stage_rules(dataset: &NominalDataset, params: &LearnerParams) -> Result<RuleSet> {
    learn_ripper(dataset, params).stage(Stage::Rules)
}

/// Resubstitution scores `ruleset`; cross-validation retrains per fold.
pub fn stage_eval(
    dataset: &NominalDataset,
    ruleset: &RuleSet,
    mode: EvalMode,
    params: &LearnerParams,
) -> Result<(EvaluationReport, Vec<String>)> {
    let run = || -> Result<(EvaluationReport, Vec<String>)> {
        match mode {
            EvalMode::Resubstitution => {
                let cm = confusion(&ruleset.predict_dataset(dataset), &dataset.labels())?;
                Ok((precision_recall(&cm, mode), Vec::new()))
            }
            EvalMode::CrossValidation { folds } => {
                let cv = eval::cross_validate(dataset, folds, params.seed, params)?;
                Ok((cv.report, cv.warnings))
            }
        }
    };
    run().stage(Stage::Eval)
}

/// Every artifact of one run. Rendering is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub project: String,
    pub decimal: DecimalStyle,
    pub graph_edges: usize,
    pub layers: LayerStage,
    pub metrics: MetricsTable,
    pub stats: StatsStage,
    pub scheme: BinningScheme,
    pub dataset: NominalDataset,
    pub ruleset: RuleSet,
    pub evaluation: EvaluationReport,
    pub predictions: BTreeMap<ClassId, TentativeLayer>,
    /// Rule predictions scored against supplied ground truth.
    pub truth_evaluation: Option<EvaluationReport>,
    pub warnings: Vec<String>,
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle> {
    config.validate()?;
    let input = load_input(config)?;
    analyze(&input, config)
}

pub fn analyze(input: &PipelineInput, config: &PipelineConfig) -> Result<ReportBundle> {
    config.validate()?;
    let layers = stage_layers(&input.graph)?;
    let stats = stage_stats(&input.metrics, &layers.assignment, config.alpha, config.filter_by_significance)?;
    let (scheme, dataset) = stage_discretize(&input.metrics, &layers, &stats.selected, config.supervise)?;
    let ruleset = stage_rules(&dataset, &config.learner)?;
    let (evaluation, warnings) = stage_eval(&dataset, &ruleset, config.eval, &config.learner)?;
    let predictions = ruleset.predict_dataset(&dataset);
    let truth_evaluation = match &input.truth {
        Some(truth) => {
            let cm = confusion(&predictions, truth).stage(Stage::Eval)?;
            Some(precision_recall(&cm, EvalMode::Resubstitution))
        }
        None => None,
    };
    Ok(ReportBundle {
        project: config.project.clone(),
        decimal: config.decimal,
        graph_edges: input.graph.edge_count(),
        layers,
        metrics: input.metrics.clone(),
        stats,
        scheme,
        dataset,
        ruleset,
        evaluation,
        predictions,
        truth_evaluation,
        warnings,
    })
}

fn decimal(style: DecimalStyle, text: String) -> String {
    match style {
        DecimalStyle::Dot => text,
        DecimalStyle::Comma => text.replace('.', ","),
    }
}

/// Bin range labels per descriptive row; empty for metrics that were not binned.
fn bin_labels(name: &str, layers: &LayerStage, scheme: &BinningScheme) -> Vec<String> {
    if name == DLAYER {
        return layers.bins.labels().to_vec();
    }
    scheme.get(name).map(|a| a.integer_ranges()).unwrap_or_default()
}

/// Min, Max, Mean, Std. Deviation and `Bin=k` columns.
pub fn descriptive_markdown(stats: &StatsStage, layers: &LayerStage, scheme: &BinningScheme, style: DecimalStyle) -> String {
    let rows: Vec<(String, &DescriptiveStats, Vec<String>)> = stats
        .descriptive
        .iter()
        .map(|(name, d)| (name.clone(), d, bin_labels(name, layers, scheme)))
        .collect();
    let width = rows.iter().map(|r| r.2.len()).max().unwrap_or(0);
    let mut out = String::from("| | Min | Max | Mean | Std. Deviation |");
    for k in 1..=width {
        let _ = write!(out, " Bin={k} |");
    }
    out.push_str("\n|---|---|---|---|---|");
    out.push_str(&"---|".repeat(width));
    out.push('\n');
    for (name, d, bins) in rows {
        let _ = write!(
            out,
            "| {name} | {} | {} | {} | {} |",
            d.min,
            d.max,
            decimal(style, format!("{:.2}", d.mean)),
            decimal(style, format!("{:.3}", d.std_dev))
        );
        for k in 0..width {
            let _ = write!(out, " {} |", bins.get(k).map_or("", String::as_str));
        }
        out.push('\n');
    }
    out
}

/// `attribute,min,max,mean,std_dev,bins` with bins joined by `;`.
pub fn descriptive_csv(stats: &StatsStage, layers: &LayerStage, scheme: &BinningScheme) -> String {
    let mut out = String::from("attribute,min,max,mean,std_dev,bins\n");
    for (name, d) in &stats.descriptive {
        let bins = bin_labels(name, layers, scheme).join(";");
        let _ = writeln!(out, "{name},{},{},{:.6},{:.6},{bins}", d.min, d.max, d.mean, d.std_dev);
    }
    out
}

impl ReportBundle {
    fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "project: {}", self.project);
        let _ = writeln!(out, "classes: {}", self.metrics.len());
        let _ = writeln!(out, "dependencies: {}", self.graph_edges);
        let _ = writeln!(out, "components: {}", self.layers.components);
        let _ = writeln!(out, "max D-layer: {}", self.layers.assignment.max_layer);
        let _ = writeln!(out, "D-layer bins: {}", self.layers.bins.labels().join(" | "));
        let selected: Vec<&str> = self.stats.selected.iter().map(|m| m.name()).collect();
        let _ = writeln!(out, "selected metrics: {}", selected.join(", "));
        let binned: Vec<&str> = self.dataset.attributes.iter().map(String::as_str).collect();
        let _ = writeln!(out, "binned attributes: {}", binned.join(", "));
        let _ = writeln!(out, "rules: {}", self.ruleset.rules.len() + 1);
        let _ = writeln!(out, "evaluation: {}", self.evaluation.mode);
        let _ = writeln!(out, "accuracy: {:.6}", self.evaluation.accuracy);
        let _ = writeln!(out, "macro precision: {:.6}", self.evaluation.macro_precision());
        let _ = writeln!(out, "macro recall: {:.6}", self.evaluation.macro_recall());
        if let Some(t) = &self.truth_evaluation {
            let _ = writeln!(out, "truth accuracy: {:.6}", t.accuracy);
            let _ = writeln!(out, "truth macro precision: {:.6}", t.macro_precision());
            let _ = writeln!(out, "truth macro recall: {:.6}", t.macro_recall());
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }

    /// File name and contents of every artifact, in a fixed order.
    pub fn files(&self) -> Vec<(&'static str, String)> {
        let mut files = vec![
            ("layers.csv", self.layers.to_csv()),
            ("descriptive.md", descriptive_markdown(&self.stats, &self.layers, &self.scheme, self.decimal)),
            ("descriptive.csv", descriptive_csv(&self.stats, &self.layers, &self.scheme)),
            ("correlations.csv", self.stats.correlations.to_csv()),
            ("correlations.md", self.stats.correlations.to_markdown(self.decimal)),
            ("dataset.csv", self.dataset.to_csv()),
            ("rules.txt", format_rules(&self.ruleset)),
            ("rules.jsonl", self.ruleset.to_jsonl()),
            ("predictions.csv", format_layer_csv(&self.predictions)),
            ("accuracy.csv", self.evaluation.to_csv()),
            ("accuracy.md", accuracy_markdown(&[(&self.project, &self.evaluation)])),
        ];
        if let Some(t) = &self.truth_evaluation {
            files.push(("truth_accuracy.csv", t.to_csv()));
            files.push(("truth_accuracy.md", accuracy_markdown(&[(&self.project, t)])));
        }
        files.push(("summary.txt", self.summary()));
        files
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, contents) in self.files() {
            write_text(&dir.join(name), &contents).stage(Stage::Report)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MetricVector;

    fn synth_config(per_layer: usize) -> PipelineConfig {
        let params = SynthParams { classes_per_layer: [per_layer; 4], ..SynthParams::default() };
        PipelineConfig::new(InputSource::Synth(Box::new(params)))
    }

    #[test]
    fn synth_run_is_deterministic() {
        let config = synth_config(30);
        let a = run_pipeline(&config).unwrap();
        let b = run_pipeline(&config).unwrap();
        assert_eq!(a.files(), b.files());
        assert!(a.truth_evaluation.is_some());
    }

    #[test]
    fn layer_csv_round_trip() {
        let bundle = run_pipeline(&synth_config(10)).unwrap();
        let text = bundle.layers.to_csv();
        let parsed = LayerStage::from_csv(&text).unwrap();
        assert_eq!(parsed.assignment, bundle.layers.assignment);
        assert_eq!(parsed.tentative, bundle.layers.tentative);
        assert_eq!(parsed.to_csv(), text);
    }

    #[test]
    fn shallow_graph_halts_with_code_3() {
        let mut ckjm = String::new();
        for i in 0..6 {
            ckjm.push_str(&format!("c{i} {} 1 0 {i} 3 0 0 1\n", i + 1));
        }
        let input = input_from_texts(&ckjm, "c1 -> c0\nc2 -> c1\n").unwrap();
        let err = analyze(&input, &PipelineConfig::new(InputSource::Synth(Box::default()))).unwrap_err();
        assert!(matches!(&err, Error::Stage { stage: Stage::Layering, .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn unknown_edge_endpoint_is_ingest_error() {
        let err = input_from_texts("a 1 1 0 0 1 0 0 1\n", "a -> b\n").unwrap_err();
        assert!(matches!(err, Error::Stage { stage: Stage::Ingest, .. }));
    }

    #[test]
    fn uncorrelated_metrics_halt() {
        // Chain of 8 with metrics constant except an alternating WMC.
        let mut metrics = MetricsTable::new();
        let mut edges = String::new();
        for i in 0..8u64 {
            let id = ClassId::new(format!("k{i}")).unwrap();
            metrics.insert(id, MetricVector::from_array([1 + i % 2, 1, 0, 0, 1, 0, 0, 1]));
            if i > 0 {
                edges.push_str(&format!("k{i} -> k{}\n", i - 1));
            }
        }
        let graph = DependencyGraph::from_edge_list(metrics.keys().cloned(), &parse_edges(&edges).unwrap()).unwrap();
        let input = PipelineInput { graph, metrics, truth: None };
        let err = analyze(&input, &synth_config(1)).unwrap_err();
        assert!(matches!(&err, Error::Stage { stage: Stage::Stats, .. }), "{err}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn descriptive_layout_mirrors_tables() {
        let bundle = run_pipeline(&synth_config(20)).unwrap();
        let md = descriptive_markdown(&bundle.stats, &bundle.layers, &bundle.scheme, DecimalStyle::Dot);
        let mut lines = md.lines();
        assert!(lines.next().unwrap().starts_with("| | Min | Max | Mean | Std. Deviation | Bin=1 |"));
        let dl = md.lines().find(|l| l.starts_with("| D-layer |")).unwrap();
        assert!(dl.contains("| 0 | 3 |") && dl.contains("| 0 | 1 | 2 | 3 |"), "{dl}");
    }

    #[test]
    fn rejects_bad_config() {
        let mut config = synth_config(5);
        config.alpha = 0.0;
        assert!(run_pipeline(&config).is_err());
        config.alpha = 0.05;
        config.eval = EvalMode::CrossValidation { folds: 1 };
        assert!(run_pipeline(&config).is_err());
    }
}
