//! Recovering tentative architecture layers of object-oriented systems from
//! the dependency layering of their classes and CK-style design metrics.
//!
//! The pipeline condenses the class dependency graph, assigns each class a
//! D-layer (longest path to a sink), bins D-layers into four tentative
//! layers, keeps the metrics whose Spearman correlation with D-layer is
//! significant, discretizes them with MDLP and learns ordered rules that
//! predict the tentative layer from metric bins.

pub mod discretize;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod layering;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod rules;
pub mod stats;
pub mod synth;

pub use discretize::{apply_bins, build_scheme, mdlp_discretize, BinningScheme, NominalDataset, NominalRow};
pub use error::{Error, Result, Stage};
pub use eval::{confusion, cross_validate, precision_recall, ConfusionMatrix, EvalMode, EvaluationReport};
pub use layering::{assign_dlayers, bin_tentative, build_graph, condense, DependencyGraph, LayerAssignment};
pub use metrics::compute_metrics;
pub use model::{ClassFacts, ClassId, ClassModel, Metric, MetricVector, MetricsTable, TentativeLayer};
pub use pipeline::{run_pipeline, InputSource, PipelineConfig, ReportBundle, Supervision};
pub use rules::{format_rules, learn_ripper, parse_rules, LearnerParams, Rule, RuleSet};
pub use stats::{correlation_matrix, spearman, CorrelationMatrix, DecimalStyle};
pub use synth::{generate, generate_class_facts, SynthParams};
