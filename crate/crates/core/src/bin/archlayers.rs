//! Batch front end: `run` executes the whole pipeline; the other
//! subcommands execute one stage each and exchange the plain-text formats.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use archlayers::error::{Error, Result};
use archlayers::eval::{accuracy_markdown, EvalMode};
use archlayers::ingest::{format_ckjm, format_class_facts, format_edges, format_layer_csv, parse_class_facts, parse_edges};
use archlayers::pipeline::{
    descriptive_csv, descriptive_markdown, input_from_class_facts, input_from_texts, read_text, run_pipeline, stage_discretize,
    stage_eval, stage_layers, stage_rules, stage_stats, write_text, InputSource, LayerStage, PipelineConfig, PipelineInput,
    Supervision,
};
use archlayers::rules::{format_rules, parse_rules, LearnerParams};
use archlayers::stats::DecimalStyle;
use archlayers::synth::{generate, generate_class_facts, SynthParams};
use archlayers::{build_graph, compute_metrics, DependencyGraph, NominalDataset};

#[derive(Parser)]
#[command(name = "archlayers", version, about = "Recover tentative architecture layers from dependencies and design metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate inputs, writing them back in canonical form.
    Ingest,
    /// D-layers and tentative layers as `class,dlayer,tentative_layer`.
    Layers,
    /// Design metrics of a class-facts document as ckjm lines.
    Metrics,
    /// Spearman correlation matrix against D-layer.
    Stats,
    /// MDLP bins of the selected metrics and the nominal dataset.
    Discretize,
    /// Learn ordered rules from a nominal dataset.
    Rules,
    /// Precision and recall of rules on a nominal dataset.
    Eval,
    /// Generate a synthetic layered system with planted truth.
    Synth,
    /// Full pipeline and report bundle.
    Run,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputMode {
    ClassFacts,
    MetricsEdges,
    Synth,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decimal {
    Dot,
    Comma,
}

#[derive(Clone, Copy, ValueEnum)]
enum Supervise {
    Tentative,
    Dlayer,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    MetricsEdges,
    ClassFacts,
}

#[derive(clap::Args)]
struct Opts {
    #[arg(long, global = true, value_enum)]
    input_mode: Option<InputMode>,
    #[arg(long, global = true)]
    class_facts: Option<PathBuf>,
    #[arg(long, global = true)]
    metrics: Option<PathBuf>,
    #[arg(long, global = true)]
    edges: Option<PathBuf>,
    /// `class,dlayer,tentative_layer` file from `layers`.
    #[arg(long, global = true)]
    layers: Option<PathBuf>,
    /// `dataset.csv` from `discretize`.
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// `rules.txt` from `rules`.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    /// `class,layer` ground truth.
    #[arg(long, global = true)]
    truth: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// `resub` or `cv:K`.
    #[arg(long, global = true, default_value = "resub", value_parser = parse_eval)]
    eval: EvalMode,
    #[arg(long, global = true, default_value = "archlayers-out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "dot")]
    decimal: Decimal,
    #[arg(long, global = true, value_enum, default_value = "tentative")]
    supervise: Supervise,
    #[arg(long, global = true, value_enum, default_value = "on")]
    filter_by_significance: Toggle,
    #[arg(long, global = true, default_value = "system")]
    project: String,
    #[arg(long, global = true, default_value_t = 100)]
    classes_per_layer: usize,
    #[arg(long, global = true, default_value_t = 1)]
    levels_per_layer: u32,
    #[arg(long, global = true, default_value_t = 0.05)]
    down_prob: f64,
    #[arg(long, global = true, default_value_t = 0.01)]
    skip_prob: f64,
    #[arg(long, global = true, default_value_t = 0.0)]
    cycle_prob: f64,
    /// Format written by `synth`.
    #[arg(long, global = true, value_enum, default_value = "metrics-edges")]
    emit: Emit,
}

fn parse_eval(text: &str) -> std::result::Result<EvalMode, String> {
    match text {
        "resub" => Ok(EvalMode::Resubstitution),
        _ => text
            .strip_prefix("cv:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 2)
            .map(|folds| EvalMode::CrossValidation { folds })
            .ok_or_else(|| format!("expected `resub` or `cv:K` with K >= 2, found `{text}`")),
    }
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::InvalidParams(format!("missing --{flag}")))
}

impl Opts {
    fn synth_params(&self) -> SynthParams {
        SynthParams {
            classes_per_layer: [self.classes_per_layer; 4],
            levels_per_layer: self.levels_per_layer,
            down_dep_prob: self.down_prob,
            skip_dep_prob: self.skip_prob,
            cycle_prob: self.cycle_prob,
            seed: self.seed,
            ..SynthParams::default()
        }
    }

    fn mode(&self) -> Result<InputMode> {
        match (self.input_mode, &self.class_facts, &self.metrics, &self.edges) {
            (Some(mode), ..) => Ok(mode),
            (None, Some(_), None, None) => Ok(InputMode::ClassFacts),
            (None, None, Some(_), Some(_)) => Ok(InputMode::MetricsEdges),
            _ => Err(Error::InvalidParams(
                "give --class-facts, or --metrics with --edges, or --input-mode synth".into(),
            )),
        }
    }

    fn source(&self) -> Result<InputSource> {
        Ok(match self.mode()? {
            InputMode::ClassFacts => InputSource::ClassFacts(required(&self.class_facts, "class-facts")?.to_path_buf()),
            InputMode::MetricsEdges => InputSource::MetricsEdges {
                metrics: required(&self.metrics, "metrics")?.to_path_buf(),
                edges: required(&self.edges, "edges")?.to_path_buf(),
            },
            InputMode::Synth => InputSource::Synth(Box::new(self.synth_params())),
        })
    }

    fn learner(&self) -> LearnerParams {
        LearnerParams { seed: self.seed, ..LearnerParams::default() }
    }

    fn decimal(&self) -> DecimalStyle {
        match self.decimal {
            Decimal::Dot => DecimalStyle::Dot,
            Decimal::Comma => DecimalStyle::Comma,
        }
    }

    fn supervision(&self) -> Supervision {
        match self.supervise {
            Supervise::Tentative => Supervision::Tentative,
            Supervise::Dlayer => Supervision::DLayer,
        }
    }

    fn filter(&self) -> bool {
        matches!(self.filter_by_significance, Toggle::On)
    }

    fn config(&self) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::new(self.source()?);
        config.alpha = self.alpha;
        config.learner = self.learner();
        config.eval = self.eval;
        config.decimal = self.decimal();
        config.supervise = self.supervision();
        config.filter_by_significance = self.filter();
        config.truth = self.truth.clone();
        config.project = self.project.clone();
        Ok(config)
    }

    fn emit(&self, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(&self.out).map_err(|e| Error::Io { path: self.out.display().to_string(), source: e })?;
        write_text(&self.out.join(name), contents)
    }

    fn metrics_input(&self) -> Result<PipelineInput> {
        match self.mode()? {
            InputMode::ClassFacts => input_from_class_facts(&read_text(required(&self.class_facts, "class-facts")?)?),
            InputMode::Synth => {
                let sys = generate(&self.synth_params())?;
                Ok(PipelineInput { graph: sys.graph, metrics: sys.metrics, truth: Some(sys.truth) })
            }
            InputMode::MetricsEdges => {
                let metrics = read_text(required(&self.metrics, "metrics")?)?;
                let edges = match &self.edges {
                    Some(p) => read_text(p)?,
                    None => String::new(),
                };
                input_from_texts(&metrics, &edges)
            }
        }
    }
}

fn layers_graph(opts: &Opts) -> Result<DependencyGraph> {
    if let Some(path) = &opts.class_facts {
        return Ok(build_graph(&parse_class_facts(&read_text(path)?)?));
    }
    if opts.metrics.is_some() || matches!(opts.input_mode, Some(InputMode::Synth)) {
        return Ok(opts.metrics_input()?.graph);
    }
    let edges = parse_edges(&read_text(required(&opts.edges, "edges")?)?)?;
    Ok(DependencyGraph::from_edges(&edges))
}

fn execute(command: &Command, opts: &Opts) -> Result<()> {
    match command {
        Command::Ingest => {
            let input = opts.metrics_input()?;
            if let Some(path) = &opts.class_facts {
                opts.emit("classes.jsonl", &format_class_facts(&parse_class_facts(&read_text(path)?)?))?;
            }
            opts.emit("metrics.ckjm", &format_ckjm(&input.metrics))?;
            opts.emit("edges.txt", &format_edges(input.graph.edges().iter().map(|(a, b)| (a, b))))?;
            if let Some(truth) = &input.truth {
                opts.emit("truth.csv", &format_layer_csv(truth))?;
            }
            println!("{} classes, {} dependencies", input.metrics.len(), input.graph.edge_count());
        }
        Command::Layers => {
            let layers = stage_layers(&layers_graph(opts)?)?;
            let csv = layers.to_csv();
            opts.emit("layers.csv", &csv)?;
            print!("{csv}");
        }
        Command::Metrics => {
            let model = parse_class_facts(&read_text(required(&opts.class_facts, "class-facts")?)?)?;
            let text = format_ckjm(&compute_metrics(&model));
            opts.emit("metrics.ckjm", &text)?;
            print!("{text}");
        }
        Command::Stats => {
            let input = opts.metrics_input()?;
            let layers = LayerStage::from_csv(&read_text(required(&opts.layers, "layers")?)?)?;
            let stats = stage_stats(&input.metrics, &layers.assignment, opts.alpha, opts.filter())?;
            let md = stats.correlations.to_markdown(opts.decimal());
            opts.emit("correlations.csv", &stats.correlations.to_csv())?;
            opts.emit("correlations.md", &md)?;
            print!("{md}");
        }
        Command::Discretize => {
            let input = opts.metrics_input()?;
            let layers = LayerStage::from_csv(&read_text(required(&opts.layers, "layers")?)?)?;
            let stats = stage_stats(&input.metrics, &layers.assignment, opts.alpha, opts.filter())?;
            let (scheme, dataset) = stage_discretize(&input.metrics, &layers, &stats.selected, opts.supervision())?;
            let md = descriptive_markdown(&stats, &layers, &scheme, opts.decimal());
            opts.emit("descriptive.md", &md)?;
            opts.emit("descriptive.csv", &descriptive_csv(&stats, &layers, &scheme))?;
            opts.emit("dataset.csv", &dataset.to_csv())?;
            print!("{md}");
        }
        Command::Rules => {
            let dataset = NominalDataset::from_csv(&read_text(required(&opts.dataset, "dataset")?)?)?;
            let ruleset = stage_rules(&dataset, &opts.learner())?;
            let text = format_rules(&ruleset);
            opts.emit("rules.txt", &text)?;
            opts.emit("rules.jsonl", &ruleset.to_jsonl())?;
            print!("{text}");
        }
        Command::Eval => {
            let dataset = NominalDataset::from_csv(&read_text(required(&opts.dataset, "dataset")?)?)?;
            let ruleset = parse_rules(&read_text(required(&opts.rules, "rules")?)?)?;
            let (report, warnings) = stage_eval(&dataset, &ruleset, opts.eval, &opts.learner())?;
            let md = accuracy_markdown(&[(&opts.project, &report)]);
            opts.emit("accuracy.csv", &report.to_csv())?;
            opts.emit("accuracy.md", &md)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            print!("{md}");
        }
        Command::Synth => {
            let params = opts.synth_params();
            match opts.emit {
                Emit::MetricsEdges => {
                    let sys = generate(&params)?;
                    opts.emit("metrics.ckjm", &sys.ckjm_text())?;
                    opts.emit("edges.txt", &sys.edges_text())?;
                    opts.emit("truth.csv", &sys.truth_csv())?;
                }
                Emit::ClassFacts => {
                    let facts = generate_class_facts(&params)?;
                    opts.emit("classes.jsonl", &facts.class_facts_text())?;
                    opts.emit("truth.csv", &facts.truth_csv())?;
                }
            }
            println!("wrote synthetic system to {}", opts.out.display());
        }
        Command::Run => {
            let bundle = run_pipeline(&opts.config()?)?;
            bundle.write(&opts.out)?;
            print!("{}", format_rules(&bundle.ruleset));
            for w in &bundle.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command, &cli.opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
