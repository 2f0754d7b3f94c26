use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use netclass::bench::{evaluate, reports_to_json, Comparison, ExperimentSpec};
use netclass::bundle::{GraphBundle, Trained};
use netclass::dataset::{
    load_csv, read_unlabeled_csv, ColumnRef, LoadOptions, NormalizationPolicy,
};
use netclass::export::{to_dot, to_graphml};
use netclass::hlclass::{ClassifierConfig, HighLevelClassifier, Insertion, Scoring};
use netclass::measures::{
    betweenness_centrality, connected_components, degree_assortativity, local_clustering,
};
use netclass::netbuild::{ConstructionConfig, EpsilonPolicy, InstanceStage, Method};
use netclass::{Error, Result};

/// Label-aware network construction and betweenness-based classification.
#[derive(Parser)]
#[command(author, version, about, long_about = None)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a network from a dataset and save it as a bundle.
    Build(BuildArgs),
    /// Per-node measures of a network as CSV.
    Measure(MeasureArgs),
    /// Classify unlabeled rows against a network.
    Classify(ClassifyArgs),
    /// Repeated stratified cross-validation.
    Evaluate(EvaluateArgs),
    /// Write a network as GraphML or DOT.
    Export(ExportArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Training CSV; relative paths also resolve against --data-dir.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Directory searched for relative --data paths.
    #[arg(long, env = "NETCLASS_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Label column: header name or zero-based index.
    #[arg(long)]
    label: Option<ColumnRef>,
    /// The CSV has no header row.
    #[arg(long)]
    no_header: bool,
    /// Columns to drop, comma separated.
    #[arg(long, value_delimiter = ',')]
    ignore: Vec<ColumnRef>,
    /// none, min-max or z-score.
    #[arg(long, default_value = "none")]
    normalize: NormalizationPolicy,
}

#[derive(Args, Clone)]
struct ConstructionArgs {
    /// knn, knn-eps (alias baseline) or meta.
    #[arg(long, default_value = "knn-eps")]
    method: Method,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Fixed ε; the median kNN distance is used when absent.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Instance-level edges added by meta: hybrid, knn, radius or none.
    #[arg(long, default_value = "hybrid")]
    instance_stage: InstanceStage,
}

#[derive(Args, Clone)]
struct ClassifierArgs {
    /// Use uniform class priors.
    #[arg(long)]
    no_priors: bool,
    /// unlabeled or per-class.
    #[arg(long, default_value = "unlabeled")]
    insertion: Insertion,
    /// link-weighted or perturbation.
    #[arg(long, default_value = "link-weighted")]
    scoring: Scoring,
    /// δ in the perturbation denominator.
    #[arg(long, default_value_t = 1e-12)]
    stabilizer: f64,
}

#[derive(Args)]
struct SourceArgs {
    /// Bundle written by `build`; replaces the dataset and construction flags.
    #[arg(long)]
    bundle: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    construction: ConstructionArgs,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    construction: ConstructionArgs,
    /// Bundle output path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    export_graphml: Option<PathBuf>,
    #[arg(long)]
    export_dot: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Report raw instead of normalized betweenness.
    #[arg(long)]
    raw_betweenness: bool,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    /// CSV of rows to classify, attributes only.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    input_no_header: bool,
    /// Columns of the input to drop, comma separated.
    #[arg(long, value_delimiter = ',')]
    input_ignore: Vec<ColumnRef>,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    construction: ConstructionArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    /// Name shown in reports (default: file stem of --data).
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Required; fold assignment depends on it.
    #[arg(long)]
    seed: Option<u64>,
    /// Several experiments as `method[:k]` items, e.g. `knn-eps:1,meta:2`.
    #[arg(long, value_delimiter = ',')]
    compare: Vec<String>,
    /// Full per-fold JSON report.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Leave wall-time out of the JSON report.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    markdown: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Graphml,
    Dot,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value = "graphml")]
    format: Format,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl DataArgs {
    fn path(&self) -> Result<PathBuf> {
        let data = self
            .data
            .as_ref()
            .ok_or_else(|| usage("--data is required"))?;
        match &self.data_dir {
            Some(dir) if data.is_relative() && !data.exists() => Ok(dir.join(data)),
            _ => Ok(data.clone()),
        }
    }

    fn load_options(&self) -> Result<LoadOptions> {
        let label = self
            .label
            .clone()
            .ok_or_else(|| usage("--label is required"))?;
        Ok(LoadOptions {
            label,
            has_header: !self.no_header,
            ignore: self.ignore.clone(),
        })
    }
}

impl ConstructionArgs {
    fn config(&self) -> ConstructionConfig {
        self.config_for(self.method, self.k)
    }

    fn config_for(&self, method: Method, k: usize) -> ConstructionConfig {
        ConstructionConfig {
            epsilon: self
                .epsilon
                .map_or(EpsilonPolicy::MedianKnnDistances, EpsilonPolicy::Fixed),
            instance_stage: self.instance_stage,
            ..ConstructionConfig::new(method, k)
        }
    }
}

impl SourceArgs {
    /// Reopens the bundle, or trains from the dataset flags.
    fn trained(&self) -> Result<Trained> {
        match &self.bundle {
            Some(path) => {
                let override_path = self
                    .data
                    .data
                    .as_ref()
                    .map(|_| self.data.path())
                    .transpose()?;
                GraphBundle::read(path)?.open(override_path.as_deref())
            }
            None => {
                let (_, trained) = GraphBundle::train(
                    &self.data.path()?,
                    self.data.load_options()?,
                    self.data.normalize,
                    &self.construction.config(),
                )?;
                Ok(trained)
            }
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_build(args: &BuildArgs) -> Result<()> {
    let data = args.data.path()?;
    let (bundle, trained) = GraphBundle::train(
        &data,
        args.data.load_options()?,
        args.data.normalize,
        &args.construction.config(),
    )?;
    let g = &trained.network.graph;
    let names = trained.dataset.class_names();
    if let Some(out) = &args.out {
        bundle.write(out)?;
    }
    if let Some(out) = &args.export_graphml {
        emit(Some(out), &to_graphml(g, names))?;
    }
    if let Some(out) = &args.export_dot {
        emit(Some(out), &to_dot(g, names))?;
    }
    let eps = trained
        .network
        .epsilon
        .map_or(String::new(), |e| format!(" epsilon={}", e.value));
    println!(
        "nodes={} edges={} components={}{eps}",
        g.node_count(),
        g.edge_count(),
        connected_components(g).count
    );
    Ok(())
}

fn cmd_measure(args: &MeasureArgs) -> Result<()> {
    let trained = args.source.trained()?;
    let g = &trained.network.graph;
    let names = trained.dataset.class_names();
    let bc = betweenness_centrality(g, !args.raw_betweenness);
    let cc = local_clustering(g);
    let comps = connected_components(g);
    let mut out = String::from("node_id,instance,label,degree,betweenness,clustering,component\n");
    for v in 0..g.node_count() {
        let label = g.label(v).map_or("?".to_string(), |c| names[c].clone());
        let instance = g.instance(v).map_or(-1, |i| i as i64);
        out.push_str(&format!(
            "{v},{instance},{},{},{},{},{}\n",
            csv_field(&label),
            g.degree(v),
            bc.values[v],
            cc.values[v],
            comps.ids[v]
        ));
    }
    emit(args.out.as_deref(), &out)?;
    match degree_assortativity(g) {
        Ok(r) => eprintln!("assortativity={r}"),
        Err(e) => eprintln!("assortativity undefined: {e}"),
    }
    Ok(())
}

fn classifier_config(construction: ConstructionConfig, args: &ClassifierArgs) -> ClassifierConfig {
    ClassifierConfig {
        use_priors: !args.no_priors,
        stabilizer: args.stabilizer,
        insertion: args.insertion,
        scoring: args.scoring,
        ..ClassifierConfig::new(construction)
    }
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let Trained {
        dataset,
        normalizer,
        network,
    } = args.source.trained()?;
    let cfg = classifier_config(network.config, &args.classifier);
    let clf = HighLevelClassifier::from_network(&dataset, network, cfg)?;
    let rows: Vec<Vec<f64>> =
        read_unlabeled_csv(&args.input, !args.input_no_header, &args.input_ignore)?
            .iter()
            .map(|x| normalizer.apply_row(x))
            .collect();
    let names = dataset.class_names();
    let mut out = String::from("row_index,predicted_class");
    for prefix in ["posterior", "perturbation"] {
        for n in names {
            out.push_str(&format!(",{}", csv_field(&format!("{prefix}_{n}"))));
        }
    }
    out.push('\n');
    for (i, r) in clf.predict_batch(&rows).into_iter().enumerate() {
        let r = r?;
        out.push_str(&format!("{i},{}", csv_field(&names[r.predicted])));
        for p in &r.posterior {
            out.push_str(&format!(",{p}"));
        }
        for p in &r.perturbation {
            out.push_str(&p.map_or(",".to_string(), |p| format!(",{p}")));
        }
        out.push('\n');
    }
    emit(args.out.as_deref(), &out)
}

/// `method[:k]`, with `k` defaulting to `--k`.
fn parse_compare_item(item: &str, default_k: usize) -> Result<(Method, usize)> {
    let (method, k) = match item.split_once(':') {
        Some((m, k)) => (
            m,
            k.trim()
                .parse()
                .map_err(|_| usage(format!("bad k in {item:?}")))?,
        ),
        None => (item, default_k),
    };
    Ok((method.parse()?, k))
}

/// Returns whether every experiment produced at least one fold accuracy.
fn cmd_evaluate(args: &EvaluateArgs) -> Result<bool> {
    let seed = args
        .seed
        .ok_or_else(|| usage("--seed is required; evaluation results depend on it"))?;
    let data = args.data.path()?;
    let load = args.data.load_options()?;
    let name = args.name.clone().unwrap_or_else(|| {
        data.file_stem()
            .map_or("dataset".into(), |s| s.to_string_lossy().into_owned())
    });
    let runs: Vec<(Method, usize)> = if args.compare.is_empty() {
        vec![(args.construction.method, args.construction.k)]
    } else {
        args.compare
            .iter()
            .map(|item| parse_compare_item(item, args.construction.k))
            .collect::<Result<_>>()?
    };
    let raw = load_csv(&data, &load)?;
    let mut reports = Vec::new();
    for (method, k) in runs {
        let construction = args.construction.config_for(method, k);
        let cfg = classifier_config(construction, &args.classifier);
        let spec = ExperimentSpec {
            normalization: args.data.normalize,
            use_priors: cfg.use_priors,
            insertion: cfg.insertion,
            scoring: cfg.scoring,
            fold_count: args.folds,
            repeats: args.repeats,
            ..ExperimentSpec::new(name.clone(), &data, load.clone(), construction, seed)
        };
        let report = evaluate(&raw, &spec)?;
        if report.errored_folds > 0 {
            eprintln!(
                "warning: {} ({k}): {} of {} folds errored",
                method,
                report.errored_folds,
                report.folds.len()
            );
        }
        reports.push(report);
    }
    let complete = reports.iter().all(|r| r.mean.is_some());
    if let Some(path) = &args.json {
        emit(Some(path), &reports_to_json(&reports, !args.no_timing)?)?;
    }
    let table = Comparison::from_reports(reports);
    if let Some(path) = &args.markdown {
        emit(Some(path), &table.to_markdown())?;
    }
    if let Some(path) = &args.csv {
        emit(Some(path), &table.to_csv())?;
    }
    print!("{}", table.to_markdown());
    Ok(complete)
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let trained = args.source.trained()?;
    let (g, names) = (&trained.network.graph, trained.dataset.class_names());
    let text = match args.format {
        Format::Graphml => to_graphml(g, names),
        Format::Dot => to_dot(g, names),
    };
    emit(args.out.as_deref(), &text)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Build(a) => cmd_build(a).map(|_| true),
        Command::Measure(a) => cmd_measure(a).map(|_| true),
        Command::Classify(a) => cmd_classify(a).map(|_| true),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Export(a) => cmd_export(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: at least one experiment had no successful fold");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
