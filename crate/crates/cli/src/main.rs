//! `biclab`: generate ensembles, extract features, label, train and evaluate
//! the classifier, solve single instances, and run sweeps.
//!
//! Exit codes: 0 success (or Found / YES for `solve`), 1 NoSolution / NO,
//! 2 unknown (budget exhausted), 64 usage error, 65 malformed input data,
//! 74 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bicliquelab::dtree::{
    evaluate, extract_rules, kfold_cv, stratified_split, train_c45, write_pr_csv, write_roc_csv,
    DecisionTree, TrainParams,
};
use bicliquelab::exec::Exec;
use bicliquelab::features::{
    extract_features, label_instance, read_features_csv, write_features_csv,
};
use bicliquelab::phaselab::{
    run_distance_sweep, run_sweep, write_distance_csv, write_sweep_csv, EnsembleConfig,
};
use bicliquelab::solver::{Solver, Verdict};
use bicliquelab::{Error, ObservationLog, Outcome, Pruning, SearchBudget, SolveOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_NO: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(
    name = "biclab",
    version,
    about = "Biclique search and phase-transition experiments"
)]
struct Cli {
    /// Seed for every random choice; overrides the seed in ensemble configs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the main output here instead of stdout (a directory for `gen`).
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// More progress on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Do not echo the resolved configuration on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write each instance of an ensemble as a graph file (observation log).
    Gen(GenArgs),
    /// Compute the feature vector of each graph file as CSV.
    Features(FeaturesArgs),
    /// Compute features and a budget-based EASY/HARD label per graph file.
    Label(LabelArgs),
    /// Train a decision tree on a labeled CSV and report validation metrics.
    Train(TrainArgs),
    /// Evaluate a saved tree on a labeled CSV; optionally write ROC/PR CSVs.
    Eval(EvalArgs),
    /// Search one graph for a biclique.
    Solve(SolveArgs),
    /// Binned phase-transition sweep over an ensemble.
    Sweep(SweepArgs),
    /// Cost against distance d = z_max - z over an ensemble.
    Dsweep(DsweepArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Ensemble configuration (JSON).
    config: PathBuf,
}

#[derive(Args, Debug)]
struct FeaturesArgs {
    /// Graph files; each line is one `actor target` observation.
    #[arg(required = true)]
    graphs: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct LabelArgs {
    #[arg(required = true)]
    graphs: Vec<PathBuf>,
    /// Combinations allowed before an instance is labeled HARD.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Labeled feature CSV.
    data: PathBuf,
    /// Where to save the tree as indented text.
    #[arg(long, value_name = "PATH")]
    tree: Option<PathBuf>,
    /// Where to save the tree as JSON.
    #[arg(long, value_name = "PATH")]
    tree_json: Option<PathBuf>,
    /// Fraction of each class used for training; the rest validates.
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    /// Cross-validation folds over the whole dataset; 0 skips it.
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = TrainParams::default().min_leaf)]
    min_leaf: usize,
    #[arg(long, default_value_t = TrainParams::default().max_depth)]
    max_depth: usize,
    #[arg(long, default_value_t = 0.0)]
    min_gain_ratio: f64,
    /// Apply error-based pruning.
    #[arg(long)]
    prune: bool,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Tree file, JSON or indented text.
    #[arg(long)]
    tree: PathBuf,
    /// Labeled feature CSV.
    data: PathBuf,
    #[arg(long, value_name = "PATH")]
    roc: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pr: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PruningArg {
    Subset,
    Literal,
    Off,
}

impl From<PruningArg> for Pruning {
    fn from(p: PruningArg) -> Self {
        match p {
            PruningArg::Subset => Pruning::Subset,
            PruningArg::Literal => Pruning::Literal,
            PruningArg::Off => Pruning::Off,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Graph file (edge list / observation log).
    graph: PathBuf,
    /// Required size |V'|.
    #[arg(long)]
    z: usize,
    /// Required weight |U'|; turns the search into a yes/no decision.
    #[arg(long, conflicts_with = "max_weight")]
    t: Option<usize>,
    /// Return the heaviest biclique of size z.
    #[arg(long)]
    max_weight: bool,
    /// Cap on combinations explored.
    #[arg(long)]
    budget: Option<u64>,
    /// Search even when the gram bound rules z out.
    #[arg(long)]
    no_guarantee_check: bool,
    #[arg(long, value_enum, default_value_t = PruningArg::Subset)]
    pruning: PruningArg,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Ensemble configuration (JSON).
    config: PathBuf,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct DsweepArgs {
    config: PathBuf,
    /// Distances to run, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "-1,0,1,2,3"
    )]
    d: Vec<i64>,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => EXIT_IO,
            Error::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult<T = u8> = Result<T, Failure>;

struct Ctx {
    seed: Option<u64>,
    output: Option<PathBuf>,
    verbose: u8,
    quiet: bool,
}

impl Ctx {
    fn echo<T: Serialize>(&self, command: &str, config: &T) {
        if !self.quiet {
            let json = serde_json::to_string(config).expect("config serializes");
            eprintln!("# biclab {command} {json}");
        }
    }

    fn note(&self, level: u8, msg: impl AsRef<str>) {
        if self.verbose >= level {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// Writes `bytes` to the output path, or stdout.
    fn emit(&self, bytes: &[u8]) -> CliResult<()> {
        match &self.output {
            Some(p) => write_file(p, bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)
                    .and_then(|_| out.flush())
                    .map_err(|e| Error::io("<stdout>", e).into())
            }
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e).into())
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e).into())
}

fn with_path(path: &Path, e: Error) -> Failure {
    let mut f = Failure::from(e);
    if f.code != EXIT_IO {
        f.message = format!("{}: {}", path.display(), f.message);
    }
    f
}

fn load_config(ctx: &Ctx, path: &Path) -> CliResult<EnsembleConfig> {
    let mut cfg = EnsembleConfig::from_json(&read_text(path)?).map_err(|e| with_path(path, e))?;
    if let Some(seed) = ctx.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn load_log(path: &Path) -> CliResult<ObservationLog> {
    ObservationLog::parse(&read_text(path)?).map_err(|e| with_path(path, e))
}

fn budget(max: Option<u64>) -> CliResult<SearchBudget> {
    match max {
        None => Ok(SearchBudget::unlimited()),
        Some(n) => SearchBudget::bounded(n).map_err(Failure::from),
    }
}

fn gen(ctx: &Ctx, args: &GenArgs) -> CliResult {
    let cfg = load_config(ctx, &args.config)?;
    let dir = ctx
        .output
        .clone()
        .ok_or_else(|| usage("gen needs --output DIR"))?;
    ctx.echo("gen", &cfg);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let width = cfg
        .instance_count
        .saturating_sub(1)
        .to_string()
        .len()
        .max(4);
    for i in 0..cfg.instance_count {
        let inst = cfg.instance(i)?;
        let text = match &inst.log {
            Some(log) => log.to_text(),
            None => inst.graph.to_edge_list(),
        };
        let path = dir.join(format!("instance_{i:0width$}.txt"));
        write_file(&path, text.as_bytes())?;
        ctx.note(2, format!("wrote {}", path.display()));
    }
    ctx.note(
        1,
        format!("{} instances in {}", cfg.instance_count, dir.display()),
    );
    Ok(0)
}

fn features(ctx: &Ctx, args: &FeaturesArgs) -> CliResult {
    ctx.echo("features", &serde_json::json!({ "graphs": args.graphs }));
    let mut rows = Vec::with_capacity(args.graphs.len());
    for path in &args.graphs {
        let log = load_log(path)?;
        let g = log.to_graph().map_err(|e| with_path(path, e))?;
        rows.push(extract_features(&g, Some(log.w())).map_err(|e| with_path(path, e))?);
    }
    let mut buf = Vec::new();
    write_features_csv(&mut buf, &rows)?;
    ctx.emit(&buf)?;
    Ok(0)
}

fn label(ctx: &Ctx, args: &LabelArgs) -> CliResult {
    let budget = budget(Some(args.budget))?;
    ctx.echo(
        "label",
        &serde_json::json!({ "graphs": args.graphs, "budget": args.budget, "jobs": args.jobs }),
    );
    let logs = args
        .graphs
        .iter()
        .map(|p| load_log(p))
        .collect::<CliResult<Vec<_>>>()?;
    let rows = Exec::with_jobs(args.jobs).map(&logs, |i, log| {
        let path = &args.graphs[i];
        let g = log.to_graph().map_err(|e| with_path(path, e))?;
        let fv = extract_features(&g, Some(log.w())).map_err(|e| with_path(path, e))?;
        let labeling = label_instance(&g, budget).map_err(|e| with_path(path, e))?;
        Ok(fv.with_label(labeling.label))
    });
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_features_csv(&mut buf, &rows)?;
    ctx.emit(&buf)?;
    Ok(0)
}

fn load_dataset(path: &Path) -> CliResult<Vec<bicliquelab::FeatureVector>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_features_csv(file).map_err(|e| with_path(path, e))
}

fn rate(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), |v| format!("{v:.6}"))
}

fn train(ctx: &Ctx, args: &TrainArgs) -> CliResult {
    let params = TrainParams {
        min_leaf: args.min_leaf,
        max_depth: args.max_depth,
        min_gain_ratio: args.min_gain_ratio,
        prune: args.prune,
    };
    let seed = ctx.seed.unwrap_or(0);
    ctx.echo(
        "train",
        &serde_json::json!({
            "data": args.data, "seed": seed, "train_fraction": args.train_fraction,
            "folds": args.folds, "params": params,
        }),
    );
    let data = load_dataset(&args.data)?;
    let (train_set, valid_set) = stratified_split(&data, args.train_fraction, seed)?;
    let tree = train_c45(&train_set, params)?;
    let mut out = String::new();
    out.push_str(&format!(
        "train_n: {}\nvalid_n: {}\n",
        train_set.len(),
        valid_set.len()
    ));
    out.push_str(&format!(
        "depth: {}\nleaves: {}\n",
        tree.depth(),
        tree.root.leaf_count()
    ));
    if valid_set.is_empty() {
        out.push_str("validation: skipped (empty split)\n");
    } else {
        let report = evaluate(&tree, &valid_set)?;
        out.push_str(&format!(
            "valid_accuracy: {:.6}\nvalid_fpr: {}\nvalid_fnr: {}\nvalid_auc: {}\n",
            report.accuracy,
            rate(report.fpr),
            rate(report.fnr),
            rate(report.auc)
        ));
    }
    if args.folds > 0 {
        let cv = kfold_cv(&data, args.folds, params, seed, Exec::with_jobs(args.jobs))?;
        let accs: Vec<String> = cv
            .folds
            .iter()
            .map(|f| format!("{:.6}", f.accuracy))
            .collect();
        let mean = cv.folds.iter().map(|f| f.accuracy).sum::<f64>() / cv.folds.len() as f64;
        out.push_str(&format!(
            "cv_folds: {}\ncv_accuracy: {}\ncv_mean_accuracy: {mean:.6}\n",
            args.folds,
            accs.join(" ")
        ));
        out.push_str(&format!("cv_best_fold: {}\n", cv.best_fold));
    }
    out.push_str("rules:\n");
    for rule in extract_rules(&tree) {
        out.push_str(&format!("  {rule}\n"));
    }
    if let Some(p) = &args.tree {
        write_file(p, tree.to_text().as_bytes())?;
    }
    if let Some(p) = &args.tree_json {
        write_file(p, tree.to_json()?.as_bytes())?;
    }
    ctx.emit(out.as_bytes())?;
    Ok(0)
}

fn load_tree(path: &Path) -> CliResult<DecisionTree> {
    let text = read_text(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        DecisionTree::from_json(&text)
    } else {
        DecisionTree::from_text(&text)
    };
    parsed.map_err(|e| with_path(path, e))
}

fn eval(ctx: &Ctx, args: &EvalArgs) -> CliResult {
    ctx.echo("eval", &serde_json::json!({ "tree": args.tree, "data": args.data, "roc": args.roc, "pr": args.pr }));
    let tree = load_tree(&args.tree)?;
    let data = load_dataset(&args.data)?;
    let report = evaluate(&tree, &data)?;
    if let Some(p) = &args.roc {
        let mut buf = Vec::new();
        write_roc_csv(&mut buf, &report.roc_points).map_err(|e| Error::io(p, e))?;
        write_file(p, &buf)?;
    }
    if let Some(p) = &args.pr {
        let mut buf = Vec::new();
        write_pr_csv(&mut buf, &report.pr_points).map_err(|e| Error::io(p, e))?;
        write_file(p, &buf)?;
    }
    let out = format!(
        "n: {}\naccuracy: {:.6}\nfpr: {}\nfnr: {}\nauc: {}\n",
        report.n,
        report.accuracy,
        rate(report.fpr),
        rate(report.fnr),
        rate(report.auc)
    );
    ctx.emit(out.as_bytes())?;
    Ok(0)
}

fn solve(ctx: &Ctx, args: &SolveArgs) -> CliResult {
    let options = SolveOptions {
        pruning: args.pruning.into(),
        guarantee_check: !args.no_guarantee_check,
    };
    let budget = budget(args.budget)?;
    ctx.echo(
        "solve",
        &serde_json::json!({
            "graph": args.graph, "z": args.z, "t": args.t, "max_weight": args.max_weight,
            "budget": args.budget, "guarantee_check": options.guarantee_check, "pruning": args.pruning,
        }),
    );
    let log = load_log(&args.graph)?;
    let g = log.to_graph().map_err(|e| with_path(&args.graph, e))?;
    let solver = Solver::with_options(&g, options);
    let (mut text, report, verdict) = match args.t {
        Some(t) => {
            let d = solver.decide(t, args.z, budget)?;
            let v = match d.verdict {
                Verdict::Yes => "yes",
                Verdict::No => "no",
                Verdict::Unknown => "unknown",
            };
            (format!("verdict: {v}\n"), d.report, Some(d.verdict))
        }
        None if args.max_weight => (
            String::new(),
            solver.find_max_weight_of_size(args.z, budget)?,
            None,
        ),
        None => (String::new(), solver.find_biclique(args.z, budget)?, None),
    };
    text.push_str(&report.to_text());
    if let Outcome::Found(b) = &report.outcome {
        let names = |ids: &[usize], f: &dyn Fn(usize) -> String| {
            ids.iter().map(|&i| f(i)).collect::<Vec<_>>().join(" ")
        };
        text.push_str(&format!(
            "u_labels: {}\n",
            names(&b.u_set, &|i| g.u_label(i))
        ));
        text.push_str(&format!(
            "v_labels: {}\n",
            names(&b.v_set, &|i| g.v_label(i))
        ));
    }
    ctx.emit(text.as_bytes())?;
    let code = match verdict {
        Some(Verdict::Yes) => 0,
        Some(Verdict::No) => EXIT_NO,
        Some(Verdict::Unknown) => EXIT_UNKNOWN,
        None if report.outcome.is_found() => 0,
        None if report.budget_exhausted => EXIT_UNKNOWN,
        None => EXIT_NO,
    };
    Ok(code)
}

fn sweep(ctx: &Ctx, args: &SweepArgs) -> CliResult {
    let cfg = load_config(ctx, &args.config)?;
    ctx.echo("sweep", &cfg);
    let res = run_sweep(&cfg, Exec::with_jobs(args.jobs))?;
    ctx.note(
        1,
        format!("{} instances, {} rows", res.instances.len(), res.rows.len()),
    );
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &res.rows)?;
    ctx.emit(&buf)?;
    Ok(0)
}

fn dsweep(ctx: &Ctx, args: &DsweepArgs) -> CliResult {
    let cfg = load_config(ctx, &args.config)?;
    ctx.echo(
        "dsweep",
        &serde_json::json!({ "ensemble": cfg, "d": args.d }),
    );
    let res = run_distance_sweep(&cfg, &args.d, Exec::with_jobs(args.jobs))?;
    ctx.note(
        1,
        format!(
            "{} instances, {} skipped (z_max < 2)",
            res.instances.len(),
            res.skipped
        ),
    );
    let mut buf = Vec::new();
    write_distance_csv(&mut buf, &res.rows)?;
    ctx.emit(&buf)?;
    Ok(0)
}

fn run(cli: Cli) -> CliResult {
    let ctx = Ctx {
        seed: cli.seed,
        output: cli.output,
        verbose: cli.verbose,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Gen(a) => gen(&ctx, a),
        Command::Features(a) => features(&ctx, a),
        Command::Label(a) => label(&ctx, a),
        Command::Train(a) => train(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Solve(a) => solve(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Dsweep(a) => dsweep(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("biclab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
