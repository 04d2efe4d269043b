//! `aigkit`: netlist statistics, recipe optimization, dataset generation,
//! and node-count prediction from one binary.

mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use aig::bench::{ast_to_aig, parse_bench, write_bench};
use aig::Aig;
use config::{resolve, FileConfig};
use dataset::{
    load_designs_manifest, load_samples, run_pipeline, PipelineConfig, SplitMode, SplitSpec,
};
use model::{
    build_model, evaluate, load_model, mean_baseline_mse, predict, train, FcInputPolicy,
    NetConfig, TrainConfig,
};
use opt::{
    apply_sequence, build_rewrite_library, sample_recipes, top_k_similarity, Recipe,
    TransformContext,
};

/// Marker for command-line misuse beyond what clap validates.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "usage error: {}", self.0)
    }
}

impl std::error::Error for UsageError {}

/// Marker for internal invariant violations (exit code 3).
#[derive(Debug)]
struct InvariantError(String);

impl std::fmt::Display for InvariantError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal invariant violation: {}", self.0)
    }
}

impl std::error::Error for InvariantError {}

#[derive(Parser)]
#[command(name = "aigkit", version, about = "AIG synthesis dataset and QoR prediction toolkit")]
struct Cli {
    /// JSON config file providing defaults for common options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for the dataset pipeline (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print PI PO N E I D statistics for a BENCH netlist.
    Stats(StatsArgs),
    /// Apply a synthesis recipe and write the optimized netlist.
    Opt(OptArgs),
    /// Run recipes over designs and emit the labeled graph dataset.
    GenDataset(GenArgs),
    /// Partition a generated dataset into train/test samples.
    Split(SplitArgs),
    /// Train a predictor on a dataset split.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset split.
    Eval(EvalArgs),
    /// Predict the normalized node count for one design and recipe.
    Predict(PredictArgs),
    /// Pairwise top-k% recipe similarity across designs.
    RecipeSim(RecipeSimArgs),
    /// Build, save, or dump the rewrite structure library.
    Library(LibraryArgs),
}

#[derive(Args)]
struct StatsArgs {
    /// BENCH netlist.
    path: PathBuf,
}

#[derive(Args)]
struct OptArgs {
    /// BENCH netlist to optimize.
    path: PathBuf,
    /// Semicolon-separated actions, e.g. `strash;balance;rw;rfz`.
    #[arg(long)]
    recipe: Option<String>,
    /// Recipe id within the seeded uniform stream (with --length/--seed).
    #[arg(long)]
    recipe_id: Option<u32>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output BENCH path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Designs manifest (JSON array of {path, name, function_class}).
    #[arg(long)]
    manifest: PathBuf,
    /// Number of recipes (K).
    #[arg(long)]
    recipes: Option<usize>,
    /// Steps per recipe (L).
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    outdir: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SplitArgs {
    /// Dataset directory produced by gen-dataset.
    #[arg(long)]
    outdir: PathBuf,
    /// 1 = unseen recipes (transductive), 2 = unseen designs (inductive).
    #[arg(long)]
    task: u8,
    #[arg(long)]
    seed: Option<u64>,
    /// Split file path (default \<outdir\>/split_task\<N\>.json).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    outdir: PathBuf,
    #[arg(long)]
    split: PathBuf,
    /// net1, net2, or net3.
    #[arg(long)]
    net: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Checkpoint output path.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Loss curve CSV output path.
    #[arg(long)]
    loss_curve: Option<PathBuf>,
    /// FC input width policy: `declared` errors on a mismatch, `computed`
    /// builds with the architecture's own width.
    #[arg(long, default_value = "declared")]
    fc_input: String,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    outdir: PathBuf,
    #[arg(long)]
    split: PathBuf,
    /// Predictions CSV output path.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    design: PathBuf,
    /// Semicolon-separated actions.
    #[arg(long)]
    recipe: Option<String>,
    /// Recipe id within the seeded stream (with --length/--seed).
    #[arg(long)]
    recipe_id: Option<u32>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RecipeSimArgs {
    #[arg(long)]
    outdir: PathBuf,
    /// Top percentage of recipes to compare.
    #[arg(long)]
    percent: Option<f64>,
    /// CSV output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct LibraryArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    bound: Option<usize>,
    /// Binary library output path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Print the textual dump.
    #[arg(long)]
    dump: bool,
    #[arg(long)]
    force: bool,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is
            // a usage error.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let file_threads = FileConfig::load(cli.config.as_deref()).ok().and_then(|c| c.threads);
    if let Some(n) = cli.threads.or(file_threads) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<UsageError>().is_some() {
                1
            } else if e.downcast_ref::<InvariantError>().is_some() {
                3
            } else {
                2
            };
            std::process::exit(code);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file_cfg = FileConfig::load(cli.config.as_deref())
        .map_err(|e| anyhow!(UsageError(format!("config file: {e}"))))?;
    match cli.command {
        Command::Stats(a) => cmd_stats(&a),
        Command::Opt(a) => cmd_opt(&a, &file_cfg),
        Command::GenDataset(a) => cmd_gen(&a, &file_cfg),
        Command::Split(a) => cmd_split(&a, &file_cfg),
        Command::Train(a) => cmd_train(&a, &file_cfg),
        Command::Eval(a) => cmd_eval(&a),
        Command::Predict(a) => cmd_predict(&a, &file_cfg),
        Command::RecipeSim(a) => cmd_recipe_sim(&a, &file_cfg),
        Command::Library(a) => cmd_library(&a, &file_cfg),
    }
}

fn load_design(path: &Path) -> anyhow::Result<Aig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ast = parse_bench(&text).with_context(|| format!("parsing {}", path.display()))?;
    ast_to_aig(&ast).with_context(|| format!("lowering {}", path.display()))
}

fn guard_overwrite(path: &Path, force: bool) -> anyhow::Result<()> {
    if path.exists() && !force {
        bail!("{} already exists (pass --force to overwrite)", path.display());
    }
    Ok(())
}

fn cmd_stats(a: &StatsArgs) -> anyhow::Result<()> {
    let g = load_design(&a.path)?;
    println!("PI PO N E I D");
    println!("{}", g.stats());
    Ok(())
}

fn parse_recipe_selection(
    recipe: &Option<String>,
    recipe_id: &Option<u32>,
    length: usize,
    seed: u64,
) -> anyhow::Result<Recipe> {
    match (recipe, recipe_id) {
        (Some(text), None) => {
            Recipe::parse(0, text).map_err(|e| anyhow!(UsageError(e.to_string())))
        }
        (None, Some(id)) => {
            let recipes = sample_recipes(*id as usize + 1, length, seed);
            Ok(recipes.into_iter().next_back().expect("sampled id+1 recipes"))
        }
        (Some(_), Some(_)) => {
            Err(anyhow!(UsageError("--recipe and --recipe-id are mutually exclusive".into())))
        }
        (None, None) => {
            Err(anyhow!(UsageError("pass --recipe or --recipe-id".into())))
        }
    }
}

fn cmd_opt(a: &OptArgs, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let length = resolve(a.length, file_cfg.length, opt::DEFAULT_RECIPE_LEN);
    let seed = resolve(a.seed, file_cfg.seed, 0);
    let recipe = parse_recipe_selection(&a.recipe, &a.recipe_id, length, seed)?;
    let g = load_design(&a.path)?;
    let cx = TransformContext::with_defaults();
    let optimized = apply_sequence(&g, &recipe.steps, &cx);
    if !optimized.check_invariants() {
        return Err(anyhow!(InvariantError("optimized graph failed the structure scan".into())));
    }
    println!("recipe: {}", recipe.to_mnemonics());
    println!("before: PI PO N E I D = {}", g.stats());
    println!("after:  PI PO N E I D = {}", optimized.stats());
    if let Some(out) = &a.output {
        guard_overwrite(out, a.force)?;
        std::fs::write(out, write_bench(&optimized))
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn cmd_gen(a: &GenArgs, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let designs = load_designs_manifest(&a.manifest)
        .with_context(|| format!("loading {}", a.manifest.display()))?;
    let cfg = PipelineConfig {
        recipes: resolve(a.recipes, file_cfg.recipes, 50),
        length: resolve(a.length, file_cfg.length, opt::DEFAULT_RECIPE_LEN),
        seed: resolve(a.seed, file_cfg.seed, 0),
        force: a.force,
    };
    let cx = TransformContext::with_defaults();
    let manifest = run_pipeline(&designs, &cfg, &cx, &a.outdir)?;
    let ok = manifest.designs.iter().filter(|d| d.status == "ok").count();
    println!(
        "generated {} designs x {} recipes x {} steps into {}",
        ok,
        manifest.recipes,
        manifest.length,
        a.outdir.display()
    );
    for d in manifest.designs.iter().filter(|d| d.status != "ok") {
        eprintln!("skipped {}: {}", d.name, d.status);
    }
    if ok == 0 {
        bail!("no design generated successfully");
    }
    Ok(())
}

fn cmd_split(a: &SplitArgs, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let mode = match a.task {
        1 => SplitMode::UnseenRecipe,
        2 => SplitMode::UnseenDesign,
        t => return Err(anyhow!(UsageError(format!("unknown task {t}, expected 1 or 2")))),
    };
    let spec = SplitSpec { mode, seed: resolve(a.seed, file_cfg.seed, 0) };
    let (_, samples) = load_samples(&a.outdir)?;
    let (train_set, test_set) = dataset::split(&samples, &spec)?;
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| a.outdir.join(format!("split_task{}.json", a.task)));
    guard_overwrite(&out, a.force)?;
    dataset::save_split(&out, &spec, &train_set, &test_set)?;
    println!("split {} train / {} test -> {}", train_set.len(), test_set.len(), out.display());
    Ok(())
}

/// Resolves a stored split against freshly loaded samples.
fn samples_for_split(
    outdir: &Path,
    split_path: &Path,
) -> anyhow::Result<(Vec<dataset::DataSample>, Vec<dataset::DataSample>)> {
    let (_, samples) = load_samples(outdir)?;
    let split_file = dataset::load_split(split_path)?;
    let by_key: BTreeMap<String, dataset::DataSample> =
        samples.into_iter().map(|s| (s.key.to_string(), s)).collect();
    let collect = |keys: &[String]| -> anyhow::Result<Vec<dataset::DataSample>> {
        keys.iter()
            .map(|k| {
                by_key
                    .get(k)
                    .cloned()
                    .ok_or_else(|| anyhow!("split references unknown sample {k}"))
            })
            .collect()
    };
    Ok((collect(&split_file.train)?, collect(&split_file.test)?))
}

fn cmd_train(a: &TrainArgs, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let net_name = a.net.clone().or(file_cfg.net.clone()).unwrap_or_else(|| "net1".to_string());
    let net = NetConfig::by_name(&net_name)
        .ok_or_else(|| anyhow!(UsageError(format!("unknown net `{net_name}`"))))?;
    let policy = match a.fc_input.as_str() {
        "declared" => FcInputPolicy::Declared,
        "computed" => FcInputPolicy::Computed,
        other => {
            return Err(anyhow!(UsageError(format!(
                "--fc-input must be `declared` or `computed`, got `{other}`"
            ))))
        }
    };
    guard_overwrite(&a.checkpoint, a.force)?;
    let (train_set, _) = samples_for_split(&a.outdir, &a.split)?;
    let cfg = TrainConfig {
        batch_size: resolve(a.batch_size, file_cfg.batch_size, 64),
        lr: resolve(a.lr, file_cfg.lr, 1e-3),
        epochs: resolve(a.epochs, file_cfg.epochs, 80),
        seed: resolve(a.seed, file_cfg.seed, 0),
        eval_every: 1,
    };
    let net_model = build_model(&net, policy, cfg.seed)?;

    // A seeded tenth of the training set is monitored each epoch; training
    // itself uses the full set.
    let val: Vec<dataset::DataSample> = {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x76616c);
        let mut idx: Vec<usize> = (0..train_set.len()).collect();
        idx.shuffle(&mut rng);
        idx.iter().take(train_set.len().div_ceil(10)).map(|&i| train_set[i].clone()).collect()
    };

    let report = train(&net_model, &train_set, &cfg, Some(&val))?;
    net_model.save(
        &a.checkpoint,
        serde_json::json!({
            "train_config": cfg,
            "split": a.split.display().to_string(),
            "samples": train_set.len(),
        }),
    )?;
    if let Some(curve_path) = &a.loss_curve {
        guard_overwrite(curve_path, a.force)?;
        let mut csv = String::from("epoch,train_mse,val_mse\n");
        let val_by_epoch: BTreeMap<usize, f64> = report.val_mse.iter().copied().collect();
        for (i, loss) in report.train_loss.iter().enumerate() {
            let val_cell =
                val_by_epoch.get(&(i + 1)).map_or(String::new(), |v| format!("{v}"));
            let _ = writeln!(csv, "{},{},{}", i + 1, loss, val_cell);
        }
        std::fs::write(curve_path, csv)?;
    }
    let last = report.train_loss.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained {net_name} on {} samples for {} epochs; final train MSE {last:.6}",
        train_set.len(),
        cfg.epochs
    );
    println!("checkpoint: {}", a.checkpoint.display());
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> anyhow::Result<()> {
    let net_model = load_model(&a.checkpoint)?;
    let (train_set, test_set) = samples_for_split(&a.outdir, &a.split)?;
    model::check_recipe_lengths(&net_model, &test_set)?;
    let (test_mse, rows) = evaluate(&net_model, &test_set);
    let baseline = mean_baseline_mse(&train_set, &test_set);
    println!("test_mse {test_mse}");
    println!("mean_baseline_mse {baseline}");
    if let Some(path) = &a.predictions {
        guard_overwrite(path, a.force)?;
        let mut csv = String::from("sample_key,prediction,target\n");
        for (key, pred, target) in &rows {
            let _ = writeln!(csv, "{key},{pred},{target}");
        }
        std::fs::write(path, csv)?;
    }
    Ok(())
}

fn cmd_predict(a: &PredictArgs, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let length = resolve(a.length, file_cfg.length, opt::DEFAULT_RECIPE_LEN);
    let seed = resolve(a.seed, file_cfg.seed, 0);
    let recipe = parse_recipe_selection(&a.recipe, &a.recipe_id, length, seed)?;
    let net_model = load_model(&a.checkpoint)?;
    let value = predict(&net_model, &a.design, &recipe)?;
    println!("{value}");
    Ok(())
}

fn cmd_recipe_sim(a: &RecipeSimArgs, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let percent = resolve(a.percent, file_cfg.percent, 10.0);
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(anyhow!(UsageError(format!("percent {percent} outside (0, 100]"))));
    }
    let (_, samples) = load_samples(&a.outdir)?;
    let mut results: BTreeMap<String, BTreeMap<u32, f64>> = BTreeMap::new();
    for s in &samples {
        results.entry(s.key.design.clone()).or_default().insert(s.key.recipe_id, s.target);
    }
    let matrix = top_k_similarity(&results, percent).map_err(|e| anyhow!(e.to_string()))?;
    let csv = matrix.to_csv();
    match &a.out {
        Some(path) => {
            guard_overwrite(path, a.force)?;
            std::fs::write(path, csv)?;
            println!("similarity matrix -> {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_library(a: &LibraryArgs, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let k = a.k.unwrap_or(4);
    let bound = a.bound.unwrap_or(7);
    let _ = file_cfg;
    let lib = build_rewrite_library(k, bound)?;
    println!(
        "library k={} bound={} enum_depth={} classes={}",
        lib.k(),
        lib.bound(),
        lib.enum_depth(),
        lib.coverage()
    );
    if let Some(out) = &a.output {
        guard_overwrite(out, a.force)?;
        lib.save(out)?;
        println!("saved -> {}", out.display());
    }
    if a.dump {
        print!("{}", lib.dump());
    }
    Ok(())
}
