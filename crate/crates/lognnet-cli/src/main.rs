//! Batch experiment runner for the reservoir classifier pipeline.
//!
//! Subcommands map onto the library stages: `cv` (cross-validated
//! metrics), `optimize` (swarm search for generator parameters), `select`
//! (backward feature elimination), `threshold` (single-feature table),
//! `hist` (per-class histograms), `footprint` (memory estimate) and
//! `subset` (evaluate an explicit feature list). Every command writes a
//! JSON report embedding its manifest (plus CSV side files where noted)
//! and prints the report to stdout. Errors come out as one
//! machine-parsable line: `error[CODE]: message`.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use lognnet::network::FootprintBreakdown;
use lognnet::reservoir_opt::{self, PsoConfig};
use lognnet::selection::{self, SelectionOptions};
use lognnet::threshold::{self, HistogramSpec};
use lognnet::{
    estimate_footprint, kfold_evaluate, registry, CvReport, Dataset, Error, FeatureMask,
    GeneratorParams, NetworkShape, Result, TrainConfig,
};
use report::{round_sig, side_file, RunManifest};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lognnet", version, about = "Reservoir classifier experiments on tabular data")]
struct Cli {
    /// Worker threads for parallel stages (0 = all cores).
    #[arg(long, global = true, default_value_t = 0, env = "LOGNNET_JOBS")]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Dataset CSV: feature columns in registry order plus a label column.
    #[arg(long, env = "LOGNNET_DATASET")]
    dataset: PathBuf,

    /// Which feature registry the file follows: rbv1, rbv2 or custom
    /// (features taken from the header).
    #[arg(long, default_value = "rbv1", env = "LOGNNET_REGISTRY")]
    registry: String,

    /// Field delimiter.
    #[arg(long, default_value_t = ',', env = "LOGNNET_DELIMITER")]
    delimiter: char,
}

#[derive(Args)]
struct TrainArgs {
    /// Network shape N:P:H:M.
    #[arg(long, default_value = "51:50:20:2", env = "LOGNNET_SHAPE")]
    shape: String,

    /// Training epochs per fold.
    #[arg(long, default_value_t = 100, env = "LOGNNET_EPOCHS")]
    epochs: usize,

    /// Gradient step size.
    #[arg(long, default_value_t = 0.1, env = "LOGNNET_LR")]
    lr: f64,

    /// Cross-validation folds K.
    #[arg(long, default_value_t = 5, env = "LOGNNET_FOLDS")]
    folds: usize,

    /// Master seed for shuffling, fold models and derived streams.
    #[arg(long, default_value_t = 42, env = "LOGNNET_SEED")]
    seed: u64,

    /// Split folds without per-class stratification.
    #[arg(long, env = "LOGNNET_NO_STRATIFY")]
    no_stratify: bool,
}

#[derive(Args)]
struct GenArg {
    /// Generator parameters: `K,D,L,C`, or `table4:rbv1` / `table4:rbv2`
    /// for the published optima.
    #[arg(long, default_value = "table4:rbv1", env = "LOGNNET_GEN")]
    gen: String,
}

#[derive(Args)]
struct OutArg {
    /// Report directory.
    #[arg(long, default_value = "reports", env = "LOGNNET_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct SwarmArgs {
    /// Particles in the swarm.
    #[arg(long, default_value_t = 20)]
    swarm: usize,

    /// Swarm iterations after the initial sample.
    #[arg(long, default_value_t = 30)]
    iterations: usize,

    /// Stop early at this fitness (percent).
    #[arg(long)]
    target: Option<f64>,

    /// Epochs inside each fitness evaluation.
    #[arg(long, default_value_t = 50)]
    fitness_epochs: usize,
}

#[derive(Args)]
struct MaskArgs {
    /// Selected feature indices FS, comma separated (the rest are
    /// removed).
    #[arg(long, value_delimiter = ',', env = "LOGNNET_FS")]
    fs: Option<Vec<usize>>,

    /// Removed feature indices FR, comma separated.
    #[arg(long, value_delimiter = ',', env = "LOGNNET_FR")]
    fr: Option<Vec<usize>>,
}

#[derive(Subcommand)]
enum Command {
    /// Balanced K-fold cross-validation metrics.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        gen: GenArg,
        #[command(flatten)]
        mask: MaskArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Particle-swarm search for generator parameters.
    Optimize {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        mask: MaskArgs,
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        swarm: SwarmArgs,
    },
    /// Two-stage backward feature elimination.
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        gen: GenArg,
        #[command(flatten)]
        out: OutArg,
        /// Evaluations averaged per subset.
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Re-evaluate subsets instead of reusing cached scores.
        #[arg(long)]
        no_cache: bool,
    },
    /// Best single-feature threshold for every feature.
    Threshold {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArg,
        /// Seed recorded in the manifest (the search is deterministic).
        #[arg(long, default_value_t = 42, env = "LOGNNET_SEED")]
        seed: u64,
    },
    /// Per-class histogram of one feature.
    Hist {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArg,
        /// Feature index (1-based) or name.
        #[arg(long)]
        feature: String,
        /// Bin width in feature units; defaults to the published size
        /// for builtin registries where one exists.
        #[arg(long)]
        bin_size: Option<f64>,
        /// Histogram range lower edge (default: feature minimum).
        #[arg(long)]
        min: Option<f64>,
        /// Histogram range upper edge (default: feature maximum).
        #[arg(long)]
        max: Option<f64>,
        #[arg(long, default_value_t = 42, env = "LOGNNET_SEED")]
        seed: u64,
    },
    /// RAM footprint estimate for a shape.
    Footprint {
        #[command(flatten)]
        out: OutArg,
        #[arg(long, default_value = "51:50:20:2", env = "LOGNNET_SHAPE")]
        shape: String,
        /// Bytes per stored weight.
        #[arg(long, default_value_t = 4)]
        bytes: usize,
        /// Regenerate reservoir columns instead of storing the matrix.
        #[arg(long)]
        ram_saving: bool,
    },
    /// Evaluate an explicit feature subset (requires --fs or --fr).
    Subset {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        gen: GenArg,
        #[command(flatten)]
        mask: MaskArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let first = e.to_string();
                let line = first.lines().next().unwrap_or("bad arguments");
                eprintln!("error[E_USAGE]: {line}");
                return ExitCode::from(2);
            }
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if cli.jobs > 0 {
        // ignore failure: the pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', "; ");
            eprintln!("error[{}]: {msg}", e.code());
            ExitCode::FAILURE
        }
    }
}

fn load_dataset(data: &DataArgs) -> Result<Dataset> {
    let delimiter = data.delimiter as u8;
    let ds = match data.registry.as_str() {
        "rbv1" => Dataset::load_csv(&data.dataset, registry::rbv1(), delimiter)?,
        "rbv2" => Dataset::load_csv(&data.dataset, registry::rbv2(), delimiter)?,
        "custom" => Dataset::load_csv_custom(&data.dataset, delimiter)?,
        other => {
            return Err(Error::Config(format!(
                "unknown registry \"{other}\" (expected rbv1, rbv2 or custom)"
            )))
        }
    };
    ds.impute_means()
}

fn parse_gen(s: &str) -> Result<(GeneratorParams, String)> {
    match s {
        "table4:rbv1" => Ok((GeneratorParams::published_rbv1(), s.to_string())),
        "table4:rbv2" => Ok((GeneratorParams::published_rbv2(), s.to_string())),
        _ => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Config(format!(
                    "--gen expects K,D,L,C or table4:rbv1|table4:rbv2, got \"{s}\""
                )));
            }
            let mut vals = [0.0f64; 4];
            for (v, part) in vals.iter_mut().zip(&parts) {
                *v = part.trim().parse().map_err(|_| {
                    Error::Config(format!("bad generator parameter \"{part}\""))
                })?;
            }
            Ok((
                GeneratorParams::new(vals[0], vals[1], vals[2], vals[3])?,
                "explicit".to_string(),
            ))
        }
    }
}

fn parse_mask(mask: &MaskArgs, feature_count: usize) -> Result<(FeatureMask, bool)> {
    match (&mask.fs, &mask.fr) {
        (Some(_), Some(_)) => Err(Error::Config("--fs and --fr are mutually exclusive".into())),
        (Some(fs), None) => {
            if fs.is_empty() {
                return Err(Error::Config("--fs needs at least one feature index".into()));
            }
            Ok((FeatureMask::from_selected(feature_count, fs.iter().copied())?, true))
        }
        (None, Some(fr)) => Ok((
            FeatureMask::from_removed(feature_count, fr.iter().copied())?,
            true,
        )),
        (None, None) => Ok((FeatureMask::all_selected(feature_count), false)),
    }
}

fn train_config(train: &TrainArgs) -> TrainConfig {
    TrainConfig {
        epochs: train.epochs,
        learning_rate: train.lr,
        seed: train.seed,
        folds: train.folds,
        stratified: !train.no_stratify,
    }
}

fn base_manifest(
    command: &str,
    data: &DataArgs,
    seed: u64,
    out: &OutArg,
) -> RunManifest {
    let mut m = RunManifest::new(command, seed, &out.out);
    m.dataset = Some(data.dataset.display().to_string());
    m.registry = Some(data.registry.clone());
    m.delimiter = Some(data.delimiter);
    m
}

#[derive(Serialize)]
struct CvBody<'a> {
    accuracy_pooled: f64,
    accuracy_mean_folds: f64,
    fold_accuracies: &'a [f64],
    confusion: &'a lognnet::ConfusionMatrix,
    per_class: Vec<PerClass>,
    config: &'a TrainConfig,
}

#[derive(Serialize)]
struct PerClass {
    class: String,
    precision: f64,
    recall: f64,
    f1: f64,
    undefined: bool,
}

fn cv_body<'a>(report: &'a CvReport, cfg: &'a TrainConfig, ds: &Dataset) -> CvBody<'a> {
    let per_class = report
        .pooled
        .per_class
        .iter()
        .enumerate()
        .map(|(i, c)| PerClass {
            class: ds.registry.class_names()[i].clone(),
            precision: c.precision,
            recall: c.recall,
            f1: c.f1,
            undefined: c.undefined,
        })
        .collect();
    CvBody {
        accuracy_pooled: report.pooled.accuracy,
        accuracy_mean_folds: report.mean_fold_accuracy,
        fold_accuracies: &report.fold_accuracies,
        confusion: &report.pooled.confusion,
        per_class,
        config: cfg,
    }
}

fn run_cv_like(
    command: &str,
    data: DataArgs,
    train: TrainArgs,
    gen: GenArg,
    mask_args: MaskArgs,
    out: OutArg,
    mask_required: bool,
) -> Result<()> {
    let ds = load_dataset(&data)?;
    let shape = NetworkShape::from_str(&train.shape)?;
    let (gen_params, gen_source) = parse_gen(&gen.gen)?;
    let (mask, mask_given) = parse_mask(&mask_args, ds.feature_count())?;
    if mask_required && !mask_given {
        return Err(Error::Config("subset needs --fs or --fr".into()));
    }
    let cfg = train_config(&train);
    let report = kfold_evaluate(&ds, shape, &gen_params, &mask, &cfg)?;

    let mut manifest = base_manifest(command, &data, cfg.seed, &out).with_shape(shape);
    manifest.gen_source = Some(gen_source);
    manifest.gen = Some(gen_params);
    manifest.epochs = Some(cfg.epochs);
    manifest.learning_rate = Some(cfg.learning_rate);
    manifest.folds = Some(cfg.folds);
    manifest.stratified = Some(cfg.stratified);
    if mask_given {
        manifest.removed_features = Some(mask.removed().collect());
        manifest.selected_features = Some(mask.selected());
    }
    let (path, text) = report::emit_report(&manifest, &cv_body(&report, &cfg, &ds))?;
    println!("{text}");
    eprintln!("report written to {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct OptimizeBody<'a> {
    best: GeneratorParams,
    best_fitness: f64,
    iterations_run: usize,
    config: &'a PsoConfig,
}

fn run_optimize(
    data: DataArgs,
    train: TrainArgs,
    mask_args: MaskArgs,
    out: OutArg,
    swarm: SwarmArgs,
) -> Result<()> {
    let ds = load_dataset(&data)?;
    let shape = NetworkShape::from_str(&train.shape)?;
    let (mask, mask_given) = parse_mask(&mask_args, ds.feature_count())?;
    let cfg = train_config(&train);
    let pso = PsoConfig {
        swarm_size: swarm.swarm,
        iterations: swarm.iterations,
        target_accuracy: swarm.target,
        seed: cfg.seed,
        fitness_epochs: swarm.fitness_epochs,
        ..PsoConfig::default()
    };
    let outcome = reservoir_opt::optimize_reservoir(&ds, shape, &mask, &pso, &cfg)?;

    let mut manifest = base_manifest("optimize", &data, cfg.seed, &out).with_shape(shape);
    manifest.gen_source = Some("optimize".into());
    manifest.epochs = Some(swarm.fitness_epochs);
    manifest.learning_rate = Some(cfg.learning_rate);
    if mask_given {
        manifest.removed_features = Some(mask.removed().collect());
        manifest.selected_features = Some(mask.selected());
    }
    let body = OptimizeBody {
        best: outcome.best_params,
        best_fitness: outcome.best_fitness,
        iterations_run: outcome.log.len().saturating_sub(1),
        config: &pso,
    };
    let (path, text) = report::emit_report(&manifest, &body)?;

    // iteration log rounded like the report, then written as CSV
    let log: Vec<_> = outcome
        .log
        .iter()
        .map(|rec| lognnet::reservoir_opt::IterationRecord {
            iteration: rec.iteration,
            best_fitness: round_sig(rec.best_fitness),
            best_params: GeneratorParams {
                k: round_sig(rec.best_params.k),
                d: round_sig(rec.best_params.d),
                l: round_sig(rec.best_params.l),
                c: round_sig(rec.best_params.c),
            },
        })
        .collect();
    let log_path = side_file(&manifest, "iterations");
    let file = std::fs::File::create(&log_path)?;
    reservoir_opt::write_iteration_log_csv(&log, file)?;

    println!("{text}");
    eprintln!("report written to {}", path.display());
    eprintln!("iteration log written to {}", log_path.display());
    Ok(())
}

#[derive(Serialize)]
struct SelectBody {
    removal_sequence: Vec<usize>,
    final_removed: Vec<usize>,
    final_selected: Vec<usize>,
    ranking: Vec<usize>,
    initial_accuracy: f64,
    final_accuracy: f64,
    iterations: usize,
    repeats: usize,
}

fn run_select(
    data: DataArgs,
    train: TrainArgs,
    gen: GenArg,
    out: OutArg,
    repeats: usize,
    no_cache: bool,
) -> Result<()> {
    let ds = load_dataset(&data)?;
    let shape = NetworkShape::from_str(&train.shape)?;
    let (gen_params, gen_source) = parse_gen(&gen.gen)?;
    let cfg = train_config(&train);
    let opts = SelectionOptions {
        repeats,
        cache: !no_cache,
    };
    let trace = selection::backward_eliminate(&ds, shape, &gen_params, &cfg, &opts)?;

    let mut manifest = base_manifest("select", &data, cfg.seed, &out).with_shape(shape);
    manifest.gen_source = Some(gen_source);
    manifest.gen = Some(gen_params);
    manifest.epochs = Some(cfg.epochs);
    manifest.learning_rate = Some(cfg.learning_rate);
    manifest.folds = Some(cfg.folds);
    manifest.stratified = Some(cfg.stratified);

    let body = SelectBody {
        removal_sequence: trace.steps.iter().filter_map(|s| s.removed).collect(),
        final_removed: trace.final_removed.clone(),
        final_selected: trace.final_mask().selected(),
        ranking: trace.ranking.clone(),
        initial_accuracy: trace.steps.first().map(|s| s.curve.base_accuracy).unwrap_or(0.0),
        final_accuracy: trace.steps.last().map(|s| s.accuracy_after).unwrap_or(0.0),
        iterations: trace.steps.len(),
        repeats,
    };
    let (path, text) = report::emit_report(&manifest, &body)?;

    // full trace as JSON, per-iteration curves as CSV
    let rounded = round_trace(&trace);
    let trace_path = PathBuf::from(&manifest.out_dir).join(format!(
        "select_{}_trace.json",
        manifest.hash()
    ));
    selection::write_trace_json(&rounded, std::fs::File::create(&trace_path)?)?;
    for (i, step) in rounded.steps.iter().enumerate() {
        let curve_path = side_file(&manifest, &format!("curve{i}"));
        selection::write_curve_csv(&step.curve, std::fs::File::create(&curve_path)?)?;
    }

    println!("{text}");
    eprintln!("report written to {}", path.display());
    eprintln!("trace written to {}", trace_path.display());
    Ok(())
}

fn round_trace(trace: &selection::EliminationTrace) -> selection::EliminationTrace {
    let mut out = trace.clone();
    for step in &mut out.steps {
        step.curve.base_accuracy = round_sig(step.curve.base_accuracy);
        step.accuracy_after = round_sig(step.accuracy_after);
        for v in step.curve.values.values_mut() {
            *v = round_sig(*v);
        }
    }
    out
}

#[derive(Serialize)]
struct ThresholdBody {
    rows: Vec<ThresholdRow>,
}

#[derive(Serialize)]
struct ThresholdRow {
    no: usize,
    feature: String,
    a_th: f64,
    v_th: f64,
    units: String,
    r#type: u8,
    min: f64,
    max: f64,
    degenerate: bool,
}

fn run_threshold(data: DataArgs, out: OutArg, seed: u64) -> Result<()> {
    let ds = load_dataset(&data)?;
    let mut table = threshold::threshold_table(&ds)?;
    for r in &mut table {
        r.accuracy = round_sig(r.accuracy);
        r.threshold = round_sig(r.threshold);
        r.feature_min = round_sig(r.feature_min);
        r.feature_max = round_sig(r.feature_max);
    }

    let manifest = base_manifest("threshold", &data, seed, &out);
    let rows: Vec<ThresholdRow> = table
        .iter()
        .map(|r| ThresholdRow {
            no: r.feature,
            feature: ds.registry.name(r.feature).to_string(),
            a_th: r.accuracy,
            v_th: r.threshold,
            units: ds.registry.unit(r.feature).to_string(),
            r#type: u8::from(r.threshold_type),
            min: r.feature_min,
            max: r.feature_max,
            degenerate: r.degenerate,
        })
        .collect();
    let (path, text) = report::emit_report(&manifest, &ThresholdBody { rows })?;

    let csv_path = side_file(&manifest, "table");
    threshold::write_threshold_table_csv(
        &ds.registry,
        &table,
        std::fs::File::create(&csv_path)?,
    )?;

    println!("{text}");
    eprintln!("report written to {}", path.display());
    eprintln!("table written to {}", csv_path.display());
    Ok(())
}

#[derive(Serialize)]
struct HistBody {
    feature: usize,
    feature_name: String,
    bin_size: f64,
    range: (f64, f64),
    bins: usize,
    class_names: [String; 2],
    edges: Vec<f64>,
    counts: Vec<Vec<usize>>,
}

fn run_hist(
    data: DataArgs,
    out: OutArg,
    feature: String,
    bin_size: Option<f64>,
    min: Option<f64>,
    max: Option<f64>,
    seed: u64,
) -> Result<()> {
    let ds = load_dataset(&data)?;
    let z = match feature.parse::<usize>() {
        Ok(z) => z,
        Err(_) => ds
            .registry
            .index_of(&feature)
            .ok_or_else(|| Error::Config(format!("unknown feature \"{feature}\"")))?,
    };
    if z < 1 || z > ds.feature_count() {
        return Err(Error::Config(format!(
            "feature {z} outside 1..={}",
            ds.feature_count()
        )));
    }
    let bin_size = bin_size
        .or_else(|| match data.registry.as_str() {
            "rbv1" => registry::rbv1_bin_size(z),
            "rbv2" => registry::rbv2_bin_size(z),
            _ => None,
        })
        .ok_or_else(|| {
            Error::Config(format!(
                "no published bin size for feature {z}; pass --bin-size"
            ))
        })?;
    let column: Vec<f64> = ds.samples.iter().map(|s| s.values[z - 1]).collect();
    let lo = min.unwrap_or_else(|| column.iter().cloned().fold(f64::INFINITY, f64::min));
    let hi = max.unwrap_or_else(|| column.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let spec = HistogramSpec {
        feature: z,
        bin_size,
        range: (lo, hi),
    };
    let hist = threshold::class_histogram(&ds, &spec)?;

    let manifest = base_manifest("hist", &data, seed, &out);
    let body = HistBody {
        feature: z,
        feature_name: ds.registry.name(z).to_string(),
        bin_size,
        range: spec.range,
        bins: hist.edges.len(),
        class_names: ds.registry.class_names().clone(),
        edges: hist.edges.iter().map(|&e| round_sig(e)).collect(),
        counts: hist.counts.clone(),
    };
    let (path, text) = report::emit_report(&manifest, &body)?;

    let csv_path = side_file(&manifest, &format!("feature{z}"));
    let mut rounded = hist.clone();
    for e in &mut rounded.edges {
        *e = round_sig(*e);
    }
    threshold::write_histogram_csv(
        &rounded,
        ds.registry.class_names(),
        std::fs::File::create(&csv_path)?,
    )?;

    println!("{text}");
    eprintln!("report written to {}", path.display());
    eprintln!("histogram written to {}", csv_path.display());
    Ok(())
}

fn run_footprint(out: OutArg, shape: String, bytes: usize, ram_saving: bool) -> Result<()> {
    let shape = NetworkShape::from_str(&shape)?;
    let breakdown: FootprintBreakdown = estimate_footprint(shape, bytes, ram_saving)?;
    let mut manifest = RunManifest::new("footprint", 0, &out.out).with_shape(shape);
    manifest.gen_source = None;
    #[derive(Serialize)]
    struct FootprintBody {
        bytes_per_weight: usize,
        ram_saving: bool,
        reservoir_bytes: usize,
        classifier_bytes: usize,
        buffer_bytes: usize,
        total_bytes: usize,
    }
    let body = FootprintBody {
        bytes_per_weight: bytes,
        ram_saving,
        reservoir_bytes: breakdown.reservoir_bytes,
        classifier_bytes: breakdown.classifier_bytes,
        buffer_bytes: breakdown.buffer_bytes,
        total_bytes: breakdown.total_bytes,
    };
    let (path, text) = report::emit_report(&manifest, &body)?;
    println!("{text}");
    eprintln!("report written to {}", path.display());
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Cv {
            data,
            train,
            gen,
            mask,
            out,
        } => run_cv_like("cv", data, train, gen, mask, out, false),
        Command::Subset {
            data,
            train,
            gen,
            mask,
            out,
        } => run_cv_like("subset", data, train, gen, mask, out, true),
        Command::Optimize {
            data,
            train,
            mask,
            out,
            swarm,
        } => run_optimize(data, train, mask, out, swarm),
        Command::Select {
            data,
            train,
            gen,
            out,
            repeats,
            no_cache,
        } => run_select(data, train, gen, out, repeats, no_cache),
        Command::Threshold { data, out, seed } => run_threshold(data, out, seed),
        Command::Hist {
            data,
            out,
            feature,
            bin_size,
            min,
            max,
            seed,
        } => run_hist(data, out, feature, bin_size, min, max, seed),
        Command::Footprint {
            out,
            shape,
            bytes,
            ram_saving,
        } => run_footprint(out, shape, bytes, ram_saving),
    }
}
