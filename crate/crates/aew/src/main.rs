//! Command-line interface.
//!
//! Subcommands: `simulate` samples a dataset, `aew` aggregates a
//! dictionary, `plugin` trains a local polynomial classifier, `adaptive`
//! runs the split-validate-aggregate pipeline, `experiment` runs a Monte
//! Carlo study, `rates` fits a slope on an existing points CSV, and
//! `rerun` repeats any recorded run byte-identically.
//!
//! Every run writes its outputs atomically plus a `*.manifest.json`
//! sidecar recording the resolved config. Exit codes: 0 success, 1 usage
//! or input problems, 2 a violated mathematical invariant.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use aew::adaptive::{adaptive_plugin_aggregate, BetaGrid, MemberRecord, SkippedMember, SplitPlan};
use aew::aggregation::{aew_weights, aggregation_certificate, AggregationCertificate};
use aew::config::{
    check_schema_version, load_json, DictionaryConfig, ExperimentSpec, PluginRunConfig,
    ResolvedReport, SimulateConfig, SCHEMA_VERSION,
};
use aew::data::Dataset;
use aew::error::{Error, Result};
use aew::experiments::{
    excess_risk_mc, oracle_gap, rate_fit, GapSample, OracleGapReport, RatePoint, RateReport,
};
use aew::manifest::{to_json_bytes, write_atomic, RunManifest};
use aew::plugin::{FitPath, LocalPolyEstimator};

#[derive(Parser)]
#[command(
    name = "aew",
    version,
    about = "Exponential-weights aggregation, plug-in classifiers, and rate experiments"
)]
struct Cli {
    /// Worker threads for experiment replications (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a dataset from a distribution config and write it as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute exponential weights and the aggregation certificate for a
    /// dictionary on a dataset.
    Aew {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a local polynomial plug-in classifier and write predictions.
    Plugin {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Unlabeled points to predict at (header x1..xd); defaults to the
        /// training points.
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the adaptive split-validate-aggregate pipeline on a dataset.
    Adaptive {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a Monte Carlo excess-risk experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a log-log rate slope on an existing points CSV.
    Rates {
        #[arg(long)]
        points: PathBuf,
        /// Theoretical slope to compare against (negative for decay).
        #[arg(long, allow_negative_numbers = true)]
        target: f64,
        #[arg(long, default_value_t = 0.25)]
        tolerance: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeat a recorded run from its manifest; outputs are byte-identical.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        /// Write outputs here instead of the recorded paths.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// What a handler hands back for the manifest.
struct RunRecord {
    subcommand: &'static str,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

fn run(command: Command) -> Result<()> {
    let started = Instant::now();
    let record = match command {
        Command::Simulate { config, seed, out } => {
            let cfg: SimulateConfig = load_json(&config)?;
            do_simulate(cfg, seed, &out)?
        }
        Command::Aew { data, dict, out } => {
            let dcfg: DictionaryConfig = load_json(&dict)?;
            do_aew(&data, dcfg, &out)?
        }
        Command::Plugin { data, config, queries, out } => {
            let pcfg: PluginRunConfig = load_json(&config)?;
            do_plugin(&data, pcfg, queries, &out)?
        }
        Command::Adaptive { data, out } => do_adaptive(&data, &out)?,
        Command::Experiment { config, seed, out } => {
            let spec: ExperimentSpec = load_json(&config)?;
            do_experiment(spec, seed, &out)?
        }
        Command::Rates { points, target, tolerance, out } => {
            do_rates(&points, RatesParams { target_exponent: target, tolerance }, &out)?
        }
        Command::Rerun { manifest, out } => return rerun(&manifest, out, started),
    };
    finish(record, started)
}

fn finish(record: RunRecord, started: Instant) -> Result<()> {
    let mut manifest = RunManifest::new(record.subcommand, record.config, record.seed);
    manifest.inputs = record.inputs;
    manifest.outputs = record.outputs;
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    manifest.save()?;
    Ok(())
}

/// Re-dispatches a recorded run. The manifest's config is self-contained;
/// input files are reread from their recorded paths.
fn rerun(manifest_path: &Path, out_override: Option<PathBuf>, started: Instant) -> Result<()> {
    let m = RunManifest::load(manifest_path)?;
    let out = out_override
        .or_else(|| m.outputs.first().cloned())
        .ok_or_else(|| Error::Config("manifest records no outputs".into()))?;
    let first_input = || {
        m.inputs
            .first()
            .cloned()
            .ok_or_else(|| Error::Config("manifest records no input files".into()))
    };
    let record = match m.subcommand.as_str() {
        "simulate" => do_simulate(serde_json::from_value(m.config)?, None, &out)?,
        "aew" => do_aew(&first_input()?, serde_json::from_value(m.config)?, &out)?,
        "plugin" => do_plugin(
            &first_input()?,
            serde_json::from_value(m.config)?,
            m.inputs.get(1).cloned(),
            &out,
        )?,
        "adaptive" => do_adaptive(&first_input()?, &out)?,
        "experiment" => do_experiment(serde_json::from_value(m.config)?, None, &out)?,
        "rates" => do_rates(&first_input()?, serde_json::from_value(m.config)?, &out)?,
        other => {
            return Err(Error::Config(format!(
                "manifest subcommand \"{other}\" is not rerunnable"
            )))
        }
    };
    finish(record, started)
}

fn do_simulate(mut cfg: SimulateConfig, seed_flag: Option<u64>, out: &Path) -> Result<RunRecord> {
    check_schema_version(cfg.schema_version)?;
    let seed = seed_flag.or(cfg.seed).ok_or_else(|| {
        Error::Config("no seed: set \"seed\" in the config or pass --seed".into())
    })?;
    cfg.seed = Some(seed);
    let data = cfg.distribution.resolve()?.sample(cfg.n, seed)?;
    write_atomic(out, &data.to_csv_bytes()?)?;
    Ok(RunRecord {
        subcommand: "simulate",
        config: serde_json::to_value(&cfg)?,
        seed: Some(seed),
        inputs: vec![],
        outputs: vec![out.to_path_buf()],
    })
}

#[derive(Serialize)]
struct AewReport {
    schema_version: u32,
    weights: Vec<f64>,
    certificate: AggregationCertificate,
}

fn do_aew(data_path: &Path, dcfg: DictionaryConfig, out: &Path) -> Result<RunRecord> {
    let data = Dataset::load_csv(data_path)?;
    let dict = dcfg.resolve(data.dim())?;
    let weights = aew_weights(&data, &dict)?;
    let certificate = aggregation_certificate(&data, &dict)?;
    let report = AewReport {
        schema_version: SCHEMA_VERSION,
        weights: weights.as_slice().to_vec(),
        certificate,
    };
    write_atomic(out, &to_json_bytes(&report)?)?;
    Ok(RunRecord {
        subcommand: "aew",
        config: serde_json::to_value(&dcfg)?,
        seed: None,
        inputs: vec![data_path.to_path_buf()],
        outputs: vec![out.to_path_buf()],
    })
}

fn do_plugin(
    data_path: &Path,
    pcfg: PluginRunConfig,
    queries: Option<PathBuf>,
    out: &Path,
) -> Result<RunRecord> {
    let train = Dataset::load_csv(data_path)?;
    let config = pcfg.resolve(train.dim(), train.len())?;
    let estimator = LocalPolyEstimator::fit(&train, config)?;
    let points: Vec<Vec<f64>> = match &queries {
        Some(q) => read_points_csv(q, train.dim())?,
        None => train.examples().iter().map(|e| e.x.clone()).collect(),
    };
    write_atomic(out, &predictions_csv_bytes(&estimator, &points, train.dim())?)?;
    let mut inputs = vec![data_path.to_path_buf()];
    inputs.extend(queries);
    Ok(RunRecord {
        subcommand: "plugin",
        config: serde_json::to_value(&pcfg)?,
        seed: None,
        inputs,
        outputs: vec![out.to_path_buf()],
    })
}

#[derive(Serialize)]
struct AdaptiveReport {
    schema_version: u32,
    plan: SplitPlan,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<BetaGrid>,
    members: Vec<MemberRecord>,
    skipped: Vec<SkippedMember>,
}

fn do_adaptive(data_path: &Path, out: &Path) -> Result<RunRecord> {
    let data = Dataset::load_csv(data_path)?;
    let fit = adaptive_plugin_aggregate(&data)?;
    let report = AdaptiveReport {
        schema_version: SCHEMA_VERSION,
        plan: fit.plan,
        grid: fit.grid,
        members: fit.members,
        skipped: fit.skipped,
    };
    write_atomic(out, &to_json_bytes(&report)?)?;
    Ok(RunRecord {
        subcommand: "adaptive",
        config: serde_json::Value::Null,
        seed: None,
        inputs: vec![data_path.to_path_buf()],
        outputs: vec![out.to_path_buf()],
    })
}

#[derive(Serialize)]
struct RatesFile {
    schema_version: u32,
    kind: &'static str,
    report: RateReport,
}

#[derive(Serialize)]
struct GapFile {
    schema_version: u32,
    kind: &'static str,
    report: OracleGapReport,
}

fn do_experiment(spec: ExperimentSpec, seed_flag: Option<u64>, out: &Path) -> Result<RunRecord> {
    let resolved = spec.resolve(seed_flag)?;
    let sidecar;
    let report_bytes;
    match resolved.report {
        ResolvedReport::Rates { target_exponent, tolerance } => {
            let points = excess_risk_mc(&resolved.config)?;
            sidecar = out.with_extension("points.csv");
            write_atomic(&sidecar, &points_csv_bytes(&points)?)?;
            let report = rate_fit(&points, target_exponent, tolerance)?;
            report_bytes =
                to_json_bytes(&RatesFile { schema_version: SCHEMA_VERSION, kind: "rates", report })?;
        }
        ResolvedReport::OracleGap { a } => {
            let report = oracle_gap(&resolved.config, a)?;
            sidecar = out.with_extension("samples.csv");
            write_atomic(&sidecar, &samples_csv_bytes(&report.samples)?)?;
            report_bytes = to_json_bytes(&GapFile {
                schema_version: SCHEMA_VERSION,
                kind: "oracle_gap",
                report,
            })?;
        }
    }
    write_atomic(out, &report_bytes)?;
    Ok(RunRecord {
        subcommand: "experiment",
        seed: resolved.spec.seed,
        config: serde_json::to_value(&resolved.spec)?,
        inputs: vec![],
        outputs: vec![out.to_path_buf(), sidecar],
    })
}

#[derive(Serialize, Deserialize)]
struct RatesParams {
    target_exponent: f64,
    tolerance: f64,
}

fn do_rates(points_path: &Path, params: RatesParams, out: &Path) -> Result<RunRecord> {
    let points = read_rate_points(points_path)?;
    let report = rate_fit(&points, params.target_exponent, params.tolerance)?;
    let file = RatesFile { schema_version: SCHEMA_VERSION, kind: "rates", report };
    write_atomic(out, &to_json_bytes(&file)?)?;
    Ok(RunRecord {
        subcommand: "rates",
        config: serde_json::to_value(&params)?,
        seed: None,
        inputs: vec![points_path.to_path_buf()],
        outputs: vec![out.to_path_buf()],
    })
}

fn points_csv_bytes(points: &[RatePoint]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p)?;
    }
    w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))
}

fn samples_csv_bytes(samples: &[GapSample]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in samples {
        w.serialize(s)?;
    }
    w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))
}

fn read_rate_points(path: &Path) -> Result<Vec<RatePoint>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut points = Vec::new();
    for row in rdr.deserialize::<RatePoint>() {
        points.push(row?);
    }
    Ok(points)
}

/// Reads unlabeled query points: CSV with header x1..xd.
fn read_points_csv(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let expected: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    if headers.len() != dim || headers.iter().zip(&expected).any(|(h, e)| h != e) {
        return Err(Error::Parse(format!(
            "{}: expected header {}",
            path.display(),
            expected.join(",")
        )));
    }
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let mut x = Vec::with_capacity(dim);
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("{}: bad number {field:?}", path.display())))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("{}: non-finite coordinate", path.display())));
            }
            x.push(v);
        }
        if x.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
        }
        points.push(x);
    }
    Ok(points)
}

fn path_name(path: FitPath) -> &'static str {
    match path {
        FitPath::Full => "full",
        FitPath::Ridged => "ridged",
        FitPath::LocalConstant => "local_constant",
        FitPath::EmptyWindow => "empty_window",
    }
}

fn predictions_csv_bytes(
    estimator: &LocalPolyEstimator,
    points: &[Vec<f64>],
    dim: usize,
) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.extend(["eta", "label", "path"].map(String::from));
    w.write_record(&header)?;
    for x in points {
        let est = estimator.estimate(x)?;
        let label = if est.eta >= 0.5 { 1 } else { -1 };
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        row.push(est.eta.to_string());
        row.push(label.to_string());
        row.push(path_name(est.path).to_string());
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))
}
