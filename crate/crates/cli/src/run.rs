use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use driftbench::drift::DriftRecord;
use driftbench::eval::{run_experiment, write_summary, ExperimentConfig, MetricsWriter, Summary};
use driftbench::interval::{AdaPiConfig, AdaPiModel, IntervalModel, MveModel};
use driftbench::learners::{
    FimtTree, ForestConfig, OnlineBaggingForest, PageHinkleyConfig, Regressor, SlidingWindowKnn,
    Soknl, TreeConfig,
};
use driftbench::manifest::{load_stream, manifest_path, write_json};
use driftbench::stream::ColumnKind;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{usage, write_config};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Learner {
    /// Sliding-window k-nearest neighbours.
    Knn,
    /// Incremental regression tree with per-node drift detection.
    Fimt,
    /// Online-bagging forest of regression trees.
    Arf,
    /// Self-optimising k-nearest leaves over the forest.
    Soknl,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pi {
    None,
    Mve,
    Adapi,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Stream CSV; a `<stem>.manifest.json` sidecar supplies schema and drift bookkeeping.
    #[arg(long)]
    input: PathBuf,
    /// Target column; optional when the input has a manifest.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_enum)]
    learner: Learner,
    /// Neighbours for knn.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Sliding window capacity for knn.
    #[arg(long, default_value_t = 1000)]
    window: usize,
    #[arg(long, default_value_t = 200.0)]
    grace_period: f64,
    #[arg(long, default_value_t = 0.01)]
    split_confidence: f64,
    #[arg(long, default_value_t = 0.05)]
    tie_threshold: f64,
    #[arg(long, default_value_t = 30)]
    ensemble_size: usize,
    /// Poisson rate of the online-bagging weights.
    #[arg(long, default_value_t = 6.0)]
    lambda: f64,
    /// Disable Page–Hinkley drift detection in trees and forest members.
    #[arg(long)]
    no_drift_detection: bool,
    #[arg(long, value_enum, default_value_t = Pi::None)]
    pi: Pi,
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    #[arg(long, default_value_t = 0.01)]
    adapi_floor: f64,
    #[arg(long, default_value_t = 0.02)]
    adapi_rate: f64,
    #[arg(long, default_value_t = 1000)]
    prequential_window: usize,
    /// Record interval; defaults to the prequential window.
    #[arg(long)]
    report_every: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Metrics CSV; the summary and run manifest are written alongside.
    #[arg(long)]
    output: PathBuf,
    /// Print a learner state hash every 10,000 instances.
    #[arg(long)]
    debug_state_hash: bool,
    /// Also write the resolved settings to this JSON file.
    #[arg(long)]
    config_out: Option<PathBuf>,
}

/// Sidecar of a metrics file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: serde_json::Value,
    /// Drift bookkeeping of the evaluated stream, when it was synthesized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftRecord>,
    pub summary: Summary,
}

/// `metrics.csv` -> `metrics.summary.txt`.
pub fn summary_path(output: &Path) -> PathBuf {
    output.with_extension("summary.txt")
}

const HASH_EVERY: usize = 10_000;

pub fn execute(a: Args) -> anyhow::Result<()> {
    validate(&a)?;
    let (loaded, stream_manifest) = load_stream(&a.input, a.target.as_deref())
        .with_context(|| format!("loading `{}`", a.input.display()))?;
    let schema = &loaded.schema;
    let kinds = schema.feature_kinds();
    let report_every = a.report_every.unwrap_or(a.prequential_window);

    let detection = (!a.no_drift_detection).then(PageHinkleyConfig::default);
    let tree = TreeConfig {
        grace_period: a.grace_period,
        split_confidence: a.split_confidence,
        tie_threshold: a.tie_threshold,
        drift_detection: detection,
        ..TreeConfig::default()
    };
    let forest = ForestConfig {
        ensemble_size: a.ensemble_size,
        lambda: Some(a.lambda),
        tree: TreeConfig {
            drift_detection: None,
            ..tree
        },
        member_detection: detection,
        seed: a.seed,
    };
    let mut learner: Box<dyn Regressor> = match a.learner {
        Learner::Knn => Box::new(SlidingWindowKnn::new(a.k, a.window, kinds)),
        Learner::Fimt => Box::new(FimtTree::new(tree, kinds)),
        Learner::Arf => Box::new(OnlineBaggingForest::new(forest, kinds)),
        Learner::Soknl => Box::new(Soknl::new(forest, kinds, None)),
    };
    let mut pi_model: Option<Box<dyn IntervalModel>> = match a.pi {
        Pi::None => None,
        Pi::Mve => Some(Box::new(MveModel::new(a.confidence)?)),
        Pi::Adapi => Some(Box::new(AdaPiModel::new(AdaPiConfig {
            confidence: a.confidence,
            floor: a.adapi_floor,
            rate: a.adapi_rate,
            ..AdaPiConfig::default()
        })?)),
    };

    let config = json!({
        "command": "run",
        "input": a.input,
        "target": schema.target_name(),
        "predictors": schema.num_features(),
        "categorical_features": schema.features().filter(|c| c.kind == ColumnKind::Categorical).count(),
        "rejected_rows": loaded.rejected,
        "learner": a.learner,
        "knn": { "k": a.k, "window": a.window },
        "tree": tree,
        "forest": forest,
        "pi": a.pi,
        "confidence": a.confidence,
        "adapi": { "floor": a.adapi_floor, "rate": a.adapi_rate },
        "prequential_window": a.prequential_window,
        "report_every": report_every,
        "seed": a.seed,
        "output": a.output,
    });

    let file =
        File::create(&a.output).with_context(|| format!("creating `{}`", a.output.display()))?;
    let mut writer = MetricsWriter::new(BufWriter::new(file))?;
    let mut write_err = None;
    let exp = ExperimentConfig {
        window: a.prequential_window,
        report_every,
        predictors: schema.num_features(),
        hash_every: a.debug_state_hash.then_some(HASH_EVERY),
    };
    let pi = pi_model.as_mut().map(|m| m as &mut dyn IntervalModel);
    let summary = run_experiment(&loaded.instances, &mut learner, pi, &exp, |r| {
        if write_err.is_none() {
            write_err = writer.write(r).err();
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    writer.finish()?;

    if a.debug_state_hash {
        for (index, hash) in &summary.state_hashes {
            println!("{index}\t{hash:016x}");
        }
    }
    write_summary(
        BufWriter::new(File::create(summary_path(&a.output))?),
        &summary,
    )?;
    let run = RunManifest {
        config: config.clone(),
        drift: stream_manifest.and_then(|m| m.drift),
        summary,
    };
    write_json(manifest_path(&a.output), &run)?;
    write_config(a.config_out.as_deref(), &config)?;
    Ok(())
}

fn validate(a: &Args) -> anyhow::Result<()> {
    let checks = [
        (a.k > 0, "--k must be positive"),
        (a.window > 0, "--window must be positive"),
        (a.ensemble_size > 0, "--ensemble-size must be positive"),
        (a.grace_period > 0.0, "--grace-period must be positive"),
        (
            a.split_confidence > 0.0 && a.split_confidence < 1.0,
            "--split-confidence must lie in (0, 1)",
        ),
        (
            a.tie_threshold >= 0.0,
            "--tie-threshold must be non-negative",
        ),
        (
            a.lambda > 0.0 && a.lambda.is_finite(),
            "--lambda must be positive",
        ),
        (
            a.confidence > 0.0 && a.confidence < 1.0,
            "--confidence must lie in (0, 1)",
        ),
        (a.adapi_floor > 0.0, "--adapi-floor must be positive"),
        (a.adapi_rate >= 0.0, "--adapi-rate must be non-negative"),
        (
            a.prequential_window > 0,
            "--prequential-window must be positive",
        ),
        (a.report_every != Some(0), "--report-every must be positive"),
    ];
    match checks.iter().find(|(ok, _)| !ok) {
        Some((_, msg)) => Err(usage(*msg)),
        None => Ok(()),
    }
}
