use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use driftbench::drift::{
    chunk_by_feature, compose_abrupt, compose_gradual, compose_incremental,
    select_drifting_feature, BootstrapSampler, ConceptOrder, ConceptSource, CorrelationMethod,
    DriftKind, DriftRecord, DriftSpec, SynthesizedStream,
};
use driftbench::manifest::{load_concept_set, load_stream, manifest_path};
use driftbench::stream::{write_csv, Instance};
use driftbench::{SeededRng, StreamManifest};
use serde_json::json;

use crate::{usage, write_config};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Drift {
    Abrupt,
    Gradual,
    Incremental,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Order {
    /// Shuffle the concepts with the seed.
    Random,
    /// Keep the concepts in drifting-feature order.
    Given,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Correlation {
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Bandwidth {
    /// Smoothed bootstrap with Silverman's bandwidth per column.
    Silverman,
    /// Plain bootstrap: resample rows unchanged.
    None,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Source dataset CSV; concepts are cut from it and resampled.
    #[arg(
        long,
        required_unless_present = "concept_set",
        conflicts_with = "concept_set"
    )]
    input: Option<PathBuf>,
    /// Concept-set manifest listing pre-generated concept CSVs.
    #[arg(long)]
    concept_set: Option<PathBuf>,
    /// Target column; optional when the input has a manifest.
    #[arg(long)]
    target: Option<String>,
    /// Output stream CSV; its manifest is written alongside.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    drift: Drift,
    #[arg(long, default_value_t = 4)]
    concepts: usize,
    /// Rows per concept.
    #[arg(long)]
    concept_length: usize,
    /// Rows of each drifting period (gradual and incremental), must be even.
    #[arg(long, default_value_t = 0)]
    drift_length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Order::Random)]
    order: Order,
    /// Correlation used to pick the drifting feature.
    #[arg(long, value_enum, default_value_t = Correlation::Pearson)]
    correlation: Correlation,
    #[arg(long, value_enum, default_value_t = Bandwidth::Silverman)]
    bandwidth: Bandwidth,
    /// Also write the resolved settings to this JSON file.
    #[arg(long)]
    config_out: Option<PathBuf>,
}

pub fn execute(a: Args) -> anyhow::Result<()> {
    let spec = DriftSpec {
        kind: match a.drift {
            Drift::Abrupt => DriftKind::Abrupt,
            Drift::Gradual => DriftKind::Gradual,
            Drift::Incremental => DriftKind::Incremental,
        },
        num_concepts: a.concepts,
        concept_length: a.concept_length,
        drift_length: a.drift_length,
        seed: a.seed,
        order: match a.order {
            Order::Random => ConceptOrder::Random,
            Order::Given => ConceptOrder::Given,
        },
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let method = match a.correlation {
        Correlation::Pearson => CorrelationMethod::Pearson,
        Correlation::Spearman => CorrelationMethod::Spearman,
    };
    let rng = SeededRng::new(a.seed);

    let (stream, source) = if let Some(set) = &a.concept_set {
        let (m, concepts) = load_concept_set(set)
            .with_context(|| format!("loading concept set `{}`", set.display()))?;
        if let Some(t) = &a.target {
            if *t != m.target {
                return Err(usage(format!(
                    "--target `{t}` disagrees with concept set target `{}`",
                    m.target
                )));
            }
        }
        if concepts.len() != spec.num_concepts {
            return Err(usage(format!(
                "--concepts {} but the concept set holds {} files",
                spec.num_concepts,
                concepts.len()
            )));
        }
        let feature = match &m.drifting_feature {
            Some(f) => f.clone(),
            None => {
                let pooled: Vec<Instance> = concepts
                    .iter()
                    .flat_map(|c| c.rows().iter().cloned())
                    .collect();
                select_drifting_feature(&pooled, concepts[0].schema(), method)?
            }
        };
        (
            compose(&concepts, &spec, &rng, &feature)?,
            json!({ "concept_set": set }),
        )
    } else {
        let input = a
            .input
            .as_deref()
            .expect("clap enforces --input or --concept-set");
        let (loaded, _) = load_stream(input, a.target.as_deref())
            .with_context(|| format!("loading `{}`", input.display()))?;
        let feature = select_drifting_feature(&loaded.instances, &loaded.schema, method)?;
        let chunks = chunk_by_feature(
            &loaded.instances,
            &loaded.schema,
            &feature,
            spec.num_concepts,
        )?;
        let samplers = chunks
            .into_iter()
            .map(|c| match a.bandwidth {
                Bandwidth::Silverman => BootstrapSampler::new(loaded.schema.clone(), c),
                Bandwidth::None => BootstrapSampler::exact(loaded.schema.clone(), c),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let stream = compose(&samplers, &spec, &rng, &feature)?;
        (
            stream,
            json!({ "input": input, "rejected_rows": loaded.rejected }),
        )
    };

    let config = json!({
        "command": "synthesize",
        "source": source,
        "target": stream.schema.target_name(),
        "output": a.output,
        "drift": spec.kind,
        "concepts": spec.num_concepts,
        "concept_length": spec.concept_length,
        "drift_length": spec.drift_length,
        "seed": spec.seed,
        "order": spec.order,
        "correlation": format!("{:?}", a.correlation).to_lowercase(),
        "bandwidth": format!("{:?}", a.bandwidth).to_lowercase(),
    });
    write_stream(&a.output, &stream, &spec, config.clone())?;
    write_config(a.config_out.as_deref(), &config)?;
    eprintln!(
        "wrote {} rows to {} (drifting feature {})",
        stream.len(),
        a.output.display(),
        stream.drifting_feature.as_deref().unwrap_or("-")
    );
    Ok(())
}

fn compose<S: ConceptSource>(
    concepts: &[S],
    spec: &DriftSpec,
    rng: &SeededRng,
    feature: &str,
) -> anyhow::Result<SynthesizedStream> {
    let mut stream = match spec.kind {
        DriftKind::Abrupt => compose_abrupt(concepts, spec, rng)?,
        DriftKind::Gradual => compose_gradual(concepts, spec, rng)?,
        DriftKind::Incremental => compose_incremental(concepts, spec, rng, feature)?,
    };
    stream
        .drifting_feature
        .get_or_insert_with(|| feature.to_owned());
    Ok(stream)
}

fn write_stream(
    path: &Path,
    stream: &SynthesizedStream,
    spec: &DriftSpec,
    config: serde_json::Value,
) -> anyhow::Result<()> {
    write_csv(path, &stream.schema, &stream.instances)?;
    let manifest = StreamManifest {
        schema: stream.schema.clone(),
        row_count: stream.len(),
        seed: Some(spec.seed),
        drift: Some(DriftRecord::new(stream, spec)),
        config: Some(config),
    };
    manifest.write(manifest_path(path))?;
    Ok(())
}
