use std::collections::HashSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use driftbench::drift::{Sector, SectorKind};
use driftbench::eval::{read_metrics_csv, EvaluationRecord};
use driftbench::manifest::{manifest_path, read_json};
use serde_json::json;

use crate::run::RunManifest;
use crate::{usage, write_config};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Rmse,
    AdjR2,
    Coverage,
    Nmpiw,
    /// Every metric, as `<series>:<metric>` series.
    All,
}

impl Metric {
    const EACH: [Metric; 4] = [Metric::Rmse, Metric::AdjR2, Metric::Coverage, Metric::Nmpiw];

    fn name(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::AdjR2 => "adj_r2",
            Metric::Coverage => "coverage",
            Metric::Nmpiw => "nmpiw",
            Metric::All => "all",
        }
    }

    fn get(self, r: &EvaluationRecord) -> Option<f64> {
        match self {
            Metric::Rmse => r.rmse,
            Metric::AdjR2 => r.adj_r2,
            Metric::Coverage => r.coverage,
            Metric::Nmpiw => r.nmpiw,
            Metric::All => unreachable!("expanded before lookup"),
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Metrics CSVs written by `run`. Series are named after the file stem.
    #[arg(required = true)]
    metrics: Vec<PathBuf>,
    /// Long-format output CSV (`series,index,value`).
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Metric::Rmse)]
    metric: Metric,
    /// Add `sector,in_drift` columns from each run's stream layout and
    /// write the drift boundaries to `<output>.boundaries.csv`.
    #[arg(long)]
    annotate: bool,
    /// Also write the resolved settings to this JSON file.
    #[arg(long)]
    config_out: Option<PathBuf>,
}

/// `report.csv` -> `report.boundaries.csv`.
pub fn boundaries_path(output: &Path) -> PathBuf {
    output.with_extension("boundaries.csv")
}

struct Input {
    series: String,
    records: Vec<EvaluationRecord>,
    layout: Option<Vec<Sector>>,
    boundaries: Vec<(usize, usize)>,
}

pub fn execute(a: Args) -> anyhow::Result<()> {
    let mut seen = HashSet::new();
    let mut inputs = Vec::with_capacity(a.metrics.len());
    for path in &a.metrics {
        let series = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !seen.insert(series.clone()) {
            return Err(usage(format!(
                "two metrics files share the series name `{series}`"
            )));
        }
        let file = File::open(path).with_context(|| format!("opening `{}`", path.display()))?;
        let records =
            read_metrics_csv(file).with_context(|| format!("reading `{}`", path.display()))?;
        let (layout, boundaries) = if a.annotate {
            let mpath = manifest_path(path);
            let run: RunManifest = read_json(&mpath)
                .with_context(|| format!("reading run manifest `{}`", mpath.display()))?;
            match run.drift {
                Some(d) => (Some(d.layout), d.boundaries),
                None => (None, Vec::new()),
            }
        } else {
            (None, Vec::new())
        };
        inputs.push(Input {
            series,
            records,
            layout,
            boundaries,
        });
    }

    let metrics: Vec<Metric> = if a.metric == Metric::All {
        Metric::EACH.to_vec()
    } else {
        vec![a.metric]
    };
    let mut w = csv::Writer::from_writer(BufWriter::new(
        File::create(&a.output).with_context(|| format!("creating `{}`", a.output.display()))?,
    ));
    if a.annotate {
        w.write_record(["series", "index", "value", "sector", "in_drift"])?;
    } else {
        w.write_record(["series", "index", "value"])?;
    }
    for input in &inputs {
        for &m in &metrics {
            let series = if a.metric == Metric::All {
                format!("{}:{}", input.series, m.name())
            } else {
                input.series.clone()
            };
            for r in &input.records {
                let value = m.get(r).map(|v| v.to_string()).unwrap_or_default();
                let mut row = vec![series.clone(), r.index.to_string(), value];
                if a.annotate {
                    let (sector, in_drift) = match &input.layout {
                        Some(layout) => annotate(layout, r.index),
                        None => (String::new(), String::new()),
                    };
                    row.push(sector);
                    row.push(in_drift);
                }
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;

    if a.annotate {
        let mut b = csv::Writer::from_path(boundaries_path(&a.output))?;
        b.write_record(["series", "start", "end"])?;
        for input in &inputs {
            for (s, e) in &input.boundaries {
                b.write_record([input.series.clone(), s.to_string(), e.to_string()])?;
            }
        }
        b.flush()?;
    }

    let config = json!({
        "command": "report",
        "metrics": a.metrics,
        "output": a.output,
        "metric": a.metric.name(),
        "annotate": a.annotate,
    });
    write_config(a.config_out.as_deref(), &config)?;
    Ok(())
}

/// Sector ordinal and drift flag of the last instance counted by `index`.
fn annotate(layout: &[Sector], index: u64) -> (String, String) {
    let Some(pos) = (index as usize).checked_sub(1) else {
        return (String::new(), String::new());
    };
    match layout.iter().position(|s| s.start <= pos && pos < s.end) {
        Some(i) => (
            i.to_string(),
            (layout[i].kind == SectorKind::Drift).to_string(),
        ),
        None => (String::new(), String::new()),
    }
}
