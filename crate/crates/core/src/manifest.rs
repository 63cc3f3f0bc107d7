//! JSON sidecars (`<name>.manifest.json`) that make every artifact
//! self-describing.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::drift::{DriftRecord, ReplayConcept};
use crate::stream::{load_csv, LoadedStream, Schema, SchemaHints, StreamError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamManifest {
    pub schema: Schema,
    pub row_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftRecord>,
    /// Fully resolved settings of the command that produced the artifact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

/// `data/abalone.csv` -> `data/abalone.manifest.json`.
pub fn manifest_path(path: impl AsRef<Path>) -> PathBuf {
    path.as_ref().with_extension("manifest.json")
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), StreamError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T, StreamError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| StreamError::Open {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

impl StreamManifest {
    pub fn new(schema: Schema, row_count: usize) -> Self {
        Self {
            schema,
            row_count,
            seed: None,
            drift: None,
            config: None,
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), StreamError> {
        write_json(path, self)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, StreamError> {
        read_json(path)
    }
}

/// Loads a stream CSV, honouring its sidecar manifest when one exists.
///
/// With a manifest the schema (target, kinds, dictionaries) comes from it and
/// `target` must agree if given. Without one `target` is required.
pub fn load_stream(
    path: impl AsRef<Path>,
    target: Option<&str>,
) -> Result<(LoadedStream, Option<StreamManifest>), StreamError> {
    let path = path.as_ref();
    let mpath = manifest_path(path);
    if mpath.exists() {
        let manifest = StreamManifest::read(&mpath)?;
        let mtarget = manifest.schema.target_name().to_owned();
        if let Some(t) = target {
            if t != mtarget {
                return Err(StreamError::InvalidSchema(format!(
                    "target `{t}` disagrees with manifest target `{mtarget}`"
                )));
            }
        }
        let loaded = load_csv(path, &mtarget, &SchemaHints::from_schema(&manifest.schema))?;
        if loaded.schema.columns().len() != manifest.schema.columns().len() {
            return Err(StreamError::InvalidSchema(
                "CSV header does not match manifest schema".into(),
            ));
        }
        Ok((loaded, Some(manifest)))
    } else {
        let target = target.ok_or_else(|| {
            StreamError::InvalidSchema(format!(
                "no manifest at `{}`; a target column must be given",
                mpath.display()
            ))
        })?;
        Ok((load_csv(path, target, &SchemaHints::default())?, None))
    }
}

/// Index of externally generated concept CSVs (one file per concept, in
/// drifting-feature order), as written by a generative augmentation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptSetManifest {
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drifting_feature: Option<String>,
    pub concepts: Vec<ConceptFile>,
    /// Generator settings, recorded for provenance only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptFile {
    /// Path relative to the manifest's directory.
    pub file: PathBuf,
    pub rows: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub feature_means: BTreeMap<String, f64>,
}

/// Loads every concept listed in a concept-set manifest.
///
/// All files must share the first file's schema and hold exactly the
/// declared number of rows with none rejected.
pub fn load_concept_set(
    path: impl AsRef<Path>,
) -> Result<(ConceptSetManifest, Vec<ReplayConcept>), StreamError> {
    let path = path.as_ref();
    let manifest: ConceptSetManifest = read_json(path)?;
    if manifest.concepts.is_empty() {
        return Err(StreamError::InvalidSchema(
            "concept set lists no files".into(),
        ));
    }
    let dir = path.parent().unwrap_or(Path::new(""));
    let mut hints = SchemaHints::default();
    let mut schema: Option<Schema> = None;
    let mut concepts = Vec::with_capacity(manifest.concepts.len());
    for c in &manifest.concepts {
        let file = dir.join(&c.file);
        let loaded = load_csv(&file, &manifest.target, &hints)?;
        let bad = |msg: String| StreamError::InvalidSchema(format!("`{}`: {msg}", file.display()));
        if loaded.rejected > 0 {
            return Err(bad(format!("{} rows rejected", loaded.rejected)));
        }
        if loaded.instances.len() != c.rows {
            return Err(bad(format!(
                "{} rows, manifest says {}",
                loaded.instances.len(),
                c.rows
            )));
        }
        match &schema {
            None => {
                hints = SchemaHints::from_schema(&loaded.schema);
                schema = Some(loaded.schema.clone());
            }
            Some(first) if *first != loaded.schema => {
                return Err(bad("schema differs from the first concept".into()));
            }
            Some(_) => {}
        }
        concepts.push(ReplayConcept::new(loaded.schema, loaded.instances));
    }
    if let (Some(f), Some(s)) = (&manifest.drifting_feature, &schema) {
        if s.feature_index(f).is_none() {
            return Err(StreamError::InvalidSchema(format!(
                "drifting feature `{f}` not in concept schema"
            )));
        }
    }
    Ok((manifest, concepts))
}
