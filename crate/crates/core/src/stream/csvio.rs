use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::schema::{Column, ColumnKind, Instance, Schema};
use super::StreamError;

/// Optional overrides applied while loading a CSV.
///
/// Columns without a kind override are inferred: a column is numeric when at
/// least half of its non-empty cells parse as finite reals. Fixed
/// dictionaries pin categorical codes so that a written stream reloads with
/// identical codes.
#[derive(Debug, Clone, Default)]
pub struct SchemaHints {
    pub kinds: HashMap<String, ColumnKind>,
    pub categories: HashMap<String, Vec<String>>,
}

impl SchemaHints {
    pub fn with_kind(mut self, column: impl Into<String>, kind: ColumnKind) -> Self {
        self.kinds.insert(column.into(), kind);
        self
    }

    /// Hints that reproduce `schema` exactly (kinds and dictionaries).
    pub fn from_schema(schema: &Schema) -> Self {
        let mut hints = Self::default();
        for c in schema.columns() {
            hints.kinds.insert(c.name.clone(), c.kind);
            if c.kind == ColumnKind::Categorical {
                hints
                    .categories
                    .insert(c.name.clone(), c.categories.clone());
            }
        }
        hints
    }
}

#[derive(Debug, Clone)]
pub struct LoadedStream {
    pub schema: Schema,
    pub instances: Vec<Instance>,
    /// Data rows dropped for unparsable, missing or non-finite numeric cells.
    pub rejected: usize,
}

pub fn load_csv(
    path: impl AsRef<Path>,
    target: &str,
    hints: &SchemaHints,
) -> Result<LoadedStream, StreamError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| StreamError::Open {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, target, hints)
}

pub fn read_csv<R: Read>(
    reader: R,
    target: &str,
    hints: &SchemaHints,
) -> Result<LoadedStream, StreamError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(StreamError::Empty);
    }
    let target_index = header
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| StreamError::MissingTarget(target.to_owned()))?;

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?);
    }
    if rows.is_empty() {
        return Err(StreamError::Empty);
    }

    let mut columns = Vec::with_capacity(header.len());
    for (i, name) in header.iter().enumerate() {
        let kind = if i == target_index {
            ColumnKind::Numeric
        } else if let Some(k) = hints.kinds.get(name) {
            *k
        } else {
            infer_kind(rows.iter().map(|r| r.get(i).unwrap_or("")))
        };
        columns.push(match kind {
            ColumnKind::Numeric => Column::numeric(name.clone()),
            ColumnKind::Categorical => Column::categorical(
                name.clone(),
                hints.categories.get(name).cloned().unwrap_or_default(),
            ),
        });
    }
    let mut schema = Schema::new(columns, target_index)?;

    let width = header.len();
    let mut instances = Vec::with_capacity(rows.len());
    let mut rejected = 0;
    'rows: for row in &rows {
        if row.len() != width {
            rejected += 1;
            continue;
        }
        let mut features = Vec::with_capacity(width - 1);
        let mut y = f64::NAN;
        let mut pending: Vec<(usize, &str)> = Vec::new();
        for (i, cell) in row.iter().enumerate() {
            match schema.columns()[i].kind {
                ColumnKind::Numeric => match parse_real(cell) {
                    Some(v) if i == target_index => y = v,
                    Some(v) => features.push(v),
                    None => {
                        rejected += 1;
                        continue 'rows;
                    }
                },
                ColumnKind::Categorical => {
                    pending.push((features.len(), cell));
                    features.push(0.0);
                }
            }
        }
        // Intern only once the row is known to be accepted, so rejected rows
        // never add categories.
        for (slot, text) in pending {
            let col = schema.feature_column_index(slot);
            features[slot] = schema.column_mut(col).intern(text) as f64;
        }
        instances.push(Instance::new(features, y));
    }
    if instances.is_empty() {
        return Err(StreamError::AllRejected(rejected));
    }
    Ok(LoadedStream {
        schema,
        instances,
        rejected,
    })
}

fn parse_real(cell: &str) -> Option<f64> {
    let v: f64 = cell.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn infer_kind<'a>(cells: impl Iterator<Item = &'a str>) -> ColumnKind {
    let (mut non_empty, mut numeric) = (0usize, 0usize);
    for c in cells {
        if c.trim().is_empty() {
            continue;
        }
        non_empty += 1;
        if parse_real(c).is_some() {
            numeric += 1;
        }
    }
    if 2 * numeric >= non_empty {
        ColumnKind::Numeric
    } else {
        ColumnKind::Categorical
    }
}

pub fn write_csv<'a>(
    path: impl AsRef<Path>,
    schema: &Schema,
    stream: impl IntoIterator<Item = &'a Instance>,
) -> Result<(), StreamError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| StreamError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = std::io::BufWriter::new(file);
    write_csv_to(&mut w, schema, stream)?;
    w.flush()?;
    Ok(())
}

/// Serializes reals with Rust's shortest round-trip formatting so reloading
/// reproduces every value bit for bit.
pub fn write_csv_to<'a, W: Write>(
    writer: W,
    schema: &Schema,
    stream: impl IntoIterator<Item = &'a Instance>,
) -> Result<(), StreamError> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    w.write_record(schema.columns().iter().map(|c| c.name.as_str()))?;
    let t = schema.target_index();
    let mut record: Vec<String> = Vec::with_capacity(schema.columns().len());
    for inst in stream {
        if inst.features.len() != schema.num_features() {
            return Err(StreamError::Arity {
                expected: schema.num_features(),
                found: inst.features.len(),
            });
        }
        record.clear();
        for (i, col) in schema.columns().iter().enumerate() {
            let v = match i.cmp(&t) {
                std::cmp::Ordering::Equal => inst.target,
                std::cmp::Ordering::Less => inst.features[i],
                std::cmp::Ordering::Greater => inst.features[i - 1],
            };
            record.push(match col.kind {
                ColumnKind::Numeric => format!("{v}"),
                ColumnKind::Categorical => {
                    col.categories.get(v as usize).cloned().ok_or_else(|| {
                        StreamError::InvalidSchema(format!(
                            "code {v} outside dictionary of `{}`",
                            col.name
                        ))
                    })?
                }
            });
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
