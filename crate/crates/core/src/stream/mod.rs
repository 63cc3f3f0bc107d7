//! Data model shared by every other module: schemas, instances, CSV
//! ingestion and the seeded random source.

mod csvio;
mod rng;
mod schema;

pub use csvio::{load_csv, read_csv, write_csv, write_csv_to, LoadedStream, SchemaHints};
pub use rng::SeededRng;
pub use schema::{Column, ColumnKind, Instance, Schema};

#[derive(Debug, thiserror::Error)]
pub enum StreamError {
    #[error("cannot open `{path}`")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("target column `{0}` not found in header")]
    MissingTarget(String),
    #[error("dataset has no data rows")]
    Empty,
    #[error("all {0} data rows were rejected")]
    AllRejected(usize),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("instance has {found} features, schema expects {expected}")]
    Arity { expected: usize, found: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}
