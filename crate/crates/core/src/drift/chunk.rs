use super::DriftError;
use crate::stream::{ColumnKind, Instance, Schema};

/// Sorts `data` ascending by `feature` (stable, so file order breaks ties)
/// and cuts it into `num_chunks` contiguous parts whose sizes differ by at
/// most one. Earlier chunks take the remainder rows.
pub fn chunk_by_feature(
    data: &[Instance],
    schema: &Schema,
    feature: &str,
    num_chunks: usize,
) -> Result<Vec<Vec<Instance>>, DriftError> {
    let f = numeric_feature(schema, feature)?;
    if num_chunks < 2 || data.len() < num_chunks {
        return Err(DriftError::InvalidChunkCount {
            chunks: num_chunks,
            rows: data.len(),
        });
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data[a].features[f].total_cmp(&data[b].features[f]));

    let base = data.len() / num_chunks;
    let extra = data.len() % num_chunks;
    let mut chunks = Vec::with_capacity(num_chunks);
    let mut start = 0;
    for c in 0..num_chunks {
        let len = base + usize::from(c < extra);
        chunks.push(
            order[start..start + len]
                .iter()
                .map(|&i| data[i].clone())
                .collect(),
        );
        start += len;
    }
    Ok(chunks)
}

pub(crate) fn numeric_feature(schema: &Schema, feature: &str) -> Result<usize, DriftError> {
    let f = schema
        .feature_index(feature)
        .ok_or_else(|| DriftError::FeatureMissing(feature.to_owned()))?;
    if schema.feature(f).kind != ColumnKind::Numeric {
        return Err(DriftError::FeatureNotNumeric(feature.to_owned()));
    }
    Ok(f)
}
