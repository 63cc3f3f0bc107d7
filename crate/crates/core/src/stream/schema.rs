use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::StreamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// One CSV column. Categorical columns carry their interned dictionary; a
/// value's code is its position in `categories`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl Column {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
            categories: Vec::new(),
        }
    }

    pub fn categorical(name: impl Into<String>, categories: Vec<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical,
            categories,
        }
    }

    /// Returns the code for `text`, interning it if unseen.
    pub fn intern(&mut self, text: &str) -> usize {
        match self.categories.iter().position(|c| c == text) {
            Some(code) => code,
            None => {
                self.categories.push(text.to_owned());
                self.categories.len() - 1
            }
        }
    }
}

/// Ordered column layout of a stream with exactly one numeric target.
///
/// Instances store features in column order with the target column skipped,
/// so feature `i` is column `i` when `i < target_index` and column `i + 1`
/// otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct Schema {
    columns: Vec<Column>,
    target_index: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    columns: Vec<Column>,
    target_index: usize,
}

impl TryFrom<RawSchema> for Schema {
    type Error = StreamError;

    fn try_from(raw: RawSchema) -> Result<Self, Self::Error> {
        Schema::new(raw.columns, raw.target_index)
    }
}

impl From<Schema> for RawSchema {
    fn from(s: Schema) -> Self {
        RawSchema {
            columns: s.columns,
            target_index: s.target_index,
        }
    }
}

impl Schema {
    pub fn new(columns: Vec<Column>, target_index: usize) -> Result<Self, StreamError> {
        let mut seen = HashSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(StreamError::InvalidSchema("empty column name".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(StreamError::InvalidSchema(format!(
                    "duplicate column name `{}`",
                    c.name
                )));
            }
        }
        let target = columns.get(target_index).ok_or_else(|| {
            StreamError::InvalidSchema(format!("target index {target_index} out of range"))
        })?;
        if target.kind != ColumnKind::Numeric {
            return Err(StreamError::InvalidSchema(format!(
                "target column `{}` must be numeric",
                target.name
            )));
        }
        Ok(Self {
            columns,
            target_index,
        })
    }

    /// Schema of `n` numeric features `x0..x{n-1}` followed by target `y`.
    pub fn numeric(num_features: usize) -> Self {
        let mut columns: Vec<Column> = (0..num_features)
            .map(|i| Column::numeric(format!("x{i}")))
            .collect();
        columns.push(Column::numeric("y"));
        Self {
            columns,
            target_index: num_features,
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn target_name(&self) -> &str {
        &self.columns[self.target_index].name
    }

    pub fn num_features(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn feature_column_index(&self, feature: usize) -> usize {
        if feature < self.target_index {
            feature
        } else {
            feature + 1
        }
    }

    pub fn feature(&self, feature: usize) -> &Column {
        &self.columns[self.feature_column_index(feature)]
    }

    pub fn features(&self) -> impl Iterator<Item = &Column> + '_ {
        self.columns
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.target_index)
            .map(|(_, c)| c)
    }

    pub fn feature_kinds(&self) -> Vec<ColumnKind> {
        self.features().map(|c| c.kind).collect()
    }

    /// Feature position of the column called `name`, if it is a feature.
    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features().position(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Schema with feature `feature` removed.
    pub fn without_feature(&self, feature: usize) -> Schema {
        let col = self.feature_column_index(feature);
        let mut columns = self.columns.clone();
        columns.remove(col);
        let target_index = if col < self.target_index {
            self.target_index - 1
        } else {
            self.target_index
        };
        Schema {
            columns,
            target_index,
        }
    }

    pub(crate) fn column_mut(&mut self, index: usize) -> &mut Column {
        &mut self.columns[index]
    }
}

/// One labeled observation. Categorical features hold their interned code.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<f64>,
    pub target: f64,
}

impl Instance {
    pub fn new(features: Vec<f64>, target: f64) -> Self {
        Self { features, target }
    }

    pub fn without_feature(mut self, feature: usize) -> Self {
        self.features.remove(feature);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_and_empty_names() {
        let dup = vec![Column::numeric("a"), Column::numeric("a")];
        assert!(Schema::new(dup, 1).is_err());
        let empty = vec![Column::numeric(""), Column::numeric("y")];
        assert!(Schema::new(empty, 1).is_err());
    }

    #[test]
    fn categorical_target_rejected() {
        let cols = vec![Column::numeric("a"), Column::categorical("y", vec![])];
        assert!(Schema::new(cols, 1).is_err());
    }

    #[test]
    fn feature_indexing_skips_target() {
        let cols = vec![
            Column::numeric("a"),
            Column::numeric("y"),
            Column::categorical("c", vec!["u".into()]),
        ];
        let s = Schema::new(cols, 1).unwrap();
        assert_eq!(s.num_features(), 2);
        assert_eq!(s.feature(1).name, "c");
        assert_eq!(s.feature_index("c"), Some(1));
        assert_eq!(s.feature_index("y"), None);

        let dropped = s.without_feature(0);
        assert_eq!(dropped.target_index(), 0);
        assert_eq!(dropped.target_name(), "y");
        assert_eq!(dropped.num_features(), 1);
    }

    #[test]
    fn serde_validates() {
        let json = r#"{"columns":[{"name":"a","kind":"numeric"}],"target_index":3}"#;
        assert!(serde_json::from_str::<Schema>(json).is_err());
        let s = Schema::numeric(2);
        let back: Schema = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
