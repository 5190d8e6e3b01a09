//! CSV ingestion.

use std::fs::File;
use std::path::{Path, PathBuf};

use oblknn_core::{Dataset, LabelVector, Matrix};
use serde::Deserialize;

use crate::error::{HarnessError, Result};

/// Where the class label lives.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    /// Header name; needs `has_header`.
    Name(String),
    /// Zero-based column index.
    Index(usize),
}

impl<'de> Deserialize<'de> for LabelColumn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Name(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Index(i) => LabelColumn::Index(i),
            Raw::Name(s) => s.parse().unwrap_or(LabelColumn::Last),
        })
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// `last`, a column index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_owned())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub id: String,
    pub path: PathBuf,
    #[serde(default, rename = "label")]
    pub label_column: LabelColumn,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default = "default_true", rename = "header")]
    pub has_header: bool,
    #[serde(default)]
    pub n_select: Option<usize>,
}

fn default_delimiter() -> char {
    ','
}

fn default_true() -> bool {
    true
}

impl DatasetSpec {
    pub fn new(id: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        Self {
            id: id.into(),
            path: path.into(),
            label_column: LabelColumn::Last,
            delimiter: ',',
            has_header: true,
            n_select: None,
        }
    }
}

pub const MISSING_TOKENS: [&str; 4] = ["", "na", "?", "nan"];

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    MISSING_TOKENS.iter().any(|m| t.eq_ignore_ascii_case(m))
}

/// A parsed file: the dataset plus the feature column names.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub feature_names: Vec<String>,
}

/// Reads a delimited file. Missing tokens (`""`, `NA`, `?`, `NaN`, any case)
/// become `NaN` for the imputer to resolve later. Labels are re-encoded to
/// dense ids.
pub fn load_csv(spec: &DatasetSpec) -> Result<LoadedDataset> {
    if !spec.path.is_file() {
        return Err(HarnessError::FileNotFound(spec.path.clone()));
    }
    let delimiter = u8::try_from(spec.delimiter)
        .map_err(|_| HarnessError::Config(format!("delimiter `{}` is not a single byte", spec.delimiter)))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(File::open(&spec.path)?);

    let mut records = reader.records();
    let header: Option<Vec<String>> = if spec.has_header {
        match records.next() {
            Some(r) => Some(r?.iter().map(|s| s.trim().to_owned()).collect()),
            None => return Err(HarnessError::EmptyDataset),
        }
    } else {
        None
    };

    let mut width = header.as_ref().map(Vec::len);
    let mut label_at = None;
    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(HarnessError::RaggedRows {
                line,
                expected: w,
                found: record.len(),
            });
        }
        let label = match label_at {
            Some(l) => l,
            None => *label_at.insert(resolve_label(&spec.label_column, header.as_deref(), w)?),
        };
        for (col, cell) in record.iter().enumerate() {
            if col == label {
                raw_labels.push(cell.trim().to_owned());
            } else if is_missing(cell) {
                values.push(f64::NAN);
            } else {
                values.push(cell.trim().parse::<f64>().map_err(|_| HarnessError::UnparseableCell {
                    line,
                    col: col + 1,
                    text: cell.to_owned(),
                })?);
            }
        }
    }
    if raw_labels.is_empty() {
        return Err(HarnessError::EmptyDataset);
    }
    let width = width.unwrap_or(0);
    let label = label_at.unwrap_or(width.saturating_sub(1));
    let feature_names = match &header {
        Some(h) => h.iter().enumerate().filter(|(i, _)| *i != label).map(|(_, n)| n.clone()).collect(),
        None => (0..width - 1).map(|i| format!("f{i}")).collect(),
    };
    let features = Matrix::new(raw_labels.len(), width - 1, values)?;
    Ok(LoadedDataset {
        dataset: Dataset::new(features, LabelVector::encode(&raw_labels))?,
        feature_names,
    })
}

fn resolve_label(col: &LabelColumn, header: Option<&[String]>, width: usize) -> Result<usize> {
    if width < 2 {
        return Err(HarnessError::LabelColumn("need a label and at least one feature".into()));
    }
    match col {
        LabelColumn::Last => Ok(width - 1),
        LabelColumn::Index(i) if *i < width => Ok(*i),
        LabelColumn::Index(i) => Err(HarnessError::LabelColumn(format!("index {i} out of {width} columns"))),
        LabelColumn::Name(name) => header
            .ok_or_else(|| HarnessError::LabelColumn(format!("`{name}` needs a header row")))?
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::LabelColumn(format!("no column named `{name}`"))),
    }
}

/// Resolves `path` against the directory of `base` unless it is absolute.
pub(crate) fn relative_to(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_owned()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(path)
    }
}
