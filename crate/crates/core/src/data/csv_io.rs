use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Dataset, Tag};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Which CSV column carries the class label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    #[default]
    Last,
    Name(String),
    Index(usize),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// All-digit strings are column indices; anything else is a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Reads a headed, comma-separated file. Every non-label cell must parse as a
/// finite real; label values become tags in first-seen order.
///
/// Parse errors name the 1-based data row (the header is not counted).
pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(Error::Empty(format!("{} has no header row", path.display())));
    }
    let label_idx = match label_column {
        LabelColumn::Last => headers.len() - 1,
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => {
            return Err(Error::invalid(format!(
                "label column index {i} out of range ({} columns)",
                headers.len()
            )))
        }
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::invalid(format!("no column named '{name}'")))?,
    };
    if headers.len() < 2 {
        return Err(Error::invalid("need at least one feature column besides the label"));
    }
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != label_idx)
        .map(|(_, h)| h.trim().to_string())
        .collect();

    let n = feature_names.len();
    let mut samples = Matrix::with_cols(n);
    let mut labels: Vec<String> = Vec::new();
    let mut row = Vec::with_capacity(n);
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        row.clear();
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                labels.push(cell.trim().to_string());
                continue;
            }
            let value = cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                row: r + 1,
                column: headers[j].trim().to_string(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { row: r + 1, col: j });
            }
            row.push(value);
        }
        samples.push_row(&row)?;
    }
    if samples.rows() == 0 {
        return Err(Error::Empty(format!("{} has no data rows", path.display())));
    }
    Ok(Dataset::from_named_labels(samples, &labels)?
        .with_feature_names(feature_names)?
        .with_label_name(headers[label_idx].trim()))
}

/// Writes features then the label column. Values use Rust's shortest
/// round-trip formatting, so reloading reproduces them bit for bit.
pub fn write_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(d, file)
}

pub fn write_csv_to<W: Write>(d: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = d.feature_names().iter().map(String::as_str).collect();
    header.push(d.label_name());
    w.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(d.n_features() + 1);
    for (row, &tag) in d.samples().iter_rows().zip(d.labels()) {
        record.clear();
        record.extend(row.iter().map(|v| v.to_string()));
        record.push(d.class_name(tag as Tag).to_string());
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
