//! CSV ingestion and emission for labeled datasets and unlabeled pools.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use crate::dataset::{LabeledDataset, UnlabeledPool};
use crate::error::{Error, Result};
use crate::fmt::csv_field;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::file_io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_feature<T: Scalar>(cell: &str, path: &Path, line: u64, col: usize) -> Result<T> {
    cell.parse::<f64>().map(T::from_f64_lossy).map_err(|_| {
        Error::ParseError(format!(
            "{}:{line}: column {col}: bad number {cell:?}",
            path.display()
        ))
    })
}

/// Loads a labeled dataset from CSV with header `id,label,f0,...`.
///
/// Class names are the sorted, deduplicated label strings; labels are mapped
/// to indices in that order. Row ids are kept alongside as sample ids.
pub fn load_labeled_csv<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<(LabeledDataset<T>, Vec<String>)> {
    let path = path.as_ref();
    let mut reader = open_reader(path)?;
    let header = reader
        .headers()
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?
        .clone();
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(Error::ParseError(format!(
            "{}: expected header id,label,f0,... got {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    }
    let dim = header.len() - 2;

    let mut ids = Vec::new();
    let mut raw_labels = Vec::new();
    let mut rows: Vec<Vec<T>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != dim + 2 {
            return Err(Error::ParseError(format!(
                "{}:{line}: expected {} fields, got {}",
                path.display(),
                dim + 2,
                record.len()
            )));
        }
        ids.push(record[0].to_string());
        raw_labels.push(record[1].to_string());
        let row = (0..dim)
            .map(|j| parse_feature(&record[j + 2], path, line, j + 2))
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let class_names: Vec<String> = raw_labels
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if class_names.len() < 2 {
        return Err(Error::InvalidSpec(format!(
            "{}: need at least 2 distinct labels, found {}",
            path.display(),
            class_names.len()
        )));
    }
    let labels = raw_labels
        .iter()
        .map(|name| {
            class_names
                .binary_search(name)
                .expect("label came from the same set")
        })
        .collect();
    let ds = LabeledDataset::new(Matrix::from_rows(&rows)?, labels, class_names)?;
    Ok((ds, ids))
}

/// Loads an unlabeled pool from CSV with header `id,f0,...`.
pub fn load_pool_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<UnlabeledPool<T>> {
    let path = path.as_ref();
    let mut reader = open_reader(path)?;
    let header = reader
        .headers()
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?
        .clone();
    if header.len() < 2 || &header[0] != "id" {
        return Err(Error::ParseError(format!(
            "{}: expected header id,f0,... got {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    }
    let dim = header.len() - 1;

    let mut ids = Vec::new();
    let mut rows: Vec<Vec<T>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != dim + 1 {
            return Err(Error::ParseError(format!(
                "{}:{line}: expected {} fields, got {}",
                path.display(),
                dim + 1,
                record.len()
            )));
        }
        let id = record[0].parse::<u64>().map_err(|_| {
            Error::ParseError(format!(
                "{}:{line}: pool ids are non-negative integers, got {:?}",
                path.display(),
                &record[0]
            ))
        })?;
        ids.push(id);
        let row = (0..dim)
            .map(|j| parse_feature(&record[j + 1], path, line, j + 1))
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    let features = if rows.is_empty() {
        Matrix::zeros(0, dim)
    } else {
        Matrix::from_rows(&rows)?
    };
    UnlabeledPool::new(features, ids)
}

/// Writes a labeled dataset back out in the `id,label,f0,...` layout, with
/// floats rendered via the shared eight-significant-digit form.
pub fn write_labeled_csv<T: Scalar>(
    ds: &LabeledDataset<T>,
    ids: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    if ids.len() != ds.len() {
        return Err(Error::ShapeError(format!(
            "{} ids for {} rows",
            ids.len(),
            ds.len()
        )));
    }
    let mut out = String::new();
    out.push_str("id,label");
    for j in 0..ds.dim() {
        out.push_str(&format!(",f{j}"));
    }
    out.push('\n');
    for (i, id) in ids.iter().enumerate() {
        out.push_str(&csv_field(id));
        out.push(',');
        out.push_str(&csv_field(&ds.class_names()[ds.labels()[i]]));
        for v in ds.row(i) {
            out.push(',');
            out.push_str(&crate::fmt::g8(v.as_f64()));
        }
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::file_io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::file_io(path, e))
}
