//! Loading and splitting delimiter-separated numeric datasets.
//!
//! Rows are observations, the last column is the regression target. The
//! delimiter is detected per line (comma if present, otherwise any run of
//! whitespace), which covers both CSV exports and the whitespace tables of
//! the Delve/Torgo regression collections.

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub targets: Array1<f64>,
}

fn split_line(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Parse a dataset from text. A missing or non-numeric cell is a data error
/// naming the 1-based row and column; a non-numeric first row is expected
/// when `skip_header` is set.
pub fn parse_dataset(text: &str, skip_header: bool) -> Result<Dataset> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if skip_header && rows.is_empty() && lineno == 0 {
            continue;
        }
        let cells = split_line(line);
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::data(format!(
                    "row {} has {} cells, expected {w}",
                    lineno + 1,
                    cells.len()
                )));
            }
            _ => {}
        }
        let mut parsed = Vec::with_capacity(cells.len());
        for (col, cell) in cells.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                Error::data(format!(
                    "cell at row {}, column {} is not numeric: `{cell}` (use skip_header=true for a header row)",
                    lineno + 1,
                    col + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::data(format!(
                    "cell at row {}, column {} is not finite",
                    lineno + 1,
                    col + 1
                )));
            }
            parsed.push(value);
        }
        rows.push(parsed);
    }
    let width = width.ok_or_else(|| Error::data("dataset has no rows"))?;
    if width < 2 {
        return Err(Error::data("dataset needs at least one feature column and a target column"));
    }
    let n = rows.len();
    let mut features = Array2::zeros((n, width - 1));
    let mut targets = Array1::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..width - 1 {
            features[(i, j)] = row[j];
        }
        targets[i] = row[width - 1];
    }
    Ok(Dataset { features, targets })
}

pub fn load_dataset(path: &std::path::Path, skip_header: bool) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::data(format!("cannot read dataset {}: {e}", path.display())))?;
    parse_dataset(&text, skip_header)
}

/// Disjoint train/test index sets from a seeded shuffle of `0..rows`; the
/// first `train_size` shuffled indices form the training split.
pub fn split_indices(rows: usize, train_size: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if train_size == 0 || train_size >= rows {
        return Err(Error::domain(format!(
            "train size must be in 1..{rows}, got {train_size} (need at least one test row)"
        )));
    }
    let mut order: Vec<usize> = (0..rows).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let test = order.split_off(train_size);
    Ok((order, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_whitespace_and_comma_layouts() {
        let ws = parse_dataset("1 2 3\n4 5 6\n", false).unwrap();
        assert_eq!(ws.features.dim(), (2, 2));
        assert_eq!(ws.targets.to_vec(), vec![3.0, 6.0]);
        let csv = parse_dataset("1,2,3\n4,5,6\n", false).unwrap();
        assert_eq!(csv.features, ws.features);
    }

    #[test]
    fn header_and_error_reporting() {
        let with_header = parse_dataset("a,b,y\n1,2,3\n", true).unwrap();
        assert_eq!(with_header.targets.to_vec(), vec![3.0]);
        let err = parse_dataset("a,b,y\n1,2,3\n", false).unwrap_err();
        assert!(err.to_string().contains("row 1, column 1"), "{err}");
        let err = parse_dataset("1,2,3\n1,oops,3\n", false).unwrap_err();
        assert!(err.to_string().contains("row 2, column 2"), "{err}");
        let err = parse_dataset("1,2,3\n1,2\n", false).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        assert!(parse_dataset("", false).is_err());
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let (train_a, test_a) = split_indices(20, 12, 7).unwrap();
        let (train_b, test_b) = split_indices(20, 12, 7).unwrap();
        assert_eq!(train_a, train_b);
        assert_eq!(test_a, test_b);
        assert_eq!(train_a.len(), 12);
        assert_eq!(test_a.len(), 8);
        let mut all: Vec<usize> = train_a.iter().chain(&test_a).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..20).collect::<Vec<_>>());
        assert!(split_indices(20, 20, 7).is_err());
        assert!(split_indices(20, 0, 7).is_err());
    }
}
