//! Count tables as CSV: header `i,j,count`, one row per fiducial pair, and
//! one row with empty `i` and `j` for the no-occurrence cell.

use std::path::Path;

use opcstar_core::calibration::Counts;
use opcstar_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    i: Option<usize>,
    j: Option<usize>,
    count: u64,
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

pub fn write_counts(path: &Path, counts: &Counts) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for (i, row) in counts.table.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            w.serialize(Row {
                i: Some(i),
                j: Some(j),
                count,
            })
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.serialize(Row {
        i: None,
        j: None,
        count: counts.no_occurrence,
    })
    .map_err(|e| csv_error(path, e))?;
    w.flush()?;
    Ok(())
}

pub fn read_counts(path: &Path) -> Result<Counts, Error> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut cells = Vec::new();
    let mut no_occurrence = 0;
    for row in r.deserialize::<Row>() {
        match row.map_err(|e| csv_error(path, e))? {
            Row {
                i: Some(i),
                j: Some(j),
                count,
            } => cells.push((i, j, count)),
            Row {
                i: None,
                j: None,
                count,
            } => no_occurrence += count,
            _ => {
                return Err(Error::Input(format!(
                    "{}: i and j must both be set or both empty",
                    path.display()
                )))
            }
        }
    }
    let rows = cells.iter().map(|c| c.0 + 1).max().unwrap_or(0);
    let cols = cells.iter().map(|c| c.1 + 1).max().unwrap_or(0);
    let mut table = vec![vec![0u64; cols]; rows];
    for (i, j, count) in cells {
        table[i][j] += count;
    }
    Ok(Counts {
        table,
        no_occurrence,
    })
}
