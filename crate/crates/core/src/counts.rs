//! Detection count tables and their CSV form.
//!
//! Cells are addressed by Alice's inputs `(i, j)`, Bob's input `y` and the
//! detector `outcome`. Indices are 0-based in memory and 1-based on disk.
//! The CSV header is `i,j,y,outcome,count`, one row per cell.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::photonics::InterferometerConfig;

#[derive(Debug, Error)]
pub enum CountsError {
    #[error("row {row}: index out of range ({field} = {value})")]
    IndexOutOfRange {
        row: usize,
        field: &'static str,
        value: usize,
    },

    #[error("row {row}: duplicate cell (i={i}, j={j}, y={y}, outcome={outcome})")]
    DuplicateCell {
        row: usize,
        i: usize,
        j: usize,
        y: usize,
        outcome: usize,
    },

    #[error("table is empty")]
    Empty,

    #[error("tables have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Provenance of a simulated table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsMeta {
    pub seed: u64,
    pub config: Option<InterferometerConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct CsvRow {
    i: usize,
    j: usize,
    y: usize,
    outcome: usize,
    count: u64,
}

/// Detection counts over the `d × d × 2 × d` grid of (i, j, y, outcome).
#[derive(Debug, Clone, PartialEq)]
pub struct CountsTable {
    dim: usize,
    cells: Vec<u64>,
    pub meta: Option<CountsMeta>,
}

impl CountsTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            cells: vec![0; 2 * dim * dim * dim],
            meta: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, i: usize, j: usize, y: usize, outcome: usize) -> usize {
        debug_assert!(i < self.dim && j < self.dim && y < 2 && outcome < self.dim);
        ((i * self.dim + j) * 2 + y) * self.dim + outcome
    }

    pub fn get(&self, i: usize, j: usize, y: usize, outcome: usize) -> u64 {
        self.cells[self.index(i, j, y, outcome)]
    }

    pub fn set(&mut self, i: usize, j: usize, y: usize, outcome: usize, count: u64) {
        let k = self.index(i, j, y, outcome);
        self.cells[k] = count;
    }

    pub fn add(&mut self, i: usize, j: usize, y: usize, outcome: usize, count: u64) {
        let k = self.index(i, j, y, outcome);
        self.cells[k] += count;
    }

    /// Counts for setting (i, j, y), one entry per outcome.
    pub fn setting(&self, i: usize, j: usize, y: usize) -> &[u64] {
        let start = self.index(i, j, y, 0);
        &self.cells[start..start + self.dim]
    }

    pub fn setting_total(&self, i: usize, j: usize, y: usize) -> u64 {
        self.setting(i, j, y).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    /// Cell-wise sum.
    pub fn merge(&mut self, other: &CountsTable) -> Result<(), CountsError> {
        if other.dim != self.dim {
            return Err(CountsError::DimensionMismatch(self.dim, other.dim));
        }
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += b;
        }
        Ok(())
    }

    /// Writes every cell, zeros included, in (i, j, y, outcome) order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), CountsError> {
        let mut w = csv::Writer::from_writer(writer);
        for i in 0..self.dim {
            for j in 0..self.dim {
                for y in 0..2 {
                    for outcome in 0..self.dim {
                        w.serialize(CsvRow {
                            i: i + 1,
                            j: j + 1,
                            y: y + 1,
                            outcome: outcome + 1,
                            count: self.get(i, j, y, outcome),
                        })?;
                    }
                }
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }

    /// Parses a table. The dimension is the largest `i`, `j` or `outcome`
    /// index present; absent cells count as zero, duplicated cells are rejected.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, CountsError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let rows = rdr.deserialize::<CsvRow>().collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Err(CountsError::Empty);
        }
        let dim = rows
            .iter()
            .map(|r| r.i.max(r.j).max(r.outcome))
            .max()
            .unwrap_or(0);
        let mut table = Self::new(dim);
        let mut seen = vec![false; table.cells.len()];
        for (n, r) in rows.iter().enumerate() {
            let row = n + 1;
            for (field, value, limit) in [
                ("i", r.i, dim),
                ("j", r.j, dim),
                ("y", r.y, 2),
                ("outcome", r.outcome, dim),
            ] {
                if value == 0 || value > limit {
                    return Err(CountsError::IndexOutOfRange { row, field, value });
                }
            }
            let k = table.index(r.i - 1, r.j - 1, r.y - 1, r.outcome - 1);
            if seen[k] {
                return Err(CountsError::DuplicateCell {
                    row,
                    i: r.i,
                    j: r.j,
                    y: r.y,
                    outcome: r.outcome,
                });
            }
            seen[k] = true;
            table.cells[k] = r.count;
        }
        Ok(table)
    }

    pub fn from_csv_str(s: &str) -> Result<Self, CountsError> {
        Self::read_csv(s.as_bytes())
    }
}
