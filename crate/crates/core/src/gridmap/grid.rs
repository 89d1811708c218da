use std::fmt;

use serde::{Deserialize, Serialize};

use super::GridError;

/// Row/column address of a cell, 0-based, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellCoord {
    pub i: usize,
    pub j: usize,
}

impl CellCoord {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// Applies a signed offset, returning `None` when it would go negative.
    pub fn offset(self, di: isize, dj: isize) -> Option<Self> {
        Some(Self {
            i: self.i.checked_add_signed(di)?,
            j: self.j.checked_add_signed(dj)?,
        })
    }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

impl From<(usize, usize)> for CellCoord {
    fn from((i, j): (usize, usize)) -> Self {
        Self { i, j }
    }
}

/// Dense walkable/blocked matrix for one floor. `true` means free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccupancyGrid {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new_free(rows: usize, cols: usize) -> Result<Self, GridError> {
        Self::filled(rows, cols, true)
    }

    pub fn filled(rows: usize, cols: usize, free: bool) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::EmptyGrid { rows, cols });
        }
        Ok(Self {
            rows,
            cols,
            cells: vec![free; rows * cols],
        })
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::EmptyGrid { rows, cols });
        }
        if cells.len() != rows * cols {
            return Err(GridError::ShapeMismatch {
                rows,
                cols,
                len: cells.len(),
            });
        }
        Ok(Self { rows, cols, cells })
    }

    /// Parses rows of `'0'`/`'1'` characters (`1` = free), the bundle encoding.
    pub fn from_row_strings<S: AsRef<str>>(lines: &[S]) -> Result<Self, GridError> {
        let rows = lines.len();
        let cols = lines.first().map(|l| l.as_ref().len()).unwrap_or(0);
        let mut cells = Vec::with_capacity(rows * cols);
        for (i, line) in lines.iter().enumerate() {
            let line = line.as_ref();
            if line.len() != cols {
                return Err(GridError::RaggedRow {
                    row: i,
                    expected: cols,
                    found: line.len(),
                });
            }
            for (j, ch) in line.chars().enumerate() {
                cells.push(match ch {
                    '1' => true,
                    '0' => false,
                    other => {
                        return Err(GridError::BadCellChar {
                            row: i,
                            col: j,
                            ch: other,
                        })
                    }
                });
            }
        }
        Self::from_cells(rows, cols, cells)
    }

    pub fn to_row_strings(&self) -> Vec<String> {
        self.cells
            .chunks(self.cols)
            .map(|row| row.iter().map(|&f| if f { '1' } else { '0' }).collect())
            .collect()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn in_bounds(&self, c: CellCoord) -> bool {
        c.i < self.rows && c.j < self.cols
    }

    #[inline]
    pub fn index_of(&self, c: CellCoord) -> usize {
        c.i * self.cols + c.j
    }

    #[inline]
    pub fn coord_of(&self, index: usize) -> CellCoord {
        CellCoord {
            i: index / self.cols,
            j: index % self.cols,
        }
    }

    /// `None` when out of bounds.
    #[inline]
    pub fn get(&self, c: CellCoord) -> Option<bool> {
        self.in_bounds(c).then(|| self.cells[self.index_of(c)])
    }

    /// Out-of-bounds cells count as blocked.
    #[inline]
    pub fn is_free(&self, c: CellCoord) -> bool {
        self.get(c).unwrap_or(false)
    }

    /// Signed variant of [`is_free`](Self::is_free) for neighbor probing.
    #[inline]
    pub fn is_free_at(&self, i: isize, j: isize) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.rows
            && (j as usize) < self.cols
            && self.cells[i as usize * self.cols + j as usize]
    }

    pub fn set(&mut self, c: CellCoord, free: bool) -> Result<(), GridError> {
        if !self.in_bounds(c) {
            return Err(GridError::OutOfBounds {
                cell: c,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let idx = self.index_of(c);
        self.cells[idx] = free;
        Ok(())
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|&&f| f).count()
    }

    pub fn blocked_fraction(&self) -> f64 {
        1.0 - self.free_count() as f64 / self.cells.len() as f64
    }

    pub fn free_cells(&self) -> impl Iterator<Item = CellCoord> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(idx, _)| self.coord_of(idx))
    }
}

impl fmt::Display for OccupancyGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_row_strings() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}
