//! Rectangular words: matrices of symbols used as received words and
//! codewords of product constructions.
//!
//! A grid is stored row-major. Interleaved codes read it as one word per
//! column and measure distance row by row (a row is one symbol of the
//! larger alphabet); tensor codes measure distance cell by cell.

use std::sync::Arc;

use crate::code::{Distance, Symbol, Word};
use crate::field::Field;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Grid {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    cells: Vec<Symbol>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.rows == other.rows
            && self.cols == other.cols
            && self.cells == other.cells
    }
}
impl Eq for Grid {}

impl Grid {
    pub fn zero(field: Arc<Field>, rows: usize, cols: usize) -> Grid {
        Grid { field, rows, cols, cells: vec![Some(0); rows * cols] }
    }

    pub fn from_cells(field: Arc<Field>, rows: usize, cols: usize, cells: Vec<Symbol>) -> Result<Grid> {
        if cells.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, got: cells.len() });
        }
        for s in cells.iter().flatten() {
            field.validate_element(u64::from(*s))?;
        }
        Ok(Grid { field, rows, cols, cells })
    }

    /// Builds a grid whose columns are the given words (all the same length).
    pub fn from_columns(cols: &[Word]) -> Result<Grid> {
        let first = cols.first().ok_or_else(|| {
            Error::InvalidArgument("grid needs at least one column".into())
        })?;
        let rows = first.len();
        let field = first.field().clone();
        for c in cols {
            if *c.field() != field {
                return Err(Error::FieldMismatch);
            }
            if c.len() != rows {
                return Err(Error::LengthMismatch { expected: rows, got: c.len() });
            }
        }
        let mut cells = vec![None; rows * cols.len()];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                cells[i * cols.len() + j] = c.get(i);
            }
        }
        Ok(Grid { field, rows, cols: cols.len(), cells })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, s: Symbol) {
        self.cells[r * self.cols + c] = s;
    }

    pub fn row_word(&self, r: usize) -> Word {
        let symbols = self.cells[r * self.cols..(r + 1) * self.cols].to_vec();
        Word::new(self.field.clone(), symbols).expect("cells already validated")
    }

    pub fn col_word(&self, c: usize) -> Word {
        let symbols = (0..self.rows).map(|r| self.get(r, c)).collect();
        Word::new(self.field.clone(), symbols).expect("cells already validated")
    }

    pub fn set_row(&mut self, r: usize, w: &Word) -> Result<()> {
        if w.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, got: w.len() });
        }
        for c in 0..self.cols {
            self.set(r, c, w.get(c));
        }
        Ok(())
    }

    pub fn set_col(&mut self, c: usize, w: &Word) -> Result<()> {
        if w.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, got: w.len() });
        }
        for r in 0..self.rows {
            self.set(r, c, w.get(r));
        }
        Ok(())
    }

    pub fn erase_row(&mut self, r: usize) {
        for c in 0..self.cols {
            self.set(r, c, None);
        }
    }

    pub fn row_has_erasure(&self, r: usize) -> bool {
        (0..self.cols).any(|c| self.get(r, c).is_none())
    }

    pub fn has_erasure(&self) -> bool {
        self.cells.iter().any(|s| s.is_none())
    }

    /// Number of rows that are unerased and not all zero.
    pub fn nonzero_row_count(&self) -> usize {
        (0..self.rows)
            .filter(|&r| {
                !self.row_has_erasure(r)
                    && (0..self.cols).any(|c| self.get(r, c) != Some(0))
            })
            .count()
    }

    /// Number of unerased nonzero cells.
    pub fn nonzero_cell_count(&self) -> usize {
        self.cells.iter().filter(|s| matches!(s, Some(v) if *v != 0)).count()
    }

    /// Matrix rank over GF(q); the grid must be erasure-free.
    pub fn rank(&self) -> Result<usize> {
        let mut mat = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            mat.push(self.row_word(r).elems()?);
        }
        Ok(crate::linalg::rank(&self.field, &mat))
    }
}

fn check_shapes(a: &Grid, b: &Grid) -> Result<()> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::LengthMismatch { expected: a.rows * a.cols, got: b.rows * b.cols });
    }
    Ok(())
}

/// Distance in the row-symbol metric: each row is one symbol. A row pair
/// counts as an erasure if either side has an erased cell, and as an error
/// if both are fully known and differ anywhere.
pub fn row_distance(a: &Grid, b: &Grid) -> Result<Distance> {
    check_shapes(a, b)?;
    let mut errors = 0;
    let mut erasures = 0;
    for r in 0..a.rows {
        if a.row_has_erasure(r) || b.row_has_erasure(r) {
            erasures += 1;
        } else if (0..a.cols).any(|c| a.get(r, c) != b.get(r, c)) {
            errors += 1;
        }
    }
    Ok(Distance { errors, erasures })
}

/// Distance in the cell metric, with the usual erasure convention.
pub fn cell_distance(a: &Grid, b: &Grid) -> Result<Distance> {
    check_shapes(a, b)?;
    let mut errors = 0;
    let mut erasures = 0;
    for (x, y) in a.cells.iter().zip(&b.cells) {
        match (x, y) {
            (Some(u), Some(v)) => {
                if u != v {
                    errors += 1;
                }
            }
            _ => erasures += 1,
        }
    }
    Ok(Distance { errors, erasures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> Arc<Field> {
        Arc::new(Field::new(2).unwrap())
    }

    #[test]
    fn row_and_cell_metrics_differ() {
        let f = gf2();
        let a = Grid::from_cells(f.clone(), 2, 2, vec![Some(0), Some(0), Some(1), Some(1)]).unwrap();
        let b = Grid::from_cells(f, 2, 2, vec![Some(1), Some(1), Some(1), Some(1)]).unwrap();
        assert_eq!(row_distance(&a, &b).unwrap(), Distance { errors: 1, erasures: 0 });
        assert_eq!(cell_distance(&a, &b).unwrap(), Distance { errors: 2, erasures: 0 });
    }

    #[test]
    fn erased_rows_are_row_erasures() {
        let f = gf2();
        let mut a = Grid::zero(f.clone(), 3, 2);
        a.erase_row(1);
        let b = Grid::zero(f, 3, 2);
        assert_eq!(row_distance(&a, &b).unwrap(), Distance { errors: 0, erasures: 1 });
        assert_eq!(cell_distance(&a, &b).unwrap(), Distance { errors: 0, erasures: 2 });
    }

    #[test]
    fn columns_round_trip() {
        let f = gf2();
        let w1 = Word::from_elems(f.clone(), &[1, 0, 1]).unwrap();
        let w2 = Word::from_elems(f, &[0, 1, 1]).unwrap();
        let g = Grid::from_columns(&[w1.clone(), w2.clone()]).unwrap();
        assert_eq!(g.rows(), 3);
        assert_eq!(g.cols(), 2);
        assert_eq!(g.col_word(0), w1);
        assert_eq!(g.col_word(1), w2);
        assert_eq!(g.row_word(0).elems().unwrap(), vec![1, 0]);
        assert_eq!(g.rank().unwrap(), 2);
    }
}
