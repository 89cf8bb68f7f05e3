//! Code families and product constructions.
//!
//! Conventions fixed here and relied on elsewhere:
//!
//! * `hadamard(q, k)`: positions are the q^k points of F_q^k in base-q
//!   integer order with coordinate 1 as the most significant digit;
//!   generator row i evaluates the i-th coordinate functional.
//! * `tensor(c_col, c_row)`: codewords are matrices with `c_col.n()` rows
//!   and `c_row.n()` columns, every matrix row a `c_row` codeword and every
//!   matrix column a `c_col` codeword; words are the row-major flattening;
//!   the generator is the Kronecker product of the two generators.
//! * `InterleavedCode`: m codewords of a base code written as the columns
//!   of an n x m grid; distance is measured row by row (each row is one
//!   symbol of the alphabet of size q^m).

use std::sync::Arc;

use crate::code::{Decoded, LinearCode, Word};
use crate::field::Field;
use crate::grid::{row_distance, Grid};
use crate::{enum_cap, Error, Result};

/// The q-ary Hadamard code of dimension k: all linear functionals on
/// F_q^k evaluated at every point.
pub fn hadamard(q: u64, k: usize) -> Result<LinearCode> {
    if k == 0 {
        return Err(Error::TrivialCode("hadamard dimension must be positive".into()));
    }
    let field = Arc::new(Field::new(q)?);
    let n128 = (q as u128).pow(k as u32);
    if n128 > u128::from(enum_cap()) {
        return Err(Error::EnumerationTooLarge { size: n128, cap: enum_cap() });
    }
    let n = n128 as usize;
    let qq = q as usize;
    let mut gen = vec![vec![0u16; n]; k];
    for (i, row) in gen.iter_mut().enumerate() {
        // Digit i of the position index, most significant digit first.
        let div = qq.pow((k - 1 - i) as u32);
        for (t, cell) in row.iter_mut().enumerate() {
            *cell = ((t / div) % qq) as u16;
        }
    }
    LinearCode::new(field, gen, format!("hadamard(q={q},k={k})"))
}

/// Reed-Solomon code: polynomials of degree at most `degree_bound`
/// evaluated at the given distinct points.
pub fn reed_solomon(q: u64, eval_points: &[u16], degree_bound: usize) -> Result<LinearCode> {
    let field = Arc::new(Field::new(q)?);
    let n = eval_points.len();
    if n == 0 {
        return Err(Error::TrivialCode("no evaluation points".into()));
    }
    for (i, &x) in eval_points.iter().enumerate() {
        field.validate_element(u64::from(x))?;
        if eval_points[..i].contains(&x) {
            return Err(Error::DuplicateEvalPoint(x));
        }
    }
    if degree_bound + 1 > n {
        return Err(Error::DegreeTooLarge { degree: degree_bound, n });
    }
    let mut gen = vec![vec![0u16; n]; degree_bound + 1];
    for (j, &x) in eval_points.iter().enumerate() {
        let mut pw = 1u16;
        for row in gen.iter_mut() {
            row[j] = pw;
            pw = field.mul(pw, x);
        }
    }
    LinearCode::new(
        field,
        gen,
        format!("reed_solomon(q={q},n={n},deg<={degree_bound})"),
    )
}

/// Tensor product: matrices whose columns lie in `c_col` and rows in
/// `c_row`, flattened row-major into words of length
/// `c_col.n() * c_row.n()`.
pub fn tensor(c_col: &LinearCode, c_row: &LinearCode) -> Result<LinearCode> {
    if c_col.field() != c_row.field() {
        return Err(Error::FieldMismatch);
    }
    let (k2, n2) = (c_col.k(), c_col.n());
    let (k1, n1) = (c_row.k(), c_row.n());
    let g2 = c_col.generator();
    let g1 = c_row.generator();
    let f = c_col.field();
    let mut gen = vec![vec![0u16; n2 * n1]; k2 * k1];
    for i2 in 0..k2 {
        for i1 in 0..k1 {
            let row = &mut gen[i2 * k1 + i1];
            for j2 in 0..n2 {
                let a = g2[i2][j2];
                if a == 0 {
                    continue;
                }
                for j1 in 0..n1 {
                    row[j2 * n1 + j1] = f.mul(a, g1[i1][j1]);
                }
            }
        }
    }
    LinearCode::new(
        f.clone(),
        gen,
        format!("tensor({},{})", c_col.label(), c_row.label()),
    )
}

/// Reads a flat word as a rows x cols grid (row-major).
pub fn word_to_grid(w: &Word, rows: usize, cols: usize) -> Result<Grid> {
    if w.len() != rows * cols {
        return Err(Error::LengthMismatch { expected: rows * cols, got: w.len() });
    }
    Grid::from_cells(w.field().clone(), rows, cols, w.symbols().to_vec())
}

/// Flattens a grid row-major into a word.
pub fn grid_to_word(g: &Grid) -> Word {
    Word::new(g.field().clone(), g.cells().to_vec()).expect("grid cells are valid")
}

/// m codewords of a base code, written column by column.
#[derive(Debug, Clone)]
pub struct InterleavedCode {
    base: LinearCode,
    m: usize,
}

impl InterleavedCode {
    pub fn new(base: LinearCode, m: usize) -> Result<InterleavedCode> {
        if m == 0 {
            return Err(Error::InvalidArgument("interleaving width must be positive".into()));
        }
        Ok(InterleavedCode { base, m })
    }

    pub fn base(&self) -> &LinearCode {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Number of codeword grids, q^(k*m).
    pub fn grid_count(&self) -> u128 {
        self.base.codeword_count().saturating_pow(self.m as u32)
    }

    pub fn encode(&self, messages: &[Vec<u16>]) -> Result<Grid> {
        if messages.len() != self.m {
            return Err(Error::LengthMismatch { expected: self.m, got: messages.len() });
        }
        let cols: Vec<Word> = messages
            .iter()
            .map(|m| self.base.encode(m))
            .collect::<Result<_>>()?;
        Grid::from_columns(&cols)
    }

    /// Streams every codeword grid in message order (column 0 the most
    /// significant base-q^k digit of the index).
    pub fn for_each_grid(&self, visit: &mut dyn FnMut(u128, &Grid)) -> Result<()> {
        let count = self.grid_count();
        if count > u128::from(enum_cap()) {
            return Err(Error::EnumerationTooLarge { size: count, cap: enum_cap() });
        }
        let mut codewords: Vec<Word> = Vec::new();
        self.base
            .for_each_codeword(&mut |_, cw| {
                codewords.push(Word::from_elems(self.base.field().clone(), cw).unwrap())
            })?;
        let cw_count = codewords.len() as u128;
        let mut picks = vec![0usize; self.m];
        for idx in 0..count {
            let mut rest = idx;
            for j in (0..self.m).rev() {
                picks[j] = (rest % cw_count) as usize;
                rest /= cw_count;
            }
            let cols: Vec<Word> = picks.iter().map(|&p| codewords[p].clone()).collect();
            let grid = Grid::from_columns(&cols)?;
            visit(idx, &grid);
        }
        Ok(())
    }

    /// Exact ball in the row-symbol metric: every codeword grid within the
    /// given number of row errors (rows erased in `r` are skipped).
    pub fn list_decode_ball(&self, r: &Grid, radius_rows: usize) -> Result<Vec<Grid>> {
        if r.rows() != self.n() || r.cols() != self.m {
            return Err(Error::LengthMismatch {
                expected: self.n() * self.m,
                got: r.rows() * r.cols(),
            });
        }
        let mut out = Vec::new();
        self.for_each_grid(&mut |_, g| {
            let d = row_distance(g, r).expect("shapes match");
            if d.errors <= radius_rows {
                out.push(g.clone());
            }
        })?;
        Ok(out)
    }

    /// Per-column list decoding of one received column word.
    pub fn decode_column(&self, col: &Word, radius_errors: usize) -> Result<Vec<Decoded>> {
        self.base.list_decode_erasures(col, radius_errors)
    }
}

/// Tests whether a word of length q^(k*m), read as a function on
/// (F_q^k)^m, is linear in each size-k block separately (a homogeneous
/// linear functional of that block for every fixing of the others).
///
/// Index convention: block 1 is the most significant base-q^k digit of the
/// position, and within a block coordinate 1 is the most significant
/// base-q digit, matching [`hadamard`] and [`tensor`].
pub fn is_block_linear(w: &Word, q: u64, k: usize, m: usize) -> Result<bool> {
    let field = Arc::new(Field::new(q)?);
    if *w.field() != field {
        return Err(Error::FieldMismatch);
    }
    if k == 0 || m == 0 {
        return Err(Error::InvalidArgument("block sizes must be positive".into()));
    }
    let block = (q as u128).pow(k as u32);
    let total = block.saturating_pow(m as u32);
    if total > u128::from(enum_cap()) {
        return Err(Error::EnumerationTooLarge { size: total, cap: enum_cap() });
    }
    if w.len() as u128 != total {
        return Err(Error::LengthMismatch { expected: total as usize, got: w.len() });
    }
    let vals = w.elems()?;
    let block = block as usize;
    let qq = q as usize;

    // Strides: position = sum over blocks of value_b * block^(m-1-b).
    let stride = |b: usize| block.pow((m - 1 - b) as u32);

    for axis in 0..m {
        let s = stride(axis);
        let others = total as usize / block;
        // Enumerate all fixings of the other blocks by walking every
        // position whose axis digit is zero.
        for fix_idx in 0..others {
            // Reconstruct the base position with axis digit 0.
            let mut base = 0usize;
            let mut rest = fix_idx;
            for b in (0..m).rev() {
                if b == axis {
                    continue;
                }
                base += (rest % block) * stride(b);
                rest /= block;
            }
            // g(y) = vals[base + y*s]; linearity means g(y) equals the
            // linear extension of g on the unit vectors.
            let mut coeffs = vec![0u16; k];
            for (j, c) in coeffs.iter_mut().enumerate() {
                let unit = qq.pow((k - 1 - j) as u32);
                *c = vals[base + unit * s];
            }
            for y in 0..block {
                let mut expect = 0u16;
                let mut rest = y;
                for j in (0..k).rev() {
                    let digit = (rest % qq) as u16;
                    rest /= qq;
                    if digit != 0 {
                        expect = field.add(expect, field.mul(digit, coeffs[j]));
                    }
                }
                if vals[base + y * s] != expect {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_generator_convention() {
        let c = hadamard(2, 2).unwrap();
        assert_eq!(c.generator(), &[vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        // Message (1,0) evaluates x_1 over 00,01,10,11.
        assert_eq!(c.encode_elems(&[1, 0]).unwrap(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn hadamard_distance_is_q_to_k_minus_1_times_q_minus_1() {
        assert_eq!(hadamard(2, 3).unwrap().min_distance().unwrap(), 4);
        assert_eq!(hadamard(3, 2).unwrap().min_distance().unwrap(), 6);
        assert_eq!(hadamard(4, 2).unwrap().min_distance().unwrap(), 12);
    }

    #[test]
    fn reed_solomon_encoding_and_distance() {
        let c = reed_solomon(5, &[0, 1, 2, 3, 4], 1).unwrap();
        assert_eq!(c.encode_elems(&[1, 2]).unwrap(), vec![1, 3, 0, 2, 4]);
        // MDS: d = n - k + 1.
        assert_eq!(c.min_distance().unwrap(), 4);
        let c2 = reed_solomon(5, &[0, 1, 2, 3, 4], 2).unwrap();
        assert_eq!(c2.min_distance().unwrap(), 3);
    }

    #[test]
    fn reed_solomon_rejects_bad_inputs() {
        assert_eq!(
            reed_solomon(5, &[0, 1, 1], 1).unwrap_err(),
            Error::DuplicateEvalPoint(1)
        );
        assert!(matches!(
            reed_solomon(5, &[0, 1], 2),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn tensor_codewords_have_rows_and_columns_in_the_factors() {
        let c2 = hadamard(2, 2).unwrap();
        let c1 = hadamard(2, 3).unwrap();
        let t = tensor(&c2, &c1).unwrap();
        assert_eq!(t.n(), 32);
        // Dimension multiplies: 2 * 3.
        assert_eq!(t.k(), 6);
        t.for_each_codeword(&mut |_, cw| {
            let w = Word::from_elems(t.field().clone(), cw).unwrap();
            let g = word_to_grid(&w, c2.n(), c1.n()).unwrap();
            for r in 0..g.rows() {
                assert!(c1.contains(&g.row_word(r)));
            }
            for c in 0..g.cols() {
                assert!(c2.contains(&g.col_word(c)));
            }
        })
        .unwrap();
    }

    #[test]
    fn tensor_equals_row_column_membership_filter() {
        // Enumerate all 2^16 4x4 binary matrices and keep those whose rows
        // and columns lie in hadamard(2,2); that set must equal the tensor
        // codeword set.
        let c = hadamard(2, 2).unwrap();
        let t = tensor(&c, &c).unwrap();
        let mut tensor_set = std::collections::BTreeSet::new();
        t.for_each_codeword(&mut |_, cw| {
            tensor_set.insert(cw.to_vec());
        })
        .unwrap();
        let mut filtered = std::collections::BTreeSet::new();
        for idx in 0u32..1 << 16 {
            let cells: Vec<u16> = (0..16).map(|b| ((idx >> (15 - b)) & 1) as u16).collect();
            let w = Word::from_elems(c.field().clone(), &cells).unwrap();
            let g = word_to_grid(&w, 4, 4).unwrap();
            let rows_ok = (0..4).all(|r| c.contains(&g.row_word(r)));
            let cols_ok = rows_ok && (0..4).all(|j| c.contains(&g.col_word(j)));
            if rows_ok && cols_ok {
                filtered.insert(cells);
            }
        }
        assert_eq!(tensor_set, filtered);
    }

    #[test]
    fn tensor_distance_multiplies() {
        let a = hadamard(2, 2).unwrap();
        let b = hadamard(2, 3).unwrap();
        let t = tensor(&a, &b).unwrap();
        let da = a.relative_distance().unwrap();
        let db = b.relative_distance().unwrap();
        assert_eq!(t.relative_distance().unwrap(), da * db);

        let rs = reed_solomon(5, &[0, 1, 2, 3, 4], 1).unwrap();
        let t2 = tensor(&rs, &rs).unwrap();
        assert_eq!(
            t2.relative_distance().unwrap(),
            rs.relative_distance().unwrap() * rs.relative_distance().unwrap()
        );
    }

    #[test]
    fn interleaving_preserves_row_distance() {
        let base = hadamard(2, 2).unwrap();
        let d = base.min_distance().unwrap();
        for m in 1..=3usize {
            let ic = InterleavedCode::new(base.clone(), m).unwrap();
            let mut best = usize::MAX;
            let zero = Grid::zero(base.field().clone(), base.n(), m);
            ic.for_each_grid(&mut |idx, g| {
                if idx > 0 {
                    let dist = row_distance(g, &zero).unwrap().errors;
                    // Row distance to zero of a nonzero grid.
                    if dist > 0 {
                        best = best.min(dist);
                    }
                }
            })
            .unwrap();
            assert_eq!(best, d, "m={m}");
        }
    }

    #[test]
    fn interleaved_encode_places_columns() {
        let base = hadamard(2, 2).unwrap();
        let ic = InterleavedCode::new(base.clone(), 2).unwrap();
        let g = ic.encode(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.col_word(0), base.encode(&[1, 0]).unwrap());
        assert_eq!(g.col_word(1), base.encode(&[0, 1]).unwrap());
    }

    #[test]
    fn block_linearity_of_the_and_function() {
        let f = Arc::new(Field::new(2).unwrap());
        // x1*x2 as a table over (x1,x2).
        let w = Word::from_elems(f, &[0, 0, 0, 1]).unwrap();
        assert!(is_block_linear(&w, 2, 1, 2).unwrap());
        assert!(!is_block_linear(&w, 2, 2, 1).unwrap());
    }

    #[test]
    fn block_linear_words_are_exactly_tensored_hadamard_codewords() {
        let c = hadamard(2, 2).unwrap();
        let t = tensor(&c, &c).unwrap();
        let mut codewords = std::collections::BTreeSet::new();
        t.for_each_codeword(&mut |_, cw| {
            codewords.insert(cw.to_vec());
        })
        .unwrap();
        let f = t.field().clone();
        let mut count = 0usize;
        for idx in 0u32..1 << 16 {
            let cells: Vec<u16> = (0..16).map(|b| ((idx >> (15 - b)) & 1) as u16).collect();
            let w = Word::from_elems(f.clone(), &cells).unwrap();
            if is_block_linear(&w, 2, 2, 2).unwrap() {
                count += 1;
                assert!(codewords.contains(&cells));
            }
        }
        assert_eq!(count, codewords.len());
    }
}
