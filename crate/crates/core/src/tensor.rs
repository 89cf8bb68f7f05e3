//! Advice-driven list decoder for two-wise tensor codes.
//!
//! A tensor codeword is an n2 x n1 grid whose rows belong to the row code
//! and whose columns belong to the column code. The decoder guesses the
//! restriction of the target codeword to a small window S x T, then works
//! outward in four phases: decode the sampled rows against the advice,
//! decode every column against the surviving rows, decode every row
//! against the surviving columns, and finally fill the remaining rows by
//! erasure decoding each column. A branch's output survives only if it is
//! a genuine tensor codeword within the target radius of the received
//! grid.
//!
//! The window is either enumerated exhaustively (bounded by
//! [`ADVICE_CAP`](crate::ADVICE_CAP)) or read off a known planted codeword
//! for probability experiments. Either way each branch's intermediate
//! state is kept for diagnostics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::frac_f64;
use crate::code::{Decoded, ErasureOutcome, LinearCode, Word};
use crate::grid::{cell_distance, Grid};
use crate::{derive_seed, floor_mul, Error, Frac, Result, ADVICE_CAP};

/// Window dimensions after applying the ceiling formulas and the cap at
/// the code lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizes {
    /// Sampled column count |T|.
    pub m1: usize,
    /// Sampled row count |S|.
    pub m2: usize,
    /// Whether m1 hit the cap n1 (T is then the full column set).
    pub capped1: bool,
    /// Whether m2 hit the cap n2.
    pub capped2: bool,
    /// Formula value for m1 before ceiling and cap.
    pub raw_m1: f64,
    /// Formula value for m2 before ceiling and cap.
    pub raw_m2: f64,
}

/// Window sizes m1 = ceil(ln(8*l1/eps)/(2*delta1^2)) and
/// m2 = ceil(ln(8*l2/eps)/(2*eps^2)), capped at the code lengths. When a
/// cap is hit the corresponding index set is the whole range and its
/// sampling error terms vanish.
pub fn sample_sizes(
    delta1: f64,
    ell1: f64,
    ell2: f64,
    eps: f64,
    n1: usize,
    n2: usize,
) -> Result<SampleSizes> {
    if !(delta1 > 0.0 && ell1 >= 1.0 && ell2 >= 1.0 && eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError(
            "window formulas need delta1 > 0, l >= 1, 0 < eps < 1".into(),
        ));
    }
    let raw_m1 = (8.0 * ell1 / eps).ln() / (2.0 * delta1 * delta1);
    let raw_m2 = (8.0 * ell2 / eps).ln() / (2.0 * eps * eps);
    let c1 = raw_m1.ceil() as usize;
    let c2 = raw_m2.ceil() as usize;
    Ok(SampleSizes {
        m1: c1.min(n1),
        m2: c2.min(n2),
        capped1: c1 >= n1,
        capped2: c2 >= n2,
        raw_m1,
        raw_m2,
    })
}

/// Where the advice for the S x T window comes from.
#[derive(Debug, Clone)]
pub enum AdviceMode {
    /// Try every field assignment to the window.
    Enumerate,
    /// Read the window off a known codeword grid (one branch).
    Planted(Grid),
}

/// Intermediate state of one advice branch, kept for diagnostics.
#[derive(Debug, Clone)]
pub struct PhaseState {
    /// Sampled row indices S, sorted.
    pub s_rows: Vec<usize>,
    /// Sampled column indices T, sorted.
    pub t_cols: Vec<usize>,
    /// Advice values aligned with s_rows x t_cols.
    pub advice: Vec<Vec<u16>>,
    /// Phase 1: chosen row codeword per s in S, None marking bottom.
    pub b_rows: Vec<Option<Vec<u16>>>,
    /// Phase 2: chosen column codeword for every column index.
    pub d_cols: Vec<Option<Vec<u16>>>,
    /// Phase 3: chosen row codeword for every row index.
    pub e_rows: Vec<Option<Vec<u16>>>,
    /// Codeword emitted by this branch, if it survived Phase 4 and the
    /// final distance and membership filters.
    pub emitted: Option<Grid>,
}

impl PhaseState {
    /// Rows of S whose Phase-1 entry is not bottom.
    pub fn s_success(&self) -> Vec<usize> {
        self.s_rows
            .iter()
            .zip(&self.b_rows)
            .filter(|(_, b)| b.is_some())
            .map(|(&s, _)| s)
            .collect()
    }

    /// Columns whose Phase-2 entry is not bottom.
    pub fn t_success(&self) -> Vec<usize> {
        (0..self.d_cols.len()).filter(|&t| self.d_cols[t].is_some()).collect()
    }

    /// Rows whose Phase-3 entry is not bottom.
    pub fn u_success(&self) -> Vec<usize> {
        (0..self.e_rows.len()).filter(|&s| self.e_rows[s].is_some()).collect()
    }
}

/// Output of one decoder invocation.
#[derive(Debug)]
pub struct TensorDecodeReport {
    /// Deduplicated verified codeword grids, sorted by cell values.
    pub codewords: Vec<Grid>,
    /// One state per advice branch, in advice order.
    pub branches: Vec<PhaseState>,
    pub sizes: SampleSizes,
    /// min(delta1*eta2, delta2*eta1).
    pub eta_star: Frac,
    /// Output radius eta_star - 3*eps.
    pub target: Frac,
}

/// Four-phase advice decoder for the tensor of `c_row` (code of the rows,
/// length n1) and `c_col` (code of the columns, length n2).
#[allow(clippy::too_many_arguments)]
pub fn tensor_decode(
    c_row: &LinearCode,
    c_col: &LinearCode,
    r: &Grid,
    eta1: Frac,
    eta2: Frac,
    eps: Frac,
    seed: u64,
    mode: &AdviceMode,
) -> Result<TensorDecodeReport> {
    if c_row.field() != c_col.field() || r.field() != c_row.field() {
        return Err(Error::FieldMismatch);
    }
    let n1 = c_row.n();
    let n2 = c_col.n();
    if r.rows() != n2 || r.cols() != n1 {
        return Err(Error::LengthMismatch { expected: n2 * n1, got: r.rows() * r.cols() });
    }
    if r.has_erasure() {
        return Err(Error::InvalidArgument("received grid has erasures".into()));
    }
    if eps <= Frac::from_integer(0) {
        return Err(Error::DomainError(format!("eps must be positive, got {eps}")));
    }
    let delta1 = c_row.relative_distance()?;
    let delta2 = c_col.relative_distance()?;
    let eta_star = (delta1 * eta2).min(delta2 * eta1);
    let target = eta_star - Frac::new(3, 1) * eps;
    if target < Frac::from_integer(0) {
        return Err(Error::DomainError(format!(
            "output radius {target} is negative; shrink eps"
        )));
    }
    let t1 = floor_mul(eta1, n1)
        .ok_or_else(|| Error::InvalidArgument(format!("negative row radius {eta1}")))?;
    let t2 = floor_mul(eta2, n2)
        .ok_or_else(|| Error::InvalidArgument(format!("negative column radius {eta2}")))?;
    let cell_budget = floor_mul(target, n1 * n2).expect("target is nonnegative");

    let ell1 = c_row.max_list_size(t1, derive_seed(seed, 0xE11))?.value.max(1);
    let ell2 = c_col.max_list_size(t2, derive_seed(seed, 0xE12))?.value.max(1);
    let sizes = sample_sizes(
        frac_f64(delta1),
        ell1 as f64,
        ell2 as f64,
        frac_f64(eps),
        n1,
        n2,
    )?;

    let t_cols: Vec<usize> = if sizes.capped1 {
        (0..n1).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
        let mut v = rand::seq::index::sample(&mut rng, n1, sizes.m1).into_vec();
        v.sort_unstable();
        v
    };
    let s_rows: Vec<usize> = if sizes.capped2 {
        (0..n2).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2));
        let mut v = rand::seq::index::sample(&mut rng, n2, sizes.m2).into_vec();
        v.sort_unstable();
        v
    };

    // All row and column lists are advice-independent; decode them once.
    let row_lists: Vec<Vec<Decoded>> = (0..n2)
        .map(|s| c_row.list_decode_brute(&r.row_word(s), t1))
        .collect::<Result<_>>()?;
    let col_lists: Vec<Vec<Decoded>> = (0..n1)
        .map(|t| c_col.list_decode_brute(&r.col_word(t), t2))
        .collect::<Result<_>>()?;

    let advices: Vec<Vec<Vec<u16>>> = match mode {
        AdviceMode::Planted(c) => {
            if c.rows() != n2 || c.cols() != n1 {
                return Err(Error::LengthMismatch {
                    expected: n2 * n1,
                    got: c.rows() * c.cols(),
                });
            }
            if c.field() != r.field() {
                return Err(Error::FieldMismatch);
            }
            let window = s_rows
                .iter()
                .map(|&s| {
                    t_cols
                        .iter()
                        .map(|&t| {
                            c.get(s, t).ok_or_else(|| {
                                Error::InvalidArgument("planted grid has erasures".into())
                            })
                        })
                        .collect::<Result<Vec<u16>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            vec![window]
        }
        AdviceMode::Enumerate => {
            let q = u64::from(c_row.field().q());
            let cells = sizes.m1 * sizes.m2;
            let count = match (q as u128).checked_pow(cells as u32) {
                Some(c) if c <= u128::from(ADVICE_CAP) => c,
                Some(c) => {
                    return Err(Error::AdviceSpaceTooLarge { size: c, cap: ADVICE_CAP })
                }
                None => {
                    return Err(Error::AdviceSpaceTooLarge { size: u128::MAX, cap: ADVICE_CAP })
                }
            };
            (0..count as u64)
                .map(|idx| {
                    // Digits in row-major window order, first cell most
                    // significant.
                    let mut rest = idx;
                    let mut flat = vec![0u16; cells];
                    for slot in (0..cells).rev() {
                        flat[slot] = (rest % q) as u16;
                        rest /= q;
                    }
                    flat.chunks(sizes.m1).map(|c| c.to_vec()).collect()
                })
                .collect()
        }
    };

    let mut branches = Vec::with_capacity(advices.len());
    let mut emitted: Vec<Grid> = Vec::new();
    for advice in advices {
        let state = run_branch(
            c_row, c_col, r, &row_lists, &col_lists, &s_rows, &t_cols, advice, eps,
            cell_budget,
        )?;
        if let Some(g) = &state.emitted {
            emitted.push(g.clone());
        }
        branches.push(state);
    }
    let mut keyed: Vec<(Vec<u16>, Grid)> = emitted
        .into_iter()
        .map(|g| (g.cells().iter().map(|c| c.unwrap()).collect(), g))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(TensorDecodeReport {
        codewords: keyed.into_iter().map(|(_, g)| g).collect(),
        branches,
        sizes,
        eta_star,
        target,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_branch(
    c_row: &LinearCode,
    c_col: &LinearCode,
    r: &Grid,
    row_lists: &[Vec<Decoded>],
    col_lists: &[Vec<Decoded>],
    s_rows: &[usize],
    t_cols: &[usize],
    advice: Vec<Vec<u16>>,
    eps: Frac,
    cell_budget: usize,
) -> Result<PhaseState> {
    let n1 = c_row.n();
    let n2 = c_col.n();
    let m2 = s_rows.len();

    // Phase 1: rows of S against the advice window.
    let b_rows: Vec<Option<Vec<u16>>> = s_rows
        .iter()
        .enumerate()
        .map(|(si, &s)| {
            row_lists[s]
                .iter()
                .find(|cand| {
                    t_cols
                        .iter()
                        .enumerate()
                        .all(|(tj, &t)| cand.codeword[t] == advice[si][tj])
                })
                .map(|c| c.codeword.clone())
        })
        .collect();
    let survivors: Vec<(usize, &Vec<u16>)> = s_rows
        .iter()
        .zip(&b_rows)
        .filter_map(|(&s, b)| b.as_ref().map(|row| (s, row)))
        .collect();

    // Phase 2: every column against the surviving sampled rows.
    let phase2_cut = eps * Frac::from_integer(m2 as i64);
    let d_cols: Vec<Option<Vec<u16>>> = (0..n1)
        .map(|t| {
            col_lists[t]
                .iter()
                .find(|cand| {
                    let mism = survivors
                        .iter()
                        .filter(|(s, brow)| cand.codeword[*s] != brow[t])
                        .count();
                    Frac::from_integer(mism as i64) < phase2_cut
                })
                .map(|c| c.codeword.clone())
        })
        .collect();
    let t_success: Vec<usize> = (0..n1).filter(|&t| d_cols[t].is_some()).collect();

    // Phase 3: every row against the surviving columns.
    let phase3_cut = eps * Frac::from_integer(n1 as i64);
    let e_rows: Vec<Option<Vec<u16>>> = (0..n2)
        .map(|s| {
            row_lists[s]
                .iter()
                .find(|cand| {
                    let mism = t_success
                        .iter()
                        .filter(|&&t| {
                            cand.codeword[t] != d_cols[t].as_ref().expect("t_success")[s]
                        })
                        .count();
                    Frac::from_integer(mism as i64) < phase3_cut
                })
                .map(|c| c.codeword.clone())
        })
        .collect();

    // Phase 4: erasure decode each column of E; a failure on any column
    // abandons the branch.
    let f = c_row.field().clone();
    let mut columns: Vec<Vec<u16>> = Vec::with_capacity(n1);
    let mut complete = true;
    for t in 0..n1 {
        let symbols: Vec<Option<u16>> =
            e_rows.iter().map(|row| row.as_ref().map(|v| v[t])).collect();
        let w = Word::new(f.clone(), symbols)?;
        match c_col.unique_decode_erasures(&w)? {
            ErasureOutcome::Codeword { codeword, .. } => columns.push(codeword.elems()?),
            ErasureOutcome::Ambiguous | ErasureOutcome::NoCodeword => {
                complete = false;
                break;
            }
        }
    }

    let mut state = PhaseState {
        s_rows: s_rows.to_vec(),
        t_cols: t_cols.to_vec(),
        advice,
        b_rows,
        d_cols,
        e_rows,
        emitted: None,
    };
    if !complete {
        return Ok(state);
    }
    let cells: Vec<Option<u16>> = (0..n2)
        .flat_map(|s| columns.iter().map(move |col| Some(col[s])))
        .collect();
    let cand = Grid::from_cells(f, n2, n1, cells)?;
    let close = cell_distance(&cand, r)?.errors <= cell_budget;
    let member = (0..n2).all(|s| c_row.contains(&cand.row_word(s)))
        && (0..n1).all(|t| c_col.contains(&cand.col_word(t)));
    if close && member {
        state.emitted = Some(cand);
    }
    Ok(state)
}

/// Per-run verdicts for the phase-analysis inequalities against a known
/// planted codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseDiagnostics {
    pub s_size: usize,
    pub s_success: usize,
    pub s_right: usize,
    pub s_wrong: usize,
    /// |S_success| >= (1-delta2+2eps)|S|, |S_r| >= (1-delta2+eps)|S|,
    /// |S_w| <= eps|S|.
    pub phase1_holds: bool,
    pub t_success: usize,
    pub t_right: usize,
    pub t_wrong: usize,
    /// |T_success| >= (1-delta1+3eps)n1, |T_r| >= (1-delta1+2eps)n1,
    /// |T_w| <= eps*n1.
    pub phase2_holds: bool,
    pub u_success: usize,
    /// Every non-bottom Phase-3 row equals the planted row.
    pub u_all_correct: bool,
    /// u_all_correct and |U_success| >= (1-delta2+3eps)n2.
    pub phase3_holds: bool,
    /// Planted codeword within the output radius of the received grid.
    pub planted_within_target: bool,
    pub emitted_planted: bool,
    /// phase3_holds and planted_within_target imply emitted_planted.
    pub output_implication_ok: bool,
}

/// Measures the branch state against a planted codeword: which of the
/// phase-analysis inequalities held, and whether the final-output
/// implication was honored.
pub fn phase_diagnostics(
    state: &PhaseState,
    c_row: &LinearCode,
    c_col: &LinearCode,
    r: &Grid,
    planted: &Grid,
    eps: Frac,
    target: Frac,
) -> Result<PhaseDiagnostics> {
    let n1 = c_row.n();
    let n2 = c_col.n();
    if planted.rows() != n2 || planted.cols() != n1 {
        return Err(Error::LengthMismatch {
            expected: n2 * n1,
            got: planted.rows() * planted.cols(),
        });
    }
    let delta1 = c_row.relative_distance()?;
    let delta2 = c_col.relative_distance()?;
    let planted_rows: Vec<Vec<u16>> =
        (0..n2).map(|s| planted.row_word(s).elems()).collect::<Result<_>>()?;
    let planted_cols: Vec<Vec<u16>> =
        (0..n1).map(|t| planted.col_word(t).elems()).collect::<Result<_>>()?;

    let m2 = state.s_rows.len();
    let s_success = state.s_success().len();
    let s_right = state
        .s_rows
        .iter()
        .zip(&state.b_rows)
        .filter(|(&s, b)| b.as_deref() == Some(planted_rows[s].as_slice()))
        .count();
    let s_wrong = s_success - s_right;
    let one = Frac::from_integer(1);
    let of = |count: usize| Frac::from_integer(count as i64);
    let phase1_holds = of(s_success) >= (one - delta2 + Frac::new(2, 1) * eps) * of(m2)
        && of(s_right) >= (one - delta2 + eps) * of(m2)
        && of(s_wrong) <= eps * of(m2);

    let t_success = state.t_success().len();
    let t_right = (0..n1)
        .filter(|&t| state.d_cols[t].as_deref() == Some(planted_cols[t].as_slice()))
        .count();
    let t_wrong = t_success - t_right;
    let phase2_holds = of(t_success) >= (one - delta1 + Frac::new(3, 1) * eps) * of(n1)
        && of(t_right) >= (one - delta1 + Frac::new(2, 1) * eps) * of(n1)
        && of(t_wrong) <= eps * of(n1);

    let u_success = state.u_success().len();
    let u_all_correct = (0..n2).all(|s| match &state.e_rows[s] {
        Some(row) => row == &planted_rows[s],
        None => true,
    });
    let phase3_holds =
        u_all_correct && of(u_success) >= (one - delta2 + Frac::new(3, 1) * eps) * of(n2);

    let cell_budget = floor_mul(target, n1 * n2);
    let planted_within_target = match cell_budget {
        Some(b) => cell_distance(planted, r)?.errors <= b,
        None => false,
    };
    let emitted_planted = state
        .emitted
        .as_ref()
        .is_some_and(|g| g.cells() == planted.cells());
    let output_implication_ok = !(phase3_holds && planted_within_target) || emitted_planted;

    Ok(PhaseDiagnostics {
        s_size: m2,
        s_success,
        s_right,
        s_wrong,
        phase1_holds,
        t_success,
        t_right,
        t_wrong,
        phase2_holds,
        u_success,
        u_all_correct,
        phase3_holds,
        planted_within_target,
        emitted_planted,
        output_implication_ok,
    })
}

/// Received grid and tensor codewords showing that tensoring does not
/// shrink lists: every base codeword within eta of r lifts to a tensor
/// codeword within delta*eta of the lifted received grid.
#[derive(Debug, Clone)]
pub struct TensorLowerWitness {
    pub received: Grid,
    pub codewords: Vec<Grid>,
    /// The lifted radius delta*eta.
    pub radius: Frac,
}

/// Tensors a minimum-weight codeword with the received word: the grid
/// c0 (x) r with cell (i, j) = c0[i]*r[j], and the lifts c0 (x) c of every
/// list element c.
pub fn tensor_lower_witness(
    code: &LinearCode,
    r: &Word,
    eta: Frac,
) -> Result<TensorLowerWitness> {
    if r.field() != code.field() {
        return Err(Error::FieldMismatch);
    }
    if r.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: r.len() });
    }
    if r.erasure_count() != 0 {
        return Err(Error::InvalidArgument("received word has erasures".into()));
    }
    let n = code.n();
    let d = code.min_distance()?;
    let delta = code.relative_distance()?;
    let radius = delta * eta;
    let budget = floor_mul(eta, n)
        .ok_or_else(|| Error::InvalidArgument(format!("negative radius {eta}")))?;
    let mut c0: Option<Vec<u16>> = None;
    code.for_each_codeword(&mut |idx, cw| {
        if idx == 0 || c0.is_some() {
            return;
        }
        if cw.iter().filter(|&&v| v != 0).count() == d {
            c0 = Some(cw.to_vec());
        }
    })?;
    let c0 = c0.expect("a nonzero codeword attains the minimum weight");
    let f = code.field().clone();
    let lift = |word: &[u16]| -> Grid {
        let cells: Vec<Option<u16>> = c0
            .iter()
            .flat_map(|&a| word.iter().map(move |&b| (a, b)))
            .map(|(a, b)| Some(f.mul(a, b)))
            .collect();
        Grid::from_cells(f.clone(), n, n, cells).expect("n*n cells")
    };
    let received = lift(&r.elems()?);
    let list = code.list_decode_brute(r, budget)?;
    let mut codewords = Vec::with_capacity(list.len());
    for entry in &list {
        let g = lift(&entry.codeword);
        let dist = cell_distance(&g, &received)?;
        let frac = Frac::new(dist.errors as i64, (n * n) as i64);
        assert!(frac <= radius, "lifted codeword fell outside the scaled radius");
        codewords.push(g);
    }
    Ok(TensorLowerWitness { received, codewords, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{hadamard, tensor, word_to_grid};

    fn codeword_grid(c_row: &LinearCode, c_col: &LinearCode, seed: u64) -> Grid {
        let t = tensor(c_col, c_row).unwrap();
        let w = t.random_codeword(seed).unwrap();
        word_to_grid(&w, c_col.n(), c_row.n()).unwrap()
    }

    #[test]
    fn window_formula_values() {
        let s = sample_sizes(0.5, 1.0, 1.0, 0.125, 100, 1000).unwrap();
        assert_eq!(s.m1, 9);
        assert_eq!(s.m2, 134);
        assert!(!s.capped1 && !s.capped2);
        assert!((s.raw_m1 - 2.0 * 64f64.ln()).abs() < 1e-12);
        let s = sample_sizes(0.5, 1.0, 1.0, 0.125, 4, 1000).unwrap();
        assert_eq!(s.m1, 4);
        assert!(s.capped1);
        // m2 grows like eps^-2 ln(1/eps).
        let a = sample_sizes(0.5, 1.0, 1.0, 0.1, 1 << 20, 1 << 20).unwrap();
        let b = sample_sizes(0.5, 1.0, 1.0, 0.05, 1 << 20, 1 << 20).unwrap();
        assert!(b.raw_m2 > 4.0 * a.raw_m2);
        assert!(sample_sizes(0.0, 1.0, 1.0, 0.1, 8, 8).is_err());
    }

    #[test]
    fn noiseless_planted_grid_is_recovered() {
        let h = hadamard(2, 3).unwrap();
        let planted = codeword_grid(&h, &h, 5);
        let rep = tensor_decode(
            &h,
            &h,
            &planted,
            Frac::new(3, 8),
            Frac::new(3, 8),
            Frac::new(1, 16),
            7,
            &AdviceMode::Planted(planted.clone()),
        )
        .unwrap();
        assert!(rep.sizes.capped1 && rep.sizes.capped2);
        assert_eq!(rep.eta_star, Frac::new(3, 16));
        assert_eq!(rep.target, Frac::from_integer(0));
        assert_eq!(rep.codewords.len(), 1);
        assert_eq!(rep.codewords[0].cells(), planted.cells());
        let diag = phase_diagnostics(
            &rep.branches[0],
            &h,
            &h,
            &planted,
            &planted,
            Frac::new(1, 16),
            rep.target,
        )
        .unwrap();
        assert!(diag.phase1_holds && diag.phase2_holds && diag.phase3_holds);
        assert!(diag.planted_within_target);
        assert!(diag.emitted_planted);
        assert!(diag.output_implication_ok);
    }

    #[test]
    fn enumerate_mode_equals_exhaustive_ball_when_fully_capped() {
        let h = hadamard(2, 2).unwrap();
        let eta = Frac::new(1, 4);
        let eps = Frac::new(1, 100);
        let planted = codeword_grid(&h, &h, 11);
        let mut r = planted.clone();
        r.set(1, 2, Some(1 ^ r.get(1, 2).unwrap()));
        let rep =
            tensor_decode(&h, &h, &r, eta, eta, eps, 3, &AdviceMode::Enumerate).unwrap();
        assert!(rep.sizes.capped1 && rep.sizes.capped2);
        // Budget is floor((1/8 - 3/100) * 16) = 1 cell.
        let budget = floor_mul(rep.target, 16).unwrap();
        assert_eq!(budget, 1);
        // Exhaustive ball in the tensor code.
        let t = tensor(&h, &h).unwrap();
        let mut ball: Vec<Vec<u16>> = Vec::new();
        t.for_each_codeword(&mut |_, cw| {
            let g = word_to_grid(
                &Word::from_elems(t.field().clone(), cw).unwrap(),
                4,
                4,
            )
            .unwrap();
            if cell_distance(&g, &r).unwrap().errors <= budget {
                ball.push(cw.to_vec());
            }
        })
        .unwrap();
        ball.sort();
        let got: Vec<Vec<u16>> = rep
            .codewords
            .iter()
            .map(|g| g.cells().iter().map(|c| c.unwrap()).collect())
            .collect();
        assert_eq!(got, ball);
        assert_eq!(got.len(), 1);

        // Determinism across identical calls.
        let rep2 =
            tensor_decode(&h, &h, &r, eta, eta, eps, 3, &AdviceMode::Enumerate).unwrap();
        let got2: Vec<Vec<u16>> = rep2
            .codewords
            .iter()
            .map(|g| g.cells().iter().map(|c| c.unwrap()).collect())
            .collect();
        assert_eq!(got, got2);
    }

    #[test]
    fn advice_space_cap_is_enforced() {
        let h = hadamard(2, 3).unwrap();
        let r = codeword_grid(&h, &h, 2);
        // Capped window is 8x8 = 64 binary cells: 2^64 advice strings.
        assert!(matches!(
            tensor_decode(
                &h,
                &h,
                &r,
                Frac::new(3, 8),
                Frac::new(3, 8),
                Frac::new(1, 16),
                0,
                &AdviceMode::Enumerate,
            ),
            Err(Error::AdviceSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn negative_output_radius_is_rejected() {
        let h = hadamard(2, 2).unwrap();
        let r = codeword_grid(&h, &h, 0);
        assert!(matches!(
            tensor_decode(
                &h,
                &h,
                &r,
                Frac::new(1, 4),
                Frac::new(1, 4),
                Frac::new(1, 2),
                0,
                &AdviceMode::Enumerate,
            ),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn soundness_on_random_received_grids() {
        let h = hadamard(2, 2).unwrap();
        let t = tensor(&h, &h).unwrap();
        for seed in 0..4 {
            let noise = t.random_codeword(seed).unwrap();
            let mut r = word_to_grid(&noise, 4, 4).unwrap();
            // Perturb a few cells to leave the code.
            r.set(0, 0, Some(1 ^ r.get(0, 0).unwrap()));
            r.set(2, 3, Some(1 ^ r.get(2, 3).unwrap()));
            let rep = tensor_decode(
                &h,
                &h,
                &r,
                Frac::new(1, 4),
                Frac::new(1, 4),
                Frac::new(1, 100),
                seed,
                &AdviceMode::Enumerate,
            )
            .unwrap();
            let budget = floor_mul(rep.target, 16).unwrap();
            for g in &rep.codewords {
                assert!(cell_distance(g, &r).unwrap().errors <= budget);
                let w = crate::families::grid_to_word(g);
                assert!(t.contains(&w));
            }
        }
    }

    #[test]
    fn lower_witness_lifts_the_whole_list() {
        let h = hadamard(2, 2).unwrap();
        // This word sits at distance 1 from three codewords.
        let r = Word::from_elems(h.field().clone(), &[0, 0, 0, 1]).unwrap();
        let base_list = h.list_decode_brute(&r, 1).unwrap();
        assert_eq!(base_list.len(), 3);
        let w = tensor_lower_witness(&h, &r, Frac::new(1, 4)).unwrap();
        assert_eq!(w.radius, Frac::new(1, 8));
        assert_eq!(w.codewords.len(), 3);
        let t = tensor(&h, &h).unwrap();
        for g in &w.codewords {
            assert!(t.contains(&crate::families::grid_to_word(g)));
            let dist = cell_distance(g, &w.received).unwrap();
            assert!(Frac::new(dist.errors as i64, 16) <= w.radius);
        }
        // A codeword input at radius zero lifts to a single exact match.
        let cw = h.encode(&[1, 0]).unwrap();
        let w = tensor_lower_witness(&h, &cw, Frac::from_integer(0)).unwrap();
        assert_eq!(w.codewords.len(), 1);
        assert_eq!(w.codewords[0].cells(), w.received.cells());
    }
}
