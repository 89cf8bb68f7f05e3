//! Decoders for interleaved codes in the row-symbol metric.
//!
//! Two list decoders are implemented against the same brute-force column
//! oracle. The naive one extends per-column candidate lists while pruning
//! prefixes whose mismatch-row count already exceeds the budget; it returns
//! exactly the ball around the received grid. The erasure-propagation
//! decoder instead erases the rows where the chosen column candidate
//! disagreed and recurses on the punctured code; its whole nondeterministic
//! execution is materialized as a tree whose edges are colored by how much
//! new disagreement they introduce. The coloring drives a combinatorial
//! bound on the number of leaves, checked by [`tree_stats`].
//!
//! Edge weights, erasure fractions, and distances are exact rationals with
//! denominator n, so color thresholds are never subject to rounding.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{LinearCode, Word};
use crate::families::InterleavedCode;
use crate::field::Field;
use crate::grid::{row_distance, Grid};
use crate::{derive_seed, floor_mul, Error, Frac, Result, TREE_DISTANCE_CAP};

/// Work counters for the naive decoder; the cell-comparison count is the
/// quantity bounded by the quadratic runtime ceiling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NaiveDecodeStats {
    /// Column list-decoding invocations (one per column).
    pub oracle_calls: usize,
    /// Received-cell comparisons made while extending prefixes.
    pub cell_comparisons: u64,
    /// Largest per-column candidate list.
    pub max_column_list: usize,
    /// Largest prefix candidate list over all levels.
    pub max_partial_list: usize,
}

/// Column-by-column list decoding at an absolute row budget.
///
/// Shared core: the interleaved decoder passes erasure-free columns and
/// budget = floor(eta*n); the linear-transform decoder passes columns with
/// whole rows erased and a budget already reduced by the erased-row count.
/// Rows where a column cell is erased never count as mismatches.
pub fn decode_naive_budget(
    base: &LinearCode,
    cols: &[Word],
    budget: usize,
) -> Result<(Vec<Grid>, NaiveDecodeStats)> {
    let n = base.n();
    let m = cols.len();
    if m == 0 {
        return Err(Error::InvalidArgument("no columns to decode".into()));
    }
    for c in cols {
        if c.field() != base.field() {
            return Err(Error::FieldMismatch);
        }
        if c.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: c.len() });
        }
    }
    let mut stats = NaiveDecodeStats { oracle_calls: 0, ..Default::default() };
    let mut lists = Vec::with_capacity(m);
    for c in cols {
        let l = base.list_decode_erasures(c, budget)?;
        stats.oracle_calls += 1;
        stats.max_column_list = stats.max_column_list.max(l.len());
        lists.push(l);
    }

    struct Partial {
        picks: Vec<usize>,
        mismatch: Vec<bool>,
        count: usize,
    }
    let mut partials =
        vec![Partial { picks: Vec::new(), mismatch: vec![false; n], count: 0 }];
    for (i, list) in lists.iter().enumerate() {
        let col = &cols[i];
        let mut next = Vec::new();
        for p in &partials {
            for (ci, cand) in list.iter().enumerate() {
                let mut mismatch = p.mismatch.clone();
                let mut count = p.count;
                for (j, flag) in mismatch.iter_mut().enumerate() {
                    stats.cell_comparisons += 1;
                    if let Some(v) = col.get(j) {
                        if cand.codeword[j] != v && !*flag {
                            *flag = true;
                            count += 1;
                        }
                    }
                }
                if count <= budget {
                    let mut picks = p.picks.clone();
                    picks.push(ci);
                    next.push(Partial { picks, mismatch, count });
                }
            }
        }
        partials = next;
        stats.max_partial_list = stats.max_partial_list.max(partials.len());
    }

    let f = base.field().clone();
    let grids = partials
        .iter()
        .map(|p| {
            let picked: Vec<Word> = p
                .picks
                .iter()
                .enumerate()
                .map(|(i, &ci)| {
                    Word::from_elems(f.clone(), &lists[i][ci].codeword)
                        .expect("codeword elements are valid")
                })
                .collect();
            Grid::from_columns(&picked).expect("columns share length and field")
        })
        .collect();
    Ok((grids, stats))
}

/// All interleaved codewords within row fraction `eta` of an erasure-free
/// received grid, with work counters.
pub fn decode_naive(
    ic: &InterleavedCode,
    r: &Grid,
    eta: Frac,
) -> Result<(Vec<Grid>, NaiveDecodeStats)> {
    let n = ic.n();
    check_received(ic, r)?;
    let Some(budget) = floor_mul(eta, n) else {
        return Ok((Vec::new(), NaiveDecodeStats::default()));
    };
    let cols: Vec<Word> = (0..ic.m()).map(|i| r.col_word(i)).collect();
    decode_naive_budget(ic.base(), &cols, budget)
}

fn check_received(ic: &InterleavedCode, r: &Grid) -> Result<()> {
    if r.field() != ic.base().field() {
        return Err(Error::FieldMismatch);
    }
    if r.rows() != ic.n() || r.cols() != ic.m() {
        return Err(Error::LengthMismatch {
            expected: ic.n() * ic.m(),
            got: r.rows() * r.cols(),
        });
    }
    if r.has_erasure() {
        return Err(Error::InvalidArgument("received grid has erasures".into()));
    }
    Ok(())
}

/// Edge classification by the new disagreement it introduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeColor {
    /// Weight below delta - eta: forced continuation.
    White,
    /// At least delta - eta but below half the punctured distance.
    Blue,
    /// At least half the punctured distance.
    Red,
}

#[derive(Debug, Clone)]
pub struct TreeEdge {
    /// Chosen column codeword, lifted back to full length.
    pub codeword: Vec<u16>,
    /// New disagreement fraction: errors on unerased rows over n.
    pub weight: Frac,
    pub color: EdgeColor,
    pub child: usize,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub level: usize,
    /// Rows erased before decoding this node's column.
    pub erased: BTreeSet<usize>,
    /// Erased fraction |erased|/n.
    pub mu: Frac,
    /// Relative distance of the code punctured at `erased`, over the full
    /// length n: exact when the code is small enough, else delta - mu.
    pub delta_v: Frac,
    pub edges: Vec<TreeEdge>,
}

/// Materialized execution tree of the erasure-propagation decoder.
#[derive(Debug, Clone)]
pub struct DecodeTree {
    pub nodes: Vec<TreeNode>,
    pub field: Arc<Field>,
    pub n: usize,
    pub m: usize,
    pub eta: Frac,
    pub delta: Frac,
    /// Whether punctured distances were computed exactly.
    pub exact_distances: bool,
}

impl DecodeTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Candidate grids at the level-m leaves, in deterministic DFS order.
    pub fn candidates(&self) -> Vec<Grid> {
        let mut out = Vec::new();
        let mut path: Vec<Vec<u16>> = Vec::new();
        self.walk(0, &mut path, &mut out);
        out
    }

    fn walk(&self, idx: usize, path: &mut Vec<Vec<u16>>, out: &mut Vec<Grid>) {
        let node = &self.nodes[idx];
        if node.level == self.m {
            let cols: Vec<Word> = path
                .iter()
                .map(|c| Word::from_elems(self.field.clone(), c).expect("valid codeword"))
                .collect();
            out.push(Grid::from_columns(&cols).expect("uniform columns"));
            return;
        }
        for e in &node.edges {
            path.push(e.codeword.clone());
            self.walk(e.child, path, out);
            path.pop();
        }
    }
}

/// Builds the full execution tree at relative radius `eta` (must be below
/// the base distance). Every node decodes one column of the punctured code
/// at the remaining integer budget; children follow the deterministic list
/// order.
pub fn erase_decode_tree(ic: &InterleavedCode, r: &Grid, eta: Frac) -> Result<DecodeTree> {
    check_received(ic, r)?;
    let base = ic.base();
    let n = base.n();
    let delta = base.relative_distance()?;
    if eta >= delta {
        return Err(Error::RadiusTooLarge {
            radius: eta.to_string(),
            delta: delta.to_string(),
        });
    }
    if eta < Frac::from_integer(0) {
        return Err(Error::InvalidArgument(format!("negative radius {eta}")));
    }
    let budget = floor_mul(eta, n).expect("nonnegative radius");
    let exact = base.codeword_count() <= u128::from(TREE_DISTANCE_CAP);
    let mut builder = TreeBuilder {
        ic,
        r,
        n,
        eta,
        delta,
        budget,
        exact,
        nodes: Vec::new(),
        distance_memo: HashMap::new(),
    };
    builder.expand(0, BTreeSet::new())?;
    Ok(DecodeTree {
        nodes: builder.nodes,
        field: base.field().clone(),
        n,
        m: ic.m(),
        eta,
        delta,
        exact_distances: exact,
    })
}

struct TreeBuilder<'a> {
    ic: &'a InterleavedCode,
    r: &'a Grid,
    n: usize,
    eta: Frac,
    delta: Frac,
    budget: usize,
    exact: bool,
    nodes: Vec<TreeNode>,
    distance_memo: HashMap<BTreeSet<usize>, Frac>,
}

impl TreeBuilder<'_> {
    fn delta_v(&mut self, erased: &BTreeSet<usize>, mu: Frac) -> Result<Frac> {
        if !self.exact {
            return Ok(self.delta - mu);
        }
        if let Some(&d) = self.distance_memo.get(erased) {
            return Ok(d);
        }
        let base = self.ic.base();
        let d = if erased.is_empty() {
            self.delta
        } else {
            let p = base.puncture(erased)?;
            Frac::new(p.code.min_distance()? as i64, self.n as i64)
        };
        self.distance_memo.insert(erased.clone(), d);
        Ok(d)
    }

    fn expand(&mut self, level: usize, erased: BTreeSet<usize>) -> Result<usize> {
        let mu = Frac::new(erased.len() as i64, self.n as i64);
        let delta_v = self.delta_v(&erased, mu)?;
        // Puncturing never removes more than its size from the distance.
        debug_assert!(delta_v >= self.delta - mu);
        let idx = self.nodes.len();
        self.nodes.push(TreeNode { level, erased: erased.clone(), mu, delta_v, edges: Vec::new() });
        if level == self.ic.m() {
            return Ok(idx);
        }
        let base = self.ic.base();
        assert!(
            self.budget >= erased.len(),
            "erasure set outgrew the error budget, which the recursion forbids"
        );
        let radius = self.budget - erased.len();
        let col = self.r.col_word(level);
        let list = if erased.is_empty() {
            base.list_decode_brute(&col, radius)?
        } else {
            let p = base.puncture(&erased)?;
            let punct_elems: Vec<u16> =
                p.kept.iter().map(|&j| col.get(j).expect("erasure-free grid")).collect();
            let pw = Word::from_elems(base.field().clone(), &punct_elems)?;
            p.code.list_decode_brute(&pw, radius)?
        };
        let mut edges = Vec::with_capacity(list.len());
        for cand in &list {
            let lifted = base.encode_elems(&cand.message)?;
            let weight = Frac::new(cand.errors as i64, self.n as i64);
            let color = if weight < self.delta - self.eta {
                EdgeColor::White
            } else if weight < delta_v / Frac::from_integer(2) {
                EdgeColor::Blue
            } else {
                EdgeColor::Red
            };
            let mut child_erased = erased.clone();
            for (j, &v) in lifted.iter().enumerate() {
                if col.get(j) != Some(v) {
                    child_erased.insert(j);
                }
            }
            // The per-edge accumulation (old set plus disagreements on
            // unerased rows) must reproduce the full-prefix disagreement
            // set; equivalently, all new disagreements lie outside the old
            // set and there are exactly `errors` of them.
            assert_eq!(
                child_erased.len(),
                erased.len() + cand.errors,
                "erasure accumulation diverged from the recomputed disagreement set"
            );
            let child = self.expand(level + 1, child_erased)?;
            edges.push(TreeEdge { codeword: lifted, weight, color, child });
        }
        self.nodes[idx].edges = edges;
        Ok(idx)
    }
}

/// Structural counts extracted from a decode tree, including everything
/// needed to falsify the coloring lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStats {
    pub node_count: usize,
    /// Leaves at level m: candidate codeword grids.
    pub leaves_at_level_m: usize,
    /// Leaves at levels below m: pruned branches, not codewords.
    pub dead_leaves: usize,
    pub max_blue_out_degree: usize,
    /// Nodes carrying a white out-edge next to any other out-edge.
    pub white_exclusivity_violations: usize,
    pub max_blue_per_path: usize,
    pub max_red_per_path: usize,
}

pub fn tree_stats(t: &DecodeTree) -> TreeStats {
    let mut stats = TreeStats {
        node_count: t.nodes.len(),
        leaves_at_level_m: 0,
        dead_leaves: 0,
        max_blue_out_degree: 0,
        white_exclusivity_violations: 0,
        max_blue_per_path: 0,
        max_red_per_path: 0,
    };
    fn dfs(t: &DecodeTree, idx: usize, blue: usize, red: usize, stats: &mut TreeStats) {
        let node = &t.nodes[idx];
        if node.level == t.m {
            stats.leaves_at_level_m += 1;
        } else if node.edges.is_empty() {
            stats.dead_leaves += 1;
        }
        stats.max_blue_per_path = stats.max_blue_per_path.max(blue);
        stats.max_red_per_path = stats.max_red_per_path.max(red);
        let blues = node.edges.iter().filter(|e| e.color == EdgeColor::Blue).count();
        stats.max_blue_out_degree = stats.max_blue_out_degree.max(blues);
        let whites = node.edges.iter().filter(|e| e.color == EdgeColor::White).count();
        if whites > 0 && node.edges.len() > 1 {
            stats.white_exclusivity_violations += 1;
        }
        for e in &node.edges {
            let b = blue + usize::from(e.color == EdgeColor::Blue);
            let r = red + usize::from(e.color == EdgeColor::Red);
            dfs(t, e.child, b, r, stats);
        }
    }
    dfs(t, 0, 0, 0, &mut stats);
    stats
}

/// Received grid and codeword set witnessing that the interleaved list at
/// the full relative distance has at least 2^m members.
#[derive(Debug, Clone)]
pub struct LowerWitness {
    pub received: Grid,
    pub codewords: Vec<Grid>,
    pub delta: Frac,
}

/// Repeats a minimum-weight codeword in every column and returns the 2^m
/// grids whose columns each choose that codeword or zero; all of them stay
/// within the relative distance of the received grid.
pub fn interleave_lower_witness(code: &LinearCode, m: usize) -> Result<LowerWitness> {
    if m == 0 || m >= 63 {
        return Err(Error::InvalidArgument(format!("column count {m} out of range")));
    }
    let n = code.n();
    let d = code.min_distance()?;
    let delta = code.relative_distance()?;
    let mut min_word: Option<Vec<u16>> = None;
    code.for_each_codeword(&mut |idx, cw| {
        if idx == 0 || min_word.is_some() {
            return;
        }
        if cw.iter().filter(|&&v| v != 0).count() == d {
            min_word = Some(cw.to_vec());
        }
    })?;
    let c1 = min_word.expect("some nonzero codeword attains the minimum weight");
    let f = code.field().clone();
    let c1w = Word::from_elems(f.clone(), &c1)?;
    let zero = Word::from_elems(f, &vec![0u16; n])?;
    let received = Grid::from_columns(&vec![c1w.clone(); m])?;
    let mut codewords = Vec::with_capacity(1 << m);
    for mask in 0..(1u64 << m) {
        let cols: Vec<Word> = (0..m)
            .map(|i| if mask >> i & 1 == 1 { c1w.clone() } else { zero.clone() })
            .collect();
        let g = Grid::from_columns(&cols)?;
        let dist = row_distance(&g, &received)?;
        let frac = Frac::new(dist.errors as i64, n as i64);
        assert!(frac <= delta, "witness grid fell outside the distance ball");
        codewords.push(g);
    }
    Ok(LowerWitness { received, codewords, delta })
}

/// Measured list sizes for the puncturing comparison: a punctured list at
/// some radius never beats the full list once the radius absorbs the
/// erasure count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PuncturingGrowthReport {
    pub trials: u64,
    pub violations: u64,
    pub max_punctured_list: usize,
    pub max_full_list: usize,
}

/// For sampled erasure sets S and received words r, checks that the list of
/// the S-punctured code around r restricted to the kept coordinates, at
/// radius t, is no larger than the full code's list around r at t + |S|.
pub fn puncturing_list_growth_check(
    code: &LinearCode,
    erasures: usize,
    radius: usize,
    trials: u64,
    seed: u64,
) -> Result<PuncturingGrowthReport> {
    let n = code.n();
    let d = code.min_distance()?;
    if erasures >= d {
        return Err(Error::TooManyErasures { got: erasures, d });
    }
    let q = code.field().q();
    let mut report = PuncturingGrowthReport {
        trials,
        violations: 0,
        max_punctured_list: 0,
        max_full_list: 0,
    };
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial));
        let erased: BTreeSet<usize> =
            rand::seq::index::sample(&mut rng, n, erasures).into_iter().collect();
        let elems: Vec<u16> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        let word = Word::from_elems(code.field().clone(), &elems)?;
        let p = code.puncture(&erased)?;
        let restricted: Vec<u16> = p.kept.iter().map(|&j| elems[j]).collect();
        let pw = Word::from_elems(code.field().clone(), &restricted)?;
        let punctured = p.code.list_decode_brute(&pw, radius)?.len();
        let full = code.list_decode_brute(&word, radius + erasures)?.len();
        report.max_punctured_list = report.max_punctured_list.max(punctured);
        report.max_full_list = report.max_full_list.max(full);
        if punctured > full {
            report.violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::hadamard;

    fn random_grid(ic: &InterleavedCode, seed: u64) -> Grid {
        let f = ic.base().field().clone();
        let q = f.q();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = (0..ic.n() * ic.m()).map(|_| Some(rng.gen_range(0..q))).collect();
        Grid::from_cells(f, ic.n(), ic.m(), cells).unwrap()
    }

    fn sorted_cells(grids: &[Grid]) -> Vec<Vec<u16>> {
        let mut out: Vec<Vec<u16>> = grids
            .iter()
            .map(|g| g.cells().iter().map(|c| c.unwrap()).collect())
            .collect();
        out.sort();
        out
    }

    fn exhaustive_ball(ic: &InterleavedCode, r: &Grid, budget: usize) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        ic.for_each_grid(&mut |_, g| {
            if row_distance(g, r).unwrap().errors <= budget {
                out.push(g.cells().iter().map(|c| c.unwrap()).collect());
            }
        })
        .unwrap();
        out.sort();
        out
    }

    #[test]
    fn naive_decoder_equals_exhaustive_ball() {
        let ic = InterleavedCode::new(hadamard(2, 2).unwrap(), 2).unwrap();
        for seed in 0..6 {
            let r = random_grid(&ic, seed);
            for num in 0..4i64 {
                let eta = Frac::new(num, 4);
                let (got, _) = decode_naive(&ic, &r, eta).unwrap();
                let budget = floor_mul(eta, ic.n()).unwrap();
                assert_eq!(sorted_cells(&got), exhaustive_ball(&ic, &r, budget));
            }
        }
    }

    #[test]
    fn single_column_degenerates_to_plain_list_decoding() {
        let base = hadamard(2, 3).unwrap();
        let ic = InterleavedCode::new(base.clone(), 1).unwrap();
        let r = random_grid(&ic, 9);
        let (grids, stats) = decode_naive(&ic, &r, Frac::new(3, 8)).unwrap();
        let direct = base.list_decode_brute(&r.col_word(0), 3).unwrap();
        assert_eq!(stats.oracle_calls, 1);
        assert_eq!(grids.len(), direct.len());
        let got: Vec<Vec<u16>> = sorted_cells(&grids);
        let mut want: Vec<Vec<u16>> = direct.into_iter().map(|d| d.codeword).collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn codeword_input_below_half_distance_is_unique() {
        let ic = InterleavedCode::new(hadamard(2, 3).unwrap(), 3).unwrap();
        let planted = ic
            .encode(&[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]])
            .unwrap();
        // delta = 1/2; any radius below 1/4 decodes uniquely.
        let (grids, _) = decode_naive(&ic, &planted, Frac::new(1, 8)).unwrap();
        assert_eq!(grids.len(), 1);
        assert_eq!(grids[0].cells(), planted.cells());
        // A negative radius yields an empty list.
        let (grids, _) = decode_naive(&ic, &planted, Frac::new(-1, 8)).unwrap();
        assert!(grids.is_empty());
    }

    #[test]
    fn tree_on_codeword_input_is_a_single_white_path() {
        let ic = InterleavedCode::new(hadamard(2, 3).unwrap(), 3).unwrap();
        let planted = ic
            .encode(&[vec![1, 1, 0], vec![0, 0, 1], vec![1, 0, 1]])
            .unwrap();
        let t = erase_decode_tree(&ic, &planted, Frac::new(1, 8)).unwrap();
        assert_eq!(t.nodes.len(), 4);
        for node in &t.nodes {
            if node.level < t.m {
                assert_eq!(node.edges.len(), 1);
                assert_eq!(node.edges[0].color, EdgeColor::White);
                assert_eq!(node.edges[0].weight, Frac::from_integer(0));
            }
        }
        let stats = tree_stats(&t);
        assert_eq!(stats.leaves_at_level_m, 1);
        assert_eq!(stats.dead_leaves, 0);
        assert_eq!(stats.white_exclusivity_violations, 0);
        let cands = t.candidates();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].cells(), planted.cells());
    }

    #[test]
    fn tree_rejects_radius_at_the_distance() {
        let ic = InterleavedCode::new(hadamard(2, 3).unwrap(), 2).unwrap();
        let r = random_grid(&ic, 3);
        assert!(matches!(
            erase_decode_tree(&ic, &r, Frac::new(1, 2)),
            Err(Error::RadiusTooLarge { .. })
        ));
        assert!(erase_decode_tree(&ic, &r, Frac::new(-1, 2)).is_err());
    }

    #[test]
    fn tree_color_limits_and_leaf_bound_hold() {
        // delta = 1/2, eta = 3/8: at most ceil(eta/(delta-eta)) = 3 blue
        // and ceil(log2(delta/(delta-eta))) = 2 red edges per path, and at
        // most C(5,2) * l^2 live leaves.
        let base = hadamard(2, 3).unwrap();
        let ic = InterleavedCode::new(base.clone(), 3).unwrap();
        let eta = Frac::new(3, 8);
        let ell = base.max_list_size(3, 0).unwrap();
        assert!(ell.exhaustive);
        for seed in 0..8 {
            let r = if seed % 2 == 0 {
                random_grid(&ic, seed)
            } else {
                let planted = ic.base().random_codeword(seed).unwrap();
                let cols: Vec<Word> = (0..3)
                    .map(|i| base.corrupt(&planted, 1 + i % 2, derive_seed(seed, i as u64)).unwrap())
                    .collect();
                Grid::from_columns(&cols).unwrap()
            };
            let t = erase_decode_tree(&ic, &r, eta).unwrap();
            let stats = tree_stats(&t);
            assert!(stats.max_blue_per_path <= 3, "seed {seed}: {stats:?}");
            assert!(stats.max_red_per_path <= 2, "seed {seed}: {stats:?}");
            assert!(stats.max_blue_out_degree <= 1, "seed {seed}: {stats:?}");
            assert_eq!(stats.white_exclusivity_violations, 0, "seed {seed}");
            let bound = 10 * ell.value * ell.value;
            assert!(stats.leaves_at_level_m <= bound, "seed {seed}: {stats:?}");

            // Every codeword grid in the ball appears among the leaves.
            let (ball, _) = decode_naive(&ic, &r, eta).unwrap();
            let leaves = sorted_cells(&t.candidates());
            for g in sorted_cells(&ball) {
                assert!(leaves.binary_search(&g).is_ok(), "seed {seed}");
            }
        }
    }

    #[test]
    fn naive_work_stays_under_the_quadratic_ceiling() {
        let base = hadamard(2, 3).unwrap();
        let ic = InterleavedCode::new(base, 3).unwrap();
        for seed in 20..26 {
            let r = random_grid(&ic, seed);
            let (_, stats) = decode_naive(&ic, &r, Frac::new(3, 8)).unwrap();
            let m = ic.m() as u64;
            let ell = stats.max_column_list.max(1) as u64;
            let big_l = stats.max_partial_list.max(1) as u64;
            let ceiling = 2 * m * m * ic.n() as u64 * ell * big_l;
            assert!(
                stats.cell_comparisons <= ceiling,
                "comparisons {} exceed ceiling {ceiling}",
                stats.cell_comparisons
            );
            assert_eq!(stats.oracle_calls, ic.m());
        }
    }

    #[test]
    fn lower_witness_yields_two_to_the_m_grids() {
        let code = hadamard(2, 2).unwrap();
        for m in 1..=4 {
            let w = interleave_lower_witness(&code, m).unwrap();
            assert_eq!(w.codewords.len(), 1 << m);
            let mut distinct = sorted_cells(&w.codewords);
            distinct.dedup();
            assert_eq!(distinct.len(), 1 << m);
            for g in &w.codewords {
                let d = row_distance(g, &w.received).unwrap();
                assert!(Frac::new(d.errors as i64, code.n() as i64) <= w.delta);
            }
        }
        assert!(interleave_lower_witness(&code, 0).is_err());
    }

    #[test]
    fn punctured_lists_never_outgrow_the_widened_full_list() {
        let code = hadamard(2, 3).unwrap();
        let rep = puncturing_list_growth_check(&code, 2, 2, 60, 5).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.max_punctured_list >= 1);
        assert!(matches!(
            puncturing_list_growth_check(&code, 4, 1, 5, 0),
            Err(Error::TooManyErasures { .. })
        ));
    }
}
