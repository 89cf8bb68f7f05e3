//! Combinatorial list-size bounds and their verification harnesses.
//!
//! Everything with a closed form is evaluated here: Johnson radii, the
//! blue/red leaf bound for interleaved decoding trees, generalized Hamming
//! weights and their folklore lower bound, the deletion-graph counting
//! argument, advice-sampling sizes for the tensor decoder, and the binary
//! rank-reduction bound family. Radii and weights stay exact rationals;
//! only the analytic formulas themselves use floats. A few strict
//! inequalities get arbitrarily close to ties on dense parameter grids, so
//! the float comparisons have exact big-rational fallbacks.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Display;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::{LinearCode, Word};
use crate::grid::{row_distance, Grid};
use crate::families::InterleavedCode;
use crate::{derive_seed, enum_cap, Error, Frac, Result, ALPHA_EXACT_CAP};

type BigRat = Ratio<BigInt>;

fn big(x: Frac) -> BigRat {
    BigRat::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// A named bound evaluation: inputs as exact strings, outputs as floats,
/// and the formula that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub values: BTreeMap<String, f64>,
    pub formula: String,
}

impl BoundReport {
    fn new(name: &str, formula: &str) -> BoundReport {
        BoundReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            values: BTreeMap::new(),
            formula: formula.to_string(),
        }
    }

    fn param(&mut self, key: &str, v: impl Display) -> &mut Self {
        self.params.insert(key.to_string(), v.to_string());
        self
    }

    fn value(&mut self, key: &str, v: f64) -> &mut Self {
        self.values.insert(key.to_string(), v);
        self
    }
}

// ---------------------------------------------------------------------------
// Johnson radii.

/// Which closed form of the Johnson radius to evaluate. The choice is
/// always explicit because different bounds in this crate rely on
/// different variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JohnsonVariant {
    /// J(d) = 1 - sqrt(1 - d), valid for any alphabet.
    AlphabetFree,
    /// J2(d) = (1 - sqrt(1 - 2d))/2, for binary codes, d <= 1/2.
    Binary,
    /// Jq(d) = (1 - 1/q)(1 - sqrt(1 - qd/(q-1))), d <= 1 - 1/q.
    QAry(u16),
}

/// List-decoding radius guaranteed by distance alone.
pub fn johnson_radius(variant: JohnsonVariant, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::DomainError(format!("distance {delta} outside [0,1]")));
    }
    match variant {
        JohnsonVariant::AlphabetFree => Ok(1.0 - (1.0 - delta).sqrt()),
        JohnsonVariant::Binary => {
            if delta > 0.5 {
                return Err(Error::DomainError(format!(
                    "binary radius needs distance <= 1/2, got {delta}"
                )));
            }
            Ok((1.0 - (1.0 - 2.0 * delta).sqrt()) / 2.0)
        }
        JohnsonVariant::QAry(q) => {
            if q < 2 {
                return Err(Error::DomainError("alphabet size must be at least 2".into()));
            }
            let qf = f64::from(q);
            let cap = 1.0 - 1.0 / qf;
            if delta > cap {
                return Err(Error::DomainError(format!(
                    "q-ary radius needs distance <= 1 - 1/q, got {delta}"
                )));
            }
            Ok(cap * (1.0 - (1.0 - qf * delta / (qf - 1.0)).sqrt()))
        }
    }
}

/// Inverse of the binary Johnson radius: the distance whose radius is eta.
pub fn johnson_binary_inverse(eta: f64) -> f64 {
    2.0 * eta * (1.0 - eta)
}

// ---------------------------------------------------------------------------
// Exact rational comparison helpers.
//
// The strict inequalities checked on dense grids involve square roots, so
// a float evaluation can land within rounding error of a tie. These
// helpers decide the same comparisons exactly by repeated squaring.

/// Decides 1 - sqrt(u) > c exactly, for rational 0 <= u <= 1.
pub fn exact_one_minus_sqrt_gt(u: Frac, c: Frac) -> bool {
    let u = big(u);
    let c = big(c);
    let one = BigRat::one();
    // 1 - sqrt(u) > c  <=>  sqrt(u) < 1 - c.
    let rhs = &one - &c;
    if rhs.is_negative() || rhs.is_zero() {
        return false;
    }
    u < &rhs * &rhs
}

/// Decides a(1 - sqrt(u)) > 1 - sqrt(b) exactly, for rationals with
/// 0 < a <= 1 and 0 <= u, b <= 1.
pub fn exact_scaled_radius_gt(a: Frac, u: Frac, b: Frac) -> bool {
    let a = big(a);
    let u = big(u);
    let b = big(b);
    let one = BigRat::one();
    // a(1 - sqrt(u)) > 1 - sqrt(b)
    //   <=> sqrt(b) > (1 - a) + a sqrt(u)       [rhs nonnegative]
    //   <=> b - (1-a)^2 - a^2 u > 2a(1-a) sqrt(u)
    let oma = &one - &a;
    let c = &b - &oma * &oma - &a * &a * &u;
    if c.is_negative() || c.is_zero() {
        return false;
    }
    let lin = BigRat::from(BigInt::from(2)) * &a * &oma;
    &c * &c > &lin * &lin * u
}

// ---------------------------------------------------------------------------
// Integer helpers.

/// Ceiling of a positive rational.
pub fn ceil_frac(x: Frac) -> i64 {
    let (n, d) = (*x.numer(), *x.denom());
    num::Integer::div_ceil(&n, &d)
}

/// Smallest r >= 0 with 2^r >= x, for positive rational x.
pub fn ceil_log2_frac(x: Frac) -> Result<u32> {
    if x <= Frac::zero() {
        return Err(Error::DomainError(format!("log of non-positive value {x}")));
    }
    let mut r = 0u32;
    let mut pow = BigRat::one();
    let two = BigRat::from(BigInt::from(2));
    let x = big(x);
    while pow < x {
        pow *= &two;
        r += 1;
        if r > 256 {
            return Err(Error::DomainError("log argument too large".into()));
        }
    }
    Ok(r)
}

/// Binomial coefficient, None on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.checked_mul((n - i) as u128)?;
        out /= (i + 1) as u128;
    }
    Some(out)
}

/// Number of r-dimensional subspaces of F_q^k, None on overflow.
pub fn gaussian_binomial(q: u64, k: u32, r: u32) -> Option<u128> {
    if r > k {
        return Some(0);
    }
    // Product over i of (q^(k-i) - 1) / (q^(r-i) - 1); computed as an exact
    // integer by interleaving multiplications and divisions via numerator
    // accumulation in u128 with the denominator applied at the end of each
    // factor pair (each partial ratio is an integer only for the full
    // product, so accumulate numerator and denominator separately in
    // BigInt and convert).
    let q = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..r {
        num *= q.pow(k - i) - 1;
        den *= q.pow(r - i) - 1;
    }
    (num / den).to_u128()
}

// ---------------------------------------------------------------------------
// Interleaved leaf bound.

/// How many leaves a decoding tree can have: C(b+r, r) * l^r with
/// b = ceil(eta/(delta-eta)) and r = ceil(log2(delta/(delta-eta))).
pub fn interleaved_bound(delta: Frac, eta: Frac, ell: u64) -> Result<BoundReport> {
    if !(eta > Frac::zero() && eta < delta && delta <= Frac::one()) {
        return Err(Error::DomainError(format!(
            "need 0 < eta < delta <= 1, got eta={eta}, delta={delta}"
        )));
    }
    let gap = delta - eta;
    let b = ceil_frac(eta / gap) as u64;
    let r = ceil_log2_frac(delta / gap)? as u64;
    let choose = binomial(b + r, r)
        .ok_or_else(|| Error::DomainError("binomial overflow".into()))?;
    let bound = choose
        .checked_mul((ell as u128).pow(r as u32))
        .ok_or_else(|| Error::DomainError("bound overflow".into()))?;
    let mut rep = BoundReport::new(
        "interleaved_leaf_bound",
        "C(b+r, r) * l^r, b = ceil(eta/(delta-eta)), r = ceil(log2(delta/(delta-eta)))",
    );
    rep.param("delta", delta)
        .param("eta", eta)
        .param("l", ell)
        .value("b", b as f64)
        .value("r", r as f64)
        .value("bound", bound as f64);
    Ok(rep)
}

/// Leaf-count recursion t(b, r) = t(b-1, r) + l*t(b, r-1) with t(., 0) = 1
/// and t(b<0, .) = 0, next to its closed form C(b+r, r) * l^r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafCount {
    pub recursion: u128,
    pub closed_form: u128,
}

pub fn tree_leaf_bound(b: u32, r: u32, ell: u64) -> LeafCount {
    fn t(b: i64, r: u32, ell: u128, memo: &mut HashMap<(i64, u32), u128>) -> u128 {
        if b < 0 {
            return 0;
        }
        if r == 0 {
            return 1;
        }
        if let Some(&v) = memo.get(&(b, r)) {
            return v;
        }
        let v = t(b - 1, r, ell, memo) + ell * t(b, r - 1, ell, memo);
        memo.insert((b, r), v);
        v
    }
    let recursion = t(b as i64, r, ell as u128, &mut HashMap::new());
    let closed_form =
        binomial((b + r) as u64, r as u64).unwrap() * (ell as u128).pow(r);
    assert!(
        recursion <= closed_form,
        "recursion {recursion} exceeded closed form {closed_form} at b={b}, r={r}, l={ell}"
    );
    LeafCount { recursion, closed_form }
}

// ---------------------------------------------------------------------------
// Generalized Hamming weights.

fn for_each_combination(k: usize, r: usize, visit: &mut dyn FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..r).collect();
    if r > k {
        return;
    }
    loop {
        visit(&idx);
        // Advance to the next lexicographic combination.
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + k - r {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum relative support size over all r-dimensional subcodes.
///
/// Subspaces are enumerated once each through their canonical reduced
/// row-echelon bases; the support of a subspace is the union of its basis
/// vectors' supports.
pub fn ghw(code: &LinearCode, r: u32) -> Result<Frac> {
    let k = code.k() as u32;
    if r == 0 || r > k {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {r} outside 1..={k}"
        )));
    }
    let q = u64::from(code.field().q());
    let count = gaussian_binomial(q, k, r)
        .ok_or(Error::EnumerationTooLarge { size: u128::MAX, cap: enum_cap() })?;
    if count > u128::from(enum_cap()) {
        return Err(Error::EnumerationTooLarge { size: count, cap: enum_cap() });
    }
    let k = k as usize;
    let r = r as usize;
    let n = code.n();
    let mut best = usize::MAX;
    let mut visited: u128 = 0;
    for_each_combination(k, r, &mut |pivots| {
        // Free cells: row i, columns past its pivot that are not pivots.
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in p + 1..k {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let mut basis = vec![vec![0u16; k]; r];
        for (i, &p) in pivots.iter().enumerate() {
            basis[i][p] = 1;
        }
        let mut digits = vec![0u64; free.len()];
        loop {
            for (d, &(i, j)) in digits.iter().zip(&free) {
                basis[i][j] = *d as u16;
            }
            visited += 1;
            let mut support = vec![false; n];
            for row in &basis {
                let cw = code.encode_elems(row).expect("message length matches k");
                for (s, &c) in support.iter_mut().zip(&cw) {
                    *s |= c != 0;
                }
            }
            let size = support.iter().filter(|&&s| s).count();
            best = best.min(size);
            // Odometer step over the free cells.
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return;
                }
                digits[pos] += 1;
                if digits[pos] < q {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    });
    debug_assert_eq!(visited, count);
    Ok(Frac::new(best as i64, n as i64))
}

/// Folklore lower bound (q/(q-1)) * delta * (1 - q^-r).
pub fn ghw_lower_bound(q: u64, delta: Frac, r: u32) -> Result<Frac> {
    let qr = (q as i64)
        .checked_pow(r)
        .ok_or_else(|| Error::InvalidArgument(format!("q^r overflows at q={q}, r={r}")))?;
    let scale = Frac::new(q as i64, q as i64 - 1);
    Ok(scale * delta * Frac::new(qr - 1, qr))
}

// ---------------------------------------------------------------------------
// Rank vs weight checks.

#[derive(Debug, Clone, Serialize)]
pub struct RankWeightCheck {
    pub rank: usize,
    pub weight: String,
    pub bound: String,
    pub holds: bool,
}

/// Checks that an interleaved codeword grid of rank r has row weight at
/// least the r-th generalized Hamming weight of the base code.
/// `ghw_table[i]` must hold the (i+1)-th weight.
pub fn interleaved_rank_weight_check(
    ghw_table: &[Frac],
    g: &Grid,
) -> Result<RankWeightCheck> {
    let r = g.rank()?;
    if r > ghw_table.len() {
        return Err(Error::InvalidArgument(format!(
            "weight table covers ranks up to {}, grid has rank {r}",
            ghw_table.len()
        )));
    }
    let weight = Frac::new(g.nonzero_row_count() as i64, g.rows() as i64);
    let bound = if r == 0 { Frac::zero() } else { ghw_table[r - 1] };
    Ok(RankWeightCheck {
        rank: r,
        weight: weight.to_string(),
        bound: bound.to_string(),
        holds: weight >= bound,
    })
}

/// Checks that a tensor codeword grid of rank r has cell weight at least
/// 2*delta1*delta2*(1 - 2^-r) (binary instances).
pub fn tensor_rank_weight_check(
    delta1: Frac,
    delta2: Frac,
    g: &Grid,
) -> Result<RankWeightCheck> {
    let r = g.rank()?;
    let cells = (g.rows() * g.cols()) as i64;
    let weight = Frac::new(g.nonzero_cell_count() as i64, cells);
    let bound = if r == 0 {
        Frac::zero()
    } else {
        let pow = 1i64
            .checked_shl(r as u32)
            .filter(|&p| p > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("rank {r} too large")))?;
        Frac::new(2, 1) * delta1 * delta2 * Frac::new(pow - 1, pow)
    };
    Ok(RankWeightCheck {
        rank: r,
        weight: weight.to_string(),
        bound: bound.to_string(),
        holds: weight >= bound,
    })
}

// ---------------------------------------------------------------------------
// Deletion graph.

/// Facts about the graph on a decoded list whose edges join codewords with
/// a "small" difference: list size is at most the independence number
/// times the largest per-vertex count of small codewords near the shifted
/// received word (that count is an upper bound on degree + 1, since the
/// zero codeword always qualifies).
#[derive(Debug, Clone, Serialize)]
pub struct DeletionReport {
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub greedy_independent: usize,
    /// Exact independence number when the graph has at most
    /// [`ALPHA_EXACT_CAP`](crate::ALPHA_EXACT_CAP) vertices.
    pub exact_alpha: Option<usize>,
    /// Max over vertices c of |{c' : small(c'), dist(c', r - c) <= radius}|.
    pub shifted_list_degree: usize,
    /// vertices <= alpha * shifted_list_degree, with exact alpha when
    /// available (None when only the greedy lower bound exists).
    pub product_holds: Option<bool>,
    /// vertices <= alpha_lower * (max_degree + 1); always expected.
    pub cover_holds: bool,
    /// Predicate symmetry under negation, spot-checked.
    pub symmetry_ok: bool,
}

fn analyze_graph(
    n_vertices: usize,
    adj: &[Vec<bool>],
    shifted_list_degree: usize,
    symmetry_ok: bool,
) -> DeletionReport {
    let degree: Vec<usize> = (0..n_vertices)
        .map(|i| adj[i].iter().filter(|&&e| e).count())
        .collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let edges = degree.iter().sum::<usize>() / 2;

    // Greedy independent set: repeatedly take a minimum-degree vertex and
    // discard its neighborhood.
    let mut alive: Vec<bool> = vec![true; n_vertices];
    let mut greedy = 0usize;
    loop {
        let pick = (0..n_vertices)
            .filter(|&i| alive[i])
            .min_by_key(|&i| adj[i].iter().enumerate().filter(|&(j, &e)| e && alive[j]).count());
        let Some(v) = pick else { break };
        greedy += 1;
        alive[v] = false;
        for j in 0..n_vertices {
            if adj[v][j] {
                alive[j] = false;
            }
        }
    }

    let exact_alpha = if n_vertices <= ALPHA_EXACT_CAP {
        let masks: Vec<u64> = (0..n_vertices)
            .map(|i| {
                adj[i]
                    .iter()
                    .enumerate()
                    .filter(|&(_, &e)| e)
                    .fold(0u64, |m, (j, _)| m | 1 << j)
            })
            .collect();
        fn mis(remaining: u64, masks: &[u64]) -> usize {
            if remaining == 0 {
                return 0;
            }
            // Branch on a maximum-degree vertex; once every remaining
            // vertex is isolated they all join the set at once.
            let mut pivot = 0usize;
            let mut best_deg = 0u32;
            let mut scan = remaining;
            let mut first = true;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                let deg = (masks[v] & remaining).count_ones();
                if first || deg > best_deg {
                    pivot = v;
                    best_deg = deg;
                    first = false;
                }
            }
            if best_deg == 0 {
                return remaining.count_ones() as usize;
            }
            let without = mis(remaining & !(1 << pivot), masks);
            let with = 1 + mis(remaining & !(1 << pivot) & !masks[pivot], masks);
            without.max(with)
        }
        Some(mis((1u64 << n_vertices) - 1, &masks))
    } else {
        None
    };

    let alpha_lower = exact_alpha.unwrap_or(greedy);
    DeletionReport {
        vertices: n_vertices,
        edges,
        max_degree,
        greedy_independent: greedy,
        exact_alpha,
        shifted_list_degree,
        product_holds: exact_alpha.map(|a| n_vertices <= a * shifted_list_degree),
        cover_holds: n_vertices <= alpha_lower * (max_degree + 1) || n_vertices == 0,
        symmetry_ok,
    }
}

/// Deletion-graph analysis for a plain code: vertices are the codewords
/// within `radius_errors` of `r`, edges join pairs whose difference the
/// predicate accepts.
pub fn deletion_graph_analyze(
    code: &LinearCode,
    r: &Word,
    radius_errors: usize,
    small: &dyn Fn(&[u16]) -> bool,
    seed: u64,
) -> Result<DeletionReport> {
    let f = code.field();
    let list = code.list_decode_erasures(r, radius_errors)?;
    let words: Vec<Vec<u16>> = list.iter().map(|d| d.codeword.clone()).collect();
    let t = words.len();
    let diff = |a: &[u16], b: &[u16]| -> Vec<u16> {
        a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
    };
    let mut adj = vec![vec![false; t]; t];
    for i in 0..t {
        for j in i + 1..t {
            if small(&diff(&words[i], &words[j])) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    // Spot-check symmetry under negation.
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x5e1f));
    let mut symmetry_ok = true;
    for _ in 0..32.min(t * t) {
        if t < 2 {
            break;
        }
        let i = rng.gen_range(0..t);
        let j = rng.gen_range(0..t);
        if i == j {
            continue;
        }
        let d = diff(&words[i], &words[j]);
        let nd = diff(&words[j], &words[i]);
        if small(&d) != small(&nd) {
            symmetry_ok = false;
        }
    }
    // Per-vertex count of small codewords within the radius of r - c.
    let r_elems: Vec<Option<u16>> = r.symbols().to_vec();
    let mut shifted_max = 0usize;
    for c in &words {
        let mut count = 0usize;
        code.for_each_codeword(&mut |_, cand| {
            if !small(cand) {
                return;
            }
            let mut errs = 0usize;
            for (j, &cv) in cand.iter().enumerate() {
                if let Some(rv) = r_elems[j] {
                    if cv != f.sub(rv, c[j]) {
                        errs += 1;
                    }
                }
            }
            if errs <= radius_errors {
                count += 1;
            }
        })?;
        shifted_max = shifted_max.max(count);
    }
    Ok(analyze_graph(t, &adj, shifted_max, symmetry_ok))
}

/// Deletion-graph analysis in the row metric for interleaved codes.
pub fn deletion_graph_interleaved(
    ic: &InterleavedCode,
    r: &Grid,
    radius_rows: usize,
    small: &dyn Fn(&Grid) -> bool,
    seed: u64,
) -> Result<DeletionReport> {
    let f = ic.base().field().clone();
    let list = ic.list_decode_ball(r, radius_rows)?;
    let t = list.len();
    let diff = |a: &Grid, b: &Grid| -> Grid {
        let cells: Vec<_> = a
            .cells()
            .iter()
            .zip(b.cells())
            .map(|(&x, &y)| Some(f.sub(x.unwrap(), y.unwrap())))
            .collect();
        Grid::from_cells(f.clone(), a.rows(), a.cols(), cells).expect("shapes match")
    };
    let mut adj = vec![vec![false; t]; t];
    for i in 0..t {
        for j in i + 1..t {
            if small(&diff(&list[i], &list[j])) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x5e1f));
    let mut symmetry_ok = true;
    for _ in 0..32.min(t * t) {
        if t < 2 {
            break;
        }
        let i = rng.gen_range(0..t);
        let j = rng.gen_range(0..t);
        if i == j {
            continue;
        }
        if small(&diff(&list[i], &list[j])) != small(&diff(&list[j], &list[i])) {
            symmetry_ok = false;
        }
    }
    let mut shifted_max = 0usize;
    for c in &list {
        let shifted = diff_received(r, c, &f);
        let mut count = 0usize;
        ic.for_each_grid(&mut |_, cand| {
            if !small(cand) {
                return;
            }
            let d = row_distance(cand, &shifted).expect("shapes match");
            if d.errors <= radius_rows {
                count += 1;
            }
        })?;
        shifted_max = shifted_max.max(count);
    }
    Ok(analyze_graph(t, &adj, shifted_max, symmetry_ok))
}

fn diff_received(r: &Grid, c: &Grid, f: &std::sync::Arc<crate::field::Field>) -> Grid {
    let cells: Vec<_> = r
        .cells()
        .iter()
        .zip(c.cells())
        .map(|(&x, &y)| x.map(|xv| f.sub(xv, y.unwrap())))
        .collect();
    Grid::from_cells(f.clone(), r.rows(), r.cols(), cells).expect("shapes match")
}

// ---------------------------------------------------------------------------
// Tensor decoder parameter formulas.

/// Advice sample sizes and the resulting list-size bound for the two-wise
/// tensor decoder, with natural logarithms as the formulas are stated.
pub fn tensor_listsize_formula(
    q: u64,
    delta1: f64,
    ell1: f64,
    ell2: f64,
    eps: f64,
) -> Result<BoundReport> {
    if !(delta1 > 0.0 && ell1 >= 1.0 && ell2 >= 1.0 && eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError("parameters must be positive, eps < 1".into()));
    }
    let m1 = (8.0 * ell1 / eps).ln() / (2.0 * delta1 * delta1);
    let m2 = (8.0 * ell2 / eps).ln() / (2.0 * eps * eps);
    let log2_bound = 2.0 + m1 * m2 * (q as f64).log2();
    let mut rep = BoundReport::new(
        "tensor_advice_bound",
        "m1 = ln(8*l1/eps)/(2*delta1^2), m2 = ln(8*l2/eps)/(2*eps^2), bound = 4*q^(m1*m2)",
    );
    rep.param("q", q)
        .param("delta1", delta1)
        .param("l1", ell1)
        .param("l2", ell2)
        .param("eps", eps)
        .value("m1", m1)
        .value("m2", m2)
        .value("m1_ceil", m1.ceil())
        .value("m2_ceil", m2.ceil())
        .value("log2_bound", log2_bound)
        .value("bound", 4.0 * (q as f64).powf(m1 * m2));
    Ok(rep)
}

/// Iterated doubling bound for repeated tensoring: the exponent recursion
/// s_{k+1} = a s_k^2 against its closed form (a s_0)^m, both in log space.
pub fn repeated_tensor_bound(
    q: u64,
    delta: f64,
    ell: f64,
    eps: f64,
    m: u64,
) -> Result<BoundReport> {
    if !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    if !(delta > 0.0 && delta < 1.0 && ell >= 1.0 && eps > 0.0 && eps < 1.0 && q >= 2) {
        return Err(Error::DomainError("parameters outside the formula's domain".into()));
    }
    let eps_inner = eps * (1.0 - delta * delta) / 3.0;
    let a = (q as f64).ln() / (2.0 * delta * delta * eps_inner * eps_inner);
    let s0 = (4.0 * ell / eps_inner).ln();
    // Iterate ln s_{k+1} = ln a + 2 ln s_k; the closed form in the same
    // space is m*(ln a + ln s0).
    let k = m.trailing_zeros();
    let mut ln_s = s0.ln();
    for _ in 0..k {
        ln_s = a.ln() + 2.0 * ln_s;
    }
    let ln_closed = m as f64 * (a.ln() + s0.ln());
    let mut rep = BoundReport::new(
        "repeated_tensor_recursion",
        "s_{k+1} = a*s_k^2, a = ln(q)/(2*delta^2*eps_inner^2), s_0 = ln(4*l/eps_inner), \
         eps_inner = eps*(1-delta^2)/3; closed form (a*s_0)^m",
    );
    rep.param("q", q)
        .param("delta", delta)
        .param("l", ell)
        .param("eps", eps)
        .param("m", m)
        .value("eps_inner", eps_inner)
        .value("a", a)
        .value("s0", s0)
        .value("iterated_log_exponent", ln_s)
        .value("closed_log_exponent", ln_closed)
        .value("holds", f64::from(u8::from(ln_s <= ln_closed)));
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Binary interleaved bound family.

/// Evaluates the three binary rank-reduction bounds side by side at
/// r = ceil(log2(2/delta^2)), plus the Johnson-driven eps^-2 chain.
/// `ell_fn` supplies a list-size bound at a (possibly negative) rational
/// radius.
pub fn binary_interleaved_bounds(
    delta: Frac,
    eta: Frac,
    eps: Frac,
    ell_fn: &dyn Fn(Frac) -> f64,
) -> Result<Vec<BoundReport>> {
    if !(eta > Frac::zero() && eta < delta && delta <= Frac::new(1, 2)) {
        return Err(Error::DomainError(format!(
            "need 0 < eta < delta <= 1/2, got eta={eta}, delta={delta}"
        )));
    }
    let r = ceil_log2_frac(Frac::new(2, 1) / (delta * delta))?;
    let df = frac_f64(delta);
    let gapf = frac_f64(delta - eta);
    let shifted: Vec<Frac> = (0..r)
        .map(|k| {
            let half = Frac::new(1, 1i64 << k);
            eta - delta * (Frac::one() - half) / Frac::new(2, 1)
        })
        .collect();
    let shifted_ells: Vec<f64> = shifted.iter().map(|&s| ell_fn(s)).collect();
    let sum_log_ells: f64 = shifted_ells.iter().map(|l| l.log2()).sum();
    let rf = f64::from(r);

    // Each form is evaluated in log2 first; the direct value can overflow
    // to infinity at small delta and is reported alongside.
    let mut reports = Vec::new();

    let log2_power = 2.0 - 4.0 * df.log2()
        + rf * (1.0 + ell_fn(eta).log2() - 2.0 * df.log2() - gapf.log2());
    let mut rep = BoundReport::new(
        "binary_interleaved_power_form",
        "(4/delta^4) * (2*l(eta)/(delta^2*(delta-eta)))^r, r = ceil(log2(2/delta^2))",
    );
    rep.param("delta", delta)
        .param("eta", eta)
        .value("r", rf)
        .value("log2_bound", log2_power)
        .value("bound", log2_power.exp2());
    reports.push(rep);

    let log2_product = 2.0 * rf * rf - 4.0 * df.log2() - rf * gapf.log2() + sum_log_ells;
    let mut rep = BoundReport::new(
        "binary_interleaved_product_form",
        "2^(2r^2)/(delta^4*(delta-eta)^r) * prod_k l(eta - delta*(1-2^-k)/2)",
    );
    rep.param("delta", delta)
        .param("eta", eta)
        .value("r", rf)
        .value("log2_bound", log2_product)
        .value("bound", log2_product.exp2());
    reports.push(rep);

    let log2_fixed = rf.log2() + rf + sum_log_ells;
    let mut rep = BoundReport::new(
        "binary_interleaved_fixed_width_form",
        "r*2^r * prod_k l(eta - delta*(1-2^-k)/2)",
    );
    rep.param("delta", delta)
        .param("eta", eta)
        .value("r", rf)
        .value("log2_bound", log2_fixed)
        .value("bound", log2_fixed.exp2());
    reports.push(rep);

    // Johnson chain: with l taken from the gamma^-2 Johnson bound at
    // radius J2(delta) - eps, the product collapses to c_delta * eps^-2.
    let mut log2_c_delta = rf.log2() + rf;
    for k in 1..r {
        let term = df * (1.0 - 2f64.powi(-(k as i32)));
        log2_c_delta += 2.0 - 2.0 * term.log2();
    }
    let epsf = frac_f64(eps);
    let log2_chain = log2_c_delta - 2.0 * epsf.log2();
    let mut rep = BoundReport::new(
        "binary_interleaved_johnson_chain",
        "r*2^r * eps^-2 * prod_{k>=1} 4/(delta^2*(1-2^-k)^2) = c_delta * eps^-2",
    );
    rep.param("delta", delta)
        .param("eps", eps)
        .value("r", rf)
        .value("c_delta", log2_c_delta.exp2())
        .value("log2_bound", log2_chain)
        .value("bound", log2_chain.exp2());
    reports.push(rep);

    Ok(reports)
}

/// Binary tensor analogue: (4/(d1^2 d2^2)) * 2^(4r^2) * eps^-2r * l1^r * l2^r
/// with r = ceil(log2(2/(d1*d2))).
pub fn binary_tensor_bound(
    delta1: Frac,
    delta2: Frac,
    ell1: f64,
    ell2: f64,
    eps: Frac,
) -> Result<BoundReport> {
    let dd = delta1 * delta2;
    if !(dd > Frac::zero() && delta1 <= Frac::new(1, 2) && delta2 <= Frac::new(1, 2)) {
        return Err(Error::DomainError("distances must lie in (0, 1/2]".into()));
    }
    let r = ceil_log2_frac(Frac::new(2, 1) / dd)?;
    let ddf = frac_f64(dd);
    let epsf = frac_f64(eps);
    let log2_bound = (4.0 / (ddf * ddf)).log2()
        + (4 * r * r) as f64
        + f64::from(r) * (ell1.log2() + ell2.log2() - 2.0 * epsf.log2());
    let mut rep = BoundReport::new(
        "binary_tensor_rank_reduction",
        "(4/(delta1^2*delta2^2)) * 2^(4r^2) * eps^-2r * l1^r * l2^r, r = ceil(log2(2/(delta1*delta2)))",
    );
    rep.param("delta1", delta1)
        .param("delta2", delta2)
        .param("eps", eps)
        .value("r", f64::from(r))
        .value("log2_bound", log2_bound)
        .value("bound", 2f64.powf(log2_bound));
    Ok(rep)
}

pub fn frac_f64(x: Frac) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

// ---------------------------------------------------------------------------
// Exact inequality chains behind the binary rank reductions.

#[derive(Debug, Clone, Serialize)]
pub struct ChainCheck {
    pub r: u32,
    pub ghw_step_holds: bool,
    pub radius_step_holds: bool,
}

/// For delta <= 1/2 and r = ceil(log2(2/delta^2)), checks exactly that
/// 2*delta*(1 - 2^-r) >= 2*delta - delta^3 and that the alphabet-free
/// radius of 2*delta - delta^3 strictly exceeds delta + delta^2/2.
pub fn binary_ghw_radius_chain(delta: Frac) -> Result<ChainCheck> {
    if !(delta > Frac::zero() && delta <= Frac::new(1, 2)) {
        return Err(Error::DomainError(format!("need 0 < delta <= 1/2, got {delta}")));
    }
    let r = ceil_log2_frac(Frac::new(2, 1) / (delta * delta))?;
    let two = Frac::new(2, 1);
    let d2 = delta * delta;
    let d3 = d2 * delta;
    // 2d(1 - 2^-r) >= 2d - d^3  <=>  2d * 2^-r <= d^3  <=>  2^r >= 2/d^2.
    let ghw_step = if r < 63 {
        let pow = Frac::new(1i64 << r, 1);
        two * delta * (Frac::one() - Frac::one() / pow) >= two * delta - d3
    } else {
        true
    };
    // 1 - sqrt(1 - (2d - d^3)) > d + d^2/2, decided exactly.
    let mu = two * delta - d3;
    let target = delta + d2 / two;
    let radius_step = exact_one_minus_sqrt_gt(Frac::one() - mu, target);
    Ok(ChainCheck { r, ghw_step_holds: ghw_step, radius_step_holds: radius_step })
}

/// Exact check that the binary radius of 2d - d^2 strictly exceeds
/// d + d^2/2, via the inverse form 2x(1-x) evaluated at x = d + d^2/2.
pub fn binary_inverse_margin_holds(delta: Frac) -> bool {
    let two = Frac::new(2, 1);
    let x = delta + delta * delta / two;
    let inverse = two * x * (Frac::one() - x);
    inverse < two * delta - delta * delta
}

// ---------------------------------------------------------------------------
// Sampling tail check.

#[derive(Debug, Clone, Serialize)]
pub struct SerflingReport {
    pub empirical_tail: f64,
    pub bound: f64,
    pub standard_error: f64,
    pub holds: bool,
}

/// Samples `trials` uniform m-subsets of z without replacement and
/// measures how often the sample mean deviates from the population mean
/// by at least gamma, against the tail bound 2*exp(-2*gamma^2*m).
pub fn serfling_check(
    z: &[f64],
    m: usize,
    gamma: f64,
    trials: u64,
    seed: u64,
) -> Result<SerflingReport> {
    let n = z.len();
    if m == 0 || m > n {
        return Err(Error::SampleTooLarge { m, n });
    }
    let mean: f64 = z.iter().sum::<f64>() / n as f64;
    let mut hits = 0u64;
    let mut indices: Vec<usize> = (0..n).collect();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial));
        // Partial Fisher-Yates: the first m entries become the sample.
        for i in 0..m {
            let j = rng.gen_range(i..n);
            indices.swap(i, j);
        }
        let sample_mean: f64 = indices[..m].iter().map(|&i| z[i]).sum::<f64>() / m as f64;
        if (sample_mean - mean).abs() >= gamma {
            hits += 1;
        }
    }
    let empirical = hits as f64 / trials as f64;
    let bound = 2.0 * (-2.0 * gamma * gamma * m as f64).exp();
    let se = (empirical * (1.0 - empirical) / trials as f64).sqrt();
    Ok(SerflingReport {
        empirical_tail: empirical,
        bound,
        standard_error: se,
        holds: empirical <= bound + 3.0 * se,
    })
}

// ---------------------------------------------------------------------------
// Erasure-halving list bound.

#[derive(Debug, Clone, Serialize)]
pub struct ErasureHalvingReport {
    pub erasures: usize,
    pub errors: usize,
    pub max_list: usize,
    pub reference_list: usize,
    pub bound: usize,
    pub violations: usize,
}

/// Checks that list decoding with e erasures and t errors never yields
/// more than twice the erasure-free maximum list size at radius
/// t + e/2 (integer floor), over sampled erasure patterns and words.
pub fn erasure_halving_check(
    code: &LinearCode,
    erasures: usize,
    errors: usize,
    trials: u64,
    seed: u64,
) -> Result<ErasureHalvingReport> {
    let n = code.n();
    if erasures >= n {
        return Err(Error::InvalidArgument("erasure count must be below the length".into()));
    }
    let reference_radius = errors + erasures / 2;
    let reference = code.max_list_size(reference_radius, derive_seed(seed, 0))?;
    let bound = 2 * reference.value;
    let q = code.field().q();
    let mut max_list = 0usize;
    let mut violations = 0usize;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial + 1));
        let pattern = rand::seq::index::sample(&mut rng, n, erasures);
        let mut symbols: Vec<Option<u16>> =
            (0..n).map(|_| Some(rng.gen_range(0..q))).collect();
        for p in pattern.iter() {
            symbols[p] = None;
        }
        let word = Word::new(code.field().clone(), symbols)?;
        let size = code.list_decode_erasures(&word, errors)?.len();
        max_list = max_list.max(size);
        if size > bound {
            violations += 1;
        }
    }
    Ok(ErasureHalvingReport {
        erasures,
        errors,
        max_list,
        reference_list: reference.value,
        bound,
        violations,
    })
}
