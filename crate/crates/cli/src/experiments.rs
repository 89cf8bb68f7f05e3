//! Named experiments: each one exercises a decoder or a bound end to end
//! and returns a report with PASS/FAIL verdicts.
//!
//! Reports are deterministic for a fixed (name, seed) pair except for the
//! `timestamp` field; every trial derives its randomness from the
//! experiment seed and the trial index, so trials can run in parallel
//! without changing the output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use listlab::bounds::{
    binary_ghw_radius_chain, binary_inverse_margin_holds, ceil_frac, ceil_log2_frac,
    deletion_graph_interleaved, erasure_halving_check, exact_one_minus_sqrt_gt,
    exact_scaled_radius_gt, frac_f64, ghw, ghw_lower_bound, interleaved_rank_weight_check,
    johnson_radius, repeated_tensor_bound, serfling_check, tensor_rank_weight_check,
    tree_leaf_bound, JohnsonVariant,
};
use listlab::code::{LinearCode, Word};
use listlab::families::{hadamard, reed_solomon, tensor, word_to_grid, InterleavedCode};
use listlab::field::Field;
use listlab::grid::{cell_distance, row_distance, Grid};
use listlab::interleaved::{decode_naive, erase_decode_tree, interleave_lower_witness, tree_stats};
use listlab::lintrans::{
    decode_rank1, decode_rank2, exhaustive_ball, hadamard_decode_erasures, rank_decompose,
    weight_profile, LinTransform, ReceivedTable,
};
use listlab::tensor::{tensor_decode, tensor_lower_witness, AdviceMode};
use listlab::{derive_seed, floor_mul, Frac};

/// What to run: an experiment name from [`EXPERIMENTS`] plus the master
/// seed all trial seeds derive from.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub seed: u64,
}

/// One named check inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

/// Wall-clock data, the only part of a report allowed to differ between
/// reruns of the same spec.
#[derive(Debug, Clone, Serialize)]
pub struct Stamp {
    pub unix: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub timestamp: Stamp,
    pub inputs: BTreeMap<String, String>,
    pub stats: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

impl ExperimentReport {
    fn input(&mut self, key: &str, v: impl fmt::Display) {
        self.inputs.insert(key.to_string(), v.to_string());
    }

    fn stat(&mut self, key: &str, v: impl Into<Value>) {
        self.stats.insert(key.to_string(), v.into());
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { check: name.to_string(), pass, detail: detail.into() });
    }
}

/// The spec named an experiment this runner does not know.
#[derive(Debug, Clone)]
pub struct SpecInvalid(pub String);

impl fmt::Display for SpecInvalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid experiment spec: {}", self.0)
    }
}

impl std::error::Error for SpecInvalid {}

/// Every runnable experiment with a one-line description. Order follows
/// the acceptance suite.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    (
        "interleaved-oracle",
        "column decoder equals the exhaustive grid ball across a code/multiplicity/radius sweep",
    ),
    (
        "tree-shape",
        "decode-tree leaf counts stay under the closed-form bound and the edge coloring rules hold",
    ),
    (
        "interleave-witness",
        "repeated-column construction pins 2^m distinct codewords inside the distance ball",
    ),
    (
        "tensor-planted",
        "advice decoder recovers planted tensor codewords; every output is a codeword in the target ball",
    ),
    (
        "tensor-witness",
        "rank-one lifting pushes every base-list member into the tensor list at the scaled radius",
    ),
    (
        "ghw-hadamard",
        "support-weight hierarchy of point-evaluation codes equals 1 - 2^-r and dominates the general lower bound",
    ),
    (
        "rank-weight",
        "codeword grid rank forces the matching row-weight and cell-weight lower bounds",
    ),
    (
        "deletion-graph",
        "decoded-list difference graphs satisfy the independence-number times degree counting bound",
    ),
    (
        "transform-decoders",
        "rank-restricted transform decoders equal exhaustive balls and respect their list-size ceilings",
    ),
    (
        "erasure-lists",
        "erasure halving and the erasure list-size bound hold on sampled patterns",
    ),
    (
        "sampling-tail",
        "subsample mean deviations stay under the exponential tail bound",
    ),
    (
        "radius-analytics",
        "radius range, product comparisons and the doubling recursion hold on dense grids",
    ),
];

/// Wall-clock budgets in seconds for the experiments that carry one.
fn runtime_budget_secs(name: &str) -> Option<u64> {
    match name {
        "interleaved-oracle" => Some(60),
        "tensor-planted" => Some(300),
        "transform-decoders" => Some(120),
        _ => None,
    }
}

/// Runs the named experiment and assembles its report.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport, SpecInvalid> {
    if !EXPERIMENTS.iter().any(|(n, _)| *n == spec.name) {
        return Err(SpecInvalid(format!("unknown experiment name {:?}", spec.name)));
    }
    let start = Instant::now();
    let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut rep = ExperimentReport {
        name: spec.name.clone(),
        seed: spec.seed,
        timestamp: Stamp { unix, elapsed_ms: 0 },
        inputs: BTreeMap::new(),
        stats: BTreeMap::new(),
        verdicts: Vec::new(),
        pass: false,
    };
    match spec.name.as_str() {
        "interleaved-oracle" => interleaved_oracle(spec.seed, &mut rep),
        "tree-shape" => tree_shape(spec.seed, &mut rep),
        "interleave-witness" => interleave_witness(&mut rep),
        "tensor-planted" => tensor_planted(spec.seed, &mut rep),
        "tensor-witness" => tensor_witness(spec.seed, &mut rep),
        "ghw-hadamard" => ghw_hadamard(&mut rep),
        "rank-weight" => rank_weight(spec.seed, &mut rep),
        "deletion-graph" => deletion_graph(spec.seed, &mut rep),
        "transform-decoders" => transform_decoders(spec.seed, &mut rep),
        "erasure-lists" => erasure_lists(spec.seed, &mut rep),
        "sampling-tail" => sampling_tail(spec.seed, &mut rep),
        "radius-analytics" => radius_analytics(&mut rep),
        _ => unreachable!("name validated above"),
    }
    let elapsed = start.elapsed();
    rep.timestamp.elapsed_ms = elapsed.as_millis() as u64;
    if let Some(budget) = runtime_budget_secs(&spec.name) {
        rep.check(
            "runtime within budget",
            elapsed.as_secs() < budget,
            format!("budget {budget} s"),
        );
    }
    rep.pass = rep.verdicts.iter().all(|v| v.pass);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Shared helpers.

fn gf2() -> Arc<Field> {
    Arc::new(Field::new(2).expect("2 is prime"))
}

fn random_grid(f: &Arc<Field>, rows: usize, cols: usize, seed: u64) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = f.q();
    let cells: Vec<Option<u16>> = (0..rows * cols).map(|_| Some(rng.gen_range(0..q))).collect();
    Grid::from_cells(f.clone(), rows, cols, cells).expect("cell count matches the shape")
}

fn random_word(f: &Arc<Field>, n: usize, seed: u64) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = f.q();
    let elems: Vec<u16> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    Word::from_elems(f.clone(), &elems).expect("symbols in range")
}

/// Flips `errors` distinct cells of the grid to different values.
fn corrupt_grid(g: &Grid, errors: usize, seed: u64) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = g.field().q();
    let total = g.rows() * g.cols();
    let mut out = g.clone();
    for idx in rand::seq::index::sample(&mut rng, total, errors).iter() {
        let (i, j) = (idx / g.cols(), idx % g.cols());
        let old = g.get(i, j).expect("corruption needs unerased cells");
        let shift = rng.gen_range(1..q);
        out.set(i, j, Some((old + shift) % q));
    }
    out
}

fn grid_set(grids: &[Grid]) -> BTreeSet<Vec<Option<u16>>> {
    grids.iter().map(|g| g.cells().to_vec()).collect()
}

/// The three base codes the interleaved sweeps run over.
fn sweep_codes() -> Vec<LinearCode> {
    vec![
        hadamard(2, 2).expect("in cap"),
        hadamard(2, 3).expect("in cap"),
        reed_solomon(5, &[0, 1, 2, 3, 4], 1).expect("valid points"),
    ]
}

/// Radii strictly below the code distance: delta scaled by fixed fractions.
fn eta_sweep(delta: Frac) -> Vec<Frac> {
    [Frac::new(1, 4), Frac::new(1, 2), Frac::new(3, 4), Frac::new(7, 8)]
        .iter()
        .map(|&s| s * delta)
        .collect()
}

// ---------------------------------------------------------------------------
// Experiment bodies.

fn interleaved_oracle(seed: u64, rep: &mut ExperimentReport) {
    rep.input("codes", "hadamard(2,2), hadamard(2,3), reed_solomon(GF(5), 5 points, degree 1)");
    rep.input("multiplicities", "1, 2, 3");
    rep.input("grids_per_combo", 100);
    rep.input("radii", "delta * {1/4, 1/2, 3/4, 7/8}");
    let codes = sweep_codes();
    let combos: Vec<(usize, usize)> =
        (0..codes.len()).flat_map(|ci| (1..=3).map(move |m| (ci, m))).collect();

    #[derive(Default)]
    struct Out {
        checks: u64,
        mismatches: u64,
        // One row per radius in sweep order: (eta, largest list seen).
        rows: Vec<(Frac, usize)>,
    }
    let outs: Vec<Out> = combos
        .par_iter()
        .map(|&(ci, m)| {
            let code = &codes[ci];
            let ic = InterleavedCode::new(code.clone(), m).expect("m >= 1");
            let delta = code.relative_distance().expect("computable");
            let mut out = Out {
                rows: eta_sweep(delta).into_iter().map(|eta| (eta, 0)).collect(),
                ..Out::default()
            };
            for trial in 0..100u64 {
                let gseed = derive_seed(seed, (ci as u64 * 4 + m as u64) * 1_000 + trial);
                let r = random_grid(code.field(), ic.n(), m, gseed);
                for row in out.rows.iter_mut() {
                    let eta = row.0;
                    let (got, _) = decode_naive(&ic, &r, eta).expect("oracle in cap");
                    let radius = floor_mul(eta, ic.n()).expect("eta >= 0");
                    let want = ic.list_decode_ball(&r, radius).expect("oracle in cap");
                    out.checks += 1;
                    row.1 = row.1.max(want.len());
                    if grid_set(&got) != grid_set(&want) {
                        out.mismatches += 1;
                    }
                }
            }
            out
        })
        .collect();

    let checks: u64 = outs.iter().map(|o| o.checks).sum();
    let mismatches: u64 = outs.iter().map(|o| o.mismatches).sum();
    let max_list =
        outs.iter().flat_map(|o| o.rows.iter().map(|r| r.1)).max().unwrap_or(0);
    let sweep: Vec<Value> = combos
        .iter()
        .zip(&outs)
        .flat_map(|(&(ci, m), out)| {
            let label = codes[ci].label().to_string();
            out.rows.iter().map(move |&(eta, max)| {
                json!({"code": label, "m": m, "eta": eta.to_string(), "max_list": max})
            })
        })
        .collect();
    rep.stat("comparisons", checks);
    rep.stat("largest_list", max_list);
    rep.stat("sweep", Value::Array(sweep));
    rep.check(
        "decoder output equals the exhaustive ball",
        mismatches == 0,
        format!("{checks} set comparisons, {mismatches} mismatches"),
    );
}

fn tree_shape(seed: u64, rep: &mut ExperimentReport) {
    rep.input("codes", "hadamard(2,2), hadamard(2,3), reed_solomon(GF(5), 5 points, degree 1)");
    rep.input("multiplicities", "1, 2, 3");
    rep.input("grids_per_combo", 100);
    rep.input("radii", "delta * {1/4, 1/2, 3/4, 7/8}");
    let codes = sweep_codes();
    let combos: Vec<(usize, usize)> =
        (0..codes.len()).flat_map(|ci| (1..=3).map(move |m| (ci, m))).collect();

    #[derive(Default)]
    struct Out {
        trees: u64,
        leaf_violations: u64,
        recursion_violations: u64,
        white_violations: u64,
        blue_degree_violations: u64,
        blue_path_violations: u64,
        red_path_violations: u64,
        max_leaves: usize,
    }
    let outs: Vec<Out> = combos
        .par_iter()
        .map(|&(ci, m)| {
            let code = &codes[ci];
            let ic = InterleavedCode::new(code.clone(), m).expect("m >= 1");
            let delta = code.relative_distance().expect("computable");
            let mut out = Out::default();
            // Measured list size and bound parameters, once per radius.
            let per_eta: Vec<(Frac, u32, u32, u128)> = eta_sweep(delta)
                .into_iter()
                .map(|eta| {
                    let radius = floor_mul(eta, code.n()).expect("eta >= 0");
                    let ell = code
                        .max_list_size(radius, derive_seed(seed, 0xE77))
                        .expect("in cap")
                        .value as u64;
                    let gap = delta - eta;
                    let b = ceil_frac(eta / gap) as u32;
                    let r = ceil_log2_frac(delta / gap).expect("positive ratio");
                    let lc = tree_leaf_bound(b, r, ell);
                    if lc.recursion > lc.closed_form {
                        // Counted per tree below via a sentinel bound of 0.
                        return (eta, b, r, 0);
                    }
                    (eta, b, r, lc.closed_form)
                })
                .collect();
            for trial in 0..100u64 {
                let gseed = derive_seed(seed, (ci as u64 * 4 + m as u64) * 1_000 + trial);
                let r = random_grid(code.field(), ic.n(), m, gseed);
                for &(eta, b, rr, bound) in &per_eta {
                    let tree = erase_decode_tree(&ic, &r, eta).expect("radius below distance");
                    let st = tree_stats(&tree);
                    out.trees += 1;
                    out.max_leaves = out.max_leaves.max(st.leaves_at_level_m);
                    if bound == 0 {
                        out.recursion_violations += 1;
                    }
                    if st.leaves_at_level_m as u128 > bound {
                        out.leaf_violations += 1;
                    }
                    if st.white_exclusivity_violations != 0 {
                        out.white_violations += 1;
                    }
                    if st.max_blue_out_degree > 1 {
                        out.blue_degree_violations += 1;
                    }
                    if st.max_blue_per_path > b as usize {
                        out.blue_path_violations += 1;
                    }
                    if st.max_red_per_path > rr as usize {
                        out.red_path_violations += 1;
                    }
                }
            }
            out
        })
        .collect();

    let total = |f: &dyn Fn(&Out) -> u64| outs.iter().map(f).sum::<u64>();
    let trees = total(&|o| o.trees);
    rep.stat("trees", trees);
    rep.stat("max_leaves", outs.iter().map(|o| o.max_leaves).max().unwrap_or(0));
    rep.check(
        "leaf count within the closed-form bound",
        total(&|o| o.leaf_violations) == 0,
        format!("{trees} trees, {} over bound", total(&|o| o.leaf_violations)),
    );
    rep.check(
        "leaf recursion below its closed form",
        total(&|o| o.recursion_violations) == 0,
        "recursion vs C(b+r,r) * l^r",
    );
    rep.check(
        "white edges are only children",
        total(&|o| o.white_violations) == 0,
        format!("{} violations", total(&|o| o.white_violations)),
    );
    rep.check(
        "at most one blue edge per node",
        total(&|o| o.blue_degree_violations) == 0,
        format!("{} violations", total(&|o| o.blue_degree_violations)),
    );
    rep.check(
        "blue edges per path within ceil(eta/(delta-eta))",
        total(&|o| o.blue_path_violations) == 0,
        format!("{} violations", total(&|o| o.blue_path_violations)),
    );
    rep.check(
        "red edges per path within ceil(log2(delta/(delta-eta)))",
        total(&|o| o.red_path_violations) == 0,
        format!("{} violations", total(&|o| o.red_path_violations)),
    );
}

fn interleave_witness(rep: &mut ExperimentReport) {
    rep.input("code", "hadamard(2,2)");
    rep.input("multiplicities", "1, 2, 3, 4");
    let code = hadamard(2, 2).expect("in cap");
    let n = code.n() as i64;
    let mut all_ok = true;
    let mut detail = Vec::new();
    for m in 1..=4usize {
        let w = interleave_lower_witness(&code, m).expect("nontrivial code");
        let distinct: BTreeSet<_> = w.codewords.iter().map(|g| g.cells().to_vec()).collect();
        let within = w
            .codewords
            .iter()
            .filter(|g| {
                let d = row_distance(g, &w.received).expect("shapes match");
                Frac::new(d.errors as i64, n) <= w.delta
            })
            .count();
        let genuine = w.codewords.iter().all(|g| {
            (0..g.cols()).all(|j| code.contains(&g.col_word(j)))
        });
        let ok = distinct.len() >= 1 << m && within == w.codewords.len() && genuine;
        all_ok &= ok;
        detail.push(format!("m={m}: {} distinct within delta", distinct.len()));
    }
    rep.check(
        "at least 2^m distinct codewords within the distance",
        all_ok,
        detail.join("; "),
    );
}

fn tensor_planted(seed: u64, rep: &mut ExperimentReport) {
    let c = hadamard(2, 3).expect("in cap");
    let t = tensor(&c, &c).expect("same field");
    let eta = Frac::new(3, 8);
    let eps = Frac::new(1, 16);
    let delta = c.relative_distance().expect("computable");
    let eta_star = delta * eta;
    let target = eta_star - Frac::new(3, 1) * eps;
    let cells = c.n() * c.n();
    let errors = floor_mul(target, cells).expect("target >= 0");
    let trials: u64 = 400;
    rep.input("code", "hadamard(2,3) tensor hadamard(2,3)");
    rep.input("eta1", eta);
    rep.input("eta2", eta);
    rep.input("eps", eps);
    rep.input("target_radius", target);
    rep.input("planted_errors", errors);
    rep.input("trials", trials);

    struct Out {
        recovered: bool,
        outputs: usize,
        unsound: usize,
    }
    let outs: Vec<Out> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let ts = derive_seed(seed, trial);
            let w = t.random_codeword(derive_seed(ts, 1)).expect("encodable");
            let planted = word_to_grid(&w, c.n(), c.n()).expect("length n^2");
            let received = corrupt_grid(&planted, errors, derive_seed(ts, 2));
            let report = tensor_decode(
                &c,
                &c,
                &received,
                eta,
                eta,
                eps,
                ts,
                &AdviceMode::Planted(planted.clone()),
            )
            .expect("parameters in range");
            let recovered =
                report.codewords.iter().any(|g| g.cells() == planted.cells());
            let mut unsound = 0;
            for g in &report.codewords {
                let d = cell_distance(g, &received).expect("shapes match");
                let within = Frac::new(d.errors as i64, cells as i64) <= report.target;
                let member = (0..g.rows()).all(|i| c.contains(&g.row_word(i)))
                    && (0..g.cols()).all(|j| c.contains(&g.col_word(j)));
                if !(within && member) {
                    unsound += 1;
                }
            }
            Out { recovered, outputs: report.codewords.len(), unsound }
        })
        .collect();

    let recovered = outs.iter().filter(|o| o.recovered).count();
    let unsound: usize = outs.iter().map(|o| o.unsound).sum();
    let outputs: usize = outs.iter().map(|o| o.outputs).sum();
    let freq = recovered as f64 / trials as f64;
    // Guaranteed success probability 1/4, minus three Monte Carlo standard
    // errors at the trial count.
    let threshold = 0.25 - 3.0 * (0.25 * 0.75 / trials as f64).sqrt();
    rep.stat("recovery_frequency", freq);
    rep.stat("threshold", threshold);
    rep.stat("total_outputs", outputs);
    rep.check(
        "planted codeword recovered often enough",
        freq >= threshold,
        format!("{recovered}/{trials} recovered, need frequency >= {threshold:.4}"),
    );
    rep.check(
        "every output is a codeword within the target radius",
        unsound == 0,
        format!("{outputs} outputs, {unsound} unsound"),
    );
}

fn tensor_witness(seed: u64, rep: &mut ExperimentReport) {
    let c = hadamard(2, 3).expect("in cap");
    let eta = Frac::new(1, 4);
    let trials: u64 = 50;
    rep.input("code", "hadamard(2,3)");
    rep.input("eta", eta);
    rep.input("trials", trials);
    let radius = floor_mul(eta, c.n()).expect("eta >= 0");
    let mut ok = 0u64;
    let mut within = 0u64;
    let mut lifted = 0u64;
    let mut max_ball = 0usize;
    for trial in 0..trials {
        let r = random_word(c.field(), c.n(), derive_seed(seed, trial));
        let wit = tensor_lower_witness(&c, &r, eta).expect("erasure-free word");
        let ball = c.list_decode_brute(&r, radius).expect("in cap");
        max_ball = max_ball.max(ball.len());
        let distinct: BTreeSet<_> = wit.codewords.iter().map(|g| g.cells().to_vec()).collect();
        if distinct.len() >= ball.len() {
            ok += 1;
        }
        let cells = (c.n() * c.n()) as i64;
        for g in &wit.codewords {
            lifted += 1;
            let d = cell_distance(g, &wit.received).expect("shapes match");
            if Frac::new(d.errors as i64, cells) <= wit.radius {
                within += 1;
            }
        }
    }
    rep.stat("largest_base_list", max_ball);
    rep.check(
        "lifted list at least as large as the base list",
        ok == trials,
        format!("{ok}/{trials} trials"),
    );
    rep.check(
        "every lifted codeword within the scaled radius",
        within == lifted,
        format!("{within}/{lifted} grids re-verified"),
    );
}

fn ghw_hadamard(rep: &mut ExperimentReport) {
    rep.input("hadamard_range", "k = 1..4, r = 1..k");
    rep.input("lower_bound_instances", "reed_solomon(GF(5), 5 points, degree 2); hadamard(2,2) tensor hadamard(2,2)");
    let mut exact_ok = true;
    let mut details = Vec::new();
    for k in 1..=4usize {
        let code = hadamard(2, k).expect("in cap");
        for r in 1..=k as u32 {
            let got = ghw(&code, r).expect("subspace count in cap");
            let want = Frac::new((1i64 << r) - 1, 1i64 << r);
            if got != want {
                exact_ok = false;
                details.push(format!("k={k}, r={r}: got {got}, want {want}"));
            }
        }
    }
    rep.check(
        "hierarchy equals 1 - 2^-r on point-evaluation codes",
        exact_ok,
        if details.is_empty() { "all k <= 4 exact".to_string() } else { details.join("; ") },
    );

    let mut bound_ok = true;
    let mut bound_details = Vec::new();
    let rs = reed_solomon(5, &[0, 1, 2, 3, 4], 2).expect("valid points");
    let tq = tensor(&hadamard(2, 2).expect("in cap"), &hadamard(2, 2).expect("in cap"))
        .expect("same field");
    for code in [&rs, &tq] {
        let delta = code.relative_distance().expect("computable");
        let q = code.field().q() as u64;
        for r in 1..=code.k() as u32 {
            let got = ghw(code, r).expect("subspace count in cap");
            let lo = ghw_lower_bound(q, delta, r).expect("r >= 1");
            if got < lo {
                bound_ok = false;
                bound_details.push(format!("{}: r={r} weight {got} below {lo}", code.label()));
            }
        }
    }
    rep.check(
        "hierarchy dominates the closed-form lower bound",
        bound_ok,
        if bound_details.is_empty() { "all ranks checked".to_string() } else { bound_details.join("; ") },
    );
}

fn rank_weight(seed: u64, rep: &mut ExperimentReport) {
    let base = hadamard(2, 3).expect("in cap");
    let ic = InterleavedCode::new(base.clone(), 3).expect("m >= 1");
    let table: Vec<Frac> =
        (1..=3).map(|r| ghw(&base, r).expect("subspace count in cap")).collect();
    let trials: u64 = 500;
    rep.input("interleaved", "hadamard(2,3) with multiplicity 3");
    rep.input("tensor", "hadamard(2,2) tensor hadamard(2,3)");
    rep.input("grids_each", trials);

    let row_violations: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial));
            let msgs: Vec<Vec<u16>> = (0..3)
                .map(|_| (0..base.k()).map(|_| rng.gen_range(0..2u16)).collect())
                .collect();
            let g = ic.encode(&msgs).expect("messages fit");
            let check = interleaved_rank_weight_check(&table, &g).expect("rank in table");
            u64::from(!check.holds)
        })
        .sum();

    let c_col = hadamard(2, 2).expect("in cap");
    let c_row = hadamard(2, 3).expect("in cap");
    let t = tensor(&c_col, &c_row).expect("same field");
    let d1 = c_col.relative_distance().expect("computable");
    let d2 = c_row.relative_distance().expect("computable");
    let cell_violations: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let w = t.random_codeword(derive_seed(seed, 10_000 + trial)).expect("encodable");
            let g = word_to_grid(&w, c_col.n(), c_row.n()).expect("length matches");
            let check = tensor_rank_weight_check(d1, d2, &g).expect("rank in range");
            u64::from(!check.holds)
        })
        .sum();

    rep.check(
        "interleaved row weight at least the rank-indexed support weight",
        row_violations == 0,
        format!("{trials} grids, {row_violations} violations"),
    );
    rep.check(
        "tensor cell weight at least 2*d1*d2*(1 - 2^-rank)",
        cell_violations == 0,
        format!("{trials} grids, {cell_violations} violations"),
    );
}

fn deletion_graph(seed: u64, rep: &mut ExperimentReport) {
    let base = hadamard(2, 3).expect("in cap");
    let ic = InterleavedCode::new(base.clone(), 3).expect("m >= 1");
    let radius_rows = floor_mul(Frac::new(1, 4), base.n()).expect("positive");
    let trials: u64 = 50;
    rep.input("instance", "hadamard(2,3) with multiplicity 3 (all linear maps F_2^3 -> F_2^3)");
    rep.input("radius_rows", radius_rows);
    rep.input("predicate", "difference grid has rank <= 2");
    rep.input(
        "instances",
        "25 uniform tables, 25 midpoints of codeword pairs differing by rank 1",
    );

    struct Out {
        product_ok: bool,
        alpha_exact: bool,
        symmetric: bool,
        vertices: usize,
        edges: usize,
    }
    let outs: Vec<Out> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let tseed = derive_seed(seed, trial);
            let g = if trial < 25 {
                random_grid(base.field(), base.n(), 3, tseed)
            } else {
                // Midway between two codewords at row distance 4 whose
                // difference has rank 1, so both land in the list and the
                // graph has at least one edge.
                let mut rng = ChaCha8Rng::seed_from_u64(tseed);
                let msgs: Vec<Vec<u16>> = (0..3)
                    .map(|_| (0..base.k()).map(|_| rng.gen_range(0..2u16)).collect())
                    .collect();
                let a: Vec<u16> =
                    std::iter::repeat_with(|| (0..3).map(|_| rng.gen_range(0..2u16)).collect())
                        .find(|v: &Vec<u16>| v.iter().any(|&x| x != 0))
                        .expect("nonzero triple");
                let v: Vec<u16> =
                    std::iter::repeat_with(|| (0..3).map(|_| rng.gen_range(0..2u16)).collect())
                        .find(|v: &Vec<u16>| v.iter().any(|&x| x != 0))
                        .expect("nonzero triple");
                let msgs2: Vec<Vec<u16>> = msgs
                    .iter()
                    .enumerate()
                    .map(|(j, m)| {
                        m.iter().zip(&a).map(|(&mi, &ai)| mi ^ (ai * v[j])).collect()
                    })
                    .collect();
                let g1 = ic.encode(&msgs).expect("messages fit");
                let g2 = ic.encode(&msgs2).expect("messages fit");
                let differing: Vec<usize> = (0..g1.rows())
                    .filter(|&i| (0..3).any(|j| g1.get(i, j) != g2.get(i, j)))
                    .collect();
                let mut mixed = g1.clone();
                for &i in differing.iter().take(differing.len() / 2) {
                    for j in 0..3 {
                        mixed.set(i, j, g2.get(i, j));
                    }
                }
                mixed
            };
            let report = deletion_graph_interleaved(
                &ic,
                &g,
                radius_rows,
                &|d: &Grid| d.rank().expect("erasure-free") <= 2,
                derive_seed(seed, 5_000 + trial),
            )
            .expect("enumeration in cap");
            Out {
                product_ok: report.product_holds == Some(true),
                alpha_exact: report.exact_alpha.is_some(),
                symmetric: report.symmetry_ok,
                vertices: report.vertices,
                edges: report.edges,
            }
        })
        .collect();

    let max_vertices = outs.iter().map(|o| o.vertices).max().unwrap_or(0);
    let total_edges: usize = outs.iter().map(|o| o.edges).sum();
    rep.stat("max_vertices", max_vertices);
    rep.stat("total_edges", total_edges);
    rep.check(
        "independence number computed exactly",
        outs.iter().all(|o| o.alpha_exact),
        format!("largest list {max_vertices} vertices"),
    );
    rep.check(
        "list size within alpha times shifted degree",
        outs.iter().all(|o| o.product_ok),
        format!("{trials} instances, {total_edges} edges total"),
    );
    rep.check(
        "planted midpoints produce populated graphs",
        outs[25..].iter().all(|o| o.vertices >= 2) && total_edges > 0,
        "both endpoints listed, pairs adjacent",
    );
    rep.check(
        "difference predicate symmetric under negation",
        outs.iter().all(|o| o.symmetric),
        "spot-checked pairs",
    );
}

fn transform_decoders(seed: u64, rep: &mut ExperimentReport) {
    rep.input("shapes", "(k, m) in {2,3,4} x {2,3}");
    rep.input("tables_per_shape", 50);
    rep.input("eps", "1/16, 1/8");
    let f = gf2();
    let shapes: Vec<(usize, usize)> =
        [2usize, 3, 4].iter().flat_map(|&k| [2usize, 3].map(move |m| (k, m))).collect();
    let epss = [Frac::new(1, 16), Frac::new(1, 8)];

    struct Out {
        rank1_mismatches: u64,
        rank2_mismatches: u64,
        rank1_over: u64,
        rank2_over: u64,
        max_rank2_list: usize,
    }
    let outs: Vec<Out> = shapes
        .par_iter()
        .map(|&(k, m)| {
            let mut out = Out {
                rank1_mismatches: 0,
                rank2_mismatches: 0,
                rank1_over: 0,
                rank2_over: 0,
                max_rank2_list: 0,
            };
            for (ei, &eps) in epss.iter().enumerate() {
                let radius = Frac::new(1, 2) - eps;
                // Exact ceilings: 1/(2 eps^2) and 101/eps^2.
                let cap1 = Frac::new(1, 2) / (eps * eps);
                let cap2 = Frac::new(101, 1) / (eps * eps);
                for trial in 0..50u64 {
                    let tseed = derive_seed(
                        seed,
                        ((k as u64 * 8 + m as u64) * 4 + ei as u64) * 1_000 + trial,
                    );
                    let r = ReceivedTable::random(f.clone(), k, m, tseed)
                        .expect("table in cap");
                    let ball = exhaustive_ball(&r, radius, None).expect("in cap");
                    let want1: BTreeSet<_> = ball
                        .iter()
                        .filter(|l| l.rank() <= 1)
                        .map(|l| l.matrix().to_vec())
                        .collect();
                    let want2: BTreeSet<_> = ball
                        .iter()
                        .filter(|l| l.rank() <= 2)
                        .map(|l| l.matrix().to_vec())
                        .collect();
                    let got1 = decode_rank1(&r, eps).expect("eps positive");
                    let got2 = decode_rank2(&r, eps).expect("eps positive");
                    let got1_set: BTreeSet<_> =
                        got1.iter().map(|l| l.matrix().to_vec()).collect();
                    let got2_set: BTreeSet<_> =
                        got2.iter().map(|l| l.matrix().to_vec()).collect();
                    out.rank1_mismatches += u64::from(got1_set != want1);
                    out.rank2_mismatches += u64::from(got2_set != want2);
                    out.rank1_over +=
                        u64::from(Frac::new(got1.len() as i64, 1) > cap1);
                    out.rank2_over +=
                        u64::from(Frac::new(got2.len() as i64, 1) > cap2);
                    out.max_rank2_list = out.max_rank2_list.max(got2.len());
                }
            }
            out
        })
        .collect();

    let r1_mis: u64 = outs.iter().map(|o| o.rank1_mismatches).sum();
    let r2_mis: u64 = outs.iter().map(|o| o.rank2_mismatches).sum();
    let r1_over: u64 = outs.iter().map(|o| o.rank1_over).sum();
    let r2_over: u64 = outs.iter().map(|o| o.rank2_over).sum();
    rep.stat("max_rank2_list", outs.iter().map(|o| o.max_rank2_list).max().unwrap_or(0));
    rep.check(
        "rank-1 decoder equals the rank-filtered ball",
        r1_mis == 0,
        format!("600 tables, {r1_mis} mismatches"),
    );
    rep.check(
        "rank-2 decoder equals the rank-filtered ball",
        r2_mis == 0,
        format!("600 tables, {r2_mis} mismatches"),
    );
    rep.check(
        "rank-1 list within 1/(2 eps^2)",
        r1_over == 0,
        format!("{r1_over} over the ceiling"),
    );
    rep.check(
        "rank-2 list within 101/eps^2",
        r2_over == 0,
        format!("{r2_over} over the ceiling"),
    );

    // Exact table weights on the row span of 200 random transforms.
    let weight_violations: u64 = (0..200u64)
        .into_par_iter()
        .map(|trial| {
            let shapes = [(3usize, 2usize), (3, 3), (4, 2), (4, 3)];
            let (k, m) = shapes[(trial % 4) as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 77_000 + trial));
            let matrix: Vec<Vec<u16>> = (0..k)
                .map(|_| (0..m).map(|_| rng.gen_range(0..2u16)).collect())
                .collect();
            let l = LinTransform::new(f.clone(), matrix).expect("shape valid");
            let (rank, _, vs) = rank_decompose(&l);
            let table = l.table();
            let want = Frac::new(1, 1i64 << rank);
            let mut bad = 0u64;
            // Every span member, zero included, via basis masks.
            for mask in 0u32..1 << rank {
                let mut v = vec![0u16; m];
                for (bi, basis) in vs.iter().enumerate() {
                    if mask >> bi & 1 == 1 {
                        for (vv, &bv) in v.iter_mut().zip(basis) {
                            *vv ^= bv;
                        }
                    }
                }
                if weight_profile(&table, &v).expect("length matches") != want {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    rep.check(
        "table weight exactly 2^-rank across the row span",
        weight_violations == 0,
        format!("200 transforms, {weight_violations} deviations"),
    );
}

fn erasure_lists(seed: u64, rep: &mut ExperimentReport) {
    // Halving: erasures cost half an error each against the reference list.
    let code = hadamard(2, 4).expect("in cap");
    let configs = [(2usize, 2usize), (4, 2), (4, 3), (6, 1)];
    rep.input("halving_code", "hadamard(2,4)");
    rep.input("halving_configs", "(erasures, errors) in {(2,2), (4,2), (4,3), (6,1)}, 50 patterns each");
    let halving: Vec<(usize, usize, u64, usize, usize)> = configs
        .par_iter()
        .enumerate()
        .map(|(i, &(e, t))| {
            let r = erasure_halving_check(&code, e, t, 50, derive_seed(seed, i as u64))
                .expect("erasures below length");
            (e, t, r.violations as u64, r.max_list, r.bound)
        })
        .collect();
    let halving_violations: u64 = halving.iter().map(|h| h.2).sum();
    rep.stat(
        "sweep",
        Value::Array(
            halving
                .iter()
                .map(|&(e, t, v, max, bound)| {
                    json!({"erasures": e, "errors": t, "violations": v, "max_list": max, "bound": bound})
                })
                .collect(),
        ),
    );
    rep.check(
        "erasure list within twice the half-weighted reference",
        halving_violations == 0,
        format!("200 patterns, {halving_violations} violations"),
    );

    // Erasure list bound on point-evaluation codes up to k = 10.
    rep.input("list_bound_trials", 200);
    rep.input("list_bound_range", "k = 2..10, eps in {1/16, 1/8, 3/16}");
    let codes: Vec<LinearCode> =
        (2..=10).map(|k| hadamard(2, k).expect("in cap")).collect();
    let epss = [Frac::new(1, 16), Frac::new(1, 8), Frac::new(3, 16)];
    struct Out {
        violation: bool,
        list: usize,
    }
    let outs: Vec<Out> = (0..200u64)
        .into_par_iter()
        .map(|trial| {
            let code = &codes[(trial % 9) as usize];
            let eps = epss[((trial / 9) % 3) as usize];
            let n = code.n();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 33_000 + trial));
            let erasures = rng.gen_range(0..=n / 4);
            let mut symbols: Vec<Option<u16>> =
                (0..n).map(|_| Some(rng.gen_range(0..2u16))).collect();
            for p in rand::seq::index::sample(&mut rng, n, erasures).iter() {
                symbols[p] = None;
            }
            let w = Word::new(code.field().clone(), symbols).expect("symbols in range");
            let report = hadamard_decode_erasures(code, &w, eps).expect("binary code");
            let violation = report.bound_checked
                && Frac::new(report.list.len() as i64, 1) > report.bound;
            Out { violation, list: report.list.len() }
        })
        .collect();
    let bound_violations = outs.iter().filter(|o| o.violation).count();
    rep.stat("largest_erasure_list", outs.iter().map(|o| o.list).max().unwrap_or(0));
    rep.check(
        "erasure list within 2/(mu + 2 eps)^2",
        bound_violations == 0,
        format!("200 trials, {bound_violations} violations"),
    );
}

fn sampling_tail(seed: u64, rep: &mut ExperimentReport) {
    let z: Vec<f64> = (0..1_000).map(|i| f64::from(i % 2)).collect();
    let gammas = [0.1f64, 0.2, 0.3];
    let ms = [25usize, 50, 100];
    let trials: u64 = 10_000;
    rep.input("population", "1000 alternating zeros and ones");
    rep.input("gammas", "0.1, 0.2, 0.3");
    rep.input("sample_sizes", "25, 50, 100");
    rep.input("trials_each", trials);
    let combos: Vec<(f64, usize)> =
        gammas.iter().flat_map(|&g| ms.map(move |m| (g, m))).collect();
    let results: Vec<(f64, usize, f64, f64, bool)> = combos
        .par_iter()
        .enumerate()
        .map(|(i, &(gamma, m))| {
            let r = serfling_check(&z, m, gamma, trials, derive_seed(seed, i as u64))
                .expect("m below population size");
            (gamma, m, r.empirical_tail, r.bound, r.holds)
        })
        .collect();
    rep.stat(
        "sweep",
        Value::Array(
            results
                .iter()
                .map(|&(g, m, tail, bound, _)| {
                    json!({"gamma": g, "m": m, "empirical": tail, "bound": bound})
                })
                .collect(),
        ),
    );
    let holds = results.iter().all(|r| r.4);
    rep.check(
        "empirical tail within bound plus three standard errors",
        holds,
        format!("{} combinations", results.len()),
    );
}

/// Strict float comparison with an exact fallback when the two sides are
/// within the grid tolerance of each other.
fn gt_with_fallback(lhs: f64, rhs: f64, exact: impl FnOnce() -> bool) -> bool {
    if (lhs - rhs).abs() <= 1e-12 {
        exact()
    } else {
        lhs > rhs
    }
}

fn radius_analytics(rep: &mut ExperimentReport) {
    rep.input("grid", "delta = i/1000 over each variant's domain");
    rep.input("tolerance", "1e-12 absolute, exact rationals at ties");

    // Range delta/2 < J <= delta for each variant on its domain.
    let mut range_checks = 0u64;
    let mut range_violations = 0u64;
    for i in 1..1_000i64 {
        let delta = Frac::new(i, 1_000);
        let d = frac_f64(delta);
        let half = d / 2.0;
        let mut run_one = |j: f64, above: bool, below: bool| {
            range_checks += 1;
            if !(above && below) {
                range_violations += 1;
            }
            let _ = j;
        };
        let j = johnson_radius(JohnsonVariant::AlphabetFree, d).expect("domain");
        run_one(
            j,
            gt_with_fallback(j, half, || {
                exact_one_minus_sqrt_gt(Frac::new(1, 1) - delta, delta / Frac::new(2, 1))
            }),
            !gt_with_fallback(j, d, || exact_one_minus_sqrt_gt(Frac::new(1, 1) - delta, delta)),
        );
        if i <= 500 {
            let j2 = johnson_radius(JohnsonVariant::Binary, d).expect("domain");
            // J2 > delta/2 iff 1 - sqrt(1 - 2 delta) > delta.
            let u = Frac::new(1, 1) - Frac::new(2, 1) * delta;
            run_one(
                j2,
                gt_with_fallback(j2, half, || exact_one_minus_sqrt_gt(u, delta)),
                !gt_with_fallback(j2, d, || {
                    exact_one_minus_sqrt_gt(u, Frac::new(2, 1) * delta)
                }),
            );
        }
        if i <= 666 {
            let j3 = johnson_radius(JohnsonVariant::QAry(3), d).expect("domain");
            // J3 = a(1 - sqrt(u)) with a = 2/3, u = 1 - 3 delta/2; compare
            // against c by dividing c through a.
            let a = Frac::new(2, 3);
            let u = Frac::new(1, 1) - Frac::new(3, 2) * delta;
            run_one(
                j3,
                gt_with_fallback(j3, half, || {
                    exact_one_minus_sqrt_gt(u, delta / Frac::new(2, 1) / a)
                }),
                !gt_with_fallback(j3, d, || exact_one_minus_sqrt_gt(u, delta / a)),
            );
        }
    }
    rep.stat("range_checks", range_checks);
    rep.check(
        "radius lies in (delta/2, delta] for every variant",
        range_violations == 0,
        format!("{range_checks} evaluations, {range_violations} violations"),
    );

    // Convexity of the alphabet-free radius under products.
    let mut convexity_violations = 0u64;
    for i in 1..32i64 {
        for j in 1..32i64 {
            let d1 = Frac::new(i, 32);
            let d2 = Frac::new(j, 32);
            let prod = d1 * d2;
            let j_prod = johnson_radius(JohnsonVariant::AlphabetFree, frac_f64(prod))
                .expect("domain");
            let lhs1 = frac_f64(d1)
                * johnson_radius(JohnsonVariant::AlphabetFree, frac_f64(d2)).expect("domain");
            let lhs2 = frac_f64(d2)
                * johnson_radius(JohnsonVariant::AlphabetFree, frac_f64(d1)).expect("domain");
            let one = Frac::new(1, 1);
            let ok1 = gt_with_fallback(lhs1, j_prod, || {
                exact_scaled_radius_gt(d1, one - d2, one - prod)
            });
            let ok2 = gt_with_fallback(lhs2, j_prod, || {
                exact_scaled_radius_gt(d2, one - d1, one - prod)
            });
            if !(ok1 && ok2) {
                convexity_violations += 1;
            }
        }
    }
    rep.check(
        "product radius below both scaled radii",
        convexity_violations == 0,
        format!("961 pairs, {convexity_violations} violations"),
    );

    // Scaled power comparison: delta^(m-1) J(delta) > J(delta^m).
    let mut power_violations = 0u64;
    let mut power_checks = 0u64;
    for m in 2..=4u32 {
        for i in 1..1_000i64 {
            let delta = Frac::new(i, 1_000);
            let d = frac_f64(delta);
            let mut scale = Frac::new(1, 1);
            for _ in 1..m {
                scale *= delta;
            }
            let powm = scale * delta;
            let lhs = frac_f64(scale)
                * johnson_radius(JohnsonVariant::AlphabetFree, d).expect("domain");
            let rhs = johnson_radius(JohnsonVariant::AlphabetFree, frac_f64(powm))
                .expect("domain");
            let one = Frac::new(1, 1);
            power_checks += 1;
            if !gt_with_fallback(lhs, rhs, || {
                exact_scaled_radius_gt(scale, one - delta, one - powm)
            }) {
                power_violations += 1;
            }
        }
    }
    rep.check(
        "scaled radius beats the radius of the power",
        power_violations == 0,
        format!("{power_checks} evaluations, {power_violations} violations"),
    );

    // Doubling recursion against its closed form: a dense distance grid
    // at one parameter point, plus a coarse sweep across the others.
    let mut recursion_violations = 0u64;
    let mut recursion_checks = 0u64;
    let mut recursion_point = |delta: f64, ell: f64, eps: f64, m: u64| {
        let report =
            repeated_tensor_bound(2, delta, ell, eps, m).expect("parameters in domain");
        let iterated = report.values["iterated_log_exponent"];
        let closed = report.values["closed_log_exponent"];
        recursion_checks += 1;
        if iterated > closed + 1e-12 {
            recursion_violations += 1;
        }
    };
    for i in 1..1_000i64 {
        recursion_point(i as f64 / 1_000.0, 4.0, 0.05, 4);
    }
    for di in 1..=9u32 {
        let delta = f64::from(di) / 20.0;
        for &eps in &[0.05f64, 0.1] {
            for &ell in &[1.0f64, 4.0] {
                for &m in &[2u64, 4, 8] {
                    recursion_point(delta, ell, eps, m);
                }
            }
        }
    }
    rep.check(
        "iterated recursion within its closed form",
        recursion_violations == 0,
        format!("{recursion_checks} parameter points, {recursion_violations} violations"),
    );

    // Exact inequality chains at half-distance scales.
    let mut chain_violations = 0u64;
    for i in 1..=500i64 {
        let delta = Frac::new(i, 1_000);
        let chain = binary_ghw_radius_chain(delta).expect("domain");
        if !(chain.ghw_step_holds && chain.radius_step_holds) {
            chain_violations += 1;
        }
        if !binary_inverse_margin_holds(delta) {
            chain_violations += 1;
        }
    }
    rep.check(
        "rank-weight radius chain holds at every half-scale distance",
        chain_violations == 0,
        format!("500 grid points, {chain_violations} violations"),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_is_rejected() {
        let err = run(&ExperimentSpec { name: "no-such-thing".into(), seed: 0 }).unwrap_err();
        assert!(err.to_string().contains("no-such-thing"));
    }

    #[test]
    fn catalog_names_are_unique_and_runnable() {
        let names: BTreeSet<_> = EXPERIMENTS.iter().map(|(n, _)| *n).collect();
        assert_eq!(names.len(), EXPERIMENTS.len());
    }

    #[test]
    fn reports_are_deterministic_modulo_timestamp() {
        let spec = ExperimentSpec { name: "interleave-witness".into(), seed: 7 };
        let strip = |r: &ExperimentReport| {
            let mut v = serde_json::to_value(r).unwrap();
            v.as_object_mut().unwrap().remove("timestamp");
            v
        };
        let a = run(&spec).unwrap();
        let b = run(&spec).unwrap();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn witness_experiment_passes() {
        let rep = run(&ExperimentSpec { name: "interleave-witness".into(), seed: 3 }).unwrap();
        assert!(rep.pass, "verdicts: {:?}", rep.verdicts);
    }
}
