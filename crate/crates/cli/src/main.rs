//! Command-line front end: code construction, corruption, decoding, bound
//! evaluation, and the named verification experiments.
//!
//! Output is UTF-8 JSON on stdout unless `--out` redirects it; the code
//! and word subcommands emit the plain text file formats that the decode
//! subcommands read back.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use listlab::bounds::{
    ceil_frac, ceil_log2_frac, ghw, ghw_lower_bound, interleaved_bound, johnson_radius,
    repeated_tensor_bound, tensor_listsize_formula, tree_leaf_bound, JohnsonVariant,
};
use listlab::code::LinearCode;
use listlab::families::{hadamard, reed_solomon, tensor, word_to_grid, InterleavedCode};
use listlab::grid::Grid;
use listlab::interleaved::{
    decode_naive, erase_decode_tree, tree_stats, DecodeTree, EdgeColor,
};
use listlab::lintrans::{
    decode_full, decode_rank1, decode_rank1_q, decode_rank2, LinTransform, ReceivedTable,
};
use listlab::tensor::{tensor_decode, AdviceMode, TensorDecodeReport};
use listlab::{derive_seed, floor_mul, Frac};

use listlab_cli::experiments::{self, ExperimentSpec};
use listlab_cli::io;

#[derive(Parser)]
#[command(
    name = "listlab",
    version,
    about = "List-decoding laboratory for interleaved and tensor codes",
    after_help = "The LDLAB_CAP environment variable overrides the brute-force \
                  enumeration cap (default 1048576)."
)]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct and inspect generator-matrix codes.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Apply random errors and erasures to a stored word.
    Corrupt(CorruptArgs),
    /// Run a decoder against a received word, grid, or table.
    #[command(subcommand)]
    Decode(DecodeCmd),
    /// Evaluate closed-form bounds as JSON reports.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Run or list the named verification experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Build a code and emit its generator file.
    #[command(subcommand)]
    Make(MakeCmd),
    /// Summarize a stored code as JSON.
    Info {
        #[arg(long)]
        code: PathBuf,
    },
}

#[derive(Subcommand)]
enum MakeCmd {
    /// All linear forms on F_q^k, evaluated at every point.
    Hadamard {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        /// Override the stored code name.
        #[arg(long)]
        label: Option<String>,
    },
    /// Polynomials of degree below the bound, evaluated at the points.
    Rs {
        #[arg(long)]
        q: u64,
        /// Comma-separated distinct evaluation points.
        #[arg(long, value_delimiter = ',')]
        points: Vec<u16>,
        /// Number of coefficients (degree bound plus one is the dimension).
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        label: Option<String>,
    },
    /// Tensor product; grids have left.n() rows and right.n() columns.
    Tensor {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        label: Option<String>,
    },
}

#[derive(Parser)]
struct CorruptArgs {
    #[arg(long)]
    code: PathBuf,
    /// Erasure-free word to corrupt; its length must match the code.
    #[arg(long)]
    word: PathBuf,
    /// Distinct positions flipped to different symbols.
    #[arg(long, default_value_t = 0)]
    errors: usize,
    /// Distinct positions erased after the errors are applied.
    #[arg(long, default_value_t = 0)]
    erasures: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reshape the output into a grid file with this many rows.
    #[arg(long)]
    rows: Option<usize>,
}

#[derive(Subcommand)]
enum DecodeCmd {
    /// List decode a received grid against an interleaved code.
    Interleaved(InterleavedArgs),
    /// Advice-based list decoding of a tensor-product received grid.
    Tensor(TensorArgs),
    /// Decode a received table of vectors as linear transformations.
    Lintrans(LintransArgs),
}

#[derive(Parser)]
struct InterleavedArgs {
    /// Base code file; the received grid needs one column per interleave.
    #[arg(long)]
    code: PathBuf,
    /// Interleaving multiplicity.
    #[arg(long)]
    m: usize,
    /// Received grid file, n rows by m columns.
    #[arg(long)]
    received: PathBuf,
    /// Relative decoding radius as p/q.
    #[arg(long, value_parser = parse_frac)]
    eta: Frac,
    #[arg(long, value_enum, default_value_t = InterleavedAlgo::Naive)]
    algo: InterleavedAlgo,
    /// Seed for the list-size estimate reported next to the bound.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterleavedAlgo {
    /// Column-by-column decoding with prefix filtering.
    Naive,
    /// Erasure-propagation decoder, dumped as an execution tree.
    Tree,
}

#[derive(Parser)]
struct TensorArgs {
    /// Column code: received grids have left.n() rows.
    #[arg(long)]
    left: PathBuf,
    /// Row code: received grids have right.n() columns.
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    received: PathBuf,
    /// Radius toward the row (right) code, as p/q.
    #[arg(long, value_parser = parse_frac)]
    eta1: Frac,
    /// Radius toward the column (left) code, as p/q.
    #[arg(long, value_parser = parse_frac)]
    eta2: Frac,
    /// Output radius slack, as p/q.
    #[arg(long, value_parser = parse_frac)]
    eps: Frac,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = AdviceArg::Enumerate)]
    mode: AdviceArg,
    /// Codeword grid the planted mode reads its advice from.
    #[arg(long)]
    planted_codeword: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdviceArg {
    /// Try every assignment to the advice window.
    Enumerate,
    /// Read the advice window off a known codeword grid.
    Planted,
}

#[derive(Parser)]
struct LintransArgs {
    /// Field order of the domain and range.
    #[arg(long)]
    q: u64,
    /// Domain dimension; the table file needs q^k rows.
    #[arg(long)]
    k: usize,
    /// Range dimension; the table file needs m columns.
    #[arg(long)]
    m: usize,
    /// Grid file with one row per domain point in counting order; a row
    /// containing * is treated as a fully erased entry.
    #[arg(long)]
    received: PathBuf,
    /// Distance slack: decoding radius is 1 - 1/q - eps (1/2 - eps for
    /// the binary decoders), as p/q.
    #[arg(long, value_parser = parse_frac)]
    eps: Frac,
    #[arg(long, value_enum, default_value_t = RankArg::Full)]
    rank: RankArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankArg {
    /// Binary transforms of rank at most one.
    #[value(name = "1")]
    One,
    /// Binary transforms of rank at most two.
    #[value(name = "2")]
    Two,
    /// Every binary transform within the radius.
    Full,
    /// Rank at most one over any prime field, radius 1 - 1/q - eps.
    #[value(name = "1q")]
    OneQ,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// List-decoding radius guaranteed by distance alone.
    Johnson {
        #[arg(long, value_enum)]
        variant: JohnsonArg,
        /// Alphabet size, required for the q-ary variant.
        #[arg(long)]
        q: Option<u16>,
        #[arg(long)]
        delta: f64,
    },
    /// Interleaved list-size bound from the decode-tree leaf count.
    Interleaved {
        #[arg(long, value_parser = parse_frac)]
        delta: Frac,
        #[arg(long, value_parser = parse_frac)]
        eta: Frac,
        /// Base-code list size at the radius.
        #[arg(long)]
        ell: u64,
    },
    /// Decode-tree leaf recursion against its closed form.
    Leaf {
        /// Blue edges allowed per path.
        #[arg(long)]
        blue: u32,
        /// Red edges allowed per path.
        #[arg(long)]
        red: u32,
        #[arg(long)]
        ell: u64,
    },
    /// Advice-window sizes and list-size bound for the tensor decoder.
    TensorAdvice {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        delta1: f64,
        #[arg(long)]
        ell1: f64,
        #[arg(long)]
        ell2: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Iterated doubling bound for repeated tensoring.
    Repeat {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        eps: f64,
        /// Tensoring order, a power of two.
        #[arg(long)]
        m: u64,
    },
    /// Support weight of r-dimensional subcodes, with the general lower
    /// bound for comparison.
    Ghw {
        #[arg(long)]
        code: PathBuf,
        #[arg(short, long)]
        r: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum JohnsonArg {
    /// 1 - sqrt(1 - delta), any alphabet.
    Free,
    /// (1 - sqrt(1 - 2 delta))/2, binary.
    Binary,
    /// (1 - 1/q)(1 - sqrt(1 - q delta/(q-1))).
    Qary,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run one named experiment and emit its JSON report.
    Run {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the experiment's sweep table as flat CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// List the experiment names with one-line descriptions.
    List,
}

fn parse_frac(s: &str) -> Result<Frac, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: i64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if d == 0 {
        return Err("denominator must be nonzero".into());
    }
    Ok(Frac::new(n, d))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, v: &impl Serialize) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_output(out, &s)
}

fn grid_json(g: &Grid) -> Value {
    let rows: Vec<Vec<Option<u16>>> =
        (0..g.rows()).map(|i| (0..g.cols()).map(|j| g.get(i, j)).collect()).collect();
    json!({
        "q": g.field().q(),
        "rows": g.rows(),
        "cols": g.cols(),
        "cells": rows,
    })
}

fn transform_json(l: &LinTransform) -> Value {
    json!({ "matrix": l.matrix(), "rank": l.rank() })
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Code(c) => run_code(c, &cli.out)?,
        Cmd::Corrupt(a) => run_corrupt(a, &cli.out)?,
        Cmd::Decode(d) => run_decode(d, &cli.out)?,
        Cmd::Bounds(b) => run_bounds(b, &cli.out)?,
        Cmd::Experiment(e) => return run_experiment(e, &cli.out),
    }
    Ok(ExitCode::SUCCESS)
}

fn relabel(code: LinearCode, label: Option<String>) -> anyhow::Result<LinearCode> {
    match label {
        None => Ok(code),
        Some(l) => Ok(LinearCode::new(
            code.field().clone(),
            code.generator().to_vec(),
            l,
        )?),
    }
}

fn run_code(cmd: CodeCmd, out: &Option<PathBuf>) -> anyhow::Result<()> {
    match cmd {
        CodeCmd::Make(make) => {
            let code = match make {
                MakeCmd::Hadamard { q, k, label } => relabel(hadamard(q, k)?, label)?,
                MakeCmd::Rs { q, points, degree, label } => {
                    relabel(reed_solomon(q, &points, degree)?, label)?
                }
                MakeCmd::Tensor { left, right, label } => {
                    let l = io::read_code(&left)?;
                    let r = io::read_code(&right)?;
                    relabel(tensor(&l, &r)?, label)?
                }
            };
            write_output(out, &io::format_code(&code))
        }
        CodeCmd::Info { code } => {
            let c = io::read_code(&code)?;
            let info = json!({
                "label": c.label(),
                "q": c.field().q(),
                "n": c.n(),
                "k": c.k(),
                "codewords": c.codeword_count().to_string(),
                "min_distance": c.min_distance()?,
                "relative_distance": c.relative_distance()?.to_string(),
            });
            emit_json(out, &info)
        }
    }
}

fn run_corrupt(a: CorruptArgs, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let code = io::read_code(&a.code)?;
    let w = io::read_word(&a.word)?;
    if w.erasure_count() > 0 {
        bail!("input word already has erasures; corrupt erasure-free words");
    }
    let mut corrupted = code.corrupt(&w, a.errors, derive_seed(a.seed, 0))?;
    if a.erasures > 0 {
        if a.erasures > corrupted.len() {
            bail!("cannot erase {} of {} positions", a.erasures, corrupted.len());
        }
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(a.seed, 1));
        let positions: BTreeSet<usize> =
            rand::seq::index::sample(&mut rng, corrupted.len(), a.erasures)
                .iter()
                .collect();
        corrupted = corrupted.erase(&positions);
    }
    match a.rows {
        None => write_output(out, &io::format_word(&corrupted)),
        Some(rows) => {
            if rows == 0 || corrupted.len() % rows != 0 {
                bail!("{} symbols do not reshape into {} rows", corrupted.len(), rows);
            }
            let g = word_to_grid(&corrupted, rows, corrupted.len() / rows)?;
            write_output(out, &io::format_grid(&g))
        }
    }
}

fn run_decode(cmd: DecodeCmd, out: &Option<PathBuf>) -> anyhow::Result<()> {
    match cmd {
        DecodeCmd::Interleaved(a) => decode_interleaved_cmd(a, out),
        DecodeCmd::Tensor(a) => decode_tensor_cmd(a, out),
        DecodeCmd::Lintrans(a) => decode_lintrans_cmd(a, out),
    }
}

fn tree_json(t: &DecodeTree, idx: usize) -> Value {
    let node = &t.nodes[idx];
    let edges: Vec<Value> = node
        .edges
        .iter()
        .map(|e| {
            json!({
                "codeword": e.codeword,
                "weight": e.weight.to_string(),
                "color": match e.color {
                    EdgeColor::White => "white",
                    EdgeColor::Blue => "blue",
                    EdgeColor::Red => "red",
                },
                "child": tree_json(t, e.child),
            })
        })
        .collect();
    json!({
        "level": node.level,
        "erased_rows": node.erased.iter().copied().collect::<Vec<usize>>(),
        "mu": node.mu.to_string(),
        "delta_v": node.delta_v.to_string(),
        "edges": edges,
    })
}

fn decode_interleaved_cmd(a: InterleavedArgs, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let code = io::read_code(&a.code)?;
    let grid = io::read_grid(&a.received)?;
    let ic = InterleavedCode::new(code.clone(), a.m)?;
    if grid.rows() != ic.n() || grid.cols() != a.m {
        bail!(
            "received grid is {}x{}, expected {}x{}",
            grid.rows(),
            grid.cols(),
            ic.n(),
            a.m
        );
    }
    let delta = code.relative_distance()?;
    let radius = floor_mul(a.eta, code.n()).unwrap_or(0);
    let ell = code.max_list_size(radius, a.seed)?;
    // The closed-form list bound needs 0 < eta < delta; outside that range
    // the report carries null.
    let bound = if a.eta > Frac::new(0, 1) && a.eta < delta {
        Some(serde_json::to_value(interleaved_bound(delta, a.eta, ell.value as u64)?)?)
    } else {
        None
    };
    match a.algo {
        InterleavedAlgo::Naive => {
            let (list, stats) = decode_naive(&ic, &grid, a.eta)?;
            let report = json!({
                "algo": "naive",
                "code": code.label(),
                "m": a.m,
                "eta": a.eta.to_string(),
                "delta": delta.to_string(),
                "count": list.len(),
                "list": list.iter().map(grid_json).collect::<Vec<_>>(),
                "stats": {
                    "oracle_calls": stats.oracle_calls,
                    "cell_comparisons": stats.cell_comparisons,
                    "max_column_list": stats.max_column_list,
                    "max_partial_list": stats.max_partial_list,
                },
                "base_list_size": { "value": ell.value, "exhaustive": ell.exhaustive },
                "bound": bound,
            });
            emit_json(out, &report)
        }
        InterleavedAlgo::Tree => {
            let tree = erase_decode_tree(&ic, &grid, a.eta)?;
            let st = tree_stats(&tree);
            let gap = delta - a.eta;
            let b = ceil_frac(a.eta / gap) as u32;
            let r = ceil_log2_frac(delta / gap)?;
            let leaf = tree_leaf_bound(b, r, ell.value as u64);
            let candidates = tree.candidates();
            let report = json!({
                "algo": "tree",
                "code": code.label(),
                "m": a.m,
                "eta": a.eta.to_string(),
                "delta": delta.to_string(),
                "count": candidates.len(),
                "list": candidates.iter().map(grid_json).collect::<Vec<_>>(),
                "stats": {
                    "node_count": st.node_count,
                    "leaves_at_level_m": st.leaves_at_level_m,
                    "dead_leaves": st.dead_leaves,
                    "max_blue_out_degree": st.max_blue_out_degree,
                    "white_exclusivity_violations": st.white_exclusivity_violations,
                    "max_blue_per_path": st.max_blue_per_path,
                    "max_red_per_path": st.max_red_per_path,
                },
                "exact_punctured_distances": tree.exact_distances,
                "base_list_size": { "value": ell.value, "exhaustive": ell.exhaustive },
                "leaf_bound": {
                    "blue_per_path": b,
                    "red_per_path": r,
                    "recursion": leaf.recursion.to_string(),
                    "closed_form": leaf.closed_form.to_string(),
                    "leaves_within_bound":
                        (st.leaves_at_level_m as u128) <= leaf.closed_form,
                },
                "bound": bound,
                "tree": tree_json(&tree, 0),
            });
            emit_json(out, &report)
        }
    }
}

fn branch_json(report: &TensorDecodeReport) -> Vec<Value> {
    report
        .branches
        .iter()
        .map(|b| {
            json!({
                "sampled_rows": b.s_rows,
                "sampled_cols": b.t_cols,
                "phase1_success_rows": b.s_success(),
                "phase2_success_cols": b.t_success(),
                "phase3_success_rows": b.u_success(),
                "emitted": b.emitted.is_some(),
            })
        })
        .collect()
}

fn decode_tensor_cmd(a: TensorArgs, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let left = io::read_code(&a.left)?;
    let right = io::read_code(&a.right)?;
    let grid = io::read_grid(&a.received)?;
    let mode = match a.mode {
        AdviceArg::Enumerate => AdviceMode::Enumerate,
        AdviceArg::Planted => {
            let p = a
                .planted_codeword
                .as_ref()
                .context("planted mode needs --planted-codeword")?;
            AdviceMode::Planted(io::read_grid(p)?)
        }
    };
    let report =
        tensor_decode(&right, &left, &grid, a.eta1, a.eta2, a.eps, a.seed, &mode)?;
    let v = json!({
        "left": left.label(),
        "right": right.label(),
        "eta1": a.eta1.to_string(),
        "eta2": a.eta2.to_string(),
        "eps": a.eps.to_string(),
        "eta_star": report.eta_star.to_string(),
        "target_radius": report.target.to_string(),
        "sizes": {
            "m1": report.sizes.m1,
            "m2": report.sizes.m2,
            "capped1": report.sizes.capped1,
            "capped2": report.sizes.capped2,
            "raw_m1": report.sizes.raw_m1,
            "raw_m2": report.sizes.raw_m2,
        },
        "count": report.codewords.len(),
        "codewords": report.codewords.iter().map(grid_json).collect::<Vec<_>>(),
        "branches": branch_json(&report),
    });
    emit_json(out, &v)
}

fn decode_lintrans_cmd(a: LintransArgs, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let grid = io::read_grid(&a.received)?;
    if u64::from(grid.field().q()) != a.q {
        bail!("table file is over GF({}), expected GF({})", grid.field().q(), a.q);
    }
    let expected_rows = (a.q as u128).pow(a.k as u32);
    if grid.rows() as u128 != expected_rows || grid.cols() != a.m {
        bail!(
            "table file is {}x{}, expected {}x{}",
            grid.rows(),
            grid.cols(),
            expected_rows,
            a.m
        );
    }
    let entries: Vec<Option<Vec<u16>>> = (0..grid.rows())
        .map(|i| {
            let row: Option<Vec<u16>> =
                (0..grid.cols()).map(|j| grid.get(i, j)).collect();
            row
        })
        .collect();
    let table = ReceivedTable::new(grid.field().clone(), a.k, a.m, entries)?;
    let eps_f = listlab::bounds::frac_f64(a.eps);
    let (rank_name, list, stats): (&str, Vec<LinTransform>, Option<Value>) = match a.rank {
        RankArg::One => ("1", decode_rank1(&table, a.eps)?, None),
        RankArg::Two => ("2", decode_rank2(&table, a.eps)?, None),
        RankArg::OneQ => ("1q", decode_rank1_q(&table, a.eps)?, None),
        RankArg::Full => {
            let r = decode_full(&table, a.eps)?;
            let stats = json!({
                "oracle_calls": r.stats.oracle_calls,
                "cell_comparisons": r.stats.cell_comparisons,
                "max_column_list": r.stats.max_column_list,
                "max_partial_list": r.stats.max_partial_list,
            });
            ("full", r.transforms, Some(stats))
        }
    };
    let v = json!({
        "q": a.q,
        "k": a.k,
        "m": a.m,
        "eps": a.eps.to_string(),
        "rank": rank_name,
        "count": list.len(),
        "list_times_eps_squared": list.len() as f64 * eps_f * eps_f,
        "transforms": list.iter().map(transform_json).collect::<Vec<_>>(),
        "stats": stats,
    });
    emit_json(out, &v)
}

fn run_bounds(cmd: BoundsCmd, out: &Option<PathBuf>) -> anyhow::Result<()> {
    match cmd {
        BoundsCmd::Johnson { variant, q, delta } => {
            let (v, name) = match variant {
                JohnsonArg::Free => (JohnsonVariant::AlphabetFree, "free".to_string()),
                JohnsonArg::Binary => (JohnsonVariant::Binary, "binary".to_string()),
                JohnsonArg::Qary => {
                    let q = q.context("the q-ary variant needs --q")?;
                    (JohnsonVariant::QAry(q), format!("qary({q})"))
                }
            };
            let radius = johnson_radius(v, delta)?;
            emit_json(out, &json!({ "variant": name, "delta": delta, "radius": radius }))
        }
        BoundsCmd::Interleaved { delta, eta, ell } => {
            emit_json(out, &interleaved_bound(delta, eta, ell)?)
        }
        BoundsCmd::Leaf { blue, red, ell } => {
            let leaf = tree_leaf_bound(blue, red, ell);
            emit_json(
                out,
                &json!({
                    "blue_per_path": blue,
                    "red_per_path": red,
                    "ell": ell,
                    "recursion": leaf.recursion.to_string(),
                    "closed_form": leaf.closed_form.to_string(),
                    "recursion_within_closed_form": leaf.recursion <= leaf.closed_form,
                }),
            )
        }
        BoundsCmd::TensorAdvice { q, delta1, ell1, ell2, eps } => {
            emit_json(out, &tensor_listsize_formula(q, delta1, ell1, ell2, eps)?)
        }
        BoundsCmd::Repeat { q, delta, ell, eps, m } => {
            emit_json(out, &repeated_tensor_bound(q, delta, ell, eps, m)?)
        }
        BoundsCmd::Ghw { code, r } => {
            let c = io::read_code(&code)?;
            let weight = ghw(&c, r)?;
            let delta = c.relative_distance()?;
            let lower = ghw_lower_bound(u64::from(c.field().q()), delta, r)?;
            emit_json(
                out,
                &json!({
                    "code": c.label(),
                    "r": r,
                    "support_weight": weight.to_string(),
                    "lower_bound": lower.to_string(),
                    "meets_lower_bound": weight >= lower,
                }),
            )
        }
    }
}

/// Flattens an array of JSON objects into CSV, one column per key.
fn sweep_csv(rows: &[Value]) -> anyhow::Result<String> {
    let mut keys: BTreeSet<String> = BTreeSet::new();
    for row in rows {
        let obj = row.as_object().context("sweep rows must be objects")?;
        keys.extend(obj.keys().cloned());
    }
    let escape = |s: &str| {
        if s.contains(',') || s.contains('"') || s.contains('\n') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    let mut csv = keys.iter().map(|k| escape(k)).collect::<Vec<_>>().join(",");
    csv.push('\n');
    for row in rows {
        let obj = row.as_object().expect("checked above");
        let line: Vec<String> = keys
            .iter()
            .map(|k| match obj.get(k) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => escape(s),
                Some(v) => escape(&v.to_string()),
            })
            .collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

fn run_experiment(cmd: ExperimentCmd, out: &Option<PathBuf>) -> anyhow::Result<ExitCode> {
    match cmd {
        ExperimentCmd::List => {
            let list: Vec<Value> = experiments::EXPERIMENTS
                .iter()
                .map(|(name, desc)| json!({ "name": name, "description": desc }))
                .collect();
            emit_json(out, &list)?;
            Ok(ExitCode::SUCCESS)
        }
        ExperimentCmd::Run { name, seed, csv } => {
            let report = experiments::run(&ExperimentSpec { name, seed })?;
            if let Some(csv_path) = csv {
                let rows = report
                    .stats
                    .get("sweep")
                    .and_then(|v| v.as_array())
                    .context("this experiment has no sweep table to export")?;
                std::fs::write(&csv_path, sweep_csv(rows)?)
                    .with_context(|| format!("writing {}", csv_path.display()))?;
            }
            emit_json(out, &report)?;
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
