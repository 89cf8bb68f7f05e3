//! Acceptance suite: one test per verification criterion, each driving a
//! named experiment end to end at a fixed seed and printing its verdict
//! line (visible with `cargo test -- --nocapture`).

use listlab_cli::experiments::{run, ExperimentSpec};

const SEED: u64 = 42;

fn criterion(number: u32, name: &str) {
    let rep = run(&ExperimentSpec { name: name.into(), seed: SEED }).expect("cataloged name");
    let status = if rep.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {number:02} {name}: {status} ({} ms)",
        rep.timestamp.elapsed_ms
    );
    for v in &rep.verdicts {
        let mark = if v.pass { "ok" } else { "FAIL" };
        println!("  [{mark}] {} -- {}", v.check, v.detail);
    }
    assert!(rep.pass, "criterion {number:02} {name} failed: {:#?}", rep.verdicts);
}

#[test]
fn criterion_01_column_decoder_equals_exhaustive_ball() {
    criterion(1, "interleaved-oracle");
}

#[test]
fn criterion_02_decode_tree_leaf_bound_and_coloring() {
    criterion(2, "tree-shape");
}

#[test]
fn criterion_03_interleaving_list_size_witness() {
    criterion(3, "interleave-witness");
}

#[test]
fn criterion_04_tensor_planted_recovery_and_soundness() {
    criterion(4, "tensor-planted");
}

#[test]
fn criterion_05_tensor_list_size_witness() {
    criterion(5, "tensor-witness");
}

#[test]
fn criterion_06_support_weight_hierarchy() {
    criterion(6, "ghw-hadamard");
}

#[test]
fn criterion_07_rank_forces_weight() {
    criterion(7, "rank-weight");
}

#[test]
fn criterion_08_deletion_graph_counting_bound() {
    criterion(8, "deletion-graph");
}

#[test]
fn criterion_09_transform_decoders_match_balls() {
    criterion(9, "transform-decoders");
}

#[test]
fn criterion_10_erasure_halving_and_list_bound() {
    criterion(10, "erasure-lists");
}

#[test]
fn criterion_11_subsample_tail_bound() {
    criterion(11, "sampling-tail");
}

#[test]
fn criterion_12_radius_analytics() {
    criterion(12, "radius-analytics");
}

#[test]
fn reports_reproduce_byte_identically_modulo_timestamp() {
    // Two runs of the same spec must serialize identically once the
    // timestamp object is removed.
    for (name, _) in listlab_cli::experiments::EXPERIMENTS {
        if matches!(*name, "interleaved-oracle" | "tensor-planted" | "transform-decoders") {
            // The heavy experiments are covered by their criterion runs;
            // rerunning them twice here would dominate the suite.
            continue;
        }
        let spec = ExperimentSpec { name: (*name).into(), seed: 7 };
        let strip = |r: &listlab_cli::experiments::ExperimentReport| {
            let mut v = serde_json::to_value(r).expect("serializable");
            v.as_object_mut().expect("object").remove("timestamp");
            serde_json::to_string(&v).expect("serializable")
        };
        let a = strip(&run(&spec).expect("cataloged name"));
        let b = strip(&run(&spec).expect("cataloged name"));
        assert_eq!(a, b, "report for {name} not reproducible");
    }
}
