//! Cross-module invariants checked on randomized inputs.
//!
//! Unit tests inside each module pin exact values; the properties here tie
//! the modules together: encoders against decoders, product constructions
//! against their factors, closed-form bounds against brute-force counts.
//! Run with `PROPTEST_CASES=...` to change the case count.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use listlab::bounds::{ghw, johnson_radius, JohnsonVariant};
use listlab::code::{distance, Word};
use listlab::families::{grid_to_word, hadamard, reed_solomon, tensor, word_to_grid, InterleavedCode};
use listlab::field::Field;
use listlab::grid::Grid;
use listlab::interleaved::decode_naive;
use listlab::lintrans::{hadamard_decode_erasures, LinTransform, ReceivedTable};
use listlab::{linalg, Frac};

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

/// A code small enough for exhaustive oracles: Hadamard or Reed-Solomon
/// with a handful of codewords.
fn small_code() -> impl Strategy<Value = listlab::code::LinearCode> {
    prop_oneof![
        (2u64..=3, 2usize..=3).prop_map(|(q, k)| hadamard(q, k).unwrap()),
        (1usize..=3).prop_map(|deg| reed_solomon(5, &[0, 1, 2, 3, 4], deg).unwrap()),
        Just(reed_solomon(7, &[0, 1, 2, 3, 4, 5, 6], 2).unwrap()),
    ]
}

proptest! {
    /// Every field element has an additive inverse and, when nonzero, a
    /// multiplicative one, and multiplication distributes over addition.
    #[test]
    fn field_axioms_hold(q in small_prime(), a in 0u16..13, b in 0u16..13, c in 0u16..13) {
        let f = Field::new(q).unwrap();
        let (a, b, c) = (a % q as u16, b % q as u16, c % q as u16);
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
    }

    /// Encoding is linear: the sum of two codewords is the codeword of the
    /// summed messages.
    #[test]
    fn encoding_is_linear(code in small_code(), seed in any::<u64>()) {
        let f = code.field().clone();
        let q = f.q();
        let mut rng = seed;
        let mut next = || {
            // SplitMix-style scramble, enough to vary the messages.
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 33) as u16 % q
        };
        let a: Vec<u16> = (0..code.k()).map(|_| next()).collect();
        let b: Vec<u16> = (0..code.k()).map(|_| next()).collect();
        let sum: Vec<u16> = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
        let ca = code.encode_elems(&a).unwrap();
        let cb = code.encode_elems(&b).unwrap();
        let cs = code.encode_elems(&sum).unwrap();
        let added: Vec<u16> = ca.iter().zip(&cb).map(|(&x, &y)| f.add(x, y)).collect();
        prop_assert_eq!(cs, added);
    }

    /// Hamming distance with erasures is symmetric, and a word is at
    /// distance zero from itself with all its erasures counted.
    #[test]
    fn distance_is_symmetric(q in small_prime(), pat in prop::collection::vec((0u16..13, 0u16..13, 0u8..4), 1..20)) {
        let f = Arc::new(Field::new(q).unwrap());
        let syms = |side: usize| -> Vec<Option<u16>> {
            pat.iter()
                .map(|&(x, y, e)| {
                    let v = if side == 0 { x } else { y } % q as u16;
                    // Erasure flags: bit 0 erases the left word, bit 1 the right.
                    if e >> side & 1 == 1 { None } else { Some(v) }
                })
                .collect()
        };
        let a = Word::new(f.clone(), syms(0)).unwrap();
        let b = Word::new(f, syms(1)).unwrap();
        let d1 = distance(&a, &b).unwrap();
        let d2 = distance(&b, &a).unwrap();
        prop_assert_eq!(d1, d2);
        let self_d = distance(&a, &a).unwrap();
        prop_assert_eq!(self_d.errors, 0);
        prop_assert_eq!(self_d.erasures, a.erasure_count());
    }

    /// Corrupting a codeword with t errors lands exactly t away, and list
    /// decoding at radius t finds it again.
    #[test]
    fn corruption_is_exact_and_recoverable(code in small_code(), seed in any::<u64>(), t_frac in 0f64..1f64) {
        let w = code.random_codeword(seed).unwrap();
        let t = (t_frac * code.n() as f64) as usize % code.n();
        let noisy = code.corrupt(&w, t, seed ^ 0xABCD).unwrap();
        let d = distance(&w, &noisy).unwrap();
        prop_assert_eq!(d.errors, t);
        prop_assert_eq!(d.erasures, 0);
        let list = code.list_decode_brute(&noisy, t).unwrap();
        prop_assert!(list.iter().any(|dec| dec.codeword == w.elems().unwrap()));
    }

    /// The brute-force list grows monotonically with the radius.
    #[test]
    fn list_is_monotone_in_radius(code in small_code(), seed in any::<u64>(), r1 in 0usize..4, extra in 0usize..4) {
        let w = code.random_codeword(seed).unwrap();
        let noisy = code.corrupt(&w, r1.min(code.n() - 1), seed).unwrap();
        let small = code.list_decode_brute(&noisy, r1).unwrap();
        let large = code.list_decode_brute(&noisy, r1 + extra).unwrap();
        prop_assert!(small.len() <= large.len());
        let big_set: BTreeSet<_> = large.iter().map(|d| d.codeword.clone()).collect();
        for d in &small {
            prop_assert!(big_set.contains(&d.codeword));
        }
    }

    /// Flattening a grid row-major and folding it back is the identity.
    #[test]
    fn grid_word_roundtrip(q in small_prime(), rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let f = Arc::new(Field::new(q).unwrap());
        let mut s = seed;
        let cells: Vec<Option<u16>> = (0..rows * cols)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(99991);
                let v = (s >> 40) as u16 % q as u16;
                if s >> 17 & 7 == 0 { None } else { Some(v) }
            })
            .collect();
        let g = Grid::from_cells(f, rows, cols, cells).unwrap();
        let w = grid_to_word(&g);
        let back = word_to_grid(&w, rows, cols).unwrap();
        prop_assert_eq!(back.cells(), g.cells());
    }

    /// A random tensor codeword has every row in the row factor and every
    /// column in the column factor.
    #[test]
    fn tensor_rows_and_columns_factor(seed in any::<u64>()) {
        let c_col = hadamard(2, 2).unwrap();
        let c_row = hadamard(2, 3).unwrap();
        let t = tensor(&c_col, &c_row).unwrap();
        let w = t.random_codeword(seed).unwrap();
        let g = word_to_grid(&w, c_col.n(), c_row.n()).unwrap();
        for i in 0..g.rows() {
            prop_assert!(c_row.contains(&g.row_word(i)));
        }
        for j in 0..g.cols() {
            prop_assert!(c_col.contains(&g.col_word(j)));
        }
    }

    /// A unique linear-system solution really solves the system, and
    /// consistent systems never report Inconsistent.
    #[test]
    fn solver_solutions_check_out(q in small_prime(), k in 1usize..4, rows in 1usize..5, seed in any::<u64>()) {
        let f = Field::new(q).unwrap();
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(7);
            (s >> 33) as u16 % q as u16
        };
        let a: Vec<Vec<u16>> = (0..rows).map(|_| (0..k).map(|_| next()).collect()).collect();
        let x: Vec<u16> = (0..k).map(|_| next()).collect();
        let b: Vec<u16> = a
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&x)
                    .fold(0u16, |acc, (&av, &xv)| f.add(acc, f.mul(av, xv)))
            })
            .collect();
        match linalg::solve(&f, &a, &b) {
            linalg::SolveOutcome::Unique(sol) => prop_assert_eq!(sol, x),
            linalg::SolveOutcome::Inconsistent => {
                prop_assert!(false, "consistent system reported Inconsistent")
            }
            linalg::SolveOutcome::Underdetermined => {}
        }
    }

    /// The alphabet-free radius sits strictly between half the distance
    /// and the distance itself.
    #[test]
    fn johnson_radius_sits_in_its_range(delta in 0.0001f64..0.9999) {
        let j = johnson_radius(JohnsonVariant::AlphabetFree, delta).unwrap();
        prop_assert!(j > delta / 2.0, "J({delta}) = {j} not above delta/2");
        prop_assert!(j <= delta, "J({delta}) = {j} above delta");
    }

    /// Interleaving columns never changes the row-metric decoder's answer:
    /// the naive decoder equals the exhaustive grid ball.
    #[test]
    fn interleaved_decoder_matches_ball(m in 1usize..3, num in 0i64..3, seed in any::<u64>()) {
        let base = hadamard(2, 2).unwrap();
        let ic = InterleavedCode::new(base.clone(), m).unwrap();
        let eta = Frac::new(num, 8);
        let mut s = seed;
        let cells: Vec<Option<u16>> = (0..ic.n() * m)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(11);
                Some((s >> 50) as u16 & 1)
            })
            .collect();
        let r = Grid::from_cells(base.field().clone(), ic.n(), m, cells).unwrap();
        let (got, _) = decode_naive(&ic, &r, eta).unwrap();
        let radius = (eta * Frac::new(ic.n() as i64, 1)).floor().numer().unsigned_abs() as usize;
        let want = ic.list_decode_ball(&r, radius).unwrap();
        let got_set: BTreeSet<_> = got.iter().map(|g| g.cells().to_vec()).collect();
        let want_set: BTreeSet<_> = want.iter().map(|g| g.cells().to_vec()).collect();
        prop_assert_eq!(got_set, want_set);
    }

    /// A linear transform's truth table evaluated anywhere agrees with
    /// applying the matrix, and each output coordinate traces the matching
    /// point-evaluation codeword.
    #[test]
    fn transform_tables_interleave_point_evaluations(seed in any::<u64>(), k in 2usize..4, m in 1usize..4) {
        let f = Arc::new(Field::new(2).unwrap());
        let mut s = seed;
        let matrix: Vec<Vec<u16>> = (0..k)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(3);
                        (s >> 37) as u16 & 1
                    })
                    .collect()
            })
            .collect();
        let l = LinTransform::new(f.clone(), matrix).unwrap();
        let table = l.table();
        let code = hadamard(2, k).unwrap();
        for i in 0..table.len() {
            let x = table.point(i);
            let y = l.apply(&x);
            prop_assert_eq!(table.entry(i).unwrap(), y.as_slice());
        }
        for j in 0..m {
            let col: Vec<u16> = (0..table.len()).map(|i| table.entry(i).unwrap()[j]).collect();
            let msg: Vec<u16> = l.matrix().iter().map(|row| row[j]).collect();
            prop_assert_eq!(col, code.encode_elems(&msg).unwrap());
        }
    }

    /// Erasure decoding of Hadamard words matches a direct scan that
    /// charges every erasure as a disagreement.
    #[test]
    fn erasure_decoding_matches_direct_scan(k in 2usize..5, seed in any::<u64>(), e_num in 1i64..4) {
        let code = hadamard(2, k).unwrap();
        let eps = Frac::new(e_num, 16);
        let mut s = seed;
        let symbols: Vec<Option<u16>> = (0..code.n())
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(17);
                if s >> 13 & 7 == 0 { None } else { Some((s >> 43) as u16 & 1) }
            })
            .collect();
        let r = Word::new(code.field().clone(), symbols).unwrap();
        let report = hadamard_decode_erasures(&code, &r, eps).unwrap();
        let erasures = r.erasure_count();
        let budget = ((Frac::new(1, 2) - eps) * Frac::new(code.n() as i64, 1)).floor();
        let budget = budget.numer().unsigned_abs() as usize;
        let mut want = Vec::new();
        code.for_each_codeword(&mut |_, cw| {
            let mut disagreements = 0usize;
            for (sym, &cv) in r.symbols().iter().zip(cw) {
                if let Some(rv) = sym {
                    if *rv != cv {
                        disagreements += 1;
                    }
                }
            }
            if disagreements + erasures <= budget {
                want.push(cw.to_vec());
            }
        })
        .unwrap();
        want.sort();
        let mut got: Vec<Vec<u16>> = report.list.iter().map(|d| d.codeword.clone()).collect();
        got.sort();
        prop_assert_eq!(got, want);
    }

    /// Puncturing keeps messages decodable: a punctured codeword lifts
    /// back to the parent codeword it came from.
    #[test]
    fn puncturing_roundtrips_messages(seed in any::<u64>(), drop in 0usize..2) {
        let code = hadamard(2, 3).unwrap();
        let erased: BTreeSet<usize> = (0..=drop).map(|i| (seed as usize + 3 * i) % code.n()).collect();
        let p = code.puncture(&erased).unwrap();
        let w = code.random_codeword(seed).unwrap();
        let kept: Vec<u16> = p.kept.iter().map(|&j| w.elems().unwrap()[j]).collect();
        let pw = Word::from_elems(code.field().clone(), &kept).unwrap();
        let lifted = p.lift(&code, &pw).unwrap();
        prop_assert_eq!(lifted.elems().unwrap(), w.elems().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Weight hierarchies start at the distance and never decrease.
    #[test]
    fn ghw_chain_is_monotone(code in prop_oneof![
        Just(hadamard(2, 3).unwrap()),
        Just(hadamard(3, 2).unwrap()),
        Just(reed_solomon(5, &[0, 1, 2, 3, 4], 2).unwrap()),
    ]) {
        let d1 = ghw(&code, 1).unwrap();
        prop_assert_eq!(d1, code.relative_distance().unwrap());
        let mut prev = d1;
        for r in 2..=code.k() as u32 {
            let dr = ghw(&code, r).unwrap();
            prop_assert!(dr >= prev, "rank {r} weight {dr} below rank {} weight {prev}", r - 1);
            prev = dr;
        }
    }

    /// Fully random received tables decode to the same rank-one list as
    /// the exhaustive ball restricted to rank <= 1.
    #[test]
    fn rank_one_decoding_matches_ball_on_random_tables(seed in any::<u64>()) {
        let f = Arc::new(Field::new(2).unwrap());
        let r = ReceivedTable::random(f, 3, 2, seed).unwrap();
        let eps = Frac::new(1, 8);
        let got = listlab::lintrans::decode_rank1(&r, eps).unwrap();
        let want = listlab::lintrans::exhaustive_ball(&r, Frac::new(1, 2) - eps, Some(1)).unwrap();
        let got_set: BTreeSet<_> = got.iter().map(|l| l.matrix().to_vec()).collect();
        let want_set: BTreeSet<_> = want.iter().map(|l| l.matrix().to_vec()).collect();
        prop_assert_eq!(got_set, want_set);
    }
}
