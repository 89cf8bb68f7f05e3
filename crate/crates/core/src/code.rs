//! Linear codes given by generator matrices, with brute-force oracles.
//!
//! A [`Word`] is a vector of symbols over GF(q), any of which may be an
//! erasure. Distances follow one convention everywhere: errors are counted
//! on positions where both words are unerased, and positions erased in
//! either word are reported separately as erasures.
//!
//! Decoding lists are deterministic: sorted by error count, ties broken by
//! message in lexicographic order (equivalently, by message index, where
//! message digit 0 is the most significant base-q digit of the index).
//!
//! All exhaustive operations respect [`crate::enum_cap`].

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::linalg::{self, SolveOutcome};
use crate::{enum_cap, Error, Frac, Result};

/// One position of a word: a field element, or `None` for an erasure.
pub type Symbol = Option<u16>;

/// A length-n vector over GF(q) with possible erasures.
#[derive(Debug, Clone)]
pub struct Word {
    field: Arc<Field>,
    symbols: Vec<Symbol>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.symbols == other.symbols
    }
}
impl Eq for Word {}

impl Word {
    pub fn new(field: Arc<Field>, symbols: Vec<Symbol>) -> Result<Word> {
        for s in symbols.iter().flatten() {
            field.validate_element(u64::from(*s))?;
        }
        Ok(Word { field, symbols })
    }

    pub fn from_elems(field: Arc<Field>, elems: &[u16]) -> Result<Word> {
        Word::new(field, elems.iter().map(|&e| Some(e)).collect())
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, i: usize) -> Symbol {
        self.symbols[i]
    }

    pub fn set(&mut self, i: usize, s: Symbol) {
        self.symbols[i] = s;
    }

    pub fn erasure_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_none()).count()
    }

    pub fn erased_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.symbols[i].is_none()).collect()
    }

    /// Copy of the word with the given positions erased (in addition to any
    /// already-erased positions).
    pub fn erase(&self, positions: &BTreeSet<usize>) -> Word {
        let symbols = self
            .symbols
            .iter()
            .enumerate()
            .map(|(i, &s)| if positions.contains(&i) { None } else { s })
            .collect();
        Word { field: self.field.clone(), symbols }
    }

    /// Underlying elements, available only when the word has no erasures.
    pub fn elems(&self) -> Result<Vec<u16>> {
        self.symbols
            .iter()
            .map(|s| s.ok_or_else(|| Error::InvalidArgument("word has erasures".into())))
            .collect()
    }

    /// Number of unerased nonzero positions.
    pub fn weight(&self) -> usize {
        self.symbols.iter().filter(|s| matches!(s, Some(v) if *v != 0)).count()
    }
}

/// Distance between two words: errors on mutually unerased positions, plus
/// the count of positions erased in either word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Distance {
    pub errors: usize,
    pub erasures: usize,
}

pub fn distance(a: &Word, b: &Word) -> Result<Distance> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    let mut errors = 0;
    let mut erasures = 0;
    for (x, y) in a.symbols.iter().zip(&b.symbols) {
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

/// One entry of a decoding list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub message: Vec<u16>,
    pub codeword: Vec<u16>,
    pub errors: usize,
}

/// Outcome of erasure-only unique decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErasureOutcome {
    Codeword { message: Vec<u16>, codeword: Word },
    Ambiguous,
    NoCodeword,
}

/// A linear [n, k] code over GF(q), given by a full-row-rank generator
/// matrix. Immutable after construction.
#[derive(Debug)]
pub struct LinearCode {
    field: Arc<Field>,
    n: usize,
    k: usize,
    gen: Vec<Vec<u16>>,
    label: String,
    min_distance: OnceLock<usize>,
}

impl Clone for LinearCode {
    fn clone(&self) -> Self {
        LinearCode {
            field: self.field.clone(),
            n: self.n,
            k: self.k,
            gen: self.gen.clone(),
            label: self.label.clone(),
            min_distance: self.min_distance.clone(),
        }
    }
}

impl LinearCode {
    /// Builds a code from generator rows. The matrix must be nonempty and
    /// have full row rank.
    pub fn new(field: Arc<Field>, gen: Vec<Vec<u16>>, label: impl Into<String>) -> Result<LinearCode> {
        let k = gen.len();
        if k == 0 {
            return Err(Error::TrivialCode("generator has no rows".into()));
        }
        let n = gen[0].len();
        if n == 0 {
            return Err(Error::TrivialCode("generator has no columns".into()));
        }
        for row in &gen {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            for &v in row {
                field.validate_element(u64::from(v))?;
            }
        }
        if linalg::rank(&field, &gen) != k {
            return Err(Error::RankDeficient);
        }
        Ok(LinearCode {
            field,
            n,
            k,
            gen,
            label: label.into(),
            min_distance: OnceLock::new(),
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &[Vec<u16>] {
        &self.gen
    }

    /// Construction label, e.g. `hadamard(q=2,k=3)`, carried into reports.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn codeword_count(&self) -> u128 {
        (self.field.q() as u128).pow(self.k as u32)
    }

    /// Message with the given index; digit 0 of the message is the most
    /// significant base-q digit of the index.
    pub fn message_of_index(&self, mut idx: u64) -> Vec<u16> {
        let q = u64::from(self.field.q());
        let mut msg = vec![0u16; self.k];
        for i in (0..self.k).rev() {
            msg[i] = (idx % q) as u16;
            idx /= q;
        }
        msg
    }

    pub fn encode_elems(&self, msg: &[u16]) -> Result<Vec<u16>> {
        if msg.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: msg.len() });
        }
        let f = &self.field;
        let mut out = vec![0u16; self.n];
        for (i, &m) in msg.iter().enumerate() {
            f.validate_element(u64::from(m))?;
            if m == 0 {
                continue;
            }
            for (j, &g) in self.gen[i].iter().enumerate() {
                out[j] = f.add(out[j], f.mul(m, g));
            }
        }
        Ok(out)
    }

    pub fn encode(&self, msg: &[u16]) -> Result<Word> {
        Word::from_elems(self.field.clone(), &self.encode_elems(msg)?)
    }

    /// Streams all q^k codewords in message-index order. Incremental row
    /// additions keep the cost near one field op per emitted symbol.
    pub fn for_each_codeword(&self, visit: &mut dyn FnMut(u64, &[u16])) -> Result<()> {
        let count = self.codeword_count();
        if count > u128::from(enum_cap()) {
            return Err(Error::EnumerationTooLarge { size: count, cap: enum_cap() });
        }
        let f = &self.field;
        let q = f.q() as usize;
        // mults[i][s] = s * row_i.
        let mults: Vec<Vec<Vec<u16>>> = self
            .gen
            .iter()
            .map(|row| {
                (0..q as u16)
                    .map(|s| row.iter().map(|&g| f.mul(s, g)).collect())
                    .collect()
            })
            .collect();
        let mut levels: Vec<Vec<u16>> = vec![vec![0u16; self.n]; self.k + 1];
        let mut idx = 0u64;
        enumerate_rec(f, &mults, self.k, &mut levels, &mut idx, visit);
        Ok(())
    }

    /// Exact minimum distance by exhaustive enumeration (cached).
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.min_distance.get() {
            return Ok(d);
        }
        let mut best = self.n;
        self.for_each_codeword(&mut |idx, cw| {
            if idx == 0 {
                return;
            }
            let w = cw.iter().filter(|&&v| v != 0).count();
            if w < best {
                best = w;
            }
        })?;
        let _ = self.min_distance.set(best);
        Ok(best)
    }

    pub fn relative_distance(&self) -> Result<Frac> {
        Ok(Frac::new(self.min_distance()? as i64, self.n as i64))
    }

    /// All codewords in the ball of the given error radius around `r`,
    /// which must be erasure-free. Sorted by (errors, message).
    pub fn list_decode_brute(&self, r: &Word, radius_errors: usize) -> Result<Vec<Decoded>> {
        if r.erasure_count() != 0 {
            return Err(Error::InvalidArgument(
                "received word has erasures; use list_decode_erasures".into(),
            ));
        }
        self.list_decode_erasures(r, radius_errors)
    }

    /// Like [`Self::list_decode_brute`], but positions erased in `r` are
    /// skipped: the radius bounds errors on unerased positions only.
    pub fn list_decode_erasures(&self, r: &Word, radius_errors: usize) -> Result<Vec<Decoded>> {
        if *r.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if r.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: r.len() });
        }
        let unerased: Vec<(usize, u16)> = r
            .symbols()
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.map(|v| (j, v)))
            .collect();
        let mut hits: Vec<(usize, u64)> = Vec::new();
        self.for_each_codeword(&mut |idx, cw| {
            let mut errs = 0usize;
            for &(j, v) in &unerased {
                if cw[j] != v {
                    errs += 1;
                    if errs > radius_errors {
                        return;
                    }
                }
            }
            hits.push((errs, idx));
        })?;
        hits.sort_unstable();
        hits.into_iter()
            .map(|(errs, idx)| {
                let message = self.message_of_index(idx);
                let codeword = self.encode_elems(&message)?;
                Ok(Decoded { message, codeword, errors: errs })
            })
            .collect()
    }

    /// Unique decoding from erasures only: solves the linear system given
    /// by the unerased coordinates.
    pub fn unique_decode_erasures(&self, r: &Word) -> Result<ErasureOutcome> {
        if *r.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if r.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: r.len() });
        }
        let mut eqs: Vec<Vec<u16>> = Vec::new();
        let mut rhs: Vec<u16> = Vec::new();
        for (j, s) in r.symbols().iter().enumerate() {
            if let Some(v) = s {
                eqs.push((0..self.k).map(|i| self.gen[i][j]).collect());
                rhs.push(*v);
            }
        }
        Ok(match linalg::solve(&self.field, &eqs, &rhs) {
            SolveOutcome::Unique(message) => {
                let codeword = self.encode(&message)?;
                ErasureOutcome::Codeword { message, codeword }
            }
            SolveOutcome::Underdetermined => ErasureOutcome::Ambiguous,
            SolveOutcome::Inconsistent => ErasureOutcome::NoCodeword,
        })
    }

    /// Message of an exact (erasure-free) codeword.
    pub fn message_of(&self, w: &Word) -> Result<Vec<u16>> {
        match self.unique_decode_erasures(w)? {
            ErasureOutcome::Codeword { message, codeword } if &codeword == w => Ok(message),
            _ => Err(Error::InvalidArgument("word is not a codeword".into())),
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        matches!(
            self.unique_decode_erasures(w),
            Ok(ErasureOutcome::Codeword { codeword, .. }) if &codeword == w
        )
    }

    /// Removes the given coordinates. Requires fewer erased positions than
    /// the minimum distance, so codewords stay in 1-1 correspondence.
    pub fn puncture(&self, erased: &BTreeSet<usize>) -> Result<PuncturedCode> {
        for &j in erased {
            if j >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "position {j} out of range for length {}",
                    self.n
                )));
            }
        }
        let d = self.min_distance()?;
        if erased.len() >= d {
            return Err(Error::TooManyErasures { got: erased.len(), d });
        }
        let kept: Vec<usize> = (0..self.n).filter(|j| !erased.contains(j)).collect();
        let gen: Vec<Vec<u16>> = self
            .gen
            .iter()
            .map(|row| kept.iter().map(|&j| row[j]).collect())
            .collect();
        let code = LinearCode::new(
            self.field.clone(),
            gen,
            format!("{}[-{}]", self.label, erased.len()),
        )?;
        Ok(PuncturedCode { code, kept })
    }

    /// Uniformly random codeword.
    pub fn random_codeword(&self, seed: u64) -> Result<Word> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = self.field.q();
        let msg: Vec<u16> = (0..self.k).map(|_| rng.gen_range(0..q)).collect();
        self.encode(&msg)
    }

    /// Flips exactly `errors` distinct positions of an erasure-free word,
    /// each to a uniformly random different symbol.
    pub fn corrupt(&self, w: &Word, errors: usize, seed: u64) -> Result<Word> {
        if w.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: w.len() });
        }
        if w.erasure_count() != 0 {
            return Err(Error::InvalidArgument("cannot corrupt an erased position".into()));
        }
        if errors > self.n {
            return Err(Error::InvalidArgument(format!(
                "{errors} errors exceed the block length {}",
                self.n
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = rand::seq::index::sample(&mut rng, self.n, errors);
        let mut out = w.clone();
        let q = self.field.q();
        for j in positions {
            let cur = out.get(j).expect("erasure-free");
            let draw = rng.gen_range(0..q - 1);
            let new = if draw >= cur { draw + 1 } else { draw };
            out.set(j, Some(new));
        }
        Ok(out)
    }

    /// Maximum list size at the given radius: exhaustive over all q^n
    /// received words when that is at most 2^16, otherwise the maximum over
    /// 1000 seeded random words.
    pub fn max_list_size(&self, radius_errors: usize, seed: u64) -> Result<ListSizeEstimate> {
        let q = u64::from(self.field.q());
        // None means the word space overflows u128, which certainly exceeds
        // the exhaustive threshold.
        let space = (q as u128).checked_pow(self.n as u32);
        // Materialize codewords once; both paths scan them per word.
        let mut codewords: Vec<Vec<u16>> = Vec::new();
        self.for_each_codeword(&mut |_, cw| codewords.push(cw.to_vec()))?;
        let count_ball = |word: &[u16]| {
            codewords
                .iter()
                .filter(|cw| {
                    let mut errs = 0usize;
                    for (a, b) in cw.iter().zip(word) {
                        if a != b {
                            errs += 1;
                            if errs > radius_errors {
                                return false;
                            }
                        }
                    }
                    true
                })
                .count()
        };
        if let Some(space) = space.filter(|&s| s <= 1 << 16) {
            let mut best = 0usize;
            let mut word = vec![0u16; self.n];
            for idx in 0..space as u64 {
                let mut rest = idx;
                for s in word.iter_mut() {
                    *s = (rest % q) as u16;
                    rest /= q;
                }
                best = best.max(count_ball(&word));
            }
            Ok(ListSizeEstimate { value: best, exhaustive: true })
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = 0usize;
            for _ in 0..1000 {
                let word: Vec<u16> =
                    (0..self.n).map(|_| rng.gen_range(0..self.field.q())).collect();
                best = best.max(count_ball(&word));
            }
            Ok(ListSizeEstimate { value: best, exhaustive: false })
        }
    }
}

/// Maximum list size measurement; `exhaustive` records whether every
/// received word was tried or only a random sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListSizeEstimate {
    pub value: usize,
    pub exhaustive: bool,
}

/// A punctured code together with the coordinate map back to its parent.
#[derive(Debug, Clone)]
pub struct PuncturedCode {
    pub code: LinearCode,
    /// Parent positions kept, in increasing order; position i of the
    /// punctured code is parent position kept[i].
    pub kept: Vec<usize>,
}

impl PuncturedCode {
    /// Lifts a punctured codeword back to the parent codeword with the
    /// same message.
    pub fn lift(&self, parent: &LinearCode, w: &Word) -> Result<Word> {
        let message = self.code.message_of(w)?;
        parent.encode(&message)
    }
}

fn enumerate_rec(
    f: &Field,
    mults: &[Vec<Vec<u16>>],
    k: usize,
    levels: &mut [Vec<u16>],
    idx: &mut u64,
    visit: &mut dyn FnMut(u64, &[u16]),
) {
    let level = mults.len() + 1 - levels.len();
    if level == k {
        visit(*idx, &levels[0]);
        *idx += 1;
        return;
    }
    let (head, tail) = levels.split_at_mut(1);
    let acc = &head[0];
    let q = mults[level].len();
    for s in 0..q {
        let m = &mults[level][s];
        tail[0].copy_from_slice(acc);
        if s != 0 {
            for (t, &b) in tail[0].iter_mut().zip(m) {
                *t = f.add(*t, b);
            }
        }
        enumerate_rec(f, mults, k, tail, idx, visit);
    }
}
