//! Versioned binary model container. All integers little-endian.
//!
//! ```text
//! magic            8 bytes  "SPARSETM"
//! version          u32
//! config           clauses u32, n_states u32, threshold u32, max_literals u32,
//!                  al_size u32, margin u32, specificity f64, al_mode u8,
//!                  sampler u8, insert_state u32, k_intro u32, epochs u32,
//!                  seed u64, threads u32
//! shape            features u32, classes u32
//! clauses          per clause: len u32, then len x (feature u32, state u32)
//! weights          classes x clauses i32, class-major
//! active literals  per class: len u32, then len x feature u32
//! metadata flags   u8: 1 = tokenizer, 2 = vocabulary, 4 = class names
//! tokenizer        lowercase u8, bigrams u8
//! vocabulary       count u32, then count x (len u32, UTF-8 bytes)
//! class names      classes x (len u32, UTF-8 bytes)
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{InputMeta, StmModel};
use crate::active::{ActiveLiteralRecord, AlMode};
use crate::clause::{ClauseBank, SparseClause};
use crate::engine::{NegativeSampler, TrainConfig, WeightMatrix};
use crate::error::{Result, StmError};
use crate::sparse::{Tokenizer, Vocabulary};

pub const MODEL_MAGIC: &[u8; 8] = b"SPARSETM";
pub const MODEL_VERSION: u32 = 1;

const HAS_TOKENIZER: u8 = 1;
const HAS_VOCABULARY: u8 = 2;
const HAS_CLASS_NAMES: u8 = 4;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i32(&mut self, v: i32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| StmError::Config(format!("length {v} does not fit in u32")))?;
        self.u32(v);
        Ok(())
    }
    fn str(&mut self, s: &str) -> Result<()> {
        self.len(s.len())?;
        self.0.extend_from_slice(s.as_bytes());
        Ok(())
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn corrupt(msg: impl Into<String>) -> StmError {
    StmError::CorruptModel(msg.into())
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| corrupt(format!("unexpected end of data at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn array<const K: usize>(&mut self) -> Result<[u8; K]> {
        Ok(self.take(K)?.try_into().expect("exact length"))
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
    /// Reads a length and checks that at least `len * unit` bytes remain.
    fn len(&mut self, unit: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(unit) > self.buf.len() - self.pos {
            return Err(corrupt(format!("length {n} at byte {} runs past the end", self.pos - 4)));
        }
        Ok(n)
    }
    fn str(&mut self) -> Result<String> {
        let n = self.len(1)?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| corrupt("invalid UTF-8 string"))
    }
}

/// Serialises `model` into the binary container.
pub fn write_model(model: &StmModel) -> Result<Vec<u8>> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MODEL_MAGIC);
    w.u32(MODEL_VERSION);

    let c = &model.config;
    w.len(c.clauses)?;
    w.u32(c.n_states);
    w.u32(c.threshold);
    w.u32(c.max_literals);
    w.len(c.al_size)?;
    w.u32(c.margin);
    w.f64(c.specificity);
    w.u8(match c.al_mode {
        AlMode::Static => 0,
        AlMode::Dynamic => 1,
    });
    w.u8(match c.sampler {
        NegativeSampler::Uniform => 0,
        NegativeSampler::Focused => 1,
    });
    w.u32(c.insert_state);
    w.len(c.k_intro)?;
    w.len(c.epochs)?;
    w.u64(c.seed);
    w.len(c.threads)?;

    w.u32(model.feature_count());
    w.u32(model.class_count());

    for clause in model.bank.clauses() {
        w.len(clause.len())?;
        for (&l, &s) in clause.literals().iter().zip(clause.states()) {
            w.u32(l);
            w.u32(s);
        }
    }
    for &weight in model.weights.as_slice() {
        w.i32(weight);
    }
    for class in 0..model.class_count() as usize {
        let list = model.active.list(class);
        w.len(list.len())?;
        for &f in list {
            w.u32(f);
        }
    }

    let meta = &model.meta;
    let mut flags = 0;
    if meta.tokenizer.is_some() {
        flags |= HAS_TOKENIZER;
    }
    if meta.vocabulary.is_some() {
        flags |= HAS_VOCABULARY;
    }
    if meta.class_names.is_some() {
        flags |= HAS_CLASS_NAMES;
    }
    w.u8(flags);
    if let Some(t) = &meta.tokenizer {
        w.u8(u8::from(t.lowercase));
        w.u8(u8::from(t.bigrams));
    }
    if let Some(v) = &meta.vocabulary {
        w.len(v.len())?;
        for tok in v.tokens() {
            w.str(tok)?;
        }
    }
    if let Some(names) = &meta.class_names {
        if names.len() != model.class_count() as usize {
            return Err(StmError::DimensionMismatch { expected: model.class_count() as usize, actual: names.len() });
        }
        for name in names {
            w.str(name)?;
        }
    }
    Ok(w.0)
}

/// Parses a model container, validating every structural invariant.
pub fn read_model(bytes: &[u8]) -> Result<StmModel> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(MODEL_MAGIC.len()).ok() != Some(MODEL_MAGIC.as_slice()) {
        return Err(corrupt("missing magic header"));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(StmError::VersionMismatch { found: version, expected: MODEL_VERSION });
    }

    let config = TrainConfig {
        clauses: r.u32()? as usize,
        n_states: r.u32()?,
        threshold: r.u32()?,
        max_literals: r.u32()?,
        al_size: r.u32()? as usize,
        margin: r.u32()?,
        specificity: r.f64()?,
        al_mode: match r.u8()? {
            0 => AlMode::Static,
            1 => AlMode::Dynamic,
            x => return Err(corrupt(format!("unknown AL mode tag {x}"))),
        },
        sampler: match r.u8()? {
            0 => NegativeSampler::Uniform,
            1 => NegativeSampler::Focused,
            x => return Err(corrupt(format!("unknown sampler tag {x}"))),
        },
        insert_state: r.u32()?,
        k_intro: r.u32()? as usize,
        epochs: r.u32()? as usize,
        seed: r.u64()?,
        threads: r.u32()? as usize,
    };
    config.validate().map_err(|e| corrupt(format!("stored configuration: {e}")))?;
    let limits = config.limits()?;

    let features = r.u32()?;
    let classes = r.u32()? as usize;

    let mut clauses = Vec::with_capacity(config.clauses.min(bytes.len() / 4));
    for _ in 0..config.clauses {
        let n = r.len(8)?;
        let mut literals = Vec::with_capacity(n);
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            literals.push(r.u32()?);
            states.push(r.u32()?);
        }
        clauses.push(SparseClause::from_parts(literals, states, &limits).map_err(|e| corrupt(e.to_string()))?);
    }
    let bank = ClauseBank::from_clauses(clauses, limits, features);
    bank.check_invariants().map_err(corrupt)?;

    if classes.saturating_mul(config.clauses).saturating_mul(4) > bytes.len() - r.pos {
        return Err(corrupt("weight table runs past the end"));
    }
    let mut rows = Vec::with_capacity(classes);
    for _ in 0..classes {
        rows.push((0..config.clauses).map(|_| r.i32()).collect::<Result<Vec<_>>>()?);
    }
    let weights = if classes == 0 {
        WeightMatrix::zeros(0, config.clauses)
    } else {
        WeightMatrix::from_rows(rows)?
    };

    let mut lists = Vec::with_capacity(classes);
    for _ in 0..classes {
        let n = r.len(4)?;
        lists.push((0..n).map(|_| r.u32()).collect::<Result<Vec<_>>>()?);
    }
    let active = ActiveLiteralRecord::from_lists(lists.clone(), config.al_size, config.al_mode);
    if (0..classes).any(|c| active.list(c) != lists[c].as_slice()) {
        return Err(corrupt("duplicate active literal entries"));
    }
    active.check_invariants(features).map_err(corrupt)?;

    let flags = r.u8()?;
    if flags & !(HAS_TOKENIZER | HAS_VOCABULARY | HAS_CLASS_NAMES) != 0 {
        return Err(corrupt(format!("unknown metadata flags {flags:#x}")));
    }
    let mut meta = InputMeta::default();
    if flags & HAS_TOKENIZER != 0 {
        meta.tokenizer = Some(Tokenizer { lowercase: r.u8()? != 0, bigrams: r.u8()? != 0 });
    }
    if flags & HAS_VOCABULARY != 0 {
        let n = r.len(4)?;
        let tokens = (0..n).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let vocab = Vocabulary::from_tokens(tokens);
        if vocab.len() != n {
            return Err(corrupt("duplicate vocabulary tokens"));
        }
        meta.vocabulary = Some(vocab);
    }
    if flags & HAS_CLASS_NAMES != 0 {
        meta.class_names = Some((0..classes).map(|_| r.str()).collect::<Result<Vec<_>>>()?);
    }
    if r.pos != bytes.len() {
        return Err(corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
    }

    StmModel::from_parts(bank, weights, active, config, meta).map_err(|e| corrupt(e.to_string()))
}

pub fn save_model<P: AsRef<Path>>(model: &StmModel, path: P) -> Result<()> {
    let bytes = write_model(model)?;
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    file.sync_all()?;
    Ok(())
}

pub fn load_model<P: AsRef<Path>>(path: P) -> Result<StmModel> {
    read_model(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::planted_conjunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trained() -> StmModel {
        let data = planted_conjunction(12, &[1, 4], 200, 3);
        let cfg = TrainConfig { clauses: 8, threshold: 20, max_literals: 5, al_size: 6, ..TrainConfig::for_clauses(8) };
        let mut model = StmModel::new(cfg, 12, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            model.train_epoch(&data, &mut rng).unwrap();
        }
        model.meta.tokenizer = Some(Tokenizer::default());
        model.meta.vocabulary = Some(Vocabulary::from_tokens((0..12).map(|i| format!("tok{i}")).collect()));
        model.meta.class_names = Some(vec!["no".into(), "yes".into()]);
        model
    }

    #[test]
    fn round_trip_preserves_model_and_predictions() {
        let model = trained();
        assert!(model.bank().stored_literals() > 0);
        let back = read_model(&write_model(&model).unwrap()).unwrap();
        assert_eq!(back, model);
        let data = planted_conjunction(12, &[1, 4], 100, 4);
        for row in data.rows() {
            assert_eq!(back.predict(row), model.predict(row));
        }
    }

    #[test]
    fn file_round_trip() {
        let model = trained();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.stm");
        save_model(&model, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), model);
    }

    #[test]
    fn every_truncation_is_corrupt() {
        let bytes = write_model(&trained()).unwrap();
        for cut in 0..bytes.len() {
            let err = read_model(&bytes[..cut]).unwrap_err();
            assert!(matches!(err, StmError::CorruptModel(_)), "cut at {cut}: {err}");
            assert!(err.to_string().starts_with("corrupt model"));
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(read_model(&extra), Err(StmError::CorruptModel(_))));
    }

    #[test]
    fn version_mismatch_names_both_versions() {
        let mut bytes = write_model(&trained()).unwrap();
        bytes[8..12].copy_from_slice(&7u32.to_le_bytes());
        let err = read_model(&bytes).unwrap_err();
        assert!(matches!(err, StmError::VersionMismatch { found: 7, expected: 1 }));
        let msg = err.to_string();
        assert!(msg.contains('7') && msg.contains('1'), "{msg}");
    }

    #[test]
    fn rejects_out_of_spectrum_state() {
        let model = trained();
        let mut bytes = write_model(&model).unwrap();
        // First clause with a literal: locate its first state and zero it.
        let header = 8 + 4 + 4 * 6 + 8 + 2 + 4 * 4 + 8 + 8;
        let mut pos = header;
        for clause in model.bank().clauses() {
            if !clause.is_empty() {
                let state_at = pos + 4 + 4;
                bytes[state_at..state_at + 4].copy_from_slice(&0u32.to_le_bytes());
                break;
            }
            pos += 4 + 8 * clause.len();
        }
        assert!(matches!(read_model(&bytes), Err(StmError::CorruptModel(_))));
    }
}
