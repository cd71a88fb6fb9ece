//! Raw input readers and the text/tabular preparation pipeline.
//!
//! * labelled text: one document per line, `<label>\t<text>`
//! * tabular: CSV with a header row, pre-binarised `0`/`1` cells and one
//!   label column
//! * the subjectivity corpus layout: `plot.tok.gt9.5000` (objective) and
//!   `quote.tok.gt9.5000` (subjective), Latin-1 encoded

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, Read};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, StmError};
use crate::sparse::{SparseDataset, SparseRow, Tokenizer, Vocabulary};

/// Assigns class indices to string labels: numeric order when every label
/// is an integer, lexicographic otherwise.
pub fn index_labels<S: AsRef<str>>(labels: &[S]) -> (Vec<u32>, Vec<String>) {
    let distinct: BTreeSet<&str> = labels.iter().map(AsRef::as_ref).collect();
    let mut names: Vec<String> = distinct.into_iter().map(str::to_owned).collect();
    if names.iter().all(|n| n.parse::<i64>().is_ok()) {
        names.sort_by_key(|n| n.parse::<i64>().expect("checked"));
    }
    let index = labels
        .iter()
        .map(|l| names.iter().position(|n| n == l.as_ref()).expect("label present") as u32)
        .collect();
    (index, names)
}

/// Reads `<label>\t<text>` lines. Blank lines are skipped.
pub fn read_labeled_text<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line.split_once('\t').ok_or_else(|| StmError::Parse {
            line: i + 1,
            message: "expected <label><TAB><text>".into(),
        })?;
        docs.push((label.trim().to_owned(), text.to_owned()));
    }
    Ok(docs)
}

/// Pre-binarised tabular data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tabular {
    pub feature_names: Vec<String>,
    pub rows: Vec<SparseRow>,
    pub labels: Vec<String>,
}

/// Parses a CSV with a header. `label_column` defaults to the last column.
pub fn read_tabular<R: Read>(reader: R, label_column: Option<&str>) -> Result<Tabular> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = csv
        .headers()
        .map_err(|e| StmError::Parse { line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.len() < 2 {
        return Err(StmError::Parse { line: 1, message: "need at least one feature and a label column".into() });
    }
    let label_at = match label_column {
        Some(name) => header.iter().position(|h| h == name).ok_or_else(|| StmError::Parse {
            line: 1,
            message: format!("no column named {name:?}"),
        })?,
        None => header.len() - 1,
    };
    let feature_names: Vec<String> =
        header.iter().enumerate().filter(|&(i, _)| i != label_at).map(|(_, h)| h.clone()).collect();
    let distinct: BTreeSet<&String> = feature_names.iter().collect();
    if distinct.len() != feature_names.len() {
        return Err(StmError::Parse { line: 1, message: "duplicate column names".into() });
    }

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| StmError::Parse { line, message: e.to_string() })?;
        if record.len() != header.len() {
            return Err(StmError::Parse {
                line,
                message: format!("{} fields, header has {}", record.len(), header.len()),
            });
        }
        let mut active = Vec::new();
        let mut feature = 0u32;
        for (col, cell) in record.iter().enumerate() {
            if col == label_at {
                continue;
            }
            match cell.parse::<f64>() {
                Ok(1.0) => active.push(feature),
                Ok(0.0) => {}
                _ => {
                    return Err(StmError::Parse {
                        line,
                        message: format!("column {:?} holds {cell:?}; tabular input must be 0/1", header[col]),
                    })
                }
            }
            feature += 1;
        }
        rows.push(SparseRow::new(active)?);
        labels.push(record[label_at].to_owned());
    }
    Ok(Tabular { feature_names, rows, labels })
}

fn read_latin1(path: &Path) -> Result<String> {
    Ok(fs::read(path)?.into_iter().map(char::from).collect())
}

/// Loads the subjectivity corpus as `(label, sentence)` with `"0"` for
/// objective and `"1"` for subjective sentences.
pub fn load_subjectivity(dir: &Path) -> Result<Vec<(String, String)>> {
    let mut docs = Vec::new();
    for (file, label) in [("plot.tok.gt9.5000", "0"), ("quote.tok.gt9.5000", "1")] {
        for line in read_latin1(&dir.join(file))?.lines() {
            if !line.trim().is_empty() {
                docs.push((label.to_owned(), line.to_owned()));
            }
        }
    }
    Ok(docs)
}

/// Seeded shuffle split; returns `(train, test)` index lists.
pub fn split_indices(len: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test_len = ((len as f64) * test_fraction.clamp(0.0, 1.0)).round() as usize;
    let train = idx.split_off(test_len);
    (train, idx)
}

/// Vectorised text split plus everything needed to map it back.
#[derive(Debug, Clone)]
pub struct PreparedText {
    pub train: SparseDataset,
    pub test: Option<SparseDataset>,
    pub vocabulary: Vocabulary,
    pub class_names: Vec<String>,
}

/// Tokenises, splits, builds the vocabulary on the training part only, and
/// vectorises both parts.
pub fn prepare_text(
    docs: &[(String, String)],
    tokenizer: &Tokenizer,
    max_size: usize,
    min_df: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<PreparedText> {
    if docs.is_empty() {
        return Err(StmError::EmptyDataset);
    }
    let labels: Vec<&str> = docs.iter().map(|(l, _)| l.as_str()).collect();
    let (label_idx, class_names) = index_labels(&labels);
    let tokens: Vec<Vec<String>> = docs.iter().map(|(_, t)| tokenizer.tokenize(t)).collect();
    let (train_idx, test_idx) = if test_fraction > 0.0 {
        split_indices(docs.len(), test_fraction, seed)
    } else {
        ((0..docs.len()).collect(), Vec::new())
    };
    let train_tokens: Vec<Vec<String>> = train_idx.iter().map(|&i| tokens[i].clone()).collect();
    let vocabulary = Vocabulary::build(&train_tokens, max_size, min_df)?;
    let classes = (class_names.len() as u32).max(2);
    let build = |idx: &[usize]| {
        SparseDataset::new(
            idx.iter().map(|&i| vocabulary.vectorize(&tokens[i])).collect(),
            idx.iter().map(|&i| label_idx[i]).collect(),
            vocabulary.len() as u32,
            classes,
        )
    };
    let train = build(&train_idx)?;
    let test = if test_idx.is_empty() { None } else { Some(build(&test_idx)?) };
    Ok(PreparedText { train, test, vocabulary, class_names })
}

/// Turns tabular data into a dataset; feature names become the vocabulary.
pub fn prepare_tabular(table: Tabular) -> Result<(SparseDataset, Vocabulary, Vec<String>)> {
    let (labels, class_names) = index_labels(&table.labels);
    let vocab = Vocabulary::from_tokens(table.feature_names);
    let classes = (class_names.len() as u32).max(2);
    let ds = SparseDataset::new(table.rows, labels, vocab.len() as u32, classes)?;
    Ok((ds, vocab, class_names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_numeric_then_lexicographic() {
        let (idx, names) = index_labels(&["10", "2", "2", "1"]);
        assert_eq!(names, vec!["1", "2", "10"]);
        assert_eq!(idx, vec![2, 1, 1, 0]);
        let (idx, names) = index_labels(&["pos", "neg"]);
        assert_eq!(names, vec!["neg", "pos"]);
        assert_eq!(idx, vec![1, 0]);
    }

    #[test]
    fn reads_labeled_text() {
        let docs = read_labeled_text("pos\tgreat movie\n\nneg\tdull\n".as_bytes()).unwrap();
        assert_eq!(docs, vec![("pos".into(), "great movie".into()), ("neg".into(), "dull".into())]);
        assert!(matches!(read_labeled_text("no tab here\n".as_bytes()), Err(StmError::Parse { line: 1, .. })));
    }

    #[test]
    fn reads_tabular() {
        let csv = "a,b,c,Label\n1,0,1,malware\n0,0,0,goodware\n";
        let t = read_tabular(csv.as_bytes(), None).unwrap();
        assert_eq!(t.feature_names, vec!["a", "b", "c"]);
        assert_eq!(t.rows[0].indices(), &[0, 2]);
        assert!(t.rows[1].is_empty());
        let t = read_tabular("y,a,b\n1,1,1\n".as_bytes(), Some("y")).unwrap();
        assert_eq!(t.feature_names, vec!["a", "b"]);
        assert_eq!(t.labels, vec!["1"]);
        assert!(read_tabular("a,y\n0.5,1\n".as_bytes(), None).is_err());
        assert!(read_tabular("a,y\n1\n".as_bytes(), None).is_err());
    }

    #[test]
    fn split_is_deterministic_and_complete() {
        let (a, b) = split_indices(100, 0.1, 3);
        assert_eq!((a.len(), b.len()), (90, 10));
        assert_eq!(split_indices(100, 0.1, 3), (a.clone(), b.clone()));
        let mut all: Vec<usize> = a.into_iter().chain(b).collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn prepare_text_builds_vocab_on_train_only() {
        let docs: Vec<(String, String)> = (0..20)
            .map(|i| ((i % 2).to_string(), format!("common word{i}")))
            .collect();
        let p = prepare_text(&docs, &Tokenizer::default(), 5, 1, 0.25, 1).unwrap();
        assert_eq!(p.vocabulary.len(), 5);
        assert_eq!(p.vocabulary.token(0), Some("common"));
        assert_eq!(p.train.len(), 15);
        assert_eq!(p.test.as_ref().unwrap().len(), 5);
        assert_eq!(p.class_names, vec!["0", "1"]);
    }
}
