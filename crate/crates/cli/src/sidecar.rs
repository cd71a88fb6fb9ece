//! `<data>.vocab.json`: token list, class names and tokenizer settings
//! written by `prepare` and picked up by `train`.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stm::{Tokenizer, Vocabulary};

use crate::error::{in_file, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tokens: Vec<String>,
    pub classes: Vec<String>,
    /// Absent for tabular data.
    pub tokenizer: Option<Tokenizer>,
}

impl Sidecar {
    pub fn new(vocab: &Vocabulary, classes: Vec<String>, tokenizer: Option<Tokenizer>) -> Self {
        Self { tokens: vocab.tokens().to_vec(), classes, tokenizer }
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::from_tokens(self.tokens.clone())
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let file = in_file(File::create(path), path)?;
        in_file(serde_json::to_writer_pretty(BufWriter::new(file), self), path)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let file = in_file(File::open(path), path)?;
        in_file(serde_json::from_reader(BufReader::new(file)), path)
    }
}

pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_owned();
    name.push(".vocab.json");
    PathBuf::from(name)
}
