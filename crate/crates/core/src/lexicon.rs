//! Machine-readable bilingual dictionaries: `source<TAB>cand1|cand2|...`.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::TokenizerConfig;

/// One translation option: a sequence of one or more target-language tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate(Vec<String>);

impl Candidate {
    /// Panics on an empty token list.
    pub fn new(tokens: Vec<String>) -> Self {
        assert!(!tokens.is_empty(), "candidate needs at least one token");
        Candidate(tokens)
    }

    pub fn single(token: impl Into<String>) -> Self {
        Candidate(vec![token.into()])
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn is_multi_token(&self) -> bool {
        self.0.len() > 1
    }

    /// Tokens joined with a single space.
    pub fn surface(&self) -> String {
        self.0.join(" ")
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface())
    }
}

/// Rank-ordered candidate lists per source term.
#[derive(Debug, Clone, Default)]
pub struct BilingualDictionary {
    name: String,
    entries: HashMap<String, Vec<Candidate>>,
    order: Vec<String>,
    warnings: Vec<String>,
    tokenizer: TokenizerConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DictionaryStats {
    pub entries: usize,
    /// Mean number of candidates per entry.
    pub scale: f64,
    /// Population variance of candidates per entry.
    pub variance: f64,
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<BilingualDictionary> {
    load_dictionary_with(path, &TokenizerConfig::default())
}

/// Loads a dictionary, normalizing source terms and candidates with
/// `tokenizer` (use the corpus tokenizer so candidates match index terms).
pub fn load_dictionary_with(
    path: impl AsRef<Path>,
    tokenizer: &TokenizerConfig,
) -> Result<BilingualDictionary> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_dictionary(BufReader::new(file), &name, tokenizer)
}

pub fn read_dictionary<R: BufRead>(
    reader: R,
    name: &str,
    tokenizer: &TokenizerConfig,
) -> Result<BilingualDictionary> {
    let mut dict = BilingualDictionary {
        name: name.to_string(),
        tokenizer: *tokenizer,
        ..Default::default()
    };
    for (n, line) in reader.lines().enumerate() {
        let lineno = n + 1;
        let line = line.map_err(|e| Error::malformed(name, lineno, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((source, cands)) = line.split_once('\t') else {
            return Err(Error::malformed(
                name,
                lineno,
                "expected source<TAB>cand1|cand2|...",
            ));
        };
        let source_tokens = tokenizer.tokenize(source);
        if source_tokens.is_empty() {
            return Err(Error::malformed(name, lineno, "empty source term"));
        }
        let source = source_tokens.join(" ");
        let mut parsed = Vec::new();
        for raw in cands.split('|') {
            let tokens = tokenizer.tokenize(raw);
            if tokens.is_empty() {
                if !raw.trim().is_empty() {
                    dict.warn(format!(
                        "{name}:{lineno}: candidate {raw:?} has no tokens, skipped"
                    ));
                }
                continue;
            }
            parsed.push(Candidate(tokens));
        }
        if parsed.is_empty() {
            return Err(Error::malformed(name, lineno, "entry has no candidates"));
        }
        let duplicate_source = dict.entries.contains_key(&source);
        if duplicate_source {
            dict.warn(format!(
                "{name}:{lineno}: duplicate source term {source:?}, candidates appended"
            ));
        } else {
            dict.order.push(source.clone());
        }
        let list = dict.entries.entry(source).or_default();
        for c in parsed {
            if !list.contains(&c) {
                list.push(c);
            }
        }
    }
    if dict.entries.is_empty() {
        dict.warn(format!("{name}: dictionary has no entries"));
    }
    Ok(dict)
}

impl BilingualDictionary {
    /// Builds a dictionary from already-normalized entries (in rank order).
    pub fn from_entries<I, S>(name: &str, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<Candidate>)>,
        S: Into<String>,
    {
        let mut dict = BilingualDictionary {
            name: name.to_string(),
            ..Default::default()
        };
        for (source, cands) in entries {
            let source = source.into();
            if cands.is_empty() {
                continue;
            }
            if !dict.entries.contains_key(&source) {
                dict.order.push(source.clone());
            }
            let list = dict.entries.entry(source).or_default();
            for c in cands {
                if !list.contains(&c) {
                    list.push(c);
                }
            }
        }
        dict
    }

    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Rank-ordered candidates; empty for out-of-vocabulary terms.
    pub fn lookup(&self, source_term: &str) -> &[Candidate] {
        self.entries
            .get(source_term)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn contains(&self, source_term: &str) -> bool {
        self.entries.contains_key(source_term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Source terms in file order.
    pub fn source_terms(&self) -> &[String] {
        &self.order
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        self.tokenizer
    }

    pub fn stats(&self) -> Result<DictionaryStats> {
        dictionary_stats(self)
    }
}

pub fn dictionary_stats(dict: &BilingualDictionary) -> Result<DictionaryStats> {
    if dict.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    let counts: Vec<f64> = dict.entries.values().map(|c| c.len() as f64).collect();
    let n = counts.len() as f64;
    let scale = counts.iter().sum::<f64>() / n;
    let variance = counts.iter().map(|c| (c - scale).powi(2)).sum::<f64>() / n;
    Ok(DictionaryStats {
        entries: counts.len(),
        scale,
        variance,
    })
}
