//! Monolingual target-language corpus: vocabulary, windowed co-occurrence
//! counts and the inverted index used for retrieval.
//!
//! Co-occurrence is counted per document: every unordered pair of token
//! positions `(i, j)` with `0 < j - i <= window` contributes one count to
//! the canonical term pair `(min(a, b), max(a, b))`. The binary adjacency
//! relation is `pair_count > 0`; joint probabilities are counts divided by
//! the total pair mass.

mod format;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::edit_distance::NeighborIndex;
use crate::error::{Error, Result};
use crate::text::TokenizerConfig;

pub use format::{FORMAT_VERSION, MAGIC};

pub type TermId = u32;
pub type DocIndex = u32;

pub const DEFAULT_WINDOW: usize = 8;

/// Target-language vocabulary with dense ids assigned in order of first
/// appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    ids: HashMap<String, TermId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, term: &str) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as TermId;
        self.terms.push(term.to_string());
        self.ids.insert(term.to_string(), id);
        id
    }

    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &str {
        &self.terms[id as usize]
    }

    pub fn contains(&self, term: &str) -> bool {
        self.ids.contains_key(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    fn from_terms(terms: Vec<String>) -> Result<Self> {
        let mut ids = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if ids.insert(t.clone(), i as TermId).is_some() {
                return Err(Error::IndexFormat(format!(
                    "duplicate vocabulary term {t:?}"
                )));
            }
        }
        Ok(Self { terms, ids })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
}

/// Tokenized documents plus their vocabulary.
#[derive(Debug, Clone, Default)]
pub struct DocumentCollection {
    documents: Vec<Document>,
    vocabulary: Vocabulary,
    tokenizer: TokenizerConfig,
}

impl DocumentCollection {
    pub fn new(tokenizer: TokenizerConfig) -> Self {
        Self {
            documents: Vec::new(),
            vocabulary: Vocabulary::new(),
            tokenizer,
        }
    }

    /// Adds a pre-tokenized document. Tokens are taken as-is.
    pub fn push(&mut self, id: impl Into<String>, tokens: Vec<String>) -> Result<()> {
        let id = id.into();
        if self.documents.iter().any(|d| d.id == id) {
            return Err(Error::InvalidArgument(format!("duplicate doc_id {id:?}")));
        }
        for t in &tokens {
            self.vocabulary.intern(t);
        }
        self.documents.push(Document { id, tokens });
        Ok(())
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        self.tokenizer
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// Reads a `doc_id<TAB>text` corpus file.
pub fn ingest_corpus(
    path: impl AsRef<Path>,
    tokenizer: &TokenizerConfig,
) -> Result<DocumentCollection> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file), &path.display().to_string(), tokenizer)
}

pub fn read_corpus<R: BufRead>(
    reader: R,
    source_name: &str,
    tokenizer: &TokenizerConfig,
) -> Result<DocumentCollection> {
    let mut collection = DocumentCollection::new(*tokenizer);
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (n, line) in reader.lines().enumerate() {
        let lineno = n + 1;
        let line = line.map_err(|e| Error::malformed(source_name, lineno, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let Some((id, text)) = line.split_once('\t') else {
            return Err(Error::malformed(
                source_name,
                lineno,
                "expected doc_id<TAB>text",
            ));
        };
        let id = id.trim();
        if id.is_empty() {
            return Err(Error::malformed(source_name, lineno, "empty doc_id"));
        }
        if let Some(first) = seen.get(id) {
            return Err(Error::malformed(
                source_name,
                lineno,
                format!("duplicate doc_id {id:?} (first seen on line {first})"),
            ));
        }
        seen.insert(id.to_string(), lineno);
        let tokens = tokenizer.tokenize(text);
        if tokens.is_empty() {
            log::warn!("{source_name}:{lineno}: document {id:?} has no tokens, skipped");
            continue;
        }
        for t in &tokens {
            collection.vocabulary.intern(t);
        }
        collection.documents.push(Document {
            id: id.to_string(),
            tokens,
        });
    }
    if collection.documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(collection)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: DocIndex,
    pub tf: u32,
}

/// Immutable co-occurrence and retrieval statistics over a corpus.
#[derive(Debug)]
pub struct CooccurrenceIndex {
    window: usize,
    tokenizer: TokenizerConfig,
    vocabulary: Vocabulary,
    doc_ids: Vec<String>,
    doc_lookup: HashMap<String, DocIndex>,
    doc_lengths: Vec<u32>,
    pair_counts: HashMap<(TermId, TermId), u64>,
    total_pair_mass: u64,
    unigram_counts: Vec<u64>,
    postings: Vec<Vec<Posting>>,
    // derived
    adjacency: Vec<Vec<TermId>>,
    doc_terms: Vec<Vec<(TermId, u32)>>,
    avg_doc_length: f64,
    neighbor_index: OnceLock<NeighborIndex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexSummary {
    pub vocabulary_size: usize,
    pub doc_count: usize,
    pub pair_count: usize,
    pub total_pair_mass: u64,
}

fn canonical(a: TermId, b: TermId) -> (TermId, TermId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

type PairMap = HashMap<(TermId, TermId), u64>;

fn count_document_pairs(ids: &[TermId], window: usize, into: &mut PairMap) {
    for i in 0..ids.len() {
        let end = (i + window).min(ids.len() - 1);
        for j in i + 1..=end {
            *into.entry(canonical(ids[i], ids[j])).or_insert(0) += 1;
        }
    }
}

/// Builds co-occurrence counts with window `window` and the inverted index.
pub fn build_index(collection: &DocumentCollection, window: usize) -> Result<CooccurrenceIndex> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be >= 1".into()));
    }
    if collection.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vocabulary = collection.vocabulary.clone();
    let docs: Vec<Vec<TermId>> = collection
        .documents
        .iter()
        .map(|d| {
            d.tokens
                .iter()
                .map(|t| vocabulary.id(t).expect("token interned at ingestion"))
                .collect()
        })
        .collect();

    let pair_counts = docs
        .par_iter()
        .fold(PairMap::new, |mut acc, ids| {
            count_document_pairs(ids, window, &mut acc);
            acc
        })
        .reduce(PairMap::new, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            for (k, v) in small {
                *big.entry(k).or_insert(0) += v;
            }
            big
        });

    let mut postings: Vec<Vec<Posting>> = vec![Vec::new(); vocabulary.len()];
    let mut doc_lengths = Vec::with_capacity(docs.len());
    for (d, ids) in docs.iter().enumerate() {
        doc_lengths.push(ids.len() as u32);
        let mut tf: HashMap<TermId, u32> = HashMap::new();
        for &t in ids {
            *tf.entry(t).or_insert(0) += 1;
        }
        let mut tf: Vec<_> = tf.into_iter().collect();
        tf.sort_unstable();
        for (t, n) in tf {
            postings[t as usize].push(Posting {
                doc: d as DocIndex,
                tf: n,
            });
        }
    }
    let doc_ids: Vec<String> = collection.documents.iter().map(|d| d.id.clone()).collect();
    Ok(CooccurrenceIndex::assemble(
        window,
        collection.tokenizer,
        vocabulary,
        doc_ids,
        doc_lengths,
        pair_counts,
        postings,
    ))
}

impl CooccurrenceIndex {
    fn assemble(
        window: usize,
        tokenizer: TokenizerConfig,
        vocabulary: Vocabulary,
        doc_ids: Vec<String>,
        doc_lengths: Vec<u32>,
        pair_counts: PairMap,
        postings: Vec<Vec<Posting>>,
    ) -> Self {
        let n_terms = vocabulary.len();
        let total_pair_mass = pair_counts.values().sum();
        let mut adjacency: Vec<Vec<TermId>> = vec![Vec::new(); n_terms];
        for &(a, b) in pair_counts.keys() {
            adjacency[a as usize].push(b);
            if a != b {
                adjacency[b as usize].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut unigram_counts = vec![0u64; n_terms];
        let mut doc_terms: Vec<Vec<(TermId, u32)>> = vec![Vec::new(); doc_ids.len()];
        for (t, list) in postings.iter().enumerate() {
            for p in list {
                unigram_counts[t] += u64::from(p.tf);
                doc_terms[p.doc as usize].push((t as TermId, p.tf));
            }
        }
        let total_len: u64 = doc_lengths.iter().map(|&l| u64::from(l)).sum();
        let avg_doc_length = total_len as f64 / doc_lengths.len() as f64;
        let doc_lookup = doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as DocIndex))
            .collect();
        Self {
            window,
            tokenizer,
            vocabulary,
            doc_ids,
            doc_lookup,
            doc_lengths,
            pair_counts,
            total_pair_mass,
            unigram_counts,
            postings,
            adjacency,
            doc_terms,
            avg_doc_length,
            neighbor_index: OnceLock::new(),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Tokenizer the corpus was ingested with; dictionary candidates must be
    /// normalized the same way to match index terms.
    pub fn tokenizer(&self) -> TokenizerConfig {
        self.tokenizer
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn term_id(&self, term: &str) -> Option<TermId> {
        self.vocabulary.id(term)
    }

    pub fn summary(&self) -> IndexSummary {
        IndexSummary {
            vocabulary_size: self.vocabulary.len(),
            doc_count: self.doc_ids.len(),
            pair_count: self.pair_counts.len(),
            total_pair_mass: self.total_pair_mass,
        }
    }

    pub fn pair_count_ids(&self, a: TermId, b: TermId) -> u64 {
        self.pair_counts.get(&canonical(a, b)).copied().unwrap_or(0)
    }

    /// Co-occurrence count of two terms; 0 when either is unknown.
    pub fn pair_count(&self, a: &str, b: &str) -> u64 {
        match (self.term_id(a), self.term_id(b)) {
            (Some(a), Some(b)) => self.pair_count_ids(a, b),
            _ => 0,
        }
    }

    /// Binary adjacency `a_{x,y}`.
    pub fn cooccurs(&self, a: &str, b: &str) -> bool {
        self.pair_count(a, b) > 0
    }

    pub fn cooccurs_ids(&self, a: TermId, b: TermId) -> bool {
        self.pair_count_ids(a, b) > 0
    }

    /// Terms adjacent to `term` (sorted by id).
    pub fn adjacent(&self, term: TermId) -> &[TermId] {
        &self.adjacency[term as usize]
    }

    pub fn total_pair_mass(&self) -> u64 {
        self.total_pair_mass
    }

    /// `pair_count(a, b) / total_pair_mass`, 0 for unseen pairs or unknown terms.
    pub fn joint_probability(&self, a: &str, b: &str) -> Result<f64> {
        if self.total_pair_mass == 0 {
            return Err(Error::NoCooccurrenceMass);
        }
        Ok(self.pair_count(a, b) as f64 / self.total_pair_mass as f64)
    }

    /// Like [`joint_probability`](Self::joint_probability) but returns 0 on an
    /// empty index instead of an error.
    pub fn joint_probability_ids(&self, a: TermId, b: TermId) -> f64 {
        if self.total_pair_mass == 0 {
            return 0.0;
        }
        self.pair_count_ids(a, b) as f64 / self.total_pair_mass as f64
    }

    /// All canonical pairs `(a <= b)` with their counts, sorted.
    pub fn canonical_pairs(&self) -> Vec<((TermId, TermId), u64)> {
        let mut pairs: Vec<_> = self.pair_counts.iter().map(|(&k, &v)| (k, v)).collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn unigram_count(&self, term: &str) -> u64 {
        self.term_id(term)
            .map(|t| self.unigram_counts[t as usize])
            .unwrap_or(0)
    }

    pub fn unigram_count_id(&self, term: TermId) -> u64 {
        self.unigram_counts[term as usize]
    }

    pub fn postings(&self, term: TermId) -> &[Posting] {
        &self.postings[term as usize]
    }

    pub fn doc_freq(&self, term: TermId) -> usize {
        self.postings[term as usize].len()
    }

    pub fn term_freq(&self, term: TermId, doc: DocIndex) -> u32 {
        let list = &self.postings[term as usize];
        list.binary_search_by_key(&doc, |p| p.doc)
            .map(|i| list[i].tf)
            .unwrap_or(0)
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_id(&self, doc: DocIndex) -> &str {
        &self.doc_ids[doc as usize]
    }

    pub fn doc_index(&self, doc_id: &str) -> Option<DocIndex> {
        self.doc_lookup.get(doc_id).copied()
    }

    pub fn doc_length(&self, doc: DocIndex) -> u32 {
        self.doc_lengths[doc as usize]
    }

    /// `(term, tf)` pairs of a document, sorted by term id.
    pub fn doc_terms(&self, doc: DocIndex) -> &[(TermId, u32)] {
        &self.doc_terms[doc as usize]
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    /// Length-bucketed fuzzy lookup structure over the vocabulary, built on
    /// first use.
    pub fn neighbor_index(&self) -> &NeighborIndex {
        self.neighbor_index
            .get_or_init(|| NeighborIndex::new(self.vocabulary.terms()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = self.to_bytes();
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        format::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        format::decode(bytes)
    }
}

pub fn save_index(index: &CooccurrenceIndex, path: impl AsRef<Path>) -> Result<()> {
    index.save(path)
}

pub fn load_index(path: impl AsRef<Path>) -> Result<CooccurrenceIndex> {
    CooccurrenceIndex::load(path)
}
