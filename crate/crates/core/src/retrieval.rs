//! Okapi BM25 ranked retrieval over the corpus index.
//!
//! A query is a list of weighted nodes. A node is either a single term or a
//! synonym group; a group behaves as one pseudo-term whose frequency in a
//! document is the sum of its members' frequencies and whose document
//! frequency is the number of documents containing any member.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::baselines::StructuredQuery;
use crate::corpus_index::{CooccurrenceIndex, DocIndex, TermId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfParams {
    pub fb_docs: usize,
    pub fb_terms: usize,
    pub fb_alpha: f64,
}

impl Default for PrfParams {
    fn default() -> Self {
        Self {
            fb_docs: 10,
            fb_terms: 20,
            fb_alpha: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryNode {
    /// One term, or the members of a synonym group.
    pub terms: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Query {
    pub nodes: Vec<QueryNode>,
}

impl Query {
    /// Bag of words; a repeated term becomes one node with summed weight.
    pub fn from_terms<S: AsRef<str>>(terms: &[S]) -> Self {
        let mut q = Query::default();
        for t in terms {
            q.add_term(t.as_ref(), 1.0);
        }
        q
    }

    /// One node per synonym group; multi-token members contribute each token.
    pub fn from_structured(sq: &StructuredQuery) -> Self {
        let nodes = sq
            .groups
            .iter()
            .map(|g| {
                let mut terms: Vec<String> = Vec::new();
                for m in &g.members {
                    for t in m.tokens() {
                        if !terms.contains(t) {
                            terms.push(t.clone());
                        }
                    }
                }
                QueryNode { terms, weight: 1.0 }
            })
            .filter(|n| !n.terms.is_empty())
            .collect();
        Query { nodes }
    }

    /// Adds `weight` to the node containing `term`, or appends a new node.
    pub fn add_term(&mut self, term: &str, weight: f64) {
        if let Some(node) = self
            .nodes
            .iter_mut()
            .find(|n| n.terms.iter().any(|t| t == term))
        {
            node.weight += weight;
        } else {
            self.nodes.push(QueryNode {
                terms: vec![term.to_string()],
                weight,
            });
        }
    }

    pub fn contains_term(&self, term: &str) -> bool {
        self.nodes.iter().any(|n| n.terms.iter().any(|t| t == term))
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.iter().all(|n| n.terms.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub doc_id: String,
    pub score: f64,
}

/// Hits in descending score order, ties by ascending doc id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub hits: Vec<Hit>,
    pub k: usize,
}

pub fn idf(doc_count: usize, df: usize) -> f64 {
    let n = doc_count as f64;
    let df = df as f64;
    ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
}

/// Per-document tf of a node (summed over members) keyed by document.
fn node_postings(index: &CooccurrenceIndex, node: &QueryNode) -> BTreeMap<DocIndex, u32> {
    let ids: BTreeSet<TermId> = node.terms.iter().filter_map(|t| index.term_id(t)).collect();
    let mut tf: BTreeMap<DocIndex, u32> = BTreeMap::new();
    for id in ids {
        for p in index.postings(id) {
            *tf.entry(p.doc).or_insert(0) += p.tf;
        }
    }
    tf
}

fn saturate(tf: f64, dl: f64, avgdl: f64, params: &Bm25Params) -> f64 {
    tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * dl / avgdl))
}

/// BM25 score of one document for a bag-of-words query.
pub fn bm25_score<S: AsRef<str>>(
    index: &CooccurrenceIndex,
    query_terms: &[S],
    doc_id: &str,
    params: &Bm25Params,
) -> Result<f64> {
    let doc = index
        .doc_index(doc_id)
        .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))?;
    score_document(index, &Query::from_terms(query_terms), doc, params)
}

pub fn score_document(
    index: &CooccurrenceIndex,
    query: &Query,
    doc: DocIndex,
    params: &Bm25Params,
) -> Result<f64> {
    if doc as usize >= index.doc_count() {
        return Err(Error::UnknownDocument(doc.to_string()));
    }
    let dl = f64::from(index.doc_length(doc));
    let mut score = 0.0;
    for node in &query.nodes {
        let postings = node_postings(index, node);
        if let Some(&tf) = postings.get(&doc) {
            let w = idf(index.doc_count(), postings.len());
            score += node.weight * w * saturate(f64::from(tf), dl, index.avg_doc_length(), params);
        }
    }
    Ok(score)
}

/// Top-`k` documents for `query`.
pub fn retrieve(
    index: &CooccurrenceIndex,
    query_id: &str,
    query: &Query,
    k: usize,
    params: &Bm25Params,
) -> RankedList {
    let mut list = RankedList {
        query_id: query_id.to_string(),
        hits: Vec::new(),
        k,
    };
    if query.is_empty() {
        log::warn!("query {query_id:?} is empty");
        return list;
    }
    let avgdl = index.avg_doc_length();
    let mut scores: HashMap<DocIndex, f64> = HashMap::new();
    for node in &query.nodes {
        let postings = node_postings(index, node);
        if postings.is_empty() {
            continue;
        }
        let w = idf(index.doc_count(), postings.len());
        for (doc, tf) in postings {
            let dl = f64::from(index.doc_length(doc));
            *scores.entry(doc).or_insert(0.0) +=
                node.weight * w * saturate(f64::from(tf), dl, avgdl, params);
        }
    }
    let mut hits: Vec<Hit> = scores
        .into_iter()
        .map(|(doc, score)| Hit {
            doc_id: index.doc_id(doc).to_string(),
            score,
        })
        .collect();
    sort_hits(&mut hits);
    hits.truncate(k);
    list.hits = hits;
    list
}

pub(crate) fn sort_hits(hits: &mut [Hit]) {
    hits.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
}

/// Expands `original` with the highest `Σ tf·idf` terms of the top
/// `fb_docs` documents of `initial`. Each selected term gets weight
/// `fb_alpha`; terms already in the query have that weight added to their
/// node instead of being duplicated.
pub fn prf_expand(
    index: &CooccurrenceIndex,
    original: &Query,
    initial: &RankedList,
    params: &PrfParams,
) -> Query {
    let mut expanded = original.clone();
    if params.fb_terms == 0 || params.fb_docs == 0 {
        return expanded;
    }
    if initial.hits.is_empty() {
        log::warn!("no feedback documents for query {:?}", initial.query_id);
        return expanded;
    }
    let mut weights: HashMap<TermId, f64> = HashMap::new();
    for hit in initial.hits.iter().take(params.fb_docs) {
        let Some(doc) = index.doc_index(&hit.doc_id) else {
            continue;
        };
        for &(t, tf) in index.doc_terms(doc) {
            *weights.entry(t).or_insert(0.0) +=
                f64::from(tf) * idf(index.doc_count(), index.doc_freq(t));
        }
    }
    let mut ranked: Vec<(&str, f64)> = weights
        .into_iter()
        .map(|(t, w)| (index.vocabulary().term(t), w))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    for (term, _) in ranked.into_iter().take(params.fb_terms) {
        expanded.add_term(term, params.fb_alpha);
    }
    expanded
}
