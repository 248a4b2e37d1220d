//! Minimum-edit support candidates: query translation by co-occurrence.
//!
//! For query term `i` with dictionary candidates `c_i`, the support list
//! `s_i` holds every vocabulary term at edit distance 1 or 2 from some token
//! of `c_i` that co-occurs (within the index window) with some dictionary
//! candidate of another query term. Dictionary candidates are then scored
//! by their summed joint probabilities with the dictionary and support
//! candidates of the other terms; support candidates only against the other
//! terms' dictionary candidates. Per-term scores are normalized into a
//! distribution and the most probable candidate is chosen.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::corpus_index::{CooccurrenceIndex, TermId};
use crate::lexicon::{BilingualDictionary, Candidate};
use crate::translit::{transliterate_oov, TransliterationTable, DEFAULT_VARIANT_CAP};

pub const DEFAULT_MIN_SUPPORT_STEM_LEN: usize = 3;

#[derive(Debug, Clone)]
pub struct MescConfig {
    /// Candidate tokens shorter than this (in code points) are not used as
    /// edit-distance anchors.
    pub min_support_stem_len: usize,
    pub variant_cap: usize,
    /// Source terms dropped before translation.
    pub stopwords: HashSet<String>,
}

impl Default for MescConfig {
    fn default() -> Self {
        Self {
            min_support_stem_len: DEFAULT_MIN_SUPPORT_STEM_LEN,
            variant_cap: DEFAULT_VARIANT_CAP,
            stopwords: HashSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Vocabulary term within edit distance of `anchor`, a token of one of
    /// the term's dictionary candidates.
    EditNeighbor {
        anchor: String,
        distance: usize,
    },
    Transliteration {
        unverified: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCandidate {
    pub candidate: Candidate,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermCandidates {
    pub source: String,
    pub dictionary: Vec<Candidate>,
    pub support: Vec<SupportCandidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryCandidates {
    pub terms: Vec<TermCandidates>,
}

impl QueryCandidates {
    /// Dictionary lookup per term; OOV terms get transliteration variants as
    /// their support list when a table is given.
    pub fn from_query(
        query: &[String],
        dict: &BilingualDictionary,
        index: &CooccurrenceIndex,
        table: Option<&TransliterationTable>,
        config: &MescConfig,
    ) -> Self {
        let terms = query
            .iter()
            .map(|q| {
                let dictionary = dict.lookup(q).to_vec();
                let mut support = Vec::new();
                if dictionary.is_empty() {
                    if let Some(table) = table {
                        let oov =
                            transliterate_oov(q, table, index.vocabulary(), config.variant_cap);
                        support = oov
                            .candidates
                            .into_iter()
                            .map(|v| SupportCandidate {
                                candidate: Candidate::single(v),
                                provenance: Provenance::Transliteration {
                                    unverified: oov.unverified,
                                },
                            })
                            .collect();
                    }
                }
                TermCandidates {
                    source: q.clone(),
                    dictionary,
                    support,
                }
            })
            .collect();
        QueryCandidates { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn candidate_ids(index: &CooccurrenceIndex, c: &Candidate) -> Vec<TermId> {
    c.tokens().iter().filter_map(|t| index.term_id(t)).collect()
}

/// Fills each term's support list with edit-distance neighbors of its
/// dictionary candidates that co-occur with a dictionary candidate of some
/// other term. Existing transliteration support entries are kept first.
pub fn extract_support_candidates(
    qc: &QueryCandidates,
    index: &CooccurrenceIndex,
    config: &MescConfig,
) -> QueryCandidates {
    let neighbor_index = index.neighbor_index();
    let dict_ids: Vec<HashSet<TermId>> = qc
        .terms
        .iter()
        .map(|t| {
            t.dictionary
                .iter()
                .flat_map(|c| candidate_ids(index, c))
                .collect()
        })
        .collect();

    let mut out = qc.clone();
    for (i, term) in out.terms.iter_mut().enumerate() {
        let others: HashSet<TermId> = dict_ids
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .flat_map(|(_, s)| s.iter().copied())
            .collect();
        if others.is_empty() {
            continue;
        }
        // term id -> (distance, anchor) with the smallest distance, first anchor wins
        let mut found: BTreeMap<TermId, (usize, String)> = BTreeMap::new();
        let mut anchors: Vec<&str> = Vec::new();
        for c in &term.dictionary {
            for tok in c.tokens() {
                if tok.chars().count() >= config.min_support_stem_len
                    && !anchors.contains(&tok.as_str())
                {
                    anchors.push(tok);
                }
            }
        }
        for anchor in anchors {
            for (v, distance) in neighbor_index.neighbors(anchor) {
                if let Some((d, _)) = found.get(&v) {
                    if *d <= distance {
                        continue;
                    }
                }
                let adjacent = index.adjacent(v);
                let hit = if adjacent.len() <= others.len() {
                    adjacent.iter().any(|y| others.contains(y))
                } else {
                    others.iter().any(|&y| index.cooccurs_ids(v, y))
                };
                if hit {
                    found.insert(v, (distance, anchor.to_string()));
                }
            }
        }
        let mut extra: Vec<SupportCandidate> = found
            .into_iter()
            .map(|(v, (distance, anchor))| SupportCandidate {
                candidate: Candidate::single(index.vocabulary().term(v)),
                provenance: Provenance::EditNeighbor { anchor, distance },
            })
            .filter(|s| !term.dictionary.contains(&s.candidate))
            .filter(|s| !term.support.iter().any(|e| e.candidate == s.candidate))
            .collect();
        extra.sort_by(|a, b| {
            let da = match &a.provenance {
                Provenance::EditNeighbor { distance, .. } => *distance,
                Provenance::Transliteration { .. } => 0,
            };
            let db = match &b.provenance {
                Provenance::EditNeighbor { distance, .. } => *distance,
                Provenance::Transliteration { .. } => 0,
            };
            da.cmp(&db).then_with(|| a.candidate.cmp(&b.candidate))
        });
        term.support.extend(extra);
    }
    out
}

/// Counts of joint-probability lookups by the lists the two sides come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScoringTrace {
    pub dict_dict: u64,
    pub dict_support: u64,
    pub support_dict: u64,
    pub support_support: u64,
}

impl ScoringTrace {
    fn merge(&mut self, other: ScoringTrace) {
        self.dict_dict += other.dict_dict;
        self.dict_support += other.dict_support;
        self.support_dict += other.support_dict;
        self.support_support += other.support_support;
    }
}

/// Raw per-candidate scores for every term, aligned with the candidate lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    pub scores: Vec<Vec<f64>>,
    pub trace: ScoringTrace,
}

struct Resolved {
    dict: Vec<Vec<Vec<TermId>>>,
    support: Vec<Vec<Vec<TermId>>>,
}

impl Resolved {
    fn new(qc: &QueryCandidates, index: &CooccurrenceIndex) -> Self {
        Resolved {
            dict: qc
                .terms
                .iter()
                .map(|t| {
                    t.dictionary
                        .iter()
                        .map(|c| candidate_ids(index, c))
                        .collect()
                })
                .collect(),
            support: qc
                .terms
                .iter()
                .map(|t| {
                    t.support
                        .iter()
                        .map(|s| candidate_ids(index, &s.candidate))
                        .collect()
                })
                .collect(),
        }
    }
}

/// Joint probability of two candidates: the largest joint probability over
/// their token pairs.
fn candidate_joint(index: &CooccurrenceIndex, x: &[TermId], y: &[TermId]) -> f64 {
    let mut best = 0.0f64;
    for &a in x {
        for &b in y {
            best = best.max(index.joint_probability_ids(a, b));
        }
    }
    best
}

/// `p_c[i][j] = Σ_{i'≠i} ( Σ_j' P(c_ij, c_i'j') + Σ_j' P(c_ij, s_i'j') )`.
pub fn score_dictionary_candidates(qc: &QueryCandidates, index: &CooccurrenceIndex) -> ScoreTable {
    let r = Resolved::new(qc, index);
    let mut trace = ScoringTrace::default();
    let scores = (0..qc.len())
        .map(|i| {
            r.dict[i]
                .iter()
                .map(|x| {
                    let mut sum = 0.0;
                    for k in (0..qc.len()).filter(|&k| k != i) {
                        for y in &r.dict[k] {
                            trace.dict_dict += 1;
                            sum += candidate_joint(index, x, y);
                        }
                        for y in &r.support[k] {
                            trace.dict_support += 1;
                            sum += candidate_joint(index, x, y);
                        }
                    }
                    sum
                })
                .collect()
        })
        .collect();
    ScoreTable { scores, trace }
}

/// `p_s[i][j] = Σ_{i'≠i} Σ_j' P(s_ij, c_i'j')`; support candidates of other
/// terms never contribute.
pub fn score_support_candidates(qc: &QueryCandidates, index: &CooccurrenceIndex) -> ScoreTable {
    let r = Resolved::new(qc, index);
    let mut trace = ScoringTrace::default();
    let scores = (0..qc.len())
        .map(|i| {
            r.support[i]
                .iter()
                .map(|x| {
                    let mut sum = 0.0;
                    for k in (0..qc.len()).filter(|&k| k != i) {
                        for y in &r.dict[k] {
                            trace.support_dict += 1;
                            sum += candidate_joint(index, x, y);
                        }
                    }
                    sum
                })
                .collect()
        })
        .collect();
    ScoreTable { scores, trace }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermDistribution {
    pub raw_dict: Vec<f64>,
    pub raw_support: Vec<f64>,
    pub p_dict: Vec<f64>,
    pub p_support: Vec<f64>,
    pub normalized: bool,
    /// All raw scores were zero; the distribution is uniform over the
    /// dictionary candidates (or over the transliteration variants when the
    /// term has no dictionary candidates).
    pub fallback_used: bool,
    /// The term has no candidates at all.
    pub untranslatable: bool,
}

impl TermDistribution {
    pub fn mass(&self) -> f64 {
        self.p_dict.iter().sum::<f64>() + self.p_support.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TranslationDistribution {
    pub terms: Vec<TermDistribution>,
    pub trace: ScoringTrace,
}

/// Raw (unnormalized) scores for all candidates of all terms.
pub fn raw_distribution(
    qc: &QueryCandidates,
    index: &CooccurrenceIndex,
) -> TranslationDistribution {
    let dict = score_dictionary_candidates(qc, index);
    let support = score_support_candidates(qc, index);
    let mut trace = dict.trace;
    trace.merge(support.trace);
    let terms = dict
        .scores
        .into_iter()
        .zip(support.scores)
        .map(|(d, s)| TermDistribution {
            p_dict: d.clone(),
            p_support: s.clone(),
            raw_dict: d,
            raw_support: s,
            ..Default::default()
        })
        .collect();
    TranslationDistribution { terms, trace }
}

/// Divides each term's raw scores by their sum. Zero-mass terms fall back to
/// a uniform distribution.
pub fn normalize(dist: &TranslationDistribution) -> TranslationDistribution {
    let terms = dist
        .terms
        .iter()
        .map(|t| {
            let mut t = t.clone();
            let sum = t.raw_dict.iter().sum::<f64>() + t.raw_support.iter().sum::<f64>();
            t.fallback_used = false;
            t.untranslatable = false;
            if sum > 0.0 {
                t.p_dict = t.raw_dict.iter().map(|x| x / sum).collect();
                t.p_support = t.raw_support.iter().map(|x| x / sum).collect();
            } else if !t.raw_dict.is_empty() {
                let u = 1.0 / t.raw_dict.len() as f64;
                t.p_dict = vec![u; t.raw_dict.len()];
                t.p_support = vec![0.0; t.raw_support.len()];
                t.fallback_used = true;
            } else if !t.raw_support.is_empty() {
                let u = 1.0 / t.raw_support.len() as f64;
                t.p_dict = Vec::new();
                t.p_support = vec![u; t.raw_support.len()];
                t.fallback_used = true;
            } else {
                t.p_dict = Vec::new();
                t.p_support = Vec::new();
                t.untranslatable = true;
            }
            t.normalized = true;
            t
        })
        .collect();
    TranslationDistribution {
        terms,
        trace: dist.trace,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateList {
    Dictionary,
    Support,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChosenFrom {
    Dictionary,
    Support,
    TransliterationFallback,
    /// No candidates: the source form is passed through.
    Passthrough,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredCandidate {
    pub candidate: String,
    pub list: CandidateList,
    /// 1-based position within its list.
    pub rank: usize,
    pub raw: f64,
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermTranslation {
    pub source: String,
    pub chosen: Candidate,
    pub chosen_from: ChosenFrom,
    pub score: f64,
    pub fallback_used: bool,
    /// The chosen transliteration variant is not in the corpus vocabulary.
    pub unverified: bool,
    pub diagnostics: Vec<ScoredCandidate>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TranslationResult {
    pub terms: Vec<TermTranslation>,
    pub trace: ScoringTrace,
}

impl TranslationResult {
    /// Chosen translations flattened to target tokens.
    pub fn target_terms(&self) -> Vec<String> {
        self.terms
            .iter()
            .flat_map(|t| t.chosen.tokens().iter().cloned())
            .collect()
    }
}

/// Orders two scored candidates: higher probability first, then dictionary
/// before support, then lower rank (dictionary), then lexicographic.
fn preference(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.probability
        .partial_cmp(&a.probability)
        .unwrap_or(Ordering::Equal)
        .then_with(|| match (a.list, b.list) {
            (CandidateList::Dictionary, CandidateList::Support) => Ordering::Less,
            (CandidateList::Support, CandidateList::Dictionary) => Ordering::Greater,
            (CandidateList::Dictionary, CandidateList::Dictionary) => a.rank.cmp(&b.rank),
            (CandidateList::Support, CandidateList::Support) => Ordering::Equal,
        })
        .then_with(|| a.candidate.cmp(&b.candidate))
}

/// Picks the most probable candidate per term.
pub fn select_translations(
    dist: &TranslationDistribution,
    qc: &QueryCandidates,
) -> TranslationResult {
    let terms = qc
        .terms
        .iter()
        .zip(&dist.terms)
        .map(|(tc, td)| {
            let mut scored: Vec<ScoredCandidate> = Vec::new();
            for (j, c) in tc.dictionary.iter().enumerate() {
                scored.push(ScoredCandidate {
                    candidate: c.surface(),
                    list: CandidateList::Dictionary,
                    rank: j + 1,
                    raw: td.raw_dict.get(j).copied().unwrap_or(0.0),
                    probability: td.p_dict.get(j).copied().unwrap_or(0.0),
                    provenance: None,
                });
            }
            for (j, s) in tc.support.iter().enumerate() {
                scored.push(ScoredCandidate {
                    candidate: s.candidate.surface(),
                    list: CandidateList::Support,
                    rank: j + 1,
                    raw: td.raw_support.get(j).copied().unwrap_or(0.0),
                    probability: td.p_support.get(j).copied().unwrap_or(0.0),
                    provenance: Some(s.provenance.clone()),
                });
            }
            if scored.is_empty() || td.untranslatable {
                log::warn!(
                    "no translation candidates for {:?}, passed through",
                    tc.source
                );
                return TermTranslation {
                    source: tc.source.clone(),
                    chosen: Candidate::single(tc.source.clone()),
                    chosen_from: ChosenFrom::Passthrough,
                    score: 0.0,
                    fallback_used: false,
                    unverified: false,
                    diagnostics: scored,
                };
            }
            let (best_pos, best) = if td.fallback_used && tc.dictionary.is_empty() {
                // transliteration-only term without evidence: first variant
                (0, &scored[0])
            } else {
                scored
                    .iter()
                    .enumerate()
                    .min_by(|x, y| preference(x.1, y.1))
                    .expect("non-empty")
            };
            let (chosen, unverified, chosen_from) = if best.list == CandidateList::Dictionary {
                (
                    tc.dictionary[best_pos].clone(),
                    false,
                    ChosenFrom::Dictionary,
                )
            } else {
                let s = &tc.support[best_pos - tc.dictionary.len()];
                let unverified = matches!(
                    s.provenance,
                    Provenance::Transliteration { unverified: true }
                );
                let from = if td.fallback_used {
                    ChosenFrom::TransliterationFallback
                } else {
                    ChosenFrom::Support
                };
                (s.candidate.clone(), unverified, from)
            };
            TermTranslation {
                source: tc.source.clone(),
                chosen,
                chosen_from,
                score: best.probability,
                fallback_used: td.fallback_used,
                unverified,
                diagnostics: scored.clone(),
            }
        })
        .collect();
    TranslationResult {
        terms,
        trace: dist.trace,
    }
}

/// Full pipeline for one query of already-normalized source terms.
pub fn translate_query(
    query: &[String],
    dict: &BilingualDictionary,
    index: &CooccurrenceIndex,
    table: Option<&TransliterationTable>,
    config: &MescConfig,
) -> TranslationResult {
    let query: Vec<String> = query
        .iter()
        .filter(|q| !config.stopwords.contains(q.as_str()))
        .cloned()
        .collect();
    let qc = QueryCandidates::from_query(&query, dict, index, table, config);
    let qc = extract_support_candidates(&qc, index, config);
    let dist = normalize(&raw_distribution(&qc, index));
    select_translations(&dist, &qc)
}
