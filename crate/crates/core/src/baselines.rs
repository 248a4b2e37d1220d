//! Comparison systems: rank-based top-N selection and structured queries
//! that group all translations of a term into one synonym set.

use std::fmt;

use crate::error::{Error, Result};
use crate::lexicon::{BilingualDictionary, Candidate};
use crate::translit::{transliterate_oov, TermSet, TransliterationTable};

/// Transliteration settings for out-of-vocabulary source terms.
#[derive(Clone, Copy)]
pub struct OovTransliterator<'a> {
    pub table: &'a TransliterationTable,
    pub vocabulary: &'a dyn TermSet,
    pub cap: usize,
}

impl OovTransliterator<'_> {
    fn candidates(&self, term: &str) -> Vec<Candidate> {
        transliterate_oov(term, self.table, self.vocabulary, self.cap)
            .candidates
            .into_iter()
            .map(Candidate::single)
            .collect()
    }
}

fn oov_candidates(term: &str, oov: Option<&OovTransliterator<'_>>) -> Vec<Candidate> {
    match oov {
        Some(t) => t.candidates(term),
        None => {
            log::warn!(
                "{term:?} is not in the dictionary and no transliteration table is loaded; dropped"
            );
            Vec::new()
        }
    }
}

/// Per-term selections of a top-N translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopNTranslation {
    pub per_term: Vec<(String, Vec<Candidate>)>,
}

impl TopNTranslation {
    /// Flat bag of target tokens.
    pub fn terms(&self) -> Vec<String> {
        self.per_term
            .iter()
            .flat_map(|(_, cs)| cs.iter().flat_map(|c| c.tokens().iter().cloned()))
            .collect()
    }
}

/// Keeps the first `min(n, |c_i|)` dictionary candidates of every term.
/// Terms missing from the dictionary are transliterated when `oov` is given
/// and contribute nothing otherwise.
pub fn top_n_translate(
    query: &[String],
    dict: &BilingualDictionary,
    n: usize,
    oov: Option<&OovTransliterator<'_>>,
) -> Result<TopNTranslation> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let per_term = query
        .iter()
        .map(|q| {
            let cands = dict.lookup(q);
            let chosen: Vec<Candidate> = if cands.is_empty() {
                oov_candidates(q, oov).into_iter().take(n).collect()
            } else {
                cands.iter().take(n).cloned().collect()
            };
            (q.clone(), chosen)
        })
        .collect();
    Ok(TopNTranslation { per_term })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynonymGroup {
    pub source: String,
    pub members: Vec<Candidate>,
}

/// One synonym group per source term; retrieval treats each group as a
/// single pseudo-term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructuredQuery {
    pub groups: Vec<SynonymGroup>,
}

pub fn pirkola_structured(
    query: &[String],
    dict: &BilingualDictionary,
    oov: Option<&OovTransliterator<'_>>,
) -> StructuredQuery {
    let groups = query
        .iter()
        .filter_map(|q| {
            let cands = dict.lookup(q);
            let members = if cands.is_empty() {
                oov_candidates(q, oov)
            } else {
                cands.to_vec()
            };
            (!members.is_empty()).then(|| SynonymGroup {
                source: q.clone(),
                members,
            })
        })
        .collect();
    StructuredQuery { groups }
}

impl fmt::Display for StructuredQuery {
    /// `{c1|c2} {c3}`; multi-token members keep their inner spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str("{")?;
            for (j, m) in g.members.iter().enumerate() {
                if j > 0 {
                    f.write_str("|")?;
                }
                f.write_str(&m.surface())?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl StructuredQuery {
    /// Parses the `{c1|c2} {c3}` form. Source terms are not part of the
    /// serialization and come back empty.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidArgument(format!("structured query {text:?}: {msg}"));
        let mut groups = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('{') else {
                return Err(bad("expected '{'"));
            };
            let Some(end) = body.find('}') else {
                return Err(bad("unterminated group"));
            };
            let mut members = Vec::new();
            for m in body[..end].split('|') {
                let tokens: Vec<String> = m.split_whitespace().map(String::from).collect();
                if tokens.is_empty() {
                    return Err(bad("empty group member"));
                }
                members.push(Candidate::new(tokens));
            }
            groups.push(SynonymGroup {
                source: String::new(),
                members,
            });
            rest = body[end + 1..].trim_start();
        }
        Ok(StructuredQuery { groups })
    }
}
