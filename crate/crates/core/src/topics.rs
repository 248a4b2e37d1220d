//! Topic files and translated-query files.
//!
//! Topics: `query_id<TAB>query text`. Translations: `query_id<TAB>terms`,
//! where `terms` is either space-joined target terms or a structured query
//! `{c1|c2} {c3}`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::baselines::StructuredQuery;
use crate::error::{Error, Result};
use crate::mesc_model::{ChosenFrom, ScoredCandidate, TranslationResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub id: String,
    pub text: String,
}

fn parse_tab_lines(text: &str, source_name: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, body)) = line.split_once('\t') else {
            return Err(Error::malformed(
                source_name,
                lineno,
                "expected query_id<TAB>text",
            ));
        };
        let id = id.trim();
        if id.is_empty() {
            return Err(Error::malformed(source_name, lineno, "empty query_id"));
        }
        if !ids.insert(id.to_string()) {
            return Err(Error::malformed(
                source_name,
                lineno,
                format!("duplicate query_id {id:?}"),
            ));
        }
        out.push((lineno, id.to_string(), body.to_string()));
    }
    Ok(out)
}

pub fn parse_topics(text: &str, source_name: &str) -> Result<Vec<Topic>> {
    Ok(parse_tab_lines(text, source_name)?
        .into_iter()
        .map(|(_, id, text)| Topic { id, text })
        .collect())
}

pub fn read_topics(path: impl AsRef<Path>) -> Result<Vec<Topic>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_topics(&text, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslatedQuery {
    Terms(Vec<String>),
    Structured(StructuredQuery),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationLine {
    pub query_id: String,
    pub query: TranslatedQuery,
}

impl TranslationLine {
    pub fn to_line(&self) -> String {
        match &self.query {
            TranslatedQuery::Terms(t) => format!("{}\t{}\n", self.query_id, t.join(" ")),
            TranslatedQuery::Structured(s) => format!("{}\t{}\n", self.query_id, s),
        }
    }
}

/// Parses a translation file; a body starting with `{` is read as a
/// structured query.
pub fn parse_translations(text: &str, source_name: &str) -> Result<Vec<TranslationLine>> {
    parse_tab_lines(text, source_name)?
        .into_iter()
        .map(|(lineno, id, body)| {
            let body = body.trim();
            let query = if body.starts_with('{') {
                TranslatedQuery::Structured(
                    StructuredQuery::parse(body)
                        .map_err(|e| Error::malformed(source_name, lineno, e.to_string()))?,
                )
            } else {
                TranslatedQuery::Terms(body.split_whitespace().map(String::from).collect())
            };
            Ok(TranslationLine {
                query_id: id,
                query,
            })
        })
        .collect()
}

pub fn read_translations(path: impl AsRef<Path>) -> Result<Vec<TranslationLine>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_translations(&text, &path.display().to_string())
}

#[derive(Serialize)]
struct DiagnosticRecord<'a> {
    query_id: &'a str,
    term: usize,
    source: &'a str,
    chosen: String,
    chosen_from: ChosenFrom,
    score: f64,
    fallback_used: bool,
    unverified: bool,
    candidates: &'a [ScoredCandidate],
}

/// One JSON object per query term with every scored candidate.
pub fn diagnostics_lines(query_id: &str, result: &TranslationResult) -> String {
    let mut out = String::new();
    for (i, t) in result.terms.iter().enumerate() {
        let rec = DiagnosticRecord {
            query_id,
            term: i + 1,
            source: &t.source,
            chosen: t.chosen.surface(),
            chosen_from: t.chosen_from,
            score: t.score,
            fallback_used: t.fallback_used,
            unverified: t.unverified,
            candidates: &t.diagnostics,
        };
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    }
    out
}
