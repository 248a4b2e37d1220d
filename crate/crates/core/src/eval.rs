//! TREC-style evaluation: qrels and run files, AP / MAP, P@k and 11-point
//! interpolated precision. Relevance grades above zero count as relevant.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::retrieval::{sort_hits, Hit, RankedList};

pub const RECALL_LEVELS: usize = 11;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) -> Result<()> {
        let q = self.judgments.entry(query_id.to_string()).or_default();
        if q.insert(doc_id.to_string(), grade).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate judgment for ({query_id}, {doc_id})"
            )));
        }
        Ok(())
    }

    pub fn is_relevant(&self, query_id: &str, doc_id: &str) -> bool {
        self.judgments
            .get(query_id)
            .and_then(|q| q.get(doc_id))
            .is_some_and(|&g| g > 0)
    }

    pub fn num_relevant(&self, query_id: &str) -> usize {
        self.judgments
            .get(query_id)
            .map(|q| q.values().filter(|&&g| g > 0).count())
            .unwrap_or(0)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }
}

/// Parses `query_id 0 doc_id grade` lines.
pub fn parse_qrels(text: &str, source_name: &str) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::malformed(
                source_name,
                lineno,
                "expected `query_id 0 doc_id grade`",
            ));
        }
        let grade: i64 = f[3]
            .parse()
            .map_err(|_| Error::malformed(source_name, lineno, format!("bad grade {:?}", f[3])))?;
        let grade = u32::try_from(grade.max(0)).unwrap_or(u32::MAX);
        qrels
            .insert(f[0], f[2], grade)
            .map_err(|e| Error::malformed(source_name, lineno, e.to_string()))?;
    }
    Ok(qrels)
}

pub fn read_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_qrels(&text, &path.display().to_string())
}

/// A set of ranked lists sharing one run tag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Run {
    pub tag: String,
    pub lists: Vec<RankedList>,
    pub warnings: Vec<String>,
}

impl Run {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            ..Default::default()
        }
    }

    pub fn list(&self, query_id: &str) -> Option<&RankedList> {
        self.lists.iter().find(|l| l.query_id == query_id)
    }
}

/// One ranked list in TREC run format; ranks start at 1.
pub fn format_ranked_list(list: &RankedList, run_tag: &str) -> String {
    let mut out = String::new();
    for (i, h) in list.hits.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} Q0 {} {} {:.6} {}",
            list.query_id,
            h.doc_id,
            i + 1,
            h.score,
            run_tag
        );
    }
    out
}

pub fn format_run(run: &Run) -> String {
    run.lists
        .iter()
        .map(|l| format_ranked_list(l, &run.tag))
        .collect()
}

pub fn write_run(run: &Run, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_run(run)).map_err(|e| Error::io(path, e))
}

/// Parses `query_id Q0 doc_id rank score run_tag` lines. Lists are ordered
/// by rank; if that order contradicts the scores the list is re-sorted by
/// score (ties by doc id) and a warning is recorded.
pub fn parse_run(text: &str, source_name: &str) -> Result<Run> {
    let mut run = Run::default();
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(usize, Hit)>> = HashMap::new();
    let warn = |run: &mut Run, msg: String| {
        log::warn!("{msg}");
        run.warnings.push(msg);
    };
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(Error::malformed(
                source_name,
                lineno,
                "expected `query_id Q0 doc_id rank score run_tag`",
            ));
        }
        let rank: usize = f[3]
            .parse()
            .map_err(|_| Error::malformed(source_name, lineno, format!("bad rank {:?}", f[3])))?;
        let score: f64 = f[4]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| {
                Error::malformed(source_name, lineno, format!("bad score {:?}", f[4]))
            })?;
        if run.tag.is_empty() {
            run.tag = f[5].to_string();
        } else if run.tag != f[5] {
            let msg = format!(
                "{source_name}:{lineno}: run tag {:?} differs from {:?}",
                f[5], run.tag
            );
            warn(&mut run, msg);
        }
        let qid = f[0].to_string();
        if !rows.contains_key(&qid) {
            order.push(qid.clone());
        }
        rows.entry(qid).or_default().push((
            rank,
            Hit {
                doc_id: f[2].to_string(),
                score,
            },
        ));
    }
    for qid in order {
        let mut entries = rows.remove(&qid).unwrap_or_default();
        entries.sort_by_key(|(rank, _)| *rank);
        let mut seen = HashSet::new();
        let mut hits: Vec<Hit> = Vec::with_capacity(entries.len());
        for (_, h) in entries {
            if seen.insert(h.doc_id.clone()) {
                hits.push(h);
            } else {
                warn(
                    &mut run,
                    format!(
                        "{source_name}: query {qid}: duplicate doc {} dropped",
                        h.doc_id
                    ),
                );
            }
        }
        if hits.windows(2).any(|w| w[0].score < w[1].score) {
            warn(
                &mut run,
                format!(
                    "{source_name}: query {qid}: ranks disagree with scores, re-ranked by score"
                ),
            );
            sort_hits(&mut hits);
        }
        let k = hits.len();
        run.lists.push(RankedList {
            query_id: qid,
            hits,
            k,
        });
    }
    Ok(run)
}

pub fn read_run(path: impl AsRef<Path>) -> Result<Run> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_run(&text, &path.display().to_string())
}

/// Average precision; `None` when the query has no relevant documents.
pub fn average_precision(list: &RankedList, qrels: &Qrels, query_id: &str) -> Option<f64> {
    let total = qrels.num_relevant(query_id);
    if total == 0 {
        return None;
    }
    let mut found = 0usize;
    let mut sum = 0.0;
    for (i, h) in list.hits.iter().enumerate() {
        if qrels.is_relevant(query_id, &h.doc_id) {
            found += 1;
            sum += found as f64 / (i + 1) as f64;
        }
    }
    Some(sum / total as f64)
}

/// Fraction of the top `k` ranks holding relevant documents; missing ranks
/// count as non-relevant.
pub fn precision_at_k(list: &RankedList, qrels: &Qrels, query_id: &str, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let hits = list
        .hits
        .iter()
        .take(k)
        .filter(|h| qrels.is_relevant(query_id, &h.doc_id))
        .count();
    hits as f64 / k as f64
}

/// Interpolated precision at recall 0.0, 0.1, ..., 1.0: the best precision
/// at any rank whose recall reaches the level (0 if none does).
pub fn interpolated_pr(
    list: &RankedList,
    qrels: &Qrels,
    query_id: &str,
) -> Option<[f64; RECALL_LEVELS]> {
    let total = qrels.num_relevant(query_id);
    if total == 0 {
        return None;
    }
    // (relevant found so far, precision) at each relevant rank
    let mut points: Vec<(usize, f64)> = Vec::new();
    let mut found = 0usize;
    for (i, h) in list.hits.iter().enumerate() {
        if qrels.is_relevant(query_id, &h.doc_id) {
            found += 1;
            points.push((found, found as f64 / (i + 1) as f64));
        }
    }
    // suffix maximum of precision
    let mut best_from = vec![0.0f64; points.len() + 1];
    for i in (0..points.len()).rev() {
        best_from[i] = best_from[i + 1].max(points[i].1);
    }
    let mut out = [0.0; RECALL_LEVELS];
    for (level, slot) in out.iter_mut().enumerate() {
        // first point with found / total >= level / 10
        let first = points.partition_point(|&(f, _)| f * 10 < level * total);
        *slot = best_from[first];
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryEval {
    pub query_id: String,
    pub average_precision: f64,
    pub p5: f64,
    pub p10: f64,
    pub interpolated: [f64; RECALL_LEVELS],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_query: Vec<QueryEval>,
    pub map: f64,
    pub p5: f64,
    pub p10: f64,
    pub interpolated: [f64; RECALL_LEVELS],
}

/// Evaluates every query that has at least one relevant document; queries
/// missing from the run score zero.
pub fn evaluate(run: &Run, qrels: &Qrels) -> EvalReport {
    let empty = RankedList {
        query_id: String::new(),
        hits: Vec::new(),
        k: 0,
    };
    let mut per_query = Vec::new();
    for qid in qrels.query_ids() {
        let list = run.list(qid).unwrap_or(&empty);
        let Some(ap) = average_precision(list, qrels, qid) else {
            log::warn!("query {qid} has no relevant documents, excluded");
            continue;
        };
        per_query.push(QueryEval {
            query_id: qid.to_string(),
            average_precision: ap,
            p5: precision_at_k(list, qrels, qid, 5),
            p10: precision_at_k(list, qrels, qid, 10),
            interpolated: interpolated_pr(list, qrels, qid).expect("has relevant docs"),
        });
    }
    let n = per_query.len().max(1) as f64;
    let mean = |f: &dyn Fn(&QueryEval) -> f64| per_query.iter().map(f).sum::<f64>() / n;
    let mut interpolated = [0.0; RECALL_LEVELS];
    for (i, slot) in interpolated.iter_mut().enumerate() {
        *slot = mean(&|q| q.interpolated[i]);
    }
    EvalReport {
        map: mean(&|q| q.average_precision),
        p5: mean(&|q| q.p5),
        p10: mean(&|q| q.p10),
        interpolated,
        per_query,
    }
}

impl EvalReport {
    fn rows(&self) -> Vec<(String, String, f64)> {
        let mut rows = Vec::new();
        let push = |rows: &mut Vec<_>, qid: &str, ap, p5, p10, ipr: &[f64; RECALL_LEVELS]| {
            rows.push(("map".to_string(), qid.to_string(), ap));
            rows.push(("P_5".to_string(), qid.to_string(), p5));
            rows.push(("P_10".to_string(), qid.to_string(), p10));
            for (i, v) in ipr.iter().enumerate() {
                rows.push((
                    format!("iprec_at_recall_{:.2}", i as f64 / 10.0),
                    qid.to_string(),
                    *v,
                ));
            }
        };
        for q in &self.per_query {
            push(
                &mut rows,
                &q.query_id,
                q.average_precision,
                q.p5,
                q.p10,
                &q.interpolated,
            );
        }
        rows.push((
            "num_q".to_string(),
            "all".to_string(),
            self.per_query.len() as f64,
        ));
        push(
            &mut rows,
            "all",
            self.map,
            self.p5,
            self.p10,
            &self.interpolated,
        );
        rows
    }

    fn value(metric: &str, v: f64) -> String {
        if metric == "num_q" {
            format!("{v}")
        } else {
            format!("{v:.4}")
        }
    }

    /// Column-aligned plain text.
    pub fn to_text(&self) -> String {
        let rows = self.rows();
        let qw = rows.iter().map(|r| r.1.len()).max().unwrap_or(3);
        let mut out = String::new();
        for (m, q, v) in rows {
            let _ = writeln!(out, "{m:<22} {q:<qw$} {}", Self::value(&m, v));
        }
        out
    }

    /// One `metric<TAB>query_id|all<TAB>value` line per metric.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (m, q, v) in self.rows() {
            let _ = writeln!(out, "{m}\t{q}\t{}", Self::value(&m, v));
        }
        out
    }
}
