//! One function per acceptance criterion. Each returns a short summary on
//! success and a description of the first violation on failure.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use mesc::baselines::{pirkola_structured, top_n_translate};
use mesc::corpus_index::CooccurrenceIndex;
use mesc::edit_distance::{med, within_distance};
use mesc::eval::{
    average_precision, evaluate, interpolated_pr, precision_at_k, read_qrels, read_run,
};
use mesc::lexicon::load_dictionary;
use mesc::mesc_model::{
    extract_support_candidates, normalize, raw_distribution, score_dictionary_candidates,
    score_support_candidates, select_translations, translate_query, ChosenFrom, MescConfig,
    QueryCandidates,
};
use mesc::retrieval::{bm25_score, retrieve, Bm25Params, Query};
use mesc::topics::read_topics;
use mesc::TokenizerConfig;
use rand::seq::IndexedRandom;
use rand::Rng;

use super::*;

pub type Check = Result<String, String>;

type Generator = fn(u64) -> Planted;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

pub const INSTANCES: u64 = 50;

// ------------------------------------------------------------ edit distance

pub fn edit_distance_oracle() -> Check {
    let start = Instant::now();
    let mut rng = rng(0xed17);
    let alphabet: Vec<char> = "abcâ".chars().collect();
    for _ in 0..1000 {
        let a = random_word(&mut rng, &alphabet, 0, 12);
        let b = random_word(&mut rng, &alphabet, 0, 12);
        let d = dp_med(&a, &b);
        ensure!(
            med(&a, &b) == d,
            "med({a:?}, {b:?}) = {} but DP gives {d}",
            med(&a, &b)
        );
        for k in 0..=2 {
            ensure!(
                within_distance(&a, &b, k) == (d <= k),
                "within_distance({a:?}, {b:?}, {k}) disagrees with DP distance {d}"
            );
        }
    }
    for _ in 0..1000 {
        let a = random_word(&mut rng, &alphabet, 0, 12);
        let b = random_word(&mut rng, &alphabet, 0, 12);
        let c = random_word(&mut rng, &alphabet, 0, 12);
        let (ab, ba, bc, ac) = (med(&a, &b), med(&b, &a), med(&b, &c), med(&a, &c));
        ensure!(med(&a, &a) == 0, "d(a, a) != 0 for {a:?}");
        ensure!(
            (ab == 0) == (a == b),
            "identity of indiscernibles fails for {a:?}, {b:?}"
        );
        ensure!(ab == ba, "asymmetric distance for {a:?}, {b:?}");
        ensure!(
            ac <= ab + bc,
            "triangle inequality fails for {a:?}, {b:?}, {c:?}"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 5.0, "took {elapsed:.2}s (limit 5s)");
    Ok(format!(
        "1000 pairs x k in 0..=2, 1000 triples, {elapsed:.3}s"
    ))
}

// ------------------------------------------------------------- support sets

fn extracted(inst: &Instance, cfg: &MescConfig) -> QueryCandidates {
    let qc = QueryCandidates::from_query(&inst.query, &inst.dict, &inst.index, None, cfg);
    extract_support_candidates(&qc, &inst.index, cfg)
}

pub fn support_equivalence() -> Check {
    let cfg = MescConfig::default();
    let mut nonempty = 0;
    for seed in 0..INSTANCES {
        let inst = random_instance(seed);
        let qc = extracted(&inst, &cfg);
        let oracle = support_oracle(
            &inst.docs,
            inst.window,
            &inst.dict,
            &inst.query,
            cfg.min_support_stem_len,
        );
        for (i, term) in qc.terms.iter().enumerate() {
            let got: BTreeSet<String> =
                term.support.iter().map(|s| s.candidate.surface()).collect();
            ensure!(
                got.len() == term.support.len(),
                "seed {seed}: duplicate support entries for term {i}"
            );
            ensure!(
                got == oracle[i],
                "seed {seed}, term {i}: got {got:?}, oracle {:?}",
                oracle[i]
            );
            nonempty += usize::from(!got.is_empty());
        }
    }
    ensure!(
        nonempty > 0,
        "no instance produced a support candidate; generator is degenerate"
    );
    Ok(format!(
        "{INSTANCES} instances, {nonempty} non-empty support sets, exact equality"
    ))
}

// ------------------------------------------------------------------ scoring

pub fn scoring_equivalence() -> Check {
    let cfg = MescConfig::default();
    let mut worst = 0.0f64;
    for seed in 0..INSTANCES {
        let inst = random_instance(seed);
        let qc = extracted(&inst, &cfg);
        let counts = NaiveCounts::new(&inst.docs, inst.window);
        let dict = score_dictionary_candidates(&qc, &inst.index);
        let support = score_support_candidates(&qc, &inst.index);
        let want_d = dict_score_oracle(&qc, &counts);
        let want_s = support_score_oracle(&qc, &counts);
        for (got, want) in [(&dict.scores, &want_d), (&support.scores, &want_s)] {
            ensure!(got.len() == want.len(), "seed {seed}: term count mismatch");
            for (g, w) in got.iter().zip(want) {
                ensure!(g.len() == w.len(), "seed {seed}: candidate count mismatch");
                for (x, y) in g.iter().zip(w) {
                    worst = worst.max((x - y).abs());
                    ensure!(
                        (x - y).abs() <= 1e-12,
                        "seed {seed}: score {x} vs oracle {y}"
                    );
                }
            }
        }
        let trace = raw_distribution(&qc, &inst.index).trace;
        ensure!(
            trace.support_support == 0,
            "seed {seed}: support-support lookups counted"
        );
        ensure!(
            dict.trace.support_support == 0 && support.trace.support_support == 0,
            "seed {seed}: support-support lookups"
        );
    }
    Ok(format!(
        "{INSTANCES} instances, max |diff| = {worst:e}, support-support lookups = 0"
    ))
}

// ------------------------------------------------------------ normalization

pub fn normalization() -> Check {
    let cfg = MescConfig::default();
    let (mut positive, mut zero) = (0, 0);
    let mut check =
        |qc: &QueryCandidates, index: &CooccurrenceIndex, label: &str| -> Result<(), String> {
            let dist = normalize(&raw_distribution(qc, index));
            let result = select_translations(&dist, qc);
            for (i, t) in dist.terms.iter().enumerate() {
                let raw: f64 = t.raw_dict.iter().chain(&t.raw_support).sum();
                if raw > 0.0 {
                    positive += 1;
                    ensure!(
                        (t.mass() - 1.0).abs() <= 1e-9,
                        "{label}, term {i}: mass {}",
                        t.mass()
                    );
                    ensure!(
                        !t.fallback_used,
                        "{label}, term {i}: fallback with positive mass"
                    );
                } else if !qc.terms[i].dictionary.is_empty() {
                    zero += 1;
                    ensure!(
                        t.fallback_used,
                        "{label}, term {i}: zero mass without fallback"
                    );
                    let u = 1.0 / t.p_dict.len() as f64;
                    ensure!(
                        t.p_dict.iter().all(|&p| (p - u).abs() <= 1e-15),
                        "{label}, term {i}: not uniform"
                    );
                    ensure!(
                        t.p_support.iter().all(|&p| p == 0.0),
                        "{label}, term {i}: support mass under fallback"
                    );
                    let chosen = &result.terms[i];
                    ensure!(
                        chosen.chosen == qc.terms[i].dictionary[0]
                            && chosen.chosen_from == ChosenFrom::Dictionary,
                        "{label}, term {i}: fallback chose {} instead of rank 1",
                        chosen.chosen
                    );
                }
            }
            Ok(())
        };
    for seed in 0..INSTANCES {
        let inst = random_instance(seed);
        let qc = extracted(&inst, &cfg);
        check(&qc, &inst.index, &format!("seed {seed}"))?;
    }
    // a query whose candidates never co-occur
    let docs = docs_from(&["aaa bbb", "ccc ddd"]);
    let index = index_of(&docs, 1);
    let dict = mesc::BilingualDictionary::from_entries(
        "zero",
        [
            (
                "x",
                vec![
                    mesc::Candidate::single("aaa"),
                    mesc::Candidate::single("bbb"),
                ],
            ),
            (
                "y",
                vec![
                    mesc::Candidate::single("ccc"),
                    mesc::Candidate::single("zzz"),
                ],
            ),
        ],
    );
    let q = vec!["x".to_string(), "y".to_string()];
    let qc = QueryCandidates::from_query(&q, &dict, &index, None, &cfg);
    check(
        &extract_support_candidates(&qc, &index, &cfg),
        &index,
        "disjoint corpus",
    )?;
    ensure!(
        zero > 0 && positive > 0,
        "instances exercised only one branch ({positive} positive, {zero} zero)"
    );
    Ok(format!(
        "{positive} positive-mass terms sum to 1 within 1e-9; {zero} zero-mass terms chose rank 1"
    ))
}

// -------------------------------------------------------- planted recovery

pub fn planted_recovery() -> Check {
    let cfg = MescConfig::default();
    let mut hits = [0u32; 2];
    let generators: [(&str, Generator); 2] = [
        ("inflection-pair", planted_inflection_pair),
        ("plural", planted_plural),
    ];
    for (g, (name, generate)) in generators.iter().enumerate() {
        for seed in 0..INSTANCES {
            let p = generate(seed);
            let index = index_of(&p.docs, window_for(seed));
            let r = translate_query(&p.query, &p.dict, &index, None, &cfg);
            let got: Vec<String> = r.terms.iter().map(|t| t.chosen.surface()).collect();
            if got == p.expected {
                hits[g] += 1;
            } else {
                return Err(format!(
                    "{name} seed {seed}: chose {got:?}, planted {:?}",
                    p.expected
                ));
            }
        }
    }
    Ok(format!(
        "inflection-pair {}/{INSTANCES}, plural {}/{INSTANCES}",
        hits[0], hits[1]
    ))
}

// -------------------------------------------------------------------- index

pub fn random_corpus(seed: u64) -> (Vec<Vec<String>>, usize) {
    let mut rng = rng(seed);
    let alphabet: Vec<char> = "abcdefg".chars().collect();
    let vocab: Vec<String> = (0..rng.random_range(5..=300))
        .map(|_| random_word(&mut rng, &alphabet, 1, 5))
        .collect();
    let budget = rng.random_range(1..=10_000);
    let mut docs = Vec::new();
    let mut used = 0;
    while used < budget {
        let len = rng.random_range(1..=60).min(budget - used);
        docs.push(
            (0..len)
                .map(|_| vocab.choose(&mut rng).unwrap().clone())
                .collect(),
        );
        used += len;
    }
    (docs, rng.random_range(1..=10))
}

pub fn index_oracle() -> Check {
    let mut tokens = 0;
    for seed in 0..20u64 {
        let (docs, window) = random_corpus(seed);
        tokens = tokens.max(docs.iter().map(Vec::len).sum::<usize>());
        let index = index_of(&docs, window);
        let naive = NaiveCounts::new(&docs, window);
        ensure!(
            naive.mass == index.total_pair_mass(),
            "seed {seed}: mass differs"
        );
        for ((a, b), &c) in &naive.counts {
            ensure!(
                index.pair_count(a, b) == c,
                "seed {seed}: count({a}, {b}) {} vs {c}",
                index.pair_count(a, b)
            );
        }
        let pairs = index.canonical_pairs();
        ensure!(
            pairs.len() == naive.counts.len(),
            "seed {seed}: extra pairs in index"
        );
        let vocab = index.vocabulary();
        let total: f64 = pairs
            .iter()
            .map(|&((a, b), _)| {
                index
                    .joint_probability(vocab.term(a), vocab.term(b))
                    .unwrap()
            })
            .sum();
        ensure!(
            (total - 1.0).abs() <= 1e-12,
            "seed {seed}: probabilities sum to {total}"
        );

        let bytes = index.to_bytes();
        let loaded = CooccurrenceIndex::from_bytes(&bytes).map_err(|e| e.to_string())?;
        ensure!(
            loaded.to_bytes() == bytes,
            "seed {seed}: re-serialization differs"
        );
        ensure!(
            loaded.summary() == index.summary(),
            "seed {seed}: summary differs after load"
        );
        ensure!(
            loaded.canonical_pairs() == pairs,
            "seed {seed}: pairs differ after load"
        );
        for t in vocab.terms() {
            let (a, b) = (index.term_id(t).unwrap(), loaded.term_id(t).unwrap());
            ensure!(
                index.postings(a) == loaded.postings(b),
                "seed {seed}: postings of {t} differ"
            );
            ensure!(
                index.adjacent(a) == loaded.adjacent(b),
                "seed {seed}: adjacency of {t} differs"
            );
        }
        for d in 0..index.doc_count() as u32 {
            ensure!(
                index.doc_id(d) == loaded.doc_id(d),
                "seed {seed}: doc ids differ"
            );
            ensure!(
                index.doc_terms(d) == loaded.doc_terms(d),
                "seed {seed}: doc terms differ"
            );
        }
    }
    Ok(format!("20 corpora up to {tokens} tokens: counts exact, sum P = 1 within 1e-12, save/load identical"))
}

// --------------------------------------------------------------------- BM25

/// Hand-evaluated scores for the three documents
///   d1 = "a b c a", d2 = "a d", d3 = "b e f g h i"
/// (N = 3, avgdl = 4, k1 = 1.2, b = 0.75):
///   idf(df=1) = ln(2.5/1.5 + 1) = ln(8/3),  idf(df=2) = ln(1.5/2.5 + 1) = ln(1.6)
///   K(dl) = 1.2 * (0.25 + 0.75 * dl / 4)  ->  K(4) = 1.2, K(2) = 0.75, K(6) = 1.65
///   query [a]:    d1 = ln1.6 * 2*2.2/(2+1.2) = 1.375 ln1.6,  d2 = ln1.6 * 2.2/1.75
///   query [a, c]: d1 += ln(8/3) * 2.2/2.2 = ln(8/3)
///   query [b]:    d3 = ln1.6 * 2.2/2.65
///   group {c,d}:  df = 2, d2 = ln1.6 * 2.2/1.75
pub fn bm25_hand_check() -> Check {
    let docs = docs_from(&["a b c a", "a d", "b e f g h i"]);
    let index = index_of(&docs, 2);
    let p = Bm25Params::default();
    let ln16 = 1.6f64.ln();
    let ln83 = (8.0f64 / 3.0).ln();
    let cases: [(&[&str], &str, f64); 6] = [
        (&["a"], "d0000", 1.375 * ln16),
        (&["a"], "d0001", ln16 * 2.2 / 1.75),
        (&["a", "c"], "d0000", 1.375 * ln16 + ln83),
        (&["b"], "d0002", ln16 * 2.2 / 2.65),
        (&["e"], "d0000", 0.0),
        (&["c", "c"], "d0000", 2.0 * ln83),
    ];
    for (q, d, want) in cases {
        let got = bm25_score(&index, q, d, &p).map_err(|e| e.to_string())?;
        ensure!(
            (got - want).abs() <= 1e-6,
            "query {q:?} on {d}: {got} vs hand value {want}"
        );
    }
    // literal decimals as a guard against shared mistakes in the closed forms above
    let got = bm25_score(&index, &["a"], "d0000", &p).unwrap();
    ensure!(
        (got - 0.646_255).abs() <= 1e-6,
        "query [a] on d1: {got} vs 0.646255"
    );

    let sq = mesc::baselines::StructuredQuery::parse("{c|d}").map_err(|e| e.to_string())?;
    let structured = Query::from_structured(&sq);
    let list = retrieve(&index, "q", &structured, 10, &p);
    ensure!(
        list.hits.len() == 2,
        "group {{c|d}} should match 2 documents"
    );
    let d2 = list
        .hits
        .iter()
        .find(|h| h.doc_id == "d0001")
        .unwrap()
        .score;
    ensure!(
        (d2 - ln16 * 2.2 / 1.75).abs() <= 1e-6,
        "group {{c|d}} on d2: {d2}"
    );

    // union/sum semantics against the brute-force scorer on random corpora
    let mut compared = 0;
    for seed in 0..20u64 {
        let (docs, _) = random_corpus(1000 + seed);
        let index = index_of(&docs, 1);
        let mut rng = rng(seed);
        let vocab: Vec<String> = index.vocabulary().terms().to_vec();
        let groups: Vec<Vec<String>> = (0..rng.random_range(1..=3))
            .map(|_| {
                (0..rng.random_range(1..=3))
                    .map(|_| vocab.choose(&mut rng).unwrap().clone())
                    .collect()
            })
            .collect();
        let text = groups
            .iter()
            .map(|g| format!("{{{}}}", g.join("|")))
            .collect::<Vec<_>>()
            .join(" ");
        let sq = mesc::baselines::StructuredQuery::parse(&text).map_err(|e| e.to_string())?;
        let query = Query::from_structured(&sq);
        let nodes: Vec<Vec<&str>> = groups
            .iter()
            .map(|g| g.iter().map(String::as_str).collect())
            .collect();
        let list = retrieve(&index, "q", &query, usize::MAX, &p);
        let matching = (0..docs.len())
            .filter(|&d| {
                nodes
                    .iter()
                    .flatten()
                    .any(|t| docs[d].iter().any(|x| x == t))
            })
            .count();
        ensure!(
            list.hits.len() == matching,
            "seed {seed}: {} hits vs {matching} matching documents",
            list.hits.len()
        );
        for hit in &list.hits {
            let d: usize = hit.doc_id[1..].parse().unwrap();
            let want = bm25_oracle(&docs, &nodes, d, p.k1, p.b);
            ensure!(
                (hit.score - want).abs() <= 1e-9,
                "seed {seed}, {}: {} vs {want}",
                hit.doc_id,
                hit.score
            );
            compared += 1;
        }
    }
    Ok(format!(
        "6 hand-evaluated scores within 1e-6; {compared} structured scores match union/sum oracle"
    ))
}

// ---------------------------------------------------------------- baselines

pub fn e2e_dir() -> PathBuf {
    fixtures_dir().join("e2e")
}

pub fn fixture_queries() -> Vec<Vec<String>> {
    let stop: BTreeSet<String> = fs::read_to_string(e2e_dir().join("stopwords.txt"))
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    let tok = TokenizerConfig::default();
    read_topics(e2e_dir().join("topics.tsv"))
        .unwrap()
        .iter()
        .map(|t| {
            tok.tokenize(&t.text)
                .into_iter()
                .filter(|w| !stop.contains(w))
                .collect()
        })
        .collect()
}

pub fn baseline_contracts() -> Check {
    let dict = load_dictionary(e2e_dir().join("dict.tsv")).map_err(|e| e.to_string())?;
    let queries = fixture_queries();
    for q in &queries {
        let top1 = top_n_translate(q, &dict, 1, None).map_err(|e| e.to_string())?;
        for (term, cands) in &top1.per_term {
            let full = dict.lookup(term);
            if full.is_empty() {
                continue;
            }
            ensure!(
                cands.as_slice() == &full[..1],
                "top-1 of {term:?} is {cands:?}, rank 1 is {}",
                full[0]
            );
        }
        let mut prev: Option<Vec<(String, Vec<mesc::Candidate>)>> = None;
        for n in 1..=5 {
            let out = top_n_translate(q, &dict, n, None).map_err(|e| e.to_string())?;
            for (term, cands) in &out.per_term {
                let full = dict.lookup(term);
                if !full.is_empty() {
                    ensure!(
                        cands.len() == n.min(full.len()),
                        "top-{n} of {term:?} has {} entries",
                        cands.len()
                    );
                    ensure!(
                        cands.as_slice() == &full[..cands.len()],
                        "top-{n} of {term:?} is not a rank prefix"
                    );
                }
            }
            if let Some(prev) = &prev {
                for ((t, small), (_, big)) in prev.iter().zip(&out.per_term) {
                    ensure!(
                        big.starts_with(small),
                        "top-{n} of {t:?} does not extend top-{}",
                        n - 1
                    );
                }
            }
            prev = Some(out.per_term);
        }
        let sq = pirkola_structured(q, &dict, None);
        for g in &sq.groups {
            let full = dict.lookup(&g.source);
            if !full.is_empty() {
                ensure!(
                    g.members.as_slice() == full,
                    "group for {:?} is not the full entry",
                    g.source
                );
            }
        }
    }
    Ok(format!(
        "{} fixture queries: top-1 = rank 1, prefix property for n = 1..5",
        queries.len()
    ))
}

// --------------------------------------------------------------- evaluation

pub fn eval_oracle_check() -> Check {
    for seed in 0..1000u64 {
        let (list, qrels, ranked, relevant) = random_eval_instance(seed);
        let want = eval_oracle(&ranked, &relevant);
        let ap = average_precision(&list, &qrels, "q");
        match (ap, want.ap) {
            (Some(a), Some(b)) => ensure!((a - b).abs() <= 1e-12, "seed {seed}: AP {a} vs {b}"),
            (None, None) => {}
            (a, b) => return Err(format!("seed {seed}: AP {a:?} vs {b:?}")),
        }
        ensure!(
            (precision_at_k(&list, &qrels, "q", 5) - want.p5).abs() <= 1e-12,
            "seed {seed}: P@5"
        );
        ensure!(
            (precision_at_k(&list, &qrels, "q", 10) - want.p10).abs() <= 1e-12,
            "seed {seed}: P@10"
        );
        match (interpolated_pr(&list, &qrels, "q"), want.iprec) {
            (Some(a), Some(b)) => {
                for l in 0..11 {
                    ensure!(
                        (a[l] - b[l]).abs() <= 1e-12,
                        "seed {seed}: iprec level {l}: {} vs {}",
                        a[l],
                        b[l]
                    );
                }
            }
            (None, None) => {}
            (a, b) => return Err(format!("seed {seed}: iprec {a:?} vs {b:?}")),
        }
    }
    let dir = fixtures_dir().join("eval");
    for (name, want) in [("ap_one", 1.0), ("ap_half", 0.5)] {
        let run = read_run(dir.join(format!("{name}.run"))).map_err(|e| e.to_string())?;
        let qrels = read_qrels(dir.join(format!("{name}.qrels"))).map_err(|e| e.to_string())?;
        let report = evaluate(&run, &qrels);
        ensure!(
            report.map == want,
            "{name}: MAP {} instead of exactly {want}",
            report.map
        );
    }
    Ok(
        "1000 random instances match the brute-force scorer; AP fixtures exactly 1.0 and 0.5"
            .into(),
    )
}

// --------------------------------------------------------------- end to end

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mesc")
}

/// `mesc` with no `MESC_*` variables inherited from the caller.
pub fn mesc_command() -> Command {
    let mut cmd = Command::new(bin());
    for (k, _) in std::env::vars() {
        if k.starts_with("MESC_") {
            cmd.env_remove(k);
        }
    }
    cmd.env("RUST_LOG", "error");
    cmd
}

fn run_ok(cmd: &mut Command, stdout_to: Option<&Path>) -> Result<(), String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{cmd:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    if let Some(p) = stdout_to {
        fs::write(p, &out.stdout).map_err(|e| e.to_string())?;
    }
    Ok(())
}

pub const METHODS: [&str; 3] = ["mesc", "top-n", "pirkola"];

/// Runs index -> translate (all methods) -> retrieve (+PRF for mesc) ->
/// evaluate over the e2e fixture, writing every output into `out`. Returns
/// the names of the files that are compared against the golden copies.
pub fn run_pipeline(out: &Path) -> Result<Vec<String>, String> {
    let e2e = e2e_dir();
    let idx = out.join("index.bin");
    let mut golden = vec!["index.txt".to_string()];
    run_ok(
        mesc_command()
            .args(["index", "--window", "8", "--corpus"])
            .arg(e2e.join("corpus.tsv"))
            .arg("--out")
            .arg(&idx),
        Some(&out.join("index.txt")),
    )?;
    for m in METHODS {
        let tr = out.join(format!("{m}.translations.tsv"));
        let mut cmd = mesc_command();
        cmd.args(["translate", "--method", m, "--n", "1", "--index"])
            .arg(&idx)
            .arg("--dict")
            .arg(e2e.join("dict.tsv"))
            .arg("--topics")
            .arg(e2e.join("topics.tsv"))
            .arg("--stopwords")
            .arg(e2e.join("stopwords.txt"))
            .arg("--translit")
            .arg(data_dir().join("en-fa-latn.translit"))
            .arg("--out")
            .arg(&tr);
        if m == "mesc" {
            cmd.arg("--diagnostics")
                .arg(out.join("mesc.diagnostics.jsonl"));
            golden.push("mesc.diagnostics.jsonl".into());
        }
        run_ok(&mut cmd, None)?;
        golden.push(format!("{m}.translations.tsv"));
        let variants: &[(&str, bool)] = if m == "mesc" {
            &[("", false), ("-prf", true)]
        } else {
            &[("", false)]
        };
        for &(suffix, prf) in variants {
            let run = out.join(format!("{m}{suffix}.run"));
            let mut cmd = mesc_command();
            cmd.args(["retrieve", "--depth", "1000", "--run-tag"])
                .arg(format!("{m}{suffix}"))
                .arg("--index")
                .arg(&idx)
                .arg("--queries")
                .arg(&tr)
                .arg("--out")
                .arg(&run);
            if prf {
                cmd.args([
                    "--prf",
                    "--fb-docs",
                    "3",
                    "--fb-terms",
                    "5",
                    "--fb-alpha",
                    "0.5",
                ]);
            }
            run_ok(&mut cmd, None)?;
            let report = format!("{m}{suffix}.eval.txt");
            run_ok(
                mesc_command()
                    .arg("evaluate")
                    .arg("--run")
                    .arg(&run)
                    .arg("--qrels")
                    .arg(e2e.join("qrels.txt"))
                    .arg("--out")
                    .arg(out.join(format!("{m}{suffix}.eval.tsv"))),
                Some(&out.join(&report)),
            )?;
            golden.push(format!("{m}{suffix}.run"));
            golden.push(report);
            golden.push(format!("{m}{suffix}.eval.tsv"));
        }
    }
    Ok(golden)
}

pub fn golden_dir() -> PathBuf {
    e2e_dir().join("golden")
}

pub fn end_to_end() -> Check {
    let start = Instant::now();
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    let names = run_pipeline(first.path())?;
    run_pipeline(second.path())?;
    let mut all = names.clone();
    all.push("index.bin".into());
    for name in &all {
        let a = fs::read(first.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        let b = fs::read(second.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(a == b, "{name} differs between two runs");
    }
    for name in &names {
        let got = fs::read(first.path().join(name)).unwrap();
        let want = fs::read(golden_dir().join(name)).map_err(|e| format!("golden {name}: {e}"))?;
        ensure!(got == want, "{name} differs from the golden copy");
    }
    Ok(format!(
        "{} outputs byte-identical to golden copies across two runs, {:.2}s",
        names.len(),
        start.elapsed().as_secs_f64()
    ))
}
