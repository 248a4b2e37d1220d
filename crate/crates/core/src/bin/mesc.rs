use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mesc::baselines::{pirkola_structured, top_n_translate, OovTransliterator};
use mesc::config::{ConfigFile, Method, PipelineConfig};
use mesc::corpus_index::{build_index, ingest_corpus, CooccurrenceIndex};
use mesc::eval::{evaluate, read_qrels, read_run, write_run, Run};
use mesc::lexicon::{dictionary_stats, load_dictionary_with};
use mesc::mesc_model::{translate_query, MescConfig};
use mesc::retrieval::{prf_expand, retrieve, Query, RankedList};
use mesc::topics::{
    diagnostics_lines, read_topics, read_translations, TranslatedQuery, TranslationLine,
};
use mesc::translit::{load_translit_rules, TransliterationTable};

/// Dictionary-based cross-lingual query translation and retrieval.
#[derive(Parser)]
#[command(name = "mesc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and save the corpus index.
    Index(IndexArgs),
    /// Translate topics with MESC or a baseline method.
    Translate(TranslateArgs),
    /// Run BM25 retrieval for translated queries and write a TREC run.
    Retrieve(RetrieveArgs),
    /// Evaluate a run against qrels.
    Evaluate(EvaluateArgs),
    /// Print dictionary scale and candidate variance.
    Stats(StatsArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// Key-value config file; command-line flags take precedence.
    #[arg(long, env = "MESC_CONFIG")]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn resolve(&self, flags: ConfigFile) -> Result<PipelineConfig> {
        let base = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Ok(PipelineConfig::resolve(&base.overlay(&flags))?)
    }
}

#[derive(Args)]
struct IndexArgs {
    /// Corpus file with `doc_id<TAB>text` lines.
    #[arg(long, env = "MESC_CORPUS")]
    corpus: PathBuf,
    /// Output index file.
    #[arg(long, env = "MESC_OUT")]
    out: PathBuf,
    /// Co-occurrence window in tokens.
    #[arg(long, env = "MESC_WINDOW")]
    window: Option<usize>,
    #[arg(long, env = "MESC_CASE_FOLD")]
    case_fold: Option<bool>,
    #[arg(long, env = "MESC_STRIP_PUNCT")]
    strip_punct: Option<bool>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct TranslateArgs {
    #[arg(long, env = "MESC_INDEX")]
    index: PathBuf,
    /// Bilingual dictionary (`source<TAB>cand1|cand2|...`).
    #[arg(long, env = "MESC_DICT")]
    dict: PathBuf,
    /// Topics file (`query_id<TAB>text`).
    #[arg(long, env = "MESC_TOPICS")]
    topics: PathBuf,
    #[arg(long, value_enum, env = "MESC_METHOD")]
    method: Option<Method>,
    /// Candidates kept per term by top-n.
    #[arg(long, env = "MESC_N")]
    n: Option<usize>,
    /// Transliteration rules for out-of-vocabulary terms.
    #[arg(long, env = "MESC_TRANSLIT")]
    translit: Option<PathBuf>,
    /// Stopword list, one term per line.
    #[arg(long, env = "MESC_STOPWORDS")]
    stopwords: Option<PathBuf>,
    #[arg(long, env = "MESC_MIN_SUPPORT_STEM_LEN")]
    min_support_stem_len: Option<usize>,
    #[arg(long, env = "MESC_TRANSLIT_CAP")]
    translit_cap: Option<usize>,
    /// Output translation file.
    #[arg(long, env = "MESC_OUT")]
    out: PathBuf,
    /// Per-candidate probabilities as JSON lines (mesc only).
    #[arg(long, env = "MESC_DIAGNOSTICS")]
    diagnostics: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct RetrieveArgs {
    #[arg(long, env = "MESC_INDEX")]
    index: PathBuf,
    /// Translation file written by `translate`.
    #[arg(long, env = "MESC_QUERIES")]
    queries: PathBuf,
    /// Output run file.
    #[arg(long, env = "MESC_OUT")]
    out: PathBuf,
    /// Retrieval depth.
    #[arg(long, env = "MESC_DEPTH")]
    depth: Option<usize>,
    #[arg(long, env = "MESC_K1")]
    k1: Option<f64>,
    #[arg(long, env = "MESC_B")]
    b: Option<f64>,
    /// Enable pseudo-relevance feedback.
    #[arg(long, env = "MESC_PRF", num_args = 0..=1, default_missing_value = "true")]
    prf: Option<bool>,
    #[arg(long, env = "MESC_FB_DOCS")]
    fb_docs: Option<usize>,
    #[arg(long, env = "MESC_FB_TERMS")]
    fb_terms: Option<usize>,
    #[arg(long, env = "MESC_FB_ALPHA")]
    fb_alpha: Option<f64>,
    #[arg(long, env = "MESC_RUN_TAG", default_value = "mesc")]
    run_tag: String,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, env = "MESC_RUN")]
    run: PathBuf,
    #[arg(long, env = "MESC_QRELS")]
    qrels: PathBuf,
    /// Also write `metric<TAB>query_id|all<TAB>value` lines here.
    #[arg(long, env = "MESC_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, env = "MESC_DICT")]
    dict: PathBuf,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_index(path: &Path) -> Result<CooccurrenceIndex> {
    CooccurrenceIndex::load(path).with_context(|| format!("loading index {}", path.display()))
}

fn cmd_index(args: &IndexArgs) -> Result<()> {
    let cfg = args.config.resolve(ConfigFile {
        window: args.window,
        case_fold: args.case_fold,
        strip_punct: args.strip_punct,
        ..Default::default()
    })?;
    let collection = ingest_corpus(&args.corpus, &cfg.tokenizer)?;
    let index = build_index(&collection, cfg.window)?;
    index.save(&args.out)?;
    let s = index.summary();
    println!("vocabulary_size\t{}", s.vocabulary_size);
    println!("doc_count\t{}", s.doc_count);
    println!("pair_count\t{}", s.pair_count);
    Ok(())
}

fn cmd_translate(args: &TranslateArgs) -> Result<()> {
    let cfg = args.config.resolve(ConfigFile {
        method: args.method,
        n: args.n,
        min_support_stem_len: args.min_support_stem_len,
        translit_cap: args.translit_cap,
        ..Default::default()
    })?;
    let index = load_index(&args.index)?;
    let tokenizer = index.tokenizer();
    let dict = load_dictionary_with(&args.dict, &tokenizer)?;
    let topics = read_topics(&args.topics)?;
    let table: Option<TransliterationTable> = args
        .translit
        .as_deref()
        .map(load_translit_rules)
        .transpose()?;
    let stopwords: HashSet<String> = match &args.stopwords {
        Some(p) => fs::read_to_string(p)
            .with_context(|| format!("reading {}", p.display()))?
            .lines()
            .filter_map(|l| tokenizer.normalize_token(l.trim()))
            .collect(),
        None => HashSet::new(),
    };
    let mesc_cfg = MescConfig {
        min_support_stem_len: cfg.min_support_stem_len,
        variant_cap: cfg.translit_cap,
        stopwords: stopwords.clone(),
    };
    let oov = table.as_ref().map(|t| OovTransliterator {
        table: t,
        vocabulary: index.vocabulary(),
        cap: cfg.translit_cap,
    });

    let outputs: Vec<(TranslationLine, String)> = topics
        .par_iter()
        .map(|topic| -> Result<(TranslationLine, String)> {
            let query: Vec<String> = tokenizer
                .tokenize(&topic.text)
                .into_iter()
                .filter(|t| !stopwords.contains(t))
                .collect();
            let (q, diag) = match cfg.method {
                Method::Mesc => {
                    let r = translate_query(&query, &dict, &index, table.as_ref(), &mesc_cfg);
                    (
                        TranslatedQuery::Terms(r.target_terms()),
                        diagnostics_lines(&topic.id, &r),
                    )
                }
                Method::TopN => {
                    let r = top_n_translate(&query, &dict, cfg.n, oov.as_ref())?;
                    (TranslatedQuery::Terms(r.terms()), String::new())
                }
                Method::Pirkola => (
                    TranslatedQuery::Structured(pirkola_structured(&query, &dict, oov.as_ref())),
                    String::new(),
                ),
            };
            Ok((
                TranslationLine {
                    query_id: topic.id.clone(),
                    query: q,
                },
                diag,
            ))
        })
        .collect::<Result<_>>()?;

    let text: String = outputs.iter().map(|(l, _)| l.to_line()).collect();
    write(&args.out, &text)?;
    if let Some(p) = &args.diagnostics {
        let diag: String = outputs.iter().map(|(_, d)| d.as_str()).collect();
        write(p, &diag)?;
    }
    Ok(())
}

fn cmd_retrieve(args: &RetrieveArgs) -> Result<()> {
    let cfg = args.config.resolve(ConfigFile {
        depth: args.depth,
        k1: args.k1,
        b: args.b,
        prf: args.prf,
        fb_docs: args.fb_docs,
        fb_terms: args.fb_terms,
        fb_alpha: args.fb_alpha,
        ..Default::default()
    })?;
    let index = load_index(&args.index)?;
    let queries = read_translations(&args.queries)?;
    let lists: Vec<RankedList> = queries
        .par_iter()
        .map(|line| {
            let query = match &line.query {
                TranslatedQuery::Terms(t) => Query::from_terms(t),
                TranslatedQuery::Structured(s) => Query::from_structured(s),
            };
            let first = retrieve(&index, &line.query_id, &query, cfg.depth, &cfg.bm25);
            match &cfg.prf {
                Some(prf) if !first.hits.is_empty() => {
                    let expanded = prf_expand(&index, &query, &first, prf);
                    retrieve(&index, &line.query_id, &expanded, cfg.depth, &cfg.bm25)
                }
                _ => first,
            }
        })
        .collect();
    let mut run = Run::new(args.run_tag.clone());
    run.lists = lists;
    write_run(&run, &args.out)?;
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let run = read_run(&args.run)?;
    let qrels = read_qrels(&args.qrels)?;
    let report = evaluate(&run, &qrels);
    print!("{}", report.to_text());
    if let Some(p) = &args.out {
        write(p, &report.to_tsv())?;
    }
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let dict = load_dictionary_with(&args.dict, &Default::default())?;
    let s = dictionary_stats(&dict)?;
    println!("entries\t{}", s.entries);
    println!("scale\t{:.4}", s.scale);
    println!("variance\t{:.4}", s.variance);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Index(a) => cmd_index(a),
        Command::Translate(a) => cmd_translate(a),
        Command::Retrieve(a) => cmd_retrieve(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
