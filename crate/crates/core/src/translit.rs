//! Rule-based transliteration for out-of-vocabulary proper nouns.
//!
//! Consonant graphemes map to exactly one target string; vowel graphemes
//! expand into every configured alternative (possibly empty). Graphemes are
//! matched longest-first, so digraphs such as `sh` can be declared.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::corpus_index::Vocabulary;
use crate::error::{Error, Result};
use crate::text::nfc;

pub const DEFAULT_VARIANT_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphemeClass {
    Consonant,
    Vowel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransliterationTable {
    consonants: HashMap<String, String>,
    vowels: HashMap<String, Vec<String>>,
    max_key_chars: usize,
}

impl TransliterationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_consonant(&mut self, src: &str, dst: &str) -> Result<()> {
        let src = nfc(src);
        self.check_new(&src)?;
        self.max_key_chars = self.max_key_chars.max(src.chars().count());
        self.consonants.insert(src, nfc(dst));
        Ok(())
    }

    pub fn add_vowel<S: AsRef<str>>(&mut self, src: &str, alternatives: &[S]) -> Result<()> {
        let src = nfc(src);
        self.check_new(&src)?;
        let mut alts: Vec<String> = Vec::new();
        for a in alternatives {
            let a = nfc(a.as_ref());
            if !alts.contains(&a) {
                alts.push(a);
            }
        }
        if alts.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "vowel {src:?} has no alternatives"
            )));
        }
        self.max_key_chars = self.max_key_chars.max(src.chars().count());
        self.vowels.insert(src, alts);
        Ok(())
    }

    fn check_new(&self, src: &str) -> Result<()> {
        if src.is_empty() {
            return Err(Error::InvalidArgument("empty grapheme".into()));
        }
        if self.classify(src).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate grapheme {src:?}"
            )));
        }
        Ok(())
    }

    pub fn classify(&self, grapheme: &str) -> Option<GraphemeClass> {
        if self.consonants.contains_key(grapheme) {
            Some(GraphemeClass::Consonant)
        } else if self.vowels.contains_key(grapheme) {
            Some(GraphemeClass::Vowel)
        } else {
            None
        }
    }

    pub fn consonant(&self, grapheme: &str) -> Option<&str> {
        self.consonants.get(grapheme).map(String::as_str)
    }

    pub fn vowel_alternatives(&self, grapheme: &str) -> Option<&[String]> {
        self.vowels.get(grapheme).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.consonants.len() + self.vowels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Splits `term` into table graphemes (longest match first). Characters
    /// not covered by the table become single-character segments with no
    /// class.
    fn segment<'a>(&'a self, term: &str) -> Vec<Segment<'a>> {
        let chars: Vec<char> = term.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        'outer: while i < chars.len() {
            let longest = self.max_key_chars.min(chars.len() - i);
            for len in (1..=longest).rev() {
                let key: String = chars[i..i + len].iter().collect();
                if let Some(dst) = self.consonants.get(&key) {
                    out.push(Segment::Fixed(dst.as_str()));
                    i += len;
                    continue 'outer;
                }
                if let Some(alts) = self.vowels.get(&key) {
                    out.push(Segment::Choice(alts.as_slice()));
                    i += len;
                    continue 'outer;
                }
            }
            out.push(Segment::Unknown(chars[i]));
            i += 1;
        }
        out
    }
}

enum Segment<'a> {
    Fixed(&'a str),
    Choice(&'a [String]),
    Unknown(char),
}

impl Segment<'_> {
    fn options(&self) -> Vec<String> {
        match self {
            Segment::Fixed(s) => vec![s.to_string()],
            Segment::Choice(alts) => alts.to_vec(),
            Segment::Unknown(c) => vec![c.to_string()],
        }
    }
}

/// Parses `C <src> <dst>` / `V <src> <alt1>|<alt2>|...` rule lines.
pub fn parse_translit_rules(text: &str, source_name: &str) -> Result<TransliterationTable> {
    let mut table = TransliterationTable::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let malformed = |msg: &str| Error::malformed(source_name, lineno, msg.to_string());
        match fields.as_slice() {
            ["C", src, dst] => table
                .add_consonant(src, dst)
                .map_err(|e| malformed(&e.to_string()))?,
            ["C", ..] => return Err(malformed("expected `C <src> <dst>`")),
            ["V", src, alts] => {
                let alts: Vec<&str> = alts.split('|').collect();
                table
                    .add_vowel(src, &alts)
                    .map_err(|e| malformed(&e.to_string()))?
            }
            ["V", _] => return Err(malformed("vowel has an empty alternative list")),
            ["V", ..] => return Err(malformed("expected `V <src> <alt1>|<alt2>|...`")),
            [class, ..] => return Err(malformed(&format!("unknown grapheme class {class:?}"))),
            [] => unreachable!(),
        }
    }
    Ok(table)
}

pub fn load_translit_rules(path: impl AsRef<Path>) -> Result<TransliterationTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_translit_rules(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Variants {
    pub variants: Vec<String>,
    /// More distinct variants exist beyond the cap.
    pub truncated: bool,
    /// Characters not covered by the table (copied through unchanged).
    pub unknown: Vec<char>,
}

/// Cartesian vowel expansion of `term`, deduplicated, in expansion order
/// (leftmost choice varies slowest, earlier alternatives first), at most
/// `cap` entries.
pub fn generate_variants(term: &str, table: &TransliterationTable, cap: usize) -> Variants {
    let cap = cap.max(1);
    let term = nfc(term);
    let segments = table.segment(&term);
    let unknown: Vec<char> = segments
        .iter()
        .filter_map(|s| match s {
            Segment::Unknown(c) => Some(*c),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !unknown.is_empty() {
        log::warn!("transliteration of {term:?}: no rule for {unknown:?}, copied through");
    }
    let options: Vec<Vec<String>> = segments.iter().map(Segment::options).collect();

    let mut out = Variants {
        unknown,
        ..Default::default()
    };
    let mut seen = HashSet::new();
    let mut prefix = String::new();
    expand(&options, 0, &mut prefix, cap, &mut seen, &mut out);
    out
}

/// Depth-first expansion; returns `false` once expansion should stop.
fn expand(
    options: &[Vec<String>],
    depth: usize,
    prefix: &mut String,
    cap: usize,
    seen: &mut HashSet<String>,
    out: &mut Variants,
) -> bool {
    if depth == options.len() {
        if seen.contains(prefix.as_str()) {
            return true;
        }
        if out.variants.len() == cap {
            out.truncated = true;
            return false;
        }
        seen.insert(prefix.clone());
        out.variants.push(prefix.clone());
        return true;
    }
    for opt in &options[depth] {
        let len = prefix.len();
        prefix.push_str(opt);
        let go_on = expand(options, depth + 1, prefix, cap, seen, out);
        prefix.truncate(len);
        if !go_on {
            return false;
        }
    }
    true
}

/// Membership test over target-language terms.
pub trait TermSet: Sync {
    fn contains_term(&self, term: &str) -> bool;
}

impl TermSet for Vocabulary {
    fn contains_term(&self, term: &str) -> bool {
        self.contains(term)
    }
}

impl TermSet for HashSet<String> {
    fn contains_term(&self, term: &str) -> bool {
        self.contains(term)
    }
}

impl TermSet for BTreeSet<String> {
    fn contains_term(&self, term: &str) -> bool {
        self.contains(term)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OovSupport {
    pub candidates: Vec<String>,
    /// No variant was found in the vocabulary; `candidates` holds the first
    /// generated variant as a literal fallback.
    pub unverified: bool,
    pub truncated: bool,
}

/// Variants of `term` present in `vocabulary`, or the first variant alone
/// (flagged unverified) when none is.
pub fn transliterate_oov<V: TermSet + ?Sized>(
    term: &str,
    table: &TransliterationTable,
    vocabulary: &V,
    cap: usize,
) -> OovSupport {
    let generated = generate_variants(term, table, cap);
    let found: Vec<String> = generated
        .variants
        .iter()
        .filter(|v| !v.is_empty() && vocabulary.contains_term(v))
        .cloned()
        .collect();
    if !found.is_empty() {
        return OovSupport {
            candidates: found,
            unverified: false,
            truncated: generated.truncated,
        };
    }
    let first = generated.variants.into_iter().find(|v| !v.is_empty());
    OovSupport {
        candidates: first.into_iter().collect(),
        unverified: true,
        truncated: generated.truncated,
    }
}
