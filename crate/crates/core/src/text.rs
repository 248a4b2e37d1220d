//! Tokenization shared by corpus ingestion, dictionary loading and query parsing.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Controls how raw text is split into index terms.
///
/// Text is NFC-normalized and split on whitespace. With `strip_punct`,
/// leading and trailing punctuation is trimmed from each token (inner
/// punctuation such as the hyphen in `râh-âhn` is kept) and tokens that
/// become empty are dropped. With `case_fold`, tokens are lowercased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub case_fold: bool,
    pub strip_punct: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            case_fold: true,
            strip_punct: true,
        }
    }
}

impl TokenizerConfig {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let normalized: String = text.nfc().collect();
        normalized
            .split_whitespace()
            .filter_map(|raw| self.normalize_token(raw))
            .collect()
    }

    /// Normalizes a single whitespace-free token; `None` if nothing is left.
    pub fn normalize_token(&self, raw: &str) -> Option<String> {
        let mut token: &str = raw;
        if self.strip_punct {
            token = token.trim_matches(is_punct);
        }
        if token.is_empty() {
            return None;
        }
        let mut out: String = token.nfc().collect();
        if self.case_fold {
            out = out.to_lowercase();
        }
        Some(out)
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»'
                | '“'
                | '”'
                | '‘'
                | '’'
                | '…'
                | '،'
                | '؛'
                | '؟'
                | '–'
                | '—'
                | '¿'
                | '¡'
        )
}

/// NFC form of `s`.
pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}
