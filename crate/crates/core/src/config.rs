//! Pipeline settings: defaults, a key-value (TOML) config file, and
//! command-line overrides.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::corpus_index::DEFAULT_WINDOW;
use crate::error::{Error, Result};
use crate::mesc_model::DEFAULT_MIN_SUPPORT_STEM_LEN;
use crate::retrieval::{Bm25Params, PrfParams};
use crate::text::TokenizerConfig;
use crate::translit::DEFAULT_VARIANT_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mesc,
    TopN,
    Pirkola,
}

/// Every key is optional; missing keys keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub case_fold: Option<bool>,
    pub strip_punct: Option<bool>,
    pub window: Option<usize>,
    pub min_support_stem_len: Option<usize>,
    pub translit_cap: Option<usize>,
    pub k1: Option<f64>,
    pub b: Option<f64>,
    pub depth: Option<usize>,
    pub prf: Option<bool>,
    pub fb_docs: Option<usize>,
    pub fb_terms: Option<usize>,
    pub fb_alpha: Option<f64>,
    pub method: Option<Method>,
    pub n: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Values set in `other` win.
    pub fn overlay(self, other: &ConfigFile) -> ConfigFile {
        ConfigFile {
            case_fold: other.case_fold.or(self.case_fold),
            strip_punct: other.strip_punct.or(self.strip_punct),
            window: other.window.or(self.window),
            min_support_stem_len: other.min_support_stem_len.or(self.min_support_stem_len),
            translit_cap: other.translit_cap.or(self.translit_cap),
            k1: other.k1.or(self.k1),
            b: other.b.or(self.b),
            depth: other.depth.or(self.depth),
            prf: other.prf.or(self.prf),
            fb_docs: other.fb_docs.or(self.fb_docs),
            fb_terms: other.fb_terms.or(self.fb_terms),
            fb_alpha: other.fb_alpha.or(self.fb_alpha),
            method: other.method.or(self.method),
            n: other.n.or(self.n),
        }
    }
}

pub const DEFAULT_DEPTH: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub tokenizer: TokenizerConfig,
    pub window: usize,
    pub min_support_stem_len: usize,
    pub translit_cap: usize,
    pub bm25: Bm25Params,
    pub depth: usize,
    pub prf: Option<PrfParams>,
    pub method: Method,
    pub n: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tokenizer: TokenizerConfig::default(),
            window: DEFAULT_WINDOW,
            min_support_stem_len: DEFAULT_MIN_SUPPORT_STEM_LEN,
            translit_cap: DEFAULT_VARIANT_CAP,
            bm25: Bm25Params::default(),
            depth: DEFAULT_DEPTH,
            prf: None,
            method: Method::Mesc,
            n: 1,
        }
    }
}

impl PipelineConfig {
    /// Defaults with `values` applied, then range-checked.
    pub fn resolve(values: &ConfigFile) -> Result<Self> {
        let d = PipelineConfig::default();
        let prf_defaults = PrfParams::default();
        let prf = if values.prf.unwrap_or(false) {
            Some(PrfParams {
                fb_docs: values.fb_docs.unwrap_or(prf_defaults.fb_docs),
                fb_terms: values.fb_terms.unwrap_or(prf_defaults.fb_terms),
                fb_alpha: values.fb_alpha.unwrap_or(prf_defaults.fb_alpha),
            })
        } else {
            None
        };
        let cfg = PipelineConfig {
            tokenizer: TokenizerConfig {
                case_fold: values.case_fold.unwrap_or(d.tokenizer.case_fold),
                strip_punct: values.strip_punct.unwrap_or(d.tokenizer.strip_punct),
            },
            window: values.window.unwrap_or(d.window),
            min_support_stem_len: values
                .min_support_stem_len
                .unwrap_or(d.min_support_stem_len),
            translit_cap: values.translit_cap.unwrap_or(d.translit_cap),
            bm25: Bm25Params {
                k1: values.k1.unwrap_or(d.bm25.k1),
                b: values.b.unwrap_or(d.bm25.b),
            },
            depth: values.depth.unwrap_or(d.depth),
            prf,
            method: values.method.unwrap_or(d.method),
            n: values.n.unwrap_or(d.n),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.window == 0 {
            return bad("window must be >= 1");
        }
        if self.translit_cap == 0 {
            return bad("translit_cap must be >= 1");
        }
        if !(self.bm25.k1.is_finite() && self.bm25.k1 >= 0.0) {
            return bad("k1 must be a finite value >= 0");
        }
        if !(0.0..=1.0).contains(&self.bm25.b) {
            return bad("b must be in [0, 1]");
        }
        if self.depth == 0 {
            return bad("depth must be >= 1");
        }
        if self.n == 0 {
            return bad("n must be >= 1");
        }
        if let Some(p) = &self.prf {
            if !(p.fb_alpha.is_finite() && p.fb_alpha >= 0.0) {
                return bad("fb_alpha must be a finite value >= 0");
            }
        }
        Ok(())
    }
}
