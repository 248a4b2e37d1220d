//! Binary index file layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic "MESCIDX\0"
//! 8       4     format version (u32)
//! 12      8     payload length in bytes (u64)
//! 20      4     CRC-32 (IEEE) of the payload (u32)
//! 24      ..    payload
//! ```
//!
//! Payload:
//!
//! ```text
//! window            u32
//! tokenizer flags   u8   bit 0 = case_fold, bit 1 = strip_punct
//! n_terms           u32, then n_terms x (len u32, UTF-8 bytes)       term id = position
//! n_docs            u32, then n_docs x (len u32, UTF-8 bytes, doc_length u32)
//! n_pairs           u64, then n_pairs x (a u32, b u32, count u64)    a <= b, sorted by (a, b)
//! postings          n_terms x (n u32, then n x (doc u32, tf u32))   sorted by doc
//! ```
//!
//! Every section is written in a fixed order, so identical indexes encode to
//! identical bytes.

use std::collections::HashMap;
use std::io::{Cursor, Read};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{CooccurrenceIndex, DocIndex, Posting, TermId, Vocabulary};
use crate::error::{Error, Result};
use crate::text::TokenizerConfig;

pub const MAGIC: &[u8; 8] = b"MESCIDX\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.write_u32::<LE>(s.len() as u32).unwrap();
    out.extend_from_slice(s.as_bytes());
}

pub(super) fn encode(index: &CooccurrenceIndex) -> Vec<u8> {
    let mut payload = Vec::new();
    payload.write_u32::<LE>(index.window as u32).unwrap();
    let flags = u8::from(index.tokenizer.case_fold) | (u8::from(index.tokenizer.strip_punct) << 1);
    payload.push(flags);
    payload
        .write_u32::<LE>(index.vocabulary.len() as u32)
        .unwrap();
    for t in index.vocabulary.terms() {
        put_str(&mut payload, t);
    }
    payload.write_u32::<LE>(index.doc_ids.len() as u32).unwrap();
    for (id, &len) in index.doc_ids.iter().zip(&index.doc_lengths) {
        put_str(&mut payload, id);
        payload.write_u32::<LE>(len).unwrap();
    }
    let pairs = index.canonical_pairs();
    payload.write_u64::<LE>(pairs.len() as u64).unwrap();
    for ((a, b), n) in pairs {
        payload.write_u32::<LE>(a).unwrap();
        payload.write_u32::<LE>(b).unwrap();
        payload.write_u64::<LE>(n).unwrap();
    }
    for list in &index.postings {
        payload.write_u32::<LE>(list.len() as u32).unwrap();
        for p in list {
            payload.write_u32::<LE>(p.doc).unwrap();
            payload.write_u32::<LE>(p.tf).unwrap();
        }
    }

    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.write_u32::<LE>(FORMAT_VERSION).unwrap();
    out.write_u64::<LE>(payload.len() as u64).unwrap();
    out.write_u32::<LE>(crc32fast::hash(&payload)).unwrap();
    out.extend_from_slice(&payload);
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::IndexFormat(msg.into())
}

fn get_str(cur: &mut Cursor<&[u8]>) -> Result<String> {
    let len = cur
        .read_u32::<LE>()
        .map_err(|_| bad("truncated string length"))? as usize;
    let remaining = cur.get_ref().len() - cur.position() as usize;
    if len > remaining {
        return Err(bad("string runs past end of payload"));
    }
    let mut buf = vec![0u8; len];
    cur.read_exact(&mut buf)
        .map_err(|_| bad("truncated string"))?;
    String::from_utf8(buf).map_err(|_| bad("invalid UTF-8 in string"))
}

fn get_u32(cur: &mut Cursor<&[u8]>, what: &str) -> Result<u32> {
    cur.read_u32::<LE>()
        .map_err(|_| bad(format!("truncated {what}")))
}

pub(super) fn decode(bytes: &[u8]) -> Result<CooccurrenceIndex> {
    if bytes.len() >= MAGIC.len() && &bytes[..MAGIC.len()] != MAGIC {
        return Err(bad("not an index file (bad magic)"));
    }
    if bytes.len() >= 12 {
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Checksum);
    }
    let payload_len = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let crc = u32::from_le_bytes(bytes[20..24].try_into().unwrap());
    let payload = &bytes[HEADER_LEN..];
    if payload.len() as u64 != payload_len || crc32fast::hash(payload) != crc {
        return Err(Error::Checksum);
    }

    let mut cur = Cursor::new(payload);
    let window = get_u32(&mut cur, "window")? as usize;
    if window == 0 {
        return Err(bad("window must be >= 1"));
    }
    let flags = cur.read_u8().map_err(|_| bad("truncated flags"))?;
    let tokenizer = TokenizerConfig {
        case_fold: flags & 1 != 0,
        strip_punct: flags & 2 != 0,
    };
    let n_terms = get_u32(&mut cur, "term count")? as usize;
    let mut terms = Vec::with_capacity(n_terms.min(payload.len()));
    for _ in 0..n_terms {
        terms.push(get_str(&mut cur)?);
    }
    let vocabulary = Vocabulary::from_terms(terms)?;

    let n_docs = get_u32(&mut cur, "doc count")? as usize;
    if n_docs == 0 {
        return Err(bad("index has no documents"));
    }
    let mut doc_ids = Vec::with_capacity(n_docs.min(payload.len()));
    let mut doc_lengths = Vec::with_capacity(n_docs.min(payload.len()));
    for _ in 0..n_docs {
        doc_ids.push(get_str(&mut cur)?);
        let len = get_u32(&mut cur, "doc length")?;
        if len == 0 {
            return Err(bad("zero-length document"));
        }
        doc_lengths.push(len);
    }

    let n_pairs = cur
        .read_u64::<LE>()
        .map_err(|_| bad("truncated pair count"))?;
    let mut pair_counts = HashMap::new();
    let mut prev: Option<(TermId, TermId)> = None;
    for _ in 0..n_pairs {
        let a = get_u32(&mut cur, "pair")?;
        let b = get_u32(&mut cur, "pair")?;
        let n = cur
            .read_u64::<LE>()
            .map_err(|_| bad("truncated pair count"))?;
        if a > b || b as usize >= n_terms || n == 0 || prev.is_some_and(|p| p >= (a, b)) {
            return Err(bad(format!("invalid pair entry ({a}, {b}, {n})")));
        }
        prev = Some((a, b));
        pair_counts.insert((a, b), n);
    }

    let mut postings = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let n = get_u32(&mut cur, "postings length")? as usize;
        let mut list = Vec::with_capacity(n.min(n_docs));
        for _ in 0..n {
            let doc: DocIndex = get_u32(&mut cur, "posting")?;
            let tf = get_u32(&mut cur, "posting")?;
            if doc as usize >= n_docs
                || tf == 0
                || list.last().is_some_and(|p: &Posting| p.doc >= doc)
            {
                return Err(bad(format!("invalid posting ({doc}, {tf})")));
            }
            list.push(Posting { doc, tf });
        }
        postings.push(list);
    }
    if (cur.position() as usize) != payload.len() {
        return Err(bad("trailing bytes after postings"));
    }
    if doc_ids
        .iter()
        .collect::<std::collections::HashSet<_>>()
        .len()
        != doc_ids.len()
    {
        return Err(bad("duplicate doc_id"));
    }

    Ok(CooccurrenceIndex::assemble(
        window,
        tokenizer,
        vocabulary,
        doc_ids,
        doc_lengths,
        pair_counts,
        postings,
    ))
}
