//! Unit-cost Levenshtein distance over Unicode code points (after NFC).

use std::collections::HashMap;

use unicode_normalization::UnicodeNormalization;

/// Levenshtein distance with unit insert/delete/substitute costs.
pub fn med(s: &str, t: &str) -> usize {
    let a: Vec<char> = s.nfc().collect();
    let b: Vec<char> = t.nfc().collect();
    med_chars(&a, &b)
}

pub fn med_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `med(s, t) <= k`, evaluated only inside the diagonal band of width
/// `2k + 1` with an early exit once a whole row exceeds `k`.
pub fn within_distance(s: &str, t: &str, k: usize) -> bool {
    let a: Vec<char> = s.nfc().collect();
    let b: Vec<char> = t.nfc().collect();
    within_distance_chars(&a, &b, k)
}

pub fn within_distance_chars(a: &[char], b: &[char], k: usize) -> bool {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if b.len() - a.len() > k {
        return false;
    }
    if k == 0 {
        return a == b;
    }
    let n = a.len();
    let m = b.len();
    let inf = k + 1;
    let mut prev = vec![inf; m + 1];
    let mut cur = vec![inf; m + 1];
    let hi0 = m.min(k);
    for (j, cell) in prev.iter_mut().enumerate().take(hi0 + 1) {
        *cell = j;
    }
    for i in 1..=n {
        let lo = i.saturating_sub(k);
        let hi = m.min(i + k);
        if lo > 0 {
            cur[lo - 1] = inf;
        }
        let mut row_min = inf;
        for j in lo..=hi {
            let v = if j == 0 {
                i
            } else {
                let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
                sub.min(prev[j] + 1).min(cur[j - 1] + 1)
            };
            let v = v.min(inf);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if hi < m {
            cur[hi + 1] = inf;
        }
        if row_min > k {
            return false;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m] <= k
}

/// Exact distance when it is at most `k`, otherwise `None`.
pub fn bounded_distance_chars(a: &[char], b: &[char], k: usize) -> Option<usize> {
    (0..=k).find(|&d| within_distance_chars(a, b, d))
}

/// A vocabulary term at edit distance 1 or 2 from a query.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NeighborQueryResult {
    pub term: String,
    pub distance: usize,
}

/// Vocabulary terms with `1 <= med(query, v) <= 2`, ordered by distance then
/// term.
pub fn neighbors<S: AsRef<str>>(vocabulary: &[S], query: &str) -> Vec<NeighborQueryResult> {
    let index = NeighborIndex::new(vocabulary);
    index
        .neighbors(query)
        .into_iter()
        .map(|(id, distance)| NeighborQueryResult {
            term: vocabulary[id as usize].as_ref().to_string(),
            distance,
        })
        .collect()
}

/// Vocabulary bucketed by code-point length so that a distance-2 lookup only
/// visits terms whose length differs by at most 2.
#[derive(Debug, Default)]
pub struct NeighborIndex {
    terms: Vec<String>,
    buckets: HashMap<usize, Bucket>,
}

/// Vocabulary ids with their normalized characters, for one length.
type Bucket = Vec<(u32, Box<[char]>)>;

pub const MAX_NEIGHBOR_DISTANCE: usize = 2;

impl NeighborIndex {
    pub fn new<S: AsRef<str>>(vocabulary: &[S]) -> Self {
        let mut buckets: HashMap<usize, Bucket> = HashMap::new();
        for (id, t) in vocabulary.iter().enumerate() {
            let chars: Box<[char]> = t.as_ref().nfc().collect();
            buckets
                .entry(chars.len())
                .or_default()
                .push((id as u32, chars));
        }
        Self {
            terms: vocabulary.iter().map(|t| t.as_ref().to_string()).collect(),
            buckets,
        }
    }

    /// `(term id, distance)` for every vocabulary term at distance 1 or 2.
    pub fn neighbors(&self, query: &str) -> Vec<(u32, usize)> {
        let q: Vec<char> = query.nfc().collect();
        let lo = q.len().saturating_sub(MAX_NEIGHBOR_DISTANCE);
        let hi = q.len() + MAX_NEIGHBOR_DISTANCE;
        let mut out = Vec::new();
        for len in lo..=hi {
            let Some(bucket) = self.buckets.get(&len) else {
                continue;
            };
            for (id, chars) in bucket {
                if !within_distance_chars(&q, chars, MAX_NEIGHBOR_DISTANCE) {
                    continue;
                }
                let d = if within_distance_chars(&q, chars, 1) {
                    if **chars == *q {
                        continue;
                    }
                    1
                } else {
                    2
                };
                out.push((*id, d));
            }
        }
        out.sort_by(|x, y| {
            x.1.cmp(&y.1)
                .then_with(|| self.terms[x.0 as usize].cmp(&self.terms[y.0 as usize]))
        });
        out
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }
}
