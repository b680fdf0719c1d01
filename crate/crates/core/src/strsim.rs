//! ISub string similarity.
//!
//! `isub = comm - diff + winkler`, where `comm` rewards the total length of
//! common substrings removed greedily (longest first), `diff` is a Hamacher
//! product of the unmatched fractions of both strings and `winkler` adds a
//! small bonus for a shared prefix. The result lies in [-1, 1].

use serde::{Deserialize, Serialize};

use crate::lexicon::normalize_joined;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IsubParams {
    /// Shortest common substring that counts towards `comm`.
    pub min_substring_len: usize,
    pub hamacher_p: f64,
    pub winkler_scale: f64,
    pub winkler_prefix_cap: usize,
}

impl Default for IsubParams {
    fn default() -> Self {
        IsubParams { min_substring_len: 3, hamacher_p: 0.6, winkler_scale: 0.1, winkler_prefix_cap: 4 }
    }
}

/// The three terms of an ISub score, before summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsubParts {
    pub comm: f64,
    pub diff: f64,
    pub winkler: f64,
}

impl IsubParts {
    pub fn score(&self) -> f64 {
        (self.comm - self.diff + self.winkler).clamp(-1.0, 1.0)
    }
}

pub fn isub(s1: &str, s2: &str, params: &IsubParams) -> f64 {
    isub_parts(s1, s2, params).score()
}

pub fn isub_parts(s1: &str, s2: &str, params: &IsubParams) -> IsubParts {
    let a: Vec<char> = normalize_joined(s1).chars().collect();
    let b: Vec<char> = normalize_joined(s2).chars().collect();
    let (l1, l2) = (a.len(), b.len());
    if l1 == 0 && l2 == 0 {
        return IsubParts { comm: 1.0, diff: 0.0, winkler: 0.0 };
    }
    if l1 == 0 || l2 == 0 {
        return IsubParts { comm: 0.0, diff: 1.0, winkler: 0.0 };
    }
    if a == b {
        return IsubParts { comm: 1.0, diff: 0.0, winkler: 0.0 };
    }

    // Greedy removal depends on argument order when substrings tie; fixing
    // the order keeps the score symmetric.
    let (first, second) = if (l1, &a) <= (l2, &b) { (&a, &b) } else { (&b, &a) };
    let common = common_substring_total(first, second, params.min_substring_len.max(1));
    let comm = 2.0 * common as f64 / (l1 + l2) as f64;
    let u1 = (l1 - common) as f64 / l1 as f64;
    let u2 = (l2 - common) as f64 / l2 as f64;
    let p = params.hamacher_p;
    let denom = p + (1.0 - p) * (u1 + u2 - u1 * u2);
    let diff = if denom == 0.0 { 0.0 } else { u1 * u2 / denom };

    let prefix = a.iter().zip(&b).take_while(|(x, y)| x == y).count().min(params.winkler_prefix_cap);
    let winkler = prefix as f64 * params.winkler_scale * (1.0 - comm);
    IsubParts { comm, diff, winkler }
}

/// Repeatedly removes the longest common substring (leftmost in `a` on ties)
/// from both strings while it is at least `min_len` long; returns the total
/// removed length.
fn common_substring_total(a: &[char], b: &[char], min_len: usize) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut total = 0;
    while !a.is_empty() && !b.is_empty() {
        let (len, i, j) = longest_common_substring(&a, &b);
        if len < min_len || len == 0 {
            break;
        }
        total += len;
        a.drain(i..i + len);
        b.drain(j..j + len);
    }
    total
}

/// (length, start in a, start in b); the first maximum found scanning `a`
/// then `b` left to right.
fn longest_common_substring(a: &[char], b: &[char]) -> (usize, usize, usize) {
    // prev[j + 1] = length of the common suffix of a[..i] and b[..=j]
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    let mut best = (0, 0, 0);
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb { prev[j] + 1 } else { 0 };
        }
        std::mem::swap(&mut prev, &mut cur);
        // Ending positions scanned in order; convert to starts and keep the
        // leftmost start in `a`, then in `b`.
        for j in 0..b.len() {
            let len = prev[j + 1];
            if len == 0 {
                continue;
            }
            let (si, sj) = (i + 1 - len, j + 1 - len);
            if len > best.0 || (len == best.0 && (si, sj) < (best.1, best.2)) {
                best = (len, si, sj);
            }
        }
    }
    best
}

/// Negative similarities carry no category evidence.
pub fn clamp_cscore(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_strings() {
        let p = IsubParams::default();
        for s in ["a", "protein", "Protein Sequence Analysis", "x y z"] {
            assert_eq!(isub(s, s, &p), 1.0);
        }
        assert_eq!(isub("", "", &p), 1.0);
        assert_eq!(isub("Protein-Sequence", "protein sequence", &p), 1.0);
    }

    #[test]
    fn disjoint_strings() {
        let parts = isub_parts("abc", "xyz", &IsubParams::default());
        assert_eq!(parts, IsubParts { comm: 0.0, diff: 1.0, winkler: 0.0 });
        assert_eq!(parts.score(), -1.0);
        assert_eq!(isub("abc", "", &IsubParams::default()), -1.0);
    }

    #[test]
    fn task_and_category() {
        let v = isub("Analyze domains in protein sequences", "Protein Sequence Analysis", &IsubParams::default());
        // "protein sequence" (16) and "analy" (5) are removed; 0.60560585...
        assert!((v - 0.6056058505287769).abs() < 1e-12, "{v}");
    }

    #[test]
    fn hand_computed_parts() {
        // "abcdx" vs "abcdy": common "abcd" = 4, comm = 8/10, u = 0.2 each,
        // diff = 0.04 / (0.6 + 0.4 * 0.36) = 0.04 / 0.744, prefix 4 -> 0.4 * 0.2
        let parts = isub_parts("abcdx", "abcdy", &IsubParams::default());
        assert!((parts.comm - 0.8).abs() < 1e-12);
        assert!((parts.diff - 0.04 / 0.744).abs() < 1e-12);
        assert!((parts.winkler - 0.08).abs() < 1e-12);
    }

    #[test]
    fn short_common_substrings_ignored() {
        // only "ab" is shared: below the default minimum of 3
        let parts = isub_parts("abxx", "abyy", &IsubParams::default());
        assert_eq!(parts.comm, 0.0);
        let loose = IsubParams { min_substring_len: 2, ..IsubParams::default() };
        assert!(isub_parts("abxx", "abyy", &loose).comm > 0.0);
    }

    #[test]
    fn leftmost_longest_substring() {
        let a: Vec<char> = "xabcyabc".chars().collect();
        let b: Vec<char> = "abc".chars().collect();
        assert_eq!(longest_common_substring(&a, &b), (3, 1, 0));
    }

    #[test]
    fn symmetric_when_substrings_tie() {
        let p = IsubParams::default();
        for (a, b) in [("cacca ab", "c a acacbc"), ("ccab bac bab", "cc bcab"), ("cbcb aaaaba", "bcbcc a")] {
            assert_eq!(isub(a, b, &p), isub(b, a, &p), "{a:?} {b:?}");
        }
    }

    #[test]
    fn clamp() {
        assert_eq!(clamp_cscore(-1.0), 0.0);
        assert_eq!(clamp_cscore(0.5586), 0.5586);
        assert_eq!(clamp_cscore(1.0), 1.0);
    }
}
