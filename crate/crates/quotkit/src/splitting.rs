//! Splitting types: weakly increasing integer sequences standing for
//! O(f_1) + ... + O(f_r) on the projective line.

use crate::error::{precondition, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct SplittingType(Vec<i64>);

impl From<Vec<i64>> for SplittingType {
    fn from(v: Vec<i64>) -> Self {
        SplittingType::new(v)
    }
}

impl From<SplittingType> for Vec<i64> {
    fn from(s: SplittingType) -> Self {
        s.0
    }
}

impl SplittingType {
    /// Builds a splitting type, sorting the entries.
    pub fn new(mut entries: Vec<i64>) -> Self {
        entries.sort_unstable();
        SplittingType(entries)
    }

    pub fn empty() -> Self {
        SplittingType(Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i128 {
        self.0.iter().map(|&x| x as i128).sum()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// 1-indexed entry access.
    pub fn at(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn first(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<i64> {
        self.0.last().copied()
    }

    pub fn prefix_sums(&self) -> Vec<i128> {
        let mut acc = 0i128;
        self.0
            .iter()
            .map(|&x| {
                acc += x as i128;
                acc
            })
            .collect()
    }

    /// Entries at the 1-indexed positions `lo..=hi` (empty when `hi < lo`).
    pub fn slice(&self, lo: usize, hi: usize) -> SplittingType {
        if hi < lo {
            return SplittingType::empty();
        }
        SplittingType(self.0[lo - 1..hi].to_vec())
    }

    /// (x_1..x_k) -> (-x_k..-x_1), the splitting type of the dual bundle.
    pub fn dual(&self) -> SplittingType {
        SplittingType(self.0.iter().rev().map(|&x| -x).collect())
    }

    /// Repeats every entry `k` times.
    pub fn repeat(&self, k: usize) -> SplittingType {
        SplittingType::new(
            self.0
                .iter()
                .flat_map(|&x| std::iter::repeat_n(x, k))
                .collect(),
        )
    }

    pub fn twist(&self, t: i64) -> SplittingType {
        SplittingType(self.0.iter().map(|&x| x + t).collect())
    }

    pub fn is_balanced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(lo), Some(hi)) => hi - lo <= 1,
            _ => true,
        }
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for SplittingType {
    type Err = Error;

    /// Comma-separated integers; the empty string is rank 0.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(SplittingType::empty());
        }
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad splitting-type entry {:?} in {:?}", p, s)))
            })
            .collect::<Result<Vec<_>>>()
            .map(SplittingType::new)
    }
}

/// Shorthand constructor used throughout tests and examples.
pub fn st(v: &[i64]) -> SplittingType {
    SplittingType::new(v.to_vec())
}

/// Dominance order: every prefix sum of `f` is at least that of `g`.
pub fn more_balanced_geq(f: &SplittingType, g: &SplittingType) -> Result<bool> {
    if f.rank() != g.rank() {
        return precondition(format!("rank mismatch: {} vs {}", f, g));
    }
    if f.degree() != g.degree() {
        return precondition(format!("degree mismatch: {} vs {}", f, g));
    }
    Ok(f.prefix_sums()
        .iter()
        .zip(g.prefix_sums())
        .all(|(x, y)| *x >= y))
}

/// Strictly more balanced: dominates and differs.
pub fn more_balanced_gt(f: &SplittingType, g: &SplittingType) -> Result<bool> {
    Ok(f != g && more_balanced_geq(f, g)?)
}

pub fn hom_dim(f: &SplittingType, g: &SplittingType) -> i128 {
    let mut total = 0i128;
    for &fi in f.entries() {
        for &gj in g.entries() {
            total += (gj as i128 - fi as i128 + 1).max(0);
        }
    }
    total
}

pub fn ext1_dim(f: &SplittingType, g: &SplittingType) -> i128 {
    let mut total = 0i128;
    for &fi in f.entries() {
        for &gj in g.entries() {
            total += (fi as i128 - gj as i128 - 1).max(0);
        }
    }
    total
}

pub fn end_dim(f: &SplittingType) -> i128 {
    hom_dim(f, f)
}

pub fn sort_concat(b: &SplittingType, a: &SplittingType) -> SplittingType {
    let mut v = b.entries().to_vec();
    v.extend_from_slice(a.entries());
    SplittingType::new(v)
}

/// Adds `delta` to `q` by water-filling from the bottom.
pub fn alpha_balance(q: &SplittingType, delta: i128) -> Result<SplittingType> {
    if delta < 0 {
        return precondition(format!("negative increment {}", delta));
    }
    if delta == 0 {
        return Ok(q.clone());
    }
    let n = q.rank();
    if n == 0 {
        return precondition(format!("cannot distribute {} over an empty tuple", delta));
    }
    let mut t: Vec<i128> = q.entries().iter().map(|&x| x as i128).collect();
    let mut rem = delta;
    let mut k = 1;
    while k < n && t[k] == t[0] {
        k += 1;
    }
    while rem > 0 {
        let level = t[0];
        if k < n {
            let next = t[k];
            let cost = (k as i128) * (next - level);
            if rem >= cost {
                t[..k].iter_mut().for_each(|x| *x = next);
                rem -= cost;
                while k < n && t[k] == next {
                    k += 1;
                }
                continue;
            }
        }
        let kk = k as i128;
        let (quot, r) = (rem / kk, (rem % kk) as usize);
        for (i, x) in t[..k].iter_mut().enumerate() {
            *x = level + quot + if i >= k - r { 1 } else { 0 };
        }
        rem = 0;
    }
    let out = t
        .into_iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::Precondition("entry overflow".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(SplittingType(out))
}

/// Subtracts `delta` from `p` in the most balanced way, starting at the top.
pub fn beta_balance(p: &SplittingType, delta: i128) -> Result<SplittingType> {
    Ok(alpha_balance(&p.dual(), delta)?.dual())
}

/// All weakly increasing tuples `t` with `lower[i] <= t[i] <= upper[i]` and
/// the given sum. `None` bounds are unbounded; the sum keeps the set finite
/// as long as every position has a lower bound.
pub fn bounded_types(lower: &[i64], upper: &[Option<i64>], sum: i128) -> Vec<SplittingType> {
    assert_eq!(lower.len(), upper.len());
    let n = lower.len();
    let mut out = Vec::new();
    if n == 0 {
        if sum == 0 {
            out.push(SplittingType::empty());
        }
        return out;
    }
    // suffix minimum sums given a floor value are computed on the fly
    let mut cur = Vec::with_capacity(n);
    fill(lower, upper, sum, i64::MIN, &mut cur, &mut out);
    out
}

fn min_rest(lower: &[i64], floor: i64) -> i128 {
    let mut run = floor;
    lower
        .iter()
        .map(|&l| {
            run = run.max(l);
            run as i128
        })
        .sum()
}

fn fill(
    lower: &[i64],
    upper: &[Option<i64>],
    rem: i128,
    prev: i64,
    cur: &mut Vec<i64>,
    out: &mut Vec<SplittingType>,
) {
    let i = cur.len();
    let n = lower.len();
    if i == n {
        if rem == 0 {
            out.push(SplittingType(cur.clone()));
        }
        return;
    }
    let k = (n - i) as i128;
    let start = prev.max(lower[i]) as i128;
    // t_i * k <= rem because the remaining entries are at least t_i
    let mut stop = rem.div_euclid(k);
    if let Some(u) = upper[i] {
        stop = stop.min(u as i128);
    }
    let mut v = start;
    while v <= stop {
        let vi = v as i64;
        let rest_min = min_rest(&lower[i + 1..], vi);
        if rem - v < rest_min {
            break;
        }
        let rest_ok = match upper[i + 1..].iter().try_fold(0i128, |acc, u| u.map(|x| acc + x as i128)) {
            Some(max_rest) => rem - v <= max_rest,
            None => true,
        };
        if rest_ok {
            cur.push(vi);
            fill(lower, upper, rem - v, vi, cur, out);
            cur.pop();
        }
        v += 1;
    }
}

/// All weakly increasing tuples of length `len` with entries in `[lo, hi]`.
pub fn all_types_in_range(len: usize, lo: i64, hi: i64) -> Vec<SplittingType> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<SplittingType>) {
        if cur.len() == len {
            out.push(SplittingType(cur.clone()));
            return;
        }
        let start = cur.last().copied().unwrap_or(lo);
        for v in start..=hi {
            cur.push(v);
            rec(len, lo, hi, cur, out);
            cur.pop();
        }
    }
    rec(len, lo, hi, &mut cur, &mut out);
    out
}
