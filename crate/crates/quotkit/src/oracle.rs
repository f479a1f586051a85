//! Independent oracles for the test suite: generic splitting types measured
//! from random matrices over a prime field, and exhaustive quotient search.

use crate::error::{precondition, Error, Result};
use crate::guard;
use crate::realizability::{injection_lf_exists, is_realizable, surjection_exists, Triple};
use crate::splitting::{bounded_types, more_balanced_geq, SplittingType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub prime: u64,
    pub trials: usize,
    pub seed: u64,
    /// Twists scanned; derived from the degrees when `None`.
    pub twist_window: Option<(i64, i64)>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            prime: 32003,
            trials: 20,
            seed: DEFAULT_SEED,
            twist_window: None,
        }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d: &u64| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl OracleConfig {
    fn validate(&self, largest_degree: i64) -> Result<()> {
        if self.trials == 0 {
            return precondition("trials must be at least 1");
        }
        if !is_prime(self.prime) || self.prime >= 1 << 32 {
            return precondition(format!("{} is not a prime below 2^32", self.prime));
        }
        if (self.prime as i128) <= 2 * largest_degree as i128 {
            return precondition(format!("prime {} too small for degrees up to {}", self.prime, largest_degree));
        }
        Ok(())
    }
}

/// Rank of a dense matrix over F_p by row reduction.
fn rank_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c], p - 2, p);
        for k in c..cols {
            rows[rank][k] = rows[rank][k] * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for k in c..cols {
                    rows[r][k] = (rows[r][k] + p - f * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Random map O(e) -> O(a): entry (i, j) is a homogeneous form of degree
/// a_i - e_j, stored as its coefficients on x^0 y^k, x^1 y^(k-1), ...
type Forms = Vec<Vec<Vec<u64>>>;

fn random_map(e: &SplittingType, a: &SplittingType, p: u64, rng: &mut ChaCha20Rng) -> Forms {
    a.entries()
        .iter()
        .map(|&ai| {
            e.entries()
                .iter()
                .map(|&ej| {
                    let deg = ai - ej;
                    (0..=deg.max(-1)).map(|_| rng.gen_range(0..p)).collect()
                })
                .collect()
        })
        .collect()
}

fn sections(q: i64, t: i64) -> usize {
    (q + t + 1).max(0) as usize
}

/// Dimension of the kernel of the map on sections after twisting by t.
fn kernel_dim(e: &SplittingType, a: &SplittingType, map: &Forms, t: i64, p: u64) -> usize {
    let src: usize = e.entries().iter().map(|&q| sections(q, t)).sum();
    let mut offsets = Vec::new();
    let mut acc = 0;
    for &ai in a.entries() {
        offsets.push(acc);
        acc += sections(ai, t);
    }
    let tgt = acc;
    // one row per source basis monomial x^k y^(e_j + t - k)
    let mut rows = Vec::with_capacity(src);
    for (j, &ej) in e.entries().iter().enumerate() {
        for k in 0..sections(ej, t) {
            let mut row = vec![0u64; tgt];
            for (i, form) in map.iter().enumerate() {
                for (c, &coef) in form[j].iter().enumerate() {
                    row[offsets[i] + k + c] = (row[offsets[i] + k + c] + coef) % p;
                }
            }
            rows.push(row);
        }
    }
    src - rank_mod(rows, p)
}

/// Splitting type whose section counts are `h`, read off from second
/// differences. `h[0]` is at twist `lo` and must vanish there.
fn from_section_counts(h: &[usize], lo: i64) -> Option<SplittingType> {
    if h.first() != Some(&0) {
        return None;
    }
    let mut out = Vec::new();
    let mut prev_step = 0i64;
    for w in 1..h.len() {
        // number of summands with q >= -t
        let step = h[w] as i64 - h[w - 1] as i64;
        let born = step - prev_step;
        if born < 0 {
            return None;
        }
        let t = lo + w as i64;
        out.extend(std::iter::repeat_n(-t, born as usize));
        prev_step = step;
    }
    Some(SplittingType::new(out))
}

fn default_window(e: &SplittingType, kernel_rank: usize, kernel_degree: i128) -> (i64, i64) {
    let top = e.last().unwrap_or(0);
    // a subbundle has entries at most e_max, so the smallest is at least this
    let floor = kernel_degree - (kernel_rank.saturating_sub(1) as i128) * top as i128;
    (-top - 1, (-floor) as i64 + 1)
}

/// One trial; `None` when the sampled map is not surjective as a bundle map.
fn kernel_once(e: &SplittingType, a: &SplittingType, window: (i64, i64), p: u64, rng: &mut ChaCha20Rng) -> Result<Option<SplittingType>> {
    let map = random_map(e, a, p, rng);
    let h: Vec<usize> = (window.0..=window.1).map(|t| kernel_dim(e, a, &map, t, p)).collect();
    let b = from_section_counts(&h, window.0)
        .ok_or_else(|| Error::Internal(format!("section counts {:?} are not those of a splitting type", h)))?;
    let m = e.rank() - a.rank();
    if b.rank() > m {
        // the sampled map drops rank generically
        return Ok(None);
    }
    if b.rank() < m {
        return Err(Error::Internal(format!("twist window {:?} too small: recovered {}", window, b)));
    }
    Ok((b.degree() == e.degree() - a.degree()).then_some(b))
}

fn dominance_max(found: Vec<SplittingType>) -> Result<SplittingType> {
    let distinct: BTreeSet<SplittingType> = found.into_iter().collect();
    let mut best = None;
    for x in &distinct {
        let mut dominates = true;
        for y in &distinct {
            dominates &= more_balanced_geq(x, y)?;
        }
        if dominates {
            best = Some(x.clone());
        }
    }
    best.ok_or_else(|| Error::Internal(format!("no dominance maximum among {:?}", distinct)))
}

/// Generic kernel type of a surjection O(e) -> O(a), measured numerically.
pub fn generic_kernel_split_numeric(e: &SplittingType, a: &SplittingType, cfg: &OracleConfig) -> Result<SplittingType> {
    if !surjection_exists(e, a)? {
        return precondition(format!("O{} does not surject onto O{}", e, a));
    }
    let spread = e.entries().iter().chain(a.entries()).map(|x| x.abs()).max().unwrap_or(0);
    cfg.validate(spread)?;
    let m = e.rank() - a.rank();
    let window = cfg.twist_window.unwrap_or_else(|| default_window(e, m, e.degree() - a.degree()));
    let found: Vec<Option<SplittingType>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial as u64);
            kernel_once(e, a, window, cfg.prime, &mut rng)
        })
        .collect::<Result<_>>()?;
    let found: Vec<SplittingType> = found.into_iter().flatten().collect();
    if found.is_empty() {
        return Err(Error::Internal("every trial degenerated".into()));
    }
    dominance_max(found)
}

/// Generic cokernel type of an injection O(b) -> O(e), via the dual sequence.
pub fn generic_cokernel_split_numeric(b: &SplittingType, e: &SplittingType, cfg: &OracleConfig) -> Result<SplittingType> {
    if !injection_lf_exists(b, e)? {
        return precondition(format!("O{} admits no injection into O{} with locally free cokernel", b, e));
    }
    Ok(generic_kernel_split_numeric(&e.dual(), &b.dual(), cfg)?.dual())
}

/// Every quotient type completing (b, e) to a realizable triple.
pub fn exhaustive_quotients(b: &SplittingType, e: &SplittingType) -> Result<BTreeSet<SplittingType>> {
    if b.rank() > e.rank() || !injection_lf_exists(b, e)? {
        return precondition(format!("O{} admits no injection into O{} with locally free cokernel", b, e));
    }
    let n = e.rank() - b.rank();
    let lower = &e.entries()[..n];
    let excess = e.degree() - b.degree() - lower.iter().map(|&x| x as i128).sum::<i128>();
    if excess < 0 {
        return Ok(BTreeSet::new());
    }
    guard::check("quotient candidates", guard::binomial(excess as u128 + n as u128, n as u128))?;
    Ok(bounded_types(lower, &vec![None; n], e.degree() - b.degree())
        .into_iter()
        .filter(|a| is_realizable(&Triple::new(b.clone(), e.clone(), a.clone())))
        .collect())
}
