//! Stable pairs of kernel/quotient splitting types and the census of
//! components of the locally free Quot locus.

use crate::error::{precondition, Error, Result};
use crate::guard;
use crate::realizability::{self, Triple};
use crate::splitting::{
    alpha_balance, beta_balance, bounded_types, end_dim, hom_dim, more_balanced_geq, SplittingType,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Combinatorial data generating a stable pair. `blocks` lists the index
/// intervals P_1, Q_1, ..., P_r, Q_r explicitly (1-indexed into e).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StablePackage {
    pub m_prime: usize,
    pub n_prime: usize,
    pub blocks: Vec<Vec<usize>>,
    pub delta: Vec<i128>,
}

impl StablePackage {
    /// Builds contiguous blocks from their sizes, starting right after n'.
    pub fn from_sizes(m_prime: usize, n_prime: usize, sizes: &[usize], delta: Vec<i128>) -> Self {
        let mut next = n_prime + 1;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let block: Vec<usize> = (next..next + s).collect();
                next += s;
                block
            })
            .collect();
        StablePackage {
            m_prime,
            n_prime,
            blocks,
            delta,
        }
    }

    pub fn r(&self) -> usize {
        self.blocks.len() / 2
    }

    pub fn kernel_block(&self, i: usize) -> &[usize] {
        &self.blocks[2 * (i - 1)]
    }

    pub fn quotient_block(&self, i: usize) -> &[usize] {
        &self.blocks[2 * i - 1]
    }
}

fn entries_at(e: &SplittingType, idx: &[usize]) -> SplittingType {
    SplittingType::new(idx.iter().map(|&i| e.at(i)).collect())
}

/// Rebalancing room below a kernel block; `None` when unbounded.
pub fn delta_p(e: &SplittingType, block: &[usize]) -> Option<i128> {
    let left = block[0] - 1;
    if left == 0 {
        return None;
    }
    let floor = e.at(left) as i128;
    Some(block.iter().map(|&j| e.at(j) as i128 - floor - 1).sum())
}

/// Rebalancing room above a quotient block; `None` when unbounded.
pub fn delta_q(e: &SplittingType, block: &[usize]) -> Option<i128> {
    let right = block[block.len() - 1] + 1;
    if right > e.rank() {
        return None;
    }
    let ceil = e.at(right) as i128;
    Some(block.iter().map(|&j| ceil - e.at(j) as i128 - 1).sum())
}

fn min_opt(x: Option<i128>, y: Option<i128>) -> Option<i128> {
    match (x, y) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Checks the package invariants against e with quotient rank n.
pub fn validate_package(e: &SplittingType, n: usize, pkg: &StablePackage) -> Result<()> {
    let total = e.rank();
    if n > total {
        return precondition(format!("quotient rank {} exceeds rank(e) = {}", n, total));
    }
    let m = total - n;
    if pkg.m_prime > m || pkg.n_prime > n {
        return precondition(format!(
            "m' = {}, n' = {} out of range for m = {}, n = {}",
            pkg.m_prime, pkg.n_prime, m, n
        ));
    }
    if !pkg.blocks.len().is_multiple_of(2) {
        return precondition("blocks must alternate kernel and quotient intervals");
    }
    let r = pkg.r();
    if pkg.delta.len() != r {
        return precondition(format!("{} rebalancing amounts for {} block pairs", pkg.delta.len(), r));
    }
    if r == 0 && (pkg.n_prime != n || pkg.m_prime != m) {
        return precondition("an empty partition needs n' = n and m' = m");
    }
    let mut next = pkg.n_prime + 1;
    for b in &pkg.blocks {
        if b.is_empty() {
            return precondition("empty block");
        }
        for &j in b {
            if j != next {
                return precondition("blocks must be consecutive intervals");
            }
            next += 1;
        }
    }
    if next != total - pkg.m_prime + 1 {
        return precondition("blocks do not cover the middle range");
    }
    let kernel_size: usize = (1..=r).map(|i| pkg.kernel_block(i).len()).sum();
    if kernel_size != m - pkg.m_prime {
        return precondition("kernel blocks have the wrong total size");
    }
    for i in 1..r {
        let p_last = *pkg.kernel_block(i).last().unwrap();
        let q_next = pkg.quotient_block(i + 1)[0];
        if e.at(p_last) >= e.at(q_next) {
            return precondition(format!("block constraint fails between pairs {} and {}", i, i + 1));
        }
    }
    for i in 1..=r {
        let d = pkg.delta[i - 1];
        let bound = min_opt(delta_p(e, pkg.kernel_block(i)), delta_q(e, pkg.quotient_block(i)));
        if d < 0 || bound.is_some_and(|u| d > u) {
            return precondition(format!("rebalancing amount {} out of bounds at pair {}", d, i));
        }
    }
    Ok(())
}

/// The pair (b, a) produced by a package.
pub fn package_expand(e: &SplittingType, n: usize, pkg: &StablePackage) -> Result<(SplittingType, SplittingType)> {
    validate_package(e, n, pkg)?;
    let (a, b) = expand_unchecked(e, pkg)?;
    let sorted = |v: &[i64]| v.windows(2).all(|w| w[0] <= w[1]);
    if !sorted(&a) || !sorted(&b) {
        return Err(Error::Internal(format!(
            "package expands to unsorted tuples b = {:?}, a = {:?}",
            b, a
        )));
    }
    Ok((SplittingType::new(b), SplittingType::new(a)))
}

fn expand_unchecked(e: &SplittingType, pkg: &StablePackage) -> Result<(Vec<i64>, Vec<i64>)> {
    let mut a: Vec<i64> = (1..=pkg.n_prime).map(|i| e.at(i)).collect();
    let mut b: Vec<i64> = Vec::new();
    for i in 1..=pkg.r() {
        let d = pkg.delta[i - 1];
        a.extend_from_slice(alpha_balance(&entries_at(e, pkg.quotient_block(i)), d)?.entries());
        b.extend_from_slice(beta_balance(&entries_at(e, pkg.kernel_block(i)), d)?.entries());
    }
    let total = e.rank();
    b.extend((total - pkg.m_prime + 1..=total).map(|i| e.at(i)));
    Ok((a, b))
}

/// The strict inequalities at every seam between balanced blocks.
pub fn is_strongly_stable(e: &SplittingType, n: usize, pkg: &StablePackage) -> Result<bool> {
    validate_package(e, n, pkg)?;
    let r = pkg.r();
    if r == 0 {
        return Ok(true);
    }
    let alpha = |i: usize| alpha_balance(&entries_at(e, pkg.quotient_block(i)), pkg.delta[i - 1]);
    let beta = |i: usize| beta_balance(&entries_at(e, pkg.kernel_block(i)), pkg.delta[i - 1]);
    if pkg.n_prime > 0 && e.at(pkg.n_prime) >= beta(1)?.at(1) {
        return Ok(false);
    }
    for i in 1..r {
        if alpha(i)?.last() >= beta(i + 1)?.first() {
            return Ok(false);
        }
    }
    let top = e.rank() - pkg.m_prime + 1;
    if pkg.m_prime > 0 && alpha(r)?.last() >= Some(e.at(top)) {
        return Ok(false);
    }
    Ok(true)
}

/// Stratum dimension: hom(e, a) - end(a).
pub fn stratum_dim(e: &SplittingType, a: &SplittingType) -> i128 {
    hom_dim(e, a) - end_dim(a)
}

/// Kernel-side stratum dimension: hom(b, e) - end(b).
pub fn kernel_stratum_dim(b: &SplittingType, e: &SplittingType) -> i128 {
    hom_dim(b, e) - end_dim(b)
}

/// Strong stability read off from dimensions: stratum dimension equals hom(b, a).
pub fn strongly_stable_via_dimension(e: &SplittingType, b: &SplittingType, a: &SplittingType) -> bool {
    stratum_dim(e, a) == hom_dim(b, a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub b: SplittingType,
    pub a: SplittingType,
    #[serde(rename = "D")]
    pub dim: i128,
    #[serde(rename = "T")]
    pub tangent: i128,
    pub strongly_stable: bool,
    pub packages: Vec<StablePackage>,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for s in 1..=left.saturating_sub(parts - 1) {
            cur.push(s);
            rec(left - s, parts - 1, cur, out);
            cur.pop();
        }
    }
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Nonnegative vectors with the given sum and per-entry caps.
fn capped_vectors(caps: &[Option<i128>], sum: i128) -> Vec<Vec<i128>> {
    let mut out = Vec::new();
    fn rec(caps: &[Option<i128>], left: i128, cur: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
        let i = cur.len();
        if i == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: Option<i128> = caps[i + 1..].iter().try_fold(0i128, |s, c| c.map(|c| s + c));
        let hi = caps[i].map_or(left, |c| c.min(left));
        let lo = rest.map_or(0, |r| (left - r).max(0));
        for v in lo..=hi {
            cur.push(v);
            rec(caps, left - v, cur, out);
            cur.pop();
        }
    }
    if sum >= 0 {
        rec(caps, sum, &mut Vec::new(), &mut out);
    }
    out
}

/// All valid packages for quotients of rank n and degree d.
pub fn enumerate_packages(e: &SplittingType, n: usize, d: i128) -> Result<Vec<StablePackage>> {
    let total = e.rank();
    if n == 0 || n >= total {
        return precondition(format!("need 1 <= n < rank(e), got n = {}", n));
    }
    let m = total - n;
    let mut out = Vec::new();
    for n_prime in 0..=n {
        for m_prime in 0..=m {
            let (kp, kq) = (m - m_prime, n - n_prime);
            let fixed: i128 = (1..=n_prime).map(|i| e.at(i) as i128).sum();
            if kp == 0 && kq == 0 {
                if fixed == d {
                    out.push(StablePackage::from_sizes(m_prime, n_prime, &[], vec![]));
                }
                continue;
            }
            for r in 1..=kp.min(kq) {
                let ps = compositions(kp, r);
                let qs = compositions(kq, r);
                guard::check("block partitions", (ps.len() as u128) * (qs.len() as u128))?;
                for p in &ps {
                    for q in &qs {
                        let sizes: Vec<usize> = (0..r).flat_map(|i| [p[i], q[i]]).collect();
                        let shell = StablePackage::from_sizes(m_prime, n_prime, &sizes, vec![0; r]);
                        if !(1..r).all(|i| {
                            let p_last = *shell.kernel_block(i).last().unwrap();
                            e.at(p_last) < e.at(shell.quotient_block(i + 1)[0])
                        }) {
                            continue;
                        }
                        let q_sum: i128 = (1..=r)
                            .flat_map(|i| shell.quotient_block(i).iter().map(|&j| e.at(j) as i128))
                            .sum();
                        let caps: Vec<Option<i128>> = (1..=r)
                            .map(|i| min_opt(delta_p(e, shell.kernel_block(i)), delta_q(e, shell.quotient_block(i))))
                            .collect();
                        for delta in capped_vectors(&caps, d - fixed - q_sum) {
                            out.push(StablePackage {
                                delta,
                                ..shell.clone()
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every stable pair for quotients of rank n and degree d, keyed by (b, a).
pub fn enumerate_stable_pairs(e: &SplittingType, n: usize, d: i128) -> Result<Vec<ComponentRecord>> {
    let mut by_pair: BTreeMap<(SplittingType, SplittingType), Vec<StablePackage>> = BTreeMap::new();
    for pkg in enumerate_packages(e, n, d)? {
        let pair = package_expand(e, n, &pkg)?;
        by_pair.entry(pair).or_default().push(pkg);
    }
    let mut records = Vec::with_capacity(by_pair.len());
    for ((b, a), packages) in by_pair {
        // a pair can have several packages and the seam inequalities may hold
        // for only one of them, so any passing witness decides
        let mut strongly_stable = false;
        for pkg in &packages {
            strongly_stable |= is_strongly_stable(e, n, pkg)?;
        }
        records.push(ComponentRecord {
            dim: stratum_dim(e, &a),
            tangent: hom_dim(&b, &a),
            strongly_stable,
            b,
            a,
            packages,
        });
    }
    records.sort_by(|x, y| (x.dim, x.tangent, &x.b, &x.a).cmp(&(y.dim, y.tangent, &y.b, &y.a)));
    Ok(records)
}

/// The strongly stable pairs, one per component of the locally free locus.
pub fn component_census(e: &SplittingType, n: usize, d: i128) -> Result<Vec<ComponentRecord>> {
    Ok(enumerate_stable_pairs(e, n, d)?
        .into_iter()
        .filter(|r| r.strongly_stable)
        .collect())
}

/// The unique dominance-maximal element, or an internal error.
fn unique_maximum(cands: Vec<SplittingType>) -> Result<Option<SplittingType>> {
    let mut best: Option<SplittingType> = None;
    for c in &cands {
        match &best {
            Some(b) if !more_balanced_geq(c, b)? => {}
            _ => best = Some(c.clone()),
        }
    }
    if let Some(b) = &best {
        for c in &cands {
            if !more_balanced_geq(b, c)? {
                return Err(Error::Internal(format!(
                    "no unique most balanced completion: {} and {} are incomparable",
                    b, c
                )));
            }
        }
    }
    Ok(best)
}

/// Generic cokernel of an injection O(b) -> O(e): the most balanced
/// realizable quotient type.
pub fn generic_cokernel(b: &SplittingType, e: &SplittingType) -> Result<SplittingType> {
    if b.rank() > e.rank() {
        return precondition(format!("rank(b) = {} exceeds rank(e) = {}", b.rank(), e.rank()));
    }
    if !realizability::injection_lf_exists(b, e)? {
        return Err(Error::NoQuotient(format!("O{} admits no injection into O{} with locally free cokernel", b, e)));
    }
    let n = e.rank() - b.rank();
    let lower: Vec<i64> = e.entries()[..n].to_vec();
    let cands = bounded_types(&lower, &vec![None; n], e.degree() - b.degree());
    guard::check("quotient candidates", cands.len() as u128)?;
    let realizable: Vec<SplittingType> = cands
        .into_iter()
        .filter(|a| realizability::is_realizable(&Triple::new(b.clone(), e.clone(), a.clone())))
        .collect();
    unique_maximum(realizable)?
        .ok_or_else(|| Error::NoQuotient(format!("no realizable quotient for b = {}, e = {}", b, e)))
}

/// Generic kernel of a surjection O(e) -> O(a), by duality.
pub fn generic_kernel(e: &SplittingType, a: &SplittingType) -> Result<SplittingType> {
    Ok(generic_cokernel(&a.dual(), &e.dual())?.dual())
}

pub fn is_stable(e: &SplittingType, b: &SplittingType, a: &SplittingType) -> Result<bool> {
    Ok(generic_cokernel(b, e)? == *a && generic_kernel(e, a)? == *b)
}
