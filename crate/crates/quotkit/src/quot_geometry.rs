//! Irreducibility and connectedness of the locally free Quot locus.

use crate::error::{precondition, Error, Result};
use crate::realizability::{is_realizable, Triple};
use crate::splitting::{alpha_balance, beta_balance, more_balanced_geq, SplittingType};
use crate::stable_pairs::{self, ComponentRecord, StablePackage};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Pair = (SplittingType, SplittingType);

fn range(e: &SplittingType, lo: usize, hi: usize) -> SplittingType {
    if lo > hi {
        SplittingType::empty()
    } else {
        e.slice(lo, hi)
    }
}

fn sum_range(e: &SplittingType, lo: usize, hi: usize) -> i128 {
    (lo..=hi).map(|i| e.at(i) as i128).sum()
}

/// Slack f(j) left after fixing the first j entries and skipping e_{j+1}.
fn quotient_slack(e: &SplittingType, n: usize, d: i128, j: usize) -> i128 {
    d - sum_range(e, 1, j) - sum_range(e, j + 2, n + 1)
}

/// Length of the prefix that every degree-d quotient must share with e.
fn quotient_prefix(e: &SplittingType, n: usize, d: i128) -> Result<usize> {
    for j in 0..=n {
        let f = quotient_slack(e, n, d, j);
        // a tie only matters when some quotient entry follows the prefix
        let tie = j < n && e.at(j + 1) == e.at(j + 2);
        if f > 0 || (f == 0 && !tie) {
            return Ok(j);
        }
    }
    Err(Error::NoQuotient(format!(
        "O{} has no locally free quotient of rank {} and degree {}",
        e, n, d
    )))
}

fn check_rank(e: &SplittingType, n: usize) -> Result<()> {
    if n == 0 || n >= e.rank() {
        return precondition(format!("need 1 <= n < rank(e) = {}, got n = {}", e.rank(), n));
    }
    Ok(())
}

/// The most balanced quotient type of rank n and degree d.
pub fn most_balanced_quotient(e: &SplittingType, n: usize, d: i128) -> Result<SplittingType> {
    check_rank(e, n)?;
    let np = quotient_prefix(e, n, d)?;
    let f = quotient_slack(e, n, d, np);
    let tail = alpha_balance(&range(e, np + 2, n + 1), f).map_err(|_| {
        Error::NoQuotient(format!("O{} has no locally free quotient of rank {} and degree {}", e, n, d))
    })?;
    let mut v = range(e, 1, np).entries().to_vec();
    v.extend_from_slice(tail.entries());
    Ok(SplittingType::new(v))
}

/// The most balanced kernel type of rank m and degree d', by duality.
pub fn most_balanced_kernel(e: &SplittingType, m: usize, kernel_degree: i128) -> Result<SplittingType> {
    Ok(most_balanced_quotient(&e.dual(), m, -kernel_degree)?.dual())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    pub b: SplittingType,
    pub a: SplittingType,
    pub pair_realizable: bool,
    pub single_block_condition: bool,
    pub components: usize,
    /// Realizable pair, single block condition and a single component all agree.
    pub conditions_agree: bool,
    pub degree_bound: bool,
}

/// The degree bound that alone forces irreducibility.
pub fn degree_bound_holds(e: &SplittingType, n: usize, d: i128) -> bool {
    let m = e.rank() - n;
    let (lo, hi) = (e.first().unwrap_or(0) as i128, e.last().unwrap_or(0) as i128);
    let kernel_degree = e.degree() - d;
    d > (n as i128) * (hi - 1) && kernel_degree < (m as i128) * (lo + 1)
}

/// Whether one block pair with the full slack reproduces both most balanced types.
pub fn single_block_condition(e: &SplittingType, n: usize, d: i128) -> Result<bool> {
    check_rank(e, n)?;
    let total = e.rank();
    let m = total - n;
    let np = quotient_prefix(e, n, d)?;
    let mp = quotient_prefix(&e.dual(), m, d - e.degree())?;
    let slack = d - sum_range(e, 1, np) - sum_range(e, np + m - mp + 1, total - mp);
    if slack < 0 {
        return Ok(false);
    }
    let f = quotient_slack(e, n, d, np);
    let g = quotient_slack(&e.dual(), m, d - e.degree(), mp);
    let (Ok(alpha_one), Ok(alpha_mb)) = (
        alpha_balance(&range(e, np + m - mp + 1, total - mp), slack),
        alpha_balance(&range(e, np + 2, n + 1), f),
    ) else {
        return Ok(false);
    };
    let (Ok(beta_one), Ok(beta_mb)) = (
        beta_balance(&range(e, np + 1, np + m - mp), slack),
        beta_balance(&range(e, n, total - mp - 1), g),
    ) else {
        return Ok(false);
    };
    let below_top = mp == 0 || alpha_one.entries().iter().all(|&x| x < e.at(total - mp + 1));
    let above_bottom = np == 0 || beta_one.entries().iter().all(|&x| x > e.at(np));
    Ok(alpha_one == alpha_mb && beta_one == beta_mb && below_top && above_bottom)
}

/// Decides irreducibility by realizability of the most balanced pair, and
/// evaluates the other two characterizations alongside.
pub fn irreducible(e: &SplittingType, n: usize, d: i128) -> Result<IrreducibilityReport> {
    check_rank(e, n)?;
    let a = most_balanced_quotient(e, n, d)?;
    let b = most_balanced_kernel(e, e.rank() - n, e.degree() - d)?;
    let pair_realizable = is_realizable(&Triple::new(b.clone(), e.clone(), a.clone()));
    let single = single_block_condition(e, n, d)?;
    let components = stable_pairs::component_census(e, n, d)?.len();
    Ok(IrreducibilityReport {
        irreducible: pair_realizable,
        b,
        a,
        pair_realizable,
        single_block_condition: single,
        components,
        conditions_agree: pair_realizable == single && pair_realizable == (components == 1),
        degree_bound: degree_bound_holds(e, n, d),
    })
}

/// Which side an iterative balancing round updates first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceOrder {
    QuotientFirst,
    KernelFirst,
}

/// Alternately rebalance quotient then kernel until nothing moves. Returns
/// every pair visited, starting with the input; consecutive pairs share one side.
pub fn iterative_balancing(e: &SplittingType, b: &SplittingType, a: &SplittingType) -> Result<Vec<Pair>> {
    iterative_balancing_with(e, b, a, BalanceOrder::QuotientFirst)
}

pub fn iterative_balancing_with(
    e: &SplittingType,
    b: &SplittingType,
    a: &SplittingType,
    order: BalanceOrder,
) -> Result<Vec<Pair>> {
    if !is_realizable(&Triple::new(b.clone(), e.clone(), a.clone())) {
        return precondition(format!("({}, {}, {}) is not realizable", b, e, a));
    }
    let mut chain = vec![(b.clone(), a.clone())];
    let (mut b, mut a) = (b.clone(), a.clone());
    let mut quotient_turn = order == BalanceOrder::QuotientFirst;
    let mut idle = 0;
    while idle < 2 {
        let moved = if quotient_turn {
            let next = stable_pairs::generic_cokernel(&b, e)?;
            if !more_balanced_geq(&next, &a)? {
                return Err(Error::Internal(format!("quotient step moved down from ({}, {})", b, a)));
            }
            std::mem::replace(&mut a, next) != a
        } else {
            let next = stable_pairs::generic_kernel(e, &a)?;
            if !more_balanced_geq(&next, &b)? {
                return Err(Error::Internal(format!("kernel step moved down from ({}, {})", b, a)));
            }
            std::mem::replace(&mut b, next) != b
        };
        if moved {
            chain.push((b.clone(), a.clone()));
            idle = 0;
        } else {
            idle += 1;
        }
        quotient_turn = !quotient_turn;
    }
    Ok(chain)
}

/// Realizable pair obtained by one move of the procedure, or `None` when the
/// package is already a single block pair (or its last quotient block sits on
/// a flat step of e).
pub fn procedure_move(e: &SplittingType, n: usize, pkg: &StablePackage) -> Result<Option<Pair>> {
    let r = pkg.r();
    if let Some(i) = (2..=r).rev().find(|&i| pkg.delta[i - 1] > 0) {
        let mut moved = pkg.clone();
        moved.delta[0] += 1;
        moved.delta[i - 1] -= 1;
        return Ok(Some(expand_loose(e, &moved)?));
    }
    if r < 2 {
        return Ok(None);
    }
    let q0 = pkg.quotient_block(r)[0];
    let jump = (e.at(q0) - e.at(q0 - 1)) as i128;
    if jump == 0 {
        // the transfer bookkeeping needs a strict step in e here
        return Ok(None);
    }
    let (b, a) = stable_pairs::package_expand(e, n, pkg)?;
    let first_q = alpha_balance(&range(e, pkg.quotient_block(1)[0], *pkg.quotient_block(1).last().unwrap()), pkg.delta[0])?;
    let raised_q = alpha_balance(&first_q.clone(), 1)?;
    let mut av = a.entries().to_vec();
    replace_one(&mut av, e.at(q0), e.at(q0) - 1)?;
    for (old, new) in first_q.entries().iter().zip(raised_q.entries()) {
        if old != new {
            replace_one(&mut av, *old, *new)?;
        }
    }
    let mut bv = b.entries().to_vec();
    replace_one(&mut bv, e.at(q0 - 1), e.at(q0))?;
    bv[0] -= i64::try_from(jump).map_err(|_| Error::Internal("jump overflow".into()))?;
    Ok(Some((SplittingType::new(bv), SplittingType::new(av))))
}

fn replace_one(v: &mut [i64], old: i64, new: i64) -> Result<()> {
    let slot = v
        .iter_mut()
        .rev()
        .find(|x| **x == old)
        .ok_or_else(|| Error::Internal(format!("entry {} not found", old)))?;
    *slot = new;
    Ok(())
}

/// Package expansion without the rebalancing bounds.
fn expand_loose(e: &SplittingType, pkg: &StablePackage) -> Result<Pair> {
    let mut a: Vec<i64> = (1..=pkg.n_prime).map(|i| e.at(i)).collect();
    let mut b: Vec<i64> = Vec::new();
    let at = |blk: &[usize]| SplittingType::new(blk.iter().map(|&i| e.at(i)).collect());
    for i in 1..=pkg.r() {
        a.extend_from_slice(alpha_balance(&at(pkg.quotient_block(i)), pkg.delta[i - 1])?.entries());
        b.extend_from_slice(beta_balance(&at(pkg.kernel_block(i)), pkg.delta[i - 1])?.entries());
    }
    let total = e.rank();
    b.extend((total - pkg.m_prime + 1..=total).map(|i| e.at(i)));
    Ok((SplittingType::new(b), SplittingType::new(a)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// Dominance-ordered stable pairs joined through (b, a').
    ConnectingPairs,
    /// Rebalancing move followed by iterative balancing.
    Procedure,
    /// Two pairs joined through a realizable mixed pair without dominance.
    SharedStratum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    pub chain: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub b: SplittingType,
    pub a: SplittingType,
    pub strongly_stable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityCertificate {
    pub e: SplittingType,
    pub n: usize,
    pub d: i128,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub connected: bool,
    /// Groups of strongly stable node indices; a single group when connected.
    pub groups: Vec<Vec<usize>>,
}

fn push_dedup(chain: &mut Vec<Pair>, p: Pair) {
    if chain.last() != Some(&p) {
        chain.push(p);
    }
}

fn realizable_pair(e: &SplittingType, p: &Pair) -> bool {
    is_realizable(&Triple::new(p.0.clone(), e.clone(), p.1.clone()))
}

/// Two realizable pairs joined through a mixed pair: prefer the one
/// keeping the first kernel.
fn bridge(e: &SplittingType, x: &Pair, y: &Pair) -> Option<Vec<Pair>> {
    for mid in [(x.0.clone(), y.1.clone()), (y.0.clone(), x.1.clone())] {
        if realizable_pair(e, &mid) {
            let mut chain = vec![x.clone()];
            push_dedup(&mut chain, mid);
            push_dedup(&mut chain, y.clone());
            return Some(chain);
        }
    }
    None
}

fn dominates(x: &Pair, y: &Pair) -> bool {
    // x has the more balanced quotient, y the more balanced kernel
    more_balanced_geq(&x.1, &y.1).unwrap_or(false) && more_balanced_geq(&y.0, &x.0).unwrap_or(false)
}

struct Components(Vec<usize>);

impl Components {
    fn new(n: usize) -> Self {
        Components((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.0[x] = root;
        root
    }
    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        self.0[rx] = ry;
    }
}

fn strong_groups(nodes: &[Node], edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut uf = Components::new(nodes.len());
    for e in edges {
        uf.union(e.from, e.to);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        if node.strongly_stable {
            groups.entry(uf.find(i)).or_default().push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// The procedure chain from a stable pair: one move, then iterative
/// balancing. Ends at another stable pair.
pub fn procedure_chain(e: &SplittingType, n: usize, rec: &ComponentRecord) -> Result<Option<Vec<Pair>>> {
    let start = (rec.b.clone(), rec.a.clone());
    for pkg in &rec.packages {
        let Some(moved) = procedure_move(e, n, pkg)? else { continue };
        if !realizable_pair(e, &moved) {
            return Err(Error::Internal(format!(
                "rebalancing move from ({}, {}) gave non-realizable ({}, {})",
                rec.b, rec.a, moved.0, moved.1
            )));
        }
        let mut chain = bridge(e, &start, &moved).ok_or_else(|| {
            Error::Internal(format!("no realizable bridge from ({}, {}) to ({}, {})", rec.b, rec.a, moved.0, moved.1))
        })?;
        // kernel first, as in the worked example of the procedure
        for p in iterative_balancing_with(e, &moved.0, &moved.1, BalanceOrder::KernelFirst)?.into_iter().skip(1) {
            push_dedup(&mut chain, p);
        }
        return Ok(Some(chain));
    }
    Ok(None)
}

/// Builds a verified certificate that the strongly stable pairs all lie in
/// one connected component.
pub fn connectedness_certificate(e: &SplittingType, n: usize, d: i128) -> Result<ConnectivityCertificate> {
    let records = stable_pairs::enumerate_stable_pairs(e, n, d)?;
    let nodes: Vec<Node> = records
        .iter()
        .map(|r| Node {
            b: r.b.clone(),
            a: r.a.clone(),
            strongly_stable: r.strongly_stable,
        })
        .collect();
    let index: BTreeMap<Pair, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, x)| ((x.b.clone(), x.a.clone()), i))
        .collect();
    let pairs: Vec<Pair> = nodes.iter().map(|x| (x.b.clone(), x.a.clone())).collect();
    let mut edges = Vec::new();
    for i in 0..pairs.len() {
        for j in 0..pairs.len() {
            if i != j && dominates(&pairs[i], &pairs[j]) {
                let mid = (pairs[i].0.clone(), pairs[j].1.clone());
                if realizable_pair(e, &mid) {
                    let mut chain = vec![pairs[i].clone()];
                    push_dedup(&mut chain, mid);
                    push_dedup(&mut chain, pairs[j].clone());
                    edges.push(Edge {
                        from: i,
                        to: j,
                        kind: EdgeKind::ConnectingPairs,
                        chain,
                    });
                }
            }
        }
    }
    for (i, rec) in records.iter().enumerate() {
        if let Some(chain) = procedure_chain(e, n, rec)? {
            let end = chain.last().unwrap();
            let &j = index.get(end).ok_or_else(|| {
                Error::Internal(format!("balancing ended at ({}, {}), which is not a stable pair", end.0, end.1))
            })?;
            edges.push(Edge {
                from: i,
                to: j,
                kind: EdgeKind::Procedure,
                chain,
            });
        }
    }
    let mut groups = strong_groups(&nodes, &edges);
    if groups.len() > 1 {
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                if let Some(chain) = bridge(e, &pairs[i], &pairs[j]) {
                    edges.push(Edge {
                        from: i,
                        to: j,
                        kind: EdgeKind::SharedStratum,
                        chain,
                    });
                }
            }
        }
        groups = strong_groups(&nodes, &edges);
    }
    let cert = ConnectivityCertificate {
        e: e.clone(),
        n,
        d,
        connected: groups.len() <= 1,
        nodes,
        edges,
        groups,
    };
    if let Err(msg) = verify_certificate(&cert) {
        return Err(Error::Internal(format!("certificate failed its own check: {}", msg)));
    }
    Ok(cert)
}

/// Independent re-check of every edge witness and of the connectivity claim.
pub fn verify_certificate(cert: &ConnectivityCertificate) -> std::result::Result<(), String> {
    let e = &cert.e;
    for (k, edge) in cert.edges.iter().enumerate() {
        let (Some(from), Some(to)) = (cert.nodes.get(edge.from), cert.nodes.get(edge.to)) else {
            return Err(format!("edge {} points outside the node list", k));
        };
        let chain = &edge.chain;
        if chain.first() != Some(&(from.b.clone(), from.a.clone())) || chain.last() != Some(&(to.b.clone(), to.a.clone())) {
            return Err(format!("edge {} chain does not join its endpoints", k));
        }
        for p in chain {
            if !realizable_pair(e, p) {
                return Err(format!("edge {} passes through non-realizable ({}, {})", k, p.0, p.1));
            }
        }
        for w in chain.windows(2) {
            if w[0].0 != w[1].0 && w[0].1 != w[1].1 {
                return Err(format!("edge {} changes both sides at once", k));
            }
        }
        if edge.kind == EdgeKind::ConnectingPairs {
            let (x, y) = (chain.first().unwrap(), chain.last().unwrap());
            if !dominates(x, y) {
                return Err(format!("edge {} lacks the dominance relation", k));
            }
        }
    }
    for node in &cert.nodes {
        if !stable_pairs::is_stable(e, &node.b, &node.a).map_err(|x| x.to_string())? {
            return Err(format!("node ({}, {}) is not stable", node.b, node.a));
        }
        if node.strongly_stable != stable_pairs::strongly_stable_via_dimension(e, &node.b, &node.a) {
            return Err(format!("node ({}, {}) has a wrong strong stability flag", node.b, node.a));
        }
    }
    let groups = strong_groups(&cert.nodes, &cert.edges);
    if (groups.len() <= 1) != cert.connected || groups != cert.groups {
        return Err("connectivity claim does not match the edges".into());
    }
    Ok(())
}
