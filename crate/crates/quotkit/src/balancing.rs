//! Balancing data (sigma, tau, gamma) certifying realizability.
//!
//! `sigma[j-1]` and `tau[i-1]` hold 1-indexed positions in `e`;
//! `gamma[i-1][j-1]` is the transfer from kernel entry i to quotient entry j.

use crate::error::{precondition, Error, Result};
use crate::guard;
use crate::realizability::{self, Triple};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancingDatum {
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
    pub gamma: Vec<Vec<i128>>,
}

#[derive(Serialize, Deserialize)]
struct DatumJson {
    sigma: Vec<usize>,
    tau: Vec<usize>,
    gamma: Vec<[i128; 3]>,
}

impl Serialize for BalancingDatum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DatumJson {
            sigma: self.sigma.clone(),
            tau: self.tau.clone(),
            gamma: self.sparse_gamma(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BalancingDatum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DatumJson::deserialize(d)?;
        let (m, n) = (j.tau.len(), j.sigma.len());
        let mut gamma = vec![vec![0i128; n]; m];
        for [i, jj, v] in j.gamma {
            let (i, jj) = (i as usize, jj as usize);
            if i == 0 || jj == 0 || i > m || jj > n {
                return Err(serde::de::Error::custom(format!(
                    "gamma index ({}, {}) out of range",
                    i, jj
                )));
            }
            gamma[i - 1][jj - 1] = v;
        }
        Ok(BalancingDatum {
            sigma: j.sigma,
            tau: j.tau,
            gamma,
        })
    }
}

impl BalancingDatum {
    /// Nonzero entries as 1-indexed (i, j, value) triples.
    pub fn sparse_gamma(&self) -> Vec<[i128; 3]> {
        let mut out = Vec::new();
        for (i, row) in self.gamma.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    out.push([(i + 1) as i128, (j + 1) as i128, v]);
                }
            }
        }
        out
    }

    pub fn from_sparse(sigma: Vec<usize>, tau: Vec<usize>, entries: &[(usize, usize, i128)]) -> Self {
        let mut gamma = vec![vec![0i128; sigma.len()]; tau.len()];
        for &(i, j, v) in entries {
            gamma[i - 1][j - 1] = v;
        }
        BalancingDatum { sigma, tau, gamma }
    }
}

/// Checks every defining condition of a balancing datum against `t`.
pub fn verify_datum(t: &Triple, d: &BalancingDatum) -> Result<bool> {
    let (m, n, r) = (t.m(), t.n(), t.e.rank());
    if d.tau.len() != m || d.sigma.len() != n || d.gamma.len() != m {
        return precondition("datum shape does not match the triple's ranks");
    }
    if d.gamma.iter().any(|row| row.len() != n) {
        return precondition("gamma row length does not match rank(a)");
    }
    if d.sigma.iter().chain(&d.tau).any(|&x| x == 0 || x > r) {
        return precondition(format!("sigma/tau value outside [1, {}]", r));
    }
    if m + n != r {
        return Ok(false);
    }
    let mut seen = vec![false; r];
    for &x in d.sigma.iter().chain(&d.tau) {
        if seen[x - 1] {
            return Ok(false);
        }
        seen[x - 1] = true;
    }
    let e = |k: usize| t.e.at(k) as i128;
    let (b, a) = (|i: usize| t.b.at(i) as i128, |j: usize| t.a.at(j) as i128);
    for i in 1..=m {
        for j in 1..=n {
            let g = d.gamma[i - 1][j - 1];
            if g < 0 {
                return Ok(false);
            }
            if g != 0 {
                let (et, es) = (e(d.tau[i - 1]), e(d.sigma[j - 1]));
                if !(b(i) < et && et <= es && es < a(j)) {
                    return Ok(false);
                }
                if g > (et - b(i)).min(a(j) - es) {
                    return Ok(false);
                }
            }
        }
    }
    for i in 1..=m {
        let row: i128 = d.gamma[i - 1].iter().sum();
        if row != e(d.tau[i - 1]) - b(i) {
            return Ok(false);
        }
    }
    for j in 1..=n {
        let col: i128 = (1..=m).map(|i| d.gamma[i - 1][j - 1]).sum();
        if col != a(j) - e(d.sigma[j - 1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn admissible(t: &Triple, tau: &[usize], sigma: &[usize], i: usize, j: usize) -> bool {
    let et = t.e.at(tau[i - 1]);
    let es = t.e.at(sigma[j - 1]);
    t.b.at(i) < et && et <= es && es < t.a.at(j)
}

/// Solves the transfer problem for fixed sigma and tau, or returns `None`.
pub fn solve_transfer(t: &Triple, sigma: &[usize], tau: &[usize]) -> Option<Vec<Vec<i128>>> {
    let (m, n) = (t.m(), t.n());
    let supply: Vec<i128> = (1..=m)
        .map(|i| t.e.at(tau[i - 1]) as i128 - t.b.at(i) as i128)
        .collect();
    let demand: Vec<i128> = (1..=n)
        .map(|j| t.a.at(j) as i128 - t.e.at(sigma[j - 1]) as i128)
        .collect();
    if supply.iter().chain(&demand).any(|&x| x < 0) {
        return None;
    }
    if supply.iter().sum::<i128>() != demand.iter().sum::<i128>() {
        return None;
    }
    let allowed: Vec<Vec<bool>> = (1..=m)
        .map(|i| (1..=n).map(|j| admissible(t, tau, sigma, i, j)).collect())
        .collect();
    max_flow_transfer(&supply, &demand, &allowed)
}

/// Bipartite transportation by Edmonds–Karp on source -> rows -> cols -> sink.
fn max_flow_transfer(supply: &[i128], demand: &[i128], allowed: &[Vec<bool>]) -> Option<Vec<Vec<i128>>> {
    let (m, n) = (supply.len(), demand.len());
    let total: i128 = supply.iter().sum();
    let nodes = m + n + 2;
    let (src, snk) = (m + n, m + n + 1);
    let mut cap = vec![vec![0i128; nodes]; nodes];
    for i in 0..m {
        cap[src][i] = supply[i];
        for j in 0..n {
            if allowed[i][j] {
                cap[i][m + j] = total;
            }
        }
    }
    for j in 0..n {
        cap[m + j][snk] = demand[j];
    }
    let orig = cap.clone();
    let mut flow = 0i128;
    loop {
        let mut prev = vec![usize::MAX; nodes];
        prev[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in 0..nodes {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[snk] == usize::MAX {
            break;
        }
        let mut push = i128::MAX;
        let mut v = snk;
        while v != src {
            let u = prev[v];
            push = push.min(cap[u][v]);
            v = u;
        }
        let mut v = snk;
        while v != src {
            let u = prev[v];
            cap[u][v] -= push;
            cap[v][u] += push;
            v = u;
        }
        flow += push;
    }
    if flow != total {
        return None;
    }
    Some(
        (0..m)
            .map(|i| (0..n).map(|j| (orig[i][m + j] - cap[i][m + j]).max(0)).collect())
            .collect(),
    )
}

/// The canonical datum read off from the threshold profile.
///
/// Gamma is filled greedily: quotient indices j in increasing order, each
/// drawing from kernel rows i in increasing order. If the greedy pass leaves
/// demand unmet the transfer problem is solved by max-flow instead.
pub fn construct_datum(t: &Triple) -> Result<BalancingDatum> {
    if let Some(f) = realizability::weak_eligibility_failure(t) {
        return Err(Error::NotRealizable(f));
    }
    let q = realizability::quantities(t)?;
    if let Some(f) = realizability::tail_condition_failure(&q) {
        return Err(Error::NotRealizable(f));
    }
    let (sigma, tau) = canonical_assignment(t)?;
    let gamma = match greedy_fill(t, &sigma, &tau) {
        Some(g) => g,
        None => solve_transfer(t, &sigma, &tau)
            .ok_or_else(|| Error::Internal(format!("no transfer table for canonical datum of {}", t)))?,
    };
    Ok(BalancingDatum { sigma, tau, gamma })
}

/// (sigma, tau) from the threshold profile.
pub fn canonical_assignment(t: &Triple) -> Result<(Vec<usize>, Vec<usize>)> {
    let h = realizability::h_profile(t)?;
    let (m, n) = (t.m(), t.n());
    let k = m - t.m_prime();
    let tau: Vec<usize> = (1..=m)
        .map(|i| if i <= k { h[i - 1] + i - 1 } else { n + i })
        .collect();
    let sigma: Vec<usize> = (1..=n)
        .map(|j| j + (1..=m).filter(|&mu| h[mu - 1] <= j).max().unwrap_or(0))
        .collect();
    Ok((sigma, tau))
}

pub fn greedy_fill(t: &Triple, sigma: &[usize], tau: &[usize]) -> Option<Vec<Vec<i128>>> {
    let (m, n) = (t.m(), t.n());
    let mut left: Vec<i128> = (1..=m)
        .map(|i| t.e.at(tau[i - 1]) as i128 - t.b.at(i) as i128)
        .collect();
    if left.iter().any(|&x| x < 0) {
        return None;
    }
    let mut gamma = vec![vec![0i128; n]; m];
    for j in 1..=n {
        let mut need = t.a.at(j) as i128 - t.e.at(sigma[j - 1]) as i128;
        if need < 0 {
            return None;
        }
        for i in 1..=m {
            if need == 0 {
                break;
            }
            if left[i - 1] > 0 && admissible(t, tau, sigma, i, j) {
                let g = need.min(left[i - 1]);
                gamma[i - 1][j - 1] = g;
                left[i - 1] -= g;
                need -= g;
            }
        }
        if need != 0 {
            return None;
        }
    }
    if left.iter().any(|&x| x != 0) {
        return None;
    }
    Some(gamma)
}

fn combinations(r: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, r: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=r {
            if r - x + 1 < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, r, k, cur, out);
            cur.pop();
        }
    }
    rec(1, r, k, &mut cur, &mut out);
    out
}

fn complement(r: usize, taken: &[usize]) -> Vec<usize> {
    (1..=r).filter(|x| !taken.contains(x)).collect()
}

/// Exhaustive search for any balancing datum.
///
/// Only increasing sigma and tau are tried: exchanging the images of two
/// kernel rows (or two quotient columns) that are out of order turns a
/// datum into another datum, so this loses nothing.
pub fn search_datum(t: &Triple) -> Result<Option<BalancingDatum>> {
    if !t.ranks_compatible() {
        return precondition("rank(b) + rank(a) must equal rank(e)");
    }
    let (m, r) = (t.m(), t.e.rank());
    guard::check("balancing datum search", guard::binomial(r as u128, m as u128))?;
    if t.b.degree() + t.a.degree() != t.e.degree() {
        return Ok(None);
    }
    for tau in combinations(r, m) {
        let sigma = complement(r, &tau);
        if let Some(gamma) = solve_transfer(t, &sigma, &tau) {
            return Ok(Some(BalancingDatum { sigma, tau, gamma }));
        }
    }
    Ok(None)
}

fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// No other datum has tau' <= tau pointwise with one strict inequality.
pub fn is_minimal(t: &Triple, d: &BalancingDatum) -> Result<bool> {
    if !verify_datum(t, d)? {
        return precondition("datum does not verify");
    }
    let (m, r) = (t.m(), t.e.rank());
    let size = guard::binomial(r as u128, m as u128).saturating_mul(guard::factorial(m as u128));
    guard::check("balancing datum minimality", size)?;
    for set in combinations(r, m) {
        let sigma = complement(r, &set);
        for tau in permutations(&set) {
            let below = tau.iter().zip(&d.tau).all(|(x, y)| x <= y);
            if !below || tau == d.tau {
                continue;
            }
            if solve_transfer(t, &sigma, &tau).is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn certificate_triple() -> Triple {
        Triple::from_slices(&[0, 3, 9], &[2, 7, 8, 11, 20], &[13, 23])
    }

    fn certificate_datum() -> BalancingDatum {
        BalancingDatum::from_sparse(
            vec![3, 5],
            vec![1, 2, 4],
            &[(1, 1, 2), (2, 1, 3), (2, 2, 1), (3, 2, 2)],
        )
    }

    #[test]
    fn verify_examples() {
        assert!(verify_datum(&certificate_triple(), &certificate_datum()).unwrap());
        let mut bad = certificate_datum();
        bad.gamma[0][0] = 1;
        assert!(!verify_datum(&certificate_triple(), &bad).unwrap());
        let split = Triple::from_slices(&[0, 2], &[0, 1, 2, 3], &[1, 3]);
        let d = BalancingDatum::from_sparse(vec![2, 4], vec![1, 3], &[]);
        assert!(verify_datum(&split, &d).unwrap());
        let oob = BalancingDatum::from_sparse(vec![2, 9], vec![1, 3], &[]);
        assert!(verify_datum(&split, &oob).is_err());
    }

    #[test]
    fn construct_examples() {
        let t = Triple::from_slices(&[-1], &[0, 0], &[1]);
        let d = construct_datum(&t).unwrap();
        assert_eq!(d.sigma, vec![2]);
        assert_eq!(d.tau, vec![1]);
        assert_eq!(d.gamma, vec![vec![1]]);
        let d = construct_datum(&certificate_triple()).unwrap();
        assert!(verify_datum(&certificate_triple(), &d).unwrap());
        let t = Triple::from_slices(&[4, 5, 6], &[0, 4, 5, 6, 8, 12], &[0, 8, 12]);
        let d = construct_datum(&t).unwrap();
        assert!(verify_datum(&t, &d).unwrap());
        assert!(d.gamma.iter().flatten().all(|&g| g == 0));
        assert!(construct_datum(&Triple::from_slices(&[1, 1], &[0, 0, 2, 2], &[1, 1])).is_err());
    }

    #[test]
    fn search_examples() {
        assert!(search_datum(&Triple::from_slices(&[1, 1], &[0, 0, 2, 2], &[1, 1]))
            .unwrap()
            .is_none());
        let split = Triple::from_slices(&[0, 2], &[0, 1, 2, 3], &[1, 3]);
        let d = search_datum(&split).unwrap().unwrap();
        assert!(d.gamma.iter().flatten().all(|&g| g == 0));
        let t = Triple::from_slices(&[-1], &[0, 0], &[1]);
        let d = search_datum(&t).unwrap().unwrap();
        assert_eq!((d.sigma.clone(), d.tau.clone()), (vec![2], vec![1]));
        assert!(is_minimal(&t, &d).unwrap());
    }

    #[test]
    fn minimality() {
        let split = Triple::from_slices(&[0, 2], &[0, 1, 2, 3], &[1, 3]);
        let d = construct_datum(&split).unwrap();
        assert!(is_minimal(&split, &d).unwrap());
        // e = (0,0,0): b = (0), a = (0,0) with tau = (3) is legal but not minimal
        let t = Triple::from_slices(&[0], &[0, 0, 0], &[0, 0]);
        let d = BalancingDatum::from_sparse(vec![1, 2], vec![3], &[]);
        assert!(verify_datum(&t, &d).unwrap());
        assert!(!is_minimal(&t, &d).unwrap());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_value(certificate_datum()).unwrap();
        assert_eq!(
            s,
            serde_json::json!({"sigma":[3,5],"tau":[1,2,4],"gamma":[[1,1,2],[2,1,3],[2,2,1],[3,2,2]]})
        );
        let back: BalancingDatum = serde_json::from_value(s).unwrap();
        assert_eq!(back, certificate_datum());
    }
}
