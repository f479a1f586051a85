//! Deciding whether a triple (b, e, a) fits into 0 -> O(b) -> O(e) -> O(a) -> 0.
//!
//! All index arguments are 1-indexed to match the usual notation:
//! `b` has rank m, `a` has rank n and `e` has rank m + n.

use crate::balancing::{self, BalancingDatum};
use crate::error::{precondition, Result};
use crate::splitting::SplittingType;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub b: SplittingType,
    pub e: SplittingType,
    pub a: SplittingType,
}

impl Triple {
    pub fn new(b: SplittingType, e: SplittingType, a: SplittingType) -> Self {
        Triple { b, e, a }
    }

    pub fn from_slices(b: &[i64], e: &[i64], a: &[i64]) -> Self {
        Triple::new(
            SplittingType::new(b.to_vec()),
            SplittingType::new(e.to_vec()),
            SplittingType::new(a.to_vec()),
        )
    }

    /// Rank of the kernel.
    pub fn m(&self) -> usize {
        self.b.rank()
    }

    /// Rank of the quotient.
    pub fn n(&self) -> usize {
        self.a.rank()
    }

    pub fn ranks_compatible(&self) -> bool {
        self.b.rank() + self.a.rank() == self.e.rank()
    }

    /// The dual sequence 0 -> O(-a) -> O(-e) -> O(-b) -> 0.
    pub fn dual(&self) -> Triple {
        Triple::new(self.a.dual(), self.e.dual(), self.b.dual())
    }

    pub fn repeat(&self, k: usize) -> Triple {
        Triple::new(self.b.repeat(k), self.e.repeat(k), self.a.repeat(k))
    }

    /// Largest prefix length on which `a` and `e` agree.
    pub fn n_prime(&self) -> usize {
        (0..self.n())
            .take_while(|&i| self.a.entries()[i] == self.e.entries()[i])
            .count()
    }

    /// Length of the longest suffix of `b` agreeing with the top of `e`.
    pub fn m_prime(&self) -> usize {
        let n = self.n();
        (1..=self.m())
            .rev()
            .take_while(|&i| self.b.at(i) == self.e.at(n + i))
            .count()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.b, self.e, self.a)
    }
}

/// Prefix-sum backed evaluation of the four integer tables.
#[derive(Clone, Debug)]
pub struct Quantities {
    m: usize,
    n: usize,
    b: Vec<i128>,
    e: Vec<i128>,
    a: Vec<i128>,
    pb: Vec<i128>,
    pe: Vec<i128>,
    pa: Vec<i128>,
}

fn prefix(v: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; v.len() + 1];
    for (i, x) in v.iter().enumerate() {
        out[i + 1] = out[i] + x;
    }
    out
}

impl Quantities {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// a_nu - e_{mu+nu}; defined for 0 <= mu <= m, 1 <= nu <= n.
    pub fn quotient_gap(&self, mu: usize, nu: usize) -> i128 {
        self.a[nu - 1] - self.e[mu + nu - 1]
    }

    /// e_{mu+nu-1} - b_mu; defined for 1 <= mu <= m, 1 <= nu <= n + 1.
    pub fn kernel_gap(&self, mu: usize, nu: usize) -> i128 {
        self.e[mu + nu - 2] - self.b[mu - 1]
    }

    /// sum_{i>=nu} a_i + sum_{i>=mu} b_i - sum_{i>=mu+nu-1} e_i.
    pub fn tail(&self, mu: usize, nu: usize) -> i128 {
        let (m, n) = (self.m, self.n);
        let sa = self.pa[n] - self.pa[nu - 1];
        let sb = self.pb[m] - self.pb[mu - 1];
        let se = self.pe[m + n] - self.pe[mu + nu - 2];
        sa + sb - se
    }

    /// sum_{i<=nu} a_i + sum_{i<=mu} b_i - sum_{i<=mu+nu} e_i.
    pub fn head(&self, mu: usize, nu: usize) -> i128 {
        self.pa[nu] + self.pb[mu] - self.pe[mu + nu]
    }

    /// Dense tables keyed as in their definitions, for display and JSON.
    pub fn tables(&self) -> QuantityTables {
        let (m, n) = (self.m, self.n);
        QuantityTables {
            quotient_gap: (1..=m)
                .map(|mu| (1..=n).map(|nu| self.quotient_gap(mu, nu)).collect())
                .collect(),
            kernel_gap: (1..=m)
                .map(|mu| (1..=n).map(|nu| self.kernel_gap(mu, nu)).collect())
                .collect(),
            tail: (1..=m + 1)
                .map(|mu| (1..=n + 1).map(|nu| self.tail(mu, nu)).collect())
                .collect(),
            head: (0..=m)
                .map(|mu| (0..=n).map(|nu| self.head(mu, nu)).collect())
                .collect(),
        }
    }
}

/// Row-major tables: `quotient_gap[mu-1][nu-1]`, `kernel_gap[mu-1][nu-1]`,
/// `tail[mu-1][nu-1]`, `head[mu][nu]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantityTables {
    pub quotient_gap: Vec<Vec<i128>>,
    pub kernel_gap: Vec<Vec<i128>>,
    pub tail: Vec<Vec<i128>>,
    pub head: Vec<Vec<i128>>,
}

pub fn quantities(t: &Triple) -> Result<Quantities> {
    if !t.ranks_compatible() {
        return precondition(format!(
            "rank(b) + rank(a) = {} + {} differs from rank(e) = {}",
            t.m(),
            t.n(),
            t.e.rank()
        ));
    }
    let conv = |s: &SplittingType| s.entries().iter().map(|&x| x as i128).collect::<Vec<_>>();
    let (b, e, a) = (conv(&t.b), conv(&t.e), conv(&t.a));
    Ok(Quantities {
        m: t.m(),
        n: t.n(),
        pb: prefix(&b),
        pe: prefix(&e),
        pa: prefix(&a),
        b,
        e,
        a,
    })
}

fn thresholds(q: &Quantities) -> Vec<usize> {
    let n = q.n();
    (1..=q.m())
        .map(|mu| {
            let mut h = n + 1;
            while h > 1 && q.tail(mu, h) < 0 {
                h -= 1;
            }
            h
        })
        .collect()
}

/// h_mu: the least nu in [1, n+1] such that every later column of the tail
/// table in row mu is negative.
pub fn h_profile(t: &Triple) -> Result<Vec<usize>> {
    Ok(thresholds(&quantities(t)?))
}

/// Whether O(e) surjects onto O(a).
pub fn surjection_exists(e: &SplittingType, a: &SplittingType) -> Result<bool> {
    let (k, r) = (a.rank(), e.rank());
    if k >= r {
        return precondition(format!("rank(a) = {} must be below rank(e) = {}", k, r));
    }
    Ok((1..=k).all(|i| a.at(i) >= e.at(i + 1) || (1..=i).all(|j| a.at(j) == e.at(j))))
}

/// Whether O(b) injects into O(e) with locally free cokernel.
pub fn injection_lf_exists(b: &SplittingType, e: &SplittingType) -> Result<bool> {
    let (k, r) = (b.rank(), e.rank());
    if k >= r {
        return precondition(format!("rank(b) = {} must be below rank(e) = {}", k, r));
    }
    let shift = r - k;
    Ok((1..=k).all(|i| {
        b.at(i) <= e.at(shift + i - 1) || (i..=k).all(|j| b.at(j) == e.at(shift + j))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    Rank {
        kernel: usize,
        ambient: usize,
        quotient: usize,
    },
    Degree {
        kernel: i128,
        ambient: i128,
        quotient: i128,
    },
    HongLarsonSurjection {
        index: usize,
    },
    HongLarsonInjection {
        index: usize,
    },
    /// `side` is "quotient" for a_i < e_i or "kernel" for b_i > e_{n+i}.
    WeakEligibility {
        side: String,
        index: usize,
    },
    #[serde(rename = "S_condition")]
    SCondition {
        mu: usize,
        nu: usize,
        value: i128,
    },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Rank { kernel, ambient, quotient } => write!(
                f,
                "rank: {} + {} != {}",
                kernel, quotient, ambient
            ),
            Failure::Degree { kernel, ambient, quotient } => write!(
                f,
                "degree: {} + {} != {}",
                kernel, quotient, ambient
            ),
            Failure::HongLarsonSurjection { index } => {
                write!(f, "hong_larson_surjection at index {}", index)
            }
            Failure::HongLarsonInjection { index } => {
                write!(f, "hong_larson_injection at index {}", index)
            }
            Failure::WeakEligibility { side, index } => {
                write!(f, "weak_eligibility: {} entry {}", side, index)
            }
            Failure::SCondition { mu, nu, value } => {
                write!(f, "S_condition: S({},{}) = {}", mu, nu, value)
            }
        }
    }
}

/// First failure among rank, degree and the entrywise bounds.
pub fn weak_eligibility_failure(t: &Triple) -> Option<Failure> {
    if !t.ranks_compatible() {
        return Some(Failure::Rank {
            kernel: t.m(),
            ambient: t.e.rank(),
            quotient: t.n(),
        });
    }
    if t.b.degree() + t.a.degree() != t.e.degree() {
        return Some(Failure::Degree {
            kernel: t.b.degree(),
            ambient: t.e.degree(),
            quotient: t.a.degree(),
        });
    }
    let n = t.n();
    if let Some(i) = (1..=n).find(|&i| t.a.at(i) < t.e.at(i)) {
        return Some(Failure::WeakEligibility {
            side: "quotient".into(),
            index: i,
        });
    }
    if let Some(i) = (1..=t.m()).find(|&i| t.b.at(i) > t.e.at(n + i)) {
        return Some(Failure::WeakEligibility {
            side: "kernel".into(),
            index: i,
        });
    }
    None
}

pub fn weakly_eligible(t: &Triple) -> bool {
    weak_eligibility_failure(t).is_none()
}

/// Rank, degree and both Hong–Larson conditions.
pub fn eligibility_failure(t: &Triple) -> Option<Failure> {
    if let Some(f @ (Failure::Rank { .. } | Failure::Degree { .. })) = weak_eligibility_failure(t) {
        return Some(f);
    }
    let (e, a, b) = (&t.e, &t.a, &t.b);
    let (k, r) = (a.rank(), e.rank());
    if k < r {
        if let Some(i) =
            (1..=k).find(|&i| !(a.at(i) >= e.at(i + 1) || (1..=i).all(|j| a.at(j) == e.at(j))))
        {
            return Some(Failure::HongLarsonSurjection { index: i });
        }
    }
    let (k, shift) = (b.rank(), r - b.rank().min(r));
    if k < r {
        if let Some(i) = (1..=k).find(|&i| {
            !(b.at(i) <= e.at(shift + i - 1) || (i..=k).all(|j| b.at(j) == e.at(shift + j)))
        }) {
            return Some(Failure::HongLarsonInjection { index: i });
        }
    }
    None
}

/// The forced-zero tail conditions, evaluated on a weakly eligible triple.
/// Returns the lexicographically first violated (mu, nu), if any.
pub fn tail_condition_failure(q: &Quantities) -> Option<Failure> {
    let (m, n) = (q.m(), q.n());
    let mut bad: Vec<(usize, usize)> = Vec::new();
    for mu in 1..=m {
        if let Some(nu) = (1..=n).rev().find(|&nu| q.quotient_gap(mu, nu) < 0) {
            if q.tail(mu, nu + 1) < 0 {
                bad.push((mu, nu + 1));
            }
        }
    }
    for nu in 1..=n {
        if let Some(mu) = (1..=m).find(|&mu| q.kernel_gap(mu, nu) < 0) {
            if q.tail(mu, nu + 1) < 0 {
                bad.push((mu, nu + 1));
            }
        }
    }
    bad.into_iter().min().map(|(mu, nu)| Failure::SCondition {
        mu,
        nu,
        value: q.tail(mu, nu),
    })
}

/// Both gaps nonnegative at and beyond each row's threshold.
pub fn threshold_condition_holds(q: &Quantities) -> bool {
    let h = thresholds(q);
    (1..=q.m()).all(|mu| {
        (h[mu - 1]..=q.n()).all(|nu| q.quotient_gap(mu, nu) >= 0 && q.kernel_gap(mu, nu) >= 0)
    })
}

/// Weak eligibility plus the tail conditions.
pub fn condition_tail(t: &Triple) -> bool {
    weakly_eligible(t) && tail_condition_failure(&quantities(t).expect("ranks checked")).is_none()
}

/// Weak eligibility plus the threshold conditions.
pub fn condition_threshold(t: &Triple) -> bool {
    weakly_eligible(t) && threshold_condition_holds(&quantities(t).expect("ranks checked"))
}

/// Boolean realizability without building a certificate.
pub fn is_realizable(t: &Triple) -> bool {
    condition_threshold(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Datum(BalancingDatum),
    Failure(Failure),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "realizable")]
    pub value: bool,
    pub witness: Witness,
}

impl Verdict {
    pub fn failure(&self) -> Option<&Failure> {
        match &self.witness {
            Witness::Failure(f) => Some(f),
            Witness::Datum(_) => None,
        }
    }

    pub fn datum(&self) -> Option<&BalancingDatum> {
        match &self.witness {
            Witness::Datum(d) => Some(d),
            Witness::Failure(_) => None,
        }
    }
}

/// Full verdict. The value comes from the threshold criterion; the tail
/// criterion is evaluated alongside and must agree. A positive verdict
/// carries a balancing datum, a negative one the first failed condition.
pub fn realizable(t: &Triple) -> Verdict {
    if let Some(f) = weak_eligibility_failure(t) {
        return Verdict {
            value: false,
            witness: Witness::Failure(f),
        };
    }
    let q = quantities(t).expect("ranks checked");
    let by_threshold = threshold_condition_holds(&q);
    let tail_failure = tail_condition_failure(&q);
    assert_eq!(
        by_threshold,
        tail_failure.is_none(),
        "realizability criteria disagree on {}",
        t
    );
    match tail_failure {
        Some(f) => Verdict {
            value: false,
            witness: Witness::Failure(f),
        },
        None => {
            let d = balancing::construct_datum(t).expect("realizable triple admits a datum");
            Verdict {
                value: true,
                witness: Witness::Datum(d),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(b: &[i64], e: &[i64], a: &[i64]) -> Triple {
        Triple::from_slices(b, e, a)
    }

    #[test]
    fn quantity_examples() {
        let q = quantities(&tr(&[1, 1], &[0, 0, 2, 2], &[1, 1])).unwrap();
        assert_eq!(q.tail(2, 3), -1);
        let q = quantities(&tr(&[-1], &[0, 0], &[1])).unwrap();
        assert_eq!(q.tail(1, 1), 0);
        assert!(quantities(&tr(&[1], &[0, 0, 2], &[1, 1, 1])).is_err());
    }

    #[test]
    fn tail_head_complement() {
        let t = tr(&[0, 3, 9], &[2, 7, 8, 11, 20], &[13, 23]);
        let q = quantities(&t).unwrap();
        for mu in 0..=3 {
            for nu in 0..=2 {
                assert_eq!(q.tail(mu + 1, nu + 1) + q.head(mu, nu), 0);
            }
        }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(h_profile(&tr(&[-1], &[0, 0], &[1])).unwrap(), vec![1]);
        let h = h_profile(&tr(&[4, 5, 6], &[0, 4, 5, 6, 8, 12], &[0, 8, 12])).unwrap();
        assert_eq!(h[0], 2);
        let h = h_profile(&tr(&[0, 2], &[0, 1, 2, 3], &[1, 3])).unwrap();
        assert!(h.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn hong_larson_examples() {
        assert!(!surjection_exists(&"0,0,2,2".parse().unwrap(), &"1,1".parse().unwrap()).unwrap());
        assert!(surjection_exists(&"0,1,2,3".parse().unwrap(), &"1,3".parse().unwrap()).unwrap());
        assert!(surjection_exists(&"0,0".parse().unwrap(), &"0".parse().unwrap()).unwrap());
        assert!(surjection_exists(&"0".parse().unwrap(), &"0".parse().unwrap()).is_err());
    }

    #[test]
    fn weak_eligibility_examples() {
        assert!(weakly_eligible(&tr(&[1, 1], &[0, 0, 2, 2], &[1, 1])));
        assert!(weakly_eligible(&tr(&[0, 3, 9], &[2, 7, 8, 11, 20], &[13, 23])));
        assert!(!weakly_eligible(&tr(&[0], &[0, 0], &[1])));
    }

    #[test]
    fn verdict_examples() {
        assert!(realizable(&tr(&[0, 3, 9], &[2, 7, 8, 11, 20], &[13, 23])).value);
        assert!(realizable(&tr(&[0, 2], &[0, 1, 2, 3], &[1, 3])).value);
        let v = realizable(&tr(&[1, 1], &[0, 0, 2, 2], &[1, 1]));
        assert!(!v.value);
        assert!(matches!(v.failure(), Some(Failure::SCondition { value, .. }) if *value < 0));
    }

    #[test]
    fn degenerate_ranks() {
        assert!(realizable(&tr(&[], &[1, 2], &[1, 2])).value);
        assert!(!realizable(&tr(&[], &[1, 2], &[0, 3])).value);
        assert!(realizable(&tr(&[1, 2], &[1, 2], &[])).value);
        assert!(!realizable(&tr(&[0, 3], &[1, 2], &[])).value);
    }
}
