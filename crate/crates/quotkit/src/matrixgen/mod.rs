//! Explicit kernel and quotient matrices for a realizable triple, with exact
//! symbolic checks of the resulting short exact sequence.

pub mod poly;

use crate::error::{precondition, Error, Result};
use crate::realizability::{self, Quantities, Triple};
use crate::splitting::SplittingType;
pub use poly::Poly;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Matrix of homogeneous polynomials mapping O(source) to O(target).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogMatrix {
    pub target: SplittingType,
    pub source: SplittingType,
    pub entries: Vec<Vec<Poly>>,
}

impl HomogMatrix {
    pub fn zeros(target: SplittingType, source: SplittingType) -> Self {
        let entries = vec![vec![Poly::zero(); source.rank()]; target.rank()];
        HomogMatrix {
            target,
            source,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.target.rank()
    }

    pub fn cols(&self) -> usize {
        self.source.rank()
    }

    /// 1-indexed entry access.
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i - 1][j - 1]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i - 1][j - 1] = p;
    }

    /// Every nonzero entry is homogeneous of degree target_i - source_j.
    pub fn degrees_ok(&self) -> bool {
        (1..=self.rows()).all(|i| {
            (1..=self.cols()).all(|j| {
                let p = self.get(i, j);
                let want = self.target.at(i) as i128 - self.source.at(j) as i128;
                p.is_zero() || p.homogeneous_degree().map(|d| d as i128) == Some(want)
            })
        })
    }

    pub fn mul(&self, o: &HomogMatrix) -> Result<HomogMatrix> {
        if self.source != o.target {
            return precondition("inner splitting types differ");
        }
        let mut out = HomogMatrix::zeros(self.target.clone(), o.source.clone());
        for i in 0..self.rows() {
            for j in 0..o.cols() {
                let mut acc = Poly::zero();
                for k in 0..self.cols() {
                    let (p, q) = (&self.entries[i][k], &o.entries[k][j]);
                    if !p.is_zero() && !q.is_zero() {
                        acc = acc.add(&p.mul(q));
                    }
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> HomogMatrix {
        let mut out = HomogMatrix::zeros(self.source.dual(), self.target.dual());
        let (r, c) = (self.rows(), self.cols());
        for i in 0..r {
            for j in 0..c {
                out.entries[c - 1 - j][r - 1 - i] = self.entries[i][j].clone();
            }
        }
        out
    }

    /// Maximal minors taken over column subsets (rows <= cols).
    pub fn maximal_minors(&self) -> Vec<Poly> {
        let (r, c) = (self.rows(), self.cols());
        let mut out = Vec::new();
        let mut cols = Vec::with_capacity(r);
        fn rec(m: &HomogMatrix, start: usize, c: usize, r: usize, cols: &mut Vec<usize>, out: &mut Vec<Poly>) {
            if cols.len() == r {
                let sub: Vec<Vec<Poly>> = m
                    .entries
                    .iter()
                    .map(|row| cols.iter().map(|&j| row[j].clone()).collect())
                    .collect();
                out.push(determinant(&sub));
                return;
            }
            for j in start..c {
                cols.push(j);
                rec(m, j + 1, c, r, cols, out);
                cols.pop();
            }
        }
        rec(self, 0, c, r, &mut cols, &mut out);
        out
    }
}

impl fmt::Display for HomogMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
        for row in cells {
            let padded: Vec<String> = row.iter().map(|s| format!("{:>w$}", s, w = width)).collect();
            writeln!(f, "[ {} ]", padded.join("  "))?;
        }
        Ok(())
    }
}

/// Cofactor expansion along the first row, skipping zero entries.
pub fn determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::constant(1),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        _ => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].mul(&determinant(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

pub fn compose_is_zero(g: &HomogMatrix, c: &HomogMatrix) -> Result<bool> {
    if g.cols() != c.rows() {
        return precondition(format!(
            "cannot compose {}x{} with {}x{}",
            g.rows(),
            g.cols(),
            c.rows(),
            c.cols()
        ));
    }
    let mut g = g.clone();
    g.source = c.target.clone();
    Ok(g.mul(c)?.entries.iter().flatten().all(Poly::is_zero))
}

/// The maximal minors have no common zero on the projective line.
pub fn is_surjective_bundle_map(g: &HomogMatrix) -> bool {
    if g.rows() > g.cols() {
        return false;
    }
    let minors = g.maximal_minors();
    if poly::pure_power_fast_path(&minors) {
        return true;
    }
    poly::gcd_is_unit(&minors)
}

/// Injective with locally free cokernel: same test on the transpose.
pub fn is_injective_lf(c: &HomogMatrix) -> bool {
    is_surjective_bundle_map(&c.transpose())
}

/// Monomial c * x^p * y^q, failing on a negative exponent.
fn mono(c: i128, p: i128, q: i128) -> Result<Poly> {
    let conv = |v: i128| {
        u32::try_from(v).map_err(|_| Error::Internal(format!("exponent {} out of range", v)))
    };
    Ok(Poly::monomial(c, conv(p)?, conv(q)?))
}

/// Shared data for the two constructions.
struct Layout {
    q: Quantities,
    h: Vec<usize>,
    n_prime: usize,
    blocks: usize,
}

impl Layout {
    fn new(t: &Triple) -> Result<Layout> {
        if let Some(f) = realizability::weak_eligibility_failure(t) {
            return Err(Error::NotRealizable(f));
        }
        let q = realizability::quantities(t)?;
        if let Some(f) = realizability::tail_condition_failure(&q) {
            return Err(Error::NotRealizable(f));
        }
        Ok(Layout {
            h: realizability::h_profile(t)?,
            n_prime: t.n_prime(),
            blocks: t.m() - t.m_prime(),
            q,
        })
    }

    /// Threshold of block k, with the block after the last one ending at n.
    fn hh(&self, k: usize) -> usize {
        if k <= self.blocks {
            self.h[k - 1]
        } else {
            self.q.n()
        }
    }

    /// x^{head(k-1, h_k)} y^{tail(k, h_k)}, the entry gluing two quotient blocks.
    fn star(&self, k: usize) -> Result<Poly> {
        let hk = self.hh(k);
        mono(1, self.q.head(k - 1, hk), self.q.tail(k, hk))
    }

    /// x^{-tail(k, h_k + l)} y^{-head(k, h_k + l - 1)}, interior kernel entries.
    fn kernel_interior(&self, k: usize, l: usize) -> Result<Poly> {
        let hk = self.hh(k);
        mono(1, -self.q.tail(k, hk + l), -self.q.head(k, hk + l - 1))
    }
}

/// The quotient matrix G: O(e) -> O(a).
pub fn build_quotient_matrix(t: &Triple) -> Result<HomogMatrix> {
    let lay = Layout::new(t)?;
    let q = &lay.q;
    let mut g = HomogMatrix::zeros(t.a.clone(), t.e.clone());
    for r in 1..=lay.n_prime {
        g.set(r, r, Poly::constant(1));
    }
    for k in 1..=lay.blocks {
        for r in lay.hh(k)..=lay.hh(k + 1) {
            g.set(r, r + k - 1, mono(1, q.quotient_gap(k - 1, r), 0)?);
            g.set(r, r + k, mono(1, 0, q.quotient_gap(k, r))?);
        }
    }
    for k in 1..=lay.blocks {
        let hk = lay.hh(k);
        g.set(hk, hk + k - 1, lay.star(k)?);
    }
    Ok(g)
}

/// The kernel matrix C: O(b) -> O(e).
pub fn build_kernel_matrix(t: &Triple) -> Result<HomogMatrix> {
    let lay = Layout::new(t)?;
    let q = &lay.q;
    let n = t.n();
    let mut c = HomogMatrix::zeros(t.e.clone(), t.b.clone());
    for k in 1..=lay.blocks {
        let (hk, hnext) = (lay.hh(k), lay.hh(k + 1));
        let top = hk + k - 1;
        c.set(top, k, mono(1, 0, q.kernel_gap(k, hk))?);
        let len = hnext - hk;
        for l in 1..=len {
            let sign = if l % 2 == 0 { 1 } else { -1 };
            let mut p = lay.kernel_interior(k, l)?;
            if sign < 0 {
                p = p.neg();
            }
            c.set(top + l, k, p);
        }
        let sign = if (len + 1) % 2 == 0 { 1 } else { -1 };
        c.set(top + len + 1, k, mono(sign, q.kernel_gap(k, hnext + 1), 0)?);
    }
    for k in lay.blocks + 1..=t.m() {
        c.set(n + k, k, Poly::constant(1));
    }
    Ok(c)
}

/// The monomial identities behind G C = 0, checked block by block.
pub fn cancellation_identities_hold(t: &Triple) -> Result<bool> {
    let lay = Layout::new(t)?;
    let q = &lay.q;
    for k in 1..=lay.blocks {
        let (hk, hnext) = (lay.hh(k), lay.hh(k + 1));
        let len = hnext - hk;
        let top = mono(1, 0, q.kernel_gap(k, hk))?;
        let bottom = mono(1, q.kernel_gap(k, hnext + 1), 0)?;
        let next_star = lay.star(k + 1)?;
        if len == 0 {
            if top.mul(&lay.star(k)?) != bottom.mul(&next_star) {
                return Ok(false);
            }
            continue;
        }
        let first = lay.kernel_interior(k, 1)?;
        if top.mul(&lay.star(k)?) != first.mul(&mono(1, 0, q.quotient_gap(k, hk))?) {
            return Ok(false);
        }
        for l in 1..len {
            let lhs = lay.kernel_interior(k, l)?.mul(&mono(1, q.quotient_gap(k - 1, hk + l), 0)?);
            let rhs = lay.kernel_interior(k, l + 1)?.mul(&mono(1, 0, q.quotient_gap(k, hk + l))?);
            if lhs != rhs {
                return Ok(false);
            }
        }
        let last = lay.kernel_interior(k, len)?;
        if last.mul(&mono(1, q.quotient_gap(k - 1, hnext), 0)?) != bottom.mul(&next_star) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub composition_zero: bool,
    #[serde(rename = "G_surjective")]
    pub g_surjective: bool,
    #[serde(rename = "C_injective_lf")]
    pub c_injective_lf: bool,
    pub degrees_ok: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.composition_zero && self.g_surjective && self.c_injective_lf && self.degrees_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SESCertificate {
    pub triple: Triple,
    #[serde(rename = "G")]
    pub g: HomogMatrix,
    #[serde(rename = "C")]
    pub c: HomogMatrix,
    pub checks: Checks,
}

/// Builds both matrices and runs every check.
pub fn certify_ses(t: &Triple) -> Result<SESCertificate> {
    let g = build_quotient_matrix(t)?;
    let c = build_kernel_matrix(t)?;
    let checks = Checks {
        composition_zero: compose_is_zero(&g, &c)?,
        g_surjective: is_surjective_bundle_map(&g),
        c_injective_lf: is_injective_lf(&c),
        degrees_ok: g.degrees_ok() && c.degrees_ok(),
    };
    Ok(SESCertificate {
        triple: t.clone(),
        g,
        c,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitting::st;

    fn x() -> Poly {
        Poly::monomial(1, 1, 0)
    }
    fn y() -> Poly {
        Poly::monomial(1, 0, 1)
    }

    fn matrix(target: &[i64], source: &[i64], rows: Vec<Vec<Poly>>) -> HomogMatrix {
        HomogMatrix {
            target: st(target),
            source: st(source),
            entries: rows,
        }
    }

    #[test]
    fn koszul_construction() {
        let t = Triple::from_slices(&[-1], &[0, 0], &[1]);
        let g = build_quotient_matrix(&t).unwrap();
        assert_eq!(g.entries, vec![vec![x(), y()]]);
        let c = build_kernel_matrix(&t).unwrap();
        assert_eq!(c.entries, vec![vec![y()], vec![x().neg()]]);
        assert!(certify_ses(&t).unwrap().checks.all());
        assert!(cancellation_identities_hold(&t).unwrap());
    }

    #[test]
    fn composition_examples() {
        let g = matrix(&[1], &[0, 0], vec![vec![x(), y()]]);
        let c = matrix(&[0, 0], &[-1], vec![vec![y()], vec![x().neg()]]);
        assert!(compose_is_zero(&g, &c).unwrap());
        let c2 = matrix(&[0, 0], &[-1], vec![vec![y()], vec![x()]]);
        assert!(!compose_is_zero(&g, &c2).unwrap());
        assert!(compose_is_zero(&g, &g).is_err());
    }

    #[test]
    fn surjectivity_examples() {
        let g = matrix(&[1], &[0, 0], vec![vec![x(), y()]]);
        assert!(is_surjective_bundle_map(&g));
        let g = matrix(&[2], &[0, 0], vec![vec![x().mul(&x()), x().mul(&y())]]);
        assert!(!is_surjective_bundle_map(&g));
    }

    #[test]
    fn identity_blocks() {
        let t = Triple::from_slices(&[4, 5, 6], &[0, 4, 5, 6, 8, 12], &[0, 8, 12]);
        let g = build_quotient_matrix(&t).unwrap();
        assert_eq!(g.get(1, 1), &Poly::constant(1));
        let cert = certify_ses(&t).unwrap();
        assert!(cert.checks.all(), "{:?}", cert.checks);
        let split_kernel = Triple::from_slices(&[2, 3], &[0, 2, 3], &[0]);
        let c = build_kernel_matrix(&split_kernel).unwrap();
        assert_eq!(c.get(2, 1), &Poly::constant(1));
        assert_eq!(c.get(3, 2), &Poly::constant(1));
    }

    #[test]
    fn certificate_triple_certifies() {
        let t = Triple::from_slices(&[0, 3, 9], &[2, 7, 8, 11, 20], &[13, 23]);
        let cert = certify_ses(&t).unwrap();
        assert!(cert.checks.all(), "{:?}\n{}\n{}", cert.checks, cert.g, cert.c);
        assert!(cancellation_identities_hold(&t).unwrap());
    }

    #[test]
    fn non_realizable_errors() {
        let t = Triple::from_slices(&[1, 1], &[0, 0, 2, 2], &[1, 1]);
        assert!(matches!(certify_ses(&t), Err(Error::NotRealizable(_))));
    }
}
