//! Sparse bivariate polynomials with integer coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Terms are `(x exponent, y exponent, coefficient)`, sorted by exponents,
/// with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    terms: Vec<(u32, u32, i128)>,
}

fn checked(v: Option<i128>) -> i128 {
    v.expect("polynomial coefficient overflow")
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: i128) -> Self {
        Poly::monomial(c, 0, 0)
    }

    pub fn monomial(c: i128, xe: u32, ye: u32) -> Self {
        if c == 0 {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(xe, ye, c)],
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, i128)>) -> Self {
        let mut acc: BTreeMap<(u32, u32), i128> = BTreeMap::new();
        for (x, y, c) in terms {
            let slot = acc.entry((x, y)).or_insert(0);
            *slot = checked(slot.checked_add(c));
        }
        Poly {
            terms: acc
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|((x, y), c)| (x, y, c))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(u32, u32, i128)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common total degree, or `None` for zero or inhomogeneous input.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first().map(|&(x, y, _)| x + y)?;
        self.terms.iter().all(|&(x, y, _)| x + y == d).then_some(d)
    }

    pub fn is_nonzero_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1 == 0
    }

    /// A single term c*x^p with p > 0, or a constant.
    pub fn is_pure_x_power(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1 == 0
    }

    pub fn is_pure_y_power(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0
    }

    pub fn add(&self, o: &Poly) -> Poly {
        Poly::from_terms(self.terms.iter().chain(&o.terms).copied())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|&(x, y, c)| (x, y, -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.terms.len() * o.terms.len());
        for &(x1, y1, c1) in &self.terms {
            for &(x2, y2, c2) in &o.terms {
                out.push((x1 + x2, y1 + y2, checked(c1.checked_mul(c2))));
            }
        }
        Poly::from_terms(out)
    }

    /// Coefficients of p(x, 1) in increasing powers of x.
    pub fn dehomogenize_y(&self) -> Vec<BigRational> {
        let deg = self.terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let mut v = vec![BigRational::zero(); deg + 1];
        for &(x, _, c) in &self.terms {
            v[x as usize] += BigRational::from_integer(BigInt::from(c));
        }
        trim(&mut v);
        v
    }

    /// Whether y divides the polynomial (the point [1:0] is a root).
    pub fn divisible_by_y(&self) -> bool {
        self.terms.iter().all(|&(_, y, _)| y > 0)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for &(x, y, c) in &self.terms {
            let sign = if c < 0 { "-" } else { "+" };
            let mut factors = Vec::new();
            if c.abs() != 1 || (x == 0 && y == 0) {
                factors.push(c.abs().to_string());
            }
            if x > 0 {
                factors.push(format!("x^{}", x));
            }
            if y > 0 {
                factors.push(format!("y^{}", y));
            }
            parts.push(format!("{}{}", sign, factors.join("*")));
        }
        write!(f, "{}", parts.join(""))
    }
}

fn trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    if v.len() == 1 && v[0].is_zero() {
        v.clear();
    }
}

/// Remainder of univariate division over the rationals.
fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let q = r[dr].clone() / lead.clone();
        for i in 0..=db {
            let t = q.clone() * b[i].clone();
            r[dr - db + i] -= t;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Univariate gcd over the rationals, made monic; empty for the zero polynomial.
pub fn univariate_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in a.iter_mut() {
            *c = c.clone() / lead.clone();
        }
    }
    a
}

/// The gcd of homogeneous polynomials is a nonzero constant.
pub fn gcd_is_unit(polys: &[Poly]) -> bool {
    let nonzero: Vec<&Poly> = polys.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return false;
    }
    if nonzero.iter().any(|p| p.is_nonzero_constant()) {
        return true;
    }
    if nonzero.iter().all(|p| p.divisible_by_y()) {
        return false;
    }
    let mut g: Vec<BigRational> = Vec::new();
    for p in nonzero {
        g = univariate_gcd(&g, &p.dehomogenize_y());
        if g.len() == 1 {
            return true;
        }
    }
    g.len() == 1 && g[0].abs() == BigRational::one()
}

/// Sufficient condition: a nonzero pure x-power and a nonzero pure y-power.
pub fn pure_power_fast_path(polys: &[Poly]) -> bool {
    polys.iter().any(|p| p.is_pure_x_power()) && polys.iter().any(|p| p.is_pure_y_power())
}
