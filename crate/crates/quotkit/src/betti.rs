//! Betti diagrams of codimension-2 Cohen–Macaulay modules over k[x,y]:
//! translation to triples of splitting types, greedy decomposition into pure
//! diagrams, and realizability of lattice points.
//!
//! Sign convention: a generator in degree d corresponds to the twist -d, so
//! column 0 gives the quotient type, column 1 the middle type and column 2
//! the kernel type.

use crate::error::{precondition, Error, Result};
use crate::realizability::{is_realizable, Triple};
use crate::splitting::{all_types_in_range, SplittingType};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt;

pub type Column = BTreeMap<i64, BigRational>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiDiagram {
    pub columns: [Column; 3],
}

/// Pure diagram on degrees d0 < d1 < d2, scaled to be the smallest integral one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PureDiagram {
    pub degrees: [i64; 3],
    pub mults: [i64; 3],
}

impl PureDiagram {
    pub fn new(degrees: [i64; 3]) -> Result<Self> {
        let [d0, d1, d2] = degrees;
        if !(d0 < d1 && d1 < d2) {
            return precondition(format!("pure diagram degrees must increase strictly: {:?}", degrees));
        }
        // proportional to the product of 1/|d_j - d_i| over j != i
        let raw = [d2 - d1, d2 - d0, d1 - d0];
        let g = raw[0].gcd(&raw[1]).gcd(&raw[2]);
        Ok(PureDiagram {
            degrees,
            mults: raw.map(|x| x / g),
        })
    }

    pub fn diagram(&self) -> BettiDiagram {
        let mut out = BettiDiagram::default();
        for i in 0..3 {
            out.columns[i].insert(self.degrees[i], BigRational::from_integer(self.mults[i].into()));
        }
        out
    }
}

impl fmt::Display for PureDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [d0, d1, d2] = self.degrees;
        write!(f, "pure({},{},{})", d0, d1, d2)
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl BettiDiagram {
    /// Diagram with integer multiplicities, one map per column.
    pub fn from_integers(cols: [&[(i64, i64)]; 3]) -> Self {
        let mut out = BettiDiagram::default();
        for (i, col) in cols.iter().enumerate() {
            for &(deg, mult) in col.iter() {
                out.add_entry(i, deg, int(mult));
            }
        }
        out
    }

    pub fn add_entry(&mut self, col: usize, deg: i64, mult: BigRational) {
        let slot = self.columns[col].entry(deg).or_insert_with(BigRational::zero);
        *slot += mult;
        if slot.is_zero() {
            self.columns[col].remove(&deg);
        }
    }

    pub fn add_scaled(&mut self, o: &BettiDiagram, c: &BigRational) {
        for i in 0..3 {
            for (&deg, mult) in &o.columns[i] {
                self.add_entry(i, deg, mult * c);
            }
        }
    }

    pub fn scale(&self, k: i64) -> BettiDiagram {
        let mut out = BettiDiagram::default();
        out.add_scaled(self, &int(k));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn is_integral(&self) -> bool {
        self.columns.iter().all(|c| c.values().all(|v| v.is_integer()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.columns.iter().all(|c| c.values().all(|v| !v.is_negative()))
    }

    pub fn total(&self, col: usize) -> BigRational {
        self.columns[col].values().sum()
    }

    /// The rank and degree identities of a finite-length module.
    pub fn shape_ok(&self) -> bool {
        let sign = |i: usize| if i == 1 { -BigRational::one() } else { BigRational::one() };
        let mut rank = BigRational::zero();
        let mut deg = BigRational::zero();
        for i in 0..3 {
            for (&d, v) in &self.columns[i] {
                rank += sign(i) * v;
                deg += sign(i) * v * int(d);
            }
        }
        rank.is_zero() && deg.is_zero() && self.is_nonnegative()
    }

    /// Parse {"0": {"<deg>": mult, ...}, "1": {...}, "2": {...}}; multiplicities
    /// are integers or strings such as "3/2".
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("diagram must be a JSON object".into()))?;
        let mut out = BettiDiagram::default();
        for (key, col) in obj {
            let i: usize = match key.as_str() {
                "0" => 0,
                "1" => 1,
                "2" => 2,
                _ => return Err(Error::Parse(format!("unknown column {:?}; expected \"0\", \"1\" or \"2\"", key))),
            };
            let col = col
                .as_object()
                .ok_or_else(|| Error::Parse(format!("column {} must be an object", key)))?;
            for (deg, mult) in col {
                let d: i64 = deg.trim().parse().map_err(|_| Error::Parse(format!("bad degree {:?}", deg)))?;
                out.add_entry(i, d, parse_mult(mult)?);
            }
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        for i in 0..3 {
            let col: Map<String, Value> = self.columns[i].iter().map(|(d, v)| (d.to_string(), mult_json(v))).collect();
            obj.insert(i.to_string(), Value::Object(col));
        }
        Value::Object(obj)
    }
}

fn parse_mult(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(int)
            .ok_or_else(|| Error::Parse(format!("multiplicity {} is not an integer; use a string like \"3/2\"", n))),
        Value::String(s) => {
            let s = s.trim();
            let r = match s.split_once('/') {
                Some((p, q)) => {
                    let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity {:?}", s)))?;
                    let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity {:?}", s)))?;
                    if q.is_zero() {
                        return Err(Error::Parse(format!("zero denominator in {:?}", s)));
                    }
                    BigRational::new(p, q)
                }
                None => BigRational::from_integer(s.parse().map_err(|_| Error::Parse(format!("bad multiplicity {:?}", s)))?),
            };
            Ok(r)
        }
        _ => Err(Error::Parse(format!("bad multiplicity {}", v))),
    }
}

fn mult_json(v: &BigRational) -> Value {
    match v.to_integer().to_i64() {
        Some(i) if v.is_integer() => Value::from(i),
        _ => Value::String(v.to_string()),
    }
}

impl fmt::Display for BettiDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degs: Vec<i64> = self.columns.iter().flat_map(|c| c.keys().copied()).collect();
        let (Some(&lo), Some(&hi)) = (degs.iter().min(), degs.iter().max()) else {
            return write!(f, "(zero diagram)");
        };
        // rows indexed by d - i, the usual Macaulay layout
        let (rlo, rhi) = (lo - 2, hi);
        writeln!(f, "{:>6} {:>8} {:>8} {:>8}", "", "0", "1", "2")?;
        for r in rlo..=rhi {
            let cells: Vec<String> = (0..3)
                .map(|i| self.columns[i].get(&(r + i as i64)).map(|v| v.to_string()).unwrap_or_else(|| "-".into()))
                .collect();
            if cells.iter().all(|c| c == "-") {
                continue;
            }
            writeln!(f, "{:>6} {:>8} {:>8} {:>8}", format!("{}:", r), cells[0], cells[1], cells[2])?;
        }
        Ok(())
    }
}

fn column_type(col: &Column) -> Result<SplittingType> {
    let mut v = Vec::new();
    for (&d, mult) in col {
        if !mult.is_integer() || mult.is_negative() {
            return precondition(format!("multiplicity {} in degree {} is not a nonnegative integer", mult, d));
        }
        let k = mult.to_integer().to_usize().ok_or_else(|| Error::Precondition("multiplicity too large".into()))?;
        v.extend(std::iter::repeat_n(-d, k));
    }
    Ok(SplittingType::new(v))
}

pub fn diagram_to_triple(beta: &BettiDiagram) -> Result<Triple> {
    if !beta.shape_ok() {
        return precondition("not a finite-length diagram shape");
    }
    Ok(Triple::new(
        column_type(&beta.columns[2])?,
        column_type(&beta.columns[1])?,
        column_type(&beta.columns[0])?,
    ))
}

pub fn triple_to_diagram(t: &Triple) -> BettiDiagram {
    let mut out = BettiDiagram::default();
    for (i, ty) in [&t.a, &t.e, &t.b].into_iter().enumerate() {
        for &q in ty.entries() {
            out.add_entry(i, -q, BigRational::one());
        }
    }
    out
}

pub type Decomposition = Vec<(BigRational, PureDiagram)>;

/// Greedy decomposition: repeatedly peel off the largest multiple of the pure
/// diagram on the lowest degree of each column. `None` when the diagram is
/// not in the cone.
pub fn decompose(beta: &BettiDiagram) -> Result<Option<Decomposition>> {
    if !beta.shape_ok() {
        return precondition("not a finite-length diagram shape");
    }
    let mut rest = beta.clone();
    let mut out = Vec::new();
    while !rest.is_zero() {
        let mut top = [0i64; 3];
        for i in 0..3 {
            match rest.columns[i].keys().next() {
                Some(&d) => top[i] = d,
                None => return Ok(None),
            }
        }
        let Ok(pure) = PureDiagram::new(top) else { return Ok(None) };
        let c = (0..3)
            .map(|i| &rest.columns[i][&top[i]] / int(pure.mults[i]))
            .min()
            .expect("three columns");
        rest.add_scaled(&pure.diagram(), &-c.clone());
        if !rest.is_nonnegative() {
            return Err(Error::Internal("greedy step left a negative entry".into()));
        }
        out.push((c, pure));
    }
    Ok(Some(out))
}

pub fn in_cone(beta: &BettiDiagram) -> Result<bool> {
    Ok(decompose(beta)?.is_some())
}

pub fn recombine(parts: &Decomposition) -> BettiDiagram {
    let mut out = BettiDiagram::default();
    for (c, p) in parts {
        out.add_scaled(&p.diagram(), c);
    }
    out
}

pub fn lattice_point_realizable(beta: &BettiDiagram) -> Result<bool> {
    if !beta.is_integral() {
        return precondition("lattice point expected: multiplicities must be integers");
    }
    if !in_cone(beta)? {
        return Ok(false);
    }
    Ok(is_realizable(&diagram_to_triple(beta)?))
}

/// Every integral diagram with all degrees in [lo, hi], at least one generator
/// in columns 0 and 2, and at most `max_middle` generators in column 1.
pub fn lattice_diagrams(lo: i64, hi: i64, max_middle: usize) -> Vec<BettiDiagram> {
    let types: Vec<Vec<SplittingType>> = (0..=max_middle).map(|k| all_types_in_range(k, lo, hi)).collect();
    let sum = |t: &SplittingType| t.entries().iter().sum::<i64>();
    let mut out = Vec::new();
    for k in 2..=max_middle {
        // pair up (column 0, column 2) by total degree
        let mut outer: BTreeMap<i64, Vec<(&SplittingType, &SplittingType)>> = BTreeMap::new();
        for k0 in 1..k {
            for c0 in &types[k0] {
                for c2 in &types[k - k0] {
                    outer.entry(sum(c0) + sum(c2)).or_default().push((c0, c2));
                }
            }
        }
        for c1 in &types[k] {
            let Some(pairs) = outer.get(&sum(c1)) else { continue };
            for (c0, c2) in pairs {
                let mut d = BettiDiagram::default();
                for (i, c) in [*c0, c1, *c2].into_iter().enumerate() {
                    for &x in c.entries() {
                        d.add_entry(i, x, BigRational::one());
                    }
                }
                out.push(d);
            }
        }
    }
    out
}
