//! Sweep domains shared by several test files.
#![allow(dead_code)]

use quotkit::realizability::{weakly_eligible, Triple};
use quotkit::splitting::{all_types_in_range, SplittingType};

/// Every weakly eligible triple with kernel and quotient rank in 1..=3,
/// middle entries in [0, 4], and outer entries within 2 of the middle range.
pub fn small_triples() -> Vec<Triple> {
    let mut out = Vec::new();
    for m in 1..=3 {
        for n in 1..=3 {
            for e in all_types_in_range(m + n, 0, 4) {
                let (lo, hi) = (e.first().unwrap() - 2, e.last().unwrap() + 2);
                let kernels = all_types_in_range(m, lo, hi);
                let quotients = all_types_in_range(n, lo, hi);
                for b in &kernels {
                    for a in &quotients {
                        if b.degree() + a.degree() != e.degree() {
                            continue;
                        }
                        let t = Triple::new(b.clone(), e.clone(), a.clone());
                        if weakly_eligible(&t) {
                            out.push(t);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Quotient degrees worth sweeping for the irreducibility and connectedness
/// checks: from the smallest possible up to a little past the degree bound.
pub fn quot_degrees(e: &SplittingType, n: usize) -> std::ops::RangeInclusive<i128> {
    let m = (e.rank() - n) as i128;
    let lo: i128 = e.entries()[..n].iter().map(|&x| x as i128).sum();
    let (emin, emax) = (e.first().unwrap() as i128, e.last().unwrap() as i128);
    let hi = ((n as i128) * (emax - 1) + 1).max(e.degree() - m * (emin + 1) + 1) + 2;
    lo..=hi
}

/// Every (e, n, d) with rank(e) in 2..=5, entries in [0, 3], and a degree from
/// `quot_degrees` at which both most balanced types exist.
pub fn quot_sweep() -> Vec<(SplittingType, usize, i128)> {
    use quotkit::quot_geometry::{most_balanced_kernel, most_balanced_quotient};
    let mut out = Vec::new();
    for r in 2..=5 {
        for e in all_types_in_range(r, 0, 3) {
            for n in 1..r {
                for d in quot_degrees(&e, n) {
                    if most_balanced_quotient(&e, n, d).is_ok() && most_balanced_kernel(&e, r - n, e.degree() - d).is_ok() {
                        out.push((e.clone(), n, d));
                    }
                }
            }
        }
    }
    out
}
