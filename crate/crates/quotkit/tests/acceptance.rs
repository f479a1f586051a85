//! One PASS/FAIL line per acceptance criterion. Criteria listed in
//! `KNOWN_RED` are expected to fail; the test fails if the set of failing
//! criteria differs in either direction.

mod common;

use quotkit::balancing::{construct_datum, search_datum, verify_datum, BalancingDatum};
use quotkit::betti::{self, BettiDiagram, PureDiagram};
use quotkit::matrixgen::certify_ses;
use quotkit::oracle::{generic_cokernel_split_numeric, generic_kernel_split_numeric, OracleConfig};
use quotkit::quot_geometry::{connectedness_certificate, irreducible, verify_certificate, Pair};
use quotkit::realizability::{condition_tail, condition_threshold, is_realizable, Triple};
use quotkit::splitting::st;
use quotkit::stable_pairs::{component_census, enumerate_stable_pairs};
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

/// Irreducibility: the single-block condition misreads ties in e and the
/// degree bound has counterexamples with repeated extreme entries.
const KNOWN_RED: &[usize] = &[5];

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    check(start.elapsed() <= limit, format!("took {:.1?}, limit {:?}", start.elapsed(), limit))
}

fn golden_census() -> Outcome {
    let start = Instant::now();
    let e = st(&[0, 4, 5, 6, 8, 12]);
    let recs = enumerate_stable_pairs(&e, 3, 20).map_err(|x| x.to_string())?;
    let got: BTreeSet<_> = recs.iter().map(|r| (r.b.clone(), r.a.clone(), r.dim, r.tangent)).collect();
    let want: BTreeSet<_> = [
        (&[4, 4, 7][..], &[0, 7, 13][..], 35, 36),
        (&[4, 5, 6], &[0, 8, 12], 36, 36),
        (&[5, 5, 5], &[0, 4, 16], 36, 36),
        (&[0, 3, 12], &[6, 6, 8], 37, 37),
        (&[1, 2, 12], &[0, 10, 10], 38, 38),
        (&[-5, 8, 12], &[6, 7, 7], 38, 38),
    ]
    .into_iter()
    .map(|(b, a, d, t)| (st(b), st(a), d, t))
    .collect();
    check(recs.len() == 6 && got == want, format!("stable pairs {:?}", got))?;
    let census = component_census(&e, 3, 20).map_err(|x| x.to_string())?;
    let dims: Vec<i128> = census.iter().map(|r| r.dim).collect();
    check(dims == [36, 36, 37, 38, 38], format!("component dims {:?}", dims))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("6 stable pairs, 5 components, {:.1?}", start.elapsed()))
}

fn criteria_equivalence() -> Outcome {
    let start = Instant::now();
    let triples = common::small_triples();
    let bad: Vec<String> = triples
        .par_iter()
        .filter_map(|t| {
            let x = condition_tail(t);
            let y = condition_threshold(t);
            let z = search_datum(t).ok()?.is_some();
            (!(x == y && y == z)).then(|| format!("{}", t))
        })
        .collect();
    check(bad.is_empty(), format!("{} disagreements, first {:?}", bad.len(), bad.first()))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("{} triples agree, {:.1?}", triples.len(), start.elapsed()))
}

fn matrix_certificates() -> Outcome {
    let start = Instant::now();
    let realizable: Vec<Triple> = common::small_triples().into_iter().filter(is_realizable).collect();
    let bad: Vec<String> = realizable
        .par_iter()
        .filter_map(|t| match certify_ses(t) {
            Ok(c) if c.checks.all() => None,
            Ok(c) => Some(format!("{}: {:?}", t, c.checks)),
            Err(x) => Some(format!("{}: {}", t, x)),
        })
        .collect();
    check(bad.is_empty(), format!("{} failures, first {:?}", bad.len(), bad.first()))?;
    Ok(format!("{} certificates, {:.1?}", realizable.len(), start.elapsed()))
}

fn balancing_example() -> Outcome {
    let t = Triple::from_slices(&[0, 3, 9], &[2, 7, 8, 11, 20], &[13, 23]);
    let datum = BalancingDatum::from_sparse(vec![3, 5], vec![1, 2, 4], &[(1, 1, 2), (2, 1, 3), (2, 2, 1), (3, 2, 2)]);
    check(verify_datum(&t, &datum).map_err(|x| x.to_string())?, "printed datum rejected")?;
    let built = construct_datum(&t).map_err(|x| x.to_string())?;
    check(verify_datum(&t, &built).map_err(|x| x.to_string())?, "constructed datum rejected")?;
    Ok("printed and constructed data verify".into())
}

fn irreducibility() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let single = irreducible(&st(&[1, 7, 8, 9, 20]), 3, 20).map_err(|x| x.to_string())?;
    if !(single.irreducible && single.components == 1 && single.b == st(&[5, 20]) && single.a == st(&[1, 9, 10])) {
        problems.push(format!("single-component example: {:?}", single));
    }
    if irreducible(&st(&[0, 4, 5, 6, 8, 12]), 3, 20).map_err(|x| x.to_string())?.irreducible {
        problems.push("worked example reported irreducible".into());
    }
    let sweep = common::quot_sweep();
    let reports: Vec<_> = sweep
        .par_iter()
        .map(|(e, n, d)| (e, n, d, irreducible(e, *n, *d).expect("sweep instance")))
        .collect();
    let disagree: Vec<_> = reports.iter().filter(|x| !x.3.conditions_agree).collect();
    if let Some((e, n, d, _)) = disagree.first() {
        problems.push(format!(
            "three conditions disagree on {}/{} (e.g. e = {}, n = {}, d = {})",
            disagree.len(),
            reports.len(),
            e,
            n,
            d
        ));
    }
    let bound: Vec<_> = reports.iter().filter(|x| x.3.degree_bound && !x.3.irreducible).collect();
    if let Some((e, n, d, r)) = bound.first() {
        problems.push(format!(
            "degree bound holds but reducible on {} instances (e.g. e = {}, n = {}, d = {}: {} components)",
            bound.len(),
            e,
            n,
            d,
            r.components
        ));
    }
    let split: Vec<_> = reports.iter().filter(|x| x.3.pair_realizable != (x.3.components == 1)).collect();
    if !split.is_empty() {
        problems.push(format!("realizable pair vs one component disagree on {}", split.len()));
    }
    within(start, Duration::from_secs(300))?;
    if problems.is_empty() {
        Ok(format!("{} instances, {:.1?}", reports.len(), start.elapsed()))
    } else {
        Err(problems.join("; "))
    }
}

fn connectedness() -> Outcome {
    let start = Instant::now();
    let sweep = common::quot_sweep();
    let bad: Vec<String> = sweep
        .par_iter()
        .filter_map(|(e, n, d)| match connectedness_certificate(e, *n, *d) {
            Ok(c) if c.connected && verify_certificate(&c).is_ok() => None,
            Ok(c) => Some(format!("e = {}, n = {}, d = {}: groups {:?}", e, n, d, c.groups)),
            Err(x) => Some(format!("e = {}, n = {}, d = {}: {}", e, n, d, x)),
        })
        .collect();
    check(bad.is_empty(), format!("{} failures, first {:?}", bad.len(), bad.first()))?;
    let cert = connectedness_certificate(&st(&[0, 4, 10, 13, 15, 20]), 3, 40).map_err(|x| x.to_string())?;
    verify_certificate(&cert)?;
    check(cert.connected, "worked example not connected")?;
    let visited: BTreeSet<Pair> = cert.edges.iter().flat_map(|x| x.chain.iter().cloned()).collect();
    for (b, a) in [(&[-4, 6, 20][..], &[8, 16, 16][..]), (&[-13, 15, 20], &[13, 13, 14])] {
        check(visited.contains(&(st(b), st(a))), format!("chain misses ({:?}, {:?})", b, a))?;
    }
    let terminal = cert.nodes.iter().any(|x| x.b == st(&[-13, 15, 20]) && x.a == st(&[13, 13, 14]) && x.strongly_stable);
    check(terminal, "terminal pair is not a component")?;
    Ok(format!("{} instances plus the worked chain, {:.1?}", sweep.len(), start.elapsed()))
}

fn oracle_concordance() -> Outcome {
    let start = Instant::now();
    let e = st(&[0, 4, 5, 6, 8, 12]);
    let cfg = OracleConfig::default();
    let recs = enumerate_stable_pairs(&e, 3, 20).map_err(|x| x.to_string())?;
    check(recs.len() == 6, "expected six stable pairs")?;
    for r in &recs {
        let b = generic_kernel_split_numeric(&e, &r.a, &cfg).map_err(|x| x.to_string())?;
        let a = generic_cokernel_split_numeric(&r.b, &e, &cfg).map_err(|x| x.to_string())?;
        check(b == r.b && a == r.a, format!("({}, {}) measured as kernel {}, cokernel {}", r.b, r.a, b, a))?;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("6 pairs, p = {}, {} trials, {:.1?}", cfg.prime, cfg.trials, start.elapsed()))
}

fn boij_soderberg() -> Outcome {
    let start = Instant::now();
    let koszul = BettiDiagram::from_integers([&[(0, 1)], &[(1, 2)], &[(2, 1)]]);
    let parts = betti::decompose(&koszul).map_err(|x| x.to_string())?;
    let one = num_rational::BigRational::from_integer(1.into());
    check(
        parts == Some(vec![(one, PureDiagram::new([0, 1, 2]).unwrap())]),
        "Koszul diagram is not a single pure diagram",
    )?;
    check(betti::lattice_point_realizable(&koszul).map_err(|x| x.to_string())?, "Koszul not realizable")?;
    let diagrams = betti::lattice_diagrams(0, 4, 6);
    let bad: Vec<String> = diagrams
        .par_iter()
        .filter_map(|d| {
            if !betti::in_cone(d).ok()? {
                return None;
            }
            let base = betti::lattice_point_realizable(d).ok()?;
            let scaled_ok = [2, 3].iter().all(|&k| betti::lattice_point_realizable(&d.scale(k)).ok() == Some(base));
            (!(base && scaled_ok)).then(|| d.to_string())
        })
        .collect();
    check(bad.is_empty(), format!("{} failures, first {:?}", bad.len(), bad.first()))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("{} diagrams, {:.1?}", diagrams.len(), start.elapsed()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden census", golden_census),
        ("criteria equivalence sweep", criteria_equivalence),
        ("matrix certificates", matrix_certificates),
        ("balancing example", balancing_example),
        ("irreducibility", irreducibility),
        ("connectedness", connectedness),
        ("oracle concordance", oracle_concordance),
        ("Boij-Soderberg", boij_soderberg),
    ];
    let mut failing = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        match run() {
            Ok(detail) => println!("criterion {}: PASS {} ({})", id, name, detail),
            Err(detail) => {
                let tag = if KNOWN_RED.contains(&id) { " [known]" } else { "" };
                println!("criterion {}: FAIL{} {} ({})", id, tag, name, detail);
                failing.push(id);
            }
        }
    }
    assert_eq!(failing, KNOWN_RED, "failing criteria differ from the documented set");
}
