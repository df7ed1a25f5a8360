mod common;

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use common::*;
use confluence::critical_pairs::{cp, cp_in, cp_out, pcp_in, CriticalPair};
use confluence::syntax::parse_term;
use confluence::terms::{canonical_form, Term};

fn t(s: &str) -> Term {
    parse_term(s, VARS).unwrap()
}

fn keys(pairs: &[CriticalPair]) -> HashSet<Vec<Term>> {
    pairs.iter().map(CriticalPair::key).collect()
}

fn want(pairs: &[(&str, &str)]) -> HashSet<Vec<Term>> {
    pairs
        .iter()
        .map(|(a, b)| canonical_form(&[&t(a), &t(b)]))
        .collect()
}

fn flipped(pairs: &[CriticalPair]) -> HashSet<Vec<Term>> {
    pairs
        .iter()
        .map(|c| canonical_form(&[&c.right, &c.left]))
        .collect()
}

#[test]
fn r2_pairs() {
    let ex = r2();
    assert!(cp_in(&ex.p, &ex.s).is_empty());
    let out = want(&[("y", "+(y,0)"), ("s(+(x,y))", "+(y,s(x))")]);
    assert_eq!(keys(&cp_out(&ex.s, &ex.p)), out);
    assert_eq!(flipped(&cp_out(&ex.p, &ex.s)), out);
    assert_eq!(
        keys(&cp_in(&ex.s, &ex.p)),
        want(&[
            ("+(y,z)", "+(0,+(y,z))"),
            ("+(s(+(x,y)),z)", "+(s(x),+(y,z))")
        ])
    );
}

#[test]
fn r3_pairs() {
    let ex = r3();
    assert_eq!(keys(&cp(&ex.s, &ex.s)), want(R3_CP_SS));
    let pp = ex.p.with_inverses();
    assert!(cp_in(&pp, &ex.s).is_empty());
    assert_eq!(keys(&cp(&ex.s, &pp)), want(R3_CP_SP));
}

#[test]
fn pcp_fgh_example() {
    let q = trs(&[("g", "g(x) -> h(x)")]);
    let r = trs(&[("f", "f(g(x),g(y)) -> h(g(x))")]);
    let got: HashSet<(Vec<Term>, BTreeSet<String>)> = pcp_in(&q, &r)
        .iter()
        .map(|p| {
            let xs = p.var_set.iter().map(|v| v.name().to_string()).collect();
            (canonical_form(&[&p.left, &p.right]), xs)
        })
        .collect();
    let expect: HashSet<(Vec<Term>, BTreeSet<String>)> = [
        ("f(h(x),h(y))", &["x", "y"][..]),
        ("f(g(x),h(y))", &["y"][..]),
        ("f(h(x),g(y))", &["x"][..]),
    ]
    .into_iter()
    .map(|(l, xs)| {
        let key = canonical_form(&[&t(l), &t("h(g(x))")]);
        (key, xs.iter().map(|s| s.to_string()).collect())
    })
    .collect();
    assert_eq!(got, expect);
}

#[test]
fn peaks_are_instances_of_emitted_pairs() {
    let start = Instant::now();
    let tally = peaks::run(2024, 500);
    assert!(
        tally.misses.is_empty(),
        "{} misses, first: {}",
        tally.misses.len(),
        tally.misses[0]
    );
    assert!(tally.variable_cases > 0);
    let took = start.elapsed();
    assert!(took < Duration::from_secs(60), "took {took:?}");
}
