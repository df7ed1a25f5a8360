mod common;

use std::time::{Duration, Instant};

use common::*;
use confluence::completion::{decompose, verify_certificate, Completion, HistoryEntry, Outcome};
use confluence::reversibility::DEFAULT_K;
use confluence::termination::TerminationProver;

fn complete(ex: &Example) -> (Outcome, Duration) {
    let prover = TerminationProver::new();
    let start = Instant::now();
    let out = Completion::new(&prover).run(&ex.all());
    (out, start.elapsed())
}

#[test]
fn r2_completes_with_the_missing_addition_rules() {
    let ex = r2();
    let (out, took) = complete(&ex);
    assert!(took < Duration::from_secs(60), "took {took:?}");
    let cert = out.certificate().expect("YES for R2");
    assert!(cert.history.len() <= 20);
    let s = &cert.report.s;
    assert!(s.contains_variant(&trs(&[ADD3]).rules()[0]));
    assert!(
        s.contains_variant(&trs(&[ADD4]).rules()[0])
            || s.contains_variant(&trs(&[ADD4P]).rules()[0]),
        "final S: {s}"
    );
    verify_certificate(cert, DEFAULT_K).unwrap();
}

#[test]
fn all_examples_complete() {
    for ex in examples() {
        let (out, took) = complete(&ex);
        let cert = out
            .certificate()
            .unwrap_or_else(|| panic!("{}: {:?}", ex.name, out));
        verify_certificate(cert, DEFAULT_K).unwrap_or_else(|e| panic!("{}: {e}", ex.name));
        assert!(took < Duration::from_secs(60), "{}: {took:?}", ex.name);
    }
}

#[test]
fn decompose_separates_permutative_rules() {
    let parts = decompose(&r3().all(), &[0, 1, 2], DEFAULT_K);
    assert_eq!(parts[0].p.labels(), ["C", "A"]);
    assert_eq!(parts[0].s.labels(), ["add1", "add2", "add3", "add4"]);
    assert!(parts.iter().any(|p| p.p.is_empty()));
    let idx: Vec<usize> = parts.iter().map(|p| p.index).collect();
    assert_eq!(idx, [0, 1, 2, 0, 1, 2]);
}

#[test]
fn tampered_history_is_rejected() {
    let (out, _) = complete(&r2());
    let mut cert = out.certificate().unwrap().clone();
    let pos = cert
        .history
        .iter()
        .position(|h| matches!(h, HistoryEntry::Addition { .. }))
        .unwrap();
    if let HistoryEntry::Addition { reduction, .. } = &mut cert.history[pos] {
        reduction.pop();
    }
    assert!(verify_certificate(&cert, DEFAULT_K).is_err());

    let mut cert = out.certificate().unwrap().clone();
    cert.input
        .push(confluence::syntax::parse_rule("x", "s(x) -> 0", VARS).unwrap());
    assert!(verify_certificate(&cert, DEFAULT_K).is_err());
}
