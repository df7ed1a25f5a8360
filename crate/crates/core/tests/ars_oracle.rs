use std::time::{Duration, Instant};

use confluence::ars_oracle::{fuzz, AbstractCriterion};

#[test]
fn fuzz_soundness_and_necessity() {
    let start = Instant::now();
    let summary = fuzz(0x5eed, 1000);
    let took = start.elapsed();
    assert_eq!(summary.instances, 1000);
    assert!(took < Duration::from_secs(120), "took {took:?}");
    if let Some(c) = summary.unsound.first() {
        panic!("{} unsound on {:?}: {:?}", c.criterion, c.ars, c.verdict);
    }
    if let Some(c) = summary.one_sided.first() {
        panic!("{} one-sided on {:?}: {:?}", c.criterion, c.ars, c.verdict);
    }
    // the fuzz exercises both outcomes
    assert!(
        summary.crm > 0 && summary.crm < summary.instances,
        "{summary}"
    );
    for (c, k) in &summary.held {
        assert!(*k > 0, "{c} never applies\n{summary}");
    }
}

#[test]
fn other_seeds_are_clean_too() {
    for seed in 1..4 {
        let s = fuzz(seed, 300);
        assert!(s.is_clean(), "seed {seed}: {s}");
    }
    assert!(AbstractCriterion::ALL.iter().filter(|c| c.is_iff()).count() == 3);
}
