//! Bounded reversibility checks: `→_P ⊆ ←*_P` holds once every rule
//! `l → r` of `P` admits `r →* l`, since rewriting is closed under contexts
//! and substitutions.

use crate::rewriting::{reach_bounded, Rule, Step, Trs};

/// Default bound on the length of each `r →* l` sequence.
pub const DEFAULT_K: usize = 10;

/// One sequence `r →*_P l` per rule of `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversibilityWitness {
    pub sequences: Vec<(Rule, Vec<Step>)>,
}

impl ReversibilityWitness {
    pub fn sequence_for(&self, rule: &Rule) -> Option<&[Step]> {
        self.sequences
            .iter()
            .find(|(r, _)| r.is_variant_of(rule))
            .map(|(_, s)| s.as_slice())
    }

    /// Replays every sequence under `P` and checks the length bound and coverage.
    pub fn replays(&self, p: &Trs, k: usize) -> bool {
        p.iter().all(|rule| {
            self.sequences.iter().any(|(r, steps)| {
                r == rule && steps.len() <= k && sequence_reverses(rule, steps, p)
            })
        })
    }
}

/// True if `steps` is a valid `P`-sequence from the rhs of `rule` to its lhs.
pub fn sequence_reverses(rule: &Rule, steps: &[Step], p: &Trs) -> bool {
    let mut cur = rule.rhs();
    for s in steps {
        if s.source() != cur || !s.is_valid() || !p.contains_variant(s.rule()) {
            return false;
        }
        cur = s.target();
    }
    cur == rule.lhs()
}

/// Witness for `r →≤k_P l` for every rule, or `None`.
pub fn is_reversible(p: &Trs, k: usize) -> Option<ReversibilityWitness> {
    if !p.is_bidirectional() {
        return None;
    }
    let mut sequences = Vec::new();
    for rule in p {
        let goal = rule.lhs().clone();
        let steps = reach_bounded(rule.rhs(), |t| *t == goal, p, k)?;
        sequences.push((rule.clone(), steps));
    }
    Some(ReversibilityWitness { sequences })
}

/// The largest subset of `p` that is reversible within `k`: rules are dropped
/// until every remaining rule can be undone by the remaining ones.
pub fn greatest_reversible_subset(p: &Trs, k: usize) -> (Trs, Option<ReversibilityWitness>) {
    let mut cur: Trs = p.iter().filter(|r| r.is_bidirectional()).cloned().collect();
    loop {
        let keep: Trs = cur
            .iter()
            .filter(|rule| {
                let goal = rule.lhs().clone();
                reach_bounded(rule.rhs(), |t| *t == goal, &cur, k).is_some()
            })
            .cloned()
            .collect();
        if keep.len() == cur.len() {
            let w = is_reversible(&cur, k);
            return (cur, w);
        }
        cur = keep;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_rule;

    fn trs(rules: &[(&str, &str)]) -> Trs {
        rules
            .iter()
            .map(|(l, r)| parse_rule(l, r, &["x", "y", "z"]).unwrap())
            .collect()
    }

    #[test]
    fn commutativity_and_associativity() {
        let p = trs(&[
            ("C", "+(x,y) -> +(y,x)"),
            ("A", "+(+(x,y),z) -> +(x,+(y,z))"),
        ]);
        let w = is_reversible(&p, DEFAULT_K).unwrap();
        assert_eq!(w.sequence_for(&p.rules()[0]).unwrap().len(), 1);
        let a = w.sequence_for(&p.rules()[1]).unwrap();
        assert_eq!(a.len(), 5);
        let labels: Vec<&str> = a.iter().map(|s| s.rule().label()).collect();
        assert_eq!(labels, ["C", "A", "C", "A", "C"]);
        assert!(w.replays(&p, DEFAULT_K));
        assert!(!w.replays(&p, 4));
        assert!(is_reversible(&p, 4).is_none());
    }

    #[test]
    fn commutativity_alone() {
        let p = trs(&[("C", "+(x,y) -> +(y,x)")]);
        assert_eq!(is_reversible(&p, 1).unwrap().sequences[0].1.len(), 1);
    }

    #[test]
    fn collapsing_rule_is_not_reversible() {
        assert!(is_reversible(&trs(&[("add1", "+(0,y) -> y")]), DEFAULT_K).is_none());
    }

    #[test]
    fn subset_drops_one_way_rules() {
        let p = trs(&[
            ("C", "+(x,y) -> +(y,x)"),
            ("ss2", "s(s(x)) -> s(x)"),
            ("A", "+(+(x,y),z) -> +(x,+(y,z))"),
        ]);
        let (sub, w) = greatest_reversible_subset(&p, DEFAULT_K);
        assert_eq!(sub.labels(), ["C", "A"]);
        assert!(w.is_some());
        let add5 = trs(&[
            ("C", "+(x,y) -> +(y,x)"),
            ("add5", "+(x,s(y)) -> +(s(x),y)"),
        ]);
        assert_eq!(greatest_reversible_subset(&add5, DEFAULT_K).0.len(), 2);
    }
}
