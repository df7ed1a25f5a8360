//! Reduction-preserving completion: rules are added or replaced only when the
//! new rule is derivable, so `→*` never changes, until one of the criteria
//! holds for the current partition `S ∪ P`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::criteria::{
    invert_step, verify_report, CheckOptions, Checker, Condition, Criterion, CriterionReport,
    FailingPair, PairRef,
};
use crate::reversibility::greatest_reversible_subset;
use crate::rewriting::{conversion_bounded, normalize_trace, reducts, Rule, Step, Trs};
use crate::termination::TerminationProver;
use crate::terms::{Position, Term};

/// One derivation step of the history.
#[derive(Clone, Debug)]
pub enum HistoryEntry {
    /// `l → r` added with `l ↔*_P w` (`conversion`) and `w →*_S r` (`reduction`).
    Addition {
        rule: Rule,
        conversion: Vec<Step>,
        reduction: Vec<Step>,
    },
    /// `l → r` replaced by `l → r′` with `r ↔*_P r′`.
    Replacement {
        old: Rule,
        new: Rule,
        conversion: Vec<Step>,
    },
}

impl fmt::Display for HistoryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryEntry::Addition { rule, .. } => write!(f, "add {}: {rule}", rule.label()),
            HistoryEntry::Replacement { old, new, .. } => {
                write!(f, "replace {}: {old} by {new}", old.label())
            }
        }
    }
}

/// Everything needed to re-check a YES verdict.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub input: Trs,
    pub initial_s: Trs,
    pub initial_p: Trs,
    pub history: Vec<HistoryEntry>,
    pub report: CriterionReport,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Yes(Box<Certificate>),
    Maybe(String),
}

impl Outcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, Outcome::Yes(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Yes(c) => Some(c),
            Outcome::Maybe(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompletionOptions {
    pub max_steps: usize,
    pub timeout: Duration,
    pub max_states: usize,
    /// Completion indices to try: 0 PCP, 1 linear, 2 Huet.
    pub indices: Vec<usize>,
    pub check: CheckOptions,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions {
            max_steps: 20,
            timeout: Duration::from_secs(60),
            max_states: 400,
            indices: vec![0, 1, 2],
            check: CheckOptions::default(),
        }
    }
}

/// A partition `R = S ∪ P` with the criterion index to try on it.
#[derive(Clone, Debug)]
pub struct Partition {
    pub s: Trs,
    pub p: Trs,
    pub index: usize,
}

/// Candidate `P`: rules whose inverse is in `R`, or that keep the symbols and
/// the root symbol; cut down to its greatest reversible subset.
pub fn decompose(r: &Trs, indices: &[usize], rev_k: usize) -> Vec<Partition> {
    let candidates: Trs = r
        .iter()
        .filter(|rule| {
            let inverse_in_r = rule.inverse().is_some_and(|inv| r.contains_variant(&inv));
            let permutative = rule.lhs().root() == rule.rhs().root()
                && rule.lhs().symbols() == rule.rhs().symbols();
            inverse_in_r || permutative
        })
        .cloned()
        .collect();
    let (p, _) = greatest_reversible_subset(&candidates, rev_k);
    let s = r.minus(&p);
    let mut out = Vec::new();
    for &i in indices {
        out.push(Partition {
            s: s.clone(),
            p: p.clone(),
            index: i,
        });
    }
    if !p.is_empty() {
        for &i in indices {
            out.push(Partition {
                s: r.clone(),
                p: Trs::empty(),
                index: i,
            });
        }
    }
    out
}

#[derive(Clone)]
struct State {
    s: Trs,
    p: Trs,
    initial_s: Trs,
    index: usize,
    history: Vec<HistoryEntry>,
    steps: usize,
}

impl State {
    fn key(&self) -> (Vec<(Term, Term)>, Vec<(Term, Term)>, usize) {
        (self.s.canonical_key(), self.p.canonical_key(), self.index)
    }
}

pub struct Completion<'a> {
    pub opts: CompletionOptions,
    pub prover: &'a TerminationProver,
}

impl<'a> Completion<'a> {
    pub fn new(prover: &'a TerminationProver) -> Self {
        Completion {
            opts: CompletionOptions::default(),
            prover,
        }
    }

    pub fn with_options(prover: &'a TerminationProver, opts: CompletionOptions) -> Self {
        Completion { opts, prover }
    }

    /// Runs completion on `R` from the partitions of [`decompose`].
    pub fn run(&self, r: &Trs) -> Outcome {
        let parts = decompose(r, &self.opts.indices, self.opts.check.rev_k);
        self.run_from(r, parts)
    }

    /// Runs completion from the given start partitions, cheapest states first.
    pub fn run_from(&self, r: &Trs, parts: Vec<Partition>) -> Outcome {
        let start = Instant::now();
        let checker = Checker::with_options(self.prover, self.opts.check);
        let mut states: Vec<State> = Vec::new();
        let mut queue: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
        let mut seen = HashSet::new();
        let mut counter = 0usize;
        let mut enqueue =
            |st: State, cost: usize, states: &mut Vec<State>, queue: &mut BinaryHeap<_>| {
                if seen.insert(st.key()) {
                    queue.push(Reverse((cost, states.len())));
                    states.push(st);
                }
            };
        for part in parts {
            let st = State {
                initial_s: part.s.clone(),
                s: part.s,
                p: part.p,
                index: part.index,
                history: Vec::new(),
                steps: 0,
            };
            enqueue(st, 0, &mut states, &mut queue);
        }
        let mut checked = 0;
        let mut limit_hit = None;
        while let Some(Reverse((cost, id))) = queue.pop() {
            if start.elapsed() > self.opts.timeout {
                limit_hit = Some("timeout");
                break;
            }
            if checked >= self.opts.max_states {
                limit_hit = Some("state limit");
                break;
            }
            checked += 1;
            let st = states[id].clone();
            let Some(criterion) = Criterion::from_index(st.index) else {
                continue;
            };
            let Ok(report) = checker.check(criterion, &st.s, &st.p) else {
                continue;
            };
            if report.holds {
                return Outcome::Yes(Box::new(Certificate {
                    input: r.clone(),
                    initial_s: st.initial_s,
                    initial_p: st.p,
                    history: st.history,
                    report,
                }));
            }
            if st.steps >= self.opts.max_steps {
                limit_hit = Some("step limit");
                continue;
            }
            for (succ, extra) in self.successors(&st, &report, &mut counter) {
                enqueue(succ, cost + extra, &mut states, &mut queue);
            }
        }
        Outcome::Maybe(match limit_hit {
            Some(l) => format!("no criterion shown before the {l} ({checked} states checked)"),
            None => format!("search space exhausted ({checked} states checked)"),
        })
    }

    /// Successor states: derivable additions with irreducible left-hand sides,
    /// all derivable additions at once, then single replacements.
    fn successors(
        &self,
        st: &State,
        report: &CriterionReport,
        counter: &mut usize,
    ) -> Vec<(State, usize)> {
        let pp = st.p.with_inverses();
        let all = st.s.union(&pp);
        let depth = self.opts.check.depth;
        let mut adds: Vec<HistoryEntry> = Vec::new();
        let mut involved: Vec<Rule> = Vec::new();
        for f in &report.failures {
            for (rule, conversion, reduction) in candidates(f, &st.s, &pp, depth) {
                let dup = all.contains_variant(&rule)
                    || adds.iter().any(|a| matches!(a, HistoryEntry::Addition { rule: r, .. } if r.is_variant_of(&rule)));
                if !dup {
                    adds.push(HistoryEntry::Addition {
                        rule,
                        conversion,
                        reduction,
                    });
                }
            }
            let mut rs = f.pair.inner_rules();
            rs.push(f.pair.outer_rule());
            for r in rs {
                if let Some(sr) = st.s.find_variant(r) {
                    if !involved.iter().any(|q| q.is_variant_of(sr)) {
                        involved.push(sr.clone());
                    }
                }
            }
        }
        let mut out = Vec::new();
        let label = |counter: &mut usize| {
            *counter += 1;
            format!("n{counter}")
        };
        let with_adds = |entries: &[HistoryEntry], counter: &mut usize| {
            let mut next = st.clone();
            next.steps += 1;
            for e in entries {
                let HistoryEntry::Addition {
                    rule,
                    conversion,
                    reduction,
                } = e
                else {
                    continue;
                };
                let rule = rule.with_label(&label(counter));
                next.s.push(rule.clone());
                next.history.push(HistoryEntry::Addition {
                    rule,
                    conversion: conversion.clone(),
                    reduction: reduction.clone(),
                });
            }
            next
        };
        if !adds.is_empty() {
            let reduced: Vec<HistoryEntry> = adds
                .iter()
                .filter(|e| {
                    let HistoryEntry::Addition { rule, .. } = e else {
                        return false;
                    };
                    let others: Trs = adds
                        .iter()
                        .filter_map(|o| match o {
                            HistoryEntry::Addition { rule: q, .. } if !q.is_variant_of(rule) => {
                                Some(q.clone())
                            }
                            _ => None,
                        })
                        .collect();
                    reducts(rule.lhs(), &st.s).is_empty() && reducts(rule.lhs(), &others).is_empty()
                })
                .cloned()
                .collect();
            if !reduced.is_empty() && reduced.len() < adds.len() {
                out.push((with_adds(&reduced, counter), 1));
            }
            out.push((with_adds(&adds, counter), 1));
        }
        for old in &involved {
            for step in reducts(old.rhs(), &pp) {
                let Ok(new) = Rule::new("new", old.lhs().clone(), step.target().clone()) else {
                    continue;
                };
                if st.s.contains_variant(&new) {
                    continue;
                }
                let new = new.with_label(&label(counter));
                let mut next = st.clone();
                next.steps += 1;
                let s: Vec<Rule> = next
                    .s
                    .iter()
                    .map(|r| if r == old { new.clone() } else { r.clone() })
                    .collect();
                next.s = Trs::new(s);
                next.history.push(HistoryEntry::Replacement {
                    old: old.clone(),
                    new,
                    conversion: vec![step],
                });
                out.push((next, 2));
            }
        }
        out
    }
}

/// Derivable rules repairing one failing pair, each with its witness
/// `l ↔*_P w →*_S r`.
fn candidates(
    f: &FailingPair,
    s: &Trs,
    pp: &Trs,
    depth: usize,
) -> Vec<(Rule, Vec<Step>, Vec<Step>)> {
    let mut out = Vec::new();
    let mut push = |lhs: &Term, rhs: &Term, conv: Vec<Step>, red: Vec<Step>| {
        if lhs == rhs {
            return;
        }
        if let Ok(rule) = Rule::new("new", lhs.clone(), rhs.clone()) {
            out.push((rule, conv, red));
        }
    };
    let peak = f.pair.peak();
    match f.condition {
        Condition::SP => {
            // v ←_P peak →_S u →*_S û, so v → û
            let PairRef::Cp(c) = &f.pair else { return out };
            let Some(back) = c
                .outer_rule
                .inverse()
                .and_then(|inv| Step::new(&c.right, &Position::root(), &inv))
            else {
                return out;
            };
            let Some(inner) = Step::new(peak, &c.position, &c.inner_rule) else {
                return out;
            };
            let Ok((_, rest)) = normalize_trace(&c.left, s, 100_000) else {
                return out;
            };
            let mut red = vec![inner];
            red.extend(rest);
            push(&c.right, &f.u_hat, vec![back], red);
        }
        Condition::PS => {
            // u ←_P(parallel) peak →_S v →*_S v̂, so u → v̂
            let mut conv = Vec::new();
            let mut cur = f.pair.left().clone();
            let positions: Vec<Position> = match &f.pair {
                PairRef::Cp(c) => vec![c.position.clone()],
                PairRef::Pcp(c) => c.positions.clone(),
            };
            for (pos, rule) in positions.iter().zip(f.pair.inner_rules()) {
                let Some(st) = rule.inverse().and_then(|inv| Step::new(&cur, pos, &inv)) else {
                    return out;
                };
                cur = st.target().clone();
                conv.push(st);
            }
            if cur != *peak {
                return out;
            }
            let Some(outer) = Step::new(peak, &Position::root(), f.pair.outer_rule()) else {
                return out;
            };
            let Ok((_, rest)) = normalize_trace(f.pair.right(), s, 100_000) else {
                return out;
            };
            let mut red = vec![outer];
            red.extend(rest);
            push(f.pair.left(), &f.v_hat, conv, red);
        }
        Condition::SS => {
            // û ↔*_P v̂: either orientation is derivable with an empty reduction
            if let Some(conv) = conversion_bounded(&f.u_hat, &f.v_hat, pp, depth) {
                let back: Option<Vec<Step>> = conv.iter().rev().map(invert_step).collect();
                push(&f.u_hat, &f.v_hat, conv, Vec::new());
                if let Some(back) = back {
                    push(&f.v_hat, &f.u_hat, back, Vec::new());
                }
            }
        }
    }
    out
}

/// Replays the history from the initial partition and re-checks the final
/// report: the reduction-equivalence audit plus the criterion's evidence.
pub fn verify_certificate(cert: &Certificate, rev_k: usize) -> Result<(), String> {
    if !cert
        .input
        .same_rules(&cert.initial_s.union(&cert.initial_p))
    {
        return Err("initial partition does not cover the input system".into());
    }
    let p = &cert.initial_p;
    let pp = p.with_inverses();
    let mut s = cert.initial_s.clone();
    for (n, entry) in cert.history.iter().enumerate() {
        match entry {
            HistoryEntry::Addition {
                rule,
                conversion,
                reduction,
            } => {
                let w = replay(rule.lhs(), conversion, &pp)
                    .ok_or(format!("entry {n}: bad conversion"))?;
                let end = replay(&w, reduction, &s).ok_or(format!("entry {n}: bad reduction"))?;
                if end != *rule.rhs() {
                    return Err(format!(
                        "entry {n}: reduction ends in {end}, not {}",
                        rule.rhs()
                    ));
                }
                s.push(rule.clone());
            }
            HistoryEntry::Replacement {
                old,
                new,
                conversion,
            } => {
                let Some(idx) = s.iter().position(|r| r.is_variant_of(old)) else {
                    return Err(format!("entry {n}: replaced rule {old} is not in S"));
                };
                if old.lhs() != new.lhs() {
                    return Err(format!("entry {n}: replacement changes the left-hand side"));
                }
                let end = replay(old.rhs(), conversion, &pp)
                    .ok_or(format!("entry {n}: bad conversion"))?;
                if end != *new.rhs() {
                    return Err(format!(
                        "entry {n}: conversion ends in {end}, not {}",
                        new.rhs()
                    ));
                }
                let mut rules = s.rules().to_vec();
                rules[idx] = new.clone();
                s = Trs::new(rules);
            }
        }
    }
    if !s.same_rules(&cert.report.s) || !p.same_rules(&cert.report.p) {
        return Err("final partition differs from the replayed history".into());
    }
    verify_report(&cert.report, rev_k)
}

fn replay(start: &Term, steps: &[Step], rules: &Trs) -> Option<Term> {
    let mut cur = start.clone();
    for st in steps {
        if *st.source() != cur || !st.is_valid() || !rules.contains_variant(st.rule()) {
            return None;
        }
        cur = st.target().clone();
    }
    Some(cur)
}
