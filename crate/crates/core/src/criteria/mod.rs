//! Critical-pair criteria for confluence of `S ∪ P` with `P` reversible.
//!
//! Each criterion is a set of obligations: a family of (parallel) critical
//! pairs and a join shape every pair must admit. Joins are searched within
//! bounds, so a failed search means "not shown", never "not confluent".

mod join;
mod verify;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::critical_pairs::{cp, cp_in, pcp_in, CriticalPair, ParallelCriticalPair};
use crate::reversibility::{is_reversible, ReversibilityWitness, DEFAULT_K};
use crate::rewriting::{normalize, Rule, Trs, DEFAULT_DEPTH};
use crate::termination::{NoProofReason, TerminationCertificate, TerminationProver};
use crate::terms::{Term, Var};

pub use join::{find_join, invert_step, JoinWitness, Middle, MiddleKind, SearchCtx, Shape, Side};
pub use verify::{pair_key, verify_report, PairKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    Linear,
    LinearCor,
    Parallel,
    ParallelCor,
    Pcp,
    PcpCor,
    Huet,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::Linear,
        Criterion::LinearCor,
        Criterion::Parallel,
        Criterion::ParallelCor,
        Criterion::Pcp,
        Criterion::PcpCor,
        Criterion::Huet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Linear => "linear",
            Criterion::LinearCor => "linear-cor",
            Criterion::Parallel => "parallel",
            Criterion::ParallelCor => "parallel-cor",
            Criterion::Pcp => "pcp",
            Criterion::PcpCor => "pcp-cor",
            Criterion::Huet => "huet",
        }
    }

    pub fn from_name(name: &str) -> Option<Criterion> {
        Criterion::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Variants that fix `P′ = ∅`.
    pub fn is_corollary(self) -> bool {
        matches!(
            self,
            Criterion::LinearCor | Criterion::ParallelCor | Criterion::PcpCor
        )
    }

    /// Whether `P′` is inferred (or given) for this criterion.
    pub fn uses_p_prime(self) -> bool {
        matches!(
            self,
            Criterion::Linear | Criterion::Parallel | Criterion::Pcp
        )
    }

    /// The criterion selected by a completion index: 0 PCP, 1 linear, 2 Huet.
    pub fn from_index(i: usize) -> Option<Criterion> {
        match i {
            0 => Some(Criterion::Pcp),
            1 => Some(Criterion::Linear),
            2 => Some(Criterion::Huet),
            _ => None,
        }
    }

    pub fn index(self) -> Option<usize> {
        match self {
            Criterion::Pcp => Some(0),
            Criterion::Linear => Some(1),
            Criterion::Huet => Some(2),
            _ => None,
        }
    }

    fn needs_linear(self) -> bool {
        matches!(self, Criterion::Linear | Criterion::LinearCor)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three families of critical pairs every criterion constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// Overlaps among `S` rules.
    SS,
    /// `P ∪ P⁻¹` rules inside `S` rules.
    PS,
    /// `S` rules inside `P ∪ P⁻¹` rules.
    SP,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::SS => "i",
            Condition::PS => "ii",
            Condition::SP => "iii",
        }
    }

    pub fn from_name(s: &str) -> Option<Condition> {
        match s {
            "i" => Some(Condition::SS),
            "ii" => Some(Condition::PS),
            "iii" => Some(Condition::SP),
            _ => None,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub enum PairRef {
    Cp(CriticalPair),
    Pcp(ParallelCriticalPair),
}

impl PairRef {
    pub fn left(&self) -> &Term {
        match self {
            PairRef::Cp(c) => &c.left,
            PairRef::Pcp(c) => &c.left,
        }
    }

    pub fn right(&self) -> &Term {
        match self {
            PairRef::Cp(c) => &c.right,
            PairRef::Pcp(c) => &c.right,
        }
    }

    pub fn peak(&self) -> &Term {
        match self {
            PairRef::Cp(c) => &c.peak,
            PairRef::Pcp(c) => &c.peak,
        }
    }

    pub fn outer_rule(&self) -> &Rule {
        match self {
            PairRef::Cp(c) => &c.outer_rule,
            PairRef::Pcp(c) => &c.outer_rule,
        }
    }

    pub fn inner_rules(&self) -> Vec<&Rule> {
        match self {
            PairRef::Cp(c) => vec![&c.inner_rule],
            PairRef::Pcp(c) => c.inner_rules.iter().collect(),
        }
    }

    pub fn var_set(&self) -> Option<&BTreeSet<Var>> {
        match self {
            PairRef::Cp(_) => None,
            PairRef::Pcp(c) => Some(&c.var_set),
        }
    }

    pub fn key(&self) -> PairKey {
        pair_key(self.left(), self.right(), self.var_set())
    }
}

impl fmt::Display for PairRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairRef::Cp(c) => c.fmt(f),
            PairRef::Pcp(c) => c.fmt(f),
        }
    }
}

/// One pair that must be joinable in the given shape; `shape = None` means
/// the pair must not exist at all.
#[derive(Clone, Debug)]
pub struct Obligation {
    pub condition: Condition,
    pub pair: PairRef,
    pub shape: Option<Shape>,
}

fn shape(left: Side, middle: MiddleKind, right: Side) -> Option<Shape> {
    Some(Shape {
        left,
        middle,
        right,
    })
}

/// All obligations of `criterion` for `S` and `P ∪ P⁻¹`.
pub fn obligations(criterion: Criterion, s: &Trs, pp: &Trs) -> Vec<Obligation> {
    use MiddleKind::{AtMostOne, Conversion};
    use Side::*;
    let par = MiddleKind::Parallel;
    let mut out = Vec::new();
    let mut push =
        |condition, pairs: Vec<CriticalPair>, sh: &dyn Fn(&CriticalPair) -> Option<Shape>| {
            for c in pairs {
                let shape = sh(&c);
                out.push(Obligation {
                    condition,
                    pair: PairRef::Cp(c),
                    shape,
                });
            }
        };
    match criterion {
        Criterion::Linear | Criterion::LinearCor => {
            push(Condition::SS, cp(s, s), &|_| shape(Star, AtMostOne, Star));
            push(Condition::PS, cp(pp, s), &|_| {
                shape(EmptyOrS, AtMostOne, Star)
            });
            push(Condition::SP, cp(s, pp), &|_| {
                shape(Star, AtMostOne, EmptyOrS)
            });
        }
        Criterion::Parallel | Criterion::ParallelCor => {
            push(Condition::SS, cp(s, s), &|_| shape(Star, par(None), Star));
            push(Condition::PS, cp_in(pp, s), &|_| None);
            push(Condition::SP, cp(s, pp), &|_| {
                shape(Star, par(None), EmptyOrS)
            });
        }
        Criterion::Pcp | Criterion::PcpCor => {
            push(Condition::SS, cp(s, s), &|_| shape(Star, par(None), Star));
            push(Condition::SP, cp(s, pp), &|_| {
                shape(Star, par(None), EmptyOrS)
            });
            for c in pcp_in(pp, s) {
                let sh = shape(EmptyOrS, par(Some(c.var_set.clone())), Star);
                out.push(Obligation {
                    condition: Condition::PS,
                    pair: PairRef::Pcp(c),
                    shape: sh,
                });
            }
        }
        Criterion::Huet => {
            push(Condition::SS, cp(s, s), &|_| shape(Star, Conversion, Star));
            push(Condition::PS, cp(pp, s), &|_| {
                shape(SPlus, Conversion, Star)
            });
            push(Condition::SP, cp(s, pp), &|_| {
                shape(Star, Conversion, SPlus)
            });
        }
    }
    out.sort_by_key(|o| o.condition);
    out
}

/// The fact a criterion needs but could not establish.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Precondition {
    #[error("S is not linear")]
    NotLinear,
    #[error("S is not left-linear")]
    NotLeftLinear,
    #[error("P is not reversible within the bound")]
    NotReversible,
    #[error("no termination proof for S ({0:?})")]
    NotTerminating(NoProofReason),
    #[error("no proof that S terminates relative to {1:?} ({0:?})")]
    NotRelativelyTerminating(NoProofReason, Vec<String>),
    #[error("P′ is not contained in P ∪ P⁻¹")]
    BadPPrime,
}

#[derive(Clone, Debug)]
pub struct PairEvidence {
    pub condition: Condition,
    pub left: Term,
    pub right: Term,
    pub var_set: Option<BTreeSet<Var>>,
    pub witness: JoinWitness,
}

/// A pair without a join of the required shape, with `S`-normal forms of its
/// sides and whether the right side was already `S`-normal.
#[derive(Clone, Debug)]
pub struct FailingPair {
    pub condition: Condition,
    pub pair: PairRef,
    pub u_hat: Term,
    pub v_hat: Term,
    pub v_normal: bool,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub s: Trs,
    pub p: Trs,
    pub p_prime: Trs,
    pub holds: bool,
    pub evidence: Vec<PairEvidence>,
    pub failures: Vec<FailingPair>,
    pub reversibility: ReversibilityWitness,
    /// Termination of `S` relative to `P′` (relative to `P` for Huet).
    pub termination: Option<TerminationCertificate>,
    /// Set when a relative termination proof for the inferred `P′` was missing.
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub depth: usize,
    pub max_nodes: usize,
    pub rev_k: usize,
    /// Largest `P′` candidate whose subsets are tried one by one.
    pub max_subset_rules: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            depth: DEFAULT_DEPTH,
            max_nodes: 1500,
            rev_k: DEFAULT_K,
            max_subset_rules: 8,
        }
    }
}

const NORMALIZE_FUEL: usize = 100_000;

pub struct Checker<'a> {
    pub opts: CheckOptions,
    pub prover: &'a TerminationProver,
}

impl<'a> Checker<'a> {
    pub fn new(prover: &'a TerminationProver) -> Self {
        Checker {
            opts: CheckOptions::default(),
            prover,
        }
    }

    pub fn with_options(prover: &'a TerminationProver, opts: CheckOptions) -> Self {
        Checker { opts, prover }
    }

    /// Checks `criterion` for the partition, inferring `P′` where applicable.
    pub fn check(
        &self,
        criterion: Criterion,
        s: &Trs,
        p: &Trs,
    ) -> Result<CriterionReport, Precondition> {
        self.check_with(criterion, s, p, None)
    }

    /// As [`Checker::check`]; a given `P′` is used as is instead of being inferred.
    pub fn check_with(
        &self,
        criterion: Criterion,
        s: &Trs,
        p: &Trs,
        p_prime: Option<&Trs>,
    ) -> Result<CriterionReport, Precondition> {
        if criterion.needs_linear() && !s.is_linear() {
            return Err(Precondition::NotLinear);
        }
        if !s.is_left_linear() {
            return Err(Precondition::NotLeftLinear);
        }
        let reversibility = is_reversible(p, self.opts.rev_k).ok_or(Precondition::NotReversible)?;
        let pp = p.with_inverses();
        let obls = obligations(criterion, s, &pp);
        let mut report = CriterionReport {
            criterion,
            s: s.clone(),
            p: p.clone(),
            p_prime: Trs::empty(),
            holds: false,
            evidence: Vec::new(),
            failures: Vec::new(),
            reversibility,
            termination: None,
            note: None,
        };

        if criterion == Criterion::Huet {
            let cert = self
                .prover
                .prove_relative(s, p)
                .map_err(|e| Precondition::NotRelativelyTerminating(e.reason, p.labels()))?;
            report.termination = Some(cert);
            self.run(&mut report, &obls, s, &pp, s);
            return Ok(report);
        }

        if let Some(pr) = p_prime.filter(|_| criterion.uses_p_prime()) {
            if pr.iter().any(|r| !pp.contains_variant(r)) {
                return Err(Precondition::BadPPrime);
            }
            let cert = self
                .prover
                .prove_relative(s, pr)
                .map_err(|e| Precondition::NotRelativelyTerminating(e.reason, pr.labels()))?;
            report.p_prime = pr.clone();
            report.termination = Some(cert);
            let scope = s.union(pr);
            self.run(&mut report, &obls, s, &pp, &scope);
            return Ok(report);
        }

        let cert = self
            .prover
            .prove_termination(s)
            .map_err(|e| Precondition::NotTerminating(e.reason))?;
        report.termination = Some(cert);
        let failed = self.run(&mut report, &obls, s, &pp, s);
        if report.holds || !criterion.uses_p_prime() {
            return Ok(report);
        }
        self.infer_p_prime(&mut report, &failed, s, &pp);
        Ok(report)
    }

    /// Searches joins for all obligations; fills evidence and failures and
    /// returns the indices of the failed obligations.
    fn run<'o>(
        &self,
        report: &mut CriterionReport,
        obls: &'o [Obligation],
        s: &Trs,
        pp: &Trs,
        scope: &Trs,
    ) -> Vec<&'o Obligation> {
        let mut failed = Vec::new();
        for o in obls {
            match self.discharge(o, s, pp, scope) {
                Some(ev) => report.evidence.push(ev),
                None => failed.push(o),
            }
        }
        report.failures = failed.iter().map(|o| failing_pair(o, s)).collect();
        report.holds = failed.is_empty();
        failed
    }

    fn discharge(&self, o: &Obligation, s: &Trs, pp: &Trs, scope: &Trs) -> Option<PairEvidence> {
        let shape = o.shape.as_ref()?;
        let ctx = SearchCtx {
            s,
            pp,
            scope,
            depth: self.opts.depth,
            max_nodes: self.opts.max_nodes,
        };
        let witness = find_join(o.pair.left(), o.pair.right(), shape, &ctx)?;
        Some(PairEvidence {
            condition: o.condition,
            left: o.pair.left().clone(),
            right: o.pair.right().clone(),
            var_set: o.pair.var_set().cloned(),
            witness,
        })
    }

    /// Retries the failed obligations with all of `P ∪ P⁻¹` available, then
    /// looks for the smallest subset of the rules used that gives both the
    /// joins and a relative termination proof.
    fn infer_p_prime(
        &self,
        report: &mut CriterionReport,
        failed: &[&Obligation],
        s: &Trs,
        pp: &Trs,
    ) {
        let full = s.union(pp);
        let mut found = Vec::new();
        for o in failed {
            match self.discharge(o, s, pp, &full) {
                Some(ev) => found.push(ev),
                None => return,
            }
        }
        let mut used = Trs::empty();
        for ev in &found {
            for r in ev.witness.non_s_rules(s) {
                if !used.contains_variant(&r) {
                    used.push(pp.find_variant(&r).cloned().unwrap_or(r));
                }
            }
        }
        // smallest P′ first; the full set of used rules needs no new search
        if used.len() <= self.opts.max_subset_rules {
            for size in 1..used.len() {
                for subset in subsets(&used, size) {
                    let Ok(cert) = self.prover.prove_relative(s, &subset) else {
                        continue;
                    };
                    let scope = s.union(&subset);
                    let evs: Option<Vec<PairEvidence>> = failed
                        .iter()
                        .map(|o| self.discharge(o, s, pp, &scope))
                        .collect();
                    if let Some(evs) = evs {
                        self.accept(report, evs, subset, cert);
                        return;
                    }
                }
            }
        }
        if let Ok(cert) = self.prover.prove_relative(s, &used) {
            self.accept(report, found, used, cert);
            return;
        }
        report.note = Some(format!(
            "joins exist using {{{}}} but no relative termination proof was found",
            used.labels().join(", ")
        ));
    }

    fn accept(
        &self,
        report: &mut CriterionReport,
        evidence: Vec<PairEvidence>,
        p_prime: Trs,
        cert: TerminationCertificate,
    ) {
        report.evidence.extend(evidence);
        report.p_prime = p_prime;
        report.termination = Some(cert);
        report.failures.clear();
        report.holds = true;
    }
}

fn subsets(rules: &Trs, size: usize) -> Vec<Trs> {
    fn go(rules: &[Rule], size: usize, cur: &mut Vec<Rule>, out: &mut Vec<Trs>) {
        if cur.len() == size {
            out.push(Trs::new(cur.clone()));
            return;
        }
        for (i, r) in rules.iter().enumerate() {
            cur.push(r.clone());
            go(&rules[i + 1..], size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(rules.rules(), size, &mut Vec::new(), &mut out);
    out
}

fn failing_pair(o: &Obligation, s: &Trs) -> FailingPair {
    let u = o.pair.left();
    let v = o.pair.right();
    let u_hat = normalize(u, s, NORMALIZE_FUEL).unwrap_or_else(|_| u.clone());
    let v_hat = normalize(v, s, NORMALIZE_FUEL).unwrap_or_else(|_| v.clone());
    FailingPair {
        condition: o.condition,
        pair: o.pair.clone(),
        v_normal: v_hat == *v,
        u_hat,
        v_hat,
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} (P' = {{{}}})",
            self.criterion,
            if self.holds { "holds" } else { "not shown" },
            self.p_prime.labels().join(", ")
        )?;
        for ev in &self.evidence {
            writeln!(
                f,
                "  ({}) <{}, {}> {}",
                ev.condition, ev.left, ev.right, ev.witness
            )?;
        }
        for fp in &self.failures {
            writeln!(
                f,
                "  ({}) {} fails; normal forms {} and {}",
                fp.condition, fp.pair, fp.u_hat, fp.v_hat
            )?;
        }
        if let Some(n) = &self.note {
            writeln!(f, "  {n}")?;
        }
        Ok(())
    }
}
