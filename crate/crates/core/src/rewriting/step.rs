use std::fmt;

use thiserror::Error;

use super::{Rule, Trs};
use crate::terms::{match_term, pairwise_parallel, Position, Substitution, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("normalization did not finish within {0} steps")]
    FuelExhausted(usize),
}

/// A single rewrite step `source →_{position, rule} target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    source: Term,
    target: Term,
    position: Position,
    rule: Rule,
    subst: Substitution,
}

impl Step {
    /// Rewrites `source` at `position` with `rule`, if the subterm there is an instance of the lhs.
    pub fn new(source: &Term, position: &Position, rule: &Rule) -> Option<Step> {
        let sub = source.subterm_at(position).ok()?;
        let subst = match_term(rule.lhs(), sub)?;
        let target = source.replace_at(position, subst.apply(rule.rhs())).ok()?;
        Some(Step {
            source: source.clone(),
            target,
            position: position.clone(),
            rule: rule.clone(),
            subst,
        })
    }

    pub fn source(&self) -> &Term {
        &self.source
    }

    pub fn target(&self) -> &Term {
        &self.target
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn subst(&self) -> &Substitution {
        &self.subst
    }

    /// Re-checks the step invariants from scratch.
    pub fn is_valid(&self) -> bool {
        let Ok(sub) = self.source.subterm_at(&self.position) else {
            return false;
        };
        if self.subst.apply(self.rule.lhs()) != *sub {
            return false;
        }
        self.source
            .replace_at(&self.position, self.subst.apply(self.rule.rhs()))
            .map_or(false, |t| t == self.target)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} →[{} @ {}] {}",
            self.source,
            self.rule.label(),
            self.position,
            self.target
        )
    }
}

/// Checks that consecutive steps connect and each step is valid.
pub fn sequence_is_valid(start: &Term, steps: &[Step]) -> bool {
    let mut cur = start;
    for s in steps {
        if s.source() != cur || !s.is_valid() {
            return false;
        }
        cur = s.target();
    }
    true
}

/// All one-step reducts, positions in pre-order and rules in order.
pub fn reducts(t: &Term, r: &Trs) -> Vec<Step> {
    let mut out = Vec::new();
    for p in t.positions_fun() {
        for rule in r {
            if let Some(step) = Step::new(t, &p, rule) {
                out.push(step);
            }
        }
    }
    out
}

fn innermost_redex(t: &Term, s: &Trs, here: &Position) -> Option<(Position, Rule)> {
    for (i, a) in t.args().iter().enumerate() {
        if let Some(found) = innermost_redex(a, s, &here.child(i + 1)) {
            return Some(found);
        }
    }
    if t.is_var() {
        return None;
    }
    s.iter()
        .find(|rule| match_term(rule.lhs(), t).is_some())
        .map(|rule| (here.clone(), rule.clone()))
}

/// Leftmost-innermost normalization returning the steps taken.
pub fn normalize_trace(t: &Term, s: &Trs, fuel: usize) -> Result<(Term, Vec<Step>), RewriteError> {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    while let Some((p, rule)) = innermost_redex(&cur, s, &Position::root()) {
        if steps.len() == fuel {
            return Err(RewriteError::FuelExhausted(fuel));
        }
        let step = Step::new(&cur, &p, &rule).expect("redex found by matching");
        cur = step.target().clone();
        steps.push(step);
    }
    Ok((cur, steps))
}

/// Leftmost-innermost normal form.
pub fn normalize(t: &Term, s: &Trs, fuel: usize) -> Result<Term, RewriteError> {
    normalize_trace(t, s, fuel).map(|(nf, _)| nf)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub position: Position,
    pub rule: Rule,
    pub subst: Substitution,
}

/// A parallel step `source ⇉ target`; an empty redex set is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelStep {
    source: Term,
    target: Term,
    redexes: Vec<Redex>,
}

impl ParallelStep {
    pub fn identity(t: &Term) -> ParallelStep {
        ParallelStep {
            source: t.clone(),
            target: t.clone(),
            redexes: Vec::new(),
        }
    }

    pub fn from_step(step: &Step) -> ParallelStep {
        ParallelStep {
            source: step.source().clone(),
            target: step.target().clone(),
            redexes: vec![Redex {
                position: step.position().clone(),
                rule: step.rule().clone(),
                subst: step.subst().clone(),
            }],
        }
    }

    /// Contracts the given redexes of `source` simultaneously.
    pub fn new(source: &Term, redexes: &[(Position, Rule)]) -> Option<ParallelStep> {
        let positions: Vec<Position> = redexes.iter().map(|(p, _)| p.clone()).collect();
        if !pairwise_parallel(&positions) {
            return None;
        }
        let mut out = Vec::new();
        let mut reps = Vec::new();
        for (p, rule) in redexes {
            let sub = source.subterm_at(p).ok()?;
            let subst = match_term(rule.lhs(), sub)?;
            reps.push((p.clone(), subst.apply(rule.rhs())));
            out.push(Redex {
                position: p.clone(),
                rule: rule.clone(),
                subst,
            });
        }
        let target = source.replace_parallel(&reps).ok()?;
        Some(ParallelStep {
            source: source.clone(),
            target,
            redexes: out,
        })
    }

    pub fn source(&self) -> &Term {
        &self.source
    }

    pub fn target(&self) -> &Term {
        &self.target
    }

    pub fn redexes(&self) -> &[Redex] {
        &self.redexes
    }

    pub fn positions(&self) -> Vec<Position> {
        self.redexes.iter().map(|r| r.position.clone()).collect()
    }

    pub fn is_valid(&self) -> bool {
        let positions = self.positions();
        if !pairwise_parallel(&positions) {
            return false;
        }
        let mut reps = Vec::new();
        for r in &self.redexes {
            let Ok(sub) = self.source.subterm_at(&r.position) else {
                return false;
            };
            if r.subst.apply(r.rule.lhs()) != *sub {
                return false;
            }
            reps.push((r.position.clone(), r.subst.apply(r.rule.rhs())));
        }
        self.source
            .replace_parallel(&reps)
            .map_or(false, |t| t == self.target)
    }

    fn shifted(mut self, i: usize) -> ParallelStep {
        for r in &mut self.redexes {
            r.position = Position::from_path(vec![i]).concat(&r.position);
        }
        self
    }
}

/// Decides `s ⇉_Q t` and returns a witness. Where both are possible, redexes
/// are placed as deep as possible, which also minimizes the variables below them.
pub fn parallel_step_exists(s: &Term, t: &Term, q: &Trs) -> Option<ParallelStep> {
    if s == t {
        return Some(ParallelStep::identity(s));
    }
    if let (Term::App(f, sa), Term::App(g, ta)) = (s, t) {
        if f == g {
            let mut redexes = Vec::new();
            let mut ok = true;
            for (i, (a, b)) in sa.iter().zip(ta.iter()).enumerate() {
                match parallel_step_exists(a, b, q) {
                    Some(ps) => redexes.extend(ps.shifted(i + 1).redexes),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Some(ParallelStep {
                    source: s.clone(),
                    target: t.clone(),
                    redexes,
                });
            }
        }
    }
    for rule in q {
        if let Some(step) = Step::new(s, &Position::root(), rule) {
            if step.target() == t {
                return Some(ParallelStep::from_step(&step));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_rule, parse_term};

    const VARS: &[&str] = &["x", "y", "z"];

    fn t(s: &str) -> Term {
        parse_term(s, VARS).unwrap()
    }

    fn trs(rules: &[(&str, &str)]) -> Trs {
        rules
            .iter()
            .map(|(l, r)| parse_rule(l, r, VARS).unwrap())
            .collect()
    }

    fn adds() -> Trs {
        trs(&[
            ("add1", "+(0,y) -> y"),
            ("add2", "+(s(x),y) -> s(+(x,y))"),
            ("add3", "+(x,0) -> x"),
            ("add4", "+(x,s(y)) -> s(+(x,y))"),
        ])
    }

    #[test]
    fn reducts_examples() {
        assert!(reducts(&t("y"), &trs(&[("add1", "+(0,y) -> y")])).is_empty());
        let c = trs(&[("C", "+(x,y) -> +(y,x)")]);
        let rs = reducts(&t("+(x,y)"), &c);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].target(), &t("+(y,x)"));
        assert!(rs[0].position().is_root());
        let ca = trs(&[
            ("C", "+(x,y) -> +(y,x)"),
            ("A", "+(+(x,y),z) -> +(x,+(y,z))"),
        ]);
        let rs = reducts(&t("+(x,+(y,z))"), &ca);
        assert!(rs.iter().any(|s| s.target() == &t("+(+(y,z),x)")));
        assert!(rs.iter().all(Step::is_valid));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&t("y"), &adds(), 100).unwrap(), t("y"));
        assert_eq!(normalize(&t("+(s(0),0)"), &adds(), 100).unwrap(), t("s(0)"));
        let s = trs(&[("add1", "+(0,y) -> y"), ("add2", "+(s(x),y) -> s(+(x,y))")]);
        assert_eq!(normalize(&t("+(0,+(y,z))"), &s, 100).unwrap(), t("+(y,z)"));
    }

    #[test]
    fn normalize_runs_out_of_fuel() {
        let looping = trs(&[("f", "f(x) -> f(f(x))")]);
        assert_eq!(
            normalize(&t("f(x)"), &looping, 5),
            Err(RewriteError::FuelExhausted(5))
        );
    }

    #[test]
    fn innermost_strategy_order() {
        let (_, steps) = normalize_trace(&t("+(+(0,0),s(0))"), &adds(), 100).unwrap();
        assert_eq!(steps[0].position().to_string(), "1");
    }

    #[test]
    fn parallel_examples() {
        let q = trs(&[("g", "g(x) -> h(x)")]);
        let w = parallel_step_exists(&t("f(g(x),g(y))"), &t("f(h(x),h(y))"), &q).unwrap();
        assert_eq!(
            w.positions()
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>(),
            ["1", "2"]
        );
        assert!(w.is_valid());
        let id = parallel_step_exists(&t("f(x,y)"), &t("f(x,y)"), &q).unwrap();
        assert!(id.redexes().is_empty());

        let p = trs(&[("ss2", "s(s(x)) -> s(x)")]).with_inverses();
        assert!(parallel_step_exists(&t("s(s(+(x,s(s(z)))))"), &t("s(+(x,s(z)))"), &p).is_none());
    }
}
