//! Rewrite rules, term rewriting systems, rewrite steps and bounded search.

mod search;
mod step;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::terms::{canonical_form, is_variant, rename_with_offset, Symbol, Term};

pub use search::{conversion_bounded, reach_bounded, ReachSet, DEFAULT_DEPTH};
pub use step::{
    normalize, normalize_trace, parallel_step_exists, reducts, sequence_is_valid, ParallelStep,
    Redex, RewriteError, Step,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("left-hand side of rule {0} is a variable")]
    LhsVariable(String),
    #[error("right-hand side of rule {label} has variables not in the left-hand side: {vars}")]
    ExtraRhsVariables { label: String, vars: String },
}

/// A rewrite rule `l → r` with `l` not a variable and `V(r) ⊆ V(l)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    lhs: Term,
    rhs: Term,
    label: Arc<str>,
}

pub const INVERSE_SUFFIX: &str = "^-1";

impl Rule {
    pub fn new(label: &str, lhs: Term, rhs: Term) -> Result<Rule, RuleError> {
        if lhs.is_var() {
            return Err(RuleError::LhsVariable(label.to_string()));
        }
        let lv = lhs.vars();
        let extra: Vec<String> = rhs
            .vars_in_order()
            .into_iter()
            .filter(|v| !lv.contains(v))
            .map(|v| v.name().to_string())
            .collect();
        if !extra.is_empty() {
            return Err(RuleError::ExtraRhsVariables {
                label: label.to_string(),
                vars: extra.join(" "),
            });
        }
        Ok(Rule {
            lhs,
            rhs,
            label: Arc::from(label),
        })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(&self, label: &str) -> Rule {
        Rule {
            label: Arc::from(label),
            ..self.clone()
        }
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    pub fn is_linear(&self) -> bool {
        self.lhs.is_linear() && self.rhs.is_linear()
    }

    /// `r → l` is also a rewrite rule.
    pub fn is_bidirectional(&self) -> bool {
        !self.rhs.is_var() && self.lhs.vars() == self.rhs.vars()
    }

    /// `r → l`, labelled `label^-1` (or the original label for an inverse).
    pub fn inverse(&self) -> Option<Rule> {
        if !self.is_bidirectional() {
            return None;
        }
        let label = match self.label.strip_suffix(INVERSE_SUFFIX) {
            Some(base) => base.to_string(),
            None => format!("{}{INVERSE_SUFFIX}", self.label),
        };
        Some(Rule {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            label: Arc::from(label.as_str()),
        })
    }

    /// Equal modulo renaming of variables (labels ignored).
    pub fn is_variant_of(&self, other: &Rule) -> bool {
        is_variant(&[&self.lhs, &self.rhs], &[&other.lhs, &other.rhs])
    }

    pub fn max_var_id(&self) -> Option<u32> {
        self.lhs.max_var_id()
    }

    pub fn rename_with_offset(&self, offset: u32) -> Rule {
        Rule {
            lhs: rename_with_offset(&self.lhs, offset),
            rhs: rename_with_offset(&self.rhs, offset),
            label: self.label.clone(),
        }
    }

    /// Variables renumbered from 0 by first occurrence.
    pub fn canonical(&self) -> Rule {
        let c = canonical_form(&[&self.lhs, &self.rhs]);
        Rule {
            lhs: c[0].clone(),
            rhs: c[1].clone(),
            label: self.label.clone(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.lhs.symbols();
        s.extend(self.rhs.symbols());
        s
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A finite ordered set of rewrite rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trs {
    rules: Vec<Rule>,
}

impl Trs {
    pub fn new(rules: Vec<Rule>) -> Trs {
        Trs { rules }
    }

    pub fn empty() -> Trs {
        Trs::default()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn push(&mut self, rule: Rule) {
        self.rules.push(rule);
    }

    pub fn get(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label() == label)
    }

    pub fn find_variant(&self, rule: &Rule) -> Option<&Rule> {
        self.rules.iter().find(|r| r.is_variant_of(rule))
    }

    pub fn contains_variant(&self, rule: &Rule) -> bool {
        self.find_variant(rule).is_some()
    }

    /// Rules of `self` followed by the rules of `other` that are not variants of earlier ones.
    pub fn union(&self, other: &Trs) -> Trs {
        let mut out = Trs::empty();
        for r in self.rules.iter().chain(other.rules.iter()) {
            if !out.contains_variant(r) {
                out.push(r.clone());
            }
        }
        out
    }

    /// Rules of `self` with no variant in `other`.
    pub fn minus(&self, other: &Trs) -> Trs {
        Trs::new(
            self.rules
                .iter()
                .filter(|r| !other.contains_variant(r))
                .cloned()
                .collect(),
        )
    }

    /// `R⁻¹`, if every rule is bidirectional.
    pub fn inverse(&self) -> Option<Trs> {
        self.rules
            .iter()
            .map(Rule::inverse)
            .collect::<Option<Vec<_>>>()
            .map(Trs::new)
    }

    /// `R ∪ R⁻¹` modulo renaming; rules that are not bidirectional contribute only themselves.
    pub fn with_inverses(&self) -> Trs {
        let mut out = Trs::empty();
        for r in &self.rules {
            if !out.contains_variant(r) {
                out.push(r.clone());
            }
        }
        for r in &self.rules {
            if let Some(inv) = r.inverse() {
                if !out.contains_variant(&inv) {
                    out.push(inv);
                }
            }
        }
        out
    }

    pub fn signature(&self) -> BTreeSet<Symbol> {
        self.rules.iter().flat_map(Rule::symbols).collect()
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_left_linear)
    }

    pub fn is_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_linear)
    }

    pub fn is_bidirectional(&self) -> bool {
        self.rules.iter().all(Rule::is_bidirectional)
    }

    /// Set equality modulo renaming.
    pub fn same_rules(&self, other: &Trs) -> bool {
        self.rules.iter().all(|r| other.contains_variant(r))
            && other.rules.iter().all(|r| self.contains_variant(r))
    }

    /// Order-independent key identifying the rule set modulo renaming.
    pub fn canonical_key(&self) -> Vec<(Term, Term)> {
        let mut key: Vec<(Term, Term)> = self
            .rules
            .iter()
            .map(|r| {
                let c = r.canonical();
                (c.lhs, c.rhs)
            })
            .collect();
        key.sort();
        key.dedup();
        key
    }

    pub fn labels(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.label().to_string()).collect()
    }
}

impl FromIterator<Rule> for Trs {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        Trs::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Trs {
    type Item = &'a Rule;
    type IntoIter = std::slice::Iter<'a, Rule>;
    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}: {}", r.label(), r)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_rule;

    fn rule(label: &str, text: &str) -> Rule {
        parse_rule(label, text, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn rule_conditions() {
        let x = Term::var(0, "x");
        let zero = Term::constant("0");
        assert!(matches!(
            Rule::new("bad", x.clone(), zero.clone()),
            Err(RuleError::LhsVariable(_))
        ));
        assert!(matches!(
            Rule::new("bad", zero, x),
            Err(RuleError::ExtraRhsVariables { .. })
        ));
    }

    #[test]
    fn bidirectional_and_inverse() {
        let c = rule("C", "+(x,y) -> +(y,x)");
        assert!(c.is_bidirectional());
        assert!(c.inverse().unwrap().is_variant_of(&c));
        let add1 = rule("add1", "+(0,y) -> y");
        assert!(!add1.is_bidirectional());
        let a = rule("A", "+(+(x,y),z) -> +(x,+(y,z))");
        let ai = a.inverse().unwrap();
        assert_eq!(ai.label(), "A^-1");
        assert_eq!(ai.inverse().unwrap().label(), "A");
    }

    #[test]
    fn inverses_are_deduplicated() {
        let p = Trs::new(vec![
            rule("C", "+(x,y) -> +(y,x)"),
            rule("A", "+(+(x,y),z) -> +(x,+(y,z))"),
        ]);
        let pp = p.with_inverses();
        assert_eq!(pp.labels(), ["C", "A", "A^-1"]);
    }

    #[test]
    fn canonical_key_ignores_order_and_names() {
        let a = Trs::new(vec![rule("1", "+(x,y) -> +(y,x)"), rule("2", "s(x) -> x")]);
        let b = Trs::new(vec![rule("q", "s(y) -> y"), rule("p", "+(y,x) -> +(x,y)")]);
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert!(a.same_rules(&b));
    }
}
