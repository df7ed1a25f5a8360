use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::rewriting::Rule;
use crate::terms::{Symbol, Term};

/// Strict precedence given by ranks (higher is greater) with a lexicographic
/// status per symbol: the order in which arguments are compared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Precedence {
    ranks: BTreeMap<Symbol, u32>,
    status: BTreeMap<Symbol, Vec<usize>>,
}

impl Precedence {
    pub fn new(ranks: BTreeMap<Symbol, u32>, status: BTreeMap<Symbol, Vec<usize>>) -> Self {
        Precedence { ranks, status }
    }

    pub fn ranks(&self) -> &BTreeMap<Symbol, u32> {
        &self.ranks
    }

    pub fn statuses(&self) -> &BTreeMap<Symbol, Vec<usize>> {
        &self.status
    }

    /// `f > g`; symbols without a rank are incomparable.
    pub fn gt(&self, f: &Symbol, g: &Symbol) -> bool {
        matches!((self.ranks.get(f), self.ranks.get(g)), (Some(a), Some(b)) if a > b)
    }

    pub fn status(&self, f: &Symbol) -> Vec<usize> {
        self.status
            .get(f)
            .cloned()
            .unwrap_or_else(|| (0..f.arity()).collect())
    }

    /// Checks that every status is a permutation of the argument indices.
    pub fn check_well_formed(&self) -> Result<(), String> {
        for (f, perm) in &self.status {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..f.arity()).collect::<Vec<_>>() {
                return Err(format!("status of {f} is not a permutation"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Precedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut syms: Vec<(&Symbol, &u32)> = self.ranks.iter().collect();
        syms.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        let parts: Vec<String> = syms
            .iter()
            .map(|(s, r)| {
                let st = self.status(s);
                if st.iter().enumerate().all(|(i, j)| i == *j) {
                    format!("{}/{}:{}", s.name(), s.arity(), r)
                } else {
                    let st: Vec<String> = st.iter().map(|i| (i + 1).to_string()).collect();
                    format!("{}/{}:{}[{}]", s.name(), s.arity(), r, st.join(","))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `s >_lpo t`.
pub fn lpo_gt(prec: &Precedence, s: &Term, t: &Term) -> bool {
    let Term::App(f, ss) = s else {
        return false;
    };
    if let Term::Var(x) = t {
        return s.contains_var(x);
    }
    if ss.iter().any(|si| si == t || lpo_gt(prec, si, t)) {
        return true;
    }
    let Term::App(g, ts) = t else { unreachable!() };
    if prec.gt(f, g) {
        return ts.iter().all(|tj| lpo_gt(prec, s, tj));
    }
    if f == g {
        for i in prec.status(f) {
            if ss[i] != ts[i] {
                return lpo_gt(prec, &ss[i], &ts[i]) && ts.iter().all(|tj| lpo_gt(prec, s, tj));
            }
        }
    }
    false
}

fn statuses(f: &Symbol) -> Vec<Vec<usize>> {
    match f.arity() {
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
        n => vec![(0..n).collect()],
    }
}

/// Searches a total precedence (with statuses) orienting every rule strictly.
///
/// Symbols are placed from the top down; a rule is checked as soon as all of
/// its symbols are placed, which prunes most of the permutations.
pub fn find_precedence(rules: &[Rule], budget: usize) -> Option<Precedence> {
    let symbols: Vec<Symbol> = rules
        .iter()
        .flat_map(Rule::symbols)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let rule_syms: Vec<BTreeSet<Symbol>> = rules.iter().map(Rule::symbols).collect();
    let mut st = LpoSearch {
        symbols: &symbols,
        rules,
        rule_syms: &rule_syms,
        placed: Vec::new(),
        prec: Precedence::default(),
        nodes: 0,
        budget,
    };
    if st.dfs() {
        Some(st.prec)
    } else {
        None
    }
}

struct LpoSearch<'a> {
    symbols: &'a [Symbol],
    rules: &'a [Rule],
    rule_syms: &'a [BTreeSet<Symbol>],
    placed: Vec<Symbol>,
    prec: Precedence,
    nodes: usize,
    budget: usize,
}

impl LpoSearch<'_> {
    fn dfs(&mut self) -> bool {
        if self.placed.len() == self.symbols.len() {
            return true;
        }
        let rank = (self.symbols.len() - self.placed.len()) as u32;
        for f in self.symbols {
            if self.placed.contains(f) {
                continue;
            }
            for st in statuses(f) {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return false;
                }
                self.placed.push(f.clone());
                self.prec.ranks.insert(f.clone(), rank);
                self.prec.status.insert(f.clone(), st);
                let ok = self.rules.iter().zip(self.rule_syms).all(|(r, syms)| {
                    !syms.contains(f)
                        || !syms.iter().all(|g| self.placed.contains(g))
                        || lpo_gt(&self.prec, r.lhs(), r.rhs())
                });
                if ok && self.dfs() {
                    return true;
                }
                self.placed.pop();
                self.prec.ranks.remove(f);
                self.prec.status.remove(f);
            }
        }
        false
    }
}
