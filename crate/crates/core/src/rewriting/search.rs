use std::collections::HashMap;

use super::step::reducts;
use super::{Step, Trs};
use crate::terms::Term;

/// Default bound for reachability and conversion searches.
pub const DEFAULT_DEPTH: usize = 10;

/// Breadth-first exploration of the reduction graph from a set of roots.
///
/// Each root carries a prefix of steps already taken to reach it, so a search
/// of the shape `→_S ∘ →*_R` starts from the `S`-reducts with their steps.
#[derive(Clone, Debug)]
pub struct ReachSet {
    nodes: Vec<Node>,
    index: HashMap<Term, usize>,
    truncated: bool,
}

#[derive(Clone, Debug)]
struct Node {
    term: Term,
    depth: usize,
    link: Link,
}

#[derive(Clone, Debug)]
enum Link {
    Root(Vec<Step>),
    Parent(usize, Step),
}

impl ReachSet {
    /// Explores up to `depth` steps from every root, visiting at most `max_nodes` terms.
    pub fn explore(
        roots: Vec<(Term, Vec<Step>)>,
        r: &Trs,
        depth: usize,
        max_nodes: usize,
    ) -> ReachSet {
        let mut rs = ReachSet {
            nodes: Vec::new(),
            index: HashMap::new(),
            truncated: false,
        };
        for (t, prefix) in roots {
            if !rs.index.contains_key(&t) {
                rs.index.insert(t.clone(), rs.nodes.len());
                rs.nodes.push(Node {
                    term: t,
                    depth: 0,
                    link: Link::Root(prefix),
                });
            }
        }
        let mut next = 0;
        while next < rs.nodes.len() {
            let (term, d) = (rs.nodes[next].term.clone(), rs.nodes[next].depth);
            if d < depth {
                for step in reducts(&term, r) {
                    if rs.index.contains_key(step.target()) {
                        continue;
                    }
                    if rs.nodes.len() >= max_nodes {
                        rs.truncated = true;
                        break;
                    }
                    rs.index.insert(step.target().clone(), rs.nodes.len());
                    rs.nodes.push(Node {
                        term: step.target().clone(),
                        depth: d + 1,
                        link: Link::Parent(next, step),
                    });
                }
            }
            next += 1;
        }
        rs
    }

    pub fn from_term(t: &Term, r: &Trs, depth: usize, max_nodes: usize) -> ReachSet {
        Self::explore(vec![(t.clone(), Vec::new())], r, depth, max_nodes)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.nodes.iter().map(|n| &n.term)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }

    /// True if the node limit cut the exploration short.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// The steps from the root prefix to `t`, if `t` was reached.
    pub fn path_to(&self, t: &Term) -> Option<Vec<Step>> {
        let mut i = *self.index.get(t)?;
        let mut rev = Vec::new();
        loop {
            match &self.nodes[i].link {
                Link::Parent(p, step) => {
                    rev.push(step.clone());
                    i = *p;
                }
                Link::Root(prefix) => {
                    let mut out = prefix.clone();
                    out.extend(rev.into_iter().rev());
                    return Some(out);
                }
            }
        }
    }

    /// First term in breadth-first order satisfying `goal`.
    pub fn find(&self, goal: impl Fn(&Term) -> bool) -> Option<&Term> {
        self.nodes.iter().map(|n| &n.term).find(|t| goal(t))
    }
}

/// Shortest witness `s →≤depth_R t` with `goal(t)`.
pub fn reach_bounded(
    s: &Term,
    goal: impl Fn(&Term) -> bool,
    r: &Trs,
    depth: usize,
) -> Option<Vec<Step>> {
    // Search level by level so the goal is checked before the next level is built.
    let mut frontier = vec![s.clone()];
    let mut parent: HashMap<Term, Option<Step>> = HashMap::new();
    parent.insert(s.clone(), None);
    let path = |parent: &HashMap<Term, Option<Step>>, t: &Term| {
        let mut out = Vec::new();
        let mut cur = t.clone();
        while let Some(Some(step)) = parent.get(&cur) {
            out.push(step.clone());
            cur = step.source().clone();
        }
        out.reverse();
        out
    };
    if goal(s) {
        return Some(Vec::new());
    }
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &frontier {
            for step in reducts(t, r) {
                if parent.contains_key(step.target()) {
                    continue;
                }
                let target = step.target().clone();
                parent.insert(target.clone(), Some(step));
                if goal(&target) {
                    return Some(path(&parent, &target));
                }
                next.push(target);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    None
}

/// Witness of `s ↔≤depth_E t`, using each rule in both orientations where
/// the inverse is itself a rewrite rule.
pub fn conversion_bounded(s: &Term, t: &Term, e: &Trs, depth: usize) -> Option<Vec<Step>> {
    reach_bounded(s, |u| u == t, &e.with_inverses(), depth)
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

    fn ca() -> Trs {
        trs(&[
            ("C", "+(x,y) -> +(y,x)"),
            ("A", "+(+(x,y),z) -> +(x,+(y,z))"),
        ])
    }

    #[test]
    fn five_step_chain() {
        let goal = t("+(+(x,y),z)");
        let w = reach_bounded(&t("+(x,+(y,z))"), |u| *u == goal, &ca(), 5).unwrap();
        assert_eq!(w.len(), 5);
        assert!(super::super::step::sequence_is_valid(&t("+(x,+(y,z))"), &w));
        assert_eq!(w.last().unwrap().target(), &goal);
        assert!(reach_bounded(&t("+(x,+(y,z))"), |u| *u == goal, &ca(), 4).is_none());
    }

    #[test]
    fn reach_misc() {
        let r = trs(&[
            ("add1", "+(0,y) -> y"),
            ("add2", "+(s(x),y) -> s(+(x,y))"),
            ("C", "+(x,y) -> +(y,x)"),
            ("A", "+(+(x,y),z) -> +(x,+(y,z))"),
        ]);
        let goal = t("+(y,0)");
        assert!(reach_bounded(&t("y"), |u| *u == goal, &r, 10).is_none());
        let w = reach_bounded(
            &t("+(x,0)"),
            |u| *u == t("x"),
            &trs(&[("add3", "+(x,0) -> x")]),
            1,
        );
        assert_eq!(w.unwrap().len(), 1);
    }

    #[test]
    fn conversions() {
        assert_eq!(
            conversion_bounded(&t("x"), &t("x"), &ca(), 0),
            Some(Vec::new())
        );
        let w = conversion_bounded(&t("s(+(x,y))"), &t("s(+(y,x))"), &ca(), 1).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].rule().label(), "C");
        assert!(conversion_bounded(&t("0"), &t("s(0)"), &ca(), 10).is_none());
        let back = conversion_bounded(&t("+(x,+(y,z))"), &t("+(+(x,y),z)"), &ca(), 1).unwrap();
        assert_eq!(back[0].rule().label(), "A^-1");
    }

    #[test]
    fn reach_set_paths_replay() {
        let rs = ReachSet::from_term(&t("+(x,+(y,z))"), &ca(), 10, 10_000);
        assert!(!rs.truncated());
        assert_eq!(rs.len(), 12);
        for u in rs.terms() {
            let p = rs.path_to(u).unwrap();
            assert!(super::super::step::sequence_is_valid(&t("+(x,+(y,z))"), &p));
        }
    }
}
