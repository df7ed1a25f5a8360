//! Critical pairs `CP(R,Q)` split into inner and outer pairs, and inner
//! parallel critical pairs `PCP_in(Q,R)` annotated with their variable set.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::rewriting::{ParallelStep, Rule, Step, Trs};
use crate::terms::{canonical_form, unify, unify_all, Position, Substitution, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CpKind {
    Inner,
    Outer,
}

/// `⟨l₂[r₁]_p σ, r₂σ⟩` from overlapping `inner_rule` on `outer_rule` at `position`.
#[derive(Clone, Debug)]
pub struct CriticalPair {
    pub left: Term,
    pub right: Term,
    pub peak: Term,
    pub inner_rule: Rule,
    pub outer_rule: Rule,
    pub position: Position,
    /// Unifier of the overlap, with its range renamed to the variables of `peak`.
    pub mgu: Substitution,
}

impl CriticalPair {
    pub fn kind(&self) -> CpKind {
        if self.position.is_root() {
            CpKind::Outer
        } else {
            CpKind::Inner
        }
    }

    /// The two steps of the peak: `peak → left` and `peak → right`.
    pub fn peak_steps(&self) -> Option<(Step, Step)> {
        let l = Step::new(&self.peak, &self.position, &self.inner_rule)?;
        let r = Step::new(&self.peak, &Position::root(), &self.outer_rule)?;
        Some((l, r))
    }

    /// Replays the peak and checks it reproduces both sides.
    pub fn replays(&self) -> bool {
        self.peak_steps()
            .is_some_and(|(l, r)| *l.target() == self.left && *r.target() == self.right)
    }

    /// Key identifying the pair `⟨left, right⟩` modulo renaming.
    pub fn key(&self) -> Vec<Term> {
        canonical_form(&[&self.left, &self.right])
    }
}

impl fmt::Display for CriticalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.left, self.right)
    }
}

/// Renames the variables of a group of terms canonically and returns the renaming.
pub(crate) fn canonical_renaming(terms: &[&Term]) -> (Vec<Term>, BTreeMap<Var, Var>) {
    let renamed = canonical_form(terms);
    let mut ren = BTreeMap::new();
    for (old, new) in terms.iter().zip(renamed.iter()) {
        for (a, b) in old.vars_in_order().into_iter().zip(new.vars_in_order()) {
            ren.insert(a, b);
        }
    }
    (renamed, ren)
}

fn as_subst(ren: &BTreeMap<Var, Var>) -> Substitution {
    Substitution::from_pairs(ren.iter().map(|(a, b)| (a.clone(), Term::Var(b.clone()))))
}

fn overlap(inner: &Rule, outer: &Rule, p: &Position) -> Option<CriticalPair> {
    let offset = outer.max_var_id().map_or(0, |m| m + 1);
    let inner_copy = inner.rename_with_offset(offset);
    let sub = outer.lhs().subterm_at(p).ok()?;
    let sigma = unify(sub, inner_copy.lhs())?;
    let peak = sigma.apply(outer.lhs());
    let left = sigma.apply(&outer.lhs().replace_at(p, inner_copy.rhs().clone()).ok()?);
    let right = sigma.apply(outer.rhs());
    let (c, ren) = canonical_renaming(&[&left, &right, &peak]);
    Some(CriticalPair {
        left: c[0].clone(),
        right: c[1].clone(),
        peak: c[2].clone(),
        inner_rule: inner.clone(),
        outer_rule: outer.clone(),
        position: p.clone(),
        mgu: sigma.then(&as_subst(&ren)),
    })
}

/// All critical pairs of `R` (inner rules) on `Q` (outer rules), deduplicated modulo renaming.
/// The overlap of a rule with itself at the root is excluded.
pub fn cp(r: &Trs, q: &Trs) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for outer in q {
        for p in outer.lhs().positions_fun() {
            for inner in r {
                if p.is_root() && inner.is_variant_of(outer) {
                    continue;
                }
                if let Some(pair) = overlap(inner, outer, &p) {
                    if seen.insert(pair.key()) {
                        out.push(pair);
                    }
                }
            }
        }
    }
    out
}

pub fn cp_in(r: &Trs, q: &Trs) -> Vec<CriticalPair> {
    cp(r, q)
        .into_iter()
        .filter(|c| c.kind() == CpKind::Inner)
        .collect()
}

pub fn cp_out(r: &Trs, q: &Trs) -> Vec<CriticalPair> {
    cp(r, q)
        .into_iter()
        .filter(|c| c.kind() == CpKind::Outer)
        .collect()
}

/// `⟨l′[r₁,…,r_n]_{p₁,…,p_n}σ, r′σ⟩_X` with `X = V_{p₁,…,p_n}(l′σ)`.
#[derive(Clone, Debug)]
pub struct ParallelCriticalPair {
    pub left: Term,
    pub right: Term,
    pub peak: Term,
    pub inner_rules: Vec<Rule>,
    pub outer_rule: Rule,
    pub positions: Vec<Position>,
    pub var_set: BTreeSet<Var>,
    pub mgu: Substitution,
}

impl ParallelCriticalPair {
    pub fn is_inner(&self) -> bool {
        self.positions.iter().all(|p| !p.is_root())
    }

    pub fn peak_steps(&self) -> Option<(ParallelStep, Step)> {
        let redexes: Vec<(Position, Rule)> = self
            .positions
            .iter()
            .cloned()
            .zip(self.inner_rules.iter().cloned())
            .collect();
        let l = ParallelStep::new(&self.peak, &redexes)?;
        let r = Step::new(&self.peak, &Position::root(), &self.outer_rule)?;
        Some((l, r))
    }

    pub fn replays(&self) -> bool {
        let Some((l, r)) = self.peak_steps() else {
            return false;
        };
        *l.target() == self.left
            && *r.target() == self.right
            && self.peak.vars_below(&self.positions).ok().as_ref() == Some(&self.var_set)
    }

    /// Key identifying `⟨left, right⟩_X` modulo renaming.
    pub fn key(&self) -> (Vec<Term>, Vec<u32>) {
        let (c, ren) = canonical_renaming(&[&self.left, &self.right, &self.peak]);
        let mut xs: Vec<u32> = self
            .var_set
            .iter()
            .filter_map(|v| ren.get(v).map(Var::id))
            .collect();
        xs.sort();
        (c[..2].to_vec(), xs)
    }
}

impl fmt::Display for ParallelCriticalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.var_set.iter().map(|v| v.name().to_string()).collect();
        write!(f, "⟨{}, {}⟩_{{{}}}", self.left, self.right, xs.join(","))
    }
}

/// Non-empty antichains of `ps` (pairwise parallel subsets), in a fixed order.
fn antichains(ps: &[Position]) -> Vec<Vec<Position>> {
    fn go(ps: &[Position], chosen: &mut Vec<Position>, out: &mut Vec<Vec<Position>>) {
        let Some((p, rest)) = ps.split_first() else {
            if !chosen.is_empty() {
                out.push(chosen.clone());
            }
            return;
        };
        if chosen.iter().all(|q| q.is_parallel_to(p)) {
            chosen.push(p.clone());
            go(rest, chosen, out);
            chosen.pop();
        }
        go(rest, chosen, out);
    }
    let mut out = Vec::new();
    go(ps, &mut Vec::new(), &mut out);
    out
}

fn parallel_overlap(
    inners: &[&Rule],
    outer: &Rule,
    ps: &[Position],
) -> Option<ParallelCriticalPair> {
    let mut next_free = outer.max_var_id().map_or(0, |m| m + 1);
    let mut copies = Vec::new();
    let mut eqs = Vec::new();
    for (rule, p) in inners.iter().zip(ps) {
        let copy = rule.rename_with_offset(next_free);
        next_free = copy
            .max_var_id()
            .map_or(next_free, |m| m.max(next_free) + 1);
        eqs.push((outer.lhs().subterm_at(p).ok()?.clone(), copy.lhs().clone()));
        copies.push(copy);
    }
    let sigma = unify_all(&eqs)?;
    let peak = sigma.apply(outer.lhs());
    let reps: Vec<(Position, Term)> = ps
        .iter()
        .cloned()
        .zip(copies.iter().map(|c| c.rhs().clone()))
        .collect();
    let left = sigma.apply(&outer.lhs().replace_parallel(&reps).ok()?);
    let right = sigma.apply(outer.rhs());
    let xs = peak.vars_below(ps).ok()?;
    let (c, ren) = canonical_renaming(&[&left, &right, &peak]);
    let var_set = xs.iter().filter_map(|v| ren.get(v).cloned()).collect();
    Some(ParallelCriticalPair {
        left: c[0].clone(),
        right: c[1].clone(),
        peak: c[2].clone(),
        inner_rules: inners.iter().map(|r| (*r).clone()).collect(),
        outer_rule: outer.clone(),
        positions: ps.to_vec(),
        var_set,
        mgu: sigma.then(&as_subst(&ren)),
    })
}

/// Inner parallel critical pairs of rules of `Q` overlapping rules of `R`.
pub fn pcp_in(q: &Trs, r: &Trs) -> Vec<ParallelCriticalPair> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for outer in r {
        let candidates: Vec<Position> = outer
            .lhs()
            .positions_fun()
            .into_iter()
            .filter(|p| !p.is_root())
            .collect();
        for ps in antichains(&candidates) {
            // Every assignment of a rule of Q to each chosen position.
            let mut choice = vec![0usize; ps.len()];
            if q.is_empty() {
                continue;
            }
            loop {
                let inners: Vec<&Rule> = choice.iter().map(|&i| &q.rules()[i]).collect();
                if let Some(pair) = parallel_overlap(&inners, outer, &ps) {
                    if seen.insert(pair.key()) {
                        out.push(pair);
                    }
                }
                let mut k = 0;
                while k < choice.len() {
                    choice[k] += 1;
                    if choice[k] < q.len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == choice.len() {
                    break;
                }
            }
        }
    }
    out
}
