use std::collections::BTreeSet;
use std::fmt;

use crate::rewriting::{parallel_step_exists, reducts, ParallelStep, ReachSet, Rule, Step, Trs};
use crate::terms::{Term, Var};

/// How one side of a join may rewrite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `→*` in the scope.
    Star,
    /// Empty, or an `S` step followed by `→*` in the scope.
    EmptyOrS,
    /// An `S` step followed by `→*` in the scope.
    SPlus,
}

impl Side {
    fn allows_empty(self) -> bool {
        !matches!(self, Side::SPlus)
    }

    fn first_is_s(self) -> bool {
        !matches!(self, Side::Star)
    }
}

/// The relation allowed between the two meeting points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MiddleKind {
    /// Identity or one `P ∪ P⁻¹` step.
    AtMostOne,
    /// A parallel `P ∪ P⁻¹` step; with a variable set `X`, the variables of
    /// the left meeting point below the redex positions must lie in `X`.
    Parallel(Option<BTreeSet<Var>>),
    /// Any number of `P ∪ P⁻¹` steps.
    Conversion,
}

/// The shape `u →ᴸ u′ ~ v′ ←ᴿ v` required for one critical pair condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub left: Side,
    pub middle: MiddleKind,
    pub right: Side,
}

/// The middle part of a join, oriented from the left meeting point to the right one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Middle {
    Identity,
    Step(Step),
    Parallel(ParallelStep),
    Conversion(Vec<Step>),
}

/// `u →* u′`, a middle from `u′` to `v′`, and `v →* v′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinWitness {
    pub left: Vec<Step>,
    pub middle: Middle,
    pub right: Vec<Step>,
}

impl JoinWitness {
    /// Rules of the `→*` segments that are not `S` rules.
    pub fn non_s_rules(&self, s: &Trs) -> Vec<Rule> {
        self.left
            .iter()
            .chain(self.right.iter())
            .map(|st| st.rule())
            .filter(|r| !s.contains_variant(r))
            .cloned()
            .collect()
    }

    /// Checks every step and the exact shape against the given rule sets.
    pub fn check(
        &self,
        u: &Term,
        v: &Term,
        shape: &Shape,
        s: &Trs,
        pp: &Trs,
        scope: &Trs,
    ) -> Result<(), String> {
        let u2 =
            check_side(u, &self.left, shape.left, s, scope).map_err(|e| format!("left: {e}"))?;
        let v2 =
            check_side(v, &self.right, shape.right, s, scope).map_err(|e| format!("right: {e}"))?;
        match (&self.middle, &shape.middle) {
            (Middle::Identity, MiddleKind::AtMostOne | MiddleKind::Conversion) => {
                if u2 != v2 {
                    return Err("meeting points differ".into());
                }
            }
            (Middle::Identity, MiddleKind::Parallel(_)) => {
                if u2 != v2 {
                    return Err("meeting points differ".into());
                }
            }
            (Middle::Step(st), MiddleKind::AtMostOne | MiddleKind::Conversion) => {
                check_steps(&u2, std::slice::from_ref(st), pp)?;
                if *st.target() != v2 {
                    return Err("middle step does not reach the right meeting point".into());
                }
            }
            (Middle::Step(st), MiddleKind::Parallel(x)) => {
                check_steps(&u2, std::slice::from_ref(st), pp)?;
                if *st.target() != v2 {
                    return Err("middle step does not reach the right meeting point".into());
                }
                check_var_condition(&u2, &[st.position().clone()], x)?;
            }
            (Middle::Parallel(ps), MiddleKind::Parallel(x)) => {
                if ps.source() != &u2 || ps.target() != &v2 || !ps.is_valid() {
                    return Err("invalid parallel step".into());
                }
                if ps.redexes().iter().any(|r| !pp.contains_variant(&r.rule)) {
                    return Err("parallel step uses a rule outside P ∪ P⁻¹".into());
                }
                check_var_condition(&u2, &ps.positions(), x)?;
            }
            (Middle::Conversion(steps), MiddleKind::Conversion) => {
                check_steps(&u2, steps, pp)?;
                let end = steps.last().map_or(&u2, |st| st.target());
                if *end != v2 {
                    return Err("conversion does not reach the right meeting point".into());
                }
            }
            _ => return Err("middle part has the wrong kind".into()),
        }
        Ok(())
    }
}

fn check_var_condition(
    u2: &Term,
    positions: &[crate::terms::Position],
    x: &Option<BTreeSet<Var>>,
) -> Result<(), String> {
    if let Some(x) = x {
        let below = u2.vars_below(positions).map_err(|e| e.to_string())?;
        if !below.is_subset(x) {
            return Err("variable condition violated".into());
        }
    }
    Ok(())
}

fn check_steps(start: &Term, steps: &[Step], rules: &Trs) -> Result<(), String> {
    let mut cur = start;
    for st in steps {
        if st.source() != cur || !st.is_valid() {
            return Err(format!("invalid step {st}"));
        }
        if !rules.contains_variant(st.rule()) {
            return Err(format!("rule {} not allowed here", st.rule()));
        }
        cur = st.target();
    }
    Ok(())
}

fn check_side(t: &Term, steps: &[Step], side: Side, s: &Trs, scope: &Trs) -> Result<Term, String> {
    if steps.is_empty() && !side.allows_empty() {
        return Err("at least one step required".into());
    }
    if side.first_is_s() {
        if let Some(first) = steps.first() {
            if !s.contains_variant(first.rule()) {
                return Err("first step must use S".into());
            }
        }
    }
    check_steps(t, steps, scope)?;
    Ok(steps.last().map_or(t, |st| st.target()).clone())
}

impl fmt::Display for JoinWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seg = |steps: &[Step]| -> String {
            steps
                .iter()
                .map(|s| s.rule().label().to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mid = match &self.middle {
            Middle::Identity => "=".to_string(),
            Middle::Step(s) => format!("<{}>", s.rule().label()),
            Middle::Parallel(p) => format!(
                "||{}||",
                p.redexes()
                    .iter()
                    .map(|r| r.rule.label().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Middle::Conversion(steps) => format!("<*{}*>", seg(steps)),
        };
        write!(f, "[{}] {} [{}]", seg(&self.left), mid, seg(&self.right))
    }
}

/// Bounds and rule sets for join searches.
pub struct SearchCtx<'a> {
    pub s: &'a Trs,
    pub pp: &'a Trs,
    pub scope: &'a Trs,
    pub depth: usize,
    pub max_nodes: usize,
}

/// Terms reachable on one side of a join, with their paths.
struct Candidates {
    own: Option<Term>,
    reach: Option<ReachSet>,
}

impl Candidates {
    fn build(t: &Term, side: Side, ctx: &SearchCtx) -> Candidates {
        if !side.first_is_s() {
            return Candidates {
                own: None,
                reach: Some(ReachSet::from_term(t, ctx.scope, ctx.depth, ctx.max_nodes)),
            };
        }
        let roots: Vec<(Term, Vec<Step>)> = reducts(t, ctx.s)
            .into_iter()
            .map(|st| (st.target().clone(), vec![st]))
            .collect();
        let reach = ReachSet::explore(roots, ctx.scope, ctx.depth.saturating_sub(1), ctx.max_nodes);
        Candidates {
            own: side.allows_empty().then(|| t.clone()),
            reach: Some(reach),
        }
    }

    fn terms(&self) -> Vec<&Term> {
        let mut out: Vec<&Term> = self.own.iter().collect();
        if let Some(r) = &self.reach {
            out.extend(r.terms().filter(|t| Some(*t) != self.own.as_ref()));
        }
        out
    }

    fn contains(&self, t: &Term) -> bool {
        self.own.as_ref() == Some(t) || self.reach.as_ref().is_some_and(|r| r.contains(t))
    }

    fn path(&self, t: &Term) -> Vec<Step> {
        if self.own.as_ref() == Some(t) {
            return Vec::new();
        }
        self.reach
            .as_ref()
            .and_then(|r| r.path_to(t))
            .expect("candidate term has a path")
    }
}

/// Inverts a step of a bidirectional rule.
pub fn invert_step(st: &Step) -> Option<Step> {
    let inv = st.rule().inverse()?;
    Step::new(st.target(), st.position(), &inv)
}

/// Searches a join of `u` and `v` of the given shape within the bounds.
pub fn find_join(u: &Term, v: &Term, shape: &Shape, ctx: &SearchCtx) -> Option<JoinWitness> {
    let left = Candidates::build(u, shape.left, ctx);
    let right = Candidates::build(v, shape.right, ctx);
    let lterms = left.terms();
    match &shape.middle {
        MiddleKind::AtMostOne => {
            for u2 in &lterms {
                if right.contains(u2) {
                    return Some(JoinWitness {
                        left: left.path(u2),
                        middle: Middle::Identity,
                        right: right.path(u2),
                    });
                }
            }
            for u2 in &lterms {
                for st in reducts(u2, ctx.pp) {
                    if right.contains(st.target()) {
                        let v2 = st.target().clone();
                        return Some(JoinWitness {
                            left: left.path(u2),
                            middle: Middle::Step(st),
                            right: right.path(&v2),
                        });
                    }
                }
            }
            None
        }
        MiddleKind::Parallel(x) => {
            let rterms = right.terms();
            for u2 in &lterms {
                for v2 in &rterms {
                    let Some(ps) = parallel_step_exists(u2, v2, ctx.pp) else {
                        continue;
                    };
                    if let Some(x) = x {
                        match u2.vars_below(&ps.positions()) {
                            Ok(below) if below.is_subset(x) => {}
                            _ => continue,
                        }
                    }
                    let middle = if ps.redexes().is_empty() {
                        Middle::Identity
                    } else {
                        Middle::Parallel(ps)
                    };
                    return Some(JoinWitness {
                        left: left.path(u2),
                        middle,
                        right: right.path(v2),
                    });
                }
            }
            None
        }
        MiddleKind::Conversion => {
            let roots: Vec<(Term, Vec<Step>)> = right
                .terms()
                .into_iter()
                .map(|t| (t.clone(), Vec::new()))
                .collect();
            let conv = ReachSet::explore(roots, ctx.pp, ctx.depth, ctx.max_nodes);
            for u2 in &lterms {
                if let Some(path) = conv.path_to(u2) {
                    // path runs from some right candidate v′ to u′
                    let v2 = path.first().map_or((*u2).clone(), |st| st.source().clone());
                    let forward: Option<Vec<Step>> = path.iter().rev().map(invert_step).collect();
                    let forward = forward?;
                    let middle = if forward.is_empty() {
                        Middle::Identity
                    } else {
                        Middle::Conversion(forward)
                    };
                    return Some(JoinWitness {
                        left: left.path(u2),
                        middle,
                        right: right.path(&v2),
                    });
                }
            }
            None
        }
    }
}
