//! First-order terms over a fixed-arity signature, positions, substitutions,
//! matching, unification and renaming.

mod position;
mod subst;
mod unify;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

pub use position::{pairwise_parallel, Position};
pub use subst::Substitution;
pub use unify::{
    canonical_form, is_variant, match_term, match_terms, rename_apart, rename_with_offset, unify,
    unify_all, Renaming,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol {
            name: Arc::from(name),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A variable. Identity is the numeric id; the name is only used for display.
#[derive(Clone, Debug)]
pub struct Var {
    id: u32,
    name: Arc<str>,
}

impl Var {
    pub fn new(id: u32, name: &str) -> Self {
        Var {
            id,
            name: Arc::from(name),
        }
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Same display name, different identity.
    pub fn with_id(&self, id: u32) -> Var {
        Var {
            id,
            name: self.name.clone(),
        }
    }

    pub fn with_name(&self, name: &str) -> Var {
        Var::new(self.id, name)
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {0} is not a valid position of the term")]
    InvalidPosition(Position),
    #[error("positions {0} and {1} are not parallel")]
    NonParallel(Position, Position),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Arc<[Term]>),
}

impl Term {
    pub fn var(id: u32, name: &str) -> Term {
        Term::Var(Var::new(id, name))
    }

    /// Panics if `args.len()` differs from the arity of `f`.
    pub fn app(f: Symbol, args: Vec<Term>) -> Term {
        assert_eq!(
            f.arity(),
            args.len(),
            "arity mismatch for symbol {}",
            f.name()
        );
        Term::App(f, args.into())
    }

    pub fn constant(name: &str) -> Term {
        Term::app(Symbol::new(name, 0), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Root symbol, `None` for variables.
    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn vars_in_order(&self) -> Vec<Var> {
        let mut out = Vec::new();
        collect_vars(self, &mut out);
        out
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.vars_in_order().into_iter().collect()
    }

    pub fn var_occurrences(&self) -> BTreeMap<Var, usize> {
        let mut m = BTreeMap::new();
        self.for_each_var(&mut |v| *m.entry(v.clone()).or_insert(0) += 1);
        m
    }

    fn for_each_var(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::App(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.var_occurrences().values().all(|&n| n == 1)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn max_var_id(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v.id),
            Term::App(_, args) => args.iter().filter_map(Term::max_var_id).max(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }

    /// All positions in pre-order (parents before children, left before right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&Position::root(), &mut |_, p| out.push(p.clone()));
        out
    }

    /// Positions of function symbols, `Pos_F`.
    pub fn positions_fun(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&Position::root(), &mut |t, p| {
            if !t.is_var() {
                out.push(p.clone())
            }
        });
        out
    }

    /// Positions of variables, `Pos_V`.
    pub fn positions_var(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&Position::root(), &mut |t, p| {
            if t.is_var() {
                out.push(p.clone())
            }
        });
        out
    }

    fn collect_positions(&self, here: &Position, f: &mut impl FnMut(&Term, &Position)) {
        f(self, here);
        for (i, a) in self.args().iter().enumerate() {
            a.collect_positions(&here.child(i + 1), f);
        }
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term, TermError> {
        let mut t = self;
        for &i in p.path() {
            t = t
                .args()
                .get(i - 1)
                .ok_or_else(|| TermError::InvalidPosition(p.clone()))?;
        }
        Ok(t)
    }

    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[usize], s: Term, full: &Position) -> Result<Term, TermError> {
            match path.split_first() {
                None => Ok(s),
                Some((&i, rest)) => match t {
                    Term::App(f, args) if i <= args.len() => {
                        let mut new_args: Vec<Term> = args.to_vec();
                        new_args[i - 1] = go(&args[i - 1], rest, s, full)?;
                        Ok(Term::App(f.clone(), new_args.into()))
                    }
                    _ => Err(TermError::InvalidPosition(full.clone())),
                },
            }
        }
        go(self, p.path(), s, p)
    }

    /// `t[s₁,…,s_n]_{p₁,…,p_n}` for pairwise parallel positions.
    pub fn replace_parallel(&self, reps: &[(Position, Term)]) -> Result<Term, TermError> {
        for (i, (p, _)) in reps.iter().enumerate() {
            for (q, _) in &reps[i + 1..] {
                if !p.is_parallel_to(q) {
                    return Err(TermError::NonParallel(p.clone(), q.clone()));
                }
            }
        }
        let mut t = self.clone();
        for (p, s) in reps {
            t = t.replace_at(p, s.clone())?;
        }
        Ok(t)
    }

    /// `V_P(t)`: variables occurring below any of the given positions.
    pub fn vars_below(&self, ps: &[Position]) -> Result<BTreeSet<Var>, TermError> {
        let mut out = BTreeSet::new();
        for p in ps {
            out.extend(self.subterm_at(p)?.vars());
        }
        Ok(out)
    }

    /// True if `s` occurs as a subterm (at any position).
    pub fn has_subterm(&self, s: &Term) -> bool {
        self == s || self.args().iter().any(|a| a.has_subterm(s))
    }

    /// Applies `f` to every variable occurrence.
    pub fn map_vars(&self, f: &impl Fn(&Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(g, args) => {
                Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }
}

fn collect_vars(t: &Term, out: &mut Vec<Var>) {
    match t {
        Term::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::App(_, args) => args.iter().for_each(|a| collect_vars(a, out)),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(g, args) => {
                write!(f, "{g}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}#{}", v.name, v.id),
            Term::App(g, args) => {
                write!(f, "{g}")?;
                if !args.is_empty() {
                    f.debug_list().entries(args.iter()).finish()?;
                }
                Ok(())
            }
        }
    }
}

/// Gives the variables of a group of terms distinct display names,
/// preferring the names they already carry. Ids are left unchanged.
pub fn disambiguate_names(terms: &[&Term]) -> Vec<Term> {
    let mut order = Vec::new();
    for t in terms {
        for v in t.vars_in_order() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    let mut used: HashMap<String, ()> = HashMap::new();
    let mut names: HashMap<u32, String> = HashMap::new();
    for v in &order {
        let base = v.name().to_string();
        let mut name = base.clone();
        let mut k = 1;
        while used.contains_key(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        used.insert(name.clone(), ());
        names.insert(v.id(), name);
    }
    terms
        .iter()
        .map(|t| t.map_vars(&|v| v.with_name(&names[&v.id()])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s, &["x", "y", "z", "w"]).unwrap()
    }

    fn pos(path: &[usize]) -> Position {
        Position::from_path(path.to_vec())
    }

    #[test]
    fn positions_of_variable_and_sum() {
        assert_eq!(t("x").positions(), vec![Position::root()]);
        let s = t("+(0,y)");
        assert_eq!(s.positions(), vec![Position::root(), pos(&[1]), pos(&[2])]);
        assert_eq!(s.positions_fun(), vec![Position::root(), pos(&[1])]);
        assert_eq!(s.positions_var(), vec![pos(&[2])]);
        assert_eq!(
            t("+(+(x,y),z)").positions_fun(),
            vec![Position::root(), pos(&[1])]
        );
    }

    #[test]
    fn subterm_and_replacement() {
        let s = t("+(+(x,y),z)");
        assert_eq!(s.subterm_at(&pos(&[1])).unwrap(), &t("+(x,y)"));
        assert_eq!(s.replace_at(&pos(&[1]), t("w")).unwrap(), t("+(w,z)"));
        assert!(matches!(
            s.subterm_at(&pos(&[3])),
            Err(TermError::InvalidPosition(_))
        ));
        assert!(s.replace_at(&pos(&[2, 1]), t("w")).is_err());
    }

    #[test]
    fn parallel_replacement() {
        let s = t("f(g(x),g(y))");
        let r = s
            .replace_parallel(&[(pos(&[1]), t("h(x)")), (pos(&[2]), t("h(y)"))])
            .unwrap();
        assert_eq!(r, t("f(h(x),h(y))"));
        assert!(matches!(
            s.replace_parallel(&[(pos(&[1]), t("x")), (pos(&[1, 1]), t("y"))]),
            Err(TermError::NonParallel(..))
        ));
    }

    #[test]
    fn vars_below_positions() {
        let s = t("f(g(x),g(y))");
        let vs = s.vars_below(&[pos(&[2])]).unwrap();
        assert_eq!(
            vs.into_iter()
                .map(|v| v.name().to_string())
                .collect::<Vec<_>>(),
            ["y"]
        );
        assert!(s.vars_below(&[]).unwrap().is_empty());
    }

    #[test]
    fn linearity_and_display() {
        assert!(t("+(x,y)").is_linear());
        assert!(!t("+(x,x)").is_linear());
        assert_eq!(t("+(s(x),0)").to_string(), "+(s(x),0)");
    }

    #[test]
    fn disambiguation_renames_clashing_names() {
        let a = Term::var(1, "x");
        let b = Term::var(2, "x");
        let f = Symbol::new("f", 2);
        let s = Term::app(f, vec![a, b]);
        let out = disambiguate_names(&[&s]);
        assert_eq!(out[0].to_string(), "f(x,x1)");
        assert_eq!(out[0], s);
    }
}
