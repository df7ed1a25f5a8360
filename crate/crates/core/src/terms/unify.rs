use std::collections::{BTreeMap, HashMap};

use super::{disambiguate_names, Substitution, Term, Var};

/// A variable-to-variable bijection produced by renaming.
pub type Renaming = BTreeMap<Var, Var>;

/// Finds σ with `pattern σ = subject`. No occurs check: `x` matches `f(x)`.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    match_terms(&[(pattern, subject)])
}

/// Simultaneous matching of several pattern/subject pairs.
pub fn match_terms(pairs: &[(&Term, &Term)]) -> Option<Substitution> {
    let mut map: HashMap<Var, Term> = HashMap::new();
    for (p, s) in pairs {
        if !match_into(p, s, &mut map) {
            return None;
        }
    }
    Some(Substitution::from_pairs(map))
}

fn match_into(p: &Term, s: &Term, map: &mut HashMap<Var, Term>) -> bool {
    match p {
        Term::Var(v) => match map.get(v) {
            Some(bound) => bound == s,
            None => {
                map.insert(v.clone(), s.clone());
                true
            }
        },
        Term::App(f, pargs) => match s {
            Term::App(g, sargs) if f == g => pargs
                .iter()
                .zip(sargs.iter())
                .all(|(a, b)| match_into(a, b, map)),
            _ => false,
        },
    }
}

/// Most general unifier with occurs check. The result is idempotent.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    unify_all(&[(s.clone(), t.clone())])
}

/// Simultaneous unifier of a set of equations.
pub fn unify_all(eqs: &[(Term, Term)]) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    let mut work: Vec<(Term, Term)> = eqs.iter().rev().cloned().collect();
    while let Some((s, t)) = work.pop() {
        let s = sigma.apply(&s);
        let t = sigma.apply(&t);
        if s == t {
            continue;
        }
        match (&s, &t) {
            // Variable-variable equations bind the right-hand variable, so that
            // renamed-apart copies are mapped back onto the original names.
            (_, Term::Var(y)) => {
                if s.contains_var(y) {
                    return None;
                }
                sigma = sigma.then(&Substitution::from_pairs([(y.clone(), s.clone())]));
            }
            (Term::Var(x), _) => {
                if t.contains_var(x) {
                    return None;
                }
                sigma = sigma.then(&Substitution::from_pairs([(x.clone(), t.clone())]));
            }
            (Term::App(f, a), Term::App(g, b)) => {
                if f != g {
                    return None;
                }
                for (x, y) in a.iter().zip(b.iter()).rev() {
                    work.push((x.clone(), y.clone()));
                }
            }
        }
    }
    Some(sigma)
}

/// Shifts every variable id of `t` by `offset`, keeping display names.
pub fn rename_with_offset(t: &Term, offset: u32) -> Term {
    t.map_vars(&|v| v.with_id(v.id() + offset))
}

/// Renames `t` so that it shares no variable with `avoid`.
pub fn rename_apart(avoid: &[&Term], t: &Term) -> (Term, Renaming) {
    let offset = avoid
        .iter()
        .filter_map(|a| a.max_var_id())
        .max()
        .map_or(0, |m| m + 1);
    let renaming: Renaming = t
        .vars_in_order()
        .into_iter()
        .map(|v| {
            let w = v.with_id(v.id() + offset);
            (v, w)
        })
        .collect();
    (rename_with_offset(t, offset), renaming)
}

/// True if some variable bijection maps the first group onto the second.
pub fn is_variant(a: &[&Term], b: &[&Term]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: HashMap<Var, Var> = HashMap::new();
    let mut bwd: HashMap<Var, Var> = HashMap::new();
    a.iter()
        .zip(b.iter())
        .all(|(s, t)| variant_into(s, t, &mut fwd, &mut bwd))
}

fn variant_into(
    s: &Term,
    t: &Term,
    fwd: &mut HashMap<Var, Var>,
    bwd: &mut HashMap<Var, Var>,
) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => {
            let f = fwd.entry(x.clone()).or_insert_with(|| y.clone()).clone();
            let b = bwd.entry(y.clone()).or_insert_with(|| x.clone()).clone();
            f == *y && b == *x
        }
        (Term::App(f, a), Term::App(g, b)) => {
            f == g
                && a.iter()
                    .zip(b.iter())
                    .all(|(x, y)| variant_into(x, y, fwd, bwd))
        }
        _ => false,
    }
}

/// Renumbers the variables of a group of terms by left-to-right first
/// occurrence, starting at 0. Display names are kept where they do not clash.
pub fn canonical_form(terms: &[&Term]) -> Vec<Term> {
    let mut order: Vec<Var> = Vec::new();
    for t in terms {
        for v in t.vars_in_order() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    let ids: HashMap<Var, u32> = order
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i as u32))
        .collect();
    let renamed: Vec<Term> = terms
        .iter()
        .map(|t| t.map_vars(&|v| v.with_id(ids[v])))
        .collect();
    let refs: Vec<&Term> = renamed.iter().collect();
    disambiguate_names(&refs)
}
