//! Random terms and rules over the signature `f/2, g/1, a/0`.

use rand::seq::SliceRandom;
use rand::Rng;

use confluence::rewriting::{Rule, Trs};
use confluence::terms::{Symbol, Term, Var};

pub fn f() -> Symbol {
    Symbol::new("f", 2)
}

pub fn g() -> Symbol {
    Symbol::new("g", 1)
}

pub fn a() -> Term {
    Term::constant("a")
}

pub fn var(i: u32) -> Term {
    Term::var(i, ["x", "y", "z", "w"][i as usize % 4])
}

/// A term of depth at most `depth` with variables drawn from `vars`.
pub fn term<R: Rng>(rng: &mut R, depth: usize, vars: &[u32]) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return var(*vars.choose(rng).unwrap());
        }
        return a();
    }
    if rng.gen_bool(0.5) {
        Term::app(
            f(),
            vec![term(rng, depth - 1, vars), term(rng, depth - 1, vars)],
        )
    } else {
        Term::app(g(), vec![term(rng, depth - 1, vars)])
    }
}

/// A non-variable term of depth at most `depth`.
pub fn pattern<R: Rng>(rng: &mut R, depth: usize, vars: &[u32]) -> Term {
    loop {
        let t = term(rng, depth, vars);
        if !t.is_var() {
            return t;
        }
    }
}

/// Renames repeated variable occurrences apart, left to right.
pub fn linearize(t: &Term) -> Term {
    fn go(t: &Term, next: &mut u32) -> Term {
        match t {
            Term::Var(_) => {
                let v = var(*next);
                *next += 1;
                v
            }
            Term::App(s, args) => Term::app(s.clone(), args.iter().map(|a| go(a, next)).collect()),
        }
    }
    go(t, &mut 0)
}

pub fn rule<R: Rng>(rng: &mut R, label: &str, left_linear: bool) -> Rule {
    let mut lhs = pattern(rng, 2, &[0, 1, 2]);
    if left_linear {
        lhs = linearize(&lhs);
    }
    let vars: Vec<u32> = lhs.vars().iter().map(Var::id).collect();
    let rhs = term(rng, 2, &vars);
    Rule::new(label, lhs, rhs).expect("rhs variables come from the lhs")
}

pub fn trs<R: Rng>(rng: &mut R, n: usize, left_linear: bool) -> Trs {
    (0..n)
        .map(|i| rule(rng, &format!("r{i}"), left_linear))
        .collect()
}
