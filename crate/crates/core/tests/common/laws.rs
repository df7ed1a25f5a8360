//! Laws of unification and matching, checked on random terms. Each check
//! returns the first counterexample.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen;
use confluence::terms::{match_term, unify, Substitution, Term, Var};

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const POOL: [u32; 3] = [0, 1, 2];

fn ground_terms() -> Vec<Term> {
    let mut shallow = vec![gen::a()];
    shallow.push(Term::app(gen::g(), vec![gen::a()]));
    shallow.push(Term::app(gen::f(), vec![gen::a(), gen::a()]));
    let mut out = shallow.clone();
    for s in &shallow {
        out.push(Term::app(gen::g(), vec![s.clone()]));
        for t in &shallow {
            out.push(Term::app(gen::f(), vec![s.clone(), t.clone()]));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Every assignment of `values` to `vars`.
fn assignments(vars: &[Var], values: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                values.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(v.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

fn vars_of(ts: &[&Term]) -> Vec<Var> {
    let set: BTreeSet<Var> = ts.iter().flat_map(|t| t.vars()).collect();
    set.into_iter().collect()
}

fn subterms(t: &Term) -> Vec<Term> {
    let mut out: Vec<Term> = t
        .positions()
        .iter()
        .map(|p| t.subterm_at(p).unwrap().clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn random_subst(rng: &mut ChaCha8Rng, vars: &[u32]) -> Substitution {
    let mut sub = Substitution::new();
    for i in POOL {
        if rng.gen_bool(0.8) {
            sub.insert(
                gen::var(i).as_var().unwrap().clone(),
                gen::term(rng, 2, vars),
            );
        }
    }
    sub
}

/// `r` with random subterms generalised to variables, consistently with `tau`.
fn generalise(rng: &mut ChaCha8Rng, r: &Term, tau: &mut Substitution) -> Term {
    if rng.gen_bool(0.3) {
        let v = gen::var(rng.gen_range(0..3));
        let var = v.as_var().unwrap().clone();
        match tau.get(&var) {
            Some(bound) if bound == r => return v,
            None => {
                tau.insert(var, r.clone());
                return v;
            }
            Some(_) => {}
        }
    }
    match r {
        Term::Var(_) => r.clone(),
        Term::App(f, args) => Term::app(
            f.clone(),
            args.iter().map(|a| generalise(rng, a, tau)).collect(),
        ),
    }
}

pub fn idempotent_and_sound(cases_wanted: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut unified, mut cases) = (0, 0);
    while unified < cases_wanted {
        let s = gen::term(&mut rng, 3, &POOL);
        let t = if rng.gen_bool(0.5) {
            random_subst(&mut rng, &POOL).apply(&s)
        } else {
            gen::term(&mut rng, 3, &POOL)
        };
        cases += 1;
        if let Some(sigma) = unify(&s, &t) {
            unified += 1;
            ensure!(sigma.is_idempotent(), "{s} =? {t}: {sigma} not idempotent");
            ensure!(
                sigma.apply(&s) == sigma.apply(&t),
                "{s} =? {t}: {sigma} does not unify"
            );
        }
    }
    ensure!(cases >= cases_wanted, "too few cases");
    Ok(())
}

pub fn most_general(cases: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..cases {
        // a common instance by construction
        let r = gen::term(&mut rng, 3, &[]);
        let mut tau = Substitution::new();
        let s = generalise(&mut rng, &r, &mut tau);
        let t = generalise(&mut rng, &r, &mut tau);
        let Some(sigma) = unify(&s, &t) else {
            return Err(format!("{s} and {t} have instance {r}"));
        };
        for v in vars_of(&[&s, &t]) {
            let x = Term::Var(v);
            ensure!(
                tau.apply(&sigma.apply(&x)) == tau.apply(&x),
                "{s} =? {t}: {sigma} vs {tau}"
            );
        }
    }
    Ok(())
}

pub fn ground_search_agrees(cases: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let ground = ground_terms();
    for _ in 0..cases {
        let s = gen::term(&mut rng, 2, &POOL);
        let t = gen::term(&mut rng, 2, &POOL);
        let vars = vars_of(&[&s, &t]);
        let ground_unifiers: Vec<Substitution> = assignments(&vars, &ground)
            .into_iter()
            .filter(|th| th.apply(&s) == th.apply(&t))
            .collect();
        match unify(&s, &t) {
            None => ensure!(
                ground_unifiers.is_empty(),
                "{s} =? {t} has a ground unifier"
            ),
            Some(sigma) => {
                // every unifier factors through the mgu
                for th in &ground_unifiers {
                    for v in &vars {
                        let x = Term::Var(v.clone());
                        ensure!(
                            th.apply(&sigma.apply(&x)) == th.apply(&x),
                            "{s} =? {t}: {th} is not an instance"
                        );
                    }
                }
                // grounding the mgu with a constant yields a unifier
                let all_a = Substitution::from_pairs(
                    vars_of(&[&sigma.apply(&s)])
                        .into_iter()
                        .map(|v| (v, gen::a())),
                );
                let ground_sigma = sigma.then(&all_a);
                ensure!(
                    ground_sigma.apply(&s) == ground_sigma.apply(&t),
                    "{s} =? {t}: grounded mgu"
                );
            }
        }
    }
    Ok(())
}

pub fn matcher_agrees(cases: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut positive, mut negative) = (0, 0);
    for _ in 0..cases {
        let p = gen::term(&mut rng, 2, &POOL);
        let subject = if rng.gen_bool(0.5) {
            random_subst(&mut rng, &[3, 4]).apply(&p)
        } else {
            gen::term(&mut rng, 3, &[0, 1, 3])
        };
        let vars = vars_of(&[&p]);
        let brute: Vec<Substitution> = assignments(&vars, &subterms(&subject))
            .into_iter()
            .filter(|th| th.apply(&p) == subject)
            .collect();
        match match_term(&p, &subject) {
            None => {
                negative += 1;
                ensure!(brute.is_empty(), "{p} matches {subject}");
            }
            Some(sigma) => {
                positive += 1;
                ensure!(sigma.apply(&p) == subject, "{p} vs {subject}: {sigma}");
                // matchers are unique on the pattern's variables
                ensure!(brute.len() == 1, "{p} vs {subject}: matchers not unique");
                ensure!(
                    sigma.restrict(&vars) == brute[0].restrict(&vars),
                    "{p} vs {subject}"
                );
            }
        }
    }
    ensure!(
        positive > cases / 10 && negative > cases / 10,
        "{positive} / {negative}"
    );
    Ok(())
}
