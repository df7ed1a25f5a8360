//! Completeness oracle for critical pairs: random peaks on random systems
//! must be instances of an emitted (parallel) critical pair, or close by the
//! variable case.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen;
use confluence::critical_pairs::{cp, pcp_in};
use confluence::rewriting::{parallel_step_exists, ParallelStep, Rule, Step, Trs};
use confluence::terms::{match_terms, Position, Term};

fn redexes(t: &Term, r: &Trs) -> Vec<(Position, Rule)> {
    let mut out = Vec::new();
    for p in t.positions() {
        for rule in r {
            if Step::new(t, &p, rule).is_some() {
                out.push((p.clone(), rule.clone()));
            }
        }
    }
    out
}

fn rel(q: &Position, p: &Position) -> Position {
    p.strip_prefix(q).expect("below the outer redex")
}

/// `⟨u, v⟩` is an instance of `⟨left, right⟩` for some emitted pair.
fn covered<'a>(pairs: impl IntoIterator<Item = (&'a Term, &'a Term)>, u: &Term, v: &Term) -> bool {
    pairs
        .into_iter()
        .any(|(l, r)| match_terms(&[(l, u), (r, v)]).is_some())
}

#[derive(Default)]
pub struct Tally {
    pub peaks: usize,
    pub parallel: usize,
    pub variable_cases: usize,
    pub misses: Vec<String>,
}

fn check_system(rng: &mut ChaCha8Rng, r: &Trs, tally: &mut Tally) {
    let cps = cp(r, r);
    let pcps = if r.is_left_linear() {
        pcp_in(r, r)
    } else {
        Vec::new()
    };
    for _ in 0..40 {
        let term = gen::term(rng, 3, &[0, 1]);
        let all = redexes(&term, r);
        for (q, outer) in &all {
            let outer_step = Step::new(&term, q, outer).unwrap();
            let v = outer_step.target().subterm_at(q).unwrap().clone();
            let fun = outer.lhs().positions_fun();
            let below: Vec<&(Position, Rule)> =
                all.iter().filter(|(p, _)| q.is_prefix_of(p)).collect();

            // single-step peaks at function positions of the outer lhs
            for (p, inner) in &below {
                let rp = rel(q, p);
                if !fun.contains(&rp) || (rp.is_root() && inner.is_variant_of(outer)) {
                    continue;
                }
                tally.peaks += 1;
                let u = Step::new(&term, p, inner)
                    .unwrap()
                    .target()
                    .subterm_at(q)
                    .unwrap()
                    .clone();
                if !covered(cps.iter().map(|c| (&c.left, &c.right)), &u, &v) {
                    tally
                        .misses
                        .push(format!("cp: {term} at {q:?} by {inner} / {outer}"));
                }
            }

            if !r.is_left_linear() {
                continue;
            }
            // parallel peaks strictly below the outer redex
            let strict: Vec<&(Position, Rule)> =
                below.iter().copied().filter(|(p, _)| p != q).collect();
            if strict.is_empty() {
                continue;
            }
            let mut chosen: Vec<(Position, Rule)> = Vec::new();
            let mut pool = strict.clone();
            pool.shuffle(rng);
            for (p, rule) in pool {
                if chosen.iter().all(|(c, _)| c.is_parallel_to(p)) && rng.gen_bool(0.7) {
                    chosen.push((p.clone(), rule.clone()));
                }
            }
            if chosen.is_empty() {
                continue;
            }
            tally.parallel += 1;
            let sub = term.subterm_at(q).unwrap();
            let (on_fun, on_var): (Vec<(Position, Rule)>, Vec<(Position, Rule)>) = chosen
                .iter()
                .map(|(p, rule)| (rel(q, p), rule.clone()))
                .partition(|(p, _)| fun.contains(p));
            if !on_fun.is_empty() {
                let u = ParallelStep::new(sub, &on_fun).unwrap().target().clone();
                if !covered(pcps.iter().map(|c| (&c.left, &c.right)), &u, &v) {
                    tally
                        .misses
                        .push(format!("pcp: {term} at {q:?} by {on_fun:?} / {outer}"));
                }
            }
            if !on_var.is_empty() {
                // variable case: the outer rule still applies and the
                // copies of the redexes are contracted in parallel
                tally.variable_cases += 1;
                let u = ParallelStep::new(sub, &on_var).unwrap().target().clone();
                let closed = Step::new(&u, &Position::root(), outer)
                    .is_some_and(|w| parallel_step_exists(&v, w.target(), r).is_some());
                if !closed {
                    tally
                        .misses
                        .push(format!("var: {term} at {q:?} by {on_var:?} / {outer}"));
                }
            }
        }
    }
}

/// Generates systems until at least `min` single and `min` parallel peaks were checked.
pub fn run(seed: u64, min: usize) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let mut systems = 0;
    while tally.peaks < min || tally.parallel < min {
        let n = rng.gen_range(2..=4);
        let r = gen::trs(&mut rng, n, systems % 2 == 0);
        check_system(&mut rng, &r, &mut tally);
        systems += 1;
        assert!(systems < 20_000, "too few peaks generated");
    }
    tally
}
