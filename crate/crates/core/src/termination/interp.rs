use std::collections::BTreeMap;
use std::fmt;

use super::poly::Poly;
use super::Decrease;
use crate::rewriting::Rule;
use crate::terms::{Symbol, Term};

/// Polynomial interpretation over the carrier ℕ≥1. The polynomial of a
/// symbol of arity n uses the variables `x0 … x(n-1)` for its arguments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyInterpretation {
    map: BTreeMap<Symbol, Poly>,
}

impl PolyInterpretation {
    pub fn new(map: BTreeMap<Symbol, Poly>) -> Self {
        PolyInterpretation { map }
    }

    pub fn get(&self, f: &Symbol) -> Option<&Poly> {
        self.map.get(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Poly)> {
        self.map.iter()
    }

    /// `[t]` with term variables mapped to polynomial variables by id.
    pub fn interpret(&self, t: &Term) -> Option<Poly> {
        interpret_poly(&|f| self.map.get(f), t)
    }

    pub fn compare(&self, rule: &Rule) -> Option<Decrease> {
        Some(compare_polys(
            &self.interpret(rule.lhs())?,
            &self.interpret(rule.rhs())?,
        ))
    }

    /// Checks that every polynomial is monotone and maps ℕ≥1 into ℕ≥1.
    pub fn check_well_formed(&self) -> Result<(), String> {
        for (f, p) in &self.map {
            if !p.all_nonnegative() {
                return Err(format!("negative coefficient for {f}"));
            }
            let vars = p.vars();
            if vars.iter().any(|v| *v as usize >= f.arity()) {
                return Err(format!("interpretation of {f} mentions a non-argument"));
            }
            if vars.len() != f.arity() {
                return Err(format!("interpretation of {f} is not strictly monotone"));
            }
            if p.eval(&|_| 1) < 1 {
                return Err(format!("interpretation of {f} leaves the carrier"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PolyInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .map(|(s, p)| format!("[{}/{}] = {}", s.name(), s.arity(), p))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn interpret_poly<'a>(lookup: &impl Fn(&Symbol) -> Option<&'a Poly>, t: &Term) -> Option<Poly> {
    match t {
        Term::Var(v) => Some(Poly::var(v.id())),
        Term::App(f, args) => {
            let p = lookup(f)?;
            let inner: Vec<Poly> = args
                .iter()
                .map(|a| interpret_poly(lookup, a))
                .collect::<Option<_>>()?;
            Some(p.substitute(&|i| inner[i as usize].clone()))
        }
    }
}

fn compare_polys(l: &Poly, r: &Poly) -> Decrease {
    let diff = (l - r).shifted();
    if !diff.all_nonnegative() {
        Decrease::None
    } else if diff.constant_term() > 0 {
        Decrease::Strict
    } else {
        Decrease::Weak
    }
}

/// Candidate polynomials for a symbol, smallest first.
pub(crate) fn poly_options(f: &Symbol) -> Vec<Poly> {
    let n = f.arity();
    let mut out = Vec::new();
    if n == 0 {
        for c in 1..=4 {
            out.push(Poly::constant(c));
        }
        return out;
    }
    let coeff_choices: &[i64] = if n <= 3 { &[1, 2] } else { &[1] };
    let combos = coeff_choices.len().pow(n as u32);
    for k in 0..combos {
        // digit i of k in base |choices| selects the coefficient of x_i
        let mut rest = k;
        let mut terms: Vec<(Vec<u32>, i64)> = vec![(Vec::new(), 0); n];
        for i in (0..n).rev() {
            terms[i] = (vec![i as u32], coeff_choices[rest % coeff_choices.len()]);
            rest /= coeff_choices.len();
        }
        for d in 0..=3 {
            let mut t = terms.clone();
            t.push((Vec::new(), d));
            out.push(Poly::from_terms(t));
        }
    }
    if n == 2 {
        for c1 in 0..=1 {
            for c2 in 0..=1 {
                for d in 0..=2 {
                    out.push(Poly::from_terms([
                        (vec![0, 1], 1),
                        (vec![0], c1),
                        (vec![1], c2),
                        (vec![], d),
                    ]));
                }
            }
        }
    }
    out
}

pub type Matrix = [[i64; 2]; 2];
pub type Vector = [i64; 2];

const IDENTITY: Matrix = [[1, 0], [0, 1]];

/// `f(x₁,…,x_n) = M₁x₁ + … + M_nx_n + c` over ℕ².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFn {
    pub args: Vec<Matrix>,
    pub constant: Vector,
}

/// Two-dimensional matrix interpretation. A vector is greater than another if
/// its first component is strictly greater and the second is not smaller.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatrixInterpretation {
    map: BTreeMap<Symbol, MatrixFn>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct LinExpr {
    coef: BTreeMap<u32, Matrix>,
    constant: Vector,
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_vec(a: &Matrix, v: &Vector) -> Vector {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

impl MatrixInterpretation {
    pub fn new(map: BTreeMap<Symbol, MatrixFn>) -> Self {
        MatrixInterpretation { map }
    }

    pub fn get(&self, f: &Symbol) -> Option<&MatrixFn> {
        self.map.get(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &MatrixFn)> {
        self.map.iter()
    }

    fn interpret(&self, t: &Term) -> Option<LinExpr> {
        interpret_matrix(&|f| self.map.get(f), t)
    }

    pub fn compare(&self, rule: &Rule) -> Option<Decrease> {
        Some(compare_lin(
            &self.interpret(rule.lhs())?,
            &self.interpret(rule.rhs())?,
        ))
    }

    pub fn check_well_formed(&self) -> Result<(), String> {
        for (f, m) in &self.map {
            if m.args.len() != f.arity() {
                return Err(format!("wrong number of matrices for {f}"));
            }
            let nonneg = m.constant.iter().all(|c| *c >= 0)
                && m.args.iter().flatten().flatten().all(|c| *c >= 0);
            if !nonneg {
                return Err(format!("negative entry for {f}"));
            }
            if m.args.iter().any(|a| a[0][0] < 1) {
                return Err(format!("interpretation of {f} is not monotone"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for MatrixInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .map(|(s, m)| format!("[{}/{}] = {}", s.name(), s.arity(), format_matrix_fn(m)))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

pub(crate) fn format_matrix_fn(m: &MatrixFn) -> String {
    let mut parts: Vec<String> = m
        .args
        .iter()
        .map(|a| format!("{} {} {} {}", a[0][0], a[0][1], a[1][0], a[1][1]))
        .collect();
    parts.push(format!("{} {}", m.constant[0], m.constant[1]));
    parts.join(" | ")
}

pub(crate) fn parse_matrix_fn(text: &str) -> Option<MatrixFn> {
    let mut parts: Vec<Vec<i64>> = text
        .split('|')
        .map(|p| {
            p.split_whitespace()
                .map(|n| n.parse().ok())
                .collect::<Option<Vec<i64>>>()
        })
        .collect::<Option<_>>()?;
    let constant = parts.pop()?;
    if constant.len() != 2 || parts.iter().any(|p| p.len() != 4) {
        return None;
    }
    Some(MatrixFn {
        args: parts.iter().map(|p| [[p[0], p[1]], [p[2], p[3]]]).collect(),
        constant: [constant[0], constant[1]],
    })
}

fn interpret_matrix<'a>(
    lookup: &impl Fn(&Symbol) -> Option<&'a MatrixFn>,
    t: &Term,
) -> Option<LinExpr> {
    match t {
        Term::Var(v) => Some(LinExpr {
            coef: BTreeMap::from([(v.id(), IDENTITY)]),
            constant: [0, 0],
        }),
        Term::App(f, args) => {
            let m = lookup(f)?;
            let mut out = LinExpr {
                coef: BTreeMap::new(),
                constant: m.constant,
            };
            for (a, mi) in args.iter().zip(m.args.iter()) {
                let e = interpret_matrix(lookup, a)?;
                for (v, c) in &e.coef {
                    let prod = mat_mul(mi, c);
                    let slot = out.coef.entry(*v).or_insert([[0; 2]; 2]);
                    *slot = mat_add(slot, &prod);
                }
                let cv = mat_vec(mi, &e.constant);
                out.constant = [out.constant[0] + cv[0], out.constant[1] + cv[1]];
            }
            Some(out)
        }
    }
}

fn compare_lin(l: &LinExpr, r: &LinExpr) -> Decrease {
    for (v, rc) in &r.coef {
        let lc = l.coef.get(v).copied().unwrap_or([[0; 2]; 2]);
        for i in 0..2 {
            for j in 0..2 {
                if lc[i][j] < rc[i][j] {
                    return Decrease::None;
                }
            }
        }
    }
    if l.constant[0] < r.constant[0] || l.constant[1] < r.constant[1] {
        return Decrease::None;
    }
    if l.constant[0] > r.constant[0] {
        Decrease::Strict
    } else {
        Decrease::Weak
    }
}

pub(crate) fn matrix_options(f: &Symbol) -> Vec<MatrixFn> {
    let mut constants = Vec::new();
    for a in 0..=2 {
        for b in 0..=2 {
            constants.push([a, b]);
        }
    }
    let arg_choices: Vec<Vec<Matrix>> = if f.arity() == 2 {
        let mut ms = Vec::new();
        for a in 0..=1 {
            for b in 0..=1 {
                for c in 0..=1 {
                    ms.push([[1, a], [b, c]]);
                }
            }
        }
        let mut pairs = Vec::new();
        for m1 in &ms {
            for m2 in &ms {
                pairs.push(vec![*m1, *m2]);
            }
        }
        pairs
    } else {
        vec![vec![IDENTITY; f.arity()]]
    };
    let mut out = Vec::new();
    for args in &arg_choices {
        for c in &constants {
            out.push(MatrixFn {
                args: args.clone(),
                constant: *c,
            });
        }
    }
    out
}

/// Best interpretation found by depth-first search over per-symbol options.
///
/// Every rule must decrease weakly; the result maximizes the number of strictly
/// decreasing rules flagged `primary`, then the others. Returns `None` when no
/// assignment makes at least one rule strict.
pub(crate) struct Search<'a, I> {
    pub symbols: Vec<Symbol>,
    pub options: Vec<Vec<I>>,
    pub rules: &'a [(Rule, bool)],
    pub budget: usize,
}

pub(crate) struct Found<I> {
    pub assignment: BTreeMap<Symbol, I>,
    pub decreases: Vec<Decrease>,
}

impl<'a, I: Clone> Search<'a, I> {
    pub fn run(
        &self,
        compare: &dyn Fn(&BTreeMap<Symbol, I>, &Rule) -> Decrease,
    ) -> Option<Found<I>> {
        let index: BTreeMap<&Symbol, usize> = self
            .symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut check_at: Vec<Vec<usize>> = vec![Vec::new(); self.symbols.len()];
        for (k, (rule, _)) in self.rules.iter().enumerate() {
            let last = rule
                .symbols()
                .iter()
                .filter_map(|s| index.get(s))
                .copied()
                .max();
            check_at[last?].push(k);
        }
        let mut st = State {
            assigned: BTreeMap::new(),
            decs: vec![Decrease::None; self.rules.len()],
            best: None,
            best_score: (0, 0),
            nodes: 0,
            stop: false,
        };
        self.dfs(0, &check_at, compare, &mut st);
        st.best
    }

    fn dfs(
        &self,
        depth: usize,
        check_at: &[Vec<usize>],
        compare: &dyn Fn(&BTreeMap<Symbol, I>, &Rule) -> Decrease,
        st: &mut State<I>,
    ) {
        if depth == self.symbols.len() {
            let mut score = (0, 0);
            for (k, (_, primary)) in self.rules.iter().enumerate() {
                if st.decs[k] == Decrease::Strict {
                    if *primary {
                        score.0 += 1;
                    } else {
                        score.1 += 1;
                    }
                }
            }
            if score > st.best_score {
                st.best_score = score;
                st.best = Some(Found {
                    assignment: st.assigned.clone(),
                    decreases: st.decs.clone(),
                });
                let primaries = self.rules.iter().filter(|(_, p)| *p).count();
                if score.0 == primaries {
                    st.stop = true;
                }
            }
            return;
        }
        let f = &self.symbols[depth];
        for opt in &self.options[depth] {
            st.nodes += 1;
            if st.nodes > self.budget {
                st.stop = true;
            }
            if st.stop {
                return;
            }
            st.assigned.insert(f.clone(), opt.clone());
            let mut ok = true;
            for &k in &check_at[depth] {
                let d = compare(&st.assigned, &self.rules[k].0);
                st.decs[k] = d;
                if d == Decrease::None {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.dfs(depth + 1, check_at, compare, st);
            }
            st.assigned.remove(f);
        }
    }
}

struct State<I> {
    assigned: BTreeMap<Symbol, I>,
    decs: Vec<Decrease>,
    best: Option<Found<I>>,
    best_score: (usize, usize),
    nodes: usize,
    stop: bool,
}

pub(crate) fn compare_with_polys(assigned: &BTreeMap<Symbol, Poly>, rule: &Rule) -> Decrease {
    let lookup = |f: &Symbol| assigned.get(f);
    match (
        interpret_poly(&lookup, rule.lhs()),
        interpret_poly(&lookup, rule.rhs()),
    ) {
        (Some(l), Some(r)) => compare_polys(&l, &r),
        _ => Decrease::None,
    }
}

pub(crate) fn compare_with_matrices(
    assigned: &BTreeMap<Symbol, MatrixFn>,
    rule: &Rule,
) -> Decrease {
    let lookup = |f: &Symbol| assigned.get(f);
    match (
        interpret_matrix(&lookup, rule.lhs()),
        interpret_matrix(&lookup, rule.rhs()),
    ) {
        (Some(l), Some(r)) => compare_lin(&l, &r),
        _ => Decrease::None,
    }
}
