//! Termination and relative termination with replayable certificates.
//!
//! Relative termination of `S` with respect to `P′` is proved by rule removal:
//! each stage finds a monotone well-founded order under which every remaining
//! rule of `S ∪ P′` decreases weakly and some rules decrease strictly; those
//! rules are dropped. The proof is complete once `S` is empty.

mod interp;
mod lpo;
mod poly;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::Mutex;

use thiserror::Error;

pub use interp::{Matrix, MatrixFn, MatrixInterpretation, PolyInterpretation, Vector};
pub use lpo::{find_precedence, lpo_gt, Precedence};
pub use poly::{parse_poly, Poly};

use interp::parse_matrix_fn;

use crate::rewriting::{Rule, Trs};
use crate::syntax::print_trs;
use crate::terms::{Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decrease {
    Strict,
    Weak,
    None,
}

/// The order used by one rule-removal stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Order {
    Lpo(Precedence),
    Poly(PolyInterpretation),
    Matrix(MatrixInterpretation),
    /// An external prover answered YES for the remaining problem.
    External(String),
}

impl Order {
    fn decrease(&self, rule: &Rule) -> Option<Decrease> {
        match self {
            Order::Lpo(prec) => Some(if lpo_gt(prec, rule.lhs(), rule.rhs()) {
                Decrease::Strict
            } else if rule.lhs() == rule.rhs() {
                Decrease::Weak
            } else {
                Decrease::None
            }),
            Order::Poly(p) => p.compare(rule),
            Order::Matrix(m) => m.compare(rule),
            Order::External(_) => None,
        }
    }

    fn check_well_formed(&self) -> Result<(), String> {
        match self {
            Order::Lpo(prec) => prec.check_well_formed(),
            Order::Poly(p) => p.check_well_formed(),
            Order::Matrix(m) => m.check_well_formed(),
            Order::External(_) => Ok(()),
        }
    }
}

fn parse_symbol(text: &str) -> Option<Symbol> {
    let (name, arity) = text.trim().rsplit_once('/')?;
    Some(Symbol::new(name, arity.parse().ok()?))
}

/// Entries `[f/n] = body` separated by `;`.
fn parse_entries<T>(text: &str, body: impl Fn(&str) -> Option<T>) -> Option<BTreeMap<Symbol, T>> {
    let mut map = BTreeMap::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (head, rest) = part.split_once('=')?;
        let head = head.trim().strip_prefix('[')?.strip_suffix(']')?;
        map.insert(parse_symbol(head)?, body(rest.trim())?);
    }
    Some(map)
}

fn parse_precedence(text: &str) -> Option<Precedence> {
    let mut ranks = BTreeMap::new();
    let mut status = BTreeMap::new();
    for item in text.split_whitespace() {
        let (sym, rest) = item.rsplit_once(':')?;
        let f = parse_symbol(sym)?;
        let (rank, perm) = match rest.split_once('[') {
            Some((r, p)) => {
                let perm: Vec<usize> = p
                    .strip_suffix(']')?
                    .split(',')
                    .map(|i| i.parse::<usize>().ok()?.checked_sub(1))
                    .collect::<Option<_>>()?;
                (r, Some(perm))
            }
            None => (rest, None),
        };
        ranks.insert(f.clone(), rank.parse().ok()?);
        if let Some(perm) = perm {
            status.insert(f, perm);
        }
    }
    Some(Precedence::new(ranks, status))
}

impl Order {
    /// Parses the `Display` form.
    pub fn parse(text: &str) -> Option<Order> {
        let (kind, rest) = text.trim().split_once(' ').unwrap_or((text.trim(), ""));
        match kind {
            "lpo" => parse_precedence(rest).map(Order::Lpo),
            "poly" => {
                parse_entries(rest, parse_poly).map(|m| Order::Poly(PolyInterpretation::new(m)))
            }
            "matrix" => parse_entries(rest, parse_matrix_fn)
                .map(|m| Order::Matrix(MatrixInterpretation::new(m))),
            "external" if !rest.trim().is_empty() => Some(Order::External(rest.trim().to_string())),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Lpo(p) => write!(f, "lpo {p}"),
            Order::Poly(p) => write!(f, "poly {p}"),
            Order::Matrix(m) => write!(f, "matrix {m}"),
            Order::External(cmd) => write!(f, "external {cmd}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub order: Order,
    /// Rules shown to decrease strictly, removed after this stage.
    pub strict: Vec<Rule>,
}

/// Proof that `S` terminates relative to `P′`. An empty stage list proves the
/// case `S = ∅`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TerminationCertificate {
    pub stages: Vec<Stage>,
}

impl TerminationCertificate {
    pub fn methods(&self) -> Vec<&'static str> {
        self.stages
            .iter()
            .map(|s| match s.order {
                Order::Lpo(_) => "lpo",
                Order::Poly(_) => "poly",
                Order::Matrix(_) => "matrix",
                Order::External(_) => "external",
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoProofReason {
    /// The left-hand side of this rule embeds in its right-hand side, so no
    /// simplification order orients it.
    Embedding(Rule),
    /// All engines ran to the end of their search space or budget.
    Exhausted,
}

/// "Unknown", never "nonterminating".
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no termination proof found: {reason:?}")]
pub struct NoProof {
    pub reason: NoProofReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("malformed order: {0}")]
    Malformed(String),
    #[error("external prover failed: {0}")]
    External(String),
}

/// Homeomorphic embedding `s ⊴ t`.
pub fn embeds(s: &Term, t: &Term) -> bool {
    match t {
        Term::Var(_) => s == t,
        Term::App(g, ts) => {
            ts.iter().any(|ti| embeds(s, ti))
                || matches!(s, Term::App(f, ss) if f == g
                    && ss.iter().zip(ts.iter()).all(|(a, b)| embeds(a, b)))
        }
    }
}

type CacheKey = (Vec<(Term, Term)>, Vec<(Term, Term)>);

/// Termination prover with a result cache keyed by the rule sets modulo renaming.
pub struct TerminationProver {
    external: Option<PathBuf>,
    budget: usize,
    cache: Mutex<HashMap<CacheKey, Result<TerminationCertificate, NoProof>>>,
}

impl Default for TerminationProver {
    fn default() -> Self {
        TerminationProver::new()
    }
}

impl TerminationProver {
    pub fn new() -> Self {
        TerminationProver {
            external: None,
            budget: 2_000_000,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Falls back to an external prover: the problem is written to its stdin
    /// in problem-file format (`->=` marks relative rules) and the first line
    /// of its output must be `YES`.
    pub fn with_external(mut self, path: Option<PathBuf>) -> Self {
        self.external = path;
        self
    }

    pub fn prove_termination(&self, s: &Trs) -> Result<TerminationCertificate, NoProof> {
        self.prove_relative(s, &Trs::empty())
    }

    pub fn prove_relative(&self, s: &Trs, p: &Trs) -> Result<TerminationCertificate, NoProof> {
        let key = (s.canonical_key(), p.canonical_key());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = self.search(s, p);
        self.cache.lock().unwrap().insert(key, result.clone());
        result
    }

    fn search(&self, s: &Trs, p: &Trs) -> Result<TerminationCertificate, NoProof> {
        let mut cs: Vec<Rule> = s.rules().to_vec();
        let mut cp: Vec<Rule> = p
            .rules()
            .iter()
            .filter(|r| !s.contains_variant(r))
            .cloned()
            .collect();
        let mut stages = Vec::new();
        while !cs.is_empty() {
            match self.stage(&cs, &cp) {
                Some(stage) => {
                    cs.retain(|r| !stage.strict.iter().any(|q| q.is_variant_of(r)));
                    cp.retain(|r| !stage.strict.iter().any(|q| q.is_variant_of(r)));
                    stages.push(stage);
                }
                None => {
                    if let Some(stage) = self.external_stage(&cs, &cp) {
                        stages.push(stage);
                        break;
                    }
                    let reason = cs
                        .iter()
                        .find(|r| embeds(r.lhs(), r.rhs()))
                        .map_or(NoProofReason::Exhausted, |r| {
                            NoProofReason::Embedding(r.clone())
                        });
                    return Err(NoProof { reason });
                }
            }
        }
        Ok(TerminationCertificate { stages })
    }

    fn stage(&self, cs: &[Rule], cp: &[Rule]) -> Option<Stage> {
        let all: Vec<Rule> = cs.iter().chain(cp.iter()).cloned().collect();
        if let Some(prec) = find_precedence(&all, self.budget) {
            return Some(Stage {
                order: Order::Lpo(prec),
                strict: all,
            });
        }
        let flagged: Vec<(Rule, bool)> = cs
            .iter()
            .map(|r| (r.clone(), true))
            .chain(cp.iter().map(|r| (r.clone(), false)))
            .collect();
        let symbols: Vec<_> = Trs::new(all.clone()).signature().into_iter().collect();
        let poly_search = interp::Search {
            options: symbols.iter().map(interp::poly_options).collect(),
            symbols: symbols.clone(),
            rules: &flagged,
            budget: self.budget,
        };
        if let Some(found) = poly_search.run(&interp::compare_with_polys) {
            return Some(Stage {
                order: Order::Poly(PolyInterpretation::new(found.assignment)),
                strict: strict_rules(&flagged, &found.decreases),
            });
        }
        let matrix_search = interp::Search {
            options: symbols.iter().map(interp::matrix_options).collect(),
            symbols,
            rules: &flagged,
            budget: self.budget,
        };
        matrix_search
            .run(&interp::compare_with_matrices)
            .map(|found| Stage {
                order: Order::Matrix(MatrixInterpretation::new(found.assignment)),
                strict: strict_rules(&flagged, &found.decreases),
            })
    }

    fn external_stage(&self, cs: &[Rule], cp: &[Rule]) -> Option<Stage> {
        let path = self.external.as_ref()?;
        let cmd = path.to_string_lossy().to_string();
        match run_external(&cmd, cs, cp) {
            Ok(true) => Some(Stage {
                order: Order::External(cmd),
                strict: cs.to_vec(),
            }),
            _ => None,
        }
    }
}

fn strict_rules(flagged: &[(Rule, bool)], decs: &[Decrease]) -> Vec<Rule> {
    flagged
        .iter()
        .zip(decs)
        .filter(|(_, d)| **d == Decrease::Strict)
        .map(|((r, _), _)| r.clone())
        .collect()
}

fn problem_text(cs: &[Rule], cp: &[Rule]) -> String {
    let strict = print_trs(&Trs::new(cs.to_vec()));
    let mut out = String::new();
    let weak = print_trs(&Trs::new(cp.to_vec()));
    // merge the two RULES blocks, marking relative rules with ->=
    let var_line = |text: &str| {
        text.lines()
            .find(|l| l.starts_with("(VAR"))
            .map(str::to_string)
    };
    let mut vars: Vec<String> = Vec::new();
    for text in [&strict, &weak] {
        if let Some(l) = var_line(text) {
            for v in l
                .trim_start_matches("(VAR")
                .trim_end_matches(')')
                .split_whitespace()
            {
                if !vars.iter().any(|w| w == v) {
                    vars.push(v.to_string());
                }
            }
        }
    }
    if !vars.is_empty() {
        out.push_str(&format!("(VAR {})\n", vars.join(" ")));
    }
    out.push_str("(RULES\n");
    let body = |text: &str| -> Vec<String> {
        text.lines()
            .filter(|l| l.starts_with("  "))
            .map(str::to_string)
            .collect()
    };
    for l in body(&strict) {
        out.push_str(&l);
        out.push('\n');
    }
    for l in body(&weak) {
        out.push_str(&l.replacen(" -> ", " ->= ", 1));
        out.push('\n');
    }
    out.push_str(")\n");
    out
}

fn run_external(cmd: &str, cs: &[Rule], cp: &[Rule]) -> Result<bool, CertificateError> {
    let mut child = Command::new(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| CertificateError::External(e.to_string()))?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(problem_text(cs, cp).as_bytes())
        .map_err(|e| CertificateError::External(e.to_string()))?;
    let out = child
        .wait_with_output()
        .map_err(|e| CertificateError::External(e.to_string()))?;
    let text = String::from_utf8_lossy(&out.stdout);
    Ok(text.lines().next().map(str::trim) == Some("YES"))
}

/// Proves termination of `S` (no caching).
pub fn prove_termination(s: &Trs) -> Result<TerminationCertificate, NoProof> {
    TerminationProver::new().prove_termination(s)
}

/// Proves that `S` terminates relative to `P′` (no caching).
pub fn prove_relative_termination(s: &Trs, p: &Trs) -> Result<TerminationCertificate, NoProof> {
    TerminationProver::new().prove_relative(s, p)
}

/// Re-checks every decrease claim of the certificate against `S` and `P′`.
pub fn replay_certificate(
    cert: &TerminationCertificate,
    s: &Trs,
    p: &Trs,
) -> Result<bool, CertificateError> {
    let mut cs: Vec<Rule> = s.rules().to_vec();
    let mut cp: Vec<Rule> = p
        .rules()
        .iter()
        .filter(|r| !s.contains_variant(r))
        .cloned()
        .collect();
    for stage in &cert.stages {
        if cs.is_empty() {
            break;
        }
        stage
            .order
            .check_well_formed()
            .map_err(CertificateError::Malformed)?;
        if let Order::External(cmd) = &stage.order {
            if !run_external(cmd, &cs, &cp)? {
                return Ok(false);
            }
            cs.clear();
            break;
        }
        let mut decs: BTreeMap<usize, Decrease> = BTreeMap::new();
        for (i, r) in cs.iter().chain(cp.iter()).enumerate() {
            match stage.order.decrease(r) {
                Some(Decrease::None) => return Ok(false),
                Some(d) => {
                    decs.insert(i, d);
                }
                None => {
                    return Err(CertificateError::Malformed(format!(
                        "order does not interpret every symbol of {r}"
                    )))
                }
            }
        }
        let all: Vec<Rule> = cs.iter().chain(cp.iter()).cloned().collect();
        for q in &stage.strict {
            let Some(i) = all.iter().position(|r| r.is_variant_of(q)) else {
                return Ok(false);
            };
            if decs[&i] != Decrease::Strict {
                return Ok(false);
            }
        }
        cs.retain(|r| !stage.strict.iter().any(|q| q.is_variant_of(r)));
        cp.retain(|r| !stage.strict.iter().any(|q| q.is_variant_of(r)));
    }
    Ok(cs.is_empty())
}
