//! Finite abstract reduction systems, used to test the abstract criteria for
//! Church-Rosser modulo an equivalence relation by brute force.
//!
//! Notation: `→` is the reduction, `⊢⊣` a symmetric relation, `⤳ ⊆ ⊢⊣`,
//! `⇒ = ⤳ ∪ →`, `∼` the equivalence closure of `⊢⊣`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const MAX_CARRIER: usize = 10;

/// A binary relation on `{0, .., n-1}` stored as one bit row per element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rel {
    n: usize,
    rows: Vec<u16>,
}

impl Rel {
    pub fn empty(n: usize) -> Rel {
        assert!(n <= MAX_CARRIER, "carrier too large: {n}");
        Rel {
            n,
            rows: vec![0; n],
        }
    }

    pub fn identity(n: usize) -> Rel {
        let mut r = Rel::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Rel {
        let mut r = Rel::empty(n);
        for &(a, b) in edges {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        assert!(
            a < self.n && b < self.n,
            "({a},{b}) outside carrier {}",
            self.n
        );
        self.rows[a] |= 1 << b;
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a] >> b & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| {
                (0..self.n)
                    .filter(move |&b| self.contains(a, b))
                    .map(move |b| (a, b))
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn union(&self, other: &Rel) -> Rel {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a | b)
            .collect();
        Rel { n: self.n, rows }
    }

    pub fn inverse(&self) -> Rel {
        let mut r = Rel::empty(self.n);
        for (a, b) in self.edges() {
            r.insert(b, a);
        }
        r
    }

    /// `self ∘ other`: first `self`, then `other`.
    pub fn then(&self, other: &Rel) -> Rel {
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                (0..self.n)
                    .filter(|&m| row >> m & 1 == 1)
                    .fold(0, |acc, m| acc | other.rows[m])
            })
            .collect();
        Rel { n: self.n, rows }
    }

    pub fn is_subset(&self, other: &Rel) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.inverse()
    }

    pub fn reflexive(&self) -> Rel {
        self.union(&Rel::identity(self.n))
    }

    pub fn symmetric(&self) -> Rel {
        self.union(&self.inverse())
    }

    pub fn transitive(&self) -> Rel {
        let mut r = self.clone();
        for k in 0..self.n {
            for i in 0..self.n {
                if r.contains(i, k) {
                    r.rows[i] |= r.rows[k];
                }
            }
        }
        r
    }

    pub fn star(&self) -> Rel {
        self.transitive().reflexive()
    }

    pub fn equivalence(&self) -> Rel {
        self.symmetric().star()
    }

    /// On a finite carrier, well-founded means no cycle (self-loops included).
    pub fn is_well_founded(&self) -> bool {
        let t = self.transitive();
        (0..self.n).all(|i| !t.contains(i, i))
    }
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.edges())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteArs {
    pub arrow: Rel,
    pub sym: Rel,
    /// `⤳`, a sub-relation of `sym`; absent means empty.
    pub leadsto: Option<Rel>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArsError {
    #[error("relations over different carriers")]
    CarrierMismatch,
    #[error("the symmetric relation is not symmetric")]
    NotSymmetric,
    #[error("the sub-relation is not contained in the symmetric relation")]
    LeadstoNotInSym,
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
}

impl FiniteArs {
    pub fn new(arrow: Rel, sym: Rel, leadsto: Option<Rel>) -> Result<FiniteArs, ArsError> {
        if sym.size() != arrow.size() || leadsto.as_ref().is_some_and(|l| l.size() != arrow.size())
        {
            return Err(ArsError::CarrierMismatch);
        }
        if !sym.is_symmetric() {
            return Err(ArsError::NotSymmetric);
        }
        if leadsto.as_ref().is_some_and(|l| !l.is_subset(&sym)) {
            return Err(ArsError::LeadstoNotInSym);
        }
        Ok(FiniteArs {
            arrow,
            sym,
            leadsto,
        })
    }

    pub fn size(&self) -> usize {
        self.arrow.size()
    }

    pub fn leadsto(&self) -> Rel {
        self.leadsto
            .clone()
            .unwrap_or_else(|| Rel::empty(self.size()))
    }

    /// `∼`
    pub fn equiv(&self) -> Rel {
        self.sym.equivalence()
    }

    /// `⋈ = ← ∪ → ∪ ⊢⊣`
    pub fn bowtie(&self) -> Rel {
        self.arrow.symmetric().union(&self.sym)
    }
}

/// `⋈* ⊆ →* ∘ ∼ ∘ ←*`
pub fn is_crm(a: &FiniteArs) -> bool {
    let star = a.arrow.star();
    let joinable = star.then(&a.equiv()).then(&star.inverse());
    a.bowtie().equivalence().is_subset(&joinable)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AbstractCriterion {
    /// Main theorem, parametrised by `⤳`.
    Theorem,
    /// `⤳ = ∅`, `→` well-founded, both peaks joinable by `→* ∘ ⊢⊣= ∘ ←*`.
    ArsI,
    /// Theorem with only the second branch of (ii).
    ArsII,
    /// `⤳ = ⊢⊣`; necessary and sufficient.
    ArsIIPrime,
    /// Joins modulo `∼` with `→+` in (ii); necessary and sufficient.
    ArsIII,
    /// Joins modulo `∼` with `→*` in (ii); necessary and sufficient.
    Huet,
}

impl AbstractCriterion {
    pub const ALL: [AbstractCriterion; 6] = [
        AbstractCriterion::Theorem,
        AbstractCriterion::ArsI,
        AbstractCriterion::ArsII,
        AbstractCriterion::ArsIIPrime,
        AbstractCriterion::ArsIII,
        AbstractCriterion::Huet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AbstractCriterion::Theorem => "theorem",
            AbstractCriterion::ArsI => "ars-i",
            AbstractCriterion::ArsII => "ars-ii",
            AbstractCriterion::ArsIIPrime => "ars-ii-prime",
            AbstractCriterion::ArsIII => "ars-iii",
            AbstractCriterion::Huet => "huet",
        }
    }

    /// Whether the criterion characterises CRM under its well-foundedness
    /// precondition.
    pub fn is_iff(self) -> bool {
        matches!(
            self,
            AbstractCriterion::ArsIIPrime | AbstractCriterion::ArsIII | AbstractCriterion::Huet
        )
    }
}

impl fmt::Display for AbstractCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AbstractCriterion {
    type Err = ArsError;

    fn from_str(s: &str) -> Result<Self, ArsError> {
        AbstractCriterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ArsError::UnknownCriterion(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub well_founded: bool,
    pub conditions: bool,
    pub crm: bool,
}

impl Verdict {
    pub fn hypotheses_hold(&self) -> bool {
        self.well_founded && self.conditions
    }
}

/// Well-foundedness precondition and conditions (i), (ii) of `which`.
pub fn evaluate(a: &FiniteArs, which: AbstractCriterion) -> Verdict {
    use AbstractCriterion::*;
    let n = a.size();
    let to = &a.arrow;
    let from = to.inverse();
    let peak = from.then(to);
    let cliff = a.sym.then(to);
    let sim = a.equiv();
    let sym_eq = a.sym.reflexive();
    let to_star = to.star();
    let from_star = to_star.inverse();

    let (well_founded, cond_i, cond_ii) = match which {
        Theorem | ArsII => {
            let leads = a.leadsto();
            let wf = to.then(&leads.star()).is_well_founded();
            let dbl = leads.union(to).star();
            let join = dbl.then(&sym_eq).then(&dbl.inverse());
            let second = to.then(&join);
            let ii = if which == Theorem {
                sym_eq.then(&dbl.inverse()).union(&second)
            } else {
                second
            };
            (wf, join, ii)
        }
        ArsI => {
            let join = to_star.then(&sym_eq).then(&from_star);
            (to.is_well_founded(), join.clone(), join)
        }
        ArsIIPrime => {
            let dbl = a.sym.union(to).star();
            let join = dbl.then(&dbl.inverse());
            (
                to.then(&sim).is_well_founded(),
                join.clone(),
                to.then(&join),
            )
        }
        ArsIII | Huet => {
            let join = to_star.then(&sim).then(&from_star);
            let ii = if which == ArsIII {
                to.transitive().then(&sim).then(&from_star)
            } else {
                join.clone()
            };
            (to.then(&sim).is_well_founded(), join, ii)
        }
    };
    debug_assert_eq!(cond_i.size(), n);
    Verdict {
        well_founded,
        conditions: peak.is_subset(&cond_i) && cliff.is_subset(&cond_ii),
        crm: is_crm(a),
    }
}

/// Returns `(hypotheses_hold, crm)` for the criterion named `which`.
pub fn check_abstract_criterion(a: &FiniteArs, which: &str) -> Result<(bool, bool), ArsError> {
    let v = evaluate(a, which.parse()?);
    Ok((v.hypotheses_hold(), v.crm))
}

/// Random instance with every edge present with probability `density`.
/// `⤳` keeps each symmetric pair of `⊢⊣` with probability one half.
pub fn random_ars<R: Rng>(rng: &mut R, n: usize, density: f64) -> FiniteArs {
    let mut arrow = Rel::empty(n);
    let mut sym = Rel::empty(n);
    let mut leads = Rel::empty(n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                arrow.insert(i, j);
            }
            if i <= j && rng.gen_bool(density) {
                sym.insert(i, j);
                sym.insert(j, i);
                if rng.gen_bool(0.5) {
                    leads.insert(i, j);
                    leads.insert(j, i);
                }
            }
        }
    }
    FiniteArs::new(arrow, sym, Some(leads)).expect("generated instance is well-formed")
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub criterion: AbstractCriterion,
    pub ars: FiniteArs,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzSummary {
    pub instances: usize,
    pub crm: usize,
    /// `(criterion, hypotheses held)` counts.
    pub held: Vec<(AbstractCriterion, usize)>,
    /// Hypotheses hold but CRM fails.
    pub unsound: Vec<Counterexample>,
    /// Iff criteria only: well-founded and CRM but conditions fail.
    pub one_sided: Vec<Counterexample>,
}

impl FuzzSummary {
    pub fn is_clean(&self) -> bool {
        self.unsound.is_empty() && self.one_sided.is_empty()
    }
}

impl fmt::Display for FuzzSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances {} crm {}", self.instances, self.crm)?;
        for (c, k) in &self.held {
            writeln!(f, "  {c}: hypotheses hold {k}")?;
        }
        write!(
            f,
            "unsound {} one-sided {}",
            self.unsound.len(),
            self.one_sided.len()
        )
    }
}

/// Seeded fuzz over carriers of 3 to 6 elements and densities 0.1 to 0.4.
pub fn fuzz(seed: u64, instances: usize) -> FuzzSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FuzzSummary {
        held: AbstractCriterion::ALL.iter().map(|&c| (c, 0)).collect(),
        ..FuzzSummary::default()
    };
    for _ in 0..instances {
        let n = rng.gen_range(3..=6);
        let density = rng.gen_range(0.1..=0.4);
        let ars = random_ars(&mut rng, n, density);
        out.instances += 1;
        for (k, &c) in AbstractCriterion::ALL.iter().enumerate() {
            let v = evaluate(&ars, c);
            if k == 0 && v.crm {
                out.crm += 1;
            }
            if v.hypotheses_hold() {
                out.held[k].1 += 1;
                if !v.crm {
                    out.unsound.push(Counterexample {
                        criterion: c,
                        ars: ars.clone(),
                        verdict: v,
                    });
                }
            }
            if c.is_iff() && v.well_founded && v.crm && !v.conditions {
                out.one_sided.push(Counterexample {
                    criterion: c,
                    ars: ars.clone(),
                    verdict: v,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ars(n: usize, arrow: &[(usize, usize)], sym: &[(usize, usize)]) -> FiniteArs {
        let sym = Rel::from_edges(n, sym).symmetric();
        FiniteArs::new(Rel::from_edges(n, arrow), sym, None).unwrap()
    }

    #[test]
    fn empty_relations_are_crm() {
        assert!(is_crm(&ars(3, &[], &[])));
    }

    #[test]
    fn small_cases() {
        // b and c are only related through a, and neither reduces
        assert!(!is_crm(&ars(3, &[(0, 1)], &[(0, 2)])));
        // c → b closes it
        assert!(is_crm(&ars(3, &[(0, 1), (2, 1)], &[(0, 2)])));
        // a diamond without ⊢⊣
        assert!(is_crm(&ars(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], &[])));
        assert!(!is_crm(&ars(3, &[(0, 1), (0, 2)], &[])));
    }

    #[test]
    fn cycle_breaks_well_foundedness() {
        let a = ars(2, &[(0, 1), (1, 0)], &[]);
        for c in AbstractCriterion::ALL {
            assert!(!evaluate(&a, c).hypotheses_hold(), "{c}");
        }
        // → ∘ ⊢⊣* cycles through the symmetric step
        let a = ars(2, &[(0, 1)], &[(0, 1)]);
        assert!(!evaluate(&a, AbstractCriterion::Huet).well_founded);
        assert!(evaluate(&a, AbstractCriterion::ArsI).well_founded);
    }

    #[test]
    fn unknown_criterion() {
        let a = ars(1, &[], &[]);
        assert_eq!(
            check_abstract_criterion(&a, "nope"),
            Err(ArsError::UnknownCriterion("nope".into()))
        );
        assert_eq!(check_abstract_criterion(&a, "huet"), Ok((true, true)));
    }

    #[test]
    fn malformed_instances() {
        let one_way = Rel::from_edges(2, &[(0, 1)]);
        assert_eq!(
            FiniteArs::new(Rel::empty(2), one_way.clone(), None),
            Err(ArsError::NotSymmetric)
        );
        assert_eq!(
            FiniteArs::new(Rel::empty(2), Rel::empty(2), Some(one_way.symmetric())),
            Err(ArsError::LeadstoNotInSym)
        );
    }

    #[test]
    fn closures_are_idempotent_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_ars(&mut rng, 5, 0.3);
            let s = a.arrow.star();
            assert_eq!(s.star(), s);
            let e = a.sym.equivalence();
            assert_eq!(e.equivalence(), e);
            let bigger = a.arrow.union(&a.sym);
            assert!(s.is_subset(&bigger.star()));
        }
    }
}
