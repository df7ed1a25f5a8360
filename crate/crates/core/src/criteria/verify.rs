//! Re-checks a criterion report without searching: obligations are
//! recomputed, and every one must be covered by a replaying join.

use std::collections::BTreeSet;

use super::{obligations, CriterionReport, Precondition};
use crate::critical_pairs::canonical_renaming;
use crate::rewriting::Trs;
use crate::termination::replay_certificate;
use crate::terms::{Term, Var};

/// `⟨left, right⟩` modulo renaming, with the variable set restricted to the
/// variables of the pair.
pub type PairKey = (Vec<Term>, Option<Vec<u32>>);

pub fn pair_key(left: &Term, right: &Term, var_set: Option<&BTreeSet<Var>>) -> PairKey {
    let (c, ren) = canonical_renaming(&[left, right]);
    let xs = var_set.map(|xs| {
        let mut ids: Vec<u32> = xs.iter().filter_map(|v| ren.get(v).map(Var::id)).collect();
        ids.sort_unstable();
        ids
    });
    (c, xs)
}

/// Checks every claim of a report that says the criterion holds.
pub fn verify_report(report: &CriterionReport, rev_k: usize) -> Result<(), String> {
    if !report.holds {
        return Err("report does not claim the criterion".into());
    }
    let (s, p, pr) = (&report.s, &report.p, &report.p_prime);
    let c = report.criterion;
    if c.needs_linear() && !s.is_linear() {
        return Err(Precondition::NotLinear.to_string());
    }
    if !s.is_left_linear() {
        return Err(Precondition::NotLeftLinear.to_string());
    }
    if !report.reversibility.replays(p, rev_k) {
        return Err("reversibility witness does not replay".into());
    }
    let pp = p.with_inverses();
    if pr.iter().any(|r| !pp.contains_variant(r)) {
        return Err(Precondition::BadPPrime.to_string());
    }
    if !c.uses_p_prime() && !pr.is_empty() {
        return Err(format!("{c} does not allow a non-empty P'"));
    }
    let rel = if c == super::Criterion::Huet { p } else { pr };
    let cert = report
        .termination
        .as_ref()
        .ok_or("missing termination certificate")?;
    match replay_certificate(cert, s, rel) {
        Ok(true) => {}
        Ok(false) => return Err("termination certificate does not replay".into()),
        Err(e) => return Err(e.to_string()),
    }
    let scope: Trs = if c == super::Criterion::Huet {
        s.clone()
    } else {
        s.union(pr)
    };
    for o in obligations(c, s, &pp) {
        let Some(shape) = &o.shape else {
            return Err(format!("({}) pair {} must not exist", o.condition, o.pair));
        };
        let key = o.pair.key();
        let mut last_err = format!("({}) no evidence for {}", o.condition, o.pair);
        let covered = report.evidence.iter().any(|ev| {
            if ev.condition != o.condition
                || pair_key(&ev.left, &ev.right, ev.var_set.as_ref()) != key
            {
                return false;
            }
            // the shape's variable set must be the evidence's own, renamed consistently
            let mut sh = shape.clone();
            if let super::MiddleKind::Parallel(Some(_)) = &sh.middle {
                sh.middle = super::MiddleKind::Parallel(ev.var_set.clone());
            }
            match ev.witness.check(&ev.left, &ev.right, &sh, s, &pp, &scope) {
                Ok(()) => true,
                Err(e) => {
                    last_err = format!("({}) {}: {e}", o.condition, o.pair);
                    false
                }
            }
        });
        if !covered {
            return Err(last_err);
        }
    }
    Ok(())
}
