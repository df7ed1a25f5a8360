//! Line-oriented text form of completion certificates.
//!
//! Variables are written `?name_id`, rules are referred to by label, and an
//! inverse rule by its label followed by `^-1`. Steps are `label@position`;
//! their terms are recomputed from the start of each sequence.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::completion::{Certificate, HistoryEntry};
use crate::criteria::{Condition, Criterion, CriterionReport, JoinWitness, Middle, PairEvidence};
use crate::reversibility::ReversibilityWitness;
use crate::rewriting::{ParallelStep, Rule, Step, Trs, INVERSE_SUFFIX};
use crate::syntax::{print_prefixed, print_var, PrefixedReader};
use crate::termination::{Order, Stage, TerminationCertificate};
use crate::terms::{Position, Term};

pub const BEGIN: &str = "BEGIN CERTIFICATE";
pub const END: &str = "END CERTIFICATE";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate line {line}: {msg}")]
pub struct CertParseError {
    pub line: usize,
    pub msg: String,
}

fn rule_text(r: &Rule) -> String {
    format!("{} -> {}", print_prefixed(r.lhs()), print_prefixed(r.rhs()))
}

fn steps_text(steps: &[Step]) -> String {
    steps
        .iter()
        .map(|s| format!("{}@{}", s.rule().label(), s.position()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn line(out: &mut String, words: &[&str]) {
    let text = words
        .iter()
        .filter(|w| !w.is_empty())
        .cloned()
        .collect::<Vec<_>>()
        .join(" ");
    out.push_str(&text);
    out.push('\n');
}

fn rules_section(out: &mut String, name: &str, trs: &Trs) {
    line(out, &[name]);
    for r in trs {
        line(out, &["rule", r.label(), &rule_text(r)]);
    }
}

/// Prints the certificate body (without the BEGIN/END markers).
pub fn print_certificate(cert: &Certificate) -> String {
    let rep = &cert.report;
    let mut out = String::new();
    line(&mut out, &["criterion", rep.criterion.name()]);
    rules_section(&mut out, "input", &cert.input);
    rules_section(&mut out, "initial-s", &cert.initial_s);
    rules_section(&mut out, "initial-p", &cert.initial_p);
    line(&mut out, &["history"]);
    for h in &cert.history {
        match h {
            HistoryEntry::Addition {
                rule,
                conversion,
                reduction,
            } => {
                line(&mut out, &["add", rule.label(), &rule_text(rule)]);
                line(&mut out, &["conv", &steps_text(conversion)]);
                line(&mut out, &["red", &steps_text(reduction)]);
            }
            HistoryEntry::Replacement {
                old,
                new,
                conversion,
            } => {
                line(
                    &mut out,
                    &["replace", old.label(), new.label(), &rule_text(new)],
                );
                line(&mut out, &["conv", &steps_text(conversion)]);
            }
        }
    }
    rules_section(&mut out, "final-s", &rep.s);
    rules_section(&mut out, "p-prime", &rep.p_prime);
    line(&mut out, &["reversibility"]);
    for (r, steps) in &rep.reversibility.sequences {
        line(&mut out, &["seq", r.label(), &steps_text(steps)]);
    }
    line(&mut out, &["termination"]);
    for stage in rep.termination.iter().flat_map(|t| t.stages.iter()) {
        line(&mut out, &["stage", &stage.order.to_string()]);
        let labels: Vec<&str> = stage.strict.iter().map(Rule::label).collect();
        line(&mut out, &["strict", &labels.join(" ")]);
    }
    line(&mut out, &["evidence"]);
    for ev in &rep.evidence {
        let mut head = format!(
            "pair {} {} ; {}",
            ev.condition,
            print_prefixed(&ev.left),
            print_prefixed(&ev.right)
        );
        if let Some(xs) = &ev.var_set {
            let names: Vec<String> = xs.iter().map(print_var).collect();
            let _ = write!(head, " ; {}", names.join(" "));
        }
        line(&mut out, &[&head]);
        line(&mut out, &["left", &steps_text(&ev.witness.left)]);
        let mid = match &ev.witness.middle {
            Middle::Identity => "id".to_string(),
            Middle::Step(s) => format!("step {}", steps_text(std::slice::from_ref(s))),
            Middle::Parallel(p) => {
                let parts: Vec<String> = p
                    .redexes()
                    .iter()
                    .map(|r| format!("{}@{}", r.rule.label(), r.position))
                    .collect();
                format!("par {}", parts.join(" "))
            }
            Middle::Conversion(steps) => format!("conv {}", steps_text(steps)),
        };
        line(&mut out, &["middle", &mid]);
        line(&mut out, &["right", &steps_text(&ev.witness.right)]);
    }
    line(&mut out, &["end"]);
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Input,
    InitialS,
    InitialP,
    History,
    FinalS,
    PPrime,
    Reversibility,
    Termination,
    Evidence,
}

struct Parser {
    reader: PrefixedReader,
    labels: HashMap<String, Rule>,
    line: usize,
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> CertParseError {
        CertParseError {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn declare(&mut self, rule: &Rule) -> Result<(), CertParseError> {
        if let Some(old) = self.labels.get(rule.label()) {
            if !old.is_variant_of(rule) {
                return Err(self.err(format!("label {} names two different rules", rule.label())));
            }
            return Ok(());
        }
        self.labels.insert(rule.label().to_string(), rule.clone());
        Ok(())
    }

    fn rule(&mut self, label: &str, text: &str) -> Result<Rule, CertParseError> {
        let r = self
            .reader
            .rule(label, text)
            .map_err(|e| self.err(e.to_string()))?;
        self.declare(&r)?;
        Ok(r)
    }

    fn lookup(&self, label: &str) -> Result<Rule, CertParseError> {
        if let Some(r) = self.labels.get(label) {
            return Ok(r.clone());
        }
        label
            .strip_suffix(INVERSE_SUFFIX)
            .and_then(|base| self.labels.get(base))
            .and_then(Rule::inverse)
            .ok_or_else(|| self.err(format!("unknown rule {label}")))
    }

    fn term(&mut self, text: &str) -> Result<Term, CertParseError> {
        self.reader
            .term(text.trim())
            .map_err(|e| self.err(e.to_string()))
    }

    fn redex(&self, token: &str) -> Result<(Position, Rule), CertParseError> {
        let (label, pos) = token
            .rsplit_once('@')
            .ok_or_else(|| self.err(format!("malformed step {token}")))?;
        let pos =
            Position::parse(pos).ok_or_else(|| self.err(format!("malformed position {pos}")))?;
        Ok((pos, self.lookup(label)?))
    }

    fn steps(&self, start: &Term, text: &str) -> Result<Vec<Step>, CertParseError> {
        let mut cur = start.clone();
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            let (pos, rule) = self.redex(token)?;
            let st = Step::new(&cur, &pos, &rule)
                .ok_or_else(|| self.err(format!("step {token} does not apply to {cur}")))?;
            cur = st.target().clone();
            out.push(st);
        }
        Ok(out)
    }

    fn labelled(&self, text: &str) -> Result<Vec<Rule>, CertParseError> {
        text.split_whitespace().map(|l| self.lookup(l)).collect()
    }
}

fn end_of(start: &Term, steps: &[Step]) -> Term {
    steps.last().map_or(start, |s| s.target()).clone()
}

/// Parses a certificate; text outside BEGIN/END markers is ignored when they are present.
pub fn parse_certificate(text: &str) -> Result<Certificate, CertParseError> {
    let (body, offset) = match text.find(BEGIN) {
        Some(i) => {
            let rest = &text[i + BEGIN.len()..];
            let body = rest.find(END).map_or(rest, |j| &rest[..j]);
            (body, text[..i].lines().count())
        }
        None => (text, 0),
    };
    let mut p = Parser {
        reader: PrefixedReader::new(),
        labels: HashMap::new(),
        line: 0,
    };
    let mut criterion = None;
    let mut section = Section::None;
    let (mut input, mut initial_s, mut initial_p, mut final_s, mut p_prime) = (
        Trs::empty(),
        Trs::empty(),
        Trs::empty(),
        Trs::empty(),
        Trs::empty(),
    );
    let mut history: Vec<HistoryEntry> = Vec::new();
    let mut sequences = Vec::new();
    let mut stages: Vec<Stage> = Vec::new();
    let mut evidence: Vec<PairEvidence> = Vec::new();
    // evidence under construction: condition, u, v, X, left steps, middle
    let mut pending: Option<(Condition, Term, Term, Option<BTreeSet<crate::terms::Var>>)> = None;
    let mut left: Option<Vec<Step>> = None;
    let mut middle: Option<Middle> = None;
    let mut ended = false;

    for (n, raw) in body.lines().enumerate() {
        p.line = offset + n + 1;
        p.reader.reset_vars();
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if ended {
            return Err(p.err("text after end"));
        }
        let (kw, rest) = l.split_once(' ').map_or((l, ""), |(k, r)| (k, r.trim()));
        let header = match kw {
            "input" => Some(Section::Input),
            "initial-s" => Some(Section::InitialS),
            "initial-p" => Some(Section::InitialP),
            "history" => Some(Section::History),
            "final-s" => Some(Section::FinalS),
            "p-prime" => Some(Section::PPrime),
            "reversibility" => Some(Section::Reversibility),
            "termination" => Some(Section::Termination),
            "evidence" => Some(Section::Evidence),
            _ => None,
        };
        if let Some(h) = header.filter(|_| rest.is_empty()) {
            section = h;
            continue;
        }
        match (section, kw) {
            (_, "criterion") => {
                criterion =
                    Some(Criterion::from_name(rest).ok_or_else(|| p.err("unknown criterion"))?);
            }
            (_, "end") => ended = true,
            (
                Section::Input
                | Section::InitialS
                | Section::InitialP
                | Section::FinalS
                | Section::PPrime,
                "rule",
            ) => {
                let (label, text) = rest
                    .split_once(' ')
                    .ok_or_else(|| p.err("expected a label and a rule"))?;
                let r = p.rule(label, text)?;
                match section {
                    Section::Input => input.push(r),
                    Section::InitialS => initial_s.push(r),
                    Section::InitialP => initial_p.push(r),
                    Section::FinalS => final_s.push(r),
                    _ => p_prime.push(r),
                }
            }
            (Section::History, "add") => {
                let (label, text) = rest
                    .split_once(' ')
                    .ok_or_else(|| p.err("expected a label and a rule"))?;
                let rule = p.rule(label, text)?;
                history.push(HistoryEntry::Addition {
                    rule,
                    conversion: Vec::new(),
                    reduction: Vec::new(),
                });
            }
            (Section::History, "replace") => {
                let mut parts = rest.splitn(3, ' ');
                let (Some(old), Some(label), Some(text)) =
                    (parts.next(), parts.next(), parts.next())
                else {
                    return Err(p.err("expected old label, new label and a rule"));
                };
                let old = p.lookup(old)?;
                let new = p.rule(label, text)?;
                history.push(HistoryEntry::Replacement {
                    old,
                    new,
                    conversion: Vec::new(),
                });
            }
            (Section::History, "conv") => match history.last_mut() {
                Some(HistoryEntry::Addition {
                    rule, conversion, ..
                }) => {
                    *conversion = p.steps(rule.lhs(), rest)?;
                }
                Some(HistoryEntry::Replacement {
                    old, conversion, ..
                }) => {
                    *conversion = p.steps(old.rhs(), rest)?;
                }
                None => return Err(p.err("conv before any history entry")),
            },
            (Section::History, "red") => match history.last_mut() {
                Some(HistoryEntry::Addition {
                    rule,
                    conversion,
                    reduction,
                }) => {
                    let w = end_of(rule.lhs(), conversion);
                    *reduction = p.steps(&w, rest)?;
                }
                _ => return Err(p.err("red without a preceding addition")),
            },
            (Section::Reversibility, "seq") => {
                let (label, steps) = rest.split_once(' ').unwrap_or((rest, ""));
                let r = p.lookup(label)?;
                let steps = p.steps(r.rhs(), steps)?;
                sequences.push((r, steps));
            }
            (Section::Termination, "stage") => {
                let order = Order::parse(rest).ok_or_else(|| p.err("malformed order"))?;
                stages.push(Stage {
                    order,
                    strict: Vec::new(),
                });
            }
            (Section::Termination, "strict") => {
                let rules = p.labelled(rest)?;
                stages
                    .last_mut()
                    .ok_or_else(|| p.err("strict before any stage"))?
                    .strict = rules;
            }
            (Section::Evidence, "pair") => {
                if pending.is_some() {
                    return Err(p.err("previous pair is incomplete"));
                }
                let mut parts = rest.splitn(2, ' ');
                let cond = parts
                    .next()
                    .and_then(Condition::from_name)
                    .ok_or_else(|| p.err("unknown condition"))?;
                let fields: Vec<&str> = parts.next().unwrap_or("").split(';').collect();
                if fields.len() < 2 || fields.len() > 3 {
                    return Err(p.err("expected `u ; v` or `u ; v ; vars`"));
                }
                let u = p.term(fields[0])?;
                let v = p.term(fields[1])?;
                let xs = match fields.get(2) {
                    Some(f) => Some(
                        f.split_whitespace()
                            .map(|name| match p.term(name)? {
                                Term::Var(x) => Ok(x),
                                _ => Err(p.err(format!("{name} is not a variable"))),
                            })
                            .collect::<Result<BTreeSet<_>, _>>()?,
                    ),
                    None => None,
                };
                pending = Some((cond, u, v, xs));
            }
            (Section::Evidence, "left") => {
                let (_, u, _, _) = pending
                    .as_ref()
                    .ok_or_else(|| p.err("left without a pair"))?;
                left = Some(p.steps(u, rest)?);
            }
            (Section::Evidence, "middle") => {
                let (_, u, _, _) = pending
                    .as_ref()
                    .ok_or_else(|| p.err("middle without a pair"))?;
                let l = left.as_ref().ok_or_else(|| p.err("middle before left"))?;
                let start = end_of(u, l);
                let (kind, arg) = rest.split_once(' ').unwrap_or((rest, ""));
                middle = Some(match kind {
                    "id" => Middle::Identity,
                    "step" => {
                        let mut s = p.steps(&start, arg)?;
                        if s.len() != 1 {
                            return Err(p.err("step middle needs exactly one step"));
                        }
                        Middle::Step(s.remove(0))
                    }
                    "par" => {
                        let redexes: Vec<(Position, Rule)> = arg
                            .split_whitespace()
                            .map(|t| p.redex(t))
                            .collect::<Result<_, _>>()?;
                        Middle::Parallel(
                            ParallelStep::new(&start, &redexes)
                                .ok_or_else(|| p.err("parallel step does not apply"))?,
                        )
                    }
                    "conv" => Middle::Conversion(p.steps(&start, arg)?),
                    _ => return Err(p.err("unknown middle kind")),
                });
            }
            (Section::Evidence, "right") => {
                let (condition, u, v, var_set) = pending
                    .take()
                    .ok_or_else(|| p.err("right without a pair"))?;
                let right = p.steps(&v, rest)?;
                let (Some(l), Some(m)) = (left.take(), middle.take()) else {
                    return Err(p.err("right before left and middle"));
                };
                evidence.push(PairEvidence {
                    condition,
                    left: u,
                    right: v,
                    var_set,
                    witness: JoinWitness {
                        left: l,
                        middle: m,
                        right,
                    },
                });
            }
            _ => return Err(p.err(format!("unexpected `{kw}` here"))),
        }
    }
    if !ended {
        return Err(p.err("missing end"));
    }
    if pending.is_some() {
        return Err(p.err("incomplete pair at end"));
    }
    let criterion = criterion.ok_or_else(|| p.err("missing criterion"))?;
    Ok(Certificate {
        input,
        initial_s,
        initial_p: initial_p.clone(),
        history,
        report: CriterionReport {
            criterion,
            s: final_s,
            p: initial_p,
            p_prime,
            holds: true,
            evidence,
            failures: Vec::new(),
            reversibility: ReversibilityWitness { sequences },
            termination: Some(TerminationCertificate { stages }),
            note: None,
        },
    })
}
