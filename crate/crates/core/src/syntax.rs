//! Reading and writing TRS problem files in the COPS/TPDB style:
//! `(VAR x y)` followed by `(RULES l -> r ...)`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::rewriting::{Rule, RuleError, Trs};
use crate::terms::{disambiguate_names, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: symbol {symbol} used with {found} arguments, expected {expected}")]
    ArityMismatch {
        line: usize,
        col: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: left-hand side of a rule is a variable")]
    LhsVariable { line: usize, col: usize },
    #[error("{line}:{col}: right-hand side has variables not in the left-hand side: {vars}")]
    ExtraRhsVariable {
        line: usize,
        col: usize,
        vars: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    Comma,
    Arrow,
    Ident(String),
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || "+-*'_".contains(c)
}

/// Character-level lexer tracking line and column (1-based).
pub(crate) struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
    line: usize,
    col: usize,
    /// Extra characters accepted as identifier prefixes (e.g. `?` for variables).
    extra_start: &'static str,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            rest: text,
            line: 1,
            col: 1,
            extra_start: "",
        }
    }

    pub(crate) fn with_var_prefix(text: &'a str) -> Self {
        Lexer {
            extra_start: "?",
            ..Lexer::new(text)
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    pub(crate) fn pos(&mut self) -> (usize, usize) {
        self.skip_ws();
        (self.line, self.col)
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.chars.peek().is_none()
    }

    pub(crate) fn error(&mut self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.pos();
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub(crate) fn peek(&mut self) -> Option<Tok> {
        self.skip_ws();
        let c = *self.chars.peek()?;
        Some(match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '-' if self.rest.starts_with("->") => Tok::Arrow,
            _ => {
                let ident: String = self
                    .rest
                    .chars()
                    .enumerate()
                    .take_while(|&(i, ch)| {
                        (is_ident_char(ch) || (i == 0 && self.extra_start.contains(ch)))
                            && !(ch == '-' && self.rest[self.offset_of(i)..].starts_with("->"))
                    })
                    .map(|(_, ch)| ch)
                    .collect();
                if ident.is_empty() {
                    return None;
                }
                Tok::Ident(ident)
            }
        })
    }

    fn offset_of(&self, char_index: usize) -> usize {
        self.rest
            .char_indices()
            .nth(char_index)
            .map_or(self.rest.len(), |(b, _)| b)
    }

    pub(crate) fn next(&mut self) -> Option<Tok> {
        let tok = self.peek()?;
        let n = match &tok {
            Tok::Arrow => 2,
            Tok::Ident(s) => s.chars().count(),
            _ => 1,
        };
        for _ in 0..n {
            self.bump();
        }
        Some(tok)
    }

    pub(crate) fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.next();
                Ok(())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    /// Skips raw characters up to and including the parenthesis closing the current block.
    fn skip_block(&mut self) -> Result<(), ParseError> {
        let mut depth = 1usize;
        while let Some(c) = self.bump() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        Err(self.error("unterminated block"))
    }
}

/// How identifiers are classified as variables while parsing terms.
pub(crate) enum VarMode<'v> {
    /// Names listed in a `VAR` declaration.
    Declared(&'v HashMap<String, u32>),
    /// Names written with a leading `?`, numbered in order of appearance.
    Prefixed(&'v mut HashMap<String, u32>),
}

/// Ids for `?name` variables without an explicit `_id` suffix.
const FRESH_VAR_BASE: u32 = 1 << 30;

/// Splits `name_12` into `("name", 12)`.
fn split_var_id(base: &str) -> Option<(&str, u32)> {
    let (name, id) = base.rsplit_once('_')?;
    if name.is_empty() || id.is_empty() || !id.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    id.parse()
        .ok()
        .filter(|&id| id < FRESH_VAR_BASE)
        .map(|id| (name, id))
}

pub(crate) struct TermParser<'v> {
    pub(crate) arities: BTreeMap<String, usize>,
    pub(crate) vars: VarMode<'v>,
}

impl<'v> TermParser<'v> {
    pub(crate) fn new(vars: VarMode<'v>) -> Self {
        TermParser {
            arities: BTreeMap::new(),
            vars,
        }
    }

    pub(crate) fn term(&mut self, lx: &mut Lexer) -> Result<Term, ParseError> {
        let (line, col) = lx.pos();
        let name = match lx.next() {
            Some(Tok::Ident(s)) => s,
            _ => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: "expected a term".into(),
                })
            }
        };
        let var = match &mut self.vars {
            VarMode::Declared(m) => m.get(&name).map(|&id| Var::new(id, &name)),
            VarMode::Prefixed(m) => match name.strip_prefix('?') {
                Some(base) => {
                    let (display, id) = match m.get(base) {
                        Some(&id) => (split_var_id(base).map_or(base, |(n, _)| n), id),
                        None => {
                            let (display, id) = match split_var_id(base) {
                                Some((n, id)) => (n, id),
                                None => (base, FRESH_VAR_BASE + m.len() as u32),
                            };
                            if m.values().any(|&other| other == id) {
                                return Err(ParseError::Syntax {
                                    line,
                                    col,
                                    msg: format!("variable id {id} used under two names"),
                                });
                            }
                            m.insert(base.to_string(), id);
                            (display, id)
                        }
                    };
                    Some(Var::new(id, display))
                }
                None => None,
            },
        };
        let mut args = Vec::new();
        let has_parens = lx.peek() == Some(Tok::LParen);
        if has_parens {
            lx.next();
            if lx.peek() == Some(Tok::RParen) {
                lx.next();
            } else {
                loop {
                    args.push(self.term(lx)?);
                    match lx.next() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::RParen) => break,
                        _ => return Err(lx.error("expected ',' or ')'")),
                    }
                }
            }
        }
        if let Some(v) = var {
            if has_parens {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("variable {name} applied to arguments"),
                });
            }
            return Ok(Term::Var(v));
        }
        match self.arities.get(&name) {
            Some(&n) if n != args.len() => {
                return Err(ParseError::ArityMismatch {
                    line,
                    col,
                    symbol: name,
                    expected: n,
                    found: args.len(),
                })
            }
            _ => {
                self.arities.insert(name.clone(), args.len());
            }
        }
        Ok(Term::app(Symbol::new(&name, args.len()), args))
    }
}

fn var_table(vars: &[&str]) -> HashMap<String, u32> {
    vars.iter()
        .enumerate()
        .map(|(i, v)| (v.to_string(), i as u32))
        .collect()
}

/// Parses a single term; identifiers in `vars` are variables, numbered by their index.
pub fn parse_term(text: &str, vars: &[&str]) -> Result<Term, ParseError> {
    let table = var_table(vars);
    let mut lx = Lexer::new(text);
    let mut p = TermParser::new(VarMode::Declared(&table));
    let t = p.term(&mut lx)?;
    if !lx.at_end() {
        return Err(lx.error("trailing input"));
    }
    Ok(t)
}

/// Parses `l -> r` into a labelled rule.
pub fn parse_rule(label: &str, text: &str, vars: &[&str]) -> Result<Rule, ParseError> {
    let table = var_table(vars);
    let mut lx = Lexer::new(text);
    let mut p = TermParser::new(VarMode::Declared(&table));
    let rule = rule_body(label, &mut lx, &mut p)?;
    if !lx.at_end() {
        return Err(lx.error("trailing input"));
    }
    Ok(rule)
}

fn rule_body(label: &str, lx: &mut Lexer, p: &mut TermParser) -> Result<Rule, ParseError> {
    let (line, col) = lx.pos();
    let lhs = p.term(lx)?;
    lx.expect(Tok::Arrow, "'->'")?;
    let (rline, rcol) = lx.pos();
    let rhs = p.term(lx)?;
    Rule::new(label, lhs, rhs).map_err(|e| match e {
        RuleError::LhsVariable(_) => ParseError::LhsVariable { line, col },
        RuleError::ExtraRhsVariables { vars, .. } => ParseError::ExtraRhsVariable {
            line: rline,
            col: rcol,
            vars,
        },
    })
}

/// Parses a problem file. Rules are labelled `r1`, `r2`, … in order.
pub fn parse_trs(text: &str) -> Result<Trs, ParseError> {
    let mut lx = Lexer::new(text);
    let mut table: HashMap<String, u32> = HashMap::new();
    let mut arities = BTreeMap::new();
    let mut trs = Trs::empty();
    while !lx.at_end() {
        lx.expect(Tok::LParen, "'('")?;
        let keyword = match lx.next() {
            Some(Tok::Ident(k)) => k,
            _ => return Err(lx.error("expected a section keyword")),
        };
        match keyword.as_str() {
            "VAR" => loop {
                match lx.next() {
                    Some(Tok::Ident(v)) => {
                        let next = table.len() as u32;
                        table.entry(v).or_insert(next);
                    }
                    Some(Tok::RParen) => break,
                    _ => return Err(lx.error("expected a variable name or ')'")),
                }
            },
            "RULES" => loop {
                if lx.peek() == Some(Tok::RParen) {
                    lx.next();
                    break;
                }
                if lx.peek().is_none() {
                    return Err(lx.error("unterminated RULES section"));
                }
                let mut p = TermParser::new(VarMode::Declared(&table));
                p.arities = std::mem::take(&mut arities);
                let label = format!("r{}", trs.len() + 1);
                let rule = rule_body(&label, &mut lx, &mut p)?;
                arities = p.arities;
                trs.push(rule);
            },
            "COMMENT" => lx.skip_block()?,
            other => return Err(lx.error(format!("unknown section {other}"))),
        }
    }
    Ok(trs)
}

/// Reads terms whose variables are written `?name` or `?name_id`. Symbol
/// arities are shared by everything read; variables until [`PrefixedReader::reset_vars`].
#[derive(Default)]
pub struct PrefixedReader {
    table: HashMap<String, u32>,
    arities: BTreeMap<String, usize>,
}

impl PrefixedReader {
    pub fn new() -> Self {
        Self::default()
    }

    fn with_parser<T>(
        &mut self,
        text: &str,
        f: impl FnOnce(&mut Lexer, &mut TermParser) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let mut lx = Lexer::with_var_prefix(text);
        let mut p = TermParser::new(VarMode::Prefixed(&mut self.table));
        p.arities = std::mem::take(&mut self.arities);
        let out = f(&mut lx, &mut p);
        self.arities = p.arities;
        let out = out?;
        if !lx.at_end() {
            return Err(lx.error("trailing input"));
        }
        Ok(out)
    }

    pub fn reset_vars(&mut self) {
        self.table.clear();
    }

    pub fn term(&mut self, text: &str) -> Result<Term, ParseError> {
        self.with_parser(text, |lx, p| p.term(lx))
    }

    pub fn rule(&mut self, label: &str, text: &str) -> Result<Rule, ParseError> {
        self.with_parser(text, |lx, p| rule_body(label, lx, p))
    }
}

/// Prints a term for [`PrefixedReader`]; each variable becomes `?name_id`,
/// so distinct variables never share a printed name.
pub fn print_prefixed(t: &Term) -> String {
    match t {
        Term::Var(v) => print_var(v),
        Term::App(f, args) if args.is_empty() => f.name().to_string(),
        Term::App(f, args) => {
            let inner: Vec<String> = args.iter().map(print_prefixed).collect();
            format!("{}({})", f.name(), inner.join(","))
        }
    }
}

pub fn print_var(v: &Var) -> String {
    format!("?{}_{}", v.name(), v.id())
}

/// Prints a TRS in the format accepted by [`parse_trs`].
pub fn print_trs(trs: &Trs) -> String {
    let mut var_names: Vec<String> = Vec::new();
    let mut lines = Vec::new();
    for r in trs {
        let named = disambiguate_names(&[r.lhs(), r.rhs()]);
        for v in named[0].vars_in_order() {
            if !var_names.iter().any(|n| n == v.name()) {
                var_names.push(v.name().to_string());
            }
        }
        lines.push(format!("  {} -> {}", named[0], named[1]));
    }
    let mut out = String::new();
    if !var_names.is_empty() {
        out.push_str(&format!("(VAR {})\n", var_names.join(" ")));
    }
    out.push_str("(RULES\n");
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixed_round_trip() {
        let t = parse_term("+(x,s(+(y,x)))", &["x", "y"]).unwrap();
        let text = print_prefixed(&t);
        assert_eq!(text, "+(?x_0,s(+(?y_1,?x_0)))");
        let mut r = PrefixedReader::new();
        let back = r.term(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(print_prefixed(&back), text);
        let rule = r.rule("n", "+(?x_0,0) -> ?x_0").unwrap();
        assert_eq!(rule.lhs().args()[0], back.args()[0]);
        assert!(r.term("+(?x_0)").is_err());
        assert!(r.term("?w_0").is_err(), "id 0 already names x");
        r.reset_vars();
        assert_eq!(r.term("?w_0").unwrap(), Term::var(0, "w"));
        r.reset_vars();
        r.term("+(?x_0,?y_1)").unwrap();
        assert_eq!(
            print_prefixed(&r.term("f(?u,?v_7)").unwrap()),
            format!("f(?u_{},?v_7)", FRESH_VAR_BASE + 2)
        );
        assert!(r.term("?x(0)").is_err());
    }

    #[test]
    fn parses_single_rule_file() {
        let trs = parse_trs("(VAR x y)(RULES +(0,y) -> y)").unwrap();
        assert_eq!(trs.len(), 1);
        assert_eq!(trs.rules()[0].to_string(), "+(0,y) -> y");
        assert_eq!(trs.rules()[0].label(), "r1");
    }

    #[test]
    fn identifiers_with_dashes_and_arrow() {
        let ok = parse_trs("(VAR x)(RULES f-g(x)->g*(x) a' -> b_c)").unwrap();
        assert_eq!(ok.rules()[0].to_string(), "f-g(x) -> g*(x)");
        assert_eq!(ok.rules()[1].to_string(), "a' -> b_c");
    }

    #[test]
    fn rejects_variable_lhs_with_position() {
        assert_eq!(
            parse_trs("(VAR x)\n(RULES x -> 0)"),
            Err(ParseError::LhsVariable { line: 2, col: 8 })
        );
        assert_eq!(
            parse_trs("(RULES x -> 0)").map(|t| t.len()),
            Ok(1),
            "undeclared identifiers are constants"
        );
    }

    #[test]
    fn rejects_extra_rhs_variable_and_arity_mismatch() {
        assert!(matches!(
            parse_trs("(VAR x y)(RULES f(x) -> y)"),
            Err(ParseError::ExtraRhsVariable {
                line: 1,
                col: 25,
                ..
            })
        ));
        assert!(matches!(
            parse_trs("(VAR x)(RULES f(x) -> f(x,x))"),
            Err(ParseError::ArityMismatch {
                expected: 1,
                found: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_trs("(VAR x)(RULES f(x) -> g(x)\n g(x,x) -> x)"),
            Err(ParseError::ArityMismatch { line: 2, .. })
        ));
        assert!(matches!(
            parse_trs("(RULES f(a -> a)"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn comments_are_skipped() {
        let trs = parse_trs("(COMMENT (nested) text -> here)(VAR x)(RULES f(x) -> x)").unwrap();
        assert_eq!(trs.len(), 1);
    }

    #[test]
    fn print_then_parse_round_trip() {
        let text = "(VAR x y z)(RULES +(0,y) -> y +(s(x),y) -> s(+(x,y)) +(x,y) -> +(y,x) +(+(x,y),z) -> +(x,+(y,z)))";
        let trs = parse_trs(text).unwrap();
        let printed = print_trs(&trs);
        let again = parse_trs(&printed).unwrap();
        assert!(again.same_rules(&trs));
        assert_eq!(again.labels(), trs.labels());
        assert_eq!(print_trs(&again), printed);
    }
}
