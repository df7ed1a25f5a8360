use std::collections::BTreeMap;
use std::fmt;

use super::{Term, Var};

/// A finite map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        let mut s = Self::new();
        for (v, t) in pairs {
            s.insert(v, t);
        }
        s
    }

    /// Binds `v`. Trivial bindings `v ↦ v` are dropped so the domain stays minimal.
    pub fn insert(&mut self, v: Var, t: Term) {
        if t.as_var() == Some(&v) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, t);
        }
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => {
                Term::app(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// `self` followed by `then`: `t(self.then(other)) = (t self) other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &self.map {
            out.insert(v.clone(), other.apply(t));
        }
        for (v, t) in &other.map {
            if !self.map.contains_key(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        out
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            if let Some(t) = self.map.get(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| self.apply(t) == *t)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (v, t)) in self.map.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        write!(f, "}}")
    }
}
