use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

/// Multivariate polynomial with integer coefficients. A monomial is the
/// sorted list of its variable indices, repeated for powers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, i64>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: i64) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: u32) -> Poly {
        let mut p = Poly::zero();
        p.add_term(vec![v], 1);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<u32>, i64)>) -> Poly {
        let mut p = Poly::zero();
        for (mut m, c) in terms {
            m.sort_unstable();
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Vec<u32>, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn constant_term(&self) -> i64 {
        self.terms.get(&Vec::new()).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self.terms.keys().flatten().copied().collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|c| *c >= 0)
    }

    /// Replaces each variable `v` by `f(v)`.
    pub fn substitute(&self, f: &impl Fn(u32) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut prod = Poly::constant(*c);
            for v in m {
                prod = &prod * &f(*v);
            }
            out = &out + &prod;
        }
        out
    }

    /// `p(x₁+1, …, x_n+1)`: moves the carrier from ℕ≥1 to ℕ.
    pub fn shifted(&self) -> Poly {
        self.substitute(&|v| &Poly::var(v) + &Poly::constant(1))
    }

    pub fn eval(&self, assignment: &impl Fn(u32) -> i64) -> i64 {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().fold(*c, |acc, v| acc * assignment(*v)))
            .sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -*c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                m.extend(m2.iter().copied());
                m.sort_unstable();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    /// Prints `2*x0*x1 + x0 + 3`; variables are written `x<index>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first, constant last
        let mut items: Vec<(&Vec<u32>, &i64)> = self.terms.iter().collect();
        items.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        for (i, (m, c)) in items.into_iter().enumerate() {
            let c = *c;
            if i > 0 {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            let vars: Vec<String> = m.iter().map(|v| format!("x{v}")).collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Parses the [`fmt::Display`] output back.
pub fn parse_poly(text: &str) -> Option<Poly> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut rest = text;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r;
    }
    loop {
        let (chunk, next) = match rest.find([' ']) {
            Some(i) => (&rest[..i], Some(rest[i..].trim_start())),
            None => (rest, None),
        };
        let mut coef = sign;
        let mut mono = Vec::new();
        for factor in chunk.split('*') {
            if let Some(idx) = factor.strip_prefix('x') {
                mono.push(idx.parse().ok()?);
            } else {
                coef *= factor.parse::<i64>().ok()?;
            }
        }
        terms.push((mono, coef));
        let Some(next) = next else { break };
        let (op, after) = next.split_at(1);
        sign = match op {
            "+" => 1,
            "-" => -1,
            _ => return None,
        };
        rest = after.trim_start();
    }
    Some(Poly::from_terms(terms))
}
