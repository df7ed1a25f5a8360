use std::fmt;

/// A path into a term. Argument indices are 1-based; the empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_path(path: Vec<usize>) -> Self {
        assert!(path.iter().all(|&i| i >= 1), "argument indices are 1-based");
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    /// `self.other`
    pub fn concat(&self, other: &Position) -> Self {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        Position(p)
    }

    /// Prefix order `self ≤ other`.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Strict prefix order `self < other`.
    pub fn is_strict_prefix_of(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    pub fn is_parallel_to(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// The position `q` with `prefix.q = self`, if `prefix ≤ self`.
    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| Position(rest.to_vec()))
    }

    /// Parses the `Display` form (`ε`, `e`, or dot-separated indices).
    pub fn parse(text: &str) -> Option<Position> {
        let text = text.trim();
        if text == "ε" || text == "e" || text.is_empty() {
            return Some(Position::root());
        }
        let mut path = Vec::new();
        for part in text.split('.') {
            let i: usize = part.parse().ok()?;
            if i == 0 {
                return None;
            }
            path.push(i);
        }
        Some(Position(path))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// True if the positions are pairwise parallel.
pub fn pairwise_parallel(ps: &[Position]) -> bool {
    for (i, p) in ps.iter().enumerate() {
        for q in &ps[i + 1..] {
            if !p.is_parallel_to(q) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_parallelism() {
        let e = Position::root();
        let p1 = Position::from_path(vec![1]);
        let p12 = Position::from_path(vec![1, 2]);
        let p2 = Position::from_path(vec![2]);
        assert!(e.is_prefix_of(&p12));
        assert!(p1.is_strict_prefix_of(&p12));
        assert!(!p1.is_strict_prefix_of(&p1));
        assert!(p12.is_parallel_to(&p2));
        assert!(!p1.is_parallel_to(&p12));
        assert_eq!(p12.strip_prefix(&p1), Some(Position::from_path(vec![2])));
        assert_eq!(p2.strip_prefix(&p1), None);
    }

    #[test]
    fn display_round_trip() {
        for p in [Position::root(), Position::from_path(vec![2, 1, 3])] {
            assert_eq!(Position::parse(&p.to_string()), Some(p));
        }
        assert_eq!(Position::parse("0"), None);
    }
}
