#![allow(dead_code)]

pub mod gen;
pub mod laws;
pub mod peaks;

use confluence::rewriting::Trs;
use confluence::syntax::parse_rule;

pub const VARS: &[&str] = &["x", "y", "z"];

pub const ADD1: (&str, &str) = ("add1", "+(0,y) -> y");
pub const ADD2: (&str, &str) = ("add2", "+(s(x),y) -> s(+(x,y))");
pub const ADD3: (&str, &str) = ("add3", "+(x,0) -> x");
pub const ADD4: (&str, &str) = ("add4", "+(x,s(y)) -> s(+(x,y))");
pub const ADD4P: (&str, &str) = ("add4'", "+(y,s(x)) -> s(+(x,y))");
pub const ADD5: (&str, &str) = ("add5", "+(x,s(y)) -> +(s(x),y)");
pub const C: (&str, &str) = ("C", "+(x,y) -> +(y,x)");
pub const A: (&str, &str) = ("A", "+(+(x,y),z) -> +(x,+(y,z))");
pub const DBL: (&str, &str) = ("dbl", "dbl(x) -> +(x,x)");
pub const SS1: (&str, &str) = ("ss1", "s(x) -> s(s(x))");
pub const SS2: (&str, &str) = ("ss2", "s(s(x)) -> s(x)");

pub const R8A: (&str, &str) = ("a", "f(g(x),g(y)) -> f(g(x),h(y))");
pub const R8B: (&str, &str) = ("b", "f(h(x),g(y)) -> f(g(x),g(y))");
pub const R8C: (&str, &str) = ("c", "f(g(x),h(y)) -> f(x,y)");
pub const R8D: (&str, &str) = ("d", "f(h(x),h(y)) -> f(y,x)");
pub const R8E: (&str, &str) = ("e", "f(x,y) -> f(y,x)");
pub const R8F: (&str, &str) = ("f", "g(x) -> h(x)");
pub const R8G: (&str, &str) = ("g", "h(x) -> g(x)");

/// `CP(S,S)` for the R3 partition.
pub const R3_CP_SS: &[(&str, &str)] = &[
    ("0", "0"),
    ("s(y)", "s(+(0,y))"),
    ("s(+(x,0))", "s(x)"),
    ("s(x)", "s(+(x,0))"),
    ("s(+(0,y))", "s(y)"),
    ("s(+(x,s(y)))", "s(+(s(x),y))"),
    ("s(+(s(x),y))", "s(+(x,s(y)))"),
];

/// `CP(S, P ∪ P⁻¹)` for the R3 partition.
pub const R3_CP_SP: &[(&str, &str)] = &[
    ("y", "+(y,0)"),
    ("+(y,z)", "+(0,+(y,z))"),
    ("+(y,z)", "+(+(0,y),z)"),
    ("+(x,z)", "+(+(x,0),z)"),
    ("s(+(x,y))", "+(y,s(x))"),
    ("+(s(+(x,y)),z)", "+(s(x),+(y,z))"),
    ("s(+(x,+(y,z)))", "+(+(s(x),y),z)"),
    ("+(x,s(+(y,z)))", "+(+(x,s(y)),z)"),
    ("x", "+(0,x)"),
    ("+(x,y)", "+(x,+(y,0))"),
    ("+(y,z)", "+(y,+(0,z))"),
    ("+(x,y)", "+(+(x,y),0)"),
    ("s(+(x,y))", "+(s(y),x)"),
    ("s(+(+(x,y),z))", "+(x,+(y,s(z)))"),
    ("+(s(+(x,y)),z)", "+(x,+(s(y),z))"),
    ("+(x,s(+(y,z)))", "+(+(x,y),s(z))"),
];

pub fn trs(rules: &[(&str, &str)]) -> Trs {
    rules
        .iter()
        .map(|(l, r)| parse_rule(l, r, VARS).unwrap())
        .collect()
}

/// A named example system with the partition the criteria are checked on.
pub struct Example {
    pub name: &'static str,
    pub s: Trs,
    pub p: Trs,
}

impl Example {
    pub fn all(&self) -> Trs {
        self.s.union(&self.p)
    }
}

pub fn r1() -> Example {
    Example {
        name: "R1",
        s: trs(&[]),
        p: trs(&[C, A]),
    }
}

pub fn r2() -> Example {
    Example {
        name: "R2",
        s: trs(&[ADD1, ADD2]),
        p: trs(&[C, A]),
    }
}

pub fn r3() -> Example {
    Example {
        name: "R3",
        s: trs(&[ADD1, ADD2, ADD3, ADD4]),
        p: trs(&[C, A]),
    }
}

pub fn r4() -> Example {
    Example {
        name: "R4",
        s: trs(&[ADD1, ADD2, ADD3, ADD4, DBL]),
        p: trs(&[C, A]),
    }
}

pub fn r5() -> Example {
    Example {
        name: "R5",
        s: trs(&[ADD1, ADD2, ADD3, ADD4]),
        p: trs(&[C, A, SS1, SS2]),
    }
}

pub fn r6() -> Example {
    Example {
        name: "R6",
        s: trs(&[ADD1, ADD2, ADD3, ADD5, DBL]),
        p: trs(&[C, A]),
    }
}

pub fn r7() -> Example {
    Example {
        name: "R7",
        s: trs(&[ADD1, ADD2, ADD3, ADD4, DBL]),
        p: trs(&[C, A, SS1, SS2]),
    }
}

pub fn r8() -> Example {
    Example {
        name: "R8",
        s: trs(&[R8A, R8B, R8C, R8D]),
        p: trs(&[R8E, R8F, R8G]),
    }
}

pub fn examples() -> Vec<Example> {
    vec![r1(), r2(), r3(), r4(), r5(), r6(), r7(), r8()]
}
