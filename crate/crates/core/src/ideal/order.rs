use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    DegRevLex,
}

impl OrderKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lex" => Some(OrderKind::Lex),
            "degrevlex" | "grevlex" => Some(OrderKind::DegRevLex),
            _ => None,
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderKind::Lex => write!(f, "lex"),
            OrderKind::DegRevLex => write!(f, "degrevlex"),
        }
    }
}

/// Monomial order over an explicit variable priority list (first = largest).
///
/// With `eliminate = k > 0` this is the block order that first compares the
/// leading `k` variables by degree-reverse-lexicographic order and breaks ties
/// with `kind` on the remaining variables. Such an order eliminates the first
/// block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    vars: Vec<String>,
    eliminate: usize,
}

impl MonomialOrder {
    pub fn new<I, S>(kind: OrderKind, vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = Vec::new();
        for s in vars {
            let s = s.into();
            if !v.contains(&s) {
                v.push(s);
            }
        }
        Self { kind, vars: v, eliminate: 0 }
    }

    pub fn degrevlex<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(OrderKind::DegRevLex, vars)
    }

    pub fn lex<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(OrderKind::Lex, vars)
    }

    /// Block order eliminating `block`, which is placed before `self`'s variables.
    pub fn eliminating(&self, block: &[String]) -> Self {
        let mut vars: Vec<String> = block.to_vec();
        vars.extend(self.vars.iter().filter(|v| !block.contains(v)).cloned());
        Self { kind: self.kind, vars, eliminate: block.len() }
    }

    /// Same order with `more` appended as the smallest variables.
    pub fn with_vars<I: IntoIterator<Item = String>>(&self, more: I) -> Self {
        let mut out = self.clone();
        for v in more {
            if !out.vars.contains(&v) {
                out.vars.push(v);
            }
        }
        out
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn eliminated(&self) -> &[String] {
        &self.vars[..self.eliminate]
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn descriptor(&self) -> String {
        if self.eliminate > 0 {
            format!("elim{}:{}({})", self.eliminate, self.kind, self.vars.join(","))
        } else {
            format!("{}({})", self.kind, self.vars.join(","))
        }
    }

    pub(crate) fn cmp_exp(&self, a: &[u32], b: &[u32]) -> Ordering {
        let k = self.eliminate;
        if k > 0 {
            let ord = degrevlex(&a[..k], &b[..k]);
            if ord != Ordering::Equal {
                return ord;
            }
            return self.cmp_kind(&a[k..], &b[k..]);
        }
        self.cmp_kind(a, b)
    }

    fn cmp_kind(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self.kind {
            OrderKind::Lex => a.cmp(b),
            OrderKind::DegRevLex => degrevlex(a, b),
        }
    }
}

fn degrevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for (x, y) in a.iter().zip(b).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            ord => return ord.reverse(),
        }
    }
    Ordering::Equal
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrevlex_basics() {
        let o = MonomialOrder::degrevlex(["x", "y", "z"]);
        // x*z < y^2 in degrevlex with x > y > z
        assert_eq!(o.cmp_exp(&[1, 0, 1], &[0, 2, 0]), Ordering::Less);
        assert_eq!(o.cmp_exp(&[1, 1, 0], &[1, 0, 1]), Ordering::Greater);
        assert_eq!(o.cmp_exp(&[0, 0, 3], &[1, 0, 0]), Ordering::Greater);
    }

    #[test]
    fn lex_basics() {
        let o = MonomialOrder::lex(["x", "y"]);
        assert_eq!(o.cmp_exp(&[1, 0], &[0, 5]), Ordering::Greater);
    }

    #[test]
    fn elimination_block_dominates() {
        let o = MonomialOrder::degrevlex(["x", "y"]).eliminating(&["z".to_string()]);
        assert_eq!(o.vars(), &["z", "x", "y"]);
        assert_eq!(o.cmp_exp(&[1, 0, 0], &[0, 5, 5]), Ordering::Greater);
        assert_eq!(o.cmp_exp(&[0, 2, 0], &[0, 1, 0]), Ordering::Greater);
    }
}
