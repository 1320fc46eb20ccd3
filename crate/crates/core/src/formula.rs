//! Propositional formulas and the syntactic operations the argument
//! machinery relies on.
//!
//! Implication and equivalence are parse-time sugar: `A -> B` is stored as
//! `~A | B` and `A <-> B` as `(~A | B) & (~B | A)`. Conjunction is kept as
//! a node of its own so that aggregated conclusions keep a readable shape.
//! Equality is structural everywhere.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A propositional letter. Names follow `[a-z][a-zA-Z0-9_]*`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Self {
        Atom(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && name != "true"
            && name != "false"
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Atom),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Atom::new(name))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    /// Material implication, `~a | b`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// The syntactic complement. With an odd number of leading negations one
    /// is stripped, otherwise one is added, so `p`/`~p` and `~~p`/`~~~p`
    /// pair up and the operation is an involution.
    pub fn complement(&self) -> Formula {
        match self {
            Formula::Not(inner) if self.leading_negations() % 2 == 1 => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    fn leading_negations(&self) -> usize {
        let mut n = 0;
        let mut f = self;
        while let Formula::Not(inner) = f {
            n += 1;
            f = inner;
        }
        n
    }

    /// `a` and `b` are complementary when one is the negation of the other.
    pub fn is_complement_of(&self, other: &Formula) -> bool {
        match (self, other) {
            (Formula::Not(inner), _) if **inner == *other => true,
            (_, Formula::Not(inner)) if **inner == *self => true,
            _ => false,
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// The maximal non-conjunction subformulas reached by descending
    /// through `&` nodes.
    pub fn conjuncts(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_conjuncts(&mut out);
        out
    }

    fn collect_conjuncts(&self, out: &mut BTreeSet<Formula>) {
        match self {
            Formula::And(a, b) => {
                a.collect_conjuncts(out);
                b.collect_conjuncts(out);
            }
            other => {
                out.insert(other.clone());
            }
        }
    }

    /// Evaluate under a total assignment given as a predicate on atoms.
    pub fn eval(&self, value: &impl Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Atom(a) => value(a),
            Formula::Not(f) => !f.eval(value),
            Formula::And(a, b) => a.eval(value) && b.eval(value),
            Formula::Or(a, b) => a.eval(value) || b.eval(value),
        }
    }

    /// Render with Unicode connectives (¬ ∧ ∨ ⊤ ⊥).
    pub fn unicode(&self) -> Unicode<'_> {
        Unicode(self)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, sym: &Symbols) -> fmt::Result {
        match self {
            Formula::Top => f.write_str(sym.top),
            Formula::Bottom => f.write_str(sym.bottom),
            Formula::Atom(a) => f.write_str(a.name()),
            Formula::Not(inner) => {
                f.write_str(sym.not)?;
                write_operand(inner, f, sym, 3)
            }
            Formula::And(a, b) => {
                write_operand(a, f, sym, 2)?;
                f.write_str(sym.and)?;
                write_operand(b, f, sym, 3)
            }
            Formula::Or(a, b) => {
                write_operand(a, f, sym, 1)?;
                f.write_str(sym.or)?;
                write_operand(b, f, sym, 2)
            }
        }
    }
}

/// Writes `g` parenthesized unless its precedence is at least `min`.
fn write_operand(g: &Formula, f: &mut fmt::Formatter<'_>, sym: &Symbols, min: u8) -> fmt::Result {
    if g.precedence() >= min {
        g.write(f, sym)
    } else {
        f.write_str("(")?;
        g.write(f, sym)?;
        f.write_str(")")
    }
}

struct Symbols {
    top: &'static str,
    bottom: &'static str,
    not: &'static str,
    and: &'static str,
    or: &'static str,
}

const ASCII: Symbols = Symbols {
    top: "true",
    bottom: "false",
    not: "~",
    and: " & ",
    or: " | ",
};

const UNICODE: Symbols = Symbols {
    top: "⊤",
    bottom: "⊥",
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
};

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, &ASCII)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, &ASCII)
    }
}

pub struct Unicode<'a>(&'a Formula);

impl fmt::Display for Unicode<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, &UNICODE)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        crate::parser::parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

/// Orders formulas by their ASCII rendering, ties broken structurally.
pub fn canonical_order(a: &Formula, b: &Formula) -> std::cmp::Ordering {
    a.to_string().cmp(&b.to_string()).then_with(|| a.cmp(b))
}

/// Left-associated conjunction of `formulas` in canonical order.
/// Returns `None` for an empty input.
pub fn canonical_conjunction<'a, I>(formulas: I) -> Option<Formula>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut keyed: Vec<(String, &Formula)> =
        formulas.into_iter().map(|f| (f.to_string(), f)).collect();
    keyed.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(y.1)));
    keyed.dedup_by(|x, y| x.1 == y.1);
    let mut iter = keyed.into_iter().map(|(_, f)| f.clone());
    let first = iter.next()?;
    Some(iter.fold(first, Formula::and))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn complement_adds_or_strips_one_negation() {
        assert_eq!(f("p").complement(), f("~p"));
        assert_eq!(f("~p").complement(), f("p"));
        assert_eq!(f("~~p").complement(), f("~~~p"));
        assert_eq!(f("~~~p").complement(), f("~~p"));
        assert_eq!(f("~(p & q)").complement(), f("p & q"));
        for s in ["p", "~p", "~~p", "~~~p", "p | ~q", "~(p | q)"] {
            assert_eq!(f(s).complement().complement(), f(s));
        }
    }

    #[test]
    fn complement_relation_is_symmetric() {
        assert!(f("~q").is_complement_of(&f("q")));
        assert!(f("q").is_complement_of(&f("~q")));
        assert!(!f("q").is_complement_of(&f("r")));
        assert!(!f("~~q").is_complement_of(&f("q")));
    }

    #[test]
    fn rendering_respects_precedence() {
        assert_eq!(f("~(p & q) | r").to_string(), "~(p & q) | r");
        assert_eq!(f("p & (q | r)").to_string(), "p & (q | r)");
        assert_eq!(f("p | (q | r)").to_string(), "p | (q | r)");
        assert_eq!(f("(p | q) | r").to_string(), "p | q | r");
        assert_eq!(f("p & ~q").unicode().to_string(), "p ∧ ¬q");
        assert_eq!(f("true & false").to_string(), "true & false");
    }

    #[test]
    fn canonical_conjunction_sorts_by_rendering() {
        let c = canonical_conjunction([&f("u"), &f("s"), &f("t")]).unwrap();
        assert_eq!(c, f("s & t & u"));
        let c = canonical_conjunction([&f("~q"), &f("q")]).unwrap();
        assert_eq!(c, f("q & ~q"));
        assert_eq!(canonical_conjunction([&f("p")]).unwrap(), f("p"));
        assert!(canonical_conjunction(std::iter::empty()).is_none());
    }

    #[test]
    fn conjuncts_flatten_nested_conjunctions() {
        let got: Vec<_> = f("(s & t) & (u | v)").conjuncts().into_iter().collect();
        assert_eq!(got, vec![f("s"), f("t"), f("u | v")]);
    }

    #[test]
    fn atom_names() {
        assert!(Atom::is_valid_name("p"));
        assert!(Atom::is_valid_name("dog_1A"));
        assert!(!Atom::is_valid_name("P"));
        assert!(!Atom::is_valid_name("1p"));
        assert!(!Atom::is_valid_name("true"));
        assert!(!Atom::is_valid_name(""));
    }
}
