//! Premise sets and the line-oriented knowledge-base format.
//!
//! ```text
//! # comment
//! fact p & q
//! constraint ~(r & s)
//! ob p => r
//! ob q =>[2] t
//! ```

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DafError, Result};
use crate::formula::{Atom, Formula};
use crate::parser::parse_formula_at;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Conditional {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub priority: Option<u32>,
}

impl Conditional {
    pub fn new(antecedent: Formula, consequent: Formula) -> Self {
        Conditional {
            antecedent,
            consequent,
            priority: None,
        }
    }

    pub fn with_priority(mut self, priority: u32) -> Self {
        self.priority = Some(priority);
        self
    }
}

impl fmt::Display for Conditional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.priority {
            Some(n) => write!(f, "{} =>[{}] {}", self.antecedent, n, self.consequent),
            None => write!(f, "{} => {}", self.antecedent, self.consequent),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Premise {
    Fact(Formula),
    Constraint(Formula),
    Conditional(Conditional),
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::Fact(a) => write!(f, "fact {a}"),
            Premise::Constraint(a) => write!(f, "constraint {a}"),
            Premise::Conditional(c) => write!(f, "ob {c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbOptions {
    /// Treat plain facts as settled, so they feed constraint arguments.
    pub facts_settled: bool,
    /// Require a priority on every conditional.
    pub prioritized: bool,
}

impl Default for KbOptions {
    fn default() -> Self {
        KbOptions {
            facts_settled: true,
            prioritized: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    premises: Vec<Premise>,
    facts: Vec<Formula>,
    constraints: Vec<Formula>,
    conditionals: Vec<Conditional>,
    options: KbOptions,
}

impl KnowledgeBase {
    pub fn new(options: KbOptions) -> Self {
        KnowledgeBase {
            options,
            ..Default::default()
        }
    }

    /// Build from premises, dropping structural duplicates. Validates
    /// priorities when `options.prioritized` is set.
    pub fn from_premises(
        premises: impl IntoIterator<Item = Premise>,
        options: KbOptions,
    ) -> Result<Self> {
        let mut kb = KnowledgeBase::new(options);
        for premise in premises {
            kb.push(premise);
        }
        kb.validate()?;
        Ok(kb)
    }

    /// Appends a premise unless an equal one is already present. Returns
    /// whether it was added.
    pub fn push(&mut self, premise: Premise) -> bool {
        if self.premises.contains(&premise) {
            return false;
        }
        match &premise {
            Premise::Fact(a) => self.facts.push(a.clone()),
            Premise::Constraint(a) => self.constraints.push(a.clone()),
            Premise::Conditional(c) => self.conditionals.push(c.clone()),
        }
        self.premises.push(premise);
        true
    }

    pub fn premises(&self) -> &[Premise] {
        &self.premises
    }

    /// Γ^P
    pub fn facts(&self) -> &[Formula] {
        &self.facts
    }

    /// Bodies of the constraints in Γ^□.
    pub fn constraints(&self) -> &[Formula] {
        &self.constraints
    }

    /// Γ^⇒, in input order. Argument constituents refer to conditionals by
    /// their index in this slice.
    pub fn conditionals(&self) -> &[Conditional] {
        &self.conditionals
    }

    pub fn options(&self) -> KbOptions {
        self.options
    }

    pub fn set_options(&mut self, options: KbOptions) {
        self.options = options;
    }

    pub fn is_empty(&self) -> bool {
        self.premises.is_empty()
    }

    pub fn len(&self) -> usize {
        self.premises.len()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut atoms = BTreeSet::new();
        for f in self.facts.iter().chain(&self.constraints) {
            f.collect_atoms(&mut atoms);
        }
        for c in &self.conditionals {
            c.antecedent.collect_atoms(&mut atoms);
            c.consequent.collect_atoms(&mut atoms);
        }
        atoms
    }

    pub fn is_fully_prioritized(&self) -> bool {
        self.conditionals.iter().all(|c| c.priority.is_some())
    }

    pub fn max_priority(&self) -> Option<u32> {
        self.conditionals.iter().filter_map(|c| c.priority).max()
    }

    pub fn validate(&self) -> Result<()> {
        if self.options.prioritized {
            self.require_priorities()?;
        }
        Ok(())
    }

    pub fn require_priorities(&self) -> Result<()> {
        match self.conditionals.iter().find(|c| c.priority.is_none()) {
            Some(c) => Err(DafError::validation(
                None,
                format!("missing priority on conditional `{c}`"),
            )),
            None => Ok(()),
        }
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for premise in &self.premises {
            writeln!(f, "{premise}")?;
        }
        Ok(())
    }
}

/// Parse the knowledge-base format with default options.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase> {
    parse_kb_with(text, KbOptions::default())
}

pub fn parse_kb_with(text: &str, options: KbOptions) -> Result<KnowledgeBase> {
    let mut kb = KnowledgeBase::new(options);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let (keyword, rest) = match trimmed.find(char::is_whitespace) {
            Some(pos) => (&trimmed[..pos], &trimmed[pos..]),
            None => (trimmed.trim_end(), ""),
        };
        let body_col = indent + keyword.len();
        let premise = match keyword {
            "fact" => Premise::Fact(body(rest, line_no, body_col)?),
            "constraint" => Premise::Constraint(body(rest, line_no, body_col)?),
            "ob" => Premise::Conditional(conditional(rest, line_no, body_col)?),
            other => {
                return Err(DafError::syntax(
                    line_no,
                    indent + 1,
                    format!("unknown premise kind `{other}` (expected fact, constraint or ob)"),
                ))
            }
        };
        if options.prioritized {
            if let Premise::Conditional(c) = &premise {
                if c.priority.is_none() {
                    return Err(DafError::validation(
                        Some(line_no),
                        format!("missing priority on conditional `{c}`"),
                    ));
                }
            }
        }
        kb.push(premise);
    }
    Ok(kb)
}

/// Parse a query of the form `O <formula>`.
pub fn parse_query(text: &str) -> Result<Formula> {
    let trimmed = text.trim_start();
    let offset = text.len() - trimmed.len();
    let rest = trimmed
        .strip_prefix('O')
        .filter(|r| r.starts_with(|c: char| c.is_whitespace() || c == '('))
        .ok_or_else(|| DafError::syntax(1, offset + 1, "a query has the form `O <formula>`"))?;
    reject_modal(rest, 1, offset + 1)?;
    parse_formula_at(rest, 1, offset + 1)
}

fn body(text: &str, line: usize, col: usize) -> Result<Formula> {
    reject_modal(text, line, col)?;
    parse_formula_at(text, line, col)
}

fn conditional(text: &str, line: usize, col: usize) -> Result<Conditional> {
    let arrow = text.find("=>").ok_or_else(|| {
        DafError::syntax(line, col + text.len() + 1, "expected `=>` in conditional")
    })?;
    let lhs = &text[..arrow];
    let mut rest = &text[arrow + 2..];
    let mut rest_col = col + arrow + 2;
    let mut priority = None;
    if let Some(after) = rest.strip_prefix('[') {
        let close = after.find(']').ok_or_else(|| {
            DafError::syntax(line, rest_col + 1, "unterminated priority, expected `]`")
        })?;
        let digits = after[..close].trim();
        let n: u32 = digits.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            DafError::syntax(
                line,
                rest_col + 2,
                format!("priority must be a positive integer, got `{digits}`"),
            )
        })?;
        priority = Some(n);
        rest = &after[close + 1..];
        rest_col += close + 2;
    }
    reject_modal(lhs, line, col)?;
    reject_modal(rest, line, rest_col)?;
    Ok(Conditional {
        antecedent: parse_formula_at(lhs, line, col)?,
        consequent: parse_formula_at(rest, line, rest_col)?,
        priority,
    })
}

/// Bodies of premises and queries must be purely propositional.
fn reject_modal(text: &str, line: usize, col: usize) -> Result<()> {
    let modal = text.find("=>").or_else(|| text.find("[]")).or_else(|| {
        text.char_indices()
            .find(|&(i, c)| {
                c == 'O'
                    && text[..i]
                        .chars()
                        .last()
                        .is_none_or(|p| !p.is_ascii_alphanumeric() && p != '_')
                    && text[i + 1..]
                        .chars()
                        .next()
                        .is_none_or(|n| n.is_whitespace() || n == '(')
            })
            .map(|(i, _)| i)
    });
    match modal {
        Some(pos) => Err(DafError::validation(
            Some(line),
            format!(
                "column {}: premise and query bodies must be propositional (no O, [] or => inside)",
                col + pos + 1
            ),
        )),
        None => Ok(()),
    }
}
