//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Precedence from tightest to loosest: `~`, `&`, `|`, `->`, `<->`. Every
//! binary operator associates to the left. `!` is accepted as an alias of
//! `~`.

use crate::error::{DafError, Result};
use crate::formula::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer {
    tokens: Vec<(Tok, usize, usize)>,
}

fn lex(text: &str, line: usize, col_offset: usize) -> Result<Lexer> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    // (line, column) of each char, 1-based
    let mut positions = Vec::with_capacity(chars.len() + 1);
    let (mut l, mut c) = (line, col_offset + 1);
    for &ch in &chars {
        positions.push((l, c));
        if ch == '\n' {
            l += 1;
            c = 1;
        } else {
            c += 1;
        }
    }
    positions.push((l, c));

    while i < chars.len() {
        let ch = chars[i];
        let (pl, pc) = positions[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match ch {
            '~' | '!' => {
                i += 1;
                Tok::Not
            }
            '&' => {
                i += 1;
                Tok::And
            }
            '|' => {
                i += 1;
                Tok::Or
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 2;
                Tok::Implies
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                i += 3;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    w if Atom::is_valid_name(w) => Tok::Ident(word),
                    _ => {
                        return Err(DafError::syntax(
                            pl,
                            pc,
                            format!(
                                "`{word}` is not a valid atom (atoms match [a-z][a-zA-Z0-9_]*)"
                            ),
                        ))
                    }
                }
            }
            other => {
                return Err(DafError::syntax(
                    pl,
                    pc,
                    format!("unexpected character `{other}`"),
                ));
            }
        };
        tokens.push((tok, pl, pc));
    }
    let (el, ec) = positions[chars.len()];
    tokens.push((Tok::End, el, ec));
    Ok(Lexer { tokens })
}

struct Parser {
    tokens: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> DafError {
        let (_, line, column) = &self.tokens[self.pos];
        DafError::syntax(*line, *column, message)
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula> {
        let mut lhs = self.or()?;
        while *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.or()?;
            lhs = Formula::implies(lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(
                        self.error(format!("expected `)`, found {}", self.peek().describe()))
                    );
                }
                self.bump();
                Ok(inner)
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }
}

/// Parse a propositional formula.
pub fn parse_formula(text: &str) -> Result<Formula> {
    parse_formula_at(text, 1, 0)
}

/// Parse a formula that starts at `line`, `col_offset` characters into the
/// line; error positions are reported relative to the enclosing text.
pub(crate) fn parse_formula_at(text: &str, line: usize, col_offset: usize) -> Result<Formula> {
    let lexer = lex(text, line, col_offset)?;
    let mut parser = Parser {
        tokens: lexer.tokens,
        pos: 0,
    };
    if *parser.peek() == Tok::End {
        return Err(parser.error("empty formula"));
    }
    let formula = parser.iff()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(format!("unexpected {}", parser.peek().describe())));
    }
    Ok(formula)
}
