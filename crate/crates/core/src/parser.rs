//! Text format for probabilistic knowledge bases and queries.
//!
//! ```text
//! kb      := { line }
//! line    := [ prob "::" ] axiom | comment | blank
//! axiom   := concept "<=" concept | ind ":" concept | "(" ind "," ind ")" ":" role
//! concept := "Top" | "Bottom" | name | "not" concept
//!          | concept "and" concept | concept "or" concept
//!          | "exists" role "." concept | "forall" role "." concept
//!          | "(" concept ")"
//! ```
//!
//! `not` and the quantifiers bind tighter than `and`, which binds tighter
//! than `or`. Chains of `and`/`or` nest to the right. `#` starts a comment.

use std::fmt;

use thiserror::Error;

use crate::kb::{AnnotatedAxiom, Axiom, Concept, KnowledgeBase, Query};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

const KEYWORDS: &[&str] = &["Top", "Bottom", "not", "and", "or", "exists", "forall"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    ColonColon,
    SubClass,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::ColonColon => f.write_str("`::`"),
            Tok::SubClass => f.write_str("`<=`"),
        }
    }
}

struct Lexer;

impl Lexer {
    /// Tokens with their 1-based starting column. Stops at `#`.
    fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
        let chars: Vec<char> = line.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '(' => {
                    out.push((Tok::LParen, col));
                    i += 1;
                }
                ')' => {
                    out.push((Tok::RParen, col));
                    i += 1;
                }
                ',' => {
                    out.push((Tok::Comma, col));
                    i += 1;
                }
                ':' => {
                    if chars.get(i + 1) == Some(&':') {
                        out.push((Tok::ColonColon, col));
                        i += 2;
                    } else {
                        out.push((Tok::Colon, col));
                        i += 1;
                    }
                }
                '<' => {
                    if chars.get(i + 1) == Some(&'=') {
                        out.push((Tok::SubClass, col));
                        i += 2;
                    } else {
                        return Err(err(line_no, col, "expected `<=`"));
                    }
                }
                c if c.is_ascii_digit() || (c == '.' && next_is_digit(&chars, i)) => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i < chars.len() && chars[i] == '.' {
                        i += 1;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                    if i < chars.len() && is_ident_char(chars[i]) {
                        return Err(err(line_no, i + 1, "malformed number"));
                    }
                    out.push((Tok::Number(chars[start..i].iter().collect()), col));
                }
                '.' => {
                    out.push((Tok::Dot, col));
                    i += 1;
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                    out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                }
                other => {
                    return Err(err(line_no, col, format!("unexpected character `{other}`")));
                }
            }
        }
        Ok(out)
    }
}

fn next_is_digit(chars: &[char], i: usize) -> bool {
    chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Recursive-descent parser over the tokens of a single line.
struct LineParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    /// Column reported for errors at end of line.
    eol_column: usize,
}

impl LineParser {
    fn new(text: &str, line: usize) -> Result<Self, ParseError> {
        let toks = Lexer::tokenize(text, line)?;
        let content_len = text
            .split('#')
            .next()
            .unwrap_or("")
            .trim_end()
            .chars()
            .count();
        Ok(LineParser {
            toks,
            pos: 0,
            line,
            eol_column: content_len.max(1),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.eol_column)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        err(self.line, self.column(), message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {expected}, found {t}")),
            None => self.error(format!("expected {expected}, found end of line")),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.unexpected("end of line"))
        } else {
            Ok(())
        }
    }

    /// A non-keyword identifier: individual, role or concept name.
    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn probability(&mut self) -> Result<Option<f64>, ParseError> {
        let Some(Tok::Number(text)) = self.peek().cloned() else {
            return Ok(None);
        };
        let col = self.column();
        self.pos += 1;
        let p: f64 = text
            .parse()
            .map_err(|_| err(self.line, col, format!("invalid probability `{text}`")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(err(
                self.line,
                col,
                format!("probability {text} outside [0, 1]"),
            ));
        }
        self.expect(Tok::ColonColon, "`::` after probability")?;
        Ok(Some(p))
    }

    fn axiom(&mut self) -> Result<Axiom, ParseError> {
        // `(a, b) : R`
        if self.peek() == Some(&Tok::LParen)
            && matches!(self.peek_at(1), Some(Tok::Ident(_)))
            && self.peek_at(2) == Some(&Tok::Comma)
        {
            self.pos += 1;
            let subject = self.name("individual")?;
            self.expect(Tok::Comma, "`,`")?;
            let object = self.name("individual")?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::Colon, "`:`")?;
            let role = self.name("role name")?;
            return Ok(Axiom::role(subject, object, role));
        }
        // `a : C`
        if matches!(self.peek(), Some(Tok::Ident(_))) && self.peek_at(1) == Some(&Tok::Colon) {
            let individual = self.name("individual")?;
            self.pos += 1;
            let concept = self.concept()?;
            return Ok(Axiom::instance(individual, concept));
        }
        let sub = self.concept()?;
        self.expect(Tok::SubClass, "`<=`")?;
        let sup = self.concept()?;
        Ok(Axiom::subclass(sub, sup))
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        let left = self.conjunction()?;
        if self.at_keyword("or") {
            self.pos += 1;
            let right = self.concept()?;
            Ok(Concept::or(left, right))
        } else {
            Ok(left)
        }
    }

    fn conjunction(&mut self) -> Result<Concept, ParseError> {
        let left = self.unary()?;
        if self.at_keyword("and") {
            self.pos += 1;
            let right = self.conjunction()?;
            Ok(Concept::and(left, right))
        } else {
            Ok(left)
        }
    }

    fn unary(&mut self) -> Result<Concept, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let c = self.concept()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            Some(Tok::Ident(word)) => match word.as_str() {
                "Top" => {
                    self.pos += 1;
                    Ok(Concept::Top)
                }
                "Bottom" => {
                    self.pos += 1;
                    Ok(Concept::Bottom)
                }
                "not" => {
                    self.pos += 1;
                    Ok(Concept::not(self.unary()?))
                }
                "exists" | "forall" => {
                    self.pos += 1;
                    let role = self.name("role name")?;
                    self.expect(Tok::Dot, "`.`")?;
                    let body = self.unary()?;
                    Ok(if word == "exists" {
                        Concept::exists(role, body)
                    } else {
                        Concept::forall(role, body)
                    })
                }
                "and" | "or" => Err(self.unexpected("concept")),
                _ => {
                    self.bump();
                    Ok(Concept::Atomic(word))
                }
            },
            _ => Err(self.unexpected("concept")),
        }
    }
}

fn is_blank(line: &str) -> bool {
    let content = line.split('#').next().unwrap_or("");
    content.trim().is_empty()
}

/// Parse a knowledge base; also returns the 1-based source line of each axiom.
pub fn parse_kb_with_lines(text: &str) -> Result<(KnowledgeBase, Vec<usize>), ParseError> {
    let mut axioms = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if is_blank(raw) {
            continue;
        }
        let mut p = LineParser::new(raw, line_no)?;
        let probability = p.probability()?;
        let axiom = p.axiom()?;
        p.finish()?;
        axioms.push(AnnotatedAxiom { axiom, probability });
        lines.push(line_no);
    }
    Ok((KnowledgeBase::new(axioms), lines))
}

/// One axiom per non-blank, non-comment line, in file order.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    parse_kb_with_lines(text).map(|(kb, _)| kb)
}

/// Parse `a : C` or `C <= D`.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let text = text.trim_end_matches(['\r', '\n']);
    if is_blank(text) {
        return Err(err(1, 1, "empty query"));
    }
    let mut p = LineParser::new(text, 1)?;
    let query = match p.axiom()? {
        Axiom::ConceptAssertion {
            individual,
            concept,
        } => Query::instance(individual, concept),
        Axiom::SubClassOf { sub, sup } => Query::subclass(sub, sup),
        Axiom::RoleAssertion { .. } => {
            return Err(err(1, 1, "role assertion queries are not supported"));
        }
    };
    p.finish()?;
    Ok(query)
}

/// Inverse of [`parse_kb`]: one line per axiom, LF separated.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for ax in kb.axioms() {
        out.push_str(&ax.to_string());
        out.push('\n');
    }
    out
}
