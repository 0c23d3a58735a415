//! LTL formulas over a partitioned set of atomic propositions.
//!
//! Concrete syntax:
//!
//! ```text
//! formula := impl
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := until ("&" until)*
//! until   := unary (("U" | "R") until)?
//! unary   := ("!" | "X" | "F" | "G") unary | atom | "true" | "false" | "(" formula ")"
//! ```

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Whether a proposition is read from the environment or driven by the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropKind {
    Input,
    Output,
}

/// A declared atomic proposition: its kind plus its index within that kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prop {
    pub kind: PropKind,
    pub index: usize,
}

impl Prop {
    pub fn input(index: usize) -> Self {
        Prop { kind: PropKind::Input, index }
    }

    pub fn output(index: usize) -> Self {
        Prop { kind: PropKind::Output, index }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("proposition `{0}` is declared more than once")]
    Duplicate(String),
    #[error("`{0}` is not a valid proposition name")]
    BadName(String),
}

/// The input/output partition `AP = I ∪ O`.
///
/// Concrete letters over `2^AP` are bitmasks: bit `i` is input `i`, bit
/// `|I| + j` is output `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl Partition {
    pub fn new<S: AsRef<str>>(inputs: &[S], outputs: &[S]) -> Result<Self, PartitionError> {
        let inputs: Vec<String> = inputs.iter().map(|s| s.as_ref().to_string()).collect();
        let outputs: Vec<String> = outputs.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = std::collections::HashSet::new();
        for name in inputs.iter().chain(outputs.iter()) {
            if !is_identifier(name) || is_keyword(name) {
                return Err(PartitionError::BadName(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(PartitionError::Duplicate(name.clone()));
            }
        }
        Ok(Partition { inputs, outputs })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_props(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    pub fn lookup(&self, name: &str) -> Option<Prop> {
        if let Some(i) = self.inputs.iter().position(|n| n == name) {
            return Some(Prop::input(i));
        }
        self.outputs.iter().position(|n| n == name).map(Prop::output)
    }

    pub fn name(&self, prop: Prop) -> &str {
        match prop.kind {
            PropKind::Input => &self.inputs[prop.index],
            PropKind::Output => &self.outputs[prop.index],
        }
    }

    /// Bit position of `prop` inside a concrete `2^AP` letter.
    pub fn ap_bit(&self, prop: Prop) -> usize {
        match prop.kind {
            PropKind::Input => prop.index,
            PropKind::Output => self.inputs.len() + prop.index,
        }
    }

    pub fn input_mask(&self) -> u32 {
        (1u32 << self.inputs.len()) - 1
    }

    /// Split a concrete letter into (input valuation, output valuation).
    pub fn split(&self, letter: u32) -> (u32, u32) {
        (letter & self.input_mask(), letter >> self.inputs.len())
    }

    pub fn join(&self, inputs: u32, outputs: u32) -> u32 {
        inputs | (outputs << self.inputs.len())
    }
}

/// LTL abstract syntax.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Prop),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn atom(p: Prop) -> Self {
        Formula::Atom(p)
    }
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }
    pub fn and(f: Formula, g: Formula) -> Self {
        Formula::And(Box::new(f), Box::new(g))
    }
    pub fn or(f: Formula, g: Formula) -> Self {
        Formula::Or(Box::new(f), Box::new(g))
    }
    pub fn implies(f: Formula, g: Formula) -> Self {
        Formula::Implies(Box::new(f), Box::new(g))
    }
    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }
    pub fn until(f: Formula, g: Formula) -> Self {
        Formula::Until(Box::new(f), Box::new(g))
    }
    pub fn release(f: Formula, g: Formula) -> Self {
        Formula::Release(Box::new(f), Box::new(g))
    }
    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }
    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Atom(_) => 1,
            Not(f) | Next(f) | Eventually(f) | Globally(f) => 1 + f.size(),
            And(f, g) | Or(f, g) | Implies(f, g) | Until(f, g) | Release(f, g) => {
                1 + f.size() + g.size()
            }
        }
    }

    pub fn atoms(&self, out: &mut Vec<Prop>) {
        use Formula::*;
        match self {
            True | False => {}
            Atom(p) => {
                if !out.contains(p) {
                    out.push(*p)
                }
            }
            Not(f) | Next(f) | Eventually(f) | Globally(f) => f.atoms(out),
            And(f, g) | Or(f, g) | Implies(f, g) | Until(f, g) | Release(f, g) => {
                f.atoms(out);
                g.atoms(out);
            }
        }
    }

    /// True if negations occur only on atoms and only the core connectives
    /// (and/or/next/until/release) are used.
    pub fn is_nnf(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Atom(_) => true,
            Not(f) => matches!(**f, Atom(_)),
            Next(f) => f.is_nnf(),
            And(f, g) | Or(f, g) | Until(f, g) | Release(f, g) => f.is_nnf() && g.is_nnf(),
            Implies(..) | Eventually(_) | Globally(_) => false,
        }
    }

    pub fn display<'a>(&'a self, partition: &'a Partition) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, partition }
    }
}

/// Negation normal form: negation pushed to atoms, derived operators expanded.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    use Formula::*;
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom(p), false) => Atom(*p),
        (Atom(p), true) => Formula::not(Atom(*p)),
        (Not(g), _) => nnf(g, !neg),
        (And(a, b), false) => Formula::and(nnf(a, false), nnf(b, false)),
        (And(a, b), true) => Formula::or(nnf(a, true), nnf(b, true)),
        (Or(a, b), false) => Formula::or(nnf(a, false), nnf(b, false)),
        (Or(a, b), true) => Formula::and(nnf(a, true), nnf(b, true)),
        (Implies(a, b), false) => Formula::or(nnf(a, true), nnf(b, false)),
        (Implies(a, b), true) => Formula::and(nnf(a, false), nnf(b, true)),
        (Next(g), _) => Formula::next(nnf(g, neg)),
        (Until(a, b), false) => Formula::until(nnf(a, false), nnf(b, false)),
        (Until(a, b), true) => Formula::release(nnf(a, true), nnf(b, true)),
        (Release(a, b), false) => Formula::release(nnf(a, false), nnf(b, false)),
        (Release(a, b), true) => Formula::until(nnf(a, true), nnf(b, true)),
        (Eventually(g), false) => Formula::until(True, nnf(g, false)),
        (Eventually(g), true) => Formula::release(False, nnf(g, true)),
        (Globally(g), false) => Formula::release(False, nnf(g, false)),
        (Globally(g), true) => Formula::until(True, nnf(g, true)),
    }
}

/// Fully parenthesized rendering that parses back to the same tree.
pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    partition: &'a Partition,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.formula, self.partition, out)
    }
}

fn write_formula(f: &Formula, part: &Partition, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    use Formula::*;
    let bin = |out: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula| {
        write!(out, "(")?;
        write_formula(a, part, out)?;
        write!(out, " {op} ")?;
        write_formula(b, part, out)?;
        write!(out, ")")
    };
    let un = |out: &mut fmt::Formatter<'_>, op: &str, a: &Formula| {
        // a letter operator glued to a following letter would lex as one name
        write!(out, "{op}")?;
        if op != "!" {
            write!(out, " ")?;
        }
        write_formula(a, part, out)
    };
    match f {
        True => write!(out, "true"),
        False => write!(out, "false"),
        Atom(p) => write!(out, "{}", part.name(*p)),
        Not(a) => un(out, "!", a),
        Next(a) => un(out, "X", a),
        Eventually(a) => un(out, "F", a),
        Globally(a) => un(out, "G", a),
        And(a, b) => bin(out, a, "&", b),
        Or(a, b) => bin(out, a, "|", b),
        Implies(a, b) => bin(out, a, "->", b),
        Until(a, b) => bin(out, a, "U", b),
        Release(a, b) => bin(out, a, "R", b),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown atomic proposition `{name}` at offset {position}")]
    UnknownAtom { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::UnknownAtom { position, .. } => {
                *position
            }
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "X" | "F" | "G" | "U" | "R" | "true" | "false")
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let c = bytes[self.pos];
        let tok = match c {
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'-' if bytes.get(self.pos + 1) == Some(&b'>') => {
                self.pos += 2;
                return Ok((Tok::Arrow, start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos + 1;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                let ident = self.src[self.pos..end].to_string();
                self.pos = end;
                return Ok((Tok::Ident(ident), start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: start,
                    expected: "an operator, proposition or parenthesis".into(),
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
    partition: &'a Partition,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, p) = self.lexer.next()?;
        self.tok = t;
        self.tok_pos = p;
        Ok(())
    }

    fn is_ident(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Ident(s) if s == kw)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { position: self.tok_pos, expected: expected.into() })
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.tok == Tok::Arrow {
            self.bump()?;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.tok == Tok::Or {
            self.bump()?;
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.until()?;
        while self.tok == Tok::And {
            self.bump()?;
            acc = Formula::and(acc, self.until()?);
        }
        Ok(acc)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.is_ident("U") {
            self.bump()?;
            return Ok(Formula::until(lhs, self.until()?));
        }
        if self.is_ident("R") {
            self.bump()?;
            return Ok(Formula::release(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.tok.clone() {
            Tok::Not => {
                self.bump()?;
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump()?;
                let f = self.implication()?;
                if self.tok != Tok::RParen {
                    return self.fail("`)`");
                }
                self.bump()?;
                Ok(f)
            }
            Tok::Ident(name) => {
                let pos = self.tok_pos;
                let f = match name.as_str() {
                    "X" | "F" | "G" => {
                        self.bump()?;
                        let arg = self.unary()?;
                        return Ok(match name.as_str() {
                            "X" => Formula::next(arg),
                            "F" => Formula::eventually(arg),
                            _ => Formula::globally(arg),
                        });
                    }
                    "true" => Formula::True,
                    "false" => Formula::False,
                    "U" | "R" => return self.fail("an operand"),
                    _ => match self.partition.lookup(&name) {
                        Some(p) => Formula::Atom(p),
                        None => return Err(ParseError::UnknownAtom { name, position: pos }),
                    },
                };
                self.bump()?;
                Ok(f)
            }
            _ => self.fail("an operand"),
        }
    }
}

/// Parse `text` against the declared partition.
pub fn parse(text: &str, partition: &Partition) -> Result<Formula, ParseError> {
    let mut p = Parser {
        lexer: Lexer { src: text, pos: 0 },
        tok: Tok::End,
        tok_pos: 0,
        partition,
    };
    p.bump()?;
    let f = p.implication()?;
    if p.tok != Tok::End {
        return p.fail("end of formula");
    }
    Ok(f)
}

/// A parsed specification: partition plus formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub partition: Arc<Partition>,
    pub formula: Formula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("line {line}: expected {expected}")]
    Syntax { line: usize, expected: String },
    #[error("line {line}: {source}")]
    Partition { line: usize, source: PartitionError },
    #[error("line {line}, column {column}: {source}")]
    Formula { line: usize, column: usize, source: ParseError },
}

impl SpecError {
    pub fn line(&self) -> usize {
        match self {
            SpecError::Syntax { line, .. }
            | SpecError::Partition { line, .. }
            | SpecError::Formula { line, .. } => *line,
        }
    }
}

fn split_names(value: &str) -> Vec<String> {
    value.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(String::from).collect()
}

impl SpecFile {
    /// Parse the three-line `inputs:` / `outputs:` / `formula:` format.
    /// `overrides` replaces the declared partition when given.
    pub fn parse(
        text: &str,
        overrides: (Option<Vec<String>>, Option<Vec<String>>),
    ) -> Result<SpecFile, SpecError> {
        let mut inputs: Option<(usize, Vec<String>)> = None;
        let mut outputs: Option<(usize, Vec<String>)> = None;
        let mut formula: Option<(usize, usize, String)> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once(':') else {
                return Err(SpecError::Syntax {
                    line,
                    expected: "`inputs:`, `outputs:` or `formula:`".into(),
                });
            };
            match key.trim() {
                "inputs" => inputs = Some((line, split_names(value))),
                "outputs" => outputs = Some((line, split_names(value))),
                "formula" => formula = Some((line, key.len() + 1, value.to_string())),
                _ => {
                    return Err(SpecError::Syntax {
                        line,
                        expected: "`inputs:`, `outputs:` or `formula:`".into(),
                    })
                }
            }
        }
        let (in_line, ins) = inputs.unwrap_or((0, Vec::new()));
        let (out_line, outs) = outputs.unwrap_or((0, Vec::new()));
        let ins = overrides.0.unwrap_or(ins);
        let outs = overrides.1.unwrap_or(outs);
        let partition = Partition::new(&ins, &outs)
            .map_err(|source| SpecError::Partition { line: in_line.max(out_line), source })?;
        let Some((f_line, offset, ftext)) = formula else {
            let last = text.lines().count() + 1;
            return Err(SpecError::Syntax { line: last, expected: "`formula:` line".into() });
        };
        let formula = parse(&ftext, &partition).map_err(|source| SpecError::Formula {
            line: f_line,
            column: offset + source.position() + 1,
            source,
        })?;
        Ok(SpecFile { partition: Arc::new(partition), formula })
    }
}
