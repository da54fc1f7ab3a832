//! CTL formulas: AST, recursive-descent parser, canonical printer, length
//! metric, and the exact-length seeded generator.

use thiserror::Error;

use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Box<CtlFormula>, Box<CtlFormula>),
    EX(Box<CtlFormula>),
    EF(Box<CtlFormula>),
    EG(Box<CtlFormula>),
    AX(Box<CtlFormula>),
    AF(Box<CtlFormula>),
    AG(Box<CtlFormula>),
    EU(Box<CtlFormula>, Box<CtlFormula>),
    AU(Box<CtlFormula>, Box<CtlFormula>),
}

impl CtlFormula {
    pub fn atom(name: &str) -> Self {
        CtlFormula::Atom(name.to_string())
    }

    /// Total AST node count; the formula "length".
    pub fn len(&self) -> usize {
        use CtlFormula::*;
        match self {
            True | False | Atom(_) => 1,
            Not(a) | EX(a) | EF(a) | EG(a) | AX(a) | AF(a) | AG(a) => 1 + a.len(),
            And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => 1 + a.len() + b.len(),
        }
    }

    pub fn depth(&self) -> usize {
        use CtlFormula::*;
        match self {
            True | False | Atom(_) => 1,
            Not(a) | EX(a) | EF(a) | EG(a) | AX(a) | AF(a) | AG(a) => 1 + a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }
}

pub fn formula_length(phi: &CtlFormula) -> usize {
    phi.len()
}

#[derive(Debug, Error, PartialEq)]
pub enum CtlError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid generator arguments: {0}")]
    Generate(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    KwEx,
    KwEf,
    KwEg,
    KwAx,
    KwAf,
    KwAg,
    KwE,
    KwA,
    KwU,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, CtlError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let pos = i;
        let tok = match c {
            b'!' => {
                i += 1;
                Tok::Bang
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'|' => {
                i += 1;
                Tok::Pipe
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    return Err(CtlError::Syntax {
                        pos,
                        msg: "expected `->`".into(),
                    });
                }
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'[' => {
                i += 1;
                Tok::LBracket
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "EX" => Tok::KwEx,
                    "EF" => Tok::KwEf,
                    "EG" => Tok::KwEg,
                    "AX" => Tok::KwAx,
                    "AF" => Tok::KwAf,
                    "AG" => Tok::KwAg,
                    "E" => Tok::KwE,
                    "A" => Tok::KwA,
                    "U" => Tok::KwU,
                    _ if word.chars().next().unwrap().is_ascii_lowercase()
                        && word
                            .chars()
                            .all(|ch| ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '_') =>
                    {
                        Tok::Ident(word.to_string())
                    }
                    _ => {
                        return Err(CtlError::Syntax {
                            pos,
                            msg: format!("unexpected word `{word}`"),
                        })
                    }
                }
            }
            _ => {
                return Err(CtlError::Syntax {
                    pos,
                    msg: format!("unexpected character `{}`", c as char),
                })
            }
        };
        toks.push((tok, pos));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> CtlError {
        CtlError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), CtlError> {
        if self.peek() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    // implies is right-associative and binds loosest
    fn implies(&mut self) -> Result<CtlFormula, CtlError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.idx += 1;
            let rhs = self.implies()?;
            Ok(CtlFormula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<CtlFormula, CtlError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.idx += 1;
            let rhs = self.and()?;
            lhs = CtlFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<CtlFormula, CtlError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.idx += 1;
            let rhs = self.unary()?;
            lhs = CtlFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CtlFormula, CtlError> {
        use CtlFormula::*;
        match self.peek() {
            Some(Tok::Bang) => {
                self.idx += 1;
                Ok(Not(Box::new(self.unary()?)))
            }
            Some(Tok::KwEx) => {
                self.idx += 1;
                Ok(EX(Box::new(self.unary()?)))
            }
            Some(Tok::KwEf) => {
                self.idx += 1;
                Ok(EF(Box::new(self.unary()?)))
            }
            Some(Tok::KwEg) => {
                self.idx += 1;
                Ok(EG(Box::new(self.unary()?)))
            }
            Some(Tok::KwAx) => {
                self.idx += 1;
                Ok(AX(Box::new(self.unary()?)))
            }
            Some(Tok::KwAf) => {
                self.idx += 1;
                Ok(AF(Box::new(self.unary()?)))
            }
            Some(Tok::KwAg) => {
                self.idx += 1;
                Ok(AG(Box::new(self.unary()?)))
            }
            Some(Tok::KwE) => {
                self.idx += 1;
                let (a, b) = self.until_body()?;
                Ok(EU(Box::new(a), Box::new(b)))
            }
            Some(Tok::KwA) => {
                self.idx += 1;
                let (a, b) = self.until_body()?;
                Ok(AU(Box::new(a), Box::new(b)))
            }
            _ => self.atom(),
        }
    }

    fn until_body(&mut self) -> Result<(CtlFormula, CtlFormula), CtlError> {
        self.expect(Tok::LBracket, "`[`")?;
        let a = self.implies()?;
        self.expect(Tok::KwU, "`U`")?;
        let b = self.implies()?;
        self.expect(Tok::RBracket, "`]`")?;
        Ok((a, b))
    }

    fn atom(&mut self) -> Result<CtlFormula, CtlError> {
        match self.bump() {
            Some(Tok::True) => Ok(CtlFormula::True),
            Some(Tok::False) => Ok(CtlFormula::False),
            Some(Tok::Ident(name)) => Ok(CtlFormula::Atom(name)),
            Some(Tok::LParen) => {
                let phi = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(phi)
            }
            _ => {
                self.idx = self.idx.saturating_sub(1);
                Err(self.err("expected a formula"))
            }
        }
    }
}

pub fn parse(text: &str) -> Result<CtlFormula, CtlError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let phi = p.implies()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(phi)
}

/// Fully parenthesized canonical text; [`parse`] inverts it exactly.
pub fn format(phi: &CtlFormula) -> String {
    use CtlFormula::*;
    match phi {
        True => "(true)".into(),
        False => "(false)".into(),
        Atom(name) => format!("({name})"),
        Not(a) => format!("(! {})", format(a)),
        And(a, b) => format!("({} & {})", format(a), format(b)),
        Or(a, b) => format!("({} | {})", format(a), format(b)),
        Implies(a, b) => format!("({} -> {})", format(a), format(b)),
        EX(a) => format!("(EX {})", format(a)),
        EF(a) => format!("(EF {})", format(a)),
        EG(a) => format!("(EG {})", format(a)),
        AX(a) => format!("(AX {})", format(a)),
        AF(a) => format!("(AF {})", format(a)),
        AG(a) => format!("(AG {})", format(a)),
        EU(a, b) => format!("(E [ {} U {} ])", format(a), format(b)),
        AU(a, b) => format!("(A [ {} U {} ])", format(a), format(b)),
    }
}

/// Draws a random formula with exactly `target_length` AST nodes.
///
/// Budget 1 picks a leaf uniformly (True/False/Atom; atom names uniform
/// over the vocabulary). Budget 2 forces a unary constructor. Budget >= 3
/// picks uniformly among all 12 constructors; a binary constructor splits
/// the remaining budget uniformly with at least 1 node per side.
pub fn generate(
    target_length: usize,
    vocabulary: &[String],
    rng_seed: u64,
) -> Result<CtlFormula, CtlError> {
    if target_length == 0 {
        return Err(CtlError::Generate("target_length must be >= 1".into()));
    }
    if vocabulary.is_empty() {
        return Err(CtlError::Generate("vocabulary must be non-empty".into()));
    }
    let mut rng = Rng::new(rng_seed);
    Ok(gen_rec(target_length, vocabulary, &mut rng))
}

const UNARY: usize = 7;
const BINARY: usize = 5;

fn gen_rec(budget: usize, vocab: &[String], rng: &mut Rng) -> CtlFormula {
    use CtlFormula::*;
    if budget == 1 {
        return match rng.next_below(3) {
            0 => True,
            1 => False,
            _ => Atom(vocab[rng.next_below(vocab.len())].clone()),
        };
    }
    let n_choices = if budget == 2 { UNARY } else { UNARY + BINARY };
    let choice = rng.next_below(n_choices);
    if choice < UNARY {
        let child = Box::new(gen_rec(budget - 1, vocab, rng));
        match choice {
            0 => Not(child),
            1 => EX(child),
            2 => EF(child),
            3 => EG(child),
            4 => AX(child),
            5 => AF(child),
            _ => AG(child),
        }
    } else {
        let left_budget = 1 + rng.next_below(budget - 2);
        let left = Box::new(gen_rec(left_budget, vocab, rng));
        let right = Box::new(gen_rec(budget - 1 - left_budget, vocab, rng));
        match choice - UNARY {
            0 => And(left, right),
            1 => Or(left, right),
            2 => Implies(left, right),
            3 => EU(left, right),
            _ => AU(left, right),
        }
    }
}
