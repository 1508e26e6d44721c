//! Hand-rolled lexer and recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := impl
//! impl    := until ("->" impl)?
//! until   := or ("Until" or)*
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := ("~" | "N" | "Today" | "KnI" | "Unc" | "K"INT | "D"INT) unary | atom
//! atom    := "true" | "false" | "x"INT | "(" formula ")"
//! ```
//!
//! `Until` is left-associative, `->` right-associative.

use super::Formula;
use std::fmt;

/// Syntax error with 1-based position and the tokens that would have
/// been accepted at that point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: found {}, expected {}",
            self.line,
            self.column,
            self.found,
            self.expected.join(" | ")
        )
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    /// Shift the reported position by `line`/`column` offsets, used when a
    /// formula is embedded in a larger document (rule syntax, CLI input).
    pub fn offset(mut self, line: usize, column_on_first_line: usize) -> ParseError {
        if self.line == 1 {
            self.column += column_on_first_line;
        }
        self.line += line;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    True,
    False,
    Var(u32),
    K(u32),
    D(u32),
    N,
    Today,
    KnI,
    Unc,
    Until,
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::True => "'true'".into(),
            Tok::False => "'false'".into(),
            Tok::Var(i) => format!("'x{i}'"),
            Tok::K(i) => format!("'K{i}'"),
            Tok::D(k) => format!("'D{k}'"),
            Tok::N => "'N'".into(),
            Tok::Today => "'Today'".into(),
            Tok::KnI => "'KnI'".into(),
            Tok::Unc => "'Unc'".into(),
            Tok::Until => "'Until'".into(),
            Tok::Not => "'~'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Implies => "'->'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn expected_inside_formula() -> Vec<String> {
    vec![
        "'true'".into(),
        "'false'".into(),
        "'x<i>'".into(),
        "'('".into(),
        "'~'".into(),
        "'N'".into(),
        "'Today'".into(),
        "'KnI'".into(),
        "'Unc'".into(),
        "'K<i>'".into(),
        "'D<k>'".into(),
    ]
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();

    let err = |line: usize, column: usize, found: String| ParseError {
        line,
        column,
        found,
        expected: expected_inside_formula(),
    };

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '~' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::Not, line: tl, column: tc });
            }
            '&' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::And, line: tl, column: tc });
            }
            '|' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::Or, line: tl, column: tc });
            }
            '(' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::LParen, line: tl, column: tc });
            }
            ')' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::RParen, line: tl, column: tc });
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars);
                        toks.push(Spanned { tok: Tok::Implies, line: tl, column: tc });
                    }
                    other => {
                        let found = match other {
                            Some(c) => format!("'-{c}'"),
                            None => "'-'".into(),
                        };
                        return Err(err(tl, tc, found));
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() {
                        word.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                let tok = classify_word(&word, tl, tc)?;
                toks.push(Spanned { tok, line: tl, column: tc });
            }
            other => return Err(err(tl, tc, format!("'{other}'"))),
        }
    }
    toks.push(Spanned { tok: Tok::Eof, line, column });
    Ok(toks)
}

fn classify_word(word: &str, line: usize, column: usize) -> Result<Tok, ParseError> {
    let fail = |found: String, expected: Vec<String>| ParseError { line, column, found, expected };
    match word {
        "true" => return Ok(Tok::True),
        "false" => return Ok(Tok::False),
        "N" => return Ok(Tok::N),
        "Today" => return Ok(Tok::Today),
        "KnI" => return Ok(Tok::KnI),
        "Unc" => return Ok(Tok::Unc),
        "Until" => return Ok(Tok::Until),
        _ => {}
    }
    let (head, rest) = word.split_at(1);
    let index = |what: &str| -> Result<u32, ParseError> {
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail(format!("'{word}'"), vec![format!("'{what}' followed by digits")]));
        }
        rest.parse::<u32>()
            .map_err(|_| fail(format!("'{word}'"), vec![format!("'{what}' index within range")]))
    };
    match head {
        "x" => {
            let i = index("x")?;
            if i == 0 {
                return Err(fail("'x0'".into(), vec!["variable index >= 1".into()]));
            }
            Ok(Tok::Var(i))
        }
        "K" => {
            let i = index("K")?;
            if i == 0 {
                return Err(fail("'K0'".into(), vec!["agent index >= 1".into()]));
            }
            Ok(Tok::K(i))
        }
        "D" => Ok(Tok::D(index("D")?)),
        _ => Err(fail(format!("'{word}'"), expected_inside_formula())),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: Vec<String>) -> ParseError {
        let here = self.peek();
        ParseError {
            line: here.line,
            column: here.column,
            found: here.tok.describe(),
            expected,
        }
    }

    fn parse_impl(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_until()?;
        if self.peek().tok == Tok::Implies {
            self.advance();
            let rhs = self.parse_impl()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_until(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_or()?;
        while self.peek().tok == Tok::Until {
            self.advance();
            let rhs = self.parse_or()?;
            lhs = Formula::until(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.peek().tok == Tok::Or {
            self.advance();
            let rhs = self.parse_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_unary()?;
        while self.peek().tok == Tok::And {
            self.advance();
            let rhs = self.parse_unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        let wrap = match self.peek().tok {
            Tok::Not => Some(Formula::not as fn(Formula) -> Formula),
            Tok::N => Some(Formula::next as fn(Formula) -> Formula),
            Tok::Today => Some(Formula::today as fn(Formula) -> Formula),
            Tok::KnI => Some(Formula::kni as fn(Formula) -> Formula),
            Tok::Unc => Some(Formula::unc as fn(Formula) -> Formula),
            Tok::K(agent) => {
                self.advance();
                let child = self.parse_unary()?;
                return Ok(Formula::k(agent, child));
            }
            Tok::D(k) => {
                self.advance();
                let child = self.parse_unary()?;
                return Ok(Formula::dist(k, child));
            }
            _ => None,
        };
        if let Some(wrap) = wrap {
            self.advance();
            let child = self.parse_unary()?;
            return Ok(wrap(child));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok {
            Tok::True => {
                self.advance();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.advance();
                Ok(Formula::Bot)
            }
            Tok::Var(i) => {
                self.advance();
                Ok(Formula::Var(i))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.parse_impl()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.error_here(vec!["')'".into()]));
                }
                self.advance();
                Ok(inner)
            }
            _ => Err(self.error_here(expected_inside_formula())),
        }
    }
}

/// Parse the concrete syntax into a [`Formula`].
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let formula = parser.parse_impl()?;
    if parser.peek().tok != Tok::Eof {
        return Err(parser.error_here(vec![
            "end of input".into(),
            "'&'".into(),
            "'|'".into(),
            "'->'".into(),
            "'Until'".into(),
        ]));
    }
    Ok(formula)
}
