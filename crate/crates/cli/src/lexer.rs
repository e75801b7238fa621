//! Tokens shared by the operator-expression and scalar parsers.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Comma,
    Semi,
    LParen,
    RParen,
    LBrack,
    RBrack,
    End,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(_) => "number".into(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '@' | '†' | '\'')
}

/// Splits `src` into tokens paired with their character offsets. A dagger
/// may be written `†` or `^+` directly after a name.
pub fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let mut num = BigRational::from_integer(digits(&chars[i..j]));
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                let mut k = j + 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let frac = digits(&chars[j + 1..k]);
                num += BigRational::new(frac, BigInt::from(10).pow((k - j - 1) as u32));
                j = k;
            }
            if j + 1 < chars.len() && chars[j] == '/' && chars[j + 1].is_ascii_digit() {
                let mut k = j + 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let den = digits(&chars[j + 1..k]);
                if den == BigInt::from(0) {
                    return Err(CliError::Syntax { position: j + 1, expected: vec!["nonzero denominator".into()] });
                }
                num /= BigRational::from_integer(den);
                j = k;
            }
            out.push((start, Tok::Num(num)));
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut name = String::new();
            while i < chars.len() {
                if ident_char(chars[i]) {
                    name.push(chars[i]);
                    i += 1;
                } else if chars[i] == '^' && chars.get(i + 1) == Some(&'+') {
                    name.push('†');
                    i += 2;
                } else {
                    break;
                }
            }
            out.push((start, Tok::Ident(name)));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '^' => Tok::Caret,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            _ => {
                return Err(CliError::Syntax { position: i, expected: vec!["operator, name or number".into()] })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

fn digits(cs: &[char]) -> BigInt {
    cs.iter().fold(BigInt::from(0), |acc, c| acc * 10 + c.to_digit(10).unwrap_or(0))
}

/// Cursor over a token list.
pub struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Self { toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].1
    }

    pub fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(&[&t.describe()]))
        }
    }

    pub fn error(&self, expected: &[&str]) -> CliError {
        CliError::Syntax { position: self.offset(), expected: expected.iter().map(|s| s.to_string()).collect() }
    }
}
