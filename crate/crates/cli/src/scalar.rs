//! Exact scalar literals such as `1/2`, `-3/4+1/2 i`, `(1/2 i)*s^2`.
//!
//! Juxtaposition multiplies, so both `3/4 i` and `3/4*i` are accepted; `i`
//! is the imaginary unit, every other name a scalar symbol.

use gwt_core::scalar::{GaussianRational, ScalarPoly};

use crate::error::Result;
use crate::lexer::{Cursor, Tok};

pub fn parse_scalar(src: &str) -> Result<ScalarPoly> {
    let mut c = Cursor::new(src)?;
    let v = sum(&mut c)?;
    if *c.peek() != Tok::End {
        return Err(c.error(&["`+`", "`-`", "`*`", "end of input"]));
    }
    Ok(v)
}

fn sum(c: &mut Cursor) -> Result<ScalarPoly> {
    let negate = c.eat(&Tok::Minus);
    let mut acc = product(c)?;
    if negate {
        acc = -&acc;
    }
    loop {
        if c.eat(&Tok::Plus) {
            acc = &acc + &product(c)?;
        } else if c.eat(&Tok::Minus) {
            acc = &acc - &product(c)?;
        } else {
            return Ok(acc);
        }
    }
}

fn starts_atom(t: &Tok) -> bool {
    matches!(t, Tok::Num(_) | Tok::Ident(_) | Tok::LParen)
}

fn product(c: &mut Cursor) -> Result<ScalarPoly> {
    let mut acc = power(c)?;
    loop {
        if c.eat(&Tok::Star) || starts_atom(c.peek()) {
            acc = &acc * &power(c)?;
        } else {
            return Ok(acc);
        }
    }
}

fn power(c: &mut Cursor) -> Result<ScalarPoly> {
    let base = atom(c)?;
    if c.eat(&Tok::Caret) {
        match c.next() {
            Tok::Num(n) if n.is_integer() && n >= num_rational::BigRational::from_integer(0.into()) => {
                let e: u32 = n.to_integer().try_into().map_err(|_| c.error(&["small exponent"]))?;
                return Ok(base.pow(e));
            }
            _ => return Err(c.error(&["non-negative integer exponent"])),
        }
    }
    Ok(base)
}

fn atom(c: &mut Cursor) -> Result<ScalarPoly> {
    match c.peek().clone() {
        Tok::Num(n) => {
            c.next();
            Ok(ScalarPoly::constant(GaussianRational::new(n, num_traits::Zero::zero())))
        }
        Tok::Ident(name) => {
            c.next();
            Ok(if name == "i" { ScalarPoly::i() } else { ScalarPoly::symbol(&name) })
        }
        Tok::LParen => {
            c.next();
            let v = sum(c)?;
            c.expect(Tok::RParen)?;
            Ok(v)
        }
        _ => Err(c.error(&["number", "name", "`(`"])),
    }
}

/// Exact text form, readable by [`parse_scalar`].
pub fn format_scalar(p: &ScalarPoly) -> String {
    p.to_string()
}
