//! Prefix expression syntax for approximation streams.
//!
//! Grammar (whitespace-separated tokens):
//!
//! ```text
//! expr := "(" "rat" rational ")"
//!       | "(" "add" expr expr ")"
//!       | "(" "mul" expr expr ")"
//!       | "(" "max" expr expr ")"
//! ```
//!
//! where `rational` is the usual text form, e.g. `(add (rat 1/3) (mul (rat
//! 1/2) (rat 1/2)))`. This is the whole surface: streams defined by text are
//! finite trees over constants, addition, multiplication, and maximum.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::real::ComputableReal;

pub fn parse_stream(text: &str) -> Result<ComputableReal> {
    let tokens = tokenize(text);
    let mut pos = 0usize;
    let stream = parse_expr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::ParseExpr(format!(
            "trailing input after expression: `{}`",
            tokens[pos..].join(" ")
        )));
    }
    Ok(stream)
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn parse_expr(tokens: &[String], pos: &mut usize) -> Result<ComputableReal> {
    expect(tokens, pos, "(")?;
    let op = next(tokens, pos)?;
    let stream = match op.as_str() {
        "rat" => {
            let literal = next(tokens, pos)?;
            let value: Rational = literal
                .parse()
                .map_err(|_| Error::ParseExpr(format!("invalid rational `{literal}`")))?;
            ComputableReal::from_rational(value)
        }
        "add" | "mul" | "max" => {
            let left = parse_expr(tokens, pos)?;
            let right = parse_expr(tokens, pos)?;
            match op.as_str() {
                "add" => left.add(&right),
                "mul" => left.mul(&right),
                _ => left.max(&right),
            }
        }
        other => {
            return Err(Error::ParseExpr(format!(
                "unknown operator `{other}` (expected rat, add, mul, or max)"
            )))
        }
    };
    expect(tokens, pos, ")")?;
    Ok(stream)
}

fn next<'a>(tokens: &'a [String], pos: &mut usize) -> Result<&'a String> {
    let token = tokens
        .get(*pos)
        .ok_or_else(|| Error::ParseExpr("unexpected end of input".into()))?;
    *pos += 1;
    Ok(token)
}

fn expect(tokens: &[String], pos: &mut usize, wanted: &str) -> Result<()> {
    let token = next(tokens, pos)?;
    if token != wanted {
        return Err(Error::ParseExpr(format!(
            "expected `{wanted}`, found `{token}`"
        )));
    }
    Ok(())
}
