//! Element expressions: integers, `p` (the uniformizer), `u` (the non-square
//! unit), `+ - * ^` and parentheses. `^` takes a signed integer literal.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-'] INT)?
//! atom   := INT | 'p' | 'u' | '(' expr ')'
//! ```

use num_bigint::BigUint;

use super::element::{FieldElement, LocalField};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigUint),
    P,
    U,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            ' ' | '\t' | '\n' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Int(s.parse().expect("decimal digits")), start));
                continue;
            }
            'p' => Tok::P,
            'u' => Tok::U,
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") }),
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    field: &'a LocalField,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FieldElement> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        let Tok::Int(n) = self.bump() else {
            return Err(Error::Syntax { pos, msg: "exponent must be an integer literal".into() });
        };
        let e: i64 = i64::try_from(n).map_err(|_| Error::Syntax { pos, msg: "exponent too large".into() })?;
        let e = if negative { -e } else { e };
        base.pow(e)
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.bump() {
            Tok::Int(n) => Ok(self.field.from_biguint(&n)),
            Tok::P => Ok(self.field.uniformizer()),
            Tok::U => Ok(self.field.u()),
            Tok::LParen => {
                let x = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(x)
            }
            Tok::End => {
                self.at = self.toks.len() - 1;
                self.err("unexpected end of expression")
            }
            _ => {
                self.at -= 1;
                self.err("expected a number, `p`, `u` or `(`")
            }
        }
    }
}

pub fn eval_expr(text: &str, field: &LocalField) -> Result<FieldElement> {
    let mut parser = Parser { toks: lex(text)?, at: 0, field };
    let x = parser.expr()?;
    if *parser.peek() != Tok::End {
        return parser.err("unexpected trailing input");
    }
    Ok(x)
}

/// A square matrix written as `[[a,b],[c,d]]`, one expression per entry.
pub fn parse_matrix(text: &str, field: &LocalField) -> Result<Vec<Vec<FieldElement>>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or(Error::Syntax { pos: 0, msg: "matrix must be written [[..],..]".into() })?;
    let offset = text.find('[').unwrap_or(0) + 1;
    let mut rows = Vec::new();
    let mut depth = 0;
    let mut start = None;
    for (i, c) in inner.char_indices() {
        match c {
            '[' => {
                if depth != 0 {
                    return Err(Error::Syntax { pos: offset + i, msg: "nested brackets".into() });
                }
                depth = 1;
                start = Some(i + 1);
            }
            ']' => {
                let s = start.take().ok_or(Error::Syntax { pos: offset + i, msg: "unbalanced `]`".into() })?;
                depth = 0;
                let mut row = Vec::new();
                let mut col_start = s;
                for piece in inner[s..i].split(',') {
                    row.push(eval_expr(piece, field).map_err(|e| shift(e, offset + col_start))?);
                    col_start += piece.len() + 1;
                }
                rows.push(row);
            }
            ',' | ' ' if depth == 0 => {}
            _ if depth == 0 => {
                return Err(Error::Syntax { pos: offset + i, msg: format!("unexpected `{c}`") });
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Syntax { pos: text.len(), msg: "unbalanced `[`".into() });
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Input("matrix must be square and non-empty".into()));
    }
    Ok(rows)
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax { pos, msg } => Error::Syntax { pos: pos + by, msg },
        other => other,
    }
}
