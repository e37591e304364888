//! Recursive-descent parser for the infix expression DSL.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '\''* '(' expr ')' | '(' expr ')'
//! ```

use thiserror::Error;

use super::{call, neg, power, product, quotient, sub, sum, Alphabet, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("undeclared symbol `{name}` at column {column}")]
    Undeclared { name: String, column: usize },
}

impl ParseError {
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. } | ParseError::Undeclared { column, .. } => *column,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Prime,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                column: col,
                message: format!("malformed number `{s}`"),
            })?;
            toks.push((Tok::Num(v), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            let tok = match c {
                '+' | '*' | '/' | '^' => Tok::Op(c),
                '-' | '\u{2212}' => Tok::Op('-'),
                '\'' | '\u{2032}' => Tok::Prime,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => {
                    return Err(ParseError::Syntax {
                        column: col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            toks.push((tok, col));
            i += 1;
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { column: self.col(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = sum([acc, rhs]);
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = sub(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = product([acc, rhs]);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = quotient(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let exponent = self.unary()?;
            Ok(power(base, exponent))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::constant(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let mut order = 0u32;
                while self.peek() == Some(&Tok::Prime) {
                    self.pos += 1;
                    order += 1;
                }
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let arg = self.expr()?;
                    if self.peek() == Some(&Tok::Comma) {
                        return self.err("functions take exactly one argument");
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    if self.alphabet.has_function(&name) {
                        return Ok(Expr::opaque(&name, order, arg));
                    }
                    if order > 0 {
                        return Err(ParseError::Undeclared { name, column: col });
                    }
                    return match Func::from_name(&name) {
                        Some(f) => Ok(call(f, arg)),
                        None => Err(ParseError::Undeclared { name, column: col }),
                    };
                }
                if order > 0 {
                    return self.err("derivative mark must be followed by an argument list");
                }
                if let Some(v) = self.alphabet.lookup_var(&name) {
                    return Ok(Expr::var(v));
                }
                if self.alphabet.has_param(&name) {
                    return Ok(Expr::param(&name));
                }
                Err(ParseError::Undeclared { name, column: col })
            }
            Some(_) => self.err("expected a number, symbol or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse `text` against the declared `alphabet`.
pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let end_col = text.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, end_col, alphabet };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::super::{Node, Var};
    use super::*;

    fn iso() -> Alphabet {
        Alphabet::with_coords(&["x", "y"]).function("G")
    }

    #[test]
    fn isochrony_lagrangian() {
        let e = parse("xdot*ydot - G(x)*y", &iso()).unwrap();
        let expected = Expr::qdot(0) * Expr::qdot(1) - Expr::opaque("G", 0, Expr::q(0)) * Expr::q(1);
        assert_eq!(e, expected);
        assert!(matches!(e.node(), Node::Sum(_)));
    }

    #[test]
    fn zero_is_constant() {
        assert!(parse("0", &Alphabet::new(1)).unwrap().is_zero());
    }

    #[test]
    fn kepler_lagrangian() {
        let a = Alphabet::new(3).param("mu");
        let e = parse("qdot1^2/2 + mu/sqrt(q1^2+q2^2+q3^2)", &a).unwrap();
        assert!(e.contains_var(Var::Vel(0)));
        assert!(e.contains_var(Var::Coord(2)));
        assert!(!e.contains_var(Var::Vel(1)));
    }

    #[test]
    fn primes_mark_derivatives() {
        let e = parse("G''(x)", &iso()).unwrap();
        assert!(matches!(e.node(), Node::Opaque { order: 2, .. }));
    }

    #[test]
    fn precedence() {
        let a = Alphabet::new(1);
        let e = parse("-q1^2", &a).unwrap();
        assert_eq!(e, -Expr::q(0).powi(2));
        let e = parse("2^-1", &a).unwrap();
        assert_eq!(e, Expr::constant(0.5));
        let e = parse("1e-3 * q1", &a).unwrap();
        assert_eq!(e, 0.001 * Expr::q(0));
    }

    #[test]
    fn errors_carry_positions() {
        let a = Alphabet::new(1);
        let err = parse("q1 + * 2", &a).unwrap_err();
        assert_eq!(err.column(), 6);
        let err = parse("q1 + z", &a).unwrap_err();
        assert_eq!(err, ParseError::Undeclared { name: "z".into(), column: 6 });
        assert!(parse("(q1", &a).is_err());
        assert!(parse("", &a).is_err());
        assert!(matches!(parse("H(q1)", &a), Err(ParseError::Undeclared { .. })));
    }
}
