//! Recursive-descent parser for the surface grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' sum ')' | '(' sum ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2` is
//! `-(x^2)` and `2^3^2` is `2^(3^2)`. Literals without a decimal point or
//! exponent are exact integers; all others are reals.

use super::{Expr, ExprError, Func, Number};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Number),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, expected: &str, found: String) -> ExprError {
    ExprError::Syntax {
        offset,
        expected: expected.to_string(),
        found,
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let (num, len) = lex_number(&src[i..], i)?;
                out.push((Tok::Num(num), start));
                i += len;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let len = src[i..]
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                out.push((Tok::Ident(src[i..i + len].to_string()), start));
                i += len;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, "an expression token", format!("`{ch}`")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

fn lex_number(s: &str, offset: usize) -> Result<(Number, usize), ExprError> {
    let b = s.as_bytes();
    let mut len = b.iter().take_while(|c| c.is_ascii_digit()).count();
    let mut real = false;
    if len < b.len() && b[len] == b'.' {
        real = true;
        len += 1;
        len += b[len..].iter().take_while(|c| c.is_ascii_digit()).count();
    }
    if len < b.len() && (b[len] == b'e' || b[len] == b'E') {
        let mut j = len + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let digits = b[j..].iter().take_while(|c| c.is_ascii_digit()).count();
        if digits > 0 {
            real = true;
            len = j + digits;
        }
    }
    let text = &s[..len];
    if text == "." {
        return Err(syntax(offset, "a number", "`.`".into()));
    }
    if real {
        let v: f64 = text
            .parse()
            .map_err(|_| syntax(offset, "a number", format!("`{text}`")))?;
        Ok((Number::Real(v), len))
    } else {
        match text.parse::<i64>() {
            Ok(n) => Ok((Number::int(n), len)),
            // Too large for an exact integer.
            Err(_) => Ok((Number::Real(text.parse().unwrap_or(f64::INFINITY)), len)),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), what, self.peek().describe()))
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs + self.product()?;
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs - self.product()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs * self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Const(n)),
            Tok::Ident(name) => {
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::name(&name));
                }
                let func =
                    Func::from_name(&name).ok_or(ExprError::UnknownFunction { name, offset })?;
                self.bump();
                let arg = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::apply(func, arg))
            }
            Tok::LParen => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(syntax(
                offset,
                "a number, identifier or `(`",
                other.describe(),
            )),
        }
    }
}

/// Parse the surface syntax into a raw tree.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.offset(),
            "an operator or end of input",
            p.peek().describe(),
        ));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_symbols() {
        assert_eq!(parse("x*t").unwrap(), Expr::Mul(vec![Expr::x(), Expr::t()]));
    }

    #[test]
    fn function_application() {
        assert_eq!(
            parse("F0*sin(t)").unwrap(),
            Expr::param("F0") * Expr::sin(Expr::t())
        );
    }

    #[test]
    fn altered_sho_gauge() {
        let expected = -(Expr::param("eps") / Expr::int(2))
            * Expr::param("F0")
            * Expr::x().powi(2)
            * Expr::t();
        assert_eq!(parse("-(eps/2)*F0*x^2*t").unwrap(), expected);
    }

    #[test]
    fn precedence_and_associativity() {
        // ^ binds tighter than unary minus and is right-associative.
        assert_eq!(parse("-x^2").unwrap(), -(Expr::x().powi(2)));
        assert_eq!(
            parse("2^3^2").unwrap(),
            Expr::int(2).pow(Expr::int(3).powi(2))
        );
        assert_eq!(parse("x^-1").unwrap(), Expr::x().pow(-Expr::int(1)));
        // Left-associative subtraction and division.
        assert_eq!(
            parse("x-t-1").unwrap(),
            (Expr::x() - Expr::t()) - Expr::int(1)
        );
        assert_eq!(
            parse("x/t/2").unwrap(),
            (Expr::x() / Expr::t()) / Expr::int(2)
        );
        assert_eq!(
            parse("x+t*2").unwrap(),
            Expr::x() + Expr::t() * Expr::int(2)
        );
    }

    #[test]
    fn literals() {
        assert_eq!(parse("0.5").unwrap(), Expr::real(0.5));
        assert_eq!(parse("2.0").unwrap(), Expr::real(2.0));
        assert_eq!(parse("1e-3").unwrap(), Expr::real(1e-3));
        assert_eq!(parse("12").unwrap(), Expr::int(12));
        assert_eq!(parse("xdot").unwrap(), Expr::xdot());
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("x + * t") {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse("sin(x") {
            Err(ExprError::Syntax {
                offset, expected, ..
            }) => {
                assert_eq!(offset, 5);
                assert_eq!(expected, "`)`");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse(""),
            Err(ExprError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse("x $ t"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("x t"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn unknown_function() {
        assert_eq!(
            parse("1 + foo(x)"),
            Err(ExprError::UnknownFunction {
                name: "foo".into(),
                offset: 4
            })
        );
    }
}
