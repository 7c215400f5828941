use std::fmt;

use super::{Expr, Number};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Const(n) => match n {
            Number::Rational(r) if !r.is_integer() => PRODUCT,
            _ if n.is_negative() => UNARY,
            _ => ATOM,
        },
        Expr::Sym(_) | Expr::Param(_) | Expr::Apply(..) => ATOM,
        Expr::Pow(..) => POWER,
        Expr::Neg(_) => UNARY,
        Expr::Mul(_) | Expr::Div(..) => PRODUCT,
        Expr::Add(_) => SUM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if level(e) < min {
        f.write_str("(")?;
        write_expr(f, e)?;
        f.write_str(")")
    } else {
        write_expr(f, e)
    }
}

/// If `e` reads naturally with a leading minus, return its negation.
fn negated(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Const(n) if n.is_negative() => Some(Expr::Const(-*n)),
        Expr::Neg(a) => Some((**a).clone()),
        Expr::Mul(xs) => {
            let c = xs.first()?.as_number()?;
            if !c.is_negative() {
                return None;
            }
            let c = -c;
            let mut rest: Vec<Expr> = xs[1..].to_vec();
            if !c.is_one() || rest.is_empty() {
                rest.insert(0, Expr::Const(c));
            }
            Some(if rest.len() == 1 {
                rest.pop().unwrap()
            } else {
                Expr::Mul(rest)
            })
        }
        _ => None,
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(n) => write!(f, "{n}"),
        Expr::Sym(s) => f.write_str(s.name()),
        Expr::Param(p) => f.write_str(p),
        Expr::Apply(func, arg) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, arg)?;
            f.write_str(")")
        }
        Expr::Add(terms) => {
            for (i, term) in terms.iter().enumerate() {
                if i == 0 {
                    write_at(f, term, SUM)?;
                    continue;
                }
                match negated(term) {
                    Some(pos) => {
                        f.write_str(" - ")?;
                        write_at(f, &pos, PRODUCT)?;
                    }
                    None => {
                        f.write_str(" + ")?;
                        write_at(f, term, PRODUCT)?;
                    }
                }
            }
            Ok(())
        }
        Expr::Mul(factors) => {
            let mut rest = &factors[..];
            if let Some(c) = factors.first().and_then(Expr::as_number) {
                if factors.len() > 1 && c == Number::int(-1) {
                    f.write_str("-")?;
                    rest = &factors[1..];
                    write_at(f, &rest[0], UNARY)?;
                    rest = &rest[1..];
                } else {
                    write_at(f, &factors[0], PRODUCT)?;
                    rest = &factors[1..];
                }
            } else if let Some(first) = factors.first() {
                write_at(f, first, PRODUCT)?;
                rest = &factors[1..];
            }
            for factor in rest {
                f.write_str("*")?;
                write_at(f, factor, UNARY)?;
            }
            Ok(())
        }
        Expr::Pow(base, exponent) => {
            write_at(f, base, ATOM)?;
            f.write_str("^")?;
            write_at(f, exponent, UNARY)
        }
        Expr::Neg(a) => {
            f.write_str("-")?;
            write_at(f, a, UNARY)
        }
        Expr::Div(a, b) => {
            write_at(f, a, PRODUCT)?;
            f.write_str("/")?;
            write_at(f, b, UNARY)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
