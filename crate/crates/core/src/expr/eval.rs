use super::{Binding, Expr, ExprError, Func, Symbol};

/// Apply a unary function, rejecting arguments outside its real domain and
/// non-finite results.
pub(crate) fn apply_func(f: Func, v: f64) -> Result<f64, String> {
    let out = match f {
        Func::Sin => v.sin(),
        Func::Cos => v.cos(),
        Func::Tan => v.tan(),
        Func::Exp => v.exp(),
        Func::Ln if v <= 0.0 => return Err(format!("ln of non-positive value {v}")),
        Func::Ln => v.ln(),
        Func::Sinh => v.sinh(),
        Func::Cosh => v.cosh(),
        Func::Tanh => v.tanh(),
        Func::Sqrt if v < 0.0 => return Err(format!("sqrt of negative value {v}")),
        Func::Sqrt => v.sqrt(),
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(format!("{}({v}) is not finite", f.name()))
    }
}

pub(crate) enum PowFailure {
    DivisionByZero,
    Domain(String),
}

pub(crate) fn apply_pow(base: f64, exponent: f64) -> Result<f64, PowFailure> {
    if base == 0.0 && exponent < 0.0 {
        return Err(PowFailure::DivisionByZero);
    }
    let out = if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else if base < 0.0 {
        return Err(PowFailure::Domain(format!(
            "negative base {base} with non-integer exponent {exponent}"
        )));
    } else {
        base.powf(exponent)
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(PowFailure::Domain(format!(
            "{base}^{exponent} is not finite"
        )))
    }
}

fn check(e: &Expr, v: f64) -> Result<f64, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError::Domain {
            subtree: e.to_string(),
            reason: "non-finite value".into(),
        })
    }
}

/// Evaluate in double precision. Every name in `e` must be bound.
pub fn eval(e: &Expr, b: &Binding) -> Result<f64, ExprError> {
    let lookup = |name: &str| {
        b.get(name)
            .copied()
            .ok_or_else(|| ExprError::Unbound(name.into()))
    };
    match e {
        Expr::Const(n) => check(e, n.to_f64()),
        Expr::Sym(s) => lookup(Symbol::name(*s)),
        Expr::Param(p) => lookup(p),
        Expr::Add(xs) => {
            let mut acc = 0.0;
            for x in xs {
                acc += eval(x, b)?;
            }
            check(e, acc)
        }
        Expr::Mul(xs) => {
            let mut acc = 1.0;
            for x in xs {
                acc *= eval(x, b)?;
            }
            check(e, acc)
        }
        Expr::Neg(a) => Ok(-eval(a, b)?),
        Expr::Div(n, d) => {
            let num = eval(n, b)?;
            let den = eval(d, b)?;
            if den == 0.0 {
                return Err(ExprError::DivisionByZero {
                    subtree: e.to_string(),
                });
            }
            check(e, num / den)
        }
        Expr::Pow(base, exponent) => {
            let x = eval(base, b)?;
            let y = eval(exponent, b)?;
            apply_pow(x, y).map_err(|failure| match failure {
                PowFailure::DivisionByZero => ExprError::DivisionByZero {
                    subtree: e.to_string(),
                },
                PowFailure::Domain(reason) => ExprError::Domain {
                    subtree: e.to_string(),
                    reason,
                },
            })
        }
        Expr::Apply(f, a) => {
            let v = eval(a, b)?;
            apply_func(*f, v).map_err(|reason| ExprError::Domain {
                subtree: e.to_string(),
                reason,
            })
        }
    }
}
