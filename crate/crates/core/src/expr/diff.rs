use super::simplify::{add, apply, mul, pow};
use super::{simplify, Expr, ExprError, Func, Symbol};

/// Exact partial derivative of `e` with respect to `var`, in canonical form.
///
/// Parameters are constants and the other reserved symbols are independent of
/// `var`.
pub fn diff(e: &Expr, var: Symbol) -> Result<Expr, ExprError> {
    let e = simplify(e)?;
    partial(&e, var)
}

// Operates on canonical input and keeps the output canonical.
fn partial(e: &Expr, var: Symbol) -> Result<Expr, ExprError> {
    if !e.depends_on(var) {
        return Ok(Expr::zero());
    }
    match e {
        Expr::Const(_) | Expr::Param(_) => Ok(Expr::zero()),
        Expr::Sym(s) => Ok(if *s == var { Expr::one() } else { Expr::zero() }),
        Expr::Add(terms) => Ok(add(terms
            .iter()
            .map(|t| partial(t, var))
            .collect::<Result<_, _>>()?)),
        Expr::Mul(factors) => {
            let mut terms = Vec::new();
            for (i, f) in factors.iter().enumerate() {
                if !f.depends_on(var) {
                    continue;
                }
                let mut product: Vec<Expr> = factors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, g)| g.clone())
                    .collect();
                product.push(partial(f, var)?);
                terms.push(mul(product)?);
            }
            Ok(add(terms))
        }
        Expr::Pow(base, exponent) => {
            if !exponent.depends_on(var) {
                // d(u^k) = k u^(k-1) u'
                let lowered = pow(
                    (**base).clone(),
                    add(vec![(**exponent).clone(), Expr::int(-1)]),
                )?;
                mul(vec![(**exponent).clone(), lowered, partial(base, var)?])
            } else {
                // d(u^v) = u^v (v' ln u + v u'/u)
                let log_term = mul(vec![
                    partial(exponent, var)?,
                    apply(Func::Ln, (**base).clone()),
                ])?;
                let ratio_term = mul(vec![
                    (**exponent).clone(),
                    partial(base, var)?,
                    pow((**base).clone(), Expr::int(-1))?,
                ])?;
                mul(vec![e.clone(), add(vec![log_term, ratio_term])])
            }
        }
        Expr::Apply(f, arg) => {
            let inner = partial(arg, var)?;
            let u = (**arg).clone();
            let outer = match f {
                Func::Sin => apply(Func::Cos, u),
                Func::Cos => mul(vec![Expr::int(-1), apply(Func::Sin, u)])?,
                Func::Tan => pow(apply(Func::Cos, u), Expr::int(-2))?,
                Func::Exp => e.clone(),
                Func::Ln => pow(u, Expr::int(-1))?,
                Func::Sinh => apply(Func::Cosh, u),
                Func::Cosh => apply(Func::Sinh, u),
                Func::Tanh => add(vec![
                    Expr::one(),
                    mul(vec![Expr::int(-1), pow(e.clone(), Expr::int(2))?])?,
                ]),
                Func::Sqrt => mul(vec![Expr::ratio(1, 2), pow(e.clone(), Expr::int(-1))?])?,
            };
            mul(vec![outer, inner])
        }
        // Canonical trees contain neither; simplify removed them.
        Expr::Neg(_) | Expr::Div(..) => partial(&simplify(e)?, var),
    }
}

/// `de/dt` along a path: `∂e/∂t + xdot ∂e/∂x + xddot ∂e/∂xdot`.
///
/// `e` must not contain `xddot`.
pub fn total_time_derivative(e: &Expr) -> Result<Expr, ExprError> {
    e.ensure_free_of(&[Symbol::Xddot])?;
    let e = simplify(e)?;
    let dt = partial(&e, Symbol::T)?;
    let dx = partial(&e, Symbol::X)?;
    let dv = partial(&e, Symbol::Xdot)?;
    Ok(add(vec![
        dt,
        mul(vec![Expr::xdot(), dx])?,
        mul(vec![Expr::xddot(), dv])?,
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn s(text: &str) -> Expr {
        simplify(&parse(text).unwrap()).unwrap()
    }

    fn d(text: &str, var: Symbol) -> Expr {
        diff(&parse(text).unwrap(), var).unwrap()
    }

    #[test]
    fn power_rule() {
        assert_eq!(d("x^2*t", Symbol::X), s("2*x*t"));
    }

    #[test]
    fn driven_cos_gauge_time_partial() {
        assert_eq!(d("x*F0*sin(t)", Symbol::T), s("x*F0*cos(t)"));
    }

    #[test]
    fn independence() {
        assert_eq!(d("sin(t)", Symbol::X), Expr::zero());
        assert_eq!(d("xdot^2", Symbol::X), Expr::zero());
        assert_eq!(d("eps*x", Symbol::T), Expr::zero());
    }

    #[test]
    fn symbolic_exponents() {
        assert_eq!(d("x^(2*n+2)", Symbol::X), s("(2*n+2)*x^(2*n+1)"));
        assert_eq!(d("2^t", Symbol::T), s("2^t*ln(2)"));
    }

    #[test]
    fn function_rules() {
        assert_eq!(d("tan(x)", Symbol::X), s("cos(x)^-2"));
        assert_eq!(d("ln(x)", Symbol::X), s("1/x"));
        assert_eq!(d("sqrt(x)", Symbol::X), s("1/(2*sqrt(x))"));
        assert_eq!(d("tanh(x)", Symbol::X), s("1 - tanh(x)^2"));
        assert_eq!(d("exp(t/4)", Symbol::T), s("exp(t/4)/4"));
        assert_eq!(d("cosh(2*x)", Symbol::X), s("2*sinh(2*x)"));
    }

    #[test]
    fn total_derivative_of_simplest_gauge() {
        assert_eq!(
            total_time_derivative(&parse("c1*x*t").unwrap()).unwrap(),
            s("c1*(xdot*t + x)")
        );
    }

    #[test]
    fn total_derivative_of_time_only_gauge() {
        let got = total_time_derivative(&parse("t^3 + sin(t)").unwrap()).unwrap();
        assert_eq!(got, s("3*t^2 + cos(t)"));
        assert!(!got.depends_on(Symbol::Xdot));
    }

    #[test]
    fn total_derivative_of_driven_gauge() {
        assert_eq!(
            total_time_derivative(&parse("x*F0*sin(t)").unwrap()).unwrap(),
            s("F0*(xdot*sin(t) + x*cos(t))")
        );
    }

    #[test]
    fn total_derivative_picks_up_acceleration() {
        assert_eq!(
            total_time_derivative(&parse("x*xdot").unwrap()).unwrap(),
            s("xdot^2 + x*xddot")
        );
        assert!(total_time_derivative(&parse("xddot").unwrap()).is_err());
    }
}
