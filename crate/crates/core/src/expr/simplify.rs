//! Canonicalising simplifier.
//!
//! The canonical form is a sum of products. Products carry at most one
//! numeric coefficient, placed first; the remaining factors are sorted and
//! like bases are merged by adding exponents. Products of sums and small
//! positive integer powers of sums are expanded. No trigonometric rewriting
//! is attempted, so `cos(t)^2` and `1/2 + 1/2*cos(2*t)` stay distinct.

use std::collections::BTreeMap;

use super::{Expr, ExprError, Func, Number};

/// Largest integer exponent folded into a constant.
const MAX_FOLDED_EXPONENT: i64 = 4096;
/// Expansion of products of sums is skipped past this many terms.
const MAX_EXPANDED_TERMS: usize = 512;

/// Bring `e` to canonical form. Rejects division by the constant zero.
pub fn simplify(e: &Expr) -> Result<Expr, ExprError> {
    match e {
        Expr::Const(_) | Expr::Sym(_) | Expr::Param(_) => Ok(e.clone()),
        Expr::Neg(a) => mul(vec![Expr::int(-1), simplify(a)?]),
        Expr::Div(a, b) => {
            let denom = simplify(b)?;
            if denom.is_zero() {
                return Err(ExprError::DivisionByZero {
                    subtree: e.to_string(),
                });
            }
            mul(vec![simplify(a)?, pow(denom, Expr::int(-1))?])
        }
        Expr::Add(xs) => Ok(add(xs.iter().map(simplify).collect::<Result<_, _>>()?)),
        Expr::Mul(xs) => mul(xs.iter().map(simplify).collect::<Result<_, _>>()?),
        Expr::Pow(b, x) => pow(simplify(b)?, simplify(x)?),
        Expr::Apply(f, a) => Ok(apply(*f, simplify(a)?)),
    }
}

fn split_coeff(e: Expr) -> (Number, Expr) {
    match e {
        Expr::Mul(mut xs) if matches!(xs.first(), Some(Expr::Const(_))) => {
            let c = xs.remove(0).as_number().unwrap_or(Number::one());
            let rest = if xs.len() == 1 {
                xs.pop().unwrap()
            } else {
                Expr::Mul(xs)
            };
            (c, rest)
        }
        other => (Number::one(), other),
    }
}

fn scale(c: Number, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest {
        Expr::Mul(mut xs) => {
            xs.insert(0, Expr::Const(c));
            Expr::Mul(xs)
        }
        other => Expr::Mul(vec![Expr::Const(c), other]),
    }
}

/// Sum of canonical terms.
pub(crate) fn add(terms: Vec<Expr>) -> Expr {
    let mut constant = Number::zero();
    let mut collected: BTreeMap<Expr, Number> = BTreeMap::new();
    let mut queue = terms;
    while let Some(term) = queue.pop() {
        match term {
            Expr::Add(inner) => queue.extend(inner),
            Expr::Const(n) => constant = constant + n,
            other => {
                let (c, rest) = split_coeff(other);
                let slot = collected.entry(rest).or_insert(Number::zero());
                *slot = *slot + c;
            }
        }
    }
    let mut out = Vec::with_capacity(collected.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::Const(constant));
    }
    out.extend(
        collected
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(rest, c)| scale(c, rest)),
    );
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Add(out),
    }
}

fn build_product(coeff: Number, mut factors: Vec<Expr>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    factors.sort();
    if factors.is_empty() {
        return Expr::Const(coeff);
    }
    if coeff.is_one() && factors.len() == 1 {
        return factors.pop().unwrap();
    }
    if !coeff.is_one() {
        factors.insert(0, Expr::Const(coeff));
    }
    Expr::Mul(factors)
}

/// Product of canonical factors.
pub(crate) fn mul(factors: Vec<Expr>) -> Result<Expr, ExprError> {
    let mut coeff = Number::one();
    let mut powers: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut queue = factors;
    while let Some(f) = queue.pop() {
        match f {
            Expr::Mul(inner) => queue.extend(inner),
            Expr::Const(n) => coeff = coeff * n,
            Expr::Pow(b, x) => powers.entry(*b).or_default().push(*x),
            other => powers.entry(other).or_default().push(Expr::one()),
        }
    }
    if coeff.is_zero() {
        return Ok(Expr::zero());
    }

    let mut plain = Vec::new();
    let mut sums = Vec::new();
    let mut unsettled = false;
    for (base, exps) in powers {
        let merged = pow(base.clone(), add(exps))?;
        match merged {
            Expr::Const(n) => coeff = coeff * n,
            Expr::Add(_) => sums.push(merged),
            Expr::Mul(_) => {
                unsettled = true;
                plain.push(merged);
            }
            other => {
                let (b, _) = super::split_pow(&other);
                if *b != base {
                    unsettled = true;
                }
                plain.push(other);
            }
        }
    }
    if unsettled {
        let mut again = plain;
        again.extend(sums);
        again.push(Expr::Const(coeff));
        return mul(again);
    }
    if coeff.is_zero() {
        return Ok(Expr::zero());
    }

    let expanded_len = sums.iter().try_fold(1usize, |acc, s| match s {
        Expr::Add(ts) => acc.checked_mul(ts.len()),
        _ => Some(acc),
    });
    match expanded_len {
        Some(n) if n <= MAX_EXPANDED_TERMS && !sums.is_empty() => {
            let mut acc = build_product(coeff, plain);
            for s in sums {
                let Expr::Add(terms) = s else { unreachable!() };
                acc = distribute(&acc, &terms)?;
            }
            Ok(acc)
        }
        _ => {
            plain.extend(sums);
            Ok(build_product(coeff, plain))
        }
    }
}

// Term-by-term product of a canonical expression with a list of terms.
fn distribute(lhs: &Expr, terms: &[Expr]) -> Result<Expr, ExprError> {
    let left: &[Expr] = match lhs {
        Expr::Add(ts) => ts,
        other => std::slice::from_ref(other),
    };
    let mut out = Vec::with_capacity(left.len() * terms.len());
    for a in left {
        for b in terms {
            out.push(mul(vec![a.clone(), b.clone()])?);
        }
    }
    Ok(add(out))
}

/// `base ^ exponent` for canonical operands.
pub(crate) fn pow(base: Expr, exponent: Expr) -> Result<Expr, ExprError> {
    if exponent.is_zero() {
        return Ok(Expr::one());
    }
    if exponent.is_one() {
        return Ok(base);
    }
    let k = exponent.as_number();
    let int_k = k.and_then(Number::as_integer);
    match (&base, k) {
        (Expr::Const(b), Some(x)) => {
            if b.is_zero() {
                if x.is_negative() {
                    return Err(ExprError::DivisionByZero {
                        subtree: base.pow(exponent).to_string(),
                    });
                }
                return Ok(Expr::zero());
            }
            if b.is_one() {
                return Ok(Expr::one());
            }
            if let Some(n) = int_k.filter(|n| n.abs() <= MAX_FOLDED_EXPONENT) {
                if let Some(v) = b.powi(n) {
                    return Ok(Expr::Const(v));
                }
            }
            if matches!(b, Number::Real(_)) || matches!(x, Number::Real(_)) {
                let v = b.to_f64().powf(x.to_f64());
                if v.is_finite() {
                    return Ok(Expr::real(v));
                }
            }
            Ok(base.pow(exponent))
        }
        (Expr::Const(b), None) if b.is_one() => Ok(Expr::one()),
        (Expr::Pow(inner_base, inner_exp), Some(_)) if int_k.is_some() => {
            let combined = mul(vec![(**inner_exp).clone(), exponent])?;
            pow((**inner_base).clone(), combined)
        }
        (Expr::Mul(factors), Some(_)) if int_k.is_some() => {
            let parts = factors
                .iter()
                .map(|f| pow(f.clone(), exponent.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            mul(parts)
        }
        (Expr::Add(terms), Some(_)) => match int_k {
            Some(n)
                if n > 1
                    && terms
                        .len()
                        .checked_pow(n as u32)
                        .is_some_and(|c| c <= MAX_EXPANDED_TERMS) =>
            {
                let mut acc = base.clone();
                for _ in 1..n {
                    acc = distribute(&acc, terms)?;
                }
                Ok(acc)
            }
            _ => Ok(base.pow(exponent)),
        },
        _ => Ok(base.pow(exponent)),
    }
}

pub(crate) fn apply(f: Func, arg: Expr) -> Expr {
    if let Expr::Const(n) = arg {
        if n.is_zero() {
            match f {
                Func::Sin | Func::Tan | Func::Sinh | Func::Tanh | Func::Sqrt => {
                    return Expr::zero()
                }
                Func::Cos | Func::Cosh | Func::Exp => return Expr::one(),
                Func::Ln => {}
            }
        }
        if n.is_one() && matches!(f, Func::Ln | Func::Sqrt) {
            return if f == Func::Ln {
                Expr::zero()
            } else {
                Expr::one()
            };
        }
        if f == Func::Sqrt {
            if let Some(root) = n.exact_sqrt() {
                return Expr::Const(root);
            }
        }
        if let Number::Real(v) = n {
            let value = super::eval::apply_func(f, v);
            if let Ok(value) = value {
                return Expr::real(value);
            }
        }
        return Expr::apply(f, arg);
    }
    if f == Func::Ln {
        if let Expr::Apply(Func::Exp, inner) = arg {
            return *inner;
        }
    }
    Expr::apply(f, arg)
}
