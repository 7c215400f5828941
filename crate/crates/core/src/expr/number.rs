//! Numeric constants held inside expression trees.
//!
//! Integer and rational literals stay exact as long as the arithmetic fits in
//! 64-bit numerators and denominators; anything else degrades to `f64`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug)]
pub enum Number {
    Rational(Rational64),
    Real(f64),
}

impl Number {
    pub fn int(n: i64) -> Self {
        Number::Rational(Rational64::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Number::Rational(Rational64::new(num, den))
    }

    pub fn zero() -> Self {
        Number::int(0)
    }

    pub fn one() -> Self {
        Number::int(1)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Real(v) => v,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Real(v) => v == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Real(v) => v == 1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Number::Rational(r) => r.is_negative(),
            Number::Real(v) => v < 0.0,
        }
    }

    /// The value as an `i64` when it is an exact integer.
    pub fn as_integer(self) -> Option<i64> {
        match self {
            Number::Rational(r) if r.is_integer() => Some(r.to_integer()),
            Number::Real(v) if v.fract() == 0.0 && v.abs() < 9.0e15 => Some(v as i64),
            _ => None,
        }
    }

    pub fn is_exact_integer(self) -> bool {
        matches!(self, Number::Rational(r) if r.is_integer())
    }

    /// Reciprocal, `None` for zero.
    pub fn recip(self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Number::Rational(r) => match Rational64::one().checked_div(&r) {
                Some(q) => Number::Rational(q),
                None => Number::Real(1.0 / self.to_f64()),
            },
            Number::Real(v) => Number::Real(1.0 / v),
        })
    }

    /// Integer power; `None` for a zero base with a negative exponent.
    pub fn powi(self, exp: i64) -> Option<Number> {
        if exp < 0 {
            return self.recip()?.powi(-exp);
        }
        match self {
            Number::Rational(r) => {
                let mut acc = Rational64::one();
                for _ in 0..exp {
                    match acc.checked_mul(&r) {
                        Some(next) => acc = next,
                        None => return Some(Number::Real(self.to_f64().powf(exp as f64))),
                    }
                }
                Some(Number::Rational(acc))
            }
            Number::Real(v) => Some(Number::Real(v.powi(exp as i32))),
        }
    }

    /// Exact square root of a rational perfect square.
    pub fn exact_sqrt(self) -> Option<Number> {
        let Number::Rational(r) = self else {
            return None;
        };
        if r.is_negative() {
            return None;
        }
        let num = isqrt(*r.numer())?;
        let den = isqrt(*r.denom())?;
        Some(Number::ratio(num, den))
    }

    pub fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let root = (n as f64).sqrt().round() as i64;
    (root.checked_mul(root) == Some(n)).then_some(root)
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Number {}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a.cmp(b),
            (Number::Real(a), Number::Real(b)) => a.total_cmp(b),
            (Number::Rational(_), Number::Real(b)) => {
                self.to_f64().total_cmp(b).then(Ordering::Less)
            }
            (Number::Real(a), Number::Rational(_)) => {
                a.total_cmp(&other.to_f64()).then(Ordering::Greater)
            }
        }
    }
}

impl fmt::Display for Number {
    /// Rationals print as `p` or `p/q`; reals always carry a `.` or an
    /// exponent so that reparsing yields a real again.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Number::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Real(v) => write!(f, "{v:?}"),
        }
    }
}

impl std::ops::Add for Number {
    type Output = Number;

    fn add(self, other: Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => match a.checked_add(&b) {
                Some(r) => Number::Rational(r),
                None => Number::Real(self.to_f64() + other.to_f64()),
            },
            _ => Number::Real(self.to_f64() + other.to_f64()),
        }
    }
}

impl std::ops::Mul for Number {
    type Output = Number;

    fn mul(self, other: Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => match a.checked_mul(&b) {
                Some(r) => Number::Rational(r),
                None => Number::Real(self.to_f64() * other.to_f64()),
            },
            _ => Number::Real(self.to_f64() * other.to_f64()),
        }
    }
}

impl std::ops::Neg for Number {
    type Output = Number;

    fn neg(self) -> Number {
        match self {
            Number::Rational(r) => match Rational64::zero().checked_sub(&r) {
                Some(n) => Number::Rational(n),
                None => Number::Real(-r.to_f64().unwrap_or(f64::NAN)),
            },
            Number::Real(v) => Number::Real(-v),
        }
    }
}
