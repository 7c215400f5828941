//! Expression trees over the reserved symbols `x`, `t`, `xdot`, `xddot` and
//! free real parameters.
//!
//! Trees come in two flavours that share one type. Raw trees are whatever the
//! parser or the operator overloads produce and may contain `Neg`, `Div` and
//! nested sums. Canonical trees are the output of [`simplify`]: sums and
//! products are flattened and sorted, constants are folded, subtraction and
//! division are rewritten as multiplication by `-1` and by negative powers.
//! Everything downstream (differentiation, the mechanics layer) returns
//! canonical trees.

mod compile;
mod diff;
mod eval;
mod number;
mod numeric;
mod parse;
mod print;
mod simplify;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use thiserror::Error;

pub use compile::CompiledExpr;
pub use diff::{diff, total_time_derivative};
pub use eval::eval;
pub use number::Number;
pub use numeric::{compare_numeric, equal_numeric, Comparison, Domain, NumericOptions};
pub use parse::parse;
pub use simplify::simplify;

/// Parameter and symbol values used for evaluation.
pub type Binding = BTreeMap<String, f64>;

/// The four reserved names. Everything else is a parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    X,
    T,
    Xdot,
    Xddot,
}

impl Symbol {
    pub const ALL: [Symbol; 4] = [Symbol::X, Symbol::T, Symbol::Xdot, Symbol::Xddot];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::X => "x",
            Symbol::T => "t",
            Symbol::Xdot => "xdot",
            Symbol::Xddot => "xddot",
        }
    }

    pub fn from_name(name: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug)]
pub enum Expr {
    Const(Number),
    Sym(Symbol),
    Param(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Apply(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("division by zero in `{subtree}`")]
    DivisionByZero { subtree: String },
    #[error("domain error in `{subtree}`: {reason}")]
    Domain { subtree: String, reason: String },
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("expression `{expr}` must not depend on `{symbol}`")]
    UnexpectedSymbol { expr: String, symbol: Symbol },
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Number::int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Const(Number::ratio(num, den))
    }

    pub fn real(v: f64) -> Expr {
        Expr::Const(Number::Real(v))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn x() -> Expr {
        Expr::Sym(Symbol::X)
    }

    pub fn t() -> Expr {
        Expr::Sym(Symbol::T)
    }

    pub fn xdot() -> Expr {
        Expr::Sym(Symbol::Xdot)
    }

    pub fn xddot() -> Expr {
        Expr::Sym(Symbol::Xddot)
    }

    /// A symbol if `name` is reserved, otherwise a parameter.
    pub fn name(name: &str) -> Expr {
        match Symbol::from_name(name) {
            Some(s) => Expr::Sym(s),
            None => Expr::Param(name.to_string()),
        }
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        Expr::Apply(f, Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::apply(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::apply(Func::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::apply(Func::Exp, arg)
    }

    pub fn pow(self, exponent: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(exponent))
    }

    pub fn powi(self, exponent: i64) -> Expr {
        self.pow(Expr::int(exponent))
    }

    pub fn as_number(&self) -> Option<Number> {
        match self {
            Expr::Const(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Sym(_) | Expr::Param(_) => Vec::new(),
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().collect(),
            Expr::Pow(a, b) | Expr::Div(a, b) => vec![a, b],
            Expr::Neg(a) | Expr::Apply(_, a) => vec![a],
        }
    }

    pub fn depends_on(&self, sym: Symbol) -> bool {
        match self {
            Expr::Sym(s) => *s == sym,
            _ => self.children().into_iter().any(|c| c.depends_on(sym)),
        }
    }

    /// Reserved symbols that occur in the tree.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Sym(s) = e {
                out.insert(*s);
            }
        });
        out
    }

    /// Parameter names that occur in the tree.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Param(p) = e {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Every name (symbols and parameters) that evaluation needs bound.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.parameters();
        out.extend(self.symbols().into_iter().map(|s| s.name().to_string()));
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Replace every occurrence of `name` (symbol or parameter) by `with`.
    /// The result is raw; simplify it if needed.
    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        let sub = |e: &Expr| e.substitute(name, with);
        match self {
            Expr::Sym(s) if s.name() == name => with.clone(),
            Expr::Param(p) if p == name => with.clone(),
            Expr::Const(_) | Expr::Sym(_) | Expr::Param(_) => self.clone(),
            Expr::Add(xs) => Expr::Add(xs.iter().map(sub).collect()),
            Expr::Mul(xs) => Expr::Mul(xs.iter().map(sub).collect()),
            Expr::Pow(a, b) => Expr::Pow(Box::new(sub(a)), Box::new(sub(b))),
            Expr::Div(a, b) => Expr::Div(Box::new(sub(a)), Box::new(sub(b))),
            Expr::Neg(a) => Expr::Neg(Box::new(sub(a))),
            Expr::Apply(f, a) => Expr::Apply(*f, Box::new(sub(a))),
        }
    }

    /// Substitute every bound name by its value.
    pub fn bind(&self, binding: &Binding) -> Expr {
        binding
            .iter()
            .fold(self.clone(), |e, (k, v)| e.substitute(k, &Expr::real(*v)))
    }

    /// Fails if the tree mentions any of `forbidden`.
    pub fn ensure_free_of(&self, forbidden: &[Symbol]) -> Result<(), ExprError> {
        match forbidden.iter().find(|s| self.depends_on(**s)) {
            Some(&symbol) => Err(ExprError::UnexpectedSymbol {
                expr: self.to_string(),
                symbol,
            }),
            None => Ok(()),
        }
    }

    // Sort rank for the non-power node kinds.
    fn rank(&self) -> u8 {
        match self {
            Expr::Const(_) => 0,
            Expr::Param(_) => 1,
            Expr::Sym(_) => 2,
            Expr::Apply(..) => 3,
            Expr::Mul(_) => 4,
            Expr::Add(_) => 5,
            Expr::Neg(_) => 6,
            Expr::Div(..) => 7,
            Expr::Pow(..) => 8,
        }
    }
}

static ONE: Expr = Expr::Const(Number::Rational(num_rational::Ratio::new_raw(1, 1)));

fn split_pow(e: &Expr) -> (&Expr, &Expr) {
    match e {
        Expr::Pow(b, x) => (b, x),
        _ => (e, &ONE),
    }
}

fn cmp_slices(a: &[Expr], b: &[Expr]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Total order used to sort sum and product operands. Powers sort next to
/// their base so that `x^2` lands beside `x`.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        let self_pow = matches!(self, Expr::Pow(..));
        let other_pow = matches!(other, Expr::Pow(..));
        if self_pow || other_pow {
            let (b1, e1) = split_pow(self);
            let (b2, e2) = split_pow(other);
            return b1
                .cmp(b2)
                .then_with(|| e1.cmp(e2))
                .then(self_pow.cmp(&other_pow));
        }
        match (self, other) {
            (Expr::Const(a), Expr::Const(b)) => a.cmp(b),
            (Expr::Param(a), Expr::Param(b)) => a.cmp(b),
            (Expr::Sym(a), Expr::Sym(b)) => a.cmp(b),
            (Expr::Apply(f, a), Expr::Apply(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Expr::Mul(a), Expr::Mul(b)) | (Expr::Add(a), Expr::Add(b)) => cmp_slices(a, b),
            (Expr::Neg(a), Expr::Neg(b)) => a.cmp(b),
            (Expr::Div(a1, b1), Expr::Div(a2, b2)) => a1.cmp(a2).then_with(|| b1.cmp(b2)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::Sym(s)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}
