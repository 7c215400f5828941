//! Lagrangians, the Euler-Lagrange operator, and the null Lagrangians
//! generated by gauge functions.
//!
//! A gauge function `Φ(x, t)` yields the null Lagrangian `dΦ/dt`, whose
//! Euler-Lagrange expression vanishes identically. Its partial time derivative
//! is a different matter: adding `σ ∂Φ/∂t` to a standard Lagrangian changes
//! the equation of motion by the force `σ ∂²Φ/∂t∂x`.

mod families;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{
    compare_numeric, diff, simplify, total_time_derivative, Domain, Expr, NumericOptions, Symbol,
};

pub use families::{
    random_specs, FamilyKind, FamilyRegistry, GaugeFamily, GaugeFamilyResult, PowerSeries,
    Separable, SpatialPowers,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Standard,
    Null,
    Total,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Standard => "standard",
            Role::Null => "null",
            Role::Total => "total",
        })
    }
}

/// Driving sign `σ`: the force is `σ ∂²Φ/∂t∂x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn apply(self, e: Expr) -> Expr {
        match self {
            Sign::Plus => e,
            Sign::Minus => -e,
        }
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(format!("invalid sign `{other}` (expected + or -)")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A scalar `Φ(x, t)`; never depends on `xdot` or `xddot`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeFunction {
    body: Expr,
}

impl GaugeFunction {
    pub fn new(body: &Expr) -> Result<Self> {
        body.ensure_free_of(&[Symbol::Xdot, Symbol::Xddot])?;
        Ok(GaugeFunction {
            body: simplify(body)?,
        })
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }
}

impl fmt::Display for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.body.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lagrangian {
    body: Expr,
    role: Role,
}

impl Lagrangian {
    fn tagged(body: &Expr, role: Role) -> Result<Self> {
        body.ensure_free_of(&[Symbol::Xddot])?;
        Ok(Lagrangian {
            body: simplify(body)?,
            role,
        })
    }

    pub fn standard(body: &Expr) -> Result<Self> {
        Self::tagged(body, Role::Standard)
    }

    pub fn total(body: &Expr) -> Result<Self> {
        Self::tagged(body, Role::Total)
    }

    /// Tag `body` as null; fails unless [`is_null`] holds.
    pub fn null(body: &Expr) -> Result<Self> {
        let l = Self::tagged(body, Role::Null)?;
        if !is_null(&l)? {
            return Err(Error::NotNull(euler_lagrange(&l)?.to_string()));
        }
        Ok(l)
    }

    /// `½ xdot² − ½ x²`: unit mass, unit frequency.
    pub fn harmonic_oscillator() -> Self {
        let half = Expr::ratio(1, 2);
        let body = half.clone() * Expr::xdot().powi(2) - half * Expr::x().powi(2);
        Self::standard(&body).expect("oscillator Lagrangian is well formed")
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn role(&self) -> Role {
        self.role
    }
}

impl fmt::Display for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.body.fmt(f)
    }
}

/// Sampling domain used when a symbolic zero test is inconclusive:
/// reserved symbols on `[-3, 3]`, parameters on `[-2, 2]`.
pub fn default_domain<'a>(exprs: impl IntoIterator<Item = &'a Expr>) -> Domain {
    let mut domain = Domain::new();
    for e in exprs {
        for s in e.symbols() {
            domain.insert(s.name().to_string(), (-3.0, 3.0));
        }
        for p in e.parameters() {
            domain.insert(p, (-2.0, 2.0));
        }
    }
    domain
}

/// True if `e` simplifies to zero or vanishes numerically on the default
/// domain.
pub(crate) fn vanishes(e: &Expr) -> Result<bool> {
    let e = simplify(e)?;
    if e.is_zero() {
        return Ok(true);
    }
    let zero = Expr::zero();
    let domain = default_domain([&e]);
    Ok(compare_numeric(&e, &zero, &domain, NumericOptions::default())?.equal)
}

/// `Φ ↦ dΦ/dt = ∂Φ/∂t + xdot ∂Φ/∂x`.
pub fn null_from_gauge(phi: &GaugeFunction) -> Result<Lagrangian> {
    Ok(Lagrangian {
        body: total_time_derivative(phi.body())?,
        role: Role::Null,
    })
}

/// `d/dt(∂L/∂xdot) − ∂L/∂x`, an expression over `xddot, xdot, x, t`.
pub fn euler_lagrange(l: &Lagrangian) -> Result<Expr> {
    let momentum = diff(l.body(), Symbol::Xdot)?;
    let rate = total_time_derivative(&momentum)?;
    let gradient = diff(l.body(), Symbol::X)?;
    Ok(simplify(&(rate - gradient))?)
}

/// Symbolic zero test on the Euler-Lagrange expression with a numeric
/// fallback for identities the simplifier does not close.
pub fn is_null(l: &Lagrangian) -> Result<bool> {
    vanishes(&euler_lagrange(l)?)
}

/// `xdot ∂L/∂xdot − L`.
pub fn energy_function(l: &Lagrangian) -> Result<Expr> {
    let momentum = diff(l.body(), Symbol::Xdot)?;
    Ok(simplify(&(Expr::xdot() * momentum - l.body().clone()))?)
}

/// `E_n = −∂Φ/∂t`; zero when `Φ` has no explicit time dependence.
pub fn energy_from_gauge(phi: &GaugeFunction) -> Result<Expr> {
    Ok(simplify(&-diff(phi.body(), Symbol::T)?)?)
}

/// `σ ∂²Φ/∂t∂x`.
pub fn force_from_gauge(phi: &GaugeFunction, sign: Sign) -> Result<Expr> {
    let mixed = diff(&diff(phi.body(), Symbol::T)?, Symbol::X)?;
    Ok(simplify(&sign.apply(mixed))?)
}

fn require_standard(l: &Lagrangian) -> Result<()> {
    if l.role() != Role::Standard {
        return Err(Error::WrongRole {
            expected: Role::Standard,
            found: l.role(),
        });
    }
    Ok(())
}

/// `L_s + dΦ/dt`; leaves the equation of motion unchanged.
pub fn total_with_null(standard: &Lagrangian, phi: &GaugeFunction) -> Result<Lagrangian> {
    require_standard(standard)?;
    let null = null_from_gauge(phi)?;
    Lagrangian::total(&(standard.body().clone() + null.body))
}

/// `L_s − σ E_n = L_s + σ ∂Φ/∂t`. The equation of motion gains the
/// right-hand side `σ ∂²Φ/∂t∂x`.
pub fn drive_with_gauge(
    standard: &Lagrangian,
    phi: &GaugeFunction,
    sign: Sign,
) -> Result<Lagrangian> {
    require_standard(standard)?;
    let dphi_dt = diff(phi.body(), Symbol::T)?;
    Lagrangian::total(&(standard.body().clone() + sign.apply(dphi_dt)))
}
