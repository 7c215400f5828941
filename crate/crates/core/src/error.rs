use thiserror::Error;

use crate::expr::ExprError;
use crate::mechanics::Role;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("expected a {expected} Lagrangian, got a {found} one")]
    WrongRole { expected: Role, found: Role },
    #[error("Lagrangian is not null: its Euler-Lagrange expression is {0}")]
    NotNull(String),
    #[error("gauge-family exponents must be positive integers, got {0}")]
    InvalidExponent(i64),
    #[error("{what} `{expr}` may only depend on {allowed}")]
    VariableMixing {
        what: &'static str,
        expr: String,
        allowed: &'static str,
    },
    #[error("malformed {family} term `{term}`: {reason}")]
    FamilyTerm {
        family: &'static str,
        term: String,
        reason: String,
    },
    #[error("unknown gauge family `{0}`")]
    UnknownFamily(String),
    #[error("degenerate Lagrangian: the coefficient of xddot in `{0}` vanishes identically")]
    Degenerate(String),
    #[error("Euler-Lagrange expression `{0}` is not affine in xddot")]
    NonlinearInAcceleration(String),
    #[error("unknown catalog entry `{id}`; valid ids: {valid}")]
    UnknownEntry { id: String, valid: String },
    #[error("unknown integrator `{0}`")]
    UnknownIntegrator(String),
    #[error("invalid integration window: {0}")]
    InvalidWindow(String),
    #[error("integration failed at t = {t}: {source}")]
    Integration { t: f64, source: ExprError },
    #[error("quadrature: {0}")]
    Quadrature(String),
}
