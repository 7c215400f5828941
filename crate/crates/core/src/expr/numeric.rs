//! Seeded numerical equivalence of two expressions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Binding, CompiledExpr, Expr, ExprError};

/// Closed sampling interval per name. A degenerate interval pins a value.
pub type Domain = BTreeMap<String, (f64, f64)>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            samples: 100,
            tol: 1e-10,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub equal: bool,
    /// Largest `|a - b| / (1 + max(|a|, |b|))` over the points evaluated.
    pub max_scaled_error: f64,
    pub samples_checked: usize,
    /// First failing point, if any.
    pub counterexample: Option<Binding>,
    /// Evaluation failure at a sample point.
    pub diagnostic: Option<String>,
}

/// Compare `a` and `b` at `opts.samples` points drawn uniformly from
/// `domain`. Equality means `|a - b| <= tol * (1 + max(|a|, |b|))` at every
/// point. Names missing from the domain are an error; an evaluation failure
/// at a sample point makes the comparison unequal and is reported in
/// [`Comparison::diagnostic`].
pub fn compare_numeric(
    a: &Expr,
    b: &Expr,
    domain: &Domain,
    opts: NumericOptions,
) -> Result<Comparison, ExprError> {
    let mut names = a.free_names();
    names.extend(b.free_names());
    if let Some(missing) = names.iter().find(|n| !domain.contains_key(*n)) {
        return Err(ExprError::Unbound(missing.clone()));
    }
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let ca = CompiledExpr::new(a, &vars, &Binding::new())?;
    let cb = CompiledExpr::new(b, &vars, &Binding::new())?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut point = vec![0.0; vars.len()];
    let mut report = Comparison {
        equal: true,
        max_scaled_error: 0.0,
        samples_checked: 0,
        counterexample: None,
        diagnostic: None,
    };
    let as_binding = |point: &[f64]| -> Binding {
        vars.iter()
            .zip(point)
            .map(|(k, v)| (k.to_string(), *v))
            .collect()
    };
    for _ in 0..opts.samples {
        for (slot, name) in point.iter_mut().zip(&vars) {
            let (lo, hi) = domain[*name];
            let u: f64 = rng.random();
            *slot = lo + (hi - lo) * u;
        }
        let (va, vb) = match (ca.eval(&point), cb.eval(&point)) {
            (Ok(va), Ok(vb)) => (va, vb),
            (Err(e), _) | (_, Err(e)) => {
                report.equal = false;
                report.diagnostic = Some(e.to_string());
                report.counterexample = Some(as_binding(&point));
                return Ok(report);
            }
        };
        report.samples_checked += 1;
        let scaled = (va - vb).abs() / (1.0 + va.abs().max(vb.abs()));
        report.max_scaled_error = report.max_scaled_error.max(scaled);
        if scaled > opts.tol && report.equal {
            report.equal = false;
            report.counterexample = Some(as_binding(&point));
        }
    }
    Ok(report)
}

/// Boolean form of [`compare_numeric`].
pub fn equal_numeric(
    a: &Expr,
    b: &Expr,
    domain: &Domain,
    opts: NumericOptions,
) -> Result<bool, ExprError> {
    compare_numeric(a, b, domain, opts).map(|c| c.equal)
}
