//! The three separated-variable gauge families and their closed-form null
//! Lagrangians and forces.
//!
//! | tag | gauge                          | null Lagrangian                       | force                 |
//! |-----|--------------------------------|---------------------------------------|-----------------------|
//! | g1  | `Σ C[m,n] x^m t^n`             | `Σ C[m,n] (m xdot t + n x) x^(m-1) t^(n-1)` | `Σ m n C[m,n] x^(m-1) t^(n-1)` |
//! | g2  | `Σ c[m] x^m f_m(t)`            | `Σ (m f_m xdot + f_m' x) c[m] x^(m-1)` | `Σ m f_m' c[m] x^(m-1)` |
//! | g3  | `Σ c f(t) g(x)`                | `Σ c (f' g + xdot f g')`              | `Σ c f' g'`           |
//!
//! Each family is a [`GaugeFamily`]; a [`FamilyRegistry`] maps tags to
//! [`FamilyKind`]s that parse term lists and draw random instances.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GaugeFunction, Lagrangian};
use crate::error::{Error, Result};
use crate::expr::{diff, parse, simplify, Expr, Symbol};

/// `(Φ, L_n, F)` as produced by a family's closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFamilyResult {
    pub gauge: GaugeFunction,
    pub null_lagrangian: Lagrangian,
    pub force: Expr,
}

pub trait GaugeFamily: fmt::Debug + Send + Sync {
    fn tag(&self) -> &'static str;

    fn gauge(&self) -> Result<GaugeFunction>;

    /// The family's closed-form null Lagrangian.
    fn null_lagrangian(&self) -> Result<Lagrangian>;

    /// The family's closed-form force.
    fn force(&self) -> Result<Expr>;

    /// Human-readable list of coefficients and functions.
    fn describe(&self) -> String;

    fn build(&self) -> Result<GaugeFamilyResult> {
        Ok(GaugeFamilyResult {
            gauge: self.gauge()?,
            null_lagrangian: self.null_lagrangian()?,
            force: self.force()?,
        })
    }
}

fn sum(terms: Vec<Expr>) -> Result<Expr> {
    Ok(simplify(&Expr::Add(terms))?)
}

fn closed_null(terms: Vec<Expr>) -> Result<Lagrangian> {
    // Skip the Euler-Lagrange check; these are null by construction.
    let body = sum(terms)?;
    Ok(Lagrangian {
        body,
        role: super::Role::Null,
    })
}

fn positive(n: i64) -> Result<u32> {
    u32::try_from(n)
        .ok()
        .filter(|&v| v >= 1)
        .ok_or(Error::InvalidExponent(n))
}

fn only(what: &'static str, e: &Expr, allowed: &'static str, forbidden: &[Symbol]) -> Result<()> {
    if forbidden.iter().any(|s| e.depends_on(*s)) {
        return Err(Error::VariableMixing {
            what,
            expr: e.to_string(),
            allowed,
        });
    }
    Ok(())
}

fn coefficient(e: &Expr) -> Result<Expr> {
    only("coefficient", e, "parameters", &Symbol::ALL)?;
    Ok(simplify(e)?)
}

fn time_function(e: &Expr) -> Result<Expr> {
    only("f", e, "t", &[Symbol::X, Symbol::Xdot, Symbol::Xddot])?;
    Ok(simplify(e)?)
}

fn space_function(e: &Expr) -> Result<Expr> {
    only("g", e, "x", &[Symbol::T, Symbol::Xdot, Symbol::Xddot])?;
    Ok(simplify(e)?)
}

fn x_pow(k: u32) -> Expr {
    Expr::x().powi(k as i64)
}

fn t_pow(k: u32) -> Expr {
    Expr::t().powi(k as i64)
}

/// g1: a double power series `Σ C[m,n] x^m t^n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSeries {
    coefficients: BTreeMap<(u32, u32), Expr>,
}

impl PowerSeries {
    /// Build from `((m, n), C)` pairs; repeated indices accumulate.
    pub fn new(terms: impl IntoIterator<Item = ((i64, i64), Expr)>) -> Result<Self> {
        let mut coefficients: BTreeMap<(u32, u32), Expr> = BTreeMap::new();
        for ((m, n), c) in terms {
            let key = (positive(m)?, positive(n)?);
            let c = coefficient(&c)?;
            let merged = match coefficients.remove(&key) {
                Some(prev) => sum(vec![prev, c])?,
                None => c,
            };
            coefficients.insert(key, merged);
        }
        Ok(PowerSeries { coefficients })
    }

    pub fn coefficients(&self) -> &BTreeMap<(u32, u32), Expr> {
        &self.coefficients
    }
}

impl GaugeFamily for PowerSeries {
    fn tag(&self) -> &'static str {
        "g1"
    }

    fn gauge(&self) -> Result<GaugeFunction> {
        let terms = self
            .coefficients
            .iter()
            .map(|(&(m, n), c)| c.clone() * x_pow(m) * t_pow(n))
            .collect();
        GaugeFunction::new(&Expr::Add(terms))
    }

    fn null_lagrangian(&self) -> Result<Lagrangian> {
        let terms = self
            .coefficients
            .iter()
            .map(|(&(m, n), c)| {
                let bracket = Expr::int(m as i64) * Expr::xdot() * Expr::t()
                    + Expr::int(n as i64) * Expr::x();
                c.clone() * bracket * x_pow(m - 1) * t_pow(n - 1)
            })
            .collect();
        closed_null(terms)
    }

    fn force(&self) -> Result<Expr> {
        let terms = self
            .coefficients
            .iter()
            .map(|(&(m, n), c)| Expr::int((m * n) as i64) * c.clone() * x_pow(m - 1) * t_pow(n - 1))
            .collect();
        sum(terms)
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .map(|((m, n), c)| format!("C[{m},{n}] = {c}"))
            .collect();
        format!("g1: {}", parts.join("; "))
    }
}

/// One `c x^m f(t)` term of a g2 gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialPowerTerm {
    pub power: u32,
    pub coefficient: Expr,
    pub time_fn: Expr,
}

/// g2: powers of `x` weighted by arbitrary functions of time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpatialPowers {
    terms: Vec<SpatialPowerTerm>,
}

impl SpatialPowers {
    /// Build from `(m, c_m, f_m(t))` triples.
    pub fn new(terms: impl IntoIterator<Item = (i64, Expr, Expr)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(m, c, f)| {
                Ok(SpatialPowerTerm {
                    power: positive(m)?,
                    coefficient: coefficient(&c)?,
                    time_fn: time_function(&f)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SpatialPowers { terms })
    }

    pub fn terms(&self) -> &[SpatialPowerTerm] {
        &self.terms
    }
}

impl GaugeFamily for SpatialPowers {
    fn tag(&self) -> &'static str {
        "g2"
    }

    fn gauge(&self) -> Result<GaugeFunction> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.coefficient.clone() * x_pow(t.power) * t.time_fn.clone())
            .collect();
        GaugeFunction::new(&Expr::Add(terms))
    }

    fn null_lagrangian(&self) -> Result<Lagrangian> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let rate = diff(&t.time_fn, Symbol::T)?;
                let bracket =
                    Expr::int(t.power as i64) * t.time_fn.clone() * Expr::xdot() + rate * Expr::x();
                Ok(bracket * t.coefficient.clone() * x_pow(t.power - 1))
            })
            .collect::<Result<_>>()?;
        closed_null(terms)
    }

    fn force(&self) -> Result<Expr> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let rate = diff(&t.time_fn, Symbol::T)?;
                Ok(Expr::int(t.power as i64) * rate * t.coefficient.clone() * x_pow(t.power - 1))
            })
            .collect::<Result<_>>()?;
        sum(terms)
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let k = i + 1;
                format!(
                    "m = {}, c{k} = {}, f{k} = {}",
                    t.power, t.coefficient, t.time_fn
                )
            })
            .collect();
        format!("g2: {}", parts.join("; "))
    }
}

/// One `c f(t) g(x)` term of a g3 gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTerm {
    pub coefficient: Expr,
    pub time_fn: Expr,
    pub space_fn: Expr,
}

/// g3: sums of products of a function of time and a function of position.
///
/// Both the gauge and the force are summed over every term, i.e. over both
/// indices of the coefficient table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Separable {
    terms: Vec<SeparableTerm>,
}

impl Separable {
    /// Build from `(c, f(t), g(x))` triples.
    pub fn new(terms: impl IntoIterator<Item = (Expr, Expr, Expr)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(c, f, g)| {
                Ok(SeparableTerm {
                    coefficient: coefficient(&c)?,
                    time_fn: time_function(&f)?,
                    space_fn: space_function(&g)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Separable { terms })
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }
}

impl GaugeFamily for Separable {
    fn tag(&self) -> &'static str {
        "g3"
    }

    fn gauge(&self) -> Result<GaugeFunction> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.coefficient.clone() * t.time_fn.clone() * t.space_fn.clone())
            .collect();
        GaugeFunction::new(&Expr::Add(terms))
    }

    fn null_lagrangian(&self) -> Result<Lagrangian> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let f_rate = diff(&t.time_fn, Symbol::T)?;
                let g_slope = diff(&t.space_fn, Symbol::X)?;
                let bracket =
                    f_rate * t.space_fn.clone() + Expr::xdot() * t.time_fn.clone() * g_slope;
                Ok(t.coefficient.clone() * bracket)
            })
            .collect::<Result<_>>()?;
        closed_null(terms)
    }

    fn force(&self) -> Result<Expr> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let f_rate = diff(&t.time_fn, Symbol::T)?;
                let g_slope = diff(&t.space_fn, Symbol::X)?;
                Ok(t.coefficient.clone() * f_rate * g_slope)
            })
            .collect::<Result<_>>()?;
        sum(terms)
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let k = i + 1;
                format!(
                    "C[{k},{k}] = {}, f{k} = {}, g{k} = {}",
                    t.coefficient, t.time_fn, t.space_fn
                )
            })
            .collect();
        format!("g3: {}", parts.join("; "))
    }
}

/// A gauge family as a pluggable strategy: knows its tag, how to read a term
/// list, and how to draw a random instance for property tests.
pub trait FamilyKind: Send + Sync {
    fn tag(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Parse a `;`-separated term list. Formats:
    /// g1 `m,n:C`, g2 `m:c:f(t)`, g3 `c:f(t):g(x)`.
    fn parse_terms(&self, text: &str) -> Result<Box<dyn GaugeFamily>>;

    fn sample(&self, rng: &mut dyn RngCore) -> Box<dyn GaugeFamily>;
}

fn term_error(family: &'static str, term: &str, reason: impl Into<String>) -> Error {
    Error::FamilyTerm {
        family,
        term: term.to_string(),
        reason: reason.into(),
    }
}

fn split_terms(text: &str) -> impl Iterator<Item = &str> {
    text.split(';').map(str::trim).filter(|s| !s.is_empty())
}

fn fields<'a>(family: &'static str, term: &'a str, count: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = term.splitn(count, ':').map(str::trim).collect();
    if parts.len() != count {
        return Err(term_error(
            family,
            term,
            format!("expected {count} `:`-separated fields"),
        ));
    }
    Ok(parts)
}

fn index(family: &'static str, term: &str, s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| term_error(family, term, format!("`{s}` is not an integer")))
}

fn random_coefficient(rng: &mut dyn RngCore) -> Expr {
    Expr::real(rng.random_range(-2.0..=2.0))
}

/// f(t) drawn from {t^k, sin(kt), cos(kt), exp(t/4)}, k in 1..=4.
fn random_time_fn(rng: &mut dyn RngCore) -> Expr {
    let k = rng.random_range(1..=4i64);
    match rng.random_range(0..4) {
        0 => Expr::t().powi(k),
        1 => Expr::sin(Expr::int(k) * Expr::t()),
        2 => Expr::cos(Expr::int(k) * Expr::t()),
        _ => Expr::exp(Expr::t() / Expr::int(4)),
    }
}

/// g(x) drawn from {x^k, sin(x)}, k in 1..=4.
fn random_space_fn(rng: &mut dyn RngCore) -> Expr {
    if rng.random_bool(0.75) {
        Expr::x().powi(rng.random_range(1..=4))
    } else {
        Expr::sin(Expr::x())
    }
}

fn term_count(rng: &mut dyn RngCore) -> usize {
    rng.random_range(1..=3)
}

struct PowerSeriesKind;

impl FamilyKind for PowerSeriesKind {
    fn tag(&self) -> &'static str {
        "g1"
    }

    fn summary(&self) -> &'static str {
        "power series C[m,n] x^m t^n; terms `m,n:C`"
    }

    fn parse_terms(&self, text: &str) -> Result<Box<dyn GaugeFamily>> {
        let mut out = Vec::new();
        for term in split_terms(text) {
            let f = fields("g1", term, 2)?;
            let (m, n) = f[0]
                .split_once(',')
                .ok_or_else(|| term_error("g1", term, "expected `m,n` before `:`"))?;
            out.push(((index("g1", term, m)?, index("g1", term, n)?), parse(f[1])?));
        }
        Ok(Box::new(PowerSeries::new(out)?))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Box<dyn GaugeFamily> {
        let terms: Vec<_> = (0..term_count(rng))
            .map(|_| {
                let m = rng.random_range(1..=4);
                let n = rng.random_range(1..=4);
                ((m, n), random_coefficient(rng))
            })
            .collect();
        Box::new(PowerSeries::new(terms).expect("sampled exponents are positive"))
    }
}

struct SpatialPowersKind;

impl FamilyKind for SpatialPowersKind {
    fn tag(&self) -> &'static str {
        "g2"
    }

    fn summary(&self) -> &'static str {
        "x powers times functions of time c[m] x^m f_m(t); terms `m:c:f`"
    }

    fn parse_terms(&self, text: &str) -> Result<Box<dyn GaugeFamily>> {
        let mut out = Vec::new();
        for term in split_terms(text) {
            let f = fields("g2", term, 3)?;
            out.push((index("g2", term, f[0])?, parse(f[1])?, parse(f[2])?));
        }
        Ok(Box::new(SpatialPowers::new(out)?))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Box<dyn GaugeFamily> {
        let terms: Vec<_> = (0..term_count(rng))
            .map(|_| {
                let m = rng.random_range(1..=4);
                (m, random_coefficient(rng), random_time_fn(rng))
            })
            .collect();
        Box::new(SpatialPowers::new(terms).expect("sampled terms are well formed"))
    }
}

struct SeparableKind;

impl FamilyKind for SeparableKind {
    fn tag(&self) -> &'static str {
        "g3"
    }

    fn summary(&self) -> &'static str {
        "separated products c f(t) g(x); terms `c:f:g`"
    }

    fn parse_terms(&self, text: &str) -> Result<Box<dyn GaugeFamily>> {
        let mut out = Vec::new();
        for term in split_terms(text) {
            let f = fields("g3", term, 3)?;
            out.push((parse(f[0])?, parse(f[1])?, parse(f[2])?));
        }
        Ok(Box::new(Separable::new(out)?))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Box<dyn GaugeFamily> {
        let terms: Vec<_> = (0..term_count(rng))
            .map(|_| {
                (
                    random_coefficient(rng),
                    random_time_fn(rng),
                    random_space_fn(rng),
                )
            })
            .collect();
        Box::new(Separable::new(terms).expect("sampled terms are well formed"))
    }
}

/// Gauge families keyed by tag.
pub struct FamilyRegistry {
    kinds: BTreeMap<&'static str, Box<dyn FamilyKind>>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        FamilyRegistry {
            kinds: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, kind: Box<dyn FamilyKind>) {
        self.kinds.insert(kind.tag(), kind);
    }

    pub fn get(&self, tag: &str) -> Result<&dyn FamilyKind> {
        self.kinds
            .get(tag)
            .map(|k| k.as_ref())
            .ok_or_else(|| Error::UnknownFamily(tag.to_string()))
    }

    pub fn tags(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.kinds.keys().copied()
    }

    pub fn kinds(&self) -> impl Iterator<Item = &dyn FamilyKind> {
        self.kinds.values().map(|k| k.as_ref())
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        let mut registry = FamilyRegistry::empty();
        registry.register(Box::new(PowerSeriesKind));
        registry.register(Box::new(SpatialPowersKind));
        registry.register(Box::new(SeparableKind));
        registry
    }
}

/// `count` random gauges cycling through the registered families, seeded.
pub fn random_specs(
    registry: &FamilyRegistry,
    count: usize,
    seed: u64,
) -> Vec<Box<dyn GaugeFamily>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds: Vec<&dyn FamilyKind> = registry.kinds().collect();
    (0..count)
        .map(|i| kinds[i % kinds.len()].sample(&mut rng))
        .collect()
}
