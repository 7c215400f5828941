//! Explicit equations of motion, fixed-step integration, action integrals
//! and energy checks along trajectories.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write as _};

use crate::error::{Error, Result};
use crate::expr::{diff, simplify, Binding, CompiledExpr, Expr, ExprError, Symbol};
use crate::mechanics::{
    energy_function, euler_lagrange, null_from_gauge, vanishes, GaugeFunction, Lagrangian,
};

/// Argument order of every compiled trajectory expression.
const STATE: [&str; 3] = ["t", "x", "xdot"];

/// Constant in the action-boundary tolerance `max(1e-8, C dt^4)`.
pub const ACTION_TOLERANCE_C: f64 = 1.0;
/// Constant in the energy-balance tolerance `max(1e-6, C dt^2)`.
pub const ENERGY_BALANCE_TOLERANCE_C: f64 = 1.0;

/// Upper bound on the number of steps in one integration.
const MAX_STEPS: f64 = 1e8;

/// `xddot = rhs(xdot, x, t)`.
#[derive(Debug, Clone)]
pub struct ExplicitOde {
    rhs: Expr,
    source: Lagrangian,
    binding: Binding,
    compiled: CompiledExpr,
}

impl ExplicitOde {
    /// Build directly from a right-hand side, with `source` recorded as
    /// provenance.
    pub fn new(rhs: &Expr, source: Lagrangian, binding: &Binding) -> Result<Self> {
        rhs.ensure_free_of(&[Symbol::Xddot])?;
        let rhs = simplify(rhs)?;
        let compiled = CompiledExpr::new(&rhs, &STATE, binding)?;
        Ok(ExplicitOde {
            rhs,
            source,
            binding: binding.clone(),
            compiled,
        })
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn source(&self) -> &Lagrangian {
        &self.source
    }

    pub fn binding(&self) -> &Binding {
        &self.binding
    }

    /// Acceleration at `(t, x, v)`.
    pub fn acceleration(&self, t: f64, x: f64, v: f64) -> Result<f64, ExprError> {
        self.compiled.eval(&[t, x, v])
    }
}

/// Solve the Euler-Lagrange equation `A xddot + B = 0` for `xddot = −B/A`.
pub fn equation_of_motion(l: &Lagrangian, binding: &Binding) -> Result<ExplicitOde> {
    let el = euler_lagrange(l)?;
    let a = simplify(&diff(&el, Symbol::Xddot)?)?;
    if !vanishes(&diff(&a, Symbol::Xddot)?)? {
        return Err(Error::NonlinearInAcceleration(el.to_string()));
    }
    if vanishes(&a)? {
        return Err(Error::Degenerate(l.body().to_string()));
    }
    let b = simplify(&el.substitute(Symbol::Xddot.name(), &Expr::zero()))?;
    let rhs = -b * a.powi(-1);
    ExplicitOde::new(&rhs, l.clone(), binding)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

/// Samples `(t, x, xdot)` on the grid of [`time_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub t1: f64,
    /// Spacing of the uniform part of the grid.
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub method: String,
}

impl Trajectory {
    /// Sample a known path `t ↦ (x, xdot)` on the same grid an integration
    /// would use.
    pub fn from_fn(
        t0: f64,
        t1: f64,
        dt: f64,
        method: &str,
        path: impl Fn(f64) -> (f64, f64),
    ) -> Result<Self> {
        let (times, h) = time_grid(t0, t1, dt)?;
        let samples = times
            .into_iter()
            .map(|t| {
                let (x, v) = path(t);
                Sample { t, x, v }
            })
            .collect();
        Ok(Trajectory {
            t0,
            t1,
            dt: h,
            samples,
            method: method.to_string(),
        })
    }

    pub fn intervals(&self) -> usize {
        self.samples.len().saturating_sub(1)
    }

    /// True if every interval has length `dt` (up to rounding).
    pub fn is_uniform(&self) -> bool {
        self.samples
            .windows(2)
            .all(|w| ((w[1].t - w[0].t) - self.dt).abs() <= 1e-9 * self.dt)
    }

    pub fn last(&self) -> Sample {
        *self.samples.last().expect("trajectories are never empty")
    }
}

/// Grid from `t0` to `t1`. When `(t1 − t0)/dt` is within a relative `1e-9`
/// of an integer `n`, the grid has `n` equal steps of `(t1 − t0)/n`.
/// Otherwise it takes whole steps of `dt` and one shorter final step.
/// Returns the times and the uniform spacing.
pub fn time_grid(t0: f64, t1: f64, dt: f64) -> Result<(Vec<f64>, f64)> {
    if !(t0.is_finite() && t1.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidWindow(format!(
            "t0 = {t0}, t1 = {t1}, dt = {dt} must be finite"
        )));
    }
    if dt <= 0.0 {
        return Err(Error::InvalidWindow(format!("dt = {dt} must be positive")));
    }
    if t1 <= t0 {
        return Err(Error::InvalidWindow(format!(
            "t1 = {t1} must exceed t0 = {t0}"
        )));
    }
    let span = t1 - t0;
    let ratio = span / dt;
    if ratio > MAX_STEPS {
        return Err(Error::InvalidWindow(format!(
            "{ratio:.3e} steps exceeds the limit of {MAX_STEPS:e}"
        )));
    }
    let n = ratio.round();
    if n >= 1.0 && (ratio - n).abs() <= 1e-9 * n {
        let n = n as usize;
        let h = span / n as f64;
        let mut times: Vec<f64> = (0..n).map(|k| t0 + k as f64 * h).collect();
        times.push(t1);
        return Ok((times, h));
    }
    let whole = ratio.floor() as usize;
    let mut times: Vec<f64> = (0..=whole).map(|k| t0 + k as f64 * dt).collect();
    times.push(t1);
    Ok((times, dt))
}

/// A one-step method for `x' = v, v' = a(t, x, v)`.
pub trait Integrator: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Advance `(x, v)` from `t` by `h`.
    fn step(
        &self,
        ode: &ExplicitOde,
        t: f64,
        x: f64,
        v: f64,
        h: f64,
    ) -> Result<(f64, f64), ExprError>;
}

/// Classical fourth-order Runge-Kutta.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rk4;

impl Integrator for Rk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn step(
        &self,
        ode: &ExplicitOde,
        t: f64,
        x: f64,
        v: f64,
        h: f64,
    ) -> Result<(f64, f64), ExprError> {
        let half = 0.5 * h;
        let a1 = ode.acceleration(t, x, v)?;
        let (x2, v2) = (x + half * v, v + half * a1);
        let a2 = ode.acceleration(t + half, x2, v2)?;
        let (x3, v3) = (x + half * v2, v + half * a2);
        let a3 = ode.acceleration(t + half, x3, v3)?;
        let (x4, v4) = (x + h * v3, v + h * a3);
        let a4 = ode.acceleration(t + h, x4, v4)?;
        Ok((
            x + h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
            v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        ))
    }
}

/// Integrators by name.
#[derive(Debug)]
pub struct IntegratorRegistry {
    methods: BTreeMap<&'static str, Box<dyn Integrator>>,
}

impl IntegratorRegistry {
    pub fn empty() -> Self {
        IntegratorRegistry {
            methods: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, method: Box<dyn Integrator>) {
        self.methods.insert(method.name(), method);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Integrator> {
        self.methods
            .get(name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownIntegrator(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }
}

impl Default for IntegratorRegistry {
    fn default() -> Self {
        let mut r = IntegratorRegistry::empty();
        r.register(Box::new(Rk4));
        r
    }
}

/// Integrate from `(x0, v0)` at `t0` to `t1` with `method`. A domain error
/// aborts with the time of the failing step.
pub fn integrate(
    method: &dyn Integrator,
    ode: &ExplicitOde,
    x0: f64,
    v0: f64,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory> {
    let (times, h) = time_grid(t0, t1, dt)?;
    let mut samples = Vec::with_capacity(times.len());
    let (mut x, mut v) = (x0, v0);
    samples.push(Sample { t: t0, x, v });
    for w in times.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let (nx, nv) = method
            .step(ode, ta, x, v, tb - ta)
            .map_err(|source| Error::Integration { t: ta, source })?;
        if !(nx.is_finite() && nv.is_finite()) {
            return Err(Error::Integration {
                t: ta,
                source: ExprError::Domain {
                    subtree: ode.rhs().to_string(),
                    reason: "state became non-finite".into(),
                },
            });
        }
        (x, v) = (nx, nv);
        samples.push(Sample { t: tb, x, v });
    }
    Ok(Trajectory {
        t0,
        t1,
        dt: h,
        samples,
        method: method.name().to_string(),
    })
}

pub fn integrate_rk4(
    ode: &ExplicitOde,
    x0: f64,
    v0: f64,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate(&Rk4, ode, x0, v0, t0, t1, dt)
}

/// Mean spacing of upward zero crossings of `x`, located by linear
/// interpolation. `None` with fewer than two crossings.
pub fn estimate_period(traj: &Trajectory) -> Option<f64> {
    let crossings: Vec<f64> = traj
        .samples
        .windows(2)
        .filter(|w| w[0].x < 0.0 && w[1].x >= 0.0)
        .map(|w| {
            let frac = -w[0].x / (w[1].x - w[0].x);
            w[0].t + frac * (w[1].t - w[0].t)
        })
        .collect();
    match crossings.as_slice() {
        [first, .., last] => Some((last - first) / (crossings.len() - 1) as f64),
        _ => None,
    }
}

/// Evaluate `e` (over `t, x, xdot` and bound parameters) at every sample.
pub fn along(e: &Expr, traj: &Trajectory, binding: &Binding) -> Result<Vec<f64>> {
    e.ensure_free_of(&[Symbol::Xddot])?;
    let c = CompiledExpr::new(e, &STATE, binding)?;
    traj.samples
        .iter()
        .map(|s| {
            c.eval(&[s.t, s.x, s.v])
                .map_err(|source| Error::Integration { t: s.t, source })
        })
        .collect()
}

/// Composite Simpson rule on a uniform grid with an even interval count.
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    let intervals = values.len().saturating_sub(1);
    if intervals < 2 {
        return Err(Error::Quadrature(format!(
            "need at least 3 samples, got {}",
            values.len()
        )));
    }
    if !intervals.is_multiple_of(2) {
        return Err(Error::Quadrature(format!(
            "composite Simpson needs an even number of intervals, got {intervals}"
        )));
    }
    let interior: f64 = values[1..intervals]
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    Ok(h / 3.0 * (values[0] + interior + values[intervals]))
}

/// `∫ L(xdot, x, t) dt` along `traj` by composite Simpson.
pub fn action(l: &Lagrangian, traj: &Trajectory, binding: &Binding) -> Result<f64> {
    if !traj.is_uniform() {
        return Err(Error::Quadrature(format!(
            "grid over [{}, {}] is not uniform in dt = {}",
            traj.t0, traj.t1, traj.dt
        )));
    }
    simpson(&along(l.body(), traj, binding)?, traj.dt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionBoundaryReport {
    pub action: f64,
    /// `Φ(x(t1), t1) − Φ(x(t0), t0)`.
    pub boundary: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compare the action of `dΦ/dt` with the change of `Φ` between the ends of
/// `traj`.
pub fn verify_action_boundary(
    phi: &GaugeFunction,
    traj: &Trajectory,
    binding: &Binding,
) -> Result<ActionBoundaryReport> {
    let null = null_from_gauge(phi)?;
    let action = action(&null, traj, binding)?;
    let c = CompiledExpr::new(phi.body(), &STATE, binding)?;
    let at = |s: Sample| {
        c.eval(&[s.t, s.x, s.v])
            .map_err(|source| Error::Integration { t: s.t, source })
    };
    let boundary = at(traj.last())? - at(traj.samples[0])?;
    let delta = (action - boundary).abs();
    let tolerance = f64::max(1e-8, ACTION_TOLERANCE_C * traj.dt.powi(4));
    Ok(ActionBoundaryReport {
        action,
        boundary,
        delta,
        tolerance,
        passed: delta <= tolerance,
    })
}

/// Energy function of `l` at every sample.
pub fn energy_series(l: &Lagrangian, traj: &Trajectory, binding: &Binding) -> Result<Vec<f64>> {
    along(&energy_function(l)?, traj, binding)
}

/// `max |E(t) − E(t0)|` over the samples.
pub fn energy_drift(l: &Lagrangian, traj: &Trajectory, binding: &Binding) -> Result<f64> {
    let e = energy_series(l, traj, binding)?;
    let e0 = e[0];
    Ok(e.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBalanceReport {
    /// Largest `|dE/dt + ∂L/∂t|` over interior samples.
    pub max_mismatch: f64,
    /// Time at which it occurs.
    pub worst_t: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Check `dE/dt = −∂L/∂t` along `traj` with centered differences of `E`.
pub fn energy_balance_check(
    l: &Lagrangian,
    traj: &Trajectory,
    binding: &Binding,
) -> Result<EnergyBalanceReport> {
    let energy = energy_series(l, traj, binding)?;
    let explicit = along(&simplify(&diff(l.body(), Symbol::T)?)?, traj, binding)?;
    let s = &traj.samples;
    let mut max_mismatch = 0.0;
    let mut worst_t = traj.t0;
    for k in 1..s.len().saturating_sub(1) {
        let rate = (energy[k + 1] - energy[k - 1]) / (s[k + 1].t - s[k - 1].t);
        let mismatch = (rate + explicit[k]).abs();
        if mismatch > max_mismatch {
            max_mismatch = mismatch;
            worst_t = s[k].t;
        }
    }
    let tolerance = f64::max(1e-6, ENERGY_BALANCE_TOLERANCE_C * traj.dt.powi(2));
    Ok(EnergyBalanceReport {
        max_mismatch,
        worst_t,
        tolerance,
        passed: max_mismatch <= tolerance,
    })
}

/// CSV with header `t,x,v` (and `,E` when `energy` is given), 17
/// significant digits per value.
pub fn write_csv(
    traj: &Trajectory,
    energy: Option<&[f64]>,
    out: &mut dyn io::Write,
) -> io::Result<()> {
    let mut w = io::BufWriter::new(out);
    match energy {
        Some(_) => writeln!(w, "t,x,v,E")?,
        None => writeln!(w, "t,x,v")?,
    }
    for (k, s) in traj.samples.iter().enumerate() {
        write!(w, "{:.16e},{:.16e},{:.16e}", s.t, s.x, s.v)?;
        if let Some(e) = energy {
            write!(w, ",{:.16e}", e[k])?;
        }
        writeln!(w)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::mechanics::{drive_with_gauge, Sign};

    fn e(s: &str) -> Expr {
        simplify(&parse(s).unwrap()).unwrap()
    }

    fn params(pairs: &[(&str, f64)]) -> Binding {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn sho_equation() {
        let ode = equation_of_motion(&Lagrangian::harmonic_oscillator(), &Binding::new()).unwrap();
        assert_eq!(ode.rhs(), &e("-x"));
    }

    #[test]
    fn driven_equation() {
        let phi = GaugeFunction::new(&e("x*F0*sin(t)")).unwrap();
        let l = drive_with_gauge(&Lagrangian::harmonic_oscillator(), &phi, Sign::Plus).unwrap();
        let ode = equation_of_motion(&l, &params(&[("F0", 1.0)])).unwrap();
        assert_eq!(ode.rhs(), &e("-x + F0*cos(t)"));
    }

    #[test]
    fn null_alone_is_degenerate() {
        let phi = GaugeFunction::new(&e("c1*x*t")).unwrap();
        let l = null_from_gauge(&phi).unwrap();
        assert!(matches!(
            equation_of_motion(&l, &Binding::new()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn position_dependent_mass() {
        let l = Lagrangian::standard(&e("1/12*xdot^4 - 1/2*x^2")).unwrap();
        let ode = equation_of_motion(&l, &Binding::new()).unwrap();
        assert_eq!(ode.rhs(), &e("-x*xdot^-2"));
    }

    #[test]
    fn unbound_parameter() {
        let l = Lagrangian::standard(&e("1/2*xdot^2 - 1/2*k*x^2")).unwrap();
        assert!(matches!(
            equation_of_motion(&l, &Binding::new()),
            Err(Error::Expr(ExprError::Unbound(_)))
        ));
    }

    #[test]
    fn grid_lands_on_end() {
        let (times, h) = time_grid(0.0, 1.0, 0.1).unwrap();
        assert_eq!(times.len(), 11);
        assert_eq!(*times.last().unwrap(), 1.0);
        assert!((h - 0.1).abs() < 1e-15);
        let (times, h) = time_grid(0.0, 1.0, 0.3).unwrap();
        assert_eq!(times, vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        assert_eq!(h, 0.3);
        assert!(time_grid(0.0, 1.0, 0.0).is_err());
        assert!(time_grid(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn sho_half_period() {
        let ode = equation_of_motion(&Lagrangian::harmonic_oscillator(), &Binding::new()).unwrap();
        let traj = integrate_rk4(&ode, 1.0, 0.0, 0.0, std::f64::consts::PI, 1e-3).unwrap();
        assert!((traj.last().x + 1.0).abs() < 1e-8);
        assert_eq!(traj.method, "rk4");
    }

    #[test]
    fn domain_error_reports_time() {
        let l = Lagrangian::standard(&e("1/2*xdot^2 - x*ln(1 - t)")).unwrap();
        let ode = equation_of_motion(&l, &Binding::new()).unwrap();
        match integrate_rk4(&ode, 0.0, 0.0, 0.0, 2.0, 0.1) {
            Err(Error::Integration { t, .. }) => assert!(t > 0.85 && t < 1.0, "{t}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn registry_lookup() {
        let r = IntegratorRegistry::default();
        assert_eq!(r.names(), vec!["rk4"]);
        assert!(matches!(r.get("euler"), Err(Error::UnknownIntegrator(_))));
    }

    #[test]
    fn zero_lagrangian_has_zero_action() {
        let traj = Trajectory::from_fn(0.0, 1.0, 0.01, "exact", |t| (t.sin(), t.cos())).unwrap();
        let l = Lagrangian::standard(&Expr::zero()).unwrap();
        assert_eq!(action(&l, &traj, &Binding::new()).unwrap(), 0.0);
    }

    #[test]
    fn odd_intervals_rejected() {
        let traj = Trajectory::from_fn(0.0, 1.0, 1.0 / 3.0, "exact", |t| (t, 1.0)).unwrap();
        let l = Lagrangian::harmonic_oscillator();
        assert!(matches!(
            action(&l, &traj, &Binding::new()),
            Err(Error::Quadrature(_))
        ));
    }

    #[test]
    fn constant_gauge_boundary_is_exact() {
        let traj = Trajectory::from_fn(0.0, 1.0, 0.01, "exact", |t| (t.sin(), t.cos())).unwrap();
        let phi = GaugeFunction::new(&e("7")).unwrap();
        let r = verify_action_boundary(&phi, &traj, &Binding::new()).unwrap();
        assert_eq!(r.delta, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn period_of_cosine() {
        let traj = Trajectory::from_fn(0.0, 40.0, 1e-3, "exact", |t| (t.cos(), -t.sin())).unwrap();
        let p = estimate_period(&traj).unwrap();
        assert!((p - std::f64::consts::TAU).abs() < 1e-6, "{p}");
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory::from_fn(0.0, 1.0, 0.5, "exact", |t| (t, 1.0)).unwrap();
        let mut buf = Vec::new();
        write_csv(&traj, Some(&[0.5, 0.5, 0.5]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,x,v,E");
        assert_eq!(
            lines[2],
            "5.0000000000000000e-1,5.0000000000000000e-1,1.0000000000000000e0,5.0000000000000000e-1"
        );
        assert_eq!(lines.len(), 4);
    }
}
