use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;

use gaugeforge::catalog::{self, CatalogEntry, EntryKind};
use gaugeforge::dynamics::{
    energy_balance_check, energy_drift, energy_series, equation_of_motion, integrate,
    verify_action_boundary, write_csv, IntegratorRegistry, Trajectory,
};
use gaugeforge::expr::{compare_numeric, parse, Binding, Expr, ExprError, NumericOptions};
use gaugeforge::mechanics::{
    default_domain, drive_with_gauge, energy_from_gauge, euler_lagrange, force_from_gauge, is_null,
    null_from_gauge, FamilyRegistry, GaugeFunction, Lagrangian, Sign,
};

use crate::config::Settings;
use crate::{exit, CliError, Command, RunArgs, WindowArgs};

pub(crate) fn dispatch(
    command: Command,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    match command {
        Command::Derive { gauge, common } => {
            let s = Settings::resolve(&common)?;
            let text = required(s.text(&gauge, "gauge"), "--gauge")?;
            derive(&text, s.sign, out)
        }
        Command::Verify { lagrangian, common } => {
            let s = Settings::resolve(&common)?;
            let text = required(s.text(&lagrangian, "lagrangian"), "--lagrangian")?;
            verify(&text, out)
        }
        Command::Catalog {
            verify,
            export,
            common,
        } => {
            let s = Settings::resolve(&common)?;
            if verify {
                catalog_verify(s.seed, out)
            } else if export {
                write!(out, "{}", catalog::export_all()).map_err(io_error)?;
                Ok(exit::OK)
            } else {
                catalog_list(out)
            }
        }
        Command::Family {
            tag,
            terms,
            list,
            common,
        } => {
            Settings::resolve(&common)?;
            let registry = FamilyRegistry::default();
            if list {
                for kind in registry.kinds() {
                    writeln!(out, "{}  {}", kind.tag(), kind.summary()).map_err(io_error)?;
                }
                return Ok(exit::OK);
            }
            family(
                &registry,
                &tag.unwrap_or_default(),
                &terms.unwrap_or_default(),
                out,
            )
        }
        Command::Simulate {
            run,
            out: path,
            common,
        } => {
            let s = Settings::resolve(&common)?;
            simulate(
                &s,
                &run,
                path.or_else(|| s.file.text("out").map(Into::into)),
                out,
                err,
            )
        }
        Command::ActionCheck {
            gauge,
            system,
            lagrangian,
            window,
            common,
        } => {
            let s = Settings::resolve(&common)?;
            action_check(&s, gauge, system, lagrangian, &window, out)
        }
        Command::Roundtrip { common } => {
            let s = Settings::resolve(&common)?;
            let (report, ok) = roundtrip_report(s.seed)?;
            write!(out, "{report}").map_err(io_error)?;
            Ok(if ok { exit::OK } else { exit::VERIFICATION })
        }
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Usage(format!("write failed: {e}"))
}

fn required(value: Option<String>, flag: &str) -> Result<String, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing {flag}")))
}

/// Parse a flag's expression, echoing it with a caret on failure.
fn expression(flag: &'static str, text: &str) -> Result<Expr, CliError> {
    parse(text).map_err(|source| {
        let offset = match &source {
            ExprError::Syntax { offset, .. } | ExprError::UnknownFunction { offset, .. } => *offset,
            _ => 0,
        };
        let column = text.get(..offset).map_or(offset, |p| p.chars().count());
        CliError::Input {
            flag,
            input: text.to_string(),
            caret: format!("{}^", " ".repeat(column)),
            source,
        }
    })
}

fn gauge_arg(flag: &'static str, text: &str) -> Result<GaugeFunction, CliError> {
    GaugeFunction::new(&expression(flag, text)?)
        .map_err(|e| CliError::Usage(format!("{flag} `{text}`: {e}")))
}

fn standard_arg(text: Option<&str>) -> Result<Lagrangian, CliError> {
    match text {
        None => Ok(Lagrangian::harmonic_oscillator()),
        Some(t) => Lagrangian::standard(&expression("--ls", t)?)
            .map_err(|e| CliError::Usage(format!("--ls `{t}`: {e}"))),
    }
}

fn derive(text: &str, sign: Sign, out: &mut dyn Write) -> Result<i32, CliError> {
    let phi = gauge_arg("--gauge", text)?;
    let null = null_from_gauge(&phi)?;
    let energy = energy_from_gauge(&phi)?;
    let force = force_from_gauge(&phi, sign)?;
    writeln!(out, "phi = {phi}").map_err(io_error)?;
    writeln!(out, "L_n = {null}").map_err(io_error)?;
    writeln!(out, "E_n = {energy}").map_err(io_error)?;
    writeln!(out, "F = {force}  (sign {sign})").map_err(io_error)?;
    Ok(exit::OK)
}

fn verify(text: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = Lagrangian::standard(&expression("--lagrangian", text)?)
        .map_err(|e| CliError::Usage(format!("--lagrangian `{text}`: {e}")))?;
    let el = euler_lagrange(&l)?;
    let null = is_null(&l)?;
    writeln!(out, "L = {l}").map_err(io_error)?;
    writeln!(out, "EL = {el}").map_err(io_error)?;
    writeln!(out, "null: {}", if null { "yes" } else { "no" }).map_err(io_error)?;
    Ok(if null { exit::OK } else { exit::VERIFICATION })
}

fn catalog_list(out: &mut dyn Write) -> Result<i32, CliError> {
    for e in catalog::list_entries() {
        writeln!(
            out,
            "{:<16} {:<13} phi = {}  ->  {}",
            e.id, e.kind, e.gauge, e.declared
        )
        .map_err(io_error)?;
    }
    Ok(exit::OK)
}

fn catalog_verify(seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut failures = 0;
    let entries = catalog::list_entries();
    for e in &entries {
        let r = catalog::verify_entry_with_seed(e, seed)?;
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        if !r.passed() {
            failures += 1;
        }
        writeln!(
            out,
            "{verdict} {:<16} F = {}  (max scaled error {:.3e})",
            e.id, r.force, r.comparison.max_scaled_error
        )
        .map_err(io_error)?;
        if let Some(d) = &r.comparison.diagnostic {
            writeln!(out, "     {d}").map_err(io_error)?;
        }
    }
    writeln!(
        out,
        "{} of {} entries pass",
        entries.len() - failures,
        entries.len()
    )
    .map_err(io_error)?;
    Ok(if failures == 0 {
        exit::OK
    } else {
        exit::VERIFICATION
    })
}

/// Catalog rows as reported: every entry, with the higher-order row taken
/// at n = 1, 2, 3.
fn roundtrip_rows() -> Result<Vec<(String, CatalogEntry)>, CliError> {
    let mut rows = Vec::new();
    for e in catalog::list_entries() {
        if e.params.contains_key("n") {
            for n in 1..=3 {
                rows.push((format!("{}[n={n}]", e.id), e.instantiate("n", n)?));
            }
        } else {
            rows.push((e.id.to_string(), e));
        }
    }
    Ok(rows)
}

/// The round-trip report and whether every row passed. Contains no
/// floating-point error figures, so it is stable across platforms.
pub fn roundtrip_report(seed: u64) -> Result<(String, bool), CliError> {
    let mut s = String::new();
    let rows = roundtrip_rows()?;
    let mut passed = 0;
    for (heading, kind) in [
        ("Driving forces", EntryKind::Force),
        ("Nonlinearities", EntryKind::Nonlinearity),
    ] {
        let _ = writeln!(s, "{heading} (sign +1)");
        for (label, e) in rows.iter().filter(|(_, e)| e.kind == kind) {
            let r = catalog::verify_entry_with_seed(e, seed)?;
            if r.passed() {
                passed += 1;
            }
            let _ = writeln!(s, "{} {label}", if r.passed() { "PASS" } else { "FAIL" });
            let _ = writeln!(s, "    phi      = {}", e.gauge);
            let _ = writeln!(s, "    force    = {}", r.force);
            let _ = writeln!(s, "    declared = {}", e.declared);
            if let Some(alt) = &e.alternate {
                let _ = writeln!(s, "             = {alt}");
            }
            match &r.identification {
                Some(id) => {
                    let _ = writeln!(s, "    family   = {}", id.describe());
                }
                None => {
                    let _ = writeln!(s, "    family   = none");
                }
            }
            let _ = writeln!(s, "    params   = {}", catalog::format_params(&e.params));
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "{passed} of {} rows pass", rows.len());
    Ok((s, passed == rows.len()))
}

fn family(
    registry: &FamilyRegistry,
    tag: &str,
    terms: &str,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let family = registry.get(tag)?.parse_terms(terms)?;
    let built = family.build()?;
    let generic_null = null_from_gauge(&built.gauge)?;
    let generic_force = force_from_gauge(&built.gauge, Sign::Plus)?;
    let domain = default_domain([built.gauge.body(), built.null_lagrangian.body()]);
    let opts = NumericOptions::default();
    let null_ok = compare_numeric(
        built.null_lagrangian.body(),
        generic_null.body(),
        &domain,
        opts,
    )
    .map_err(gaugeforge::Error::from)?
    .equal;
    let force_ok = compare_numeric(&built.force, &generic_force, &domain, opts)
        .map_err(gaugeforge::Error::from)?
        .equal;
    let nullity = is_null(&built.null_lagrangian)?;
    writeln!(out, "{}", family.describe()).map_err(io_error)?;
    writeln!(out, "phi = {}", built.gauge).map_err(io_error)?;
    writeln!(out, "L_n = {}", built.null_lagrangian).map_err(io_error)?;
    writeln!(out, "F = {}", built.force).map_err(io_error)?;
    let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
    writeln!(out, "{} closed-form L_n matches dphi/dt", mark(null_ok)).map_err(io_error)?;
    writeln!(
        out,
        "{} closed-form F matches the mixed partial",
        mark(force_ok)
    )
    .map_err(io_error)?;
    writeln!(out, "{} L_n is null", mark(nullity)).map_err(io_error)?;
    Ok(if null_ok && force_ok && nullity {
        exit::OK
    } else {
        exit::VERIFICATION
    })
}

struct Window {
    x0: f64,
    v0: f64,
    t0: f64,
    t1: f64,
    dt: f64,
}

impl Window {
    fn resolve(s: &Settings, w: &WindowArgs) -> Result<Window, CliError> {
        Ok(Window {
            x0: s.number(w.x0, "x0", 1.0)?,
            v0: s.number(w.v0, "v0", 0.0)?,
            t0: s.number(w.t0, "t0", 0.0)?,
            t1: s.number(w.t1, "t1", 10.0)?,
            dt: s.number(w.dt, "dt", 1e-3)?,
        })
    }
}

/// The total Lagrangian to integrate and its parameter values.
struct System {
    label: String,
    total: Lagrangian,
    params: Binding,
}

fn system(
    s: &Settings,
    system: Option<String>,
    gauge: Option<String>,
    lagrangian: Option<String>,
) -> Result<System, CliError> {
    let standard = standard_arg(lagrangian.as_deref())?;
    let (label, phi, mut params) = match (system, gauge) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --system or --gauge, not both".into(),
            ));
        }
        (None, None) => return Err(CliError::Usage("missing --system or --gauge".into())),
        (Some(id), None) => {
            let e = catalog::lookup(&id)?;
            (id, e.gauge, e.params)
        }
        (None, Some(g)) => {
            let phi = gauge_arg("--gauge", &g)?;
            (format!("gauge {phi}"), phi, Binding::new())
        }
    };
    params.extend(s.params.clone());
    let total = drive_with_gauge(&standard, &phi, s.sign)?;
    Ok(System {
        label,
        total,
        params,
    })
}

fn simulate(
    s: &Settings,
    run: &RunArgs,
    path: Option<std::path::PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let sys = system(
        s,
        s.text(&run.system, "system"),
        s.text(&run.gauge, "gauge"),
        s.text(&run.lagrangian, "lagrangian"),
    )?;
    let w = Window::resolve(s, &run.window)?;
    let registry = IntegratorRegistry::default();
    let method = registry.get(&run.method)?;
    let ode = equation_of_motion(&sys.total, &sys.params)?;
    let traj = integrate(method, &ode, w.x0, w.v0, w.t0, w.t1, w.dt)?;
    let energy = energy_series(&sys.total, &traj, &sys.params)?;
    let drift = energy_drift(&sys.total, &traj, &sys.params)?;
    let balance = energy_balance_check(&sys.total, &traj, &sys.params)?;

    let summary: &mut dyn Write = match &path {
        Some(p) => {
            let mut file = File::create(p)
                .map_err(|e| CliError::Usage(format!("cannot create `{}`: {e}", p.display())))?;
            write_csv(&traj, Some(&energy), &mut file)
                .map_err(|e| CliError::Usage(format!("cannot write `{}`: {e}", p.display())))?;
            out
        }
        None => {
            write_csv(&traj, Some(&energy), out).map_err(io_error)?;
            err
        }
    };
    let last = traj.last();
    let mut text = String::new();
    let _ = writeln!(text, "system: {}", sys.label);
    let _ = writeln!(text, "L = {}", sys.total);
    let _ = writeln!(text, "xddot = {}", ode.rhs());
    let _ = writeln!(text, "params: {}", catalog::format_params(&sys.params));
    let _ = writeln!(
        text,
        "{} steps of dt = {} with {} over [{}, {}]",
        traj.intervals(),
        traj.dt,
        traj.method,
        traj.t0,
        traj.t1
    );
    let _ = writeln!(text, "x(t1) = {:.12e}, v(t1) = {:.12e}", last.x, last.v);
    let _ = writeln!(text, "energy drift: {drift:.3e}");
    let _ = writeln!(
        text,
        "energy balance: max |dE/dt + ∂L/∂t| = {:.3e} at t = {} (tolerance {:.1e}) {}",
        balance.max_mismatch,
        balance.worst_t,
        balance.tolerance,
        if balance.passed { "PASS" } else { "FAIL" }
    );
    summary.write_all(text.as_bytes()).map_err(io_error)?;
    Ok(exit::OK)
}

fn action_check(
    s: &Settings,
    gauge: Option<String>,
    system_id: Option<String>,
    lagrangian: Option<String>,
    window: &WindowArgs,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let id = s
        .text(&system_id, "system")
        .unwrap_or_else(|| "duffing".into());
    let sys = system(s, Some(id), None, s.text(&lagrangian, "lagrangian"))?;
    let w = Window::resolve(s, window)?;
    let ode = equation_of_motion(&sys.total, &sys.params)?;
    let traj: Trajectory = integrate(
        &gaugeforge::dynamics::Rk4,
        &ode,
        w.x0,
        w.v0,
        w.t0,
        w.t1,
        w.dt,
    )?;

    let checks: Vec<(String, GaugeFunction, Binding)> = match s.text(&gauge, "gauge") {
        Some(g) => vec![(g.clone(), gauge_arg("--gauge", &g)?, s.params.clone())],
        None => catalog::list_entries()
            .into_iter()
            .map(|e| {
                let mut b = e.params.clone();
                b.extend(s.params.clone());
                (e.id.to_string(), e.gauge, b)
            })
            .collect(),
    };
    writeln!(
        out,
        "trajectory: {} from x0 = {}, v0 = {} over [{}, {}], dt = {}",
        sys.label, w.x0, w.v0, traj.t0, traj.t1, traj.dt
    )
    .map_err(io_error)?;
    let mut failures = 0;
    for (label, phi, binding) in checks {
        let r = verify_action_boundary(&phi, &traj, &binding)?;
        if !r.passed {
            failures += 1;
        }
        writeln!(
            out,
            "{} {label}: action = {:.12e}, boundary = {:.12e}, delta = {:.3e} (tolerance {:.1e})",
            if r.passed { "PASS" } else { "FAIL" },
            r.action,
            r.boundary,
            r.delta,
            r.tolerance
        )
        .map_err(io_error)?;
    }
    Ok(if failures == 0 {
        exit::OK
    } else {
        exit::VERIFICATION
    })
}
