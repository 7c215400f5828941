//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is printed even when everything passes.

use std::f64::consts::{PI, TAU};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gaugeforge::catalog::{self, verify_entry, EntryKind};
use gaugeforge::dynamics::{
    energy_balance_check, energy_drift, equation_of_motion, estimate_period, integrate_rk4,
    verify_action_boundary,
};
use gaugeforge::expr::{compare_numeric, eval, Binding, Domain, NumericOptions, Symbol};
use gaugeforge::mechanics::{
    default_domain, drive_with_gauge, euler_lagrange, force_from_gauge, null_from_gauge,
    random_specs, total_with_null, FamilyRegistry, GaugeFamily, Lagrangian, Sign,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Check = fn() -> Result<Outcome, String>;

fn specs() -> Vec<Box<dyn GaugeFamily>> {
    random_specs(&FamilyRegistry::default(), 200, SEED)
}

fn catalog_round_trip(kind: EntryKind) -> Result<Outcome, String> {
    let mut rows = Vec::new();
    for entry in catalog::list_entries()
        .into_iter()
        .filter(|e| e.kind == kind)
    {
        if entry.params.contains_key("n") {
            for n in 1..=3 {
                rows.push((
                    format!("{}[n={n}]", entry.id),
                    entry.instantiate("n", n).map_err(|e| e.to_string())?,
                ));
            }
        } else {
            rows.push((entry.id.to_string(), entry));
        }
    }
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for (label, entry) in &rows {
        let r = verify_entry(entry).map_err(|e| format!("{label}: {e}"))?;
        worst = worst.max(r.comparison.max_scaled_error);
        if !(r.comparison.equal && r.comparison.samples_checked == 200 && r.passed()) {
            failed.push(label.clone());
        }
    }
    Ok(outcome(
        failed.is_empty(),
        format!(
            "{} rows, worst scaled error {worst:.1e}, failing: {failed:?}",
            rows.len()
        ),
    ))
}

fn criterion_1() -> Result<Outcome, String> {
    catalog_round_trip(EntryKind::Force)
}

fn criterion_2() -> Result<Outcome, String> {
    catalog_round_trip(EntryKind::Nonlinearity)
}

fn criterion_3() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for spec in specs() {
        let phi = spec.gauge().map_err(|e| e.to_string())?;
        let null = null_from_gauge(&phi).map_err(|e| e.to_string())?;
        let el = euler_lagrange(&null).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let p: Binding = Symbol::ALL
                .iter()
                .map(|s| (s.name().to_string(), rng.random_range(-3.0..3.0)))
                .collect();
            let residual = eval(&el, &p).map_err(|e| e.to_string())?.abs();
            let scale = eval(null.body(), &p).map_err(|e| e.to_string())?.abs();
            let scaled = residual / (1.0 + scale);
            worst = worst.max(scaled);
            if scaled > 1e-9 {
                failures += 1;
            }
        }
    }
    Ok(outcome(
        failures == 0,
        format!("200 gauges x 100 points, worst |EL|/(1+|L_n|) = {worst:.1e}"),
    ))
}

fn criterion_4() -> Result<Outcome, String> {
    let opts = NumericOptions {
        tol: 1e-10,
        seed: SEED,
        ..NumericOptions::default()
    };
    let mut failed = Vec::new();
    for spec in specs() {
        let built = spec.build().map_err(|e| e.to_string())?;
        let domain = default_domain([built.gauge.body(), built.null_lagrangian.body()]);
        let generic_null = null_from_gauge(&built.gauge).map_err(|e| e.to_string())?;
        let generic_force =
            force_from_gauge(&built.gauge, Sign::Plus).map_err(|e| e.to_string())?;
        let l = compare_numeric(
            built.null_lagrangian.body(),
            generic_null.body(),
            &domain,
            opts,
        )
        .map_err(|e| e.to_string())?;
        let f = compare_numeric(&built.force, &generic_force, &domain, opts)
            .map_err(|e| e.to_string())?;
        if !(l.equal && f.equal) {
            failed.push(spec.describe());
        }
    }
    Ok(outcome(
        failed.is_empty(),
        format!("200 specs across g1/g2/g3, failing: {failed:?}"),
    ))
}

fn criterion_5() -> Result<Outcome, String> {
    let duffing = catalog::lookup("duffing").map_err(|e| e.to_string())?;
    let l = drive_with_gauge(
        &Lagrangian::harmonic_oscillator(),
        &duffing.gauge,
        Sign::Plus,
    )
    .map_err(|e| e.to_string())?;
    let ode = equation_of_motion(&l, &duffing.params).map_err(|e| e.to_string())?;
    let traj = integrate_rk4(&ode, 1.0, 0.0, 0.0, 10.0, 1e-3).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for entry in catalog::list_entries() {
        let r = verify_action_boundary(&entry.gauge, &traj, &entry.params)
            .map_err(|e| e.to_string())?;
        worst = worst.max(r.delta);
        if r.delta > 1e-8 {
            failed.push(entry.id);
        }
    }
    Ok(outcome(
        failed.is_empty(),
        format!("worst |action - boundary| = {worst:.1e}, failing: {failed:?}"),
    ))
}

fn criterion_6() -> Result<Outcome, String> {
    let sho = Lagrangian::harmonic_oscillator();
    let base = equation_of_motion(&sho, &Binding::new()).map_err(|e| e.to_string())?;
    let domain: Domain = ["x", "t", "xdot"]
        .iter()
        .map(|s| (s.to_string(), (-3.0, 3.0)))
        .collect();
    let opts = NumericOptions {
        tol: 1e-12,
        seed: SEED,
        ..NumericOptions::default()
    };
    let mut failed = 0;
    let mut worst: f64 = 0.0;
    for spec in specs() {
        let total = total_with_null(&sho, &spec.gauge().map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let ode = equation_of_motion(&total, &Binding::new()).map_err(|e| e.to_string())?;
        let c = compare_numeric(ode.rhs(), base.rhs(), &domain, opts).map_err(|e| e.to_string())?;
        worst = worst.max(c.max_scaled_error);
        if !c.equal {
            failed += 1;
        }
    }
    Ok(outcome(
        failed == 0,
        format!("200 null additions, worst scaled difference {worst:.1e}"),
    ))
}

fn criterion_7() -> Result<Outcome, String> {
    let entry = catalog::lookup("driven-cos").map_err(|e| e.to_string())?;
    let l = drive_with_gauge(&Lagrangian::harmonic_oscillator(), &entry.gauge, Sign::Plus)
        .map_err(|e| e.to_string())?;
    let ode = equation_of_motion(&l, &entry.params).map_err(|e| e.to_string())?;
    let at = |dt: f64| integrate_rk4(&ode, 0.0, 0.0, 0.0, 10.0, dt).map(|t| t.last().x);
    let coarse = at(1e-3).map_err(|e| e.to_string())?;
    let fine = at(5e-4).map_err(|e| e.to_string())?;
    let exact = 5.0 * 10f64.sin();
    let err = (coarse - exact).abs();
    Ok(outcome(
        err <= 1e-6 && (fine - exact).abs() <= 1e-6,
        format!(
            "x(10) = {coarse:.9}, 5 sin 10 = {exact:.9}, error {err:.1e}, dt/2 error {:.1e}",
            (fine - exact).abs()
        ),
    ))
}

fn criterion_8() -> Result<Outcome, String> {
    let eps = 0.01;
    let entry = catalog::lookup("duffing")
        .map_err(|e| e.to_string())?
        .with_param("eps", eps);
    let l = drive_with_gauge(&Lagrangian::harmonic_oscillator(), &entry.gauge, Sign::Plus)
        .map_err(|e| e.to_string())?;
    let ode = equation_of_motion(&l, &entry.params).map_err(|e| e.to_string())?;
    let traj = integrate_rk4(&ode, 1.0, 0.0, 0.0, 100.0, 1e-4).map_err(|e| e.to_string())?;
    let period = estimate_period(&traj).ok_or("no zero crossings")?;
    let predicted = TAU / (1.0 + 3.0 * eps / 8.0);
    let err = (period - predicted).abs();
    Ok(outcome(
        err <= 1e-3,
        format!("period {period:.6}, predicted {predicted:.6}, difference {err:.1e}"),
    ))
}

fn criterion_9() -> Result<Outcome, String> {
    let sho = Lagrangian::harmonic_oscillator();
    let sho_ode = equation_of_motion(&sho, &Binding::new()).map_err(|e| e.to_string())?;
    let traj = integrate_rk4(&sho_ode, 1.0, 0.0, 0.0, 100.0, 1e-3).map_err(|e| e.to_string())?;
    let drift = energy_drift(&sho, &traj, &Binding::new()).map_err(|e| e.to_string())?;
    let mut ok = drift <= 1e-6;
    let mut detail = format!("SHO drift {drift:.1e}");
    for id in ["driven-cos", "duffing"] {
        let entry = catalog::lookup(id).map_err(|e| e.to_string())?;
        let l = drive_with_gauge(&sho, &entry.gauge, Sign::Plus).map_err(|e| e.to_string())?;
        let ode = equation_of_motion(&l, &entry.params).map_err(|e| e.to_string())?;
        let traj = integrate_rk4(&ode, 1.0, 0.0, 0.0, 10.0, 1e-4).map_err(|e| e.to_string())?;
        let r = energy_balance_check(&l, &traj, &entry.params).map_err(|e| e.to_string())?;
        ok &= r.passed && r.tolerance <= 1e-6;
        detail.push_str(&format!(", {id} balance mismatch {:.1e}", r.max_mismatch));
        if id == "duffing" {
            let coarse =
                integrate_rk4(&ode, 1.0, 0.0, 0.0, 100.0, 1e-3).map_err(|e| e.to_string())?;
            let d = energy_drift(&l, &coarse, &entry.params).map_err(|e| e.to_string())?;
            ok &= d <= 1e-6;
            detail.push_str(&format!(", duffing drift {d:.1e}"));
        }
    }
    Ok(outcome(ok, detail))
}

fn criterion_10() -> Result<Outcome, String> {
    let ode = equation_of_motion(&Lagrangian::harmonic_oscillator(), &Binding::new())
        .map_err(|e| e.to_string())?;
    let error = |dt: f64| -> Result<f64, String> {
        let traj = integrate_rk4(&ode, 1.0, 0.0, 0.0, 2.0 * PI, dt).map_err(|e| e.to_string())?;
        Ok(traj
            .samples
            .iter()
            .map(|s| (s.x - s.t.cos()).abs())
            .fold(0.0, f64::max))
    };
    let (e1, e2) = (error(0.05)?, error(0.025)?);
    let ratio = e1 / e2;
    Ok(outcome(
        ratio >= 12.0,
        format!("max error {e1:.2e} -> {e2:.2e}, ratio {ratio:.2}"),
    ))
}

fn criterion_11() -> Result<Outcome, String> {
    let bin = env!("CARGO_BIN_EXE_gaugeforge");
    let verify = Command::new(bin)
        .args(["catalog", "--verify"])
        .env_remove("GAUGEFORGE_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            Command::new(bin)
                .arg("roundtrip")
                .env_remove("GAUGEFORGE_SEED")
                .output()
                .map(|o| o.stdout)
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let golden = std::fs::read(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/golden/roundtrip.txt"
    ))
    .map_err(|e| e.to_string())?;
    let matches = runs.iter().all(|r| *r == golden);
    Ok(outcome(
        verify.status.code() == Some(0) && matches,
        format!(
            "catalog --verify exit {:?}, roundtrip matches golden: {matches}",
            verify.status.code()
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 11] = [
        (
            "Table of forces round trip",
            criterion_1,
            Duration::from_secs(1),
        ),
        (
            "Table of nonlinearities round trip",
            criterion_2,
            Duration::from_secs(1),
        ),
        (
            "nullity of random gauges",
            criterion_3,
            Duration::from_secs(10),
        ),
        ("closed-form family agreement", criterion_4, Duration::MAX),
        (
            "action boundary identity",
            criterion_5,
            Duration::from_secs(5),
        ),
        ("equation of motion invariance", criterion_6, Duration::MAX),
        ("resonance", criterion_7, Duration::from_secs(1)),
        (
            "Duffing frequency shift",
            criterion_8,
            Duration::from_secs(5),
        ),
        ("energy identities", criterion_9, Duration::MAX),
        ("RK4 order", criterion_10, Duration::MAX),
        ("CLI determinism", criterion_11, Duration::MAX),
    ];
    let mut all = true;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget_note = if *budget == Duration::MAX {
            String::new()
        } else {
            format!(", budget {budget:?}")
        };
        println!(
            "criterion {:>2} {}: {name}: {detail} ({elapsed:.2?}{budget_note})",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
        all &= passed;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
