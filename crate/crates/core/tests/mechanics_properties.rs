use gaugeforge::dynamics::equation_of_motion;
use gaugeforge::expr::{
    compare_numeric, eval, parse, simplify, Binding, Domain, Expr, NumericOptions, Symbol,
};
use gaugeforge::mechanics::{
    default_domain, drive_with_gauge, energy_from_gauge, energy_function, euler_lagrange,
    force_from_gauge, is_null, null_from_gauge, random_specs, total_with_null, FamilyRegistry,
    GaugeFunction, Lagrangian, Sign,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(text: &str) -> Expr {
    simplify(&parse(text).unwrap()).unwrap()
}

fn specs() -> Vec<Box<dyn gaugeforge::mechanics::GaugeFamily>> {
    random_specs(&FamilyRegistry::default(), 200, 42)
}

fn random_point(rng: &mut ChaCha8Rng, names: impl IntoIterator<Item = String>) -> Binding {
    names
        .into_iter()
        .map(|n| {
            let v = rng.random_range(-3.0..3.0);
            (n, v)
        })
        .collect()
}

#[test]
fn random_gauges_give_null_lagrangians() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in specs() {
        let phi = spec.gauge().unwrap();
        let null = null_from_gauge(&phi).unwrap();
        let el = euler_lagrange(&null).unwrap();
        let mut names: Vec<String> = Symbol::ALL.iter().map(|s| s.name().to_string()).collect();
        names.extend(el.parameters());
        for _ in 0..100 {
            let p = random_point(&mut rng, names.clone());
            let residual = eval(&el, &p).unwrap();
            let scale = eval(null.body(), &p).unwrap().abs();
            assert!(
                residual.abs() <= 1e-9 * (1.0 + scale),
                "{}: EL = {el} gives {residual}",
                spec.describe()
            );
        }
        assert!(is_null(&null).unwrap(), "{}", spec.describe());
    }
}

#[test]
fn closed_forms_match_generic_pipeline() {
    let opts = NumericOptions {
        tol: 1e-10,
        ..NumericOptions::default()
    };
    for spec in specs() {
        let built = spec.build().unwrap();
        let domain = default_domain([built.gauge.body(), built.null_lagrangian.body()]);
        let generic = null_from_gauge(&built.gauge).unwrap();
        let c =
            compare_numeric(built.null_lagrangian.body(), generic.body(), &domain, opts).unwrap();
        assert!(c.equal, "{}: {:?}", spec.describe(), c);
        let force = force_from_gauge(&built.gauge, Sign::Plus).unwrap();
        let c = compare_numeric(&built.force, &force, &domain, opts).unwrap();
        assert!(c.equal, "{}: {:?}", spec.describe(), c);
    }
}

#[test]
fn null_addition_leaves_equation_of_motion_unchanged() {
    let sho = Lagrangian::harmonic_oscillator();
    let base = equation_of_motion(&sho, &Binding::new()).unwrap();
    let mut domain = Domain::new();
    for s in ["x", "t", "xdot"] {
        domain.insert(s.to_string(), (-3.0, 3.0));
    }
    let opts = NumericOptions {
        tol: 1e-12,
        ..NumericOptions::default()
    };
    for spec in specs() {
        let total = total_with_null(&sho, &spec.gauge().unwrap()).unwrap();
        let ode = equation_of_motion(&total, &Binding::new()).unwrap();
        let c = compare_numeric(ode.rhs(), base.rhs(), &domain, opts).unwrap();
        assert!(
            c.equal,
            "{}: {} vs {}",
            spec.describe(),
            ode.rhs(),
            base.rhs()
        );
    }
}

#[test]
fn driving_adds_the_mixed_partial() {
    let sho = Lagrangian::harmonic_oscillator();
    let opts = NumericOptions::default();
    for spec in specs().into_iter().take(60) {
        let phi = spec.gauge().unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let driven = drive_with_gauge(&sho, &phi, sign).unwrap();
            let ode = equation_of_motion(&driven, &Binding::new()).unwrap();
            let expected = -Expr::x() + force_from_gauge(&phi, sign).unwrap();
            let domain = default_domain([ode.rhs(), &expected]);
            assert!(
                compare_numeric(ode.rhs(), &expected, &domain, opts)
                    .unwrap()
                    .equal
            );
        }
    }
}

#[test]
fn energy_of_the_null_lagrangian_is_minus_the_time_partial() {
    let opts = NumericOptions::default();
    for spec in specs() {
        let phi = spec.gauge().unwrap();
        let from_l = energy_function(&null_from_gauge(&phi).unwrap()).unwrap();
        let direct = energy_from_gauge(&phi).unwrap();
        let domain = default_domain([&from_l, &direct]);
        assert!(
            compare_numeric(&from_l, &direct, &domain, opts)
                .unwrap()
                .equal,
            "{}",
            spec.describe()
        );
    }
}

#[test]
fn degenerate_gauges() {
    // Time-only gauge: no force, no velocity in L_n, and L_n = −E_n.
    for text in ["sin(t)", "t^3 - 2*t", "exp(t/4)*c"] {
        let phi = GaugeFunction::new(&e(text)).unwrap();
        assert!(
            force_from_gauge(&phi, Sign::Plus).unwrap().is_zero(),
            "{text}"
        );
        let null = null_from_gauge(&phi).unwrap();
        assert!(!null.body().depends_on(Symbol::Xdot), "{text}");
        let minus_energy = simplify(&-energy_from_gauge(&phi).unwrap()).unwrap();
        assert_eq!(null.body(), &minus_energy, "{text}");
    }
    // Space-only gauge: no energy term, no force.
    for text in ["x^3", "sin(x)*c"] {
        let phi = GaugeFunction::new(&e(text)).unwrap();
        assert!(energy_from_gauge(&phi).unwrap().is_zero(), "{text}");
        assert!(
            force_from_gauge(&phi, Sign::Plus).unwrap().is_zero(),
            "{text}"
        );
    }
}

#[test]
fn sign_flips_the_force() {
    for spec in specs().into_iter().take(50) {
        let phi = spec.gauge().unwrap();
        let plus = force_from_gauge(&phi, Sign::Plus).unwrap();
        let minus = force_from_gauge(&phi, Sign::Minus).unwrap();
        assert_eq!(
            simplify(&(plus + minus)).unwrap(),
            Expr::zero(),
            "{}",
            spec.describe()
        );
    }
}

#[test]
fn forcing_examples_reproduce_the_equations() {
    let sho = Lagrangian::harmonic_oscillator();
    let cases = [
        ("x*F0*sin(t)", "-x + F0*cos(t)"),
        ("-1/4*eps*x^4*t", "-x - eps*x^3"),
        ("c1*x*t", "-x + c1"),
    ];
    for (gauge, rhs) in cases {
        let phi = GaugeFunction::new(&e(gauge)).unwrap();
        let l = drive_with_gauge(&sho, &phi, Sign::Plus).unwrap();
        let params: Binding = l
            .body()
            .parameters()
            .into_iter()
            .map(|p| (p, 1.0))
            .collect();
        let ode = equation_of_motion(&l, &params).unwrap();
        assert_eq!(ode.rhs(), &e(rhs), "{gauge}");
    }
}
