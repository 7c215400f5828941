//! Driving forces and nonlinearities of the one-dimensional oscillator
//! `xddot + x = F`, each paired with a gauge function that generates it.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{
    compare_numeric, parse, simplify, Binding, Comparison, Domain, Expr, NumericOptions, Symbol,
};
use crate::mechanics::{
    force_from_gauge, is_null, null_from_gauge, GaugeFamily, GaugeFunction, PowerSeries, Separable,
    Sign,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Force,
    Nonlinearity,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::Force => "force",
            EntryKind::Nonlinearity => "nonlinearity",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: EntryKind,
    pub system: &'static str,
    /// The gauge as printed, split into its listed parts.
    pub gauge_parts: Vec<Expr>,
    /// Sum of the parts.
    pub gauge: GaugeFunction,
    /// The printed force or nonlinearity.
    pub declared: Expr,
    /// A second printed form of the same function, where one is given.
    pub alternate: Option<Expr>,
    pub params: Binding,
}

impl CatalogEntry {
    /// Copy with one parameter overridden (or added).
    pub fn with_param(&self, name: &str, value: f64) -> CatalogEntry {
        let mut out = self.clone();
        out.params.insert(name.to_string(), value);
        out
    }

    /// Copy with parameter `name` replaced by the exact integer `value` in
    /// every expression and dropped from the bindings.
    pub fn instantiate(&self, name: &str, value: i64) -> Result<CatalogEntry> {
        let k = Expr::int(value);
        let sub = |e: &Expr| simplify(&e.substitute(name, &k));
        let gauge_parts = self
            .gauge_parts
            .iter()
            .map(sub)
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = self.clone();
        out.gauge = GaugeFunction::new(&Expr::Add(gauge_parts.clone()))?;
        out.gauge_parts = gauge_parts;
        out.declared = sub(&self.declared)?;
        out.alternate = self.alternate.as_ref().map(sub).transpose()?;
        out.params.remove(name);
        Ok(out)
    }

    /// One record of the structured export.
    pub fn export(&self) -> String {
        let mut s = String::new();
        let parts: Vec<String> = self.gauge_parts.iter().map(Expr::to_string).collect();
        let _ = writeln!(s, "[{}]", self.id);
        let _ = writeln!(s, "kind = {}", self.kind);
        let _ = writeln!(s, "system = {}", self.system);
        let _ = writeln!(s, "phi = {}", self.gauge);
        let _ = writeln!(s, "phi_parts = {}", parts.join(" | "));
        let _ = writeln!(s, "declared = {}", self.declared);
        if let Some(alt) = &self.alternate {
            let _ = writeln!(s, "alternate = {alt}");
        }
        let _ = writeln!(s, "params = {}", format_params(&self.params));
        s
    }
}

pub fn format_params(params: &Binding) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

const DEFAULT_PARAMS: [(&str, f64); 6] = [
    ("F0", 1.0),
    ("F1", 1.0),
    ("F2", 1.0),
    ("E0", 1.0),
    ("eps", 0.1),
    ("n", 1.0),
];

fn expr(text: &str) -> Expr {
    simplify(&parse(text).expect("catalog expressions parse"))
        .expect("catalog expressions simplify")
}

fn entry(
    id: &'static str,
    kind: EntryKind,
    system: &'static str,
    parts: &[&str],
    declared: &str,
    alternate: Option<&str>,
) -> CatalogEntry {
    let gauge_parts: Vec<Expr> = parts.iter().map(|p| expr(p)).collect();
    let gauge = GaugeFunction::new(&Expr::Add(gauge_parts.clone()))
        .expect("catalog gauges depend on x and t only");
    let declared = expr(declared);
    let alternate = alternate.map(expr);
    let mut names = gauge.body().parameters();
    names.extend(declared.parameters());
    let params = DEFAULT_PARAMS
        .iter()
        .filter(|(k, _)| names.contains(*k))
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    CatalogEntry {
        id,
        kind,
        system,
        gauge_parts,
        gauge,
        declared,
        alternate,
        params,
    }
}

/// Every entry, forces first, in a fixed order.
pub fn list_entries() -> Vec<CatalogEntry> {
    use EntryKind::{Force, Nonlinearity};
    vec![
        entry(
            "driven-cos",
            Force,
            "driven oscillator",
            &["x*F0*sin(t)"],
            "F0*cos(t)",
            None,
        ),
        entry(
            "driven-cos2",
            Force,
            "driven oscillator",
            &["1/2*x*t*F0", "1/4*x*F0*sin(2*t)"],
            "F0*cos(t)^2",
            Some("1/2*F0*(1 + cos(2*t))"),
        ),
        entry(
            "driven-cos3",
            Force,
            "driven oscillator",
            &["3/4*x*F0*sin(t)", "1/12*x*F0*sin(3*t)"],
            "F0*cos(t)^3",
            Some("1/4*F0*(3*cos(t) + cos(3*t))"),
        ),
        entry(
            "driven-two-tone",
            Force,
            "driven oscillator",
            &["x*F1*sin(t)", "-x*F2*cos(t)"],
            "F1*cos(t) + F2*sin(t)",
            None,
        ),
        entry(
            "rlc",
            Force,
            "RLC circuit",
            &["-x*E0*cos(t)"],
            "E0*sin(t)",
            None,
        ),
        entry(
            "quadratic",
            Nonlinearity,
            "quadratic",
            &["-1/3*eps*x^3*t"],
            "-eps*x^2",
            None,
        ),
        entry(
            "duffing",
            Nonlinearity,
            "Duffing",
            &["-1/4*eps*x^4*t"],
            "-eps*x^3",
            None,
        ),
        entry(
            "quad-cubic",
            Nonlinearity,
            "quadratic and cubic",
            &["-eps/3*x^3*t", "-eps/4*x^4*t"],
            "-eps*(x^2 + x^3)",
            None,
        ),
        entry(
            "quartic",
            Nonlinearity,
            "quartic",
            &["-1/5*eps*x^5*t"],
            "-eps*x^4",
            None,
        ),
        entry(
            "quintic",
            Nonlinearity,
            "quintic",
            &["-1/6*eps*x^6*t"],
            "-eps*x^5",
            None,
        ),
        entry(
            "higher-order",
            Nonlinearity,
            "higher-order",
            &["-eps/(2*n+2)*x^(2*n+2)*t"],
            "-eps*x^(2*n+1)",
            None,
        ),
        entry(
            "altered-sho",
            Nonlinearity,
            "altered simple harmonic oscillator",
            &["-eps/2*F0*x^2*t"],
            "-eps*F0*x",
            None,
        ),
    ]
}

pub fn lookup(id: &str) -> Result<CatalogEntry> {
    let entries = list_entries();
    let valid = entries.iter().map(|e| e.id).collect::<Vec<_>>().join(", ");
    entries
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownEntry {
            id: id.to_string(),
            valid,
        })
}

/// The full structured export, one record per entry.
pub fn export_all() -> String {
    list_entries()
        .iter()
        .map(CatalogEntry::export)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Which gauge family reproduces an entry's gauge, and with what terms.
#[derive(Debug)]
pub struct Identification {
    pub family: Box<dyn GaugeFamily>,
    /// The family's gauge equals the entry's numerically.
    pub reproduces: bool,
}

impl Identification {
    pub fn describe(&self) -> String {
        self.family.describe()
    }
}

#[derive(Debug)]
pub struct VerificationReport {
    pub id: &'static str,
    pub force: Expr,
    pub declared: Expr,
    pub comparison: Comparison,
    pub alternate: Option<Comparison>,
    pub null: bool,
    pub identification: Option<Identification>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.comparison.equal
            && self.alternate.as_ref().is_none_or(|c| c.equal)
            && self.null
            && self.identification.as_ref().is_some_and(|i| i.reproduces)
    }
}

/// Settings for checking derived forces against the printed ones.
pub fn verification_options(seed: u64) -> NumericOptions {
    NumericOptions {
        samples: 200,
        tol: 1e-10,
        seed,
    }
}

/// `t ∈ [0, 10]`, `x ∈ [−2, 2]`, parameters pinned to `params`.
pub fn verification_domain(params: &Binding) -> Domain {
    let mut d: Domain = params.iter().map(|(k, v)| (k.clone(), (*v, *v))).collect();
    d.insert("t".into(), (0.0, 10.0));
    d.insert("x".into(), (-2.0, 2.0));
    d
}

/// Split a product into (coefficient, time part, space part) factors.
fn separate(term: &Expr) -> Option<(Vec<Expr>, Vec<Expr>, Vec<Expr>)> {
    let factors: Vec<Expr> = match term {
        Expr::Mul(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let (mut c, mut f, mut g) = (Vec::new(), Vec::new(), Vec::new());
    for factor in factors {
        match (factor.depends_on(Symbol::T), factor.depends_on(Symbol::X)) {
            (false, false) => c.push(factor),
            (true, false) => f.push(factor),
            (false, true) => g.push(factor),
            (true, true) => return None,
        }
    }
    Some((c, f, g))
}

fn product(factors: Vec<Expr>) -> Expr {
    simplify(&Expr::Mul(factors)).unwrap_or_else(|_| Expr::one())
}

/// Exponent `k ≥ 1` if `parts` is exactly `sym^k`.
fn monomial_degree(parts: &[Expr], sym: Symbol) -> Option<i64> {
    match parts {
        [Expr::Sym(s)] if *s == sym => Some(1),
        [Expr::Pow(base, k)] if **base == Expr::Sym(sym) => k
            .as_number()
            .filter(|n| n.is_exact_integer())
            .and_then(|n| n.as_integer())
            .filter(|k| *k >= 1),
        _ => None,
    }
}

/// Identify `parts` (whose sum is a gauge) as a g1 power series when every
/// term is a monomial `C x^m t^n`, otherwise as a g3 separable sum.
pub fn identify(parts: &[Expr]) -> Option<Box<dyn GaugeFamily>> {
    let mut pieces = Vec::new();
    for part in parts {
        match part {
            Expr::Add(terms) => {
                for t in terms {
                    pieces.push(separate(t)?);
                }
            }
            other => pieces.push(separate(other)?),
        }
    }
    let monomials: Option<Vec<_>> = pieces
        .iter()
        .map(|(c, f, g)| {
            let m = monomial_degree(g, Symbol::X)?;
            let n = monomial_degree(f, Symbol::T)?;
            Some(((m, n), product(c.clone())))
        })
        .collect();
    if let Some(terms) = monomials {
        return PowerSeries::new(terms)
            .ok()
            .map(|s| Box::new(s) as Box<dyn GaugeFamily>);
    }
    let terms = pieces
        .into_iter()
        .map(|(c, f, g)| (product(c), product(f), product(g)));
    Separable::new(terms)
        .ok()
        .map(|s| Box::new(s) as Box<dyn GaugeFamily>)
}

pub fn verify_entry(entry: &CatalogEntry) -> Result<VerificationReport> {
    verify_entry_with_seed(entry, NumericOptions::default().seed)
}

pub fn verify_entry_with_seed(entry: &CatalogEntry, seed: u64) -> Result<VerificationReport> {
    let opts = verification_options(seed);
    let domain = verification_domain(&entry.params);
    let force = force_from_gauge(&entry.gauge, Sign::Plus)?;
    let comparison = compare_numeric(&force, &entry.declared, &domain, opts)?;
    let alternate = entry
        .alternate
        .as_ref()
        .map(|alt| compare_numeric(&force, alt, &domain, opts))
        .transpose()?;
    let null = is_null(&null_from_gauge(&entry.gauge)?)?;
    let identification = match identify(&entry.gauge_parts) {
        Some(family) => {
            let reproduces =
                compare_numeric(family.gauge()?.body(), entry.gauge.body(), &domain, opts)?.equal;
            Some(Identification { family, reproduces })
        }
        None => None,
    };
    Ok(VerificationReport {
        id: entry.id,
        force,
        declared: entry.declared.clone(),
        comparison,
        alternate,
        null,
        identification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_is_stable() {
        let ids: Vec<_> = list_entries().iter().map(|e| e.id).collect();
        assert_eq!(
            ids,
            vec![
                "driven-cos",
                "driven-cos2",
                "driven-cos3",
                "driven-two-tone",
                "rlc",
                "quadratic",
                "duffing",
                "quad-cubic",
                "quartic",
                "quintic",
                "higher-order",
                "altered-sho",
            ]
        );
    }

    #[test]
    fn lookups() {
        assert_eq!(lookup("duffing").unwrap().declared, expr("-eps*x^3"));
        assert_eq!(lookup("driven-cos2").unwrap().gauge_parts.len(), 2);
        match lookup("nosuch") {
            Err(Error::UnknownEntry { valid, .. }) => assert!(valid.contains("duffing")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn default_parameters() {
        let e = lookup("higher-order").unwrap();
        assert_eq!(format_params(&e.params), "eps=0.1, n=1");
        let e = lookup("driven-two-tone").unwrap();
        assert_eq!(format_params(&e.params), "F1=1, F2=1");
    }

    #[test]
    fn hand_differentiated_entries() {
        // ∂²/∂t∂x of each printed gauge, worked by hand.
        let cases = [
            ("driven-cos", "F0*cos(t)"),
            ("driven-cos2", "1/2*F0 + 1/2*F0*cos(2*t)"),
            ("driven-cos3", "3/4*F0*cos(t) + 1/4*F0*cos(3*t)"),
            ("driven-two-tone", "F1*cos(t) + F2*sin(t)"),
            ("rlc", "E0*sin(t)"),
            ("quadratic", "-eps*x^2"),
            ("quad-cubic", "-eps*x^2 - eps*x^3"),
            ("quintic", "-eps*x^5"),
            ("altered-sho", "-eps*F0*x"),
        ];
        for (id, force) in cases {
            let e = lookup(id).unwrap();
            assert_eq!(
                force_from_gauge(&e.gauge, Sign::Plus).unwrap(),
                expr(force),
                "{id}"
            );
        }
    }

    #[test]
    fn driven_cos2_identifies_as_separable() {
        let report = verify_entry(&lookup("driven-cos2").unwrap()).unwrap();
        assert!(report.passed());
        let id = report.identification.unwrap();
        assert_eq!(id.family.tag(), "g3");
        assert_eq!(
            id.describe(),
            "g3: C[1,1] = 1/2*F0, f1 = t, g1 = x; C[2,2] = 1/4*F0, f2 = sin(2*t), g2 = x"
        );
    }

    #[test]
    fn duffing_identifies_as_power_series() {
        let report = verify_entry(&lookup("duffing").unwrap()).unwrap();
        assert!(report.passed());
        let id = report.identification.unwrap();
        assert_eq!(id.describe(), "g1: C[4,1] = -1/4*eps");
    }

    #[test]
    fn every_entry_verifies() {
        for e in list_entries() {
            let r = verify_entry(&e).unwrap();
            assert!(r.passed(), "{}: {:?}", e.id, r.comparison);
        }
    }

    #[test]
    fn a_wrong_declaration_fails_as_data() {
        let mut e = lookup("duffing").unwrap();
        e.declared = expr("eps*x^3");
        let r = verify_entry(&e).unwrap();
        assert!(!r.passed());
        assert!(!r.comparison.equal);
    }

    #[test]
    fn export_records() {
        let text = lookup("duffing").unwrap().export();
        assert_eq!(
            text,
            "[duffing]\nkind = nonlinearity\nsystem = Duffing\nphi = -1/4*eps*x^4*t\n\
             phi_parts = -1/4*eps*x^4*t\ndeclared = -eps*x^3\nparams = eps=0.1\n"
        );
    }
}
