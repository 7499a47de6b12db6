//! Expected-result fixtures, regression diffs and combined order tables.

mod shorthand;

pub use shorthand::expand_set;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{order_verdicts_with, OrderVerdict, SearchReport, VerdictReason};
use crate::witness::WitnessReport;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed fixture: {0}")]
    Json(String),
    #[error("cannot expand set description `{0}`")]
    Shorthand(String),
    #[error("fixture needs a report for `{0}`")]
    MissingCompanion(String),
    #[error("fixture has no witness expectation for n = {n}, a = {a}")]
    NoWitnessExpectation { n: u64, a: u64 },
}

/// A set given either explicitly or by a shorthand such as `multiples of 6 in [6,156]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    List(Vec<u64>),
    Text(String),
}

impl SetSpec {
    pub fn expand(&self) -> Result<BTreeSet<u64>, FixtureError> {
        match self {
            SetSpec::List(xs) => Ok(xs.iter().copied().collect()),
            SetSpec::Text(t) => expand_set(t),
        }
    }
}

/// The residual bad set of this report together with the named others.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedBadOrders {
    #[serde(default)]
    pub with: Vec<String>,
    /// Only orders at least this are compared.
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub set: SetSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedWitness {
    pub n: u64,
    pub a: u64,
    pub all_witnessed: bool,
    /// Published class count; ours is compared as at least this.
    pub reference_class_count: Option<usize>,
}

/// Published results for one configuration. Absent fields are not checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedFixture {
    pub config: String,
    /// The sentences each expectation comes from.
    #[serde(default)]
    pub notes: Vec<String>,
    pub stored_systems: Option<usize>,
    pub profile: Option<BTreeMap<usize, usize>>,
    /// Distinct dimension-0 exponents.
    pub exponents: Option<SetSpec>,
    /// Orders of elements of finite stabilizers: all divisors of the exponents.
    pub finite_orders: Option<SetSpec>,
    pub center_order: Option<u64>,
    pub odd_avoiding_orders: Option<SetSpec>,
    /// Largest odd divisor of any exponent.
    pub largest_odd_divisor: Option<u64>,
    pub bad_orders: Option<ExpectedBadOrders>,
    #[serde(default)]
    pub witness: Vec<ExpectedWitness>,
}

impl ExpectedFixture {
    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        serde_json::from_str(text).map_err(|e| FixtureError::Json(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, FixtureError> {
        Self::from_json(&read(path)?)
    }
}

fn read(path: &Path) -> Result<String, FixtureError> {
    std::fs::read_to_string(path)
        .map_err(|e| FixtureError::Io { path: path.display().to_string(), message: e.to_string() })
}

const BUNDLED_FIXTURES: &[(&str, &str)] = &[
    ("g2_a2", include_str!("../../fixtures/g2_a2.expected.json")),
    ("f4_a1x4", include_str!("../../fixtures/f4_a1x4.expected.json")),
    ("f4_a2a2", include_str!("../../fixtures/f4_a2a2.expected.json")),
    ("e6_a5a1", include_str!("../../fixtures/e6_a5a1.expected.json")),
    ("e6_a2a2a2", include_str!("../../fixtures/e6_a2a2a2.expected.json")),
    ("e7_a7", include_str!("../../fixtures/e7_a7.expected.json")),
    ("g2_a2_adjoint", include_str!("../../fixtures/g2_a2_adjoint.expected.json")),
    ("f4_a1x4_adjoint", include_str!("../../fixtures/f4_a1x4_adjoint.expected.json")),
    ("f4_a2a2_adjoint", include_str!("../../fixtures/f4_a2a2_adjoint.expected.json")),
];

/// The fixture shipped for a bundled configuration.
pub fn bundled_fixture(config: &str) -> Option<ExpectedFixture> {
    BUNDLED_FIXTURES
        .iter()
        .find(|(n, _)| *n == config)
        .map(|(_, t)| ExpectedFixture::from_json(t).expect("bundled fixture parses"))
}

/// Loads a fixture by bundled config name or file path.
pub fn load_fixture(name: &str) -> Result<ExpectedFixture, FixtureError> {
    match bundled_fixture(name) {
        Some(f) => Ok(f),
        None => ExpectedFixture::load(Path::new(name)),
    }
}

/// One disagreement between a report and a fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub field: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, got {}", self.field, self.expected, self.actual)
    }
}

/// Formats a set with runs collapsed, e.g. `{1..10, 12}`.
pub fn format_set(s: &BTreeSet<u64>) -> String {
    let mut parts = Vec::new();
    let mut it = s.iter().copied().peekable();
    while let Some(lo) = it.next() {
        let mut hi = lo;
        while it.peek() == Some(&(hi + 1)) {
            hi = it.next().unwrap_or(hi);
        }
        parts.push(match hi - lo {
            0 => lo.to_string(),
            1 => format!("{lo}, {hi}"),
            _ => format!("{lo}..{hi}"),
        });
    }
    format!("{{{}}}", parts.join(", "))
}

fn format_profile(p: &BTreeMap<usize, usize>) -> String {
    let parts: Vec<String> = p.iter().rev().map(|(d, n)| format!("{d}:{n}")).collect();
    parts.join(" ")
}

fn largest_odd_divisor(s: &BTreeSet<u64>) -> u64 {
    s.iter().map(|&e| e >> e.trailing_zeros()).max().unwrap_or(1)
}

fn divisors_of_all(exponents: &BTreeSet<u64>) -> BTreeSet<u64> {
    exponents.iter().flat_map(|&e| (1..=e).filter(move |k| e % k == 0)).collect()
}

struct Checker(Vec<Mismatch>);

impl Checker {
    fn check<T: PartialEq>(&mut self, field: &str, expected: &T, actual: &T, show: impl Fn(&T) -> String) {
        if expected != actual {
            self.0.push(Mismatch { field: field.into(), expected: show(expected), actual: show(actual) });
        }
    }

    fn set(&mut self, field: &str, expected: &BTreeSet<u64>, actual: &BTreeSet<u64>) {
        self.check(field, expected, actual, format_set);
    }
}

/// Compares a search report with a fixture. `companions` supply the other
/// reports named by the fixture's bad-order expectation.
pub fn diff_search(
    report: &SearchReport,
    fixture: &ExpectedFixture,
    companions: &[SearchReport],
) -> Result<Vec<Mismatch>, FixtureError> {
    let mut c = Checker(Vec::new());
    c.check("config", &fixture.config, &report.config, |s| s.clone());
    if let Some(n) = fixture.stored_systems {
        c.check("stored_systems", &n, &report.stored_systems, |n| n.to_string());
    }
    if let Some(p) = &fixture.profile {
        c.check("profile", p, &report.profile, format_profile);
    }
    let exponents = report.exponent_set();
    if let Some(e) = &fixture.exponents {
        c.set("exponents", &e.expand()?, &exponents);
    }
    if let Some(x) = &fixture.finite_orders {
        c.set("finite_orders", &x.expand()?, &divisors_of_all(&exponents));
    }
    if let Some(z) = fixture.center_order {
        c.check("center_order", &z, &report.center_order, |z| z.to_string());
    }
    if let Some(a) = &fixture.odd_avoiding_orders {
        let actual = report.avoiding_orders.as_ref().map(|v| v.iter().copied().filter(|x| x % 2 == 1).collect());
        c.check("odd_avoiding_orders", &Some(a.expand()?), &actual, |s| match s {
            Some(s) => format_set(s),
            None => "not computed".into(),
        });
    }
    if let Some(l) = fixture.largest_odd_divisor {
        c.check("largest_odd_divisor", &l, &largest_odd_divisor(&exponents), |l| l.to_string());
    }
    if let Some(bad) = &fixture.bad_orders {
        let mut all = vec![report.clone()];
        for name in &bad.with {
            let other = companions
                .iter()
                .find(|r| &r.config == name)
                .ok_or_else(|| FixtureError::MissingCompanion(name.clone()))?;
            all.push(other.clone());
        }
        let summary = combine_orders(&all, bad.max, &BTreeSet::new());
        let lo = bad.min.unwrap_or(1);
        let actual = summary.bad_set().into_iter().filter(|&n| n >= lo).collect();
        c.set("bad_orders", &bad.set.expand()?, &actual);
    }
    Ok(c.0)
}

/// Compares a witness report with the fixture entry for its `(n, a)`.
pub fn diff_witness(report: &WitnessReport, fixture: &ExpectedFixture) -> Result<Vec<Mismatch>, FixtureError> {
    let mut c = Checker(Vec::new());
    c.check("config", &fixture.config, &report.config, |s| s.clone());
    let w = fixture
        .witness
        .iter()
        .find(|w| w.n == report.n && w.a == report.a)
        .ok_or(FixtureError::NoWitnessExpectation { n: report.n, a: report.a })?;
    c.check("all_witnessed", &w.all_witnessed, &report.all_witnessed, |b| b.to_string());
    if let Some(k) = w.reference_class_count {
        if report.class_count < k {
            c.0.push(Mismatch {
                field: "class_count".into(),
                expected: format!("at least {k}"),
                actual: report.class_count.to_string(),
            });
        }
    }
    Ok(c.0)
}

/// Verdicts for orders `1..=n_max` pooled over several reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrdersSummary {
    pub configs: Vec<String>,
    pub n_max: u64,
    pub reference_tg: Option<u64>,
    pub verdicts: Vec<OrderVerdict>,
}

impl OrdersSummary {
    /// Orders not certified good.
    pub fn bad_set(&self) -> BTreeSet<u64> {
        self.verdicts.iter().filter(|v| !v.certified_good).map(|v| v.n).collect()
    }

    pub fn summary_line(&self) -> String {
        let bad = self.bad_set();
        let largest = bad.iter().next_back().copied().unwrap_or(0);
        let mut line = format!("{} orders up to {} not certified; largest {largest}", bad.len(), self.n_max);
        if let Some(t) = self.reference_tg {
            let rel = match largest.cmp(&t) {
                std::cmp::Ordering::Less => "below",
                std::cmp::Ordering::Equal => "equal to",
                std::cmp::Ordering::Greater => "above",
            };
            line.push_str(&format!(", {rel} reference t(G) = {t}"));
        }
        line
    }
}

impl fmt::Display for OrdersSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "reports     {}", self.configs.join(" "))?;
        writeln!(f, "{:>5}  {:<4}  {:<24}  certifying", "n", "good", "reason")?;
        for v in &self.verdicts {
            let reason = match &v.reason {
                Some(VerdictReason::ExponentDivisibility) => "exponent divisibility".to_string(),
                Some(VerdictReason::MultipleOfGood { divisor }) => format!("multiple of good {divisor}"),
                Some(VerdictReason::Witness) => "witness".to_string(),
                None => "-".to_string(),
            };
            let good = if v.certified_good { "yes" } else { "no" };
            writeln!(f, "{:>5}  {:<4}  {:<24}  {}", v.n, good, reason, v.certifying.join(" "))?;
        }
        writeln!(f, "bad set     {}", format_set(&self.bad_set()))?;
        write!(f, "summary     {}", self.summary_line())
    }
}

/// Pools reports for one target group. `n_max` defaults to the reference
/// t(G) when present, and otherwise to the largest scaled exponent.
pub fn combine_orders(reports: &[SearchReport], n_max: Option<u64>, witnessed: &BTreeSet<u64>) -> OrdersSummary {
    let reference_tg = reports.iter().filter_map(|r| r.reference_tg).max();
    let largest_scaled = reports.iter().flat_map(|r| r.exponents_scaled.iter().copied()).max().unwrap_or(1);
    let n_max = n_max.or(reference_tg).unwrap_or(largest_scaled);
    OrdersSummary {
        configs: reports.iter().map(|r| r.config.clone()).collect(),
        n_max,
        reference_tg,
        verdicts: order_verdicts_with(reports, n_max, witnessed),
    }
}
