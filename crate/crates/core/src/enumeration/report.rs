use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{avoiding_orders, center_subgroup, EnumerateOptions, EnumerationError, SearchResult};
use crate::config::WeightConfig;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Full,
    /// Store systems of dimension at least `threshold`; below it, only collect exponents.
    Hybrid { threshold: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Full => write!(f, "full"),
            Mode::Hybrid { threshold } => write!(f, "hybrid({threshold})"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "full" {
            return Ok(Mode::Full);
        }
        s.strip_prefix("hybrid(")
            .and_then(|t| t.strip_suffix(')'))
            .and_then(|t| t.parse().ok())
            .map(|threshold| Mode::Hybrid { threshold })
            .ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

/// Run statistics; excluded from regression diffs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
    pub threads: usize,
    pub candidates: u64,
    pub duplicates: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema: u32,
    pub config: String,
    pub mode: String,
    pub cofactor_m: u64,
    pub bad_primes: Vec<u64>,
    pub reference_tg: Option<u64>,
    /// False when hybrid descent was limited to a subset of seeds.
    pub complete: bool,
    pub stored_systems: usize,
    /// Dimension to number of stored systems.
    pub profile: BTreeMap<usize, usize>,
    /// Dimension-0 exponents, sorted, with multiplicity over stored systems.
    /// Hybrid descent contributes each exponent once.
    pub exponents_raw: Vec<u64>,
    pub exponents_scaled: Vec<u64>,
    pub center_order: u64,
    pub avoiding_orders: Option<Vec<u64>>,
    pub seeds_total: Option<usize>,
    pub seeds_processed: Option<usize>,
    pub timing: Timing,
}

impl SearchReport {
    pub(crate) fn build(
        c: &WeightConfig,
        opts: &EnumerateOptions,
        result: &SearchResult,
        elapsed_seconds: f64,
        threads: usize,
    ) -> Result<Self, EnumerationError> {
        let mut profile = BTreeMap::new();
        let mut exponents_raw = Vec::new();
        for s in &result.stored {
            *profile.entry(s.dimension).or_insert(0) += 1;
            if s.dimension == 0 {
                exponents_raw.push(s.exponent());
            }
        }
        exponents_raw.extend(&result.descended_exponents);
        exponents_raw.sort_unstable();
        let exponents_scaled = exponents_raw.iter().map(|e| e * c.cofactor_m).collect();
        let center = center_subgroup(c)?;
        let hybrid = matches!(opts.mode, Mode::Hybrid { .. });
        let avoiding = if hybrid {
            None
        } else {
            let finite: Vec<_> = result.stored.iter().filter(|s| s.dimension == 0).collect();
            match avoiding_orders(c, &center, &finite) {
                Ok(set) => Some(set.into_iter().collect()),
                Err(EnumerationError::NonCyclicCenter(_)) => None,
                Err(e) => return Err(e),
            }
        };
        Ok(SearchReport {
            schema: REPORT_SCHEMA,
            config: c.name.clone(),
            mode: opts.mode.to_string(),
            cofactor_m: c.cofactor_m,
            bad_primes: c.bad_primes.clone(),
            reference_tg: c.reference_tg,
            complete: !hybrid || result.seeds_processed == result.seeds_total,
            stored_systems: result.stored.len(),
            profile,
            exponents_raw,
            exponents_scaled,
            center_order: center.order,
            avoiding_orders: avoiding,
            seeds_total: hybrid.then_some(result.seeds_total),
            seeds_processed: hybrid.then_some(result.seeds_processed),
            timing: Timing {
                elapsed_seconds,
                threads,
                candidates: result.candidates,
                duplicates: result.duplicates,
            },
        })
    }

    /// Distinct dimension-0 exponents.
    pub fn exponent_set(&self) -> BTreeSet<u64> {
        self.exponents_raw.iter().copied().collect()
    }

    /// Profile in descending dimension, e.g. `4^2 3^11 2^113`.
    pub fn profile_string(&self) -> String {
        self.profile
            .iter()
            .rev()
            .map(|(d, n)| if *n == 1 { d.to_string() } else { format!("{d}^{n}") })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn join(xs: impl IntoIterator<Item = u64>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "config      {}", self.config)?;
        writeln!(f, "mode        {}", self.mode)?;
        if let (Some(done), Some(total)) = (self.seeds_processed, self.seeds_total) {
            writeln!(f, "seeds       {done} of {total}")?;
        }
        writeln!(f, "stored      {}", self.stored_systems)?;
        writeln!(f, "profile     {}", self.profile_string())?;
        writeln!(f, "dimension   count")?;
        for (d, n) in self.profile.iter().rev() {
            writeln!(f, "{d:>9}   {n}")?;
        }
        writeln!(f, "exponents   {}", join(self.exponent_set()))?;
        writeln!(f, "scaled (m={}) {}", self.cofactor_m, join(self.exponent_set().into_iter().map(|e| e * self.cofactor_m)))?;
        writeln!(f, "center      {}", self.center_order)?;
        if let Some(a) = &self.avoiding_orders {
            writeln!(f, "avoiding    {}", join(a.iter().copied()))?;
        }
        write!(f, "elapsed     {:.2}s on {} threads", self.timing.elapsed_seconds, self.timing.threads)
    }
}
