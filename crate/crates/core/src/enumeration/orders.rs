use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::SearchReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictReason {
    /// Prime to the bad primes and dividing no finite-stabilizer exponent.
    ExponentDivisibility,
    /// Has a proper divisor that is certified.
    MultipleOfGood { divisor: u64 },
    /// Certified by a witness search.
    Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub n: u64,
    pub certified_good: bool,
    pub certifying: Vec<String>,
    pub reason: Option<VerdictReason>,
}

fn direct(reports: &[SearchReport], witnessed: &BTreeSet<u64>, n: u64) -> Option<(Vec<String>, VerdictReason)> {
    if n <= 1 {
        return None;
    }
    let configs: Vec<String> = reports
        .iter()
        .filter(|r| r.bad_primes.iter().all(|p| n.gcd(p) == 1))
        .filter(|r| r.exponents_raw.iter().all(|e| e % n != 0))
        .map(|r| r.config.clone())
        .collect();
    if !configs.is_empty() {
        return Some((configs, VerdictReason::ExponentDivisibility));
    }
    witnessed.contains(&n).then(|| (Vec::new(), VerdictReason::Witness))
}

/// Verdicts for `1..=n_max` from exponent data alone.
pub fn order_verdicts(reports: &[SearchReport], n_max: u64) -> Vec<OrderVerdict> {
    order_verdicts_with(reports, n_max, &BTreeSet::new())
}

/// As [`order_verdicts`], additionally trusting orders certified by witness searches.
pub fn order_verdicts_with(reports: &[SearchReport], n_max: u64, witnessed: &BTreeSet<u64>) -> Vec<OrderVerdict> {
    (1..=n_max)
        .map(|n| {
            if let Some((certifying, reason)) = direct(reports, witnessed, n) {
                return OrderVerdict { n, certified_good: true, certifying, reason: Some(reason) };
            }
            // A multiple of a good order is good: if n divided an exponent, so would the divisor.
            for k in (2..n).filter(|k| n % k == 0) {
                if let Some((certifying, _)) = direct(reports, witnessed, k) {
                    return OrderVerdict {
                        n,
                        certified_good: true,
                        certifying,
                        reason: Some(VerdictReason::MultipleOfGood { divisor: k }),
                    };
                }
            }
            OrderVerdict { n, certified_good: false, certifying: Vec::new(), reason: None }
        })
        .collect()
}
