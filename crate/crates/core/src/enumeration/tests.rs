use std::collections::{BTreeMap, BTreeSet};

use super::*;
use crate::config::load_config;

fn full(name: &str) -> SearchReport {
    enumerate(&load_config(name).unwrap(), &EnumerateOptions { jobs: 1, ..Default::default() }).unwrap()
}

fn hybrid(threshold: usize) -> EnumerateOptions {
    EnumerateOptions { mode: Mode::Hybrid { threshold }, jobs: 1, ..Default::default() }
}

#[test]
fn g2_full_enumeration() {
    let r = full("g2_a2");
    assert_eq!(r.stored_systems, 9);
    assert_eq!(r.profile.values().sum::<usize>(), 9);
    assert_eq!(r.exponent_set(), BTreeSet::from([1, 2, 3, 4]));
    assert_eq!(r.exponents_scaled, r.exponents_raw);
    assert_eq!(r.center_order, 1);
    // Trivial center: every divisor of an exponent avoids it.
    assert_eq!(r.avoiding_orders, Some(vec![1, 2, 3, 4]));
    assert!(r.complete);
}

#[test]
fn f4_a1x4_profile() {
    let r = full("f4_a1x4");
    assert_eq!(r.stored_systems, 1264);
    assert_eq!(r.profile, BTreeMap::from([(4, 2), (3, 11), (2, 113), (1, 538), (0, 600)]));
    assert_eq!(r.exponent_set(), (1..=18).map(|k| 2 * k).collect());
    assert_eq!(r.exponents_raw.len(), 600);
    assert!(r.exponents_scaled.iter().zip(&r.exponents_raw).all(|(s, e)| *s == 2 * e));
}

#[test]
fn report_is_independent_of_jobs() {
    let c = load_config("f4_a1x4").unwrap();
    let mut a = enumerate(&c, &EnumerateOptions { jobs: 1, ..Default::default() }).unwrap();
    let mut b = enumerate(&c, &EnumerateOptions { jobs: 4, ..Default::default() }).unwrap();
    a.timing = Timing::default();
    b.timing = Timing::default();
    assert_eq!(a.to_json(), b.to_json());
    let sa = search(&c, &EnumerateOptions { jobs: 1, ..Default::default() }).unwrap();
    let sb = search(&c, &EnumerateOptions { jobs: 3, ..Default::default() }).unwrap();
    assert_eq!(sa.stored, sb.stored);
}

#[test]
fn hybrid_collects_the_full_exponent_set() {
    for name in ["g2_a2", "f4_a1x4"] {
        let c = load_config(name).unwrap();
        let expected = full(name).exponent_set();
        for threshold in 1..=2 {
            let r = enumerate(&c, &hybrid(threshold)).unwrap();
            assert_eq!(r.exponent_set(), expected, "{name} threshold {threshold}");
            assert!(r.profile.keys().all(|&d| d >= threshold));
            assert!(r.complete);
            assert_eq!(r.seeds_total, Some(r.stored_systems));
        }
    }
}

#[test]
fn hybrid_profile_matches_full_above_threshold() {
    let c = load_config("f4_a1x4").unwrap();
    let f = full("f4_a1x4");
    let h = enumerate(&c, &hybrid(2)).unwrap();
    let above: BTreeMap<usize, usize> = f.profile.into_iter().filter(|(d, _)| *d >= 2).collect();
    assert_eq!(h.profile, above);
    assert_eq!(h.avoiding_orders, None);
}

#[test]
fn limited_seeds_mark_the_report_incomplete() {
    let c = load_config("f4_a1x4").unwrap();
    let r = enumerate(&c, &EnumerateOptions { limit_seeds: Some(3), ..hybrid(2) }).unwrap();
    assert_eq!(r.seeds_processed, Some(3));
    assert!(!r.complete);
}

#[test]
fn checkpoint_round_trip_and_resume() {
    let c = load_config("f4_a1x4").unwrap();
    let stored = search(&c, &EnumerateOptions { limit_seeds: Some(0), ..hybrid(2) }).unwrap().stored;
    let mut buf = Vec::new();
    write_checkpoint(&mut buf, &c.name, &stored).unwrap();
    let back = read_checkpoint(buf.as_slice()).unwrap();
    assert_eq!(back, stored);

    let mut direct = enumerate(&c, &hybrid(2)).unwrap();
    let mut resumed = enumerate(&c, &EnumerateOptions { resume: Some(back), ..hybrid(2) }).unwrap();
    direct.timing = Timing::default();
    resumed.timing = Timing::default();
    assert_eq!(direct.exponent_set(), resumed.exponent_set());
    assert_eq!(direct.profile, resumed.profile);
}

#[test]
fn checkpoint_rejects_bad_lines() {
    assert!(read_checkpoint("1 0,0,1".as_bytes()).is_err());
    assert!(read_checkpoint("1 1,0 -".as_bytes()).is_err());
    assert!(read_checkpoint("x 0,1 2".as_bytes()).is_err());
    assert_eq!(read_checkpoint("# header\n\n0 0,1 2,4\n".as_bytes()).unwrap()[0].invariant_factors, vec![2, 4]);
}

#[test]
fn store_budget_is_enforced() {
    let c = load_config("f4_a1x4").unwrap();
    let err = enumerate(&c, &EnumerateOptions { max_stored: Some(50), jobs: 1, ..Default::default() }).unwrap_err();
    assert_eq!(err, EnumerationError::MemoryBudget(50));
}

#[test]
fn report_json_round_trip() {
    let r = full("g2_a2");
    let back = SearchReport::from_json(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert!(r.to_json().contains("\"schema\": 1"));
}

#[test]
fn mode_text_round_trip() {
    for m in [Mode::Full, Mode::Hybrid { threshold: 3 }] {
        assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
    }
    assert!("hybrid".parse::<Mode>().is_err());
}

#[test]
fn center_orders() {
    let g2 = center_subgroup(&load_config("g2_a2").unwrap()).unwrap();
    assert_eq!((g2.order, g2.cyclic), (1, true));
    let e6 = center_subgroup(&load_config("e6_a5a1").unwrap()).unwrap();
    assert_eq!((e6.order, e6.cyclic), (3, true));
    let e6b = center_subgroup(&load_config("e6_a2a2a2").unwrap()).unwrap();
    assert_eq!((e6b.order, e6b.cyclic), (3, true));
}

#[test]
fn trivial_center_avoids_all_finite_orders() {
    let r = full("f4_a1x4");
    assert_eq!(r.center_order, 1);
    let divisors: Vec<u64> = (1..=36).filter(|k| r.exponent_set().iter().any(|e| e % k == 0)).collect();
    assert_eq!(r.avoiding_orders, Some(divisors));
}

fn verdict_report(exponents: &[u64], bad: &[u64]) -> SearchReport {
    let mut r = full("g2_a2");
    r.exponents_raw = exponents.to_vec();
    r.bad_primes = bad.to_vec();
    r
}

#[test]
fn verdict_examples() {
    let r = verdict_report(&[2, 4, 36], &[2]);
    let v = order_verdicts(std::slice::from_ref(&r), 50);
    // Identity is in every stabilizer.
    assert!(!v[0].certified_good);
    // 21 is odd and divides no exponent, and 42 is a multiple of the good order 7.
    assert_eq!(v[20].reason, Some(VerdictReason::ExponentDivisibility));
    assert_eq!(v[41].reason, Some(VerdictReason::MultipleOfGood { divisor: 7 }));
    // 9 divides 36.
    assert!(!v[8].certified_good);
    // 4 shares the bad prime and has no good proper divisor.
    assert!(!v[3].certified_good);
    let w = order_verdicts_with(std::slice::from_ref(&r), 50, &BTreeSet::from([4]));
    assert_eq!(w[3].reason, Some(VerdictReason::Witness));
    assert_eq!(w[7].reason, Some(VerdictReason::MultipleOfGood { divisor: 4 }));
}
