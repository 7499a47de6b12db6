use super::*;
use crate::config::load_config;
use std::collections::BTreeSet;

fn ctx(name: &str) -> WitnessContext {
    WitnessContext::new(&load_config(name).unwrap()).unwrap()
}

#[test]
fn order_one_is_the_identity_class() {
    for name in ["g2_a2", "f4_a1x4", "e6_a2a2a2"] {
        let classes = ctx(name).enumerate_elements(1).unwrap();
        assert_eq!(classes.len(), 1, "{name}");
        assert!(classes[0].eigenvalues.iter().all(|&v| v == 0));
    }
}

#[test]
fn g2_has_one_involution_class() {
    let classes = ctx("g2_a2").enumerate_elements(2).unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0].coords, vec![0, 1, 1]);
    assert_eq!(classes[0].modulus, 2);
}

#[test]
fn prime_order_class_counts_match_brute_force_orbits() {
    let c = ctx("g2_a2");
    assert_eq!(c.kernel_order(), 1);
    for p in [2i64, 3, 5, 7] {
        let mut orbits = BTreeSet::new();
        for x in 0..p {
            for y in 0..p {
                let z = (-x - y).rem_euclid(p);
                if (x, y, z) == (0, 0, 0) {
                    continue;
                }
                let v = [x, y, z];
                let orbit_min = c.action.elements.iter().map(|g| g.apply_mod(&v, p)).min().unwrap();
                orbits.insert(orbit_min);
            }
        }
        assert_eq!(c.enumerate_elements(p as u64).unwrap().len(), orbits.len(), "p = {p}");
    }
}

#[test]
fn f4_kernel_is_the_diagonal_half() {
    let c = ctx("f4_a1x4");
    assert_eq!(c.kernel_order(), 2);
    assert_eq!(c.kernel_exponent, 2);
    assert!(c.kernel.contains(&vec![1, 1, 1, 1]));
}

#[test]
fn witnesses_recheck_from_coordinates() {
    let c = ctx("f4_a1x4");
    let classes = c.enumerate_elements(6).unwrap();
    let mut found = 0;
    for x in &classes {
        let out = c.witness_search(x, 5).unwrap();
        if let Some((coords, den)) = &out.witness {
            assert!(c.verify_witness(x, 5, coords, *den));
            found += 1;
        }
        assert_eq!(out.found, out.witness.is_some());
    }
    assert!(found > 0);
}

#[test]
fn finite_stabilizer_without_room_fails() {
    // The g2 involution's block system {1,2,4,5},{3,6,7} has a finite
    // stabilizer of exponent 2, so no root of order 6 exists.
    let c = ctx("g2_a2");
    let x = &c.enumerate_elements(2).unwrap()[0];
    assert_eq!(x.dimension, 0);
    let out = c.witness_search(x, 3).unwrap();
    assert!(!out.found);
}

#[test]
fn budget_is_enforced() {
    let mut c = ctx("f4_a2a2");
    c.point_budget = 1000;
    assert!(matches!(c.enumerate_elements(5), Err(WitnessError::BudgetExceeded { .. })));
}
