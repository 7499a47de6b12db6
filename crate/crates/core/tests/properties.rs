//! Invariants checked against brute-force oracles on random inputs.

use eigenblocks::blocks::{block_system_of, BlockSystem, FormLattice};
use eigenblocks::config::{expand_symmetry, load_config, WeightConfig, DEFAULT_GROUP_CAP};
use eigenblocks::enumeration::{search, EnumerateOptions};
use eigenblocks::lattice::{hnf, snf, Matrix};
use eigenblocks::reports::{expand_set, format_set};
use eigenblocks::symmetry::Canonicalizer;
use proptest::prelude::*;

mod common;
use common::{all_partitions, determinantal_divisor};

fn to_matrix(rows: &[Vec<i64>], cols: usize) -> Matrix<i64> {
    Matrix::from_i64_rows(cols, rows).unwrap()
}

fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(rows, cols)| {
        (Just(cols), prop::collection::vec(prop::collection::vec(-6i64..=6, cols), rows))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snf_matches_determinantal_divisors((cols, rows) in matrix_strategy()) {
        let m = to_matrix(&rows, cols);
        let s = snf(&m).unwrap();
        // Shape: left * m * right is diagonal with the divisors.
        let prod = s.left.mul(&m).unwrap().mul(&s.right).unwrap();
        for i in 0..rows.len() {
            for j in 0..cols {
                let want = if i == j { s.divisors[i] } else { 0 };
                prop_assert_eq!(prod[(i, j)], want);
            }
        }
        prop_assert_eq!(s.left.determinant().unwrap().abs(), 1);
        prop_assert_eq!(s.right.determinant().unwrap().abs(), 1);
        prop_assert_eq!(s.right.mul(&s.right_inverse).unwrap(), Matrix::identity(cols));
        // Divisibility chain and the determinantal-divisor oracle.
        let mut running = 1i128;
        for k in 1..=rows.len().min(cols) {
            let d = s.divisors[k - 1] as i128;
            prop_assert!(d >= 0);
            if k >= 2 && d != 0 {
                prop_assert_eq!(d % s.divisors[k - 2] as i128, 0);
            }
            running *= d;
            prop_assert_eq!(running, determinantal_divisor(&rows, k));
        }
        prop_assert_eq!(s.rank, s.divisors.iter().filter(|d| **d != 0).count());
    }

    #[test]
    fn hnf_is_a_canonical_basis_of_the_same_lattice((cols, rows) in matrix_strategy(), ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..6)) {
        let m = to_matrix(&rows, cols);
        let h = hnf(&m).unwrap();
        let b = h.basis().to_rows();
        let rank = h.rank();
        // Echelon shape with reduced entries above positive pivots.
        for (k, &p) in h.pivots().iter().enumerate() {
            prop_assert!(b[k][p] > 0);
            prop_assert!(b[k][..p].iter().all(|x| *x == 0));
            for above in &b[..k] {
                prop_assert!(above[p] >= 0 && above[p] < b[k][p]);
            }
            if k > 0 {
                prop_assert!(p > h.pivots()[k - 1]);
            }
        }
        // Same rank and same lattice: every input row reduces to zero, and
        // the maximal-minor gcds agree, so neither lattice is a proper sublattice.
        prop_assert_eq!(determinantal_divisor(&b, rank), determinantal_divisor(&rows, rank));
        if rank < rows.len().min(cols) {
            prop_assert_eq!(determinantal_divisor(&rows, rank + 1), 0);
        }
        for r in &rows {
            prop_assert!(h.contains(r).unwrap());
        }
        // Unimodular row operations leave the form unchanged.
        let mut shuffled = rows.clone();
        for (i, j, q) in ops {
            let (i, j) = (i % shuffled.len(), j % shuffled.len());
            if i != j {
                let src = shuffled[j].clone();
                for (x, y) in shuffled[i].iter_mut().zip(src) {
                    *x += q * y;
                }
            } else {
                shuffled[i].iter_mut().for_each(|x| *x = -*x);
            }
        }
        prop_assert_eq!(hnf(&to_matrix(&shuffled, cols)).unwrap(), h.clone());
        prop_assert_eq!(hnf(h.basis()).unwrap(), h);
    }

    #[test]
    fn rational_span_test_matches_rank((cols, rows) in matrix_strategy(), v in prop::collection::vec(-6i64..=6, 4)) {
        let h = hnf(&to_matrix(&rows, cols)).unwrap();
        let v = &v[..cols];
        let mut extended = rows.clone();
        extended.push(v.to_vec());
        let same_rank = determinantal_divisor(&extended, h.rank() + 1) == 0;
        prop_assert_eq!(h.spans(v).unwrap(), same_rank);
    }

    #[test]
    fn printed_sets_read_back(s in prop::collection::btree_set(0u64..200, 0..40)) {
        prop_assert_eq!(expand_set(&format_set(&s)).unwrap(), s);
    }
}

fn configs() -> Vec<WeightConfig> {
    ["g2_a2", "f4_a1x4", "f4_a2a2", "g2_a2_adjoint"].iter().map(|n| load_config(n).unwrap()).collect()
}

/// A config index and a random labelling of its forms.
fn system_strategy() -> impl Strategy<Value = (usize, Vec<u16>)> {
    (0usize..4).prop_flat_map(|i| {
        let d = configs()[i].d();
        (Just(i), prop::collection::vec(0u16..(d as u16), d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closure_is_extensive_idempotent_and_keeps_the_lattice((i, labels) in system_strategy()) {
        let c = &configs()[i];
        let lat = FormLattice::<i64>::new(c);
        let b = BlockSystem::from_labels(&labels);
        let cl = lat.closure(&b).unwrap();
        prop_assert!(b.refines(&cl));
        prop_assert_eq!(lat.closure(&cl).unwrap(), cl.clone());
        prop_assert_eq!(lat.relation_hnf(&b).unwrap(), lat.relation_hnf(&cl).unwrap());
        // Coarsest: merging any two blocks of the closure changes the lattice.
        let h = lat.relation_hnf(&cl).unwrap();
        let k = cl.block_count() as u16;
        for a in 0..k {
            for bb in a + 1..k {
                prop_assert_ne!(lat.relation_hnf(&cl.merge(a, bb)).unwrap(), h.clone());
            }
        }
    }

    #[test]
    fn canonical_key_is_constant_on_orbits((i, labels) in system_strategy(), g in 0usize..10_000) {
        let c = &configs()[i];
        let canon = Canonicalizer::new(&expand_symmetry(c, DEFAULT_GROUP_CAP).unwrap());
        let b = BlockSystem::from_labels(&labels);
        let key = canon.canonical(&b);
        let image = canon.image(g % canon.group_len(), &b);
        prop_assert_eq!(canon.canonical(&image), key.clone());
        // The key is itself an image, and no image is smaller.
        let images: Vec<BlockSystem> = (0..canon.group_len()).map(|k| canon.image(k, &b)).collect();
        prop_assert!(images.contains(&key));
        prop_assert!(images.iter().all(|x| key <= *x));
    }

    #[test]
    fn element_lies_in_the_stabilizer_of_its_block_system((i, raw) in (0usize..4, prop::collection::vec(0i64..60, 8)), n in 1i64..60) {
        let c = &configs()[i];
        // Project onto the base relations by solving for the last coordinate when one exists.
        let mut coords: Vec<i64> = raw[..c.r].iter().map(|x| x % n).collect();
        for rel in &c.base_relations {
            let last = rel.iter().rposition(|x| *x != 0).unwrap();
            prop_assume!(rel[last].abs() == 1);
            let partial: i64 = rel.iter().zip(&coords).take(last).map(|(a, b)| a * b).sum();
            coords[last] = (-partial * rel[last]).rem_euclid(n);
        }
        let sys = block_system_of(c, n, &coords).unwrap();
        let lat = FormLattice::<i64>::new(c);
        // Equal eigenvalues are forced on the whole closure, so the system is closed.
        prop_assert_eq!(lat.closure(&sys).unwrap(), sys.clone());
        let s = lat.stabilizer(&sys).unwrap();
        prop_assert!(s.coords_of(&coords, &n).unwrap().is_some());
    }
}

/// Closing every partition of the seven G2 forms and deduplicating by orbit
/// gives the same stored systems as the search.
#[test]
fn g2_search_matches_exhaustive_closure() {
    let c = load_config("g2_a2").unwrap();
    let lat = FormLattice::<i64>::new(&c);
    let canon = Canonicalizer::new(&expand_symmetry(&c, DEFAULT_GROUP_CAP).unwrap());
    let partitions = all_partitions(c.d());
    assert_eq!(partitions.len(), 877);
    let mut exhaustive = std::collections::BTreeMap::new();
    for p in &partitions {
        let cl = lat.closure(&BlockSystem::from_labels(p)).unwrap();
        let s = lat.stabilizer(&cl).unwrap();
        let factors: Vec<i64> = s.invariant_factors().to_vec();
        exhaustive.insert(canon.canonical(&cl), (s.dimension, factors));
    }
    let stored = search(&c, &EnumerateOptions { jobs: 1, ..Default::default() }).unwrap().stored;
    let found: std::collections::BTreeMap<_, _> = stored
        .iter()
        .map(|s| (s.key.clone(), (s.dimension, s.invariant_factors.iter().map(|&f| f as i64).collect::<Vec<_>>())))
        .collect();
    assert_eq!(found, exhaustive);
}
