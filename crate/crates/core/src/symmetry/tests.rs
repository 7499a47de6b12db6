use super::*;
use crate::blocks::closure;
use crate::config::{expand_symmetry, load_config, DEFAULT_GROUP_CAP};
use std::collections::BTreeSet;

fn scan_min(action: &FormAction, b: &BlockSystem) -> BlockSystem {
    action
        .table
        .iter()
        .map(|t| {
            let mut raw = vec![0u16; b.len()];
            for (i, &j) in t.iter().enumerate() {
                raw[j] = b.labels()[i];
            }
            BlockSystem::from_labels(&raw)
        })
        .min()
        .unwrap()
}

#[test]
fn identity_group_keeps_encoding() {
    let c = load_config("g2_a2").unwrap();
    let action = FormAction::trivial(c.r, c.d());
    let b = BlockSystem::from_blocks(7, &[&[3, 5], &[1, 6]]);
    assert_eq!(canonical_partition(&action, &b), b);
}

#[test]
fn g2_rotated_pair_shares_key() {
    let c = load_config("g2_a2").unwrap();
    let action = expand_symmetry(&c, DEFAULT_GROUP_CAP).unwrap();
    let a = BlockSystem::from_blocks(7, &[&[1, 2], &[4, 5]]);
    let b = BlockSystem::from_blocks(7, &[&[2, 3], &[5, 6]]);
    assert_eq!(canonical_partition(&action, &a), canonical_partition(&action, &b));
}

#[test]
fn trie_search_matches_linear_scan() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for name in ["g2_a2", "f4_a1x4", "e6_a2a2a2"] {
        let c = load_config(name).unwrap();
        let action = expand_symmetry(&c, DEFAULT_GROUP_CAP).unwrap();
        let canon = Canonicalizer::new(&action);
        for _ in 0..200 {
            let k = rng.gen_range(1..=c.d());
            let raw: Vec<usize> = (0..c.d()).map(|_| rng.gen_range(0..k)).collect();
            let b = BlockSystem::from_labels(&raw);
            assert_eq!(canon.canonical(&b), scan_min(&action, &b), "{name} {b}");
            let closed = closure(&c, &b).unwrap();
            assert_eq!(canon.canonical(&closed), scan_min(&action, &closed));
        }
    }
}

#[test]
fn e7_near_discrete_systems_match_linear_scan() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let c = load_config("e7_a7").unwrap();
    let action = expand_symmetry(&c, DEFAULT_GROUP_CAP).unwrap();
    let canon = Canonicalizer::new(&action);
    for _ in 0..12 {
        // A few random merges of the discrete system, then random coarse ones.
        let mut raw: Vec<usize> = (0..c.d()).collect();
        for _ in 0..rng.gen_range(1..=6) {
            let (x, y) = (rng.gen_range(0..c.d()), rng.gen_range(0..c.d()));
            raw[x] = raw[y];
        }
        let fine = BlockSystem::from_labels(&raw);
        let k = rng.gen_range(2..=20);
        let coarse = BlockSystem::from_labels(&(0..c.d()).map(|_| rng.gen_range(0..k)).collect::<Vec<_>>());
        for b in [fine, coarse] {
            let (key, automorphisms) = canon.canonical_with_automorphisms(&b);
            assert_eq!(key, scan_min(&action, &b), "{b}");
            for a in &automorphisms {
                let moved: Vec<u16> = (0..c.d()).map(|x| b.labels()[a[x] as usize]).collect();
                assert_eq!(BlockSystem::from_labels(&moved), b, "automorphism must map blocks to blocks");
            }
        }
    }
}

#[test]
fn key_is_constant_exactly_on_g2_orbits() {
    let c = load_config("g2_a2").unwrap();
    let action = expand_symmetry(&c, DEFAULT_GROUP_CAP).unwrap();
    let canon = Canonicalizer::new(&action);
    // All closed systems of g2_a2, from closing every partition of 7 indices.
    let mut closed = BTreeSet::new();
    for p in all_partitions(7) {
        closed.insert(closure(&c, &p).unwrap());
    }
    for a in &closed {
        let orbit: BTreeSet<BlockSystem> = (0..canon.group_len()).map(|k| canon.image(k, a)).collect();
        for b in &closed {
            assert_eq!(orbit.contains(b), canon.canonical(a) == canon.canonical(b));
        }
    }
}

#[test]
fn canonical_vector_examples() {
    let c = load_config("g2_a2").unwrap();
    let action = expand_symmetry(&c, DEFAULT_GROUP_CAP).unwrap();
    assert_eq!(
        canonical_vector(&action, &c, 3, &[1, 2, 0]),
        canonical_vector(&action, &c, 3, &[2, 0, 1])
    );
    assert_eq!(canonical_vector(&action, &c, 3, &[1, 1, 1]), vec![1, 1, 1]);
    let trivial = FormAction::trivial(c.r, c.d());
    assert_eq!(canonical_vector(&trivial, &c, 5, &[1, 2, 2]), vec![1, 2, 2]);
}

pub(crate) fn all_partitions(d: usize) -> Vec<BlockSystem> {
    let mut out = Vec::new();
    let mut labels = vec![0u16; d];
    fn rec(i: usize, max: u16, labels: &mut Vec<u16>, out: &mut Vec<BlockSystem>) {
        if i == labels.len() {
            out.push(BlockSystem::from_labels(labels));
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            rec(i + 1, max.max(l), labels, out);
        }
    }
    if d > 0 {
        rec(1, 0, &mut labels, &mut out);
    }
    out
}

#[test]
fn bell_number_of_seven() {
    assert_eq!(all_partitions(7).len(), 877);
}
