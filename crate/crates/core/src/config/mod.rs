//! Problem instances: torus coordinates, base relations, eigenvalue forms and
//! the signed coordinate permutations that act on them.

mod bundled;
mod parse;

pub use bundled::{bundled_names, bundled_text, load_config};
pub use parse::{parse_config, ConfigError};

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Default ceiling on the size of the expanded symmetry group.
pub const DEFAULT_GROUP_CAP: usize = 50_000;

/// A coordinate permutation composed with an optional global negation.
///
/// `perm[i]` is the image of coordinate `i` (0-based). Acting on a vector `v`,
/// the result `w` has `w[perm[i]] = sign * v[i]`; forms and torus points
/// transform the same way.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    pub perm: Vec<usize>,
    pub sign: i8,
}

impl SignedPerm {
    pub fn identity(r: usize) -> Self {
        SignedPerm { perm: (0..r).collect(), sign: 1 }
    }

    /// Builds from 0-based cycles.
    pub fn from_cycles(r: usize, cycles: &[Vec<usize>], sign: i8) -> Result<Self, SymmetryError> {
        let mut perm: Vec<usize> = (0..r).collect();
        let mut seen = vec![false; r];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= r || seen[a] {
                    return Err(SymmetryError::BadPermutation(format!("{cycles:?}")));
                }
                seen[a] = true;
                perm[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(SignedPerm { perm, sign })
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.perm.len()];
        for &p in &self.perm {
            if p >= seen.len() || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        true
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.perm[i]] = self.sign as i64 * x;
        }
        out
    }

    /// Residues mod `n` of the image of `v`.
    pub fn apply_mod(&self, v: &[i64], n: i64) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.perm[i]] = (self.sign as i64 * x).rem_euclid(n);
        }
        out
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &SignedPerm) -> SignedPerm {
        SignedPerm {
            perm: first.perm.iter().map(|&i| self.perm[i]).collect(),
            sign: self.sign * first.sign,
        }
    }

    /// Cycle notation, 1-based, followed by the sign.
    pub fn to_cycle_string(&self) -> String {
        let mut out = String::new();
        let mut seen = vec![false; self.perm.len()];
        for start in 0..self.perm.len() {
            if seen[start] || self.perm[start] == start {
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&(i + 1).to_string());
                first = false;
                i = self.perm[i];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out.push(' ');
        out.push(if self.sign < 0 { '-' } else { '+' });
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("invalid permutation {0}")]
    BadPermutation(String),
    #[error("symmetry {0} does not map the form multiset onto itself")]
    NotFormPermutation(String),
    #[error("symmetry {0} does not preserve the base relations")]
    NotRelationPreserving(String),
    #[error("expanded symmetry group exceeds the cap of {cap} elements")]
    CapExceeded { cap: usize },
}

/// One problem instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightConfig {
    pub name: String,
    pub r: usize,
    pub base_relations: Vec<Vec<i64>>,
    pub forms: Vec<Vec<i64>>,
    pub symmetry_generators: Vec<SignedPerm>,
    pub cofactor_m: u64,
    pub bad_primes: Vec<u64>,
    pub reference_tg: Option<u64>,
}

impl WeightConfig {
    /// Number of eigenvalue forms (the module dimension).
    pub fn d(&self) -> usize {
        self.forms.len()
    }

    /// Form-index permutation induced by `g`, matching repeated forms by occurrence.
    pub fn form_permutation(&self, g: &SignedPerm) -> Result<Vec<usize>, SymmetryError> {
        FormIndex::new(&self.forms).permutation(g)
    }

    fn preserves_relations(&self, g: &SignedPerm) -> bool {
        let canon = |rows: &[Vec<i64>]| -> BTreeSet<Vec<i64>> {
            rows.iter()
                .map(|r| {
                    let neg: Vec<i64> = r.iter().map(|x| -x).collect();
                    if neg < *r {
                        neg
                    } else {
                        r.clone()
                    }
                })
                .collect()
        };
        let images: Vec<Vec<i64>> = self.base_relations.iter().map(|r| g.apply(r)).collect();
        canon(&images) == canon(&self.base_relations)
    }

    /// Checks invariants without failing; see [`Diagnostics`].
    pub fn validate(&self) -> Diagnostics {
        self.validate_with_cap(DEFAULT_GROUP_CAP)
    }

    pub fn validate_with_cap(&self, cap: usize) -> Diagnostics {
        let mut problems = Vec::new();
        for (i, rel) in self.base_relations.iter().enumerate() {
            if rel.len() != self.r {
                problems.push(format!("relation {} has length {}, expected {}", i + 1, rel.len(), self.r));
            }
        }
        for (i, f) in self.forms.iter().enumerate() {
            if f.len() != self.r {
                problems.push(format!("form {} has length {}, expected {}", i + 1, f.len(), self.r));
            }
        }
        if self.cofactor_m == 0 {
            problems.push("cofactor must be at least 1".into());
        }
        for &p in &self.bad_primes {
            if !is_prime(p) {
                problems.push(format!("bad prime {p} is not prime"));
            } else if self.cofactor_m % p != 0 {
                problems.push(format!("bad prime {p} does not divide the cofactor {}", self.cofactor_m));
            }
        }
        let mut group_size = None;
        if problems.is_empty() {
            for g in &self.symmetry_generators {
                if g.perm.len() != self.r || !g.is_bijection() {
                    problems.push(format!("symmetry {} is not a permutation of 1..{}", g.to_cycle_string(), self.r));
                    continue;
                }
                if let Err(e) = self.form_permutation(g) {
                    problems.push(e.to_string());
                }
                if !self.preserves_relations(g) {
                    problems.push(SymmetryError::NotRelationPreserving(g.to_cycle_string()).to_string());
                }
            }
            if problems.is_empty() {
                match expand_group(self, cap) {
                    Ok(elements) => group_size = Some(elements.len()),
                    Err(e) => problems.push(e.to_string()),
                }
            }
        }
        Diagnostics { name: self.name.clone(), valid: problems.is_empty(), problems, group_size }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub name: String,
    pub valid: bool,
    pub problems: Vec<String>,
    pub group_size: Option<usize>,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            write!(f, "{}: valid, symmetry group of order {}", self.name, self.group_size.unwrap_or(0))
        } else {
            write!(f, "{}: invalid", self.name)?;
            for p in &self.problems {
                write!(f, "\n  - {p}")?;
            }
            Ok(())
        }
    }
}

/// The expanded symmetry group together with its action on form indices.
#[derive(Clone, Debug)]
pub struct FormAction {
    /// Group elements, sorted by permutation image and then sign.
    pub elements: Vec<SignedPerm>,
    /// `table[g][i]` is the index that form `i` is carried to by element `g`.
    pub table: Vec<Vec<usize>>,
}

impl FormAction {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Only the identity, on `d` forms.
    pub fn trivial(r: usize, d: usize) -> Self {
        FormAction { elements: vec![SignedPerm::identity(r)], table: vec![(0..d).collect()] }
    }
}

fn expand_group(c: &WeightConfig, cap: usize) -> Result<Vec<SignedPerm>, SymmetryError> {
    let id = SignedPerm::identity(c.r);
    let mut seen: BTreeSet<SignedPerm> = BTreeSet::new();
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for s in &c.symmetry_generators {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                if seen.len() > cap {
                    return Err(SymmetryError::CapExceeded { cap });
                }
                frontier.push(h);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Form indices sorted by form, for looking up images.
struct FormIndex<'a> {
    forms: &'a [Vec<i64>],
    order: Vec<usize>,
}

impl<'a> FormIndex<'a> {
    fn new(forms: &'a [Vec<i64>]) -> Self {
        let mut order: Vec<usize> = (0..forms.len()).collect();
        order.sort_by(|&a, &b| forms[a].cmp(&forms[b]).then(a.cmp(&b)));
        FormIndex { forms, order }
    }

    fn permutation(&self, g: &SignedPerm) -> Result<Vec<usize>, SymmetryError> {
        // used[k]: how many images already matched the run of equal forms starting at k.
        let mut used = vec![0usize; self.order.len()];
        let mut table = Vec::with_capacity(self.forms.len());
        for f in self.forms {
            let image = g.apply(f);
            let start = self.order.partition_point(|&i| self.forms[i] < image);
            let slot = start + used[start];
            match self.order.get(slot) {
                Some(&target) if self.forms[target] == image => {
                    used[start] += 1;
                    table.push(target);
                }
                _ => return Err(SymmetryError::NotFormPermutation(g.to_cycle_string())),
            }
        }
        Ok(table)
    }
}

/// Closes the generators under composition and tabulates the induced form permutations.
pub fn expand_symmetry(c: &WeightConfig, cap: usize) -> Result<FormAction, SymmetryError> {
    for g in &c.symmetry_generators {
        if g.perm.len() != c.r || !g.is_bijection() {
            return Err(SymmetryError::BadPermutation(g.to_cycle_string()));
        }
        c.form_permutation(g)?;
    }
    let elements = expand_group(c, cap)?;
    let index = FormIndex::new(&c.forms);
    let table = elements.iter().map(|g| index.permutation(g)).collect::<Result<Vec<_>, _>>()?;
    Ok(FormAction { elements, table })
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> WeightConfig {
        load_config("g2_a2").unwrap()
    }

    #[test]
    fn g2_swap_induces_expected_form_permutation() {
        let c = g2();
        let swap = SignedPerm::from_cycles(3, &[vec![0, 1]], 1).unwrap();
        // a1<->a2 exchanges forms 1,2 and 4,5 and fixes 3,6,7 (1-based).
        assert_eq!(c.form_permutation(&swap).unwrap(), vec![1, 0, 2, 4, 3, 5, 6]);
        let id = SignedPerm::identity(3);
        assert_eq!(c.form_permutation(&id).unwrap(), (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn g2_group_is_sym3() {
        let action = expand_symmetry(&g2(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(action.len(), 6);
        let mut sorted = action.elements.clone();
        sorted.sort();
        assert_eq!(sorted, action.elements);
        assert_eq!(action.elements[0], SignedPerm::identity(3));
    }

    #[test]
    fn every_bundled_action_preserves_forms_exactly() {
        for name in bundled_names() {
            let c = load_config(name).unwrap();
            let action = expand_symmetry(&c, DEFAULT_GROUP_CAP).unwrap();
            for (g, row) in action.elements.iter().zip(&action.table) {
                let mut hit = vec![false; c.d()];
                for (i, &j) in row.iter().enumerate() {
                    assert!(!hit[j], "{name}: table row is not a bijection");
                    hit[j] = true;
                    assert_eq!(g.apply(&c.forms[i]), c.forms[j], "{name}");
                }
            }
        }
    }

    #[test]
    fn e6_block_swap_needs_negation() {
        let c = load_config("e6_a2a2a2").unwrap();
        let swap_plus = SignedPerm::from_cycles(9, &[vec![0, 3], vec![1, 4], vec![2, 5]], 1).unwrap();
        assert!(c.form_permutation(&swap_plus).is_err());
        let swap_minus = SignedPerm { sign: -1, ..swap_plus };
        let table = c.form_permutation(&swap_minus).unwrap();
        // The first nine forms (a_i - a_j, i in block 1, j in block 2) map onto
        // themselves with the roles of i and j transposed.
        for i in 0..9 {
            assert_eq!(table[i], (i % 3) * 3 + i / 3);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = load_config("e7_a7").unwrap();
        assert_eq!(expand_symmetry(&c, 1000).unwrap_err(), SymmetryError::CapExceeded { cap: 1000 });
    }

    #[test]
    fn cycle_string_round_trip() {
        let g = SignedPerm::from_cycles(6, &[vec![0, 3], vec![1, 4, 2]], -1).unwrap();
        assert_eq!(g.to_cycle_string(), "(1 4)(2 5 3) -");
        assert_eq!(SignedPerm::identity(2).to_cycle_string(), "() +");
    }
}
