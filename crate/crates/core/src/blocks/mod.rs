//! Block systems on the eigenvalue indices and the torus subgroups that
//! stabilize them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::WeightConfig;
use crate::lattice::{hnf, quotient_group, FinAbGroup, GroupElement, Hnf, LatticeError, Matrix, SnfResult};
use crate::scalar::{widen, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("block system has {got} indices, config has {expected} forms")]
    WrongLength { expected: usize, got: usize },
    #[error("coordinates violate base relation {row} modulo {n}")]
    RelationViolated { row: usize, n: i64 },
    #[error("modulus must be positive, got {0}")]
    BadModulus(i64),
}

/// A set partition of the form indices, stored as a restricted-growth string.
///
/// `labels[i]` is the block of index `i`; blocks are numbered in order of
/// first appearance, so equal partitions have equal encodings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u16>", into = "Vec<u16>")]
pub struct BlockSystem {
    labels: Vec<u16>,
}

impl BlockSystem {
    /// Every index in its own block.
    pub fn discrete(d: usize) -> Self {
        BlockSystem { labels: (0..d as u16).collect() }
    }

    pub fn one_block(d: usize) -> Self {
        BlockSystem { labels: vec![0; d] }
    }

    /// Re-encodes arbitrary labels as a restricted-growth string.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut seen: HashMap<L, u16> = HashMap::new();
        let labels = labels
            .iter()
            .map(|l| {
                let next = seen.len() as u16;
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        BlockSystem { labels }
    }

    /// Builds from 1-based blocks; indices not mentioned become singletons.
    pub fn from_blocks(d: usize, blocks: &[&[usize]]) -> Self {
        let mut raw: Vec<usize> = (0..d).map(|i| d + i).collect();
        for (k, b) in blocks.iter().enumerate() {
            for &i in b.iter() {
                raw[i - 1] = k;
            }
        }
        Self::from_labels(&raw)
    }

    pub(crate) fn from_rgs_unchecked(labels: Vec<u16>) -> Self {
        BlockSystem { labels }
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// 0-based members of each block, blocks in label order, members increasing.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Merges blocks `a` and `b`.
    pub fn merge(&self, a: u16, b: u16) -> Self {
        let raw: Vec<u16> = self.labels.iter().map(|&l| if l == b { a } else { l }).collect();
        Self::from_labels(&raw)
    }

    /// True if every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &BlockSystem) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut image: Vec<Option<u16>> = vec![None; self.block_count()];
        self.labels.iter().zip(&other.labels).all(|(&s, &o)| {
            let slot = &mut image[s as usize];
            *slot.get_or_insert(o) == o
        })
    }
}

impl TryFrom<Vec<u16>> for BlockSystem {
    type Error = String;

    fn try_from(labels: Vec<u16>) -> Result<Self, String> {
        let b = BlockSystem::from_labels(&labels);
        if b.labels == labels {
            Ok(b)
        } else {
            Err("labels are not a restricted-growth string".into())
        }
    }
}

impl From<BlockSystem> for Vec<u16> {
    fn from(b: BlockSystem) -> Vec<u16> {
        b.labels
    }
}

impl fmt::Debug for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Prints 1-based blocks, e.g. `{{1,2},{3}}`.
impl fmt::Display for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{{{}}}", blocks.join(","))
    }
}

/// Forms and base relations of a config converted to one scalar type.
#[derive(Clone, Debug)]
pub struct FormLattice<T> {
    pub r: usize,
    pub base: Vec<Vec<T>>,
    pub forms: Vec<Vec<T>>,
}

impl<T: Scalar> FormLattice<T> {
    pub fn new(c: &WeightConfig) -> Self {
        FormLattice {
            r: c.r,
            base: c.base_relations.iter().map(|v| widen(v)).collect(),
            forms: c.forms.iter().map(|v| widen(v)).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.forms.len()
    }

    pub(crate) fn difference(&self, i: usize, j: usize) -> Result<Vec<T>, LatticeError> {
        self.forms[i].iter().zip(&self.forms[j]).map(|(a, b)| a.try_sub(b)).collect()
    }

    fn check(&self, b: &BlockSystem) -> Result<(), BlockError> {
        if b.len() != self.d() {
            return Err(BlockError::WrongLength { expected: self.d(), got: b.len() });
        }
        Ok(())
    }

    /// Base relations, then `f_i - f_j` for consecutive members of each block.
    pub fn relations(&self, b: &BlockSystem) -> Result<Matrix<T>, BlockError> {
        self.check(b)?;
        let mut m = Matrix::from_rows(self.r, &self.base)?;
        for block in b.blocks() {
            for w in block.windows(2) {
                m.push_row(&self.difference(w[0], w[1])?)?;
            }
        }
        Ok(m)
    }

    pub fn relation_hnf(&self, b: &BlockSystem) -> Result<Hnf<T>, BlockError> {
        Ok(hnf(&self.relations(b)?)?)
    }

    /// Groups forms whose difference lies in the lattice `h`.
    pub fn closure_under(&self, h: &Hnf<T>) -> Result<BlockSystem, LatticeError> {
        let labels = self.group_residues(h, 0..self.d())?;
        Ok(BlockSystem { labels })
    }

    /// Labels, in first-seen order, grouping the given forms by their
    /// residue modulo `h`.
    fn group_residues(&self, h: &Hnf<T>, forms: impl Iterator<Item = usize>) -> Result<Vec<u16>, LatticeError> {
        let r = self.r;
        let mut residues: Vec<T> = Vec::new();
        let mut current = vec![T::zero(); r];
        let mut labels = Vec::new();
        for i in forms {
            h.reduce_into(&self.forms[i], &mut current)?;
            let found = residues.chunks_exact(r).position(|c| c == current.as_slice());
            labels.push(match found {
                Some(l) => l as u16,
                None => {
                    residues.extend_from_slice(&current);
                    (residues.len() / r - 1) as u16
                }
            });
        }
        Ok(labels)
    }

    /// Closure of a coarsening of `sys` whose relation lattice `h` contains
    /// that of `sys`. Blocks of `sys` stay together, so one member each is
    /// reduced.
    fn closure_from(&self, sys: &BlockSystem, h: &Hnf<T>) -> Result<BlockSystem, LatticeError> {
        let mut first = vec![usize::MAX; sys.block_count()];
        for (i, &l) in sys.labels.iter().enumerate() {
            if first[l as usize] == usize::MAX {
                first[l as usize] = i;
            }
        }
        let merged = self.group_residues(h, first.into_iter())?;
        // Blocks are numbered by first appearance, so this stays first-seen order.
        Ok(BlockSystem { labels: sys.labels.iter().map(|&l| merged[l as usize]).collect() })
    }

    pub fn closure(&self, b: &BlockSystem) -> Result<BlockSystem, BlockError> {
        let h = self.relation_hnf(b)?;
        Ok(self.closure_under(&h)?)
    }

    /// Merges blocks `a` and `b` of a system whose relation lattice is `h`
    /// and closes the result.
    pub fn merged_closure(
        &self,
        sys: &BlockSystem,
        h: &Hnf<T>,
        a: u16,
        b: u16,
    ) -> Result<(BlockSystem, Hnf<T>), LatticeError> {
        let ia = sys.labels.iter().position(|&l| l == a).expect("block a is present");
        let ib = sys.labels.iter().position(|&l| l == b).expect("block b is present");
        let child = h.extend(&self.difference(ia, ib)?)?;
        let closed = self.closure_from(sys, &child)?;
        Ok((closed, child))
    }

    /// Closures of all pairwise block merges, deduplicated and sorted.
    pub fn coarsenings(&self, b: &BlockSystem) -> Result<Vec<BlockSystem>, BlockError> {
        let h = self.relation_hnf(b)?;
        let k = b.block_count() as u16;
        let mut out = Vec::new();
        for x in 0..k {
            for y in x + 1..k {
                out.push(self.merged_closure(b, &h, x, y)?.0);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn stabilizer(&self, b: &BlockSystem) -> Result<StabilizerInfo<T>, BlockError> {
        let relations = self.relations(b)?;
        Ok(StabilizerInfo::from_relations(self.r, relations)?)
    }

    /// Values `f_i(coords) mod n`.
    pub fn form_values(&self, n: &T, coords: &[T]) -> Result<Vec<T>, BlockError> {
        if coords.len() != self.r {
            return Err(LatticeError::Dimension { expected: self.r, got: coords.len() }.into());
        }
        self.forms.iter().map(|f| Ok(dot(f, coords)?.mod_floor(n))).collect()
    }

    pub fn block_system_of(&self, n: &T, coords: &[T]) -> Result<BlockSystem, BlockError> {
        if !n.is_positive() {
            return Err(BlockError::BadModulus(n.to_i64().unwrap_or(0)));
        }
        if coords.len() != self.r {
            return Err(LatticeError::Dimension { expected: self.r, got: coords.len() }.into());
        }
        for (row, rel) in self.base.iter().enumerate() {
            if !dot(rel, coords)?.mod_floor(n).is_zero() {
                return Err(BlockError::RelationViolated { row, n: n.to_i64().unwrap_or(0) });
            }
        }
        let values = self.form_values(n, coords)?;
        Ok(BlockSystem::from_labels(&values.iter().collect::<Vec<_>>()))
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> Result<T, LatticeError> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc.try_add(&x.try_mul(y)?)?;
    }
    Ok(acc)
}

/// The stabilizer of a block system as the dual of `Z^r / relations`.
#[derive(Clone, Debug)]
pub struct StabilizerInfo<T> {
    pub relations: Matrix<T>,
    pub dimension: usize,
    /// Torsion part, dual to the torsion of the relation quotient.
    pub torsion: FinAbGroup<T>,
    /// Largest invariant factor, 1 when the torsion is trivial.
    pub exponent_raw: T,
    pub finite: bool,
    pub snf: SnfResult<T>,
}

impl<T: Scalar> StabilizerInfo<T> {
    pub fn from_relations(r: usize, relations: Matrix<T>) -> Result<Self, LatticeError> {
        let q = quotient_group(r, &relations)?;
        Ok(StabilizerInfo {
            dimension: q.free_rank,
            exponent_raw: q.group.exponent(),
            finite: q.free_rank == 0,
            torsion: q.group,
            snf: q.snf,
            relations,
        })
    }

    /// Invariant factors of the torsion part.
    pub fn invariant_factors(&self) -> &[T] {
        self.torsion.invariant_factors()
    }

    /// Torsion coordinates of the torus point `num / den`.
    ///
    /// Returns `None` when the point is not in the stabilizer. Coordinate `i`
    /// is `d_i * (V^-1 a)_i mod d_i`, where `V` is the right transform of the
    /// Smith form; free directions are ignored.
    pub fn coords_of(&self, num: &[T], den: &T) -> Result<Option<GroupElement<T>>, LatticeError> {
        let b = self.snf.right_inverse.apply(num)?;
        let mut coords = Vec::new();
        for (i, d) in self.snf.divisors.iter().enumerate().take(self.snf.rank) {
            let t = d.try_mul(&b[i])?;
            if !t.is_multiple_of(den) {
                return Ok(None);
            }
            if !d.is_one() {
                coords.push((t / den.clone()).mod_floor(d));
            }
        }
        Ok(Some(GroupElement::new(coords)))
    }

    /// A torus point `num / den` with the given torsion coordinates and zero free part.
    pub fn point_of(&self, x: &GroupElement<T>) -> Result<(Vec<T>, T), LatticeError> {
        let den = self.exponent_raw.clone();
        let mut b = vec![T::zero(); self.snf.right.cols()];
        let mut k = 0;
        for (i, d) in self.snf.divisors.iter().enumerate().take(self.snf.rank) {
            if !d.is_one() {
                b[i] = x.coords[k].try_mul(&(den.clone() / d.clone()))?;
                k += 1;
            }
        }
        Ok((self.snf.right.apply(&b)?, den))
    }
}

fn fast_or_big<R>(
    c: &WeightConfig,
    f: impl Fn(&FormLattice<i64>) -> Result<R, BlockError>,
    g: impl Fn(&FormLattice<crate::BigInt>) -> Result<R, BlockError>,
) -> Result<R, BlockError> {
    match f(&FormLattice::new(c)) {
        Err(BlockError::Lattice(LatticeError::Overflow)) => g(&FormLattice::new(c)),
        other => other,
    }
}

/// Stabilizer of `b`, with arbitrary-precision entries.
pub fn stabilizer(c: &WeightConfig, b: &BlockSystem) -> Result<StabilizerInfo<crate::BigInt>, BlockError> {
    FormLattice::new(c).stabilizer(b)
}

/// The coarsest system with the same stabilizer as `b`.
pub fn closure(c: &WeightConfig, b: &BlockSystem) -> Result<BlockSystem, BlockError> {
    fast_or_big(c, |l| l.closure(b), |l| l.closure(b))
}

/// Closures of every pairwise merge of blocks of `b`, deduplicated.
pub fn coarsenings(c: &WeightConfig, b: &BlockSystem) -> Result<Vec<BlockSystem>, BlockError> {
    fast_or_big(c, |l| l.coarsenings(b), |l| l.coarsenings(b))
}

/// The partition of indices by equal eigenvalue `f_i(coords) / n`.
pub fn block_system_of(c: &WeightConfig, n: i64, coords: &[i64]) -> Result<BlockSystem, BlockError> {
    let nn = crate::BigInt::from(n);
    let cs: Vec<crate::BigInt> = widen(coords);
    fast_or_big(c, |l| l.block_system_of(&n, coords), |l| l.block_system_of(&nn, &cs))
}
