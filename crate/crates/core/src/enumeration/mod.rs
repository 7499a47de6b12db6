//! Breadth-first search over closed coarsenings, up to symmetry.
//!
//! Starting from the discrete system, every stored system of positive
//! dimension is expanded by merging each pair of its blocks and closing. The
//! store is keyed by canonical form. Each level is expanded in parallel and
//! merged sequentially in a fixed order, so results do not depend on the
//! number of workers.

mod center;
mod checkpoint;
mod orders;
mod report;

pub use center::{avoiding_orders, center_subgroup, CenterInfo};
pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use orders::{order_verdicts, order_verdicts_with, OrderVerdict, VerdictReason};
pub use report::{Mode, SearchReport, Timing, REPORT_SCHEMA};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::blocks::{BlockError, BlockSystem, FormLattice};
use crate::config::{expand_symmetry, SymmetryError, WeightConfig, DEFAULT_GROUP_CAP};
use crate::lattice::{snf, Hnf, LatticeError};
use crate::scalar::Scalar;
use crate::symmetry::{CanonicalKey, Canonicalizer};
use crate::BigInt;

/// Largest stabilizer order that `avoiding_orders` enumerates element by element.
pub const ELEMENT_ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("store exceeded {0} systems; use hybrid mode")]
    MemoryBudget(usize),
    #[error("center is not cyclic (invariant factors {0:?})")]
    NonCyclicCenter(Vec<u64>),
    #[error("stabilizer of order {0} is too large to enumerate")]
    StabilizerTooLarge(u64),
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

impl From<LatticeError> for EnumerationError {
    fn from(e: LatticeError) -> Self {
        EnumerationError::Block(BlockError::Lattice(e))
    }
}

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub mode: Mode,
    /// Worker threads; 0 means the rayon default.
    pub jobs: usize,
    pub group_cap: usize,
    /// Hybrid mode: descend below the threshold from only the first seeds.
    pub limit_seeds: Option<usize>,
    /// Abort once the store holds more systems than this.
    pub max_stored: Option<usize>,
    /// Start the hybrid descent from these stored systems instead of searching.
    pub resume: Option<Vec<StoredSystem>>,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            mode: Mode::Full,
            jobs: 0,
            group_cap: DEFAULT_GROUP_CAP,
            limit_seeds: None,
            max_stored: None,
            resume: None,
        }
    }
}

/// One orbit of block systems in the store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoredSystem {
    pub key: CanonicalKey,
    pub dimension: usize,
    pub invariant_factors: Vec<u64>,
}

impl StoredSystem {
    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }
}

/// Everything an enumeration produced, before summarizing.
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Stored systems in insertion order; the first is the root.
    pub stored: Vec<StoredSystem>,
    /// Exponents of stabilizers found below the hybrid threshold.
    pub descended_exponents: BTreeSet<u64>,
    pub seeds_total: usize,
    pub seeds_processed: usize,
    pub candidates: u64,
    pub duplicates: u64,
}

struct Child<T> {
    system: BlockSystem,
    hnf: Hnf<T>,
    dimension: usize,
}

struct Engine<'a, T> {
    lat: FormLattice<T>,
    canon: &'a Canonicalizer,
}

/// The first form index in each block.
fn first_members(sys: &BlockSystem) -> Vec<usize> {
    let mut reps = vec![usize::MAX; sys.block_count()];
    for (i, &l) in sys.labels().iter().enumerate() {
        if reps[l as usize] == usize::MAX {
            reps[l as usize] = i;
        }
    }
    reps
}

/// One block pair per orbit of the group generated by `automorphisms`,
/// which act on blocks through their action on forms. Merges in one orbit
/// give systems in one symmetry orbit.
fn pair_representatives(sys: &BlockSystem, automorphisms: &[Vec<u16>]) -> Vec<(u16, u16)> {
    let k = sys.block_count();
    let pairs: Vec<(u16, u16)> = (0..k as u16).flat_map(|a| (a + 1..k as u16).map(move |b| (a, b))).collect();
    if automorphisms.is_empty() {
        return pairs;
    }
    let index = |a: u16, b: u16| {
        let (a, b) = (a.min(b) as usize, a.max(b) as usize);
        a * (2 * k - a - 1) / 2 + (b - a - 1)
    };
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let labels = sys.labels();
    let mut on_blocks = vec![0u16; k];
    for sigma in automorphisms {
        for (x, &l) in labels.iter().enumerate() {
            on_blocks[l as usize] = labels[sigma[x] as usize];
        }
        for (i, &(a, b)) in pairs.iter().enumerate() {
            let (x, y) = (find(&mut parent, i), find(&mut parent, index(on_blocks[a as usize], on_blocks[b as usize])));
            // The smaller index stays the root, so each orbit keeps its first pair.
            parent[x.max(y)] = x.min(y);
        }
    }
    (0..pairs.len()).filter(|&i| find(&mut parent, i) == i).map(|i| pairs[i]).collect()
}

fn to_u64<T: Scalar>(x: &T) -> Result<u64, EnumerationError> {
    x.to_u64().ok_or(EnumerationError::Overflow)
}

impl<'a, T: Scalar> Engine<'a, T> {
    fn factors(&self, h: &Hnf<T>) -> Result<Vec<u64>, EnumerationError> {
        snf(h.basis())?.torsion().iter().map(to_u64).collect()
    }

    /// Distinct closed children of `sys` of dimension at least `min_dim`,
    /// sorted by encoding. Children of lower dimension may be omitted.
    /// Closed coarsenings of `sys`, one per orbit of block pairs under
    /// `automorphisms` and with duplicates removed.
    fn children(
        &self,
        sys: &BlockSystem,
        h: &Hnf<T>,
        min_dim: usize,
        automorphisms: &[Vec<u16>],
    ) -> Result<(Vec<Child<T>>, u64), LatticeError> {
        let k = sys.block_count() as u64;
        let mut out: Vec<Child<T>> = Vec::new();
        let mut seen: HashSet<BlockSystem> = HashSet::new();
        // A merge either keeps the rank or lowers the dimension by one; at
        // the floor only rank-preserving merges can give a wanted child.
        let at_floor = min_dim > 0 && self.lat.r - h.rank() <= min_dim;
        let reps = if at_floor { first_members(sys) } else { Vec::new() };
        for (a, b) in pair_representatives(sys, automorphisms) {
            if at_floor && !h.spans(&self.lat.difference(reps[a as usize], reps[b as usize])?)? {
                continue;
            }
            let (system, hnf) = self.lat.merged_closure(sys, h, a, b)?;
            if seen.insert(system.clone()) {
                let dimension = self.lat.r - hnf.rank();
                out.push(Child { system, hnf, dimension });
            }
        }
        let candidates = k * k.saturating_sub(1) / 2;
        out.sort_by(|x, y| x.system.cmp(&y.system));
        Ok((out, candidates))
    }

    fn run(&self, c: &WeightConfig, opts: &EnumerateOptions) -> Result<SearchResult, EnumerationError> {
        let threshold = match opts.mode {
            Mode::Full => 0,
            Mode::Hybrid { threshold } => threshold,
        };
        let mut result = SearchResult {
            stored: Vec::new(),
            descended_exponents: BTreeSet::new(),
            seeds_total: 0,
            seeds_processed: 0,
            candidates: 0,
            duplicates: 0,
        };
        match &opts.resume {
            Some(stored) => result.stored = stored.clone(),
            None => self.breadth_first(c, threshold, opts, &mut result)?,
        }
        if let Mode::Hybrid { .. } = opts.mode {
            self.descend(threshold, opts, &mut result)?;
        }
        Ok(result)
    }

    fn breadth_first(
        &self,
        c: &WeightConfig,
        threshold: usize,
        opts: &EnumerateOptions,
        result: &mut SearchResult,
    ) -> Result<(), EnumerationError> {
        let root = BlockSystem::discrete(c.d());
        let root_hnf = self.lat.relation_hnf(&root)?;
        let mut index: HashMap<CanonicalKey, usize> = HashMap::new();
        let root_key = self.canon.canonical(&root);
        index.insert(root_key.clone(), 0);
        result.stored.push(StoredSystem {
            key: root_key,
            dimension: c.r - root_hnf.rank(),
            invariant_factors: self.factors(&root_hnf)?,
        });
        // The root is expanded as given, not through its canonical key.
        let mut frontier: Vec<(BlockSystem, Option<Hnf<T>>)> =
            if result.stored[0].dimension > 0 { vec![(root, Some(root_hnf))] } else { vec![] };

        while !frontier.is_empty() {
            let expanded: Vec<(Vec<(CanonicalKey, Child<T>)>, u64)> = frontier
                .par_iter()
                .map(|(sys, h)| {
                    let h = match h {
                        Some(h) => h.clone(),
                        None => self.lat.relation_hnf(sys)?,
                    };
                    let (_, automorphisms) = self.canon.canonical_with_automorphisms(sys);
                    let (children, candidates) = self.children(sys, &h, threshold, &automorphisms)?;
                    let keyed = children
                        .into_iter()
                        .filter(|ch| ch.dimension >= threshold)
                        .map(|ch| (self.canon.canonical(&ch.system), ch))
                        .collect();
                    Ok((keyed, candidates))
                })
                .collect::<Result<_, BlockError>>()?;

            let mut fresh: Vec<(CanonicalKey, Child<T>)> = Vec::new();
            for (keyed, candidates) in expanded {
                result.candidates += candidates;
                for (key, child) in keyed {
                    if index.contains_key(&key) {
                        result.duplicates += 1;
                        continue;
                    }
                    index.insert(key.clone(), result.stored.len() + fresh.len());
                    fresh.push((key, child));
                }
            }
            let factors: Vec<Vec<u64>> =
                fresh.par_iter().map(|(_, ch)| self.factors(&ch.hnf)).collect::<Result<_, _>>()?;
            frontier = Vec::new();
            for ((key, child), f) in fresh.into_iter().zip(factors) {
                if child.dimension > 0 {
                    frontier.push((key.clone(), None));
                }
                result.stored.push(StoredSystem {
                    key,
                    dimension: child.dimension,
                    invariant_factors: f,
                });
            }
            if let Some(limit) = opts.max_stored {
                if result.stored.len() > limit {
                    return Err(EnumerationError::MemoryBudget(limit));
                }
            }
        }
        Ok(())
    }

    /// Depth-first search below the threshold from every stored system,
    /// deduplicating only within each seed's subtree.
    fn descend(
        &self,
        threshold: usize,
        opts: &EnumerateOptions,
        result: &mut SearchResult,
    ) -> Result<(), EnumerationError> {
        if threshold == 0 {
            return Ok(());
        }
        let mut seeds: Vec<&StoredSystem> = result.stored.iter().collect();
        seeds.sort_by(|a, b| a.dimension.cmp(&b.dimension).then_with(|| a.key.cmp(&b.key)));
        result.seeds_total = seeds.len();
        if let Some(limit) = opts.limit_seeds {
            seeds.truncate(limit);
        }
        result.seeds_processed = seeds.len();
        let sets: Vec<(BTreeSet<u64>, u64)> = seeds
            .par_iter()
            .map(|s| self.descend_seed(&s.key, threshold))
            .collect::<Result<_, _>>()?;
        for (set, candidates) in sets {
            result.candidates += candidates;
            result.descended_exponents.extend(set);
        }
        Ok(())
    }

    fn descend_seed(&self, seed: &BlockSystem, threshold: usize) -> Result<(BTreeSet<u64>, u64), EnumerationError> {
        let mut exponents = BTreeSet::new();
        let mut visited: HashSet<CanonicalKey> = HashSet::new();
        let mut finite_seen: HashSet<BlockSystem> = HashSet::new();
        let mut candidates = 0;
        let h = self.lat.relation_hnf(seed)?;
        let (_, automorphisms) = self.canon.canonical_with_automorphisms(seed);
        let (first, n) = self.children(seed, &h, 0, &automorphisms)?;
        candidates += n;
        let mut stack: Vec<Child<T>> = first.into_iter().filter(|ch| ch.dimension < threshold).collect();
        stack.reverse();
        while let Some(ch) = stack.pop() {
            if ch.dimension == 0 {
                if finite_seen.insert(ch.system) {
                    exponents.insert(self.factors(&ch.hnf)?.last().copied().unwrap_or(1));
                }
                continue;
            }
            let (key, automorphisms) = self.canon.canonical_with_automorphisms(&ch.system);
            if !visited.insert(key) {
                continue;
            }
            let (children, n) = self.children(&ch.system, &ch.hnf, 0, &automorphisms)?;
            candidates += n;
            stack.extend(children.into_iter().rev());
        }
        Ok((exponents, candidates))
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, EnumerationError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| EnumerationError::Pool(e.to_string()))
}

fn search_in_pool(c: &WeightConfig, opts: &EnumerateOptions) -> Result<SearchResult, EnumerationError> {
    let action = expand_symmetry(c, opts.group_cap)?;
    let canon = Canonicalizer::new(&action);
    let fast = Engine::<i64> { lat: FormLattice::new(c), canon: &canon };
    match fast.run(c, opts) {
        Err(EnumerationError::Block(BlockError::Lattice(LatticeError::Overflow))) => {
            Engine::<BigInt> { lat: FormLattice::new(c), canon: &canon }.run(c, opts)
        }
        other => other,
    }
}

/// Runs the search with machine integers, retrying with big integers on overflow.
pub fn search(c: &WeightConfig, opts: &EnumerateOptions) -> Result<SearchResult, EnumerationError> {
    pool(opts.jobs)?.install(|| search_in_pool(c, opts))
}

/// Searches and summarizes into a report.
pub fn enumerate(c: &WeightConfig, opts: &EnumerateOptions) -> Result<SearchReport, EnumerationError> {
    let pool = pool(opts.jobs)?;
    pool.install(|| {
        let start = Instant::now();
        let result = search_in_pool(c, opts)?;
        SearchReport::build(c, opts, &result, start.elapsed().as_secs_f64(), rayon::current_num_threads())
    })
}

#[cfg(test)]
mod tests;
