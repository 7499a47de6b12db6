//! Torus elements of a given order up to symmetry, and the search for roots
//! `y` with `y^a = x` of order `a * n` that stabilize the same subspaces.
//!
//! Elements are taken modulo the kernel `K` of the action (the points on
//! which every form vanishes), so orders are orders of the image in the group
//! acting on the module. A point of image order `n` has coordinates in
//! `(1/N) Z` with `N = n * exp(K)`; its eigenvalues are `f_i(coords) / N`.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks::{BlockError, BlockSystem, FormLattice, StabilizerInfo};
use crate::config::{expand_symmetry, FormAction, SymmetryError, WeightConfig, DEFAULT_GROUP_CAP};
use crate::lattice::{LatticeError, Matrix};

/// Default ceiling on the number of coordinate vectors scanned.
pub const DEFAULT_POINT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("scanning {points} points exceeds the budget of {budget}")]
    BudgetExceeded { points: u128, budget: u64 },
    #[error("the forms do not span: the kernel of the action is infinite")]
    InfiniteKernel,
    #[error("order and multiplier must be positive (n = {n}, a = {a})")]
    BadArgument { n: u64, a: u64 },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

impl From<LatticeError> for WitnessError {
    fn from(e: LatticeError) -> Self {
        WitnessError::Block(BlockError::Lattice(e))
    }
}

/// A symmetry class of torus elements of image order `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementClass {
    pub n: u64,
    /// Coordinates are over this denominator, `n * exp(K)`.
    pub modulus: i64,
    /// Lexicographically least coordinates in the class.
    pub coords: Vec<i64>,
    /// `f_i(coords) mod modulus`.
    pub eigenvalues: Vec<i64>,
    pub block_system: BlockSystem,
    pub dimension: usize,
    pub invariant_factors: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOutcome {
    pub class: ElementClass,
    pub a: u64,
    pub found: bool,
    /// `(coords, denominator)` of the witness, in lowest terms.
    pub witness: Option<(Vec<i64>, i64)>,
    /// Candidate roots examined.
    pub candidates: u64,
}

/// Shared data for element searches on one config.
pub struct WitnessContext {
    pub config: WeightConfig,
    pub action: FormAction,
    lat: FormLattice<i64>,
    /// Points of `K` over the denominator `kernel_exponent`.
    kernel: Vec<Vec<i64>>,
    pub kernel_exponent: i64,
    pub point_budget: u64,
}

fn to_i64(x: &num_bigint::BigInt) -> Result<i64, WitnessError> {
    num_traits::ToPrimitive::to_i64(x).ok_or(WitnessError::Block(BlockError::Lattice(LatticeError::Overflow)))
}

fn image_order(values: &[i64], modulus: i64) -> i64 {
    let g = values.iter().fold(modulus, |g, v| g.gcd(v));
    modulus / g
}

impl WitnessContext {
    pub fn new(c: &WeightConfig) -> Result<Self, WitnessError> {
        Self::with_cap(c, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(c: &WeightConfig, cap: usize) -> Result<Self, WitnessError> {
        let action = expand_symmetry(c, cap)?;
        let big = FormLattice::<num_bigint::BigInt>::new(c);
        let mut rows = Matrix::from_rows(c.r, &big.base)?;
        for f in &big.forms {
            rows.push_row(f)?;
        }
        let k = StabilizerInfo::from_relations(c.r, rows)?;
        if !k.finite {
            return Err(WitnessError::InfiniteKernel);
        }
        let kernel_exponent = to_i64(&k.exponent_raw)?;
        let mut kernel = Vec::new();
        for e in k.torsion.elements() {
            let (num, den) = k.point_of(&e)?;
            let scale = to_i64(&(k.exponent_raw.clone() / den))?;
            kernel.push(
                num.iter()
                    .map(|x| Ok((to_i64(x)? * scale).rem_euclid(kernel_exponent)))
                    .collect::<Result<_, WitnessError>>()?,
            );
        }
        Ok(WitnessContext {
            config: c.clone(),
            action,
            lat: FormLattice::new(c),
            kernel,
            kernel_exponent,
            point_budget: DEFAULT_POINT_BUDGET,
        })
    }

    pub fn kernel_order(&self) -> usize {
        self.kernel.len()
    }

    fn eigenvalues(&self, coords: &[i64], modulus: i64) -> Vec<i64> {
        self.lat
            .forms
            .iter()
            .map(|f| f.iter().zip(coords).map(|(a, b)| a * b).sum::<i64>().rem_euclid(modulus))
            .collect()
    }

    /// True if no symmetry image of `coords` is lexicographically smaller.
    fn is_coordinate_minimal(&self, coords: &[i64], modulus: i64, scratch: &mut [i64]) -> bool {
        for g in &self.action.elements {
            for (i, &x) in coords.iter().enumerate() {
                scratch[g.perm[i]] = (g.sign as i64 * x).rem_euclid(modulus);
            }
            if scratch[..] < coords[..] {
                return false;
            }
        }
        true
    }

    /// Least symmetry image of an eigenvalue vector; equal for two points
    /// exactly when they are related by symmetry modulo `K`.
    fn class_key(&self, ev: &[i64]) -> Vec<i64> {
        let mut best: Option<Vec<i64>> = None;
        let mut w = vec![0; ev.len()];
        for t in &self.action.table {
            for (i, &j) in t.iter().enumerate() {
                w[j] = ev[i];
            }
            if best.as_ref().map_or(true, |b| w < *b) {
                best = Some(w.clone());
            }
        }
        best.unwrap_or_else(|| ev.to_vec())
    }

    /// All symmetry classes of elements of image order exactly `n`, sorted by coordinates.
    pub fn enumerate_elements(&self, n: u64) -> Result<Vec<ElementClass>, WitnessError> {
        if n == 0 {
            return Err(WitnessError::BadArgument { n, a: 1 });
        }
        let modulus = n as i64 * self.kernel_exponent;
        let r = self.config.r;
        let points = (modulus as u128).pow(r as u32);
        if points > self.point_budget as u128 {
            return Err(WitnessError::BudgetExceeded { points, budget: self.point_budget });
        }
        // Split the scan on the first coordinate.
        let found: Vec<Vec<(Vec<i64>, Vec<i64>)>> = (0..modulus)
            .into_par_iter()
            .map(|first| {
                let mut out = Vec::new();
                let mut coords = vec![0i64; r];
                coords[0] = first;
                let mut scratch = vec![0i64; r];
                loop {
                    if self.satisfies_base(&coords, modulus) && self.is_coordinate_minimal(&coords, modulus, &mut scratch) {
                        let ev = self.eigenvalues(&coords, modulus);
                        if image_order(&ev, modulus) == n as i64 {
                            out.push((self.class_key(&ev), coords.clone()));
                        }
                    }
                    let mut i = r;
                    loop {
                        if i == 1 {
                            return out;
                        }
                        i -= 1;
                        coords[i] += 1;
                        if coords[i] < modulus {
                            break;
                        }
                        coords[i] = 0;
                    }
                }
            })
            .collect();
        let mut classes: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        for (key, coords) in found.into_iter().flatten() {
            classes.entry(key).or_insert(coords);
        }
        let mut reps: Vec<Vec<i64>> = classes.into_values().collect();
        reps.sort();
        reps.into_par_iter()
            .map(|coords| self.element_class(n, modulus, coords))
            .collect()
    }

    fn satisfies_base(&self, coords: &[i64], modulus: i64) -> bool {
        self.lat
            .base
            .iter()
            .all(|rel| rel.iter().zip(coords).map(|(a, b)| a * b).sum::<i64>().rem_euclid(modulus) == 0)
    }

    /// Builds the class record of a point of image order `n` over `modulus`.
    pub fn element_class(&self, n: u64, modulus: i64, coords: Vec<i64>) -> Result<ElementClass, WitnessError> {
        let eigenvalues = self.eigenvalues(&coords, modulus);
        let block_system = BlockSystem::from_labels(&eigenvalues);
        let s = self.lat.stabilizer(&block_system)?;
        Ok(ElementClass {
            n,
            modulus,
            coords,
            eigenvalues,
            dimension: s.dimension,
            invariant_factors: s.invariant_factors().to_vec(),
            block_system,
        })
    }

    /// Searches the stabilizer of `x`'s block system for `y` with
    /// `a * y = x` modulo `K`, of image order `a * n`.
    pub fn witness_search(&self, x: &ElementClass, a: u64) -> Result<WitnessOutcome, WitnessError> {
        if a == 0 || x.n == 0 {
            return Err(WitnessError::BadArgument { n: x.n, a });
        }
        let s = self.lat.stabilizer(&x.block_system)?;
        let ai = a as i64;
        let n_big = x.modulus;
        let kscale = n_big / self.kernel_exponent;
        let dmax = s.exponent_raw;
        // Roots live over the denominator a * N * exp(torsion of S).
        let m = ai * n_big * dmax;
        let rank = s.snf.rank;
        let cols = self.config.r;
        let mut candidates = 0u64;
        for k in &self.kernel {
            let target: Vec<i64> = x.coords.iter().zip(k).map(|(c, kk)| c + kk * kscale).collect();
            let beta = s.snf.right_inverse.apply(&target)?;
            // Per-coordinate choices for b = V^-1 y, as numerators over m.
            let mut choices: Vec<Vec<i64>> = Vec::with_capacity(cols);
            let mut solvable = true;
            for (i, &bi) in beta.iter().enumerate() {
                if i < rank {
                    let d = s.snf.divisors[i];
                    let t = d * bi;
                    if t.rem_euclid(n_big) != 0 {
                        return Err(WitnessError::Block(BlockError::Lattice(LatticeError::NotReduced)));
                    }
                    let c = (t / n_big).rem_euclid(d);
                    // Solve a * c' = c (mod d).
                    let g = ai.gcd(&d);
                    if c % g != 0 {
                        solvable = false;
                        break;
                    }
                    let step = d / g;
                    let base = if step == 1 { 0 } else { (c / g) * mod_inverse(ai / g, step) % step };
                    choices.push((0..g).map(|j| (base + j * step) * (m / d)).collect());
                } else {
                    // Free direction: (beta_i + j) / a.
                    choices.push((0..ai).map(|j| (bi + j * n_big) * dmax).collect());
                }
            }
            if !solvable {
                continue;
            }
            let mut idx = vec![0usize; cols];
            loop {
                candidates += 1;
                let b: Vec<i64> = (0..cols).map(|i| choices[i][idx[i]]).collect();
                let y: Vec<i64> = s.snf.right.apply(&b)?.iter().map(|v| v.rem_euclid(m)).collect();
                if self.verify_witness(x, a, &y, m) {
                    let g = y.iter().fold(m, |g, v| g.gcd(v));
                    let witness = Some((y.iter().map(|v| v / g).collect(), m / g));
                    return Ok(WitnessOutcome { class: x.clone(), a, found: true, witness, candidates });
                }
                let mut i = cols;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < choices[i].len() {
                        break;
                    }
                    idx[i] = 0;
                }
                if idx.iter().all(|&v| v == 0) {
                    break;
                }
            }
        }
        Ok(WitnessOutcome { class: x.clone(), a, found: false, witness: None, candidates })
    }

    /// Direct check from coordinates: `y = coords / m` satisfies the base
    /// relations, `a * y = x` modulo `K`, has image order `a * n`, and the
    /// same block system as `x`.
    pub fn verify_witness(&self, x: &ElementClass, a: u64, coords: &[i64], m: i64) -> bool {
        if m <= 0 || !self.satisfies_base(coords, m) {
            return false;
        }
        let ev = self.eigenvalues(coords, m);
        let l = m.lcm(&x.modulus);
        let (sy, sx) = (l / m, l / x.modulus);
        let powers_to_x = ev
            .iter()
            .zip(&x.eigenvalues)
            .all(|(y, xv)| (y * sy * a as i64 - xv * sx).rem_euclid(l) == 0);
        powers_to_x
            && image_order(&ev, m) == a as i64 * x.n as i64
            && BlockSystem::from_labels(&ev) == x.block_system
    }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let e = a.rem_euclid(m).extended_gcd(&m);
    e.x.rem_euclid(m)
}

/// Aggregate witness results for one `(n, a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub config: String,
    pub n: u64,
    pub a: u64,
    pub class_count: usize,
    pub witnessed_count: usize,
    pub all_witnessed: bool,
    pub failing: Vec<ElementClass>,
    /// `m * max(exponents_raw)`, when known.
    pub exponent_bound: Option<u64>,
    /// Whether `a * n` exceeds the bound, so that each witness proves its class good.
    pub conclusive: Option<bool>,
    /// `gcd(n, bad primes) != 1`.
    pub bad_prime_caveat: bool,
    #[serde(skip)]
    pub outcomes: Vec<WitnessOutcome>,
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "config      {}", self.config)?;
        writeln!(f, "order       {}  multiplier {}  root order {}", self.n, self.a, self.n * self.a)?;
        writeln!(f, "classes     {}", self.class_count)?;
        writeln!(f, "witnessed   {}", self.witnessed_count)?;
        writeln!(f, "all         {}", if self.all_witnessed { "yes" } else { "no" })?;
        if let (Some(b), Some(c)) = (self.exponent_bound, self.conclusive) {
            writeln!(f, "bound       m*max exponent = {b}; a*n {} it", if c { "exceeds" } else { "does not exceed" })?;
        }
        if self.bad_prime_caveat {
            writeln!(f, "note        n shares a prime with the bad primes")?;
        }
        for x in &self.failing {
            let coords: Vec<String> = x.coords.iter().map(|c| c.to_string()).collect();
            writeln!(f, "failing     ({}) / {}  dim {}", coords.join(", "), x.modulus, x.dimension)?;
        }
        Ok(())
    }
}

/// Enumerates classes of image order `n` and runs the witness search on each.
pub fn witness_report(
    ctx: &WitnessContext,
    n: u64,
    a: u64,
    exponent_bound: Option<u64>,
) -> Result<WitnessReport, WitnessError> {
    let classes = ctx.enumerate_elements(n)?;
    let outcomes: Vec<WitnessOutcome> =
        classes.par_iter().map(|x| ctx.witness_search(x, a)).collect::<Result<_, _>>()?;
    let failing: Vec<ElementClass> = outcomes.iter().filter(|o| !o.found).map(|o| o.class.clone()).collect();
    Ok(WitnessReport {
        config: ctx.config.name.clone(),
        n,
        a,
        class_count: outcomes.len(),
        witnessed_count: outcomes.len() - failing.len(),
        all_witnessed: failing.is_empty(),
        failing,
        exponent_bound,
        conclusive: exponent_bound.map(|b| a * n > b),
        bad_prime_caveat: ctx.config.bad_primes.iter().any(|p| n.gcd(p) != 1),
        outcomes,
    })
}

/// Convenience wrapper building the context and a worker pool.
pub fn witness_report_for(
    c: &WeightConfig,
    n: u64,
    a: u64,
    exponent_bound: Option<u64>,
    jobs: usize,
) -> Result<WitnessReport, WitnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| WitnessError::Pool(e.to_string()))?;
    pool.install(|| witness_report(&WitnessContext::new(c)?, n, a, exponent_bound))
}

#[cfg(test)]
mod tests;
