use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{EnumerationError, StoredSystem, ELEMENT_ENUMERATION_LIMIT};
use crate::blocks::{dot, BlockSystem, FormLattice, StabilizerInfo};
use crate::config::WeightConfig;
use crate::lattice::{cyclic_contains, element_order, FinAbGroup, Matrix};
use crate::BigInt;

/// Scalars of the coordinate torus: the stabilizer `C` of the one-block
/// system, together with the kernel `K` of the action (points on which every
/// form vanishes). The center proper is `C / K`.
#[derive(Clone, Debug)]
pub struct CenterInfo {
    pub group: FinAbGroup<BigInt>,
    /// Torus points `num / den`, one per invariant factor of `group`.
    pub generators: Vec<(Vec<BigInt>, BigInt)>,
    pub kernel_order: u64,
    /// `|C| / |K|`.
    pub order: u64,
    /// Whether `C / K` is cyclic.
    pub cyclic: bool,
    /// Points of `C` outside `K`, over the common denominator `den`.
    nontrivial: Vec<Vec<i64>>,
    den: i64,
}

fn to_u64(x: &BigInt) -> Result<u64, EnumerationError> {
    x.to_u64().ok_or(EnumerationError::Overflow)
}

fn to_i64(x: &BigInt) -> Result<i64, EnumerationError> {
    x.to_i64().ok_or(EnumerationError::Overflow)
}

/// Order of the torus point `num / den` modulo the kernel of the action.
fn image_order(lat: &FormLattice<BigInt>, num: &[BigInt], den: &BigInt) -> Result<BigInt, EnumerationError> {
    let mut order = BigInt::from(1);
    for f in &lat.forms {
        let v = dot(f, num)?.mod_floor(den);
        order = order.lcm(&(den / den.gcd(&v)));
    }
    Ok(order)
}

pub fn center_subgroup(c: &WeightConfig) -> Result<CenterInfo, EnumerationError> {
    let lat = FormLattice::<BigInt>::new(c);
    let one = lat.stabilizer(&BlockSystem::one_block(c.d()))?;
    let mut kernel_rows = Matrix::from_rows(c.r, &lat.base)?;
    for f in &lat.forms {
        kernel_rows.push_row(f)?;
    }
    let kernel = StabilizerInfo::from_relations(c.r, kernel_rows)?;
    let kernel_order = to_u64(&kernel.torsion.order())?;
    let c_order = to_u64(&one.torsion.order())?;

    let mut generators = Vec::new();
    for k in 0..one.invariant_factors().len() {
        let mut e = one.torsion.identity();
        e.coords[k] = BigInt::from(1);
        generators.push(one.point_of(&e)?);
    }
    let den = one.exponent_raw.clone();
    let mut nontrivial = Vec::new();
    let mut max_image = BigInt::from(1);
    for x in one.torsion.elements() {
        let (num, _) = one.point_of(&x)?;
        let o = image_order(&lat, &num, &den)?;
        if o > max_image {
            max_image = o.clone();
        }
        if !o.is_zero() && o != BigInt::from(1) {
            nontrivial.push(num.iter().map(to_i64).collect::<Result<_, _>>()?);
        }
    }
    let order = c_order / kernel_order.max(1);
    Ok(CenterInfo {
        group: one.torsion,
        generators,
        kernel_order,
        order,
        cyclic: to_u64(&max_image)? == order,
        nontrivial,
        den: to_i64(&den)?,
    })
}

fn divisors(n: u64) -> impl Iterator<Item = u64> {
    (1..=n).filter(move |k| n % k == 0)
}

/// Orders of elements of finite stabilizers that do not power to a
/// non-identity central element.
pub fn avoiding_orders(
    c: &WeightConfig,
    center: &CenterInfo,
    finite: &[&StoredSystem],
) -> Result<BTreeSet<u64>, EnumerationError> {
    if center.order == 1 {
        return Ok(finite.iter().flat_map(|s| divisors(s.exponent())).collect());
    }
    if !center.cyclic {
        let f = center.group.invariant_factors().iter().map(to_u64).collect::<Result<_, _>>()?;
        return Err(EnumerationError::NonCyclicCenter(f));
    }
    let lat = FormLattice::<i64>::new(c);
    let sets: Vec<BTreeSet<u64>> = finite
        .par_iter()
        .map(|s| stabilizer_avoiding(&lat, center, &s.key))
        .collect::<Result<_, _>>()?;
    Ok(sets.into_iter().flatten().collect())
}

fn stabilizer_avoiding(
    lat: &FormLattice<i64>,
    center: &CenterInfo,
    key: &BlockSystem,
) -> Result<BTreeSet<u64>, EnumerationError> {
    let s = lat.stabilizer(key)?;
    let size = s.torsion.order();
    if size as u64 > ELEMENT_ENUMERATION_LIMIT {
        return Err(EnumerationError::StabilizerTooLarge(size as u64));
    }
    let zs = center
        .nontrivial
        .iter()
        .map(|num| {
            s.coords_of(num, &center.den)?
                .ok_or(EnumerationError::Block(crate::blocks::BlockError::Lattice(
                    crate::lattice::LatticeError::NotReduced,
                )))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = BTreeSet::new();
    for x in s.torsion.elements() {
        let o = element_order(&s.torsion, &x)? as u64;
        if out.contains(&o) {
            continue;
        }
        let mut hits = false;
        for z in &zs {
            if cyclic_contains(&s.torsion, &x, z)? {
                hits = true;
                break;
            }
        }
        if !hits {
            out.insert(o);
        }
    }
    Ok(out)
}
