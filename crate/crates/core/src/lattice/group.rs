
use super::{snf, LatticeError, Matrix, SnfResult};
use crate::scalar::Scalar;

/// Finite abelian group `Z/d_1 x ... x Z/d_t` with `d_1 | d_2 | ... | d_t`, each `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAbGroup<T> {
    invariant_factors: Vec<T>,
    /// Column `i` maps an ambient vector to coordinate `i` (reduced mod `d_i`).
    basis_map: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> GroupElement<T> {
    pub fn new(coords: Vec<T>) -> Self {
        GroupElement { coords }
    }
}

impl<T: Scalar> FinAbGroup<T> {
    /// A group given directly by invariant factors, with the identity as basis map.
    /// Unit factors are dropped.
    pub fn from_factors(factors: &[T]) -> Result<Self, LatticeError> {
        let kept: Vec<T> = factors.iter().filter(|d| !d.is_one()).cloned().collect();
        for w in kept.windows(2) {
            debug_assert!(w[1].is_multiple_of(&w[0]), "not a divisibility chain");
        }
        let basis_map = Matrix::identity(kept.len());
        Ok(FinAbGroup { invariant_factors: kept, basis_map })
    }

    pub fn trivial(ambient: usize) -> Self {
        FinAbGroup { invariant_factors: Vec::new(), basis_map: Matrix::zeros(ambient, 0) }
    }

    pub fn invariant_factors(&self) -> &[T] {
        &self.invariant_factors
    }

    pub fn basis_map(&self) -> &Matrix<T> {
        &self.basis_map
    }

    pub fn order(&self) -> T {
        self.invariant_factors.iter().fold(T::one(), |acc, d| acc * d.clone())
    }

    /// Largest invariant factor, or 1 for the trivial group.
    pub fn exponent(&self) -> T {
        self.invariant_factors.last().cloned().unwrap_or_else(T::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn identity(&self) -> GroupElement<T> {
        GroupElement::new(vec![T::zero(); self.invariant_factors.len()])
    }

    /// Image of an ambient vector in invariant-factor coordinates.
    pub fn map_ambient(&self, v: &[T]) -> Result<GroupElement<T>, LatticeError> {
        let raw = self.basis_map.left_apply(v)?;
        Ok(self.reduce(&raw))
    }

    pub fn reduce(&self, coords: &[T]) -> GroupElement<T> {
        GroupElement::new(
            coords.iter().zip(&self.invariant_factors).map(|(c, d)| c.mod_floor(d)).collect(),
        )
    }

    pub fn add(&self, x: &GroupElement<T>, y: &GroupElement<T>) -> GroupElement<T> {
        let sum: Vec<T> = x.coords.iter().zip(&y.coords).map(|(a, b)| a.clone() + b.clone()).collect();
        self.reduce(&sum)
    }

    pub fn scale(&self, k: &T, x: &GroupElement<T>) -> GroupElement<T> {
        let v: Vec<T> = x.coords.iter().map(|a| a.clone() * k.clone()).collect();
        self.reduce(&v)
    }

    fn check(&self, x: &GroupElement<T>) -> Result<(), LatticeError> {
        if x.coords.len() != self.invariant_factors.len() {
            return Err(LatticeError::Dimension {
                expected: self.invariant_factors.len(),
                got: x.coords.len(),
            });
        }
        let ok = x
            .coords
            .iter()
            .zip(&self.invariant_factors)
            .all(|(c, d)| !c.is_negative() && c < d);
        if ok {
            Ok(())
        } else {
            Err(LatticeError::NotReduced)
        }
    }

    /// Every element, in lexicographic coordinate order.
    pub fn elements(&self) -> Elements<'_, T> {
        Elements { factors: &self.invariant_factors, next: Some(self.identity()) }
    }
}

pub struct Elements<'a, T> {
    factors: &'a [T],
    next: Option<GroupElement<T>>,
}

impl<'a, T: Scalar> Iterator for Elements<'a, T> {
    type Item = GroupElement<T>;

    fn next(&mut self) -> Option<GroupElement<T>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.coords.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ.coords[i] = succ.coords[i].clone() + T::one();
            if succ.coords[i] < self.factors[i] {
                self.next = Some(succ);
                break;
            }
            succ.coords[i] = T::zero();
        }
        Some(current)
    }
}

/// `Z^r / rowspan(relations)` split into a free rank and a torsion group.
#[derive(Clone, Debug)]
pub struct Quotient<T> {
    pub free_rank: usize,
    pub group: FinAbGroup<T>,
    pub snf: SnfResult<T>,
}

pub fn quotient_group<T: Scalar>(r: usize, relations: &Matrix<T>) -> Result<Quotient<T>, LatticeError> {
    if relations.cols() != r {
        return Err(LatticeError::Dimension { expected: r, got: relations.cols() });
    }
    let s = snf(relations)?;
    let mut factors = Vec::new();
    let mut columns = Vec::new();
    for (i, d) in s.divisors.iter().enumerate().take(s.rank) {
        if !d.is_one() {
            factors.push(d.clone());
            columns.push(i);
        }
    }
    let mut basis_map = Matrix::zeros(r, columns.len());
    for (k, &c) in columns.iter().enumerate() {
        for i in 0..r {
            basis_map[(i, k)] = s.right[(i, c)].clone();
        }
    }
    Ok(Quotient {
        free_rank: r - s.rank,
        group: FinAbGroup { invariant_factors: factors, basis_map },
        snf: s,
    })
}

/// Least `k >= 1` with `k * x = 0`.
pub fn element_order<T: Scalar>(g: &FinAbGroup<T>, x: &GroupElement<T>) -> Result<T, LatticeError> {
    g.check(x)?;
    Ok(x.coords.iter().zip(g.invariant_factors()).fold(T::one(), |acc, (c, d)| {
        acc.lcm(&(d.clone() / d.gcd(c)))
    }))
}

/// All `y` with `a * y = x`, in lexicographic order.
pub fn divide_element<T: Scalar>(
    g: &FinAbGroup<T>,
    a: &T,
    x: &GroupElement<T>,
) -> Result<Vec<GroupElement<T>>, LatticeError> {
    g.check(x)?;
    let mut per_coord: Vec<Vec<T>> = Vec::with_capacity(x.coords.len());
    for (c, d) in x.coords.iter().zip(g.invariant_factors()) {
        let gcd = a.gcd(d);
        if !c.is_multiple_of(&gcd) {
            return Ok(Vec::new());
        }
        let step = d.clone() / gcd.clone();
        let inv = mod_inverse(&(a.clone() / gcd.clone()), &step);
        let base = (c.clone() / gcd.clone() * inv).mod_floor(&step);
        let mut sols = Vec::new();
        let mut k = T::zero();
        while k < gcd {
            sols.push(base.clone() + k.clone() * step.clone());
            k = k + T::one();
        }
        per_coord.push(sols);
    }
    let mut out = vec![GroupElement::new(Vec::new())];
    for sols in per_coord {
        out = out
            .into_iter()
            .flat_map(|e| {
                sols.iter().map(move |s| {
                    let mut c = e.coords.clone();
                    c.push(s.clone());
                    GroupElement::new(c)
                })
            })
            .collect();
    }
    Ok(out)
}

/// True iff `z` lies in the cyclic subgroup generated by `x`.
pub fn cyclic_contains<T: Scalar>(
    g: &FinAbGroup<T>,
    x: &GroupElement<T>,
    z: &GroupElement<T>,
) -> Result<bool, LatticeError> {
    g.check(x)?;
    g.check(z)?;
    // k must satisfy k*x_i = z_i (mod d_i) for every i; merge the congruences.
    let (mut res, mut modulus) = (T::zero(), T::one());
    for ((xi, zi), d) in x.coords.iter().zip(&z.coords).zip(g.invariant_factors()) {
        let gcd = xi.gcd(d);
        if !zi.is_multiple_of(&gcd) {
            return Ok(false);
        }
        let m = d.clone() / gcd.clone();
        let r = if m.is_one() {
            T::zero()
        } else {
            (zi.clone() / gcd.clone() * mod_inverse(&(xi.clone() / gcd), &m)).mod_floor(&m)
        };
        match crt(&res, &modulus, &r, &m) {
            Some((nr, nm)) => {
                res = nr;
                modulus = nm;
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Inverse of `a` modulo `m` (`a` and `m` coprime, `m >= 1`).
fn mod_inverse<T: Scalar>(a: &T, m: &T) -> T {
    if m.is_one() {
        return T::zero();
    }
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Solves `k = r1 (mod m1)`, `k = r2 (mod m2)`.
fn crt<T: Scalar>(r1: &T, m1: &T, r2: &T, m2: &T) -> Option<(T, T)> {
    let e = m1.extended_gcd(m2);
    let g = e.gcd;
    let diff = r2.clone() - r1.clone();
    if !diff.is_multiple_of(&g) {
        return None;
    }
    let lcm = m1.clone() / g.clone() * m2.clone();
    let step = m2.clone() / g.clone();
    let t = (diff / g * e.x).mod_floor(&step);
    Some(((r1.clone() + m1.clone() * t).mod_floor(&lcm), lcm))
}
