//! Integer scalars usable by the exact lattice routines.
//!
//! Every routine in [`crate::lattice`] is generic over [`Scalar`]. Fixed-width
//! types (`i64`, `i128`) are driven through checked arithmetic and surface
//! [`LatticeError::Overflow`](crate::lattice::LatticeError::Overflow) instead of
//! wrapping; `BigInt` never overflows. Hot loops run on `i64` and retry on
//! `BigInt` when a fixed-width pass overflows.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::lattice::LatticeError;

/// An exact signed integer type.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Signed
    + Integer
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
{
    fn from_i64(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("every scalar type holds an i64")
    }

    fn try_add(&self, other: &Self) -> Result<Self, LatticeError> {
        self.checked_add(other).ok_or(LatticeError::Overflow)
    }

    fn try_sub(&self, other: &Self) -> Result<Self, LatticeError> {
        self.checked_sub(other).ok_or(LatticeError::Overflow)
    }

    fn try_mul(&self, other: &Self) -> Result<Self, LatticeError> {
        self.checked_mul(other).ok_or(LatticeError::Overflow)
    }

    /// `self - q * other`, checked.
    fn try_sub_mul(&self, q: &Self, other: &Self) -> Result<Self, LatticeError> {
        self.try_sub(&q.try_mul(other)?)
    }

    fn try_neg(&self) -> Result<Self, LatticeError> {
        Self::zero().try_sub(self)
    }
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + Display
        + Eq
        + Ord
        + Hash
        + Send
        + Sync
        + 'static
        + Zero
        + One
        + Signed
        + Integer
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
{
}

/// Converts between scalar types, failing when the value does not fit.
pub fn convert<A: Scalar, B: Scalar>(v: &A) -> Result<B, LatticeError> {
    if let Some(x) = v.to_i64() {
        return Ok(<B as Scalar>::from_i64(x));
    }
    if let Some(x) = v.to_i128() {
        return B::from_i128(x).ok_or(LatticeError::Overflow);
    }
    B::from_str_radix(&v.to_string(), 10).map_err(|_| LatticeError::Overflow)
}

/// Widens a slice of `i64` into any scalar type.
pub fn widen<B: Scalar>(v: &[i64]) -> Vec<B> {
    v.iter().map(|&x| <B as Scalar>::from_i64(x)).collect()
}
