//! Exact integer lattices: Hermite and Smith normal forms, lattice membership,
//! and finite abelian groups in invariant-factor coordinates.

mod group;
mod hnf;
mod matrix;
mod snf;

pub use group::{
    cyclic_contains, divide_element, element_order, quotient_group, FinAbGroup, GroupElement,
    Quotient,
};
pub use hnf::{hnf, lattice_contains, Hnf};
pub use matrix::Matrix;
pub use snf::{snf, SnfResult};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("fixed-width integer overflow")]
    Overflow,
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("element is not reduced in the group")]
    NotReduced,
}

/// Runs `f` on `i64`, retrying on `BigInt` if the fixed-width pass overflowed.
///
/// `g` converts the `BigInt` result back into the caller's output type.
pub fn with_fallback<R, F, G>(fast: F, slow: G) -> Result<R, LatticeError>
where
    F: FnOnce() -> Result<R, LatticeError>,
    G: FnOnce() -> Result<R, LatticeError>,
{
    match fast() {
        Err(LatticeError::Overflow) => slow(),
        other => other,
    }
}
