pub mod blocks;
pub mod config;
pub mod enumeration;
pub mod lattice;
pub mod reports;
pub mod scalar;
pub mod symmetry;
pub mod witness;

pub use num_bigint::BigInt;
pub use scalar::Scalar;

/// Arbitrary-precision integer matrix.
pub type IntMatrix = lattice::Matrix<BigInt>;
/// Machine-word matrix used by the enumeration hot paths.
pub type SmallMatrix = lattice::Matrix<i64>;
