//! Exact arithmetic for realized groups: prime-power fields, matrices over
//! them, and permutations in cycle notation.

mod field;
mod matrix;
mod perm;

pub use field::{FieldElem, FieldEmbedding, FiniteField, MAX_EXTENSION_DEGREE};
pub use matrix::MatrixFq;
pub use perm::{perm_parse, Cycle, Permutation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} is outside 1..={MAX_EXTENSION_DEGREE}")]
    BadDegree(u32),
    #[error("field of order {p}^{e} is too large")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("no monic irreducible polynomial of degree {e} over F_{p} found")]
    NoIrreducible { p: u64, e: u32 },
    #[error("modulus polynomial is not monic irreducible of the stated degree")]
    BadModulus,
    #[error("coefficient {0} is not reduced modulo p")]
    BadCoefficient(u64),
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("cycle notation error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("images do not form a permutation of 0..{0}")]
    NotBijection(usize),
}
