//! Semicharacter groups of finite groups.
//!
//! A semicharacter of a finite group `G` is a function `G -> C*` that is
//! multiplicative on every commuting pair. They form a finite abelian group
//! `Ĝ`, computed here exactly as the quotient of `Z^|G|` by the lattice
//! spanned by `e_i + e_j - e_k` over commuting pairs `g_i g_j = g_k`.
//!
//! Semicharacters are stored additively: each value is a residue in `Q/Z`,
//! the exponent of `exp(2πi·v)`. Nothing here is ever evaluated in floating
//! point.
//!
//! Layout:
//! - [`group`]: multiplication tables, element orders, commuting pairs, l-parts.
//! - [`algebra`]: prime-power fields, matrices over them, permutations.
//! - [`families`]: realized groups (cyclic, symmetric, GL(2,q), ...).
//! - [`zlattice`]: Smith normal form and modular nullspaces.
//! - [`engine`]: the relation lattice and `Ĝ` itself.
//! - [`constructions`]: explicit semicharacter families with certified bounds.
//! - [`io`]: group files and run reports.

pub mod algebra;
pub mod constructions;
pub mod engine;
pub mod families;
pub mod group;
pub mod io;
pub mod numtheory;
pub mod par;
pub mod residue;
pub mod zlattice;

pub use engine::{Semicharacter, SemicharGroupDesc};
pub use group::GroupTable;
pub use residue::Residue;
