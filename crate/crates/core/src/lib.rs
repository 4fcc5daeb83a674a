//! Combinatorics of supports of localizing subcategories in the bootstrap
//! category of C*-algebras over a finite totally ordered space, and their
//! noncrossing-partition models.
//!
//! * [`space`]: intervals of `{1..n}` and the maximal boxes `B_Y`.
//! * [`supports`]: support tuples, the closure equation, enumeration.
//! * [`ncp`]: noncrossing partitions, refinement order, Kreweras complement.
//! * [`correspondence`]: the bijection `psi` with `NC_{n+1}` and the
//!   multi-prime product lattice.
//! * [`lattice`]: a generic explicit finite-lattice engine.

pub mod correspondence;
pub mod error;
pub mod lattice;
pub mod ncp;
pub mod space;
pub mod supports;

pub use correspondence::{
    box_union_meet, interval_to_two_block, ncp_lattice, plocal_lattice, product_lattice, psi, psi_inverse,
    separating_decomposition, union_join, TwoBlockDecomposition,
};
pub use error::{Error, Result};
pub use lattice::{are_isomorphic, is_self_dual, Distributivity, FiniteLattice};
pub use ncp::{catalan, enumerate_ncp, is_noncrossing, kreweras_complement, refinement_leq, NoncrossingPartition};
pub use space::{box_parity, BoxTable, Interval, MaximalBox, Parity, Space};
pub use supports::{
    brute_force_valid_plocal, enumerate_valid_plocal, is_valid, is_valid_plocal, supp_of_group, tuple_from_generators,
    u_from_v, v_from_u, FgGroup, Limits, PLocalTuple, PrimeLabel, SpectrumSet, SupportTuple,
};
