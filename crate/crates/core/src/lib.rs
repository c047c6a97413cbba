//! Large caps in the affine space `AG(n, p)` from digit sets.
//!
//! A pair of digit sets `(D, D')` over `Z_p` defines the point set of all
//! vectors in `D^n` in which every fixed digit `d ∈ D'` occurs exactly
//! `n / |D|` times. The pair is *admissible* when that set is a cap (no
//! three collinear points) for every admissible `n`. This crate decides
//! admissibility exactly, emits checkable certificates, builds and
//! brute-force verifies the caps, and searches for the largest admissible
//! digit sets.
//!
//! Module map:
//!
//! * [`zp`]: prime moduli, digit-set pairs, line equations and their
//!   equivalence classes, affine normalization of digit sets.
//! * [`progressions`]: weighted progressions `P_b(D)` and the
//!   frequency-balance constraint system.
//! * [`reducibility`]: the digit and matrix reduction tests with traces.
//! * [`cone`]: exact cone-triviality via rational phase-one simplex, with
//!   dual/primal certificates and a brute-force integer oracle.
//! * [`capset`]: cap enumeration, verification, size formulas and bound
//!   constants.
//! * [`search`]: candidate enumeration, the admissibility pipeline and
//!   checkpointed maximality sweeps.
//! * [`equivalence`]: affine classification of digit sets.

pub mod capset;
pub mod cone;
pub mod equivalence;
mod error;
pub mod json;
pub mod linalg;
pub mod progressions;
pub mod reducibility;
pub mod render;
pub mod search;
pub mod zp;

pub use error::{CapError, Result};
