//! Square-tiled surfaces (origamis) and the computations around them.
//!
//! An origami of degree `d` is a pair of permutations `(h, v)` of `d` unit
//! squares: `h` sends a square to its right neighbour and `v` to the one above.
//! From there the crate computes strata, cylinder decompositions, spin parity,
//! Veech groups with their cusps, and the origami built from a dessin
//! d'enfants. Two further modules do exact polynomial identity checks for
//! hyperelliptic families and abelianization bookkeeping in braid-group
//! quotients.
//!
//! ```
//! use origami_curves::{origami::Origami, veech};
//!
//! let s2 = Origami::builtin("S2").unwrap();
//! let vg = veech::veech_group(&s2, veech::DEFAULT_ORBIT_BOUND).unwrap();
//! assert_eq!(vg.projective_index(), 6);
//! assert!(veech::equals_gamma2(&vg, &s2));
//! ```

pub mod algver;
pub mod cli;
pub mod dessin;
pub mod flatgeom;
pub mod grpcore;
pub mod gtledger;
pub mod origami;
pub mod veech;

#[cfg(doctest)]
pub mod guide;

/// Errors shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("orbit bound {bound} exceeded")]
    BoundExceeded { bound: usize },
    #[error("verification failed: {0}")]
    Verification(String),
}
