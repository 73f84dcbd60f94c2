//! Exact-arithmetic kernel for lifting diagrams of finite Boolean
//! ⟨∨,0⟩-semilattices by diagrams of pseudo-simplicial partially ordered
//! rational vector spaces, with respect to the compact-ideal functor.
//!
//! Everything here computes over arbitrary-precision rationals; there is no
//! floating point and no tolerance anywhere. The crate is `no_std` (with
//! `alloc`); IO, file formats and the command-line front end live in the
//! companion `dimlift` crate.
//!
//! The main entry points are:
//!
//! * [`poset::Poset::dismantle`] — dismantling-order search on finite posets,
//! * [`boolsem::SemDiagram`] — functorial diagrams of Boolean semilattices,
//! * [`genfact::gen`] — the canonical λ-generic construction and its
//!   factorization routines,
//! * [`lift::dislift`] — pseudo-simplicial lifting of diagrams indexed by a
//!   dismantlable poset, together with [`lift::verify_lifting`],
//! * [`oracle::fm_solve`] — exact Fourier–Motzkin feasibility, used to
//!   machine-check the negative results (non-liftable instances).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitset;
pub mod boolsem;
pub mod error;
pub mod genfact;
pub mod harness;
pub mod lift;
pub mod matrix;
pub mod oracle;
pub mod poset;
pub mod pss;
pub mod rational;
pub mod refine;
pub mod rng;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use matrix::RatMatrix;
pub use rational::Rational;
pub use rng::Rng;
