//! Exact local and topological pressure for nonlinear energies on one-sided
//! subshifts of finite type.
//!
//! Every Borel set handled here is a finite union of cylinders, every point
//! is eventually periodic, and every energy is a polynomial of finitely many
//! cylinder-function integrals. Under those restrictions the infima and
//! suprema in the cover pressures `p1..p4`, the separated-set sum `P_n` and
//! the spanning-set sum `Q_n` become finite optimisation problems, which this
//! crate solves exactly (branch-and-bound over atoms of the join).
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the experiment
//! runner and parallel scheduling live in the `nlpress` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod cover;
pub mod cylinder;
pub mod energy;
pub mod entropy;
mod error;
pub mod expsum;
pub mod factor;
pub mod join;
pub mod measure;
pub mod pressure;
pub mod rational;
pub mod setcover;
pub mod subshift;
pub mod transport;
pub mod variational;

pub use cover::{Cover, IteratedJoin, Partition};
pub use cylinder::CylSet;
pub use energy::{CylinderFunction, EnergyFunctional, Polynomial};
pub use error::{Error, Result};
pub use expsum::ExpSum;
pub use measure::{AtomicMeasure, MarkovMeasure, Measure};
pub use subshift::{Dyadic, PointRep, Subshift, Word};

/// Exact rationals used for weights, energies and transport costs.
pub type Rational = num_rational::BigRational;
