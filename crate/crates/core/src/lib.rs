//! Exact computer algebra for small quantum homology over Novikov
//! coefficients: valuation arithmetic, quantum products from 3-point
//! invariant tables, Seidel elements and their classifier, spectral-descent
//! verdicts with certified asymptotics, filtered Morse spectral numbers, and
//! identity checking for Hamiltonian fibrations over the sphere.
//!
//! Everything is exact rational arithmetic; there is no floating point in
//! the engine.

pub mod data;
pub mod descent;
pub mod fibration;
pub mod gallery;
pub mod linalg;
pub mod morse;
pub mod novikov;
pub mod qring;
pub mod rat;
pub mod report;
pub mod seidel;
pub mod slice;

pub use novikov::{NovikovScalar, Valuation};
pub use qring::{ManifoldData, QElement};
pub use rat::Rat;
