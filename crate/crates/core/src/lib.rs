//! Exact finite kernels for hypergraph regularity with 0–1 densities.
//!
//! Everything here works over finite k-partite relations `R ⊆ V_1 × … × V_k`
//! equipped with weighted counting measures whose weights are exact rationals.
//! Masses are accumulated as integer ticks of a common denominator and every
//! comparison against a threshold is done exactly; no floating point enters a
//! verdict.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel harnesses live in the `vcreg` companion crate.
//!
//! Module map:
//!
//! * [`hypergraph`], [`measure`]: relations, fibers, boxes, product measures.
//! * [`vc`]: VC dimension, shatter function, Sauer bounds, epsilon-nets.
//! * [`regularity`]: Δ-approximation, rectangular approximation, regular
//!   partitions with 0–1 densities and the dense-box finder.
//! * [`stable`]: ladders, goodness, descent partitions and Σ-free partitions.
//! * [`counterexamples`]: the odd-split dyadic graph, the convexity
//!   3-hypergraph and a bounded homogeneous-set search.
//! * [`instances`]: seeded generators with known structure.

#![no_std]
#![deny(unused_must_use)]

extern crate alloc;

pub mod bits;
pub mod counterexamples;
pub mod error;
pub mod hypergraph;
pub mod instances;
pub mod measure;
pub mod rational;
pub mod regularity;
pub mod stable;
pub mod vc;

pub use error::{Error, Result};
pub use hypergraph::{BinaryView, Fiber, Hypergraph, ProductBox};
pub use measure::{Measure, ProductMeasure};
pub use rational::Rational;
