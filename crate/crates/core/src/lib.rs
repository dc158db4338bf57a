//! Symbolic computation of the Zariski (Markov) topology on countable abelian
//! groups.
//!
//! The closed sets of this topology are finite unions of cosets `a + G[n]` of
//! torsion subgroups. This crate represents groups by structural descriptors
//! and computes with those cosets exactly: lattice operations, irreducible
//! decompositions, dimension, closures of described infinite sets, density
//! verdicts, and numeric realizations of closures by characters into a torus.

pub mod arith;
pub mod closed;
pub mod config;
pub mod error;
pub mod coset;
pub mod group;
pub mod oracle;
pub mod realize;
pub mod sets;

pub use error::{Error, Result};
pub use group::{Cardinal, Coord, Element, GroupDescriptor, Summand, Value};
