//! Countable abelian groups given by structural descriptors, and their
//! finitely supported elements.

mod cardinal;
mod descriptor;
mod element;

pub use cardinal::Cardinal;
pub use descriptor::{GroupDescriptor, TorsionIrreducibility};
pub use element::{Coord, Element, Summand, Value};

#[cfg(test)]
mod tests;
