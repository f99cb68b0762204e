//! Exact verification toolkit for sandwich Lie algebras, sandwich groups and
//! the standard-word combinatorics used to prove their nilpotence.

pub mod hall_lie;
pub mod lattice;
pub mod lie_examples;
pub mod nilgroup;
pub mod sandwich;
pub mod words;
