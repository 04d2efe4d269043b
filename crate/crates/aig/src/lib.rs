//! And-inverter graph library.
//!
//! The central type is [`Aig`]: a combinational circuit made of 2-input AND
//! nodes, with inversion carried on edges ([`Literal`]) rather than on nodes.
//! Construction goes through [`Aig::add_and`], which applies constant and
//! identity rules and performs structural hashing, so a graph never contains
//! two nodes with the same canonical fanin pair.
//!
//! The crate also carries the text I/O for the toolkit: a parser and writer
//! for the line-oriented BENCH netlist format ([`bench`]) and a deterministic
//! GraphML exporter ([`graphml`]).

mod error;
mod graph;
mod literal;
mod sim;
mod stats;

pub mod bench;
pub mod equiv;
pub mod graphml;

pub use error::AigError;
pub use graph::{Aig, Node};
pub use literal::Literal;
pub use sim::{exhaustive_patterns, random_patterns, SplitMix64};
pub use stats::AigStats;
pub use equiv::{check_equiv, EquivConfig, EquivVerdict};
