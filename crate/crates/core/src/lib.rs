//! Finite-level models of the pillow space.
//!
//! The pillow space is the inverse limit of the substitution rule that cuts
//! the unit square into nine sub-squares and doubles the central one, the two
//! copies being glued along their common boundary. Every tile of the `n`-th
//! replacement complex is addressed by a word of length `n` over a ten-letter
//! alphabet, and this crate works entirely with those words:
//!
//! * [`rule`]: letters, words, exact triadic geometry, the flip group, sheets
//!   and projections.
//! * [`graph`]: the dual replacement graphs `G_n`, exact face adjacency, a
//!   brute-force chain oracle, BFS metrics and self-similar subgraphs.
//! * [`measure`]: tile measures, the singular x-pushforward, doubling and
//!   dimension estimates, measure blowups.
//! * [`modulus`]: certified discrete p-modulus of crossing families.
//! * [`metric`]: metric tables, flip symmetrization, blowups, quasisymmetry
//!   profiles, Lipschitz-quotient and covering checks, Poincaré diagnostics.
//! * [`cli`]: the `pillow` command-line tool.

pub mod cli;
pub mod error;
pub mod graph;
pub mod measure;
pub mod metric;
pub mod modulus;
pub mod report;
pub mod rule;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{CentralEdgePolicy, EdgeType, ReplacementGraph, Side};
pub use rule::{Alphabet, GroupElement, Letter, TriadicSquare, Word};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
