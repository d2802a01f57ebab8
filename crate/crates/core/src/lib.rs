//! Controllability analysis of structural networks.
//!
//! The pipeline runs from a weighted connectivity matrix to a binary
//! [`StructuralNetwork`](network::StructuralNetwork), then asks four
//! questions about it:
//!
//! * how many independent signals does it need ([`matching`]),
//! * how much energy does a given input set cost ([`gramian`]),
//! * how far is the farthest node from its nearest input ([`lcc`]),
//! * how densely is it woven from three-node motifs ([`motif`]).
//!
//! [`sweep`] and [`report`] run every region as a single input and
//! aggregate the answers; [`cli`] exposes all of it as the `ctrlchain`
//! binary.
//!
//! ```
//! use ctrlchain::network::StructuralNetwork;
//! use ctrlchain::lcc::lcc;
//!
//! // 1 -> 2, 2 -> 3, 2 -> 4, 4 -> 5 (0-based below)
//! let g = StructuralNetwork::from_arcs(5, [(0, 1), (1, 2), (1, 3), (3, 4)])?;
//! assert_eq!(lcc(&g, &[0, 2])?, Some(3));
//! assert_eq!(lcc(&g, &[0, 3])?, Some(2));
//! # Ok::<(), ctrlchain::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod expm;
pub mod gramian;
mod ids;
pub mod lcc;
pub mod matching;
pub mod motif;
pub mod network;
pub mod report;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ingest.md")]
    mod ingest {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/gramian.md")]
    mod gramian {}
    #[doc = include_str!("../../../book/src/lcc.md")]
    mod lcc {}
    #[doc = include_str!("../../../book/src/motifs.md")]
    mod motifs {}
    #[doc = include_str!("../../../book/src/sweep.md")]
    mod sweep {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
