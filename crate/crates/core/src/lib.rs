//! Training graph neural networks on random path graphs obtained by
//! linearizing random spanning trees.
//!
//! The crate covers spanning-tree samplers ([`spanning`]), depth-first
//! linearization ([`linearize`]), effective resistances ([`resistance`]),
//! the winner-takes-all sequential classifier ([`wta`]), a dense GCN
//! ([`gnn`]), the training loop ([`trainer`]), smoothing and squashing
//! diagnostics ([`diagnostics`]) and dataset handling ([`io`]).

pub mod diagnostics;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod io;
pub mod linearize;
pub mod resistance;
pub mod rng;
pub mod spanning;
pub mod stats;
pub mod trainer;
pub mod wta;

pub use error::{Error, Result};
pub use graph::{Graph, Labels, Split, Topology};
pub use rng::RngStream;
