//! Exact spanning tree packing with partition certificates, brute-force
//! reference oracles, seeded random graphs, and Monte Carlo campaigns
//! measuring when the packing number equals the minimum degree.

pub mod experiment;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod packing;
pub mod random;
pub mod stats;
pub mod unionfind;

pub use graph::{Edge, Graph, GraphError, Partition, Vertex};
pub use packing::{
    extract_certificate, has_k_spanning_trees, max_packing, verify_packing, Forest, PackingDefect, PackingError,
    PackingResult,
};
pub use random::{sample_gnp, sample_process, EdgePermutation, Seed};
