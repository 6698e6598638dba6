//! Lossless coding of unlabeled, undirected graphs and graph anomaly detection
//! by atypicality.
//!
//! Four coders are provided, all built on the same sorted group-partition
//! traversal:
//!
//! * labeled iid: every adjacency bit is Bernoulli(p), node labels are kept;
//! * structure iid: group one-counts are binomial, labels are discarded;
//! * degree: each node's degree is coded from a degree distribution, then the
//!   placement of its new edges among the groups is coded uniformly;
//! * triangle: group one-counts are binomial with a probability chosen by
//!   whether the group closes a triangle with an already coded node.
//!
//! Every coder can report an ideal codelength (sum of `-log2 p`) and produce a
//! real, decodable arithmetic-coded bitstream.

pub mod anomaly;
pub mod entropy;
pub mod error;
pub mod generators;
pub mod graph;
pub mod model;
pub mod partition;

pub use error::{Error, Result};
pub use graph::Graph;
pub use partition::{CoderConfig, CoderId, SortedGraph};
