//! Sorted group-partition traversal and the coders built on it.

mod coders;
mod container;
mod events;
mod group;

use std::fmt;
use std::str::FromStr;

pub use coders::{
    configuration_codelength, decode, degree_conditional, encode_labeled_iid, encode_structure_degree,
    encode_structure_iid, encode_structure_triangle, triangle_counts, CoderConfig, DegreeParam, EdgeParam, TriangleParam,
};
pub use container::{Container, Mode};
pub use group::GroupPartition;

use crate::error::{Error, Result};
use crate::graph::{canonical_order, Graph};

/// The implemented coders, in tie-breaking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoderId {
    LabeledIid,
    StructIid,
    StructDegree,
    StructTriangle,
}

impl CoderId {
    pub const ALL: [CoderId; 4] =
        [CoderId::LabeledIid, CoderId::StructIid, CoderId::StructDegree, CoderId::StructTriangle];

    /// The three coders that discard labels.
    pub const STRUCTURE: [CoderId; 3] = [CoderId::StructIid, CoderId::StructDegree, CoderId::StructTriangle];

    pub fn to_byte(self) -> u8 {
        self as u8
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        Self::ALL
            .get(b as usize)
            .copied()
            .ok_or_else(|| Error::format(format!("unknown coder id {b}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            CoderId::LabeledIid => "labeled-iid",
            CoderId::StructIid => "struct-iid",
            CoderId::StructDegree => "degree",
            CoderId::StructTriangle => "triangle",
        }
    }
}

impl fmt::Display for CoderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoderId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::format(format!("unknown coder '{s}'")))
    }
}

/// A graph paired with the node order its sorted adjacency matrix uses.
#[derive(Clone, Debug)]
pub struct SortedGraph<'g> {
    graph: &'g Graph,
    order: Vec<usize>,
}

impl<'g> SortedGraph<'g> {
    /// Uses the canonical order, so codelengths do not depend on labels.
    pub fn new(graph: &'g Graph) -> Self {
        Self { order: canonical_order(graph), graph }
    }

    /// Uses a caller-chosen order. It must be a permutation; whether it is a
    /// valid traversal (every node taken from the first group) is checked
    /// when coding.
    pub fn with_order(graph: &'g Graph, order: Vec<usize>) -> Result<Self> {
        let n = graph.node_count();
        let mut seen = vec![false; n];
        if order.len() != n || !order.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true)) {
            return Err(Error::contract("order is not a permutation of the nodes"));
        }
        Ok(Self { graph, order })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted_matrix(&self) -> Graph {
        self.graph.permuted(&self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coder_ids() {
        for id in CoderId::ALL {
            assert_eq!(CoderId::from_byte(id.to_byte()).unwrap(), id);
            assert_eq!(id.name().parse::<CoderId>().unwrap(), id);
        }
        assert!(CoderId::from_byte(4).is_err());
        assert!("zip".parse::<CoderId>().is_err());
    }

    #[test]
    fn orders_must_be_permutations() {
        let g = Graph::empty(3);
        assert!(SortedGraph::with_order(&g, vec![0, 1]).is_err());
        assert!(SortedGraph::with_order(&g, vec![0, 1, 1]).is_err());
        assert!(SortedGraph::with_order(&g, vec![2, 0, 1]).is_ok());
    }
}
