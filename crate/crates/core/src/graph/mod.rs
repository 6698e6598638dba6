//! Simple undirected graphs stored as packed adjacency bit rows.

mod canonical;
mod io;

use std::fmt;

pub use canonical::{canonical_order, color_refinement, sorted_matrix};
pub use io::{load_graph, parse_edge_list, parse_matrix_market, save_graph, write_edge_list, write_matrix_market, GraphFormat};

use crate::error::{Error, Result};

/// Symmetric adjacency over nodes `0..n` without self-loops.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self { n, words, bits: vec![0; n * words], edges: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Builds a graph from an edge iterator. Duplicate and reversed edges
    /// collapse; self-loops are skipped.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Data(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if u != v {
                g.add_edge(u, v);
            }
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Number of unordered node pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> u64 {
        let n = self.n as u64;
        n * n.saturating_sub(1) / 2
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Inserts `u -- v`; returns false if the edge was already present.
    ///
    /// # Panics
    /// On a self-loop or an out-of-range node.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v, "self-loop on node {u}");
        assert!(u < self.n && v < self.n, "edge ({u}, {v}) out of range");
        if self.has_edge(u, v) {
            return false;
        }
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
        self.edges += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.has_edge(u, v) {
            return false;
        }
        self.bits[u * self.words + v / 64] &= !(1 << (v % 64));
        self.bits[v * self.words + u / 64] &= !(1 << (u % 64));
        self.edges -= 1;
        true
    }

    /// Packed adjacency row of `v`; bit `u` of the row is `A[v][u]`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    /// Edges as `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Graph whose node `i` is node `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Graph {
        assert_eq!(order.len(), self.n, "order must cover every node");
        let mut position = vec![usize::MAX; self.n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        assert!(position.iter().all(|&p| p != usize::MAX), "order is not a permutation");
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(position[u], position[v]);
        }
        g
    }

    /// Graph with node `v` renamed to `relabel[v]`.
    pub fn relabeled(&self, relabel: &[usize]) -> Graph {
        let mut order = vec![usize::MAX; self.n];
        for (v, &to) in relabel.iter().enumerate() {
            order[to] = v;
        }
        self.permuted(&order)
    }

    /// Union of the edge sets of two graphs on the same node set.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.n, other.n, "union of graphs with different node counts");
        let mut g = self.clone();
        for (u, v) in other.edges() {
            g.add_edge(u, v);
        }
        g
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        degree_histogram(self)
    }

    /// Number of triangles, counted once each.
    pub fn triangle_count(&self) -> usize {
        let mut total = 0;
        for (u, v) in self.edges() {
            total += self
                .row(u)
                .iter()
                .zip(self.row(v))
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum::<usize>();
        }
        total / 3
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Number of nodes of each degree `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub counts: Vec<u64>,
}

impl DegreeHistogram {
    pub fn get(&self, degree: usize) -> u64 {
        self.counts.get(degree).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Nonzero entries as `(degree, count)`.
    pub fn entries(&self) -> Vec<(usize, u64)> {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(d, &c)| (d, c)).collect()
    }
}

pub fn degree_histogram(g: &Graph) -> DegreeHistogram {
    let mut counts = vec![0u64; g.node_count()];
    for d in g.degrees() {
        counts[d] += 1;
    }
    DegreeHistogram { counts }
}

/// Edge density `|E| / (n(n-1)/2)`.
pub fn edge_probability(g: &Graph) -> Result<f64> {
    if g.node_count() < 2 {
        return Err(Error::domain("edge probability needs at least two nodes"));
    }
    Ok(g.edge_count() as f64 / g.pair_count() as f64)
}
