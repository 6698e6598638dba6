//! Parameter learning from training graphs, the model file, and the cost of
//! sending parameters in universal mode.

use std::borrow::Cow;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::log2_binomial;
use crate::error::{Error, Result};
use crate::graph::{degree_histogram, Graph};
use crate::partition::{triangle_counts, CoderConfig, CoderId, DegreeParam, EdgeParam, SortedGraph, TriangleParam};

/// Half-count smoothing used for every learned probability.
pub const DEFAULT_ALPHA: f64 = 0.5;

const MODEL_VERSION: u32 = 1;

/// Probability mass over degrees `0..support()`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeModel {
    probs: Vec<f64>,
}

impl DegreeModel {
    pub fn from_probabilities(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("degree model needs at least one degree"));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::domain(format!("invalid degree probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("degree probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Relative frequencies of a histogram. An all-zero histogram gives the
    /// flat distribution.
    pub fn empirical(counts: &[u64]) -> Self {
        Self::smoothed(counts, 0.0)
    }

    /// `(c_k + α) / (Σc + α·len)` over `0..counts.len()`.
    pub fn smoothed(counts: &[u64], alpha: f64) -> Self {
        let total = counts.iter().sum::<u64>() as f64 + alpha * counts.len() as f64;
        let probs = if total > 0.0 {
            counts.iter().map(|&c| (c as f64 + alpha) / total).collect()
        } else {
            vec![1.0 / counts.len() as f64; counts.len()]
        };
        Self { probs }
    }

    /// Mass at `degree`; zero beyond the support.
    pub fn prob(&self, degree: usize) -> f64 {
        self.probs.get(degree).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleParams {
    /// Edge probability for a group with triangle context.
    pub p_tri: f64,
    /// Edge probability for a group without it.
    pub p_check: f64,
}

/// Ones and slots seen by the triangle coder, split by context.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCounts {
    pub context_ones: u64,
    pub context_slots: u64,
    pub free_ones: u64,
    pub free_slots: u64,
}

impl TriangleCounts {
    pub fn merge(self, other: Self) -> Self {
        Self {
            context_ones: self.context_ones + other.context_ones,
            context_slots: self.context_slots + other.context_slots,
            free_ones: self.free_ones + other.free_ones,
            free_slots: self.free_slots + other.free_slots,
        }
    }

    pub fn params(&self) -> TriangleParams {
        TriangleParams {
            p_tri: smoothed_ratio(self.context_ones, self.context_slots),
            p_check: smoothed_ratio(self.free_ones, self.free_slots),
        }
    }
}

fn smoothed_ratio(ones: u64, total: u64) -> f64 {
    (ones as f64 + 0.5) / (total as f64 + 1.0)
}

fn check_training(graphs: &[Graph]) -> Result<()> {
    if graphs.is_empty() {
        return Err(Error::domain("empty training set"));
    }
    Ok(())
}

/// Edge density over all training pairs, half-count smoothed.
pub fn learn_edge_probability(graphs: &[Graph]) -> Result<f64> {
    check_training(graphs)?;
    if let Some(g) = graphs.iter().find(|g| g.node_count() < 2) {
        return Err(Error::domain(format!("training graph with {} nodes has no pairs", g.node_count())));
    }
    let edges: u64 = graphs.iter().map(|g| g.edge_count() as u64).sum();
    let pairs: u64 = graphs.iter().map(Graph::pair_count).sum();
    Ok(smoothed_ratio(edges, pairs))
}

/// Pooled degree histogram of the training set, padded to `0..n_max`.
pub fn pooled_degree_counts(graphs: &[Graph]) -> Vec<u64> {
    let n_max = graphs.iter().map(Graph::node_count).max().unwrap_or(0);
    let mut counts = vec![0u64; n_max];
    for g in graphs {
        for (d, c) in degree_histogram(g).entries() {
            counts[d] += c;
        }
    }
    counts
}

pub fn learn_degree_distribution(graphs: &[Graph], alpha: f64) -> Result<DegreeModel> {
    check_training(graphs)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("smoothing {alpha} must be a nonnegative number")));
    }
    Ok(DegreeModel::smoothed(&pooled_degree_counts(graphs), alpha))
}

/// Context and no-context one/slot counts over canonical traversals.
pub fn learn_triangle_counts(graphs: &[Graph]) -> TriangleCounts {
    graphs
        .par_iter()
        .map(|g| triangle_counts(&SortedGraph::new(g)))
        .reduce(TriangleCounts::default, TriangleCounts::merge)
}

pub fn learn_triangle_params(graphs: &[Graph]) -> Result<TriangleParams> {
    check_training(graphs)?;
    Ok(learn_triangle_counts(graphs).params())
}

/// Bits to send an `n`-node degree histogram: `log2 C(2n-1, n)`.
pub fn histogram_header_bits(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    log2_binomial(2 * n as u64 - 1, n as u64).expect("n <= 2n - 1")
}

/// Parameter cost of a coder in universal mode.
pub fn universal_overhead(coder: CoderId, n: usize) -> f64 {
    match coder {
        CoderId::LabeledIid | CoderId::StructIid => {
            let pairs = n as u64 * (n as u64).saturating_sub(1) / 2;
            ((pairs + 1) as f64).log2()
        }
        CoderId::StructDegree => histogram_header_bits(n),
        CoderId::StructTriangle => 0.0,
    }
}

/// Density implied by a transmitted edge count, kept half a pair away from
/// 0 and 1.
pub fn universal_edge_probability(edges: u64, pairs: u64) -> f64 {
    if pairs == 0 {
        return 0.5;
    }
    let t = pairs as f64;
    (edges as f64 / t).clamp(0.5 / t, 1.0 - 0.5 / t)
}

/// Everything learned from a training set, plus the selected coder.
#[derive(Clone, Debug, PartialEq)]
pub struct TypicalModel {
    pub coder: CoderId,
    pub n_train: u64,
    edges: u64,
    pairs: u64,
    alpha: f64,
    degree_counts: Vec<u64>,
    triangle: TriangleCounts,
    degree: DegreeModel,
}

impl TypicalModel {
    /// Learns every parameter; `coder` is provisional until chosen by the
    /// caller.
    pub fn learn(graphs: &[Graph], coder: CoderId) -> Result<Self> {
        learn_edge_probability(graphs)?;
        let edges = graphs.iter().map(|g| g.edge_count() as u64).sum();
        let pairs = graphs.iter().map(Graph::pair_count).sum();
        Self::from_counts(
            coder,
            graphs.len() as u64,
            edges,
            pairs,
            DEFAULT_ALPHA,
            pooled_degree_counts(graphs),
            learn_triangle_counts(graphs),
        )
    }

    pub fn from_counts(
        coder: CoderId,
        n_train: u64,
        edges: u64,
        pairs: u64,
        alpha: f64,
        degree_counts: Vec<u64>,
        triangle: TriangleCounts,
    ) -> Result<Self> {
        if edges > pairs {
            return Err(Error::Data(format!("{edges} edges exceed {pairs} pairs")));
        }
        if degree_counts.is_empty() {
            return Err(Error::Data("degree histogram is empty".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Data(format!("smoothing {alpha} must be positive")));
        }
        if triangle.context_ones > triangle.context_slots || triangle.free_ones > triangle.free_slots {
            return Err(Error::Data("triangle ones exceed slots".into()));
        }
        let degree = DegreeModel::smoothed(&degree_counts, alpha);
        Ok(Self { coder, n_train, edges, pairs, alpha, degree_counts, triangle, degree })
    }

    /// Training edges and pairs.
    pub fn edge_counts(&self) -> (u64, u64) {
        (self.edges, self.pairs)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degree_counts(&self) -> &[u64] {
        &self.degree_counts
    }

    pub fn triangle_counts(&self) -> TriangleCounts {
        self.triangle
    }

    pub fn p(&self) -> f64 {
        smoothed_ratio(self.edges, self.pairs)
    }

    /// Largest training graph; the degree support is `0..n_max()`.
    pub fn n_max(&self) -> usize {
        self.degree_counts.len()
    }

    pub fn degree(&self) -> &DegreeModel {
        &self.degree
    }

    pub fn triangle_params(&self) -> TriangleParams {
        self.triangle.params()
    }

    /// Degree model for an `n`-node graph. Graphs larger than any training
    /// graph get the support stretched with smoothing mass only.
    pub fn degree_for(&self, n: usize) -> Cow<'_, DegreeModel> {
        if n <= self.n_max() {
            Cow::Borrowed(&self.degree)
        } else {
            let mut counts = self.degree_counts.clone();
            counts.resize(n, 0);
            Cow::Owned(DegreeModel::smoothed(&counts, self.alpha))
        }
    }

    /// A coder configured with the learned parameters, for `n`-node graphs.
    pub fn config(&self, coder: CoderId, n: usize) -> CoderConfig<'_> {
        match coder {
            CoderId::LabeledIid => CoderConfig::LabeledIid(EdgeParam::Fixed(self.p())),
            CoderId::StructIid => CoderConfig::StructIid(EdgeParam::Fixed(self.p())),
            CoderId::StructDegree => CoderConfig::Degree(DegreeParam::Fixed(self.degree_for(n))),
            CoderId::StructTriangle => CoderConfig::Triangle(TriangleParam::Fixed(self.triangle_params())),
        }
    }

    pub fn to_toml(&self) -> String {
        let file = ModelFile {
            version: MODEL_VERSION,
            coder: self.coder.name().to_string(),
            n_train: self.n_train,
            p: self.p(),
            edge: EdgeCounts { edges: self.edges, pairs: self.pairs },
            degree: DegreeCounts { alpha: self.alpha, counts: self.degree_counts.clone() },
            triangle: self.triangle,
        };
        toml::to_string(&file).expect("model file serializes")
    }

    /// Parses a model file. Probabilities are rebuilt from the stored counts;
    /// the informational `p` is not read back.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ModelFile = toml::from_str(text).map_err(|e| Error::format(format!("model file: {e}")))?;
        if file.version != MODEL_VERSION {
            return Err(Error::format(format!("unsupported model file version {}", file.version)));
        }
        Self::from_counts(
            file.coder.parse()?,
            file.n_train,
            file.edge.edges,
            file.edge.pairs,
            file.degree.alpha,
            file.degree.counts,
            file.triangle,
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    coder: String,
    n_train: u64,
    p: f64,
    edge: EdgeCounts,
    degree: DegreeCounts,
    triangle: TriangleCounts,
}

#[derive(Serialize, Deserialize)]
struct EdgeCounts {
    edges: u64,
    pairs: u64,
}

#[derive(Serialize, Deserialize)]
struct DegreeCounts {
    alpha: f64,
    counts: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_probability_examples() {
        assert_eq!(learn_edge_probability(&[Graph::complete(3)]).unwrap(), 0.875);
        let p = learn_edge_probability(&[Graph::empty(10), Graph::complete(10)]).unwrap();
        assert!((p - 45.5 / 91.0).abs() < 1e-15);
        assert!(learn_edge_probability(&[]).is_err());
        assert!(learn_edge_probability(&[Graph::empty(1)]).is_err());
    }

    #[test]
    fn degree_distribution_examples() {
        let raw = learn_degree_distribution(&[Graph::complete(3)], 0.0).unwrap();
        assert_eq!(raw.probabilities(), &[0.0, 0.0, 1.0]);
        let smooth = learn_degree_distribution(&[Graph::complete(3)], 0.5).unwrap();
        let want = [0.5 / 4.5, 0.5 / 4.5, 3.5 / 4.5];
        for (got, want) in smooth.probabilities().iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
        // Pooled counts, not an average of per-graph distributions.
        let pooled = learn_degree_distribution(&[Graph::complete(2), Graph::empty(4)], 0.0).unwrap();
        assert_eq!(pooled.probabilities(), &[4.0 / 6.0, 2.0 / 6.0, 0.0, 0.0]);
        assert!(DegreeModel::from_probabilities(vec![0.5, 0.4]).is_err());
        assert!(DegreeModel::from_probabilities(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn triangle_params_examples() {
        // No two nodes share a neighbor, so no group ever has context.
        let matching = Graph::from_edges(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        assert_eq!(learn_triangle_params(&[matching]).unwrap().p_tri, 0.5);
        // A star has no triangles but every leaf pair shares the center:
        // leaves see context groups of 3, 2 and 1 slots, all empty.
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let c = learn_triangle_counts(&[star]);
        assert_eq!((c.context_ones, c.context_slots), (0, 6));
        assert_eq!(c.params().p_tri, 0.5 / 7.0);
        // K4: the first node sees one 3-slot group without context, then
        // groups of 2 and 1 with context, all full.
        let c = learn_triangle_counts(&[Graph::complete(4)]);
        assert_eq!(c, TriangleCounts { context_ones: 3, context_slots: 3, free_ones: 3, free_slots: 3 });
        assert_eq!(c.params().p_tri, 3.5 / 4.0);
    }

    #[test]
    fn header_bits() {
        assert_eq!(histogram_header_bits(1), 0.0);
        assert!((histogram_header_bits(4) - 35f64.log2()).abs() < 1e-12);
        assert_eq!(universal_overhead(CoderId::StructTriangle, 100), 0.0);
        assert!((universal_overhead(CoderId::StructIid, 100) - 4951f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn header_bits_track_the_entropy_approximation() {
        for n in [10usize, 100, 1000] {
            let nf = n as f64;
            let q = nf / (2.0 * nf - 1.0);
            let h = -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
            // Stirling form of log2 C(N, K) with N = 2n - 1 trials.
            let approx = (2.0 * nf - 1.0) * h + 0.5 * ((2.0 * nf - 1.0) / (nf * nf)).log2();
            assert!((histogram_header_bits(n) - approx).abs() <= 2.0, "n={n}");
        }
    }

    #[test]
    fn universal_density_is_clamped() {
        assert_eq!(universal_edge_probability(0, 0), 0.5);
        assert_eq!(universal_edge_probability(0, 10), 0.05);
        assert_eq!(universal_edge_probability(10, 10), 0.95);
        assert_eq!(universal_edge_probability(3, 10), 0.3);
    }

    #[test]
    fn model_file_round_trip() {
        let graphs = [Graph::complete(4), Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap()];
        let model = TypicalModel::learn(&graphs, CoderId::StructTriangle).unwrap();
        let text = model.to_toml();
        let back = TypicalModel::from_toml(&text).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.p().to_bits(), model.p().to_bits());
        assert!(TypicalModel::from_toml(&text.replace("version = 1", "version = 2")).is_err());
        assert!(TypicalModel::from_toml("coder = 3").is_err());
    }

    #[test]
    fn support_stretches_for_larger_graphs() {
        let model = TypicalModel::learn(&[Graph::complete(3)], CoderId::StructDegree).unwrap();
        assert_eq!(model.degree_for(3).support(), 3);
        let wide = model.degree_for(6);
        assert_eq!(wide.support(), 6);
        assert!(wide.prob(5) > 0.0);
    }
}
