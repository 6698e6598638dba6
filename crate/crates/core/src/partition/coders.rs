//! The four graph coders and their decoders.

use std::borrow::Cow;

use crate::entropy::{Bitstream, CodeLength, KtCounter};
use crate::error::{Error, Result};
use crate::graph::{degree_histogram, Graph};
use crate::model::{universal_edge_probability, DegreeModel, TriangleCounts, TriangleParams};
use crate::partition::events::{Channel, Event, Meter, StreamDecoder, StreamEncoder};
use crate::partition::{CoderId, GroupPartition, SortedGraph};

/// Edge probability source for the two iid coders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeParam {
    Fixed(f64),
    /// The exact edge count is sent first and the clamped density is used.
    Universal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DegreeParam<'a> {
    Fixed(Cow<'a, DegreeModel>),
    /// The graph's own degree histogram is sent first and used as the model.
    Universal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TriangleParam {
    Fixed(TriangleParams),
    /// Two KT counters, updated after every group.
    Adaptive,
}

/// A coder together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum CoderConfig<'a> {
    LabeledIid(EdgeParam),
    StructIid(EdgeParam),
    Degree(DegreeParam<'a>),
    Triangle(TriangleParam),
}

impl<'a> CoderConfig<'a> {
    pub fn id(&self) -> CoderId {
        match self {
            CoderConfig::LabeledIid(_) => CoderId::LabeledIid,
            CoderConfig::StructIid(_) => CoderId::StructIid,
            CoderConfig::Degree(_) => CoderId::StructDegree,
            CoderConfig::Triangle(_) => CoderId::StructTriangle,
        }
    }

    /// The self-contained variant of a coder: parameters travel in the
    /// stream or are estimated sequentially.
    pub fn universal(id: CoderId) -> CoderConfig<'static> {
        match id {
            CoderId::LabeledIid => CoderConfig::LabeledIid(EdgeParam::Universal),
            CoderId::StructIid => CoderConfig::StructIid(EdgeParam::Universal),
            CoderId::StructDegree => CoderConfig::Degree(DegreeParam::Universal),
            CoderId::StructTriangle => CoderConfig::Triangle(TriangleParam::Adaptive),
        }
    }

    pub fn is_universal(&self) -> bool {
        matches!(
            self,
            CoderConfig::LabeledIid(EdgeParam::Universal)
                | CoderConfig::StructIid(EdgeParam::Universal)
                | CoderConfig::Degree(DegreeParam::Universal)
                | CoderConfig::Triangle(TriangleParam::Adaptive)
        )
    }

    /// Ideal codelength of `sorted`, header included.
    pub fn measure(&self, sorted: &SortedGraph<'_>) -> Result<CodeLength> {
        let mut meter = Meter::default();
        let out = self.drive(&mut meter, Side::Encode(sorted))?;
        Ok(CodeLength { ideal_bits: meter.ideal_bits(), header_bits: out.header_bits, actual_bits: None })
    }

    /// Produces a decodable stream together with both codelengths.
    pub fn encode(&self, sorted: &SortedGraph<'_>) -> Result<(CodeLength, Bitstream)> {
        let mut enc = StreamEncoder::default();
        let out = self.drive(&mut enc, Side::Encode(sorted))?;
        let ideal_bits = enc.ideal_bits();
        let stream = enc.finish();
        let length = CodeLength { ideal_bits, header_bits: out.header_bits, actual_bits: Some(stream.len()) };
        Ok((length, stream))
    }

    /// Reconstructs the sorted adjacency matrix (the exact graph for the
    /// labeled coder) of an `n`-node graph.
    pub fn decode(&self, n: usize, stream: &Bitstream) -> Result<Graph> {
        let mut dec = StreamDecoder::new(stream);
        let out = self.drive(&mut dec, Side::Decode(n))?;
        Ok(out.graph.expect("decoding yields a graph"))
    }

    fn drive<C: Channel>(&self, ch: &mut C, side: Side<'_, '_>) -> Result<Driven> {
        match self {
            CoderConfig::LabeledIid(param) => drive_labeled(*param, ch, side),
            _ => drive_structure(self, ch, side),
        }
    }

    /// Decodes and also returns, per step, the count of edges from the
    /// node being decoded to already decoded nodes. Empty for the labeled
    /// coder.
    pub fn decoder_trace(&self, n: usize, stream: &Bitstream) -> Result<(Graph, Vec<usize>)> {
        let mut dec = StreamDecoder::new(stream);
        let out = self.drive(&mut dec, Side::Decode(n))?;
        Ok((out.graph.unwrap(), out.k_bars))
    }

    /// The encoder-side counterpart of [`CoderConfig::decoder_trace`].
    pub fn encoder_trace(&self, sorted: &SortedGraph<'_>) -> Result<Vec<usize>> {
        let mut meter = Meter::default();
        Ok(self.drive(&mut meter, Side::Encode(sorted))?.k_bars)
    }
}

#[derive(Clone, Copy)]
enum Side<'s, 'g> {
    Encode(&'s SortedGraph<'g>),
    Decode(usize),
}

struct Driven {
    graph: Option<Graph>,
    header_bits: f64,
    k_bars: Vec<usize>,
}

fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn edge_header<C: Channel>(param: EdgeParam, ch: &mut C, n: usize, edges: Option<usize>) -> Result<f64> {
    match param {
        EdgeParam::Fixed(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("edge probability {p} outside [0, 1]")));
            }
            Ok(p)
        }
        EdgeParam::Universal => {
            let pairs = pair_count(n);
            let e = ch.code(&Event::Uniform { range: pairs + 1 }, edges.map(|e| e as u64))?;
            Ok(universal_edge_probability(e, pairs))
        }
    }
}

fn drive_labeled<C: Channel>(param: EdgeParam, ch: &mut C, side: Side<'_, '_>) -> Result<Driven> {
    let (n, source) = match side {
        Side::Encode(s) => (s.graph().node_count(), Some(s.graph())),
        Side::Decode(n) => (n, None),
    };
    let start = ch.ideal_bits();
    let p = edge_header(param, ch, n, source.map(Graph::edge_count))?;
    let header_bits = ch.ideal_bits() - start;
    let bit = Event::Binomial { size: 1, p };
    let mut out = Graph::empty(n);
    for i in 1..n {
        for j in 0..i {
            let truth = source.map(|g| g.has_edge(i, j) as u64);
            if ch.code(&bit, truth)? == 1 && ch.is_decoder() {
                out.add_edge(i, j);
            }
        }
    }
    Ok(Driven { graph: ch.is_decoder().then_some(out), header_bits, k_bars: Vec::new() })
}

enum Model<'m> {
    Iid(f64),
    Degree(Cow<'m, DegreeModel>),
    TriangleFixed(TriangleParams),
    TriangleKt([KtCounter; 2]),
}

fn degree_header<C: Channel>(ch: &mut C, n: usize, source: Option<&Graph>) -> Result<DegreeModel> {
    let hist = source.map(degree_histogram);
    let mut counts = vec![0u64; n];
    let mut left = n as u64;
    for (d, slot) in counts.iter_mut().enumerate() {
        let truth = hist.as_ref().map(|h| h.get(d));
        let c = ch.code(&Event::Composition { items: left, buckets: (n - d) as u64 }, truth)?;
        *slot = c;
        left -= c;
    }
    Ok(DegreeModel::empirical(&counts))
}

fn drive_structure<C: Channel>(cfg: &CoderConfig<'_>, ch: &mut C, side: Side<'_, '_>) -> Result<Driven> {
    let (n, source, order) = match side {
        Side::Encode(s) => (s.graph().node_count(), Some(s.graph()), s.order()),
        Side::Decode(n) => (n, None, &[][..]),
    };
    let decoding = source.is_none();

    let start = ch.ideal_bits();
    let mut model = match cfg {
        CoderConfig::StructIid(param) => Model::Iid(edge_header(*param, ch, n, source.map(Graph::edge_count))?),
        CoderConfig::Degree(DegreeParam::Fixed(m)) => Model::Degree(Cow::Borrowed(m.as_ref())),
        CoderConfig::Degree(DegreeParam::Universal) => Model::Degree(Cow::Owned(degree_header(ch, n, source)?)),
        CoderConfig::Triangle(TriangleParam::Fixed(t)) => Model::TriangleFixed(*t),
        CoderConfig::Triangle(TriangleParam::Adaptive) => Model::TriangleKt([KtCounter::new(); 2]),
        CoderConfig::LabeledIid(_) => unreachable!("labeled coder has its own driver"),
    };
    let header_bits = ch.ideal_bits() - start;

    let mut work: Cow<'_, Graph> = match source {
        Some(g) => Cow::Borrowed(g),
        None => Cow::Owned(Graph::empty(n)),
    };
    let words = work.words_per_row();
    let mut part = GroupPartition::new(n);
    let mut coded = vec![0u64; words];
    let mut touch = vec![0u64; words];
    let mut visited = Vec::with_capacity(n);
    let mut k_bars = Vec::with_capacity(n);
    let mut counts: Vec<u64> = Vec::new();

    for step in 0..n {
        let v = if decoding {
            part.select_next_node()?
        } else {
            part.take(order[step])?;
            order[step]
        };
        for (t, (r, c)) in touch.iter_mut().zip(work.row(v).iter().zip(&coded)) {
            *t = r & c;
        }
        let k_bar = touch.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        k_bars.push(k_bar);

        let groups = part.groups();
        let truth: Option<Vec<u64>> = source.map(|g| {
            groups
                .iter()
                .map(|grp| grp.iter().filter(|&&u| g.has_edge(v, u)).count() as u64)
                .collect()
        });
        let known = |j: usize| truth.as_ref().map(|t| t[j]);
        counts.clear();

        match &mut model {
            Model::Iid(p) => {
                for (j, grp) in groups.iter().enumerate() {
                    counts.push(ch.code(&Event::Binomial { size: grp.len() as u64, p: *p }, known(j))?);
                }
            }
            Model::Degree(dm) => {
                let slots: u64 = groups.iter().map(|g| g.len() as u64).sum();
                let total = truth.as_ref().map(|t| t.iter().sum::<u64>());
                let event = Event::Degree { model: dm.as_ref(), base: k_bar as u64, slots };
                let new_ones = ch.code(&event, total)?;
                let (mut population, mut successes) = (slots, new_ones);
                for (j, grp) in groups.iter().enumerate() {
                    let draws = grp.len() as u64;
                    let m = ch.code(&Event::Hypergeometric { population, successes, draws }, known(j))?;
                    population -= draws;
                    successes -= m;
                    counts.push(m);
                }
            }
            Model::TriangleFixed(params) => {
                for (j, grp) in groups.iter().enumerate() {
                    let p = if group_has_context(&work, &touch, grp) { params.p_tri } else { params.p_check };
                    counts.push(ch.code(&Event::Binomial { size: grp.len() as u64, p }, known(j))?);
                }
            }
            Model::TriangleKt(counters) => {
                for (j, grp) in groups.iter().enumerate() {
                    let ctx = group_has_context(&work, &touch, grp) as usize;
                    let size = grp.len() as u64;
                    let m = ch.code(&Event::Binomial { size, p: counters[ctx].predict() }, known(j))?;
                    counters[ctx].update(m, size - m);
                    counts.push(m);
                }
            }
        }

        if decoding {
            let groups = part.groups().to_vec();
            let g = work.to_mut();
            for (grp, &m) in groups.iter().zip(&counts) {
                for &u in &grp[..m as usize] {
                    g.add_edge(v, u);
                }
            }
        }
        let current = &work;
        part.refine(|u| current.has_edge(v, u));
        coded[v / 64] |= 1 << (v % 64);
        visited.push(v);
    }

    let graph = decoding.then(|| work.permuted(&visited));
    Ok(Driven { graph, header_bits, k_bars })
}

/// Whether some coded node is adjacent both to the current node and to the
/// members of `group`. `touch` is the current node's row masked to coded
/// nodes; all members share their coded adjacency, so one member decides.
fn group_has_context(g: &Graph, touch: &[u64], group: &[usize]) -> bool {
    group
        .first()
        .is_some_and(|&u| g.row(u).iter().zip(touch).any(|(a, b)| a & b != 0))
}

/// Ones and slots per context class along the traversal of `sorted`, as the
/// triangle coder would see them.
pub fn triangle_counts(sorted: &SortedGraph<'_>) -> TriangleCounts {
    let g = sorted.graph();
    let words = g.words_per_row();
    let mut part = GroupPartition::new(g.node_count());
    let mut coded = vec![0u64; words];
    let mut touch = vec![0u64; words];
    let mut counts = TriangleCounts::default();
    for &v in sorted.order() {
        part.take(v).expect("sorted order is a valid traversal");
        for (t, (r, c)) in touch.iter_mut().zip(g.row(v).iter().zip(&coded)) {
            *t = r & c;
        }
        for grp in part.groups() {
            let ones = grp.iter().filter(|&&u| g.has_edge(v, u)).count() as u64;
            let size = grp.len() as u64;
            if group_has_context(g, &touch, grp) {
                counts.context_ones += ones;
                counts.context_slots += size;
            } else {
                counts.free_ones += ones;
                counts.free_slots += size;
            }
        }
        part.refine(|u| g.has_edge(v, u));
        coded[v / 64] |= 1 << (v % 64);
    }
    counts
}

/// `P(k | k̄ <= k <= k̄ + slots)` for `k` in `[k̄, k̄ + slots]`: the degree
/// model renormalized on the window, or flat when it has no mass there.
pub fn degree_conditional(model: &DegreeModel, k_bar: usize, slots: usize) -> Vec<f64> {
    let window: Vec<f64> = (k_bar..=k_bar + slots).map(|k| model.prob(k)).collect();
    let mass: f64 = window.iter().sum();
    if mass > 0.0 {
        window.into_iter().map(|p| p / mass).collect()
    } else {
        vec![1.0 / (slots + 1) as f64; slots + 1]
    }
}

/// Bits to pick one placement of `Σ counts` ones into groups of the given
/// sizes, all placements equally likely:
/// `log2 C(Σ sizes, Σ counts) - Σ log2 C(size_i, count_i)`.
pub fn configuration_codelength(sizes: &[usize], counts: &[usize]) -> Result<f64> {
    if sizes.len() != counts.len() {
        return Err(Error::contract("sizes and counts differ in length"));
    }
    if let Some(i) = (0..sizes.len()).find(|&i| counts[i] > sizes[i]) {
        return Err(Error::contract(format!("group {i}: {} ones in {} slots", counts[i], sizes[i])));
    }
    let total_size: usize = sizes.iter().sum();
    let total_ones: usize = counts.iter().sum();
    let mut nats = crate::entropy::ln_binomial(total_size as u64, total_ones as u64);
    for (&s, &k) in sizes.iter().zip(counts) {
        nats -= crate::entropy::ln_binomial(s as u64, k as u64);
    }
    Ok((nats / std::f64::consts::LN_2).max(0.0))
}

pub fn encode_labeled_iid(g: &Graph, p: EdgeParam) -> Result<CodeLength> {
    CoderConfig::LabeledIid(p).measure(&SortedGraph::with_order(g, (0..g.node_count()).collect())?)
}

pub fn encode_structure_iid(g: &Graph, p: EdgeParam) -> Result<CodeLength> {
    CoderConfig::StructIid(p).measure(&SortedGraph::new(g))
}

pub fn encode_structure_degree(g: &Graph, model: DegreeParam<'_>) -> Result<CodeLength> {
    CoderConfig::Degree(model).measure(&SortedGraph::new(g))
}

pub fn encode_structure_triangle(g: &Graph, params: TriangleParam) -> Result<CodeLength> {
    CoderConfig::Triangle(params).measure(&SortedGraph::new(g))
}

pub fn decode(cfg: &CoderConfig<'_>, n: usize, stream: &Bitstream) -> Result<Graph> {
    cfg.decode(n, stream)
}
