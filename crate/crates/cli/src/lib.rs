//! Command implementations behind the `graphcode` binary.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use graphcode::anomaly::{self, AtypicalityScore};
use graphcode::generators::{derive_seed, GenSpec};
use graphcode::graph::{load_graph, save_graph, GraphFormat};
use graphcode::model::TypicalModel;
use graphcode::partition::{CoderConfig, CoderId, Container, Mode};
use graphcode::{Graph, SortedGraph};

/// A mistake in how a command was invoked (exit status 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn format_for(path: &Path, forced: Option<GraphFormat>) -> GraphFormat {
    forced.unwrap_or_else(|| GraphFormat::from_path(path))
}

pub fn read_graph(path: &Path, forced: Option<GraphFormat>) -> Result<Graph> {
    load_graph(path, format_for(path, forced)).with_context(|| format!("reading {}", path.display()))
}

fn read_graphs(paths: &[PathBuf], forced: Option<GraphFormat>) -> Result<Vec<Graph>> {
    paths.par_iter().map(|p| read_graph(p, forced)).collect()
}

pub fn load_model(path: &Path) -> Result<TypicalModel> {
    TypicalModel::load(path).with_context(|| format!("reading model {}", path.display()))
}

/// Generates `count` graphs; graph `i` uses the seed derived from `master`
/// and `i`. Returns the written paths.
pub fn cmd_gen(spec: &GenSpec, count: usize, master: u64, out_dir: &Path, format: GraphFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let stem = spec.family_name().to_ascii_lowercase();
    (0..count)
        .into_par_iter()
        .map(|i| {
            let g = spec.with_seed(derive_seed(master, i as u64)).generate()?;
            let path = out_dir.join(format!("{stem}_{i:04}.{}", format.extension()));
            save_graph(&g, &path, format).with_context(|| format!("writing {}", path.display()))?;
            Ok(path)
        })
        .collect()
}

/// Ideal and actual sizes of one encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodeReport {
    pub coder: CoderId,
    pub mode: Mode,
    pub n: usize,
    pub ideal_bits: f64,
    pub header_bits: f64,
    pub actual_bits: u64,
}

impl fmt::Display for EncodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            Mode::Learned => "learned",
            Mode::Universal => "universal",
        };
        write!(
            f,
            "coder={} mode={mode} n={} ideal_bits={:.3} header_bits={:.3} actual_bits={}",
            self.coder, self.n, self.ideal_bits, self.header_bits, self.actual_bits
        )
    }
}

/// Encodes a graph into a container. Learned mode needs a model; the coder
/// defaults to the model's coder, or in universal mode to whichever
/// universal coder is shortest.
pub fn cmd_encode(graph: &Graph, coder: Option<CoderId>, mode: Mode, model: Option<&TypicalModel>) -> Result<(Container, EncodeReport)> {
    let n = graph.node_count();
    let sorted = SortedGraph::new(graph);
    let coder = match (mode, coder, model) {
        (Mode::Learned, _, None) => return Err(usage("learned mode needs --model")),
        (Mode::Learned, c, Some(m)) => c.unwrap_or(m.coder),
        (Mode::Universal, Some(c), _) => c,
        (Mode::Universal, None, _) => anomaly::atypical_codelength(graph)?.1,
    };
    let cfg = match mode {
        Mode::Learned => model.expect("checked above").config(coder, n),
        Mode::Universal => CoderConfig::universal(coder),
    };
    let (len, stream) = cfg.encode(&sorted)?;
    let report = EncodeReport {
        coder,
        mode,
        n,
        ideal_bits: len.ideal_bits,
        header_bits: len.header_bits,
        actual_bits: stream.len(),
    };
    Ok((Container { coder, n: n as u64, mode, stream }, report))
}

/// Decodes a container. Structure coders give back the sorted adjacency
/// matrix, an isomorphic copy of the original.
pub fn cmd_decode(container: &Container, model: Option<&TypicalModel>) -> Result<Graph> {
    let n = usize::try_from(container.n).context("node count does not fit in memory")?;
    let cfg = match (container.mode, model) {
        (Mode::Universal, _) => CoderConfig::universal(container.coder),
        (Mode::Learned, Some(m)) => m.config(container.coder, n),
        (Mode::Learned, None) => return Err(usage("container was coded in learned mode; pass --model")),
    };
    Ok(cfg.decode(n, &container.stream)?)
}

pub fn write_container(container: &Container, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    container.write_to(BufWriter::new(file))?;
    Ok(())
}

pub fn read_container(path: &Path) -> Result<Container> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Container::from_bytes(&bytes).with_context(|| format!("reading {}", path.display()))
}

pub fn cmd_train(paths: &[PathBuf], format: Option<GraphFormat>) -> Result<TypicalModel> {
    if paths.is_empty() {
        return Err(usage("train needs at least one graph file"));
    }
    Ok(anomaly::train_typical(&read_graphs(paths, format)?)?)
}

/// One row of a score report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRow {
    pub graph_id: String,
    pub family: String,
    pub n: usize,
    #[serde(rename = "L_T")]
    pub typical_bits: f64,
    #[serde(rename = "L_A")]
    pub atypical_bits: f64,
    pub winning_coder: String,
    pub score: f64,
}

impl ScoreRow {
    fn new(graph_id: String, family: &str, n: usize, s: &AtypicalityScore) -> Self {
        Self {
            graph_id,
            family: family.to_string(),
            n,
            typical_bits: s.typical_bits,
            atypical_bits: s.atypical_bits,
            winning_coder: s.winner.to_string(),
            score: s.score,
        }
    }
}

pub fn cmd_score(model: &TypicalModel, paths: &[PathBuf], format: Option<GraphFormat>) -> Result<Vec<ScoreRow>> {
    let graphs = read_graphs(paths, format)?;
    let scores = anomaly::score_batch(model, &graphs)?;
    Ok(paths
        .iter()
        .zip(&graphs)
        .zip(&scores)
        .map(|((p, g), s)| {
            let id = p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
            ScoreRow::new(id, "file", g.node_count(), s)
        })
        .collect())
}

pub fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Universal codelengths of one graph, with and without the degree header.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub graph: String,
    pub n: usize,
    pub edges: usize,
    pub labeled_iid: f64,
    pub struct_iid: f64,
    pub degree: f64,
    pub degree_with_overhead: f64,
    pub triangle: f64,
}

pub fn compare_row(name: &str, g: &Graph) -> Result<CompareRow> {
    let sorted = SortedGraph::new(g);
    let measure = |id| CoderConfig::universal(id).measure(&sorted);
    let degree = measure(CoderId::StructDegree)?;
    Ok(CompareRow {
        graph: name.to_string(),
        n: g.node_count(),
        edges: g.edge_count(),
        labeled_iid: measure(CoderId::LabeledIid)?.ideal_bits,
        struct_iid: measure(CoderId::StructIid)?.ideal_bits,
        degree: degree.payload_bits(),
        degree_with_overhead: degree.ideal_bits,
        triangle: measure(CoderId::StructTriangle)?.ideal_bits,
    })
}

pub const CONFIG_VERSION: u32 = 1;

/// A family of generated graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub name: String,
    pub spec: GenSpec,
    pub count: usize,
}

/// Threshold grid for the written rate curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauSweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TauSweep {
    pub fn values(&self) -> Vec<f64> {
        let steps = ((self.stop - self.start) / self.step).floor() as usize;
        (0..=steps).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// A real-world graph with a note on where the file came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: u64,
    pub output: PathBuf,
    pub training: Batch,
    /// Test families. The one named by `reference` supplies the typical
    /// scores every other family is compared against.
    #[serde(rename = "test")]
    pub tests: Vec<Batch>,
    pub reference: String,
    #[serde(default)]
    pub tau: Option<TauSweep>,
    #[serde(default, rename = "dataset")]
    pub datasets: Vec<Dataset>,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
}

fn default_bins() -> usize {
    50
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if cfg.output.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output = dir.join(&cfg.output);
            }
        }
        for d in &mut cfg.datasets {
            if d.path.is_relative() {
                if let Some(dir) = path.parent() {
                    d.path = dir.join(&d.path);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.version == CONFIG_VERSION, "unsupported config version {}", self.version);
        for b in std::iter::once(&self.training).chain(&self.tests) {
            ensure!(b.count >= 1, "batch '{}' needs count >= 1", b.name);
        }
        ensure!(
            self.tests.iter().any(|t| t.name == self.reference),
            "reference '{}' is not one of the test batches",
            self.reference
        );
        let mut names: Vec<&str> = self.tests.iter().map(|t| t.name.as_str()).collect();
        names.sort_unstable();
        ensure!(names.windows(2).all(|w| w[0] != w[1]), "test batch names must be unique");
        if let Some(t) = self.tau {
            ensure!(t.step > 0.0 && t.stop >= t.start, "tau sweep needs step > 0 and stop >= start");
        }
        Ok(())
    }
}

fn generate(batch: &Batch, master: u64, stream: u64) -> Result<Vec<Graph>> {
    let base = derive_seed(master, stream);
    (0..batch.count)
        .into_par_iter()
        .map(|i| Ok(batch.spec.with_seed(derive_seed(base, i as u64)).generate()?))
        .collect()
}

#[derive(Serialize)]
struct SweepRow {
    family: String,
    tau: f64,
    p_fa: f64,
    p_miss: f64,
}

#[derive(Serialize)]
struct SummaryRow {
    family: String,
    count: usize,
    mean_score: f64,
    eer: f64,
    eer_tau: f64,
    p_fa: f64,
    p_miss: f64,
}

#[derive(Serialize)]
struct HistogramRow {
    family: String,
    bin_start: f64,
    bin_end: f64,
    count: usize,
}

/// What an experiment produced.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSummary {
    pub coder: CoderId,
    /// `(family, equal error rate against the reference)`.
    pub eers: Vec<(String, f64)>,
    pub files: Vec<PathBuf>,
}

/// Trains, scores every test family, and writes the model, the per-graph
/// scores, rate curves, histograms and a summary under `cfg.output`.
pub fn cmd_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output).with_context(|| format!("creating {}", cfg.output.display()))?;
    let out = |name: &str| cfg.output.join(name);
    let mut files = Vec::new();

    let training = generate(&cfg.training, cfg.seed, 0)?;
    let model = anomaly::train_typical(&training)?;
    info!("typical coder: {}", model.coder);
    model.save(out("model.toml"))?;
    files.push(out("model.toml"));

    let mut rows = Vec::new();
    let mut by_family: Vec<(String, Vec<f64>)> = Vec::new();
    for (k, batch) in cfg.tests.iter().enumerate() {
        let graphs = generate(batch, cfg.seed, k as u64 + 1)?;
        let scores = anomaly::score_batch(&model, &graphs)?;
        info!("scored {} graphs of {}", graphs.len(), batch.name);
        for (i, (g, s)) in graphs.iter().zip(&scores).enumerate() {
            rows.push(ScoreRow::new(format!("{}_{i:04}", batch.name), &batch.name, g.node_count(), s));
        }
        by_family.push((batch.name.clone(), scores.iter().map(|s| s.score).collect()));
    }
    write_csv(&rows, &out("scores.csv"))?;
    files.push(out("scores.csv"));

    let reference = &by_family.iter().find(|(name, _)| *name == cfg.reference).expect("validated").1;
    let mut sweep = Vec::new();
    let mut summary = Vec::new();
    let mut histograms = Vec::new();
    let mut eers = Vec::new();
    for (name, scores) in &by_family {
        let mean_score = scores.iter().sum::<f64>() / scores.len() as f64;
        for (bin_start, bin_end, count) in anomaly::histogram(scores, cfg.histogram_bins) {
            histograms.push(HistogramRow { family: name.clone(), bin_start, bin_end, count });
        }
        let result = anomaly::evaluate(reference, scores)?;
        let curve: Vec<(f64, f64, f64)> = match cfg.tau {
            Some(t) => t
                .values()
                .into_iter()
                .map(|tau| {
                    let p = anomaly::rates_at(reference, scores, tau);
                    (tau, p.false_alarm, p.miss)
                })
                .collect(),
            None => result.curve.iter().map(|p| (p.tau, p.false_alarm, p.miss)).collect(),
        };
        if *name != cfg.reference {
            sweep.extend(curve.into_iter().map(|(tau, p_fa, p_miss)| SweepRow { family: name.clone(), tau, p_fa, p_miss }));
            eers.push((name.clone(), result.equal_error_rate));
        }
        summary.push(SummaryRow {
            family: name.clone(),
            count: scores.len(),
            mean_score,
            eer: result.equal_error_rate,
            eer_tau: result.tau,
            p_fa: result.false_alarm_rate,
            p_miss: result.miss_rate,
        });
    }
    write_csv(&sweep, &out("sweep.csv"))?;
    write_csv(&summary, &out("summary.csv"))?;
    write_csv(&histograms, &out("histogram.csv"))?;
    files.extend(["sweep.csv", "summary.csv", "histogram.csv"].map(out));

    if !cfg.datasets.is_empty() {
        let table = cfg
            .datasets
            .iter()
            .map(|d| {
                info!("dataset {} from {}", d.name, if d.source.is_empty() { "unspecified source" } else { &d.source });
                compare_row(&d.name, &read_graph(&d.path, None)?)
            })
            .collect::<Result<Vec<_>>>()?;
        write_csv(&table, &out("datasets.csv"))?;
        files.push(out("datasets.csv"));
    }

    Ok(ExperimentSummary { coder: model.coder, eers, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_sweep_is_inclusive() {
        let t = TauSweep { start: -10.0, stop: 10.0, step: 5.0 };
        assert_eq!(t.values(), vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
    }

    #[test]
    fn shipped_config_loads() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/anomaly.toml");
        let cfg = ExperimentConfig::load(&path).unwrap();
        assert_eq!(cfg.training.count, 100);
        assert_eq!(cfg.tests.len(), 4);
        assert!(cfg.tests.iter().all(|t| t.count == 500 && t.spec.n == 100));
        assert!(cfg.output.ends_with("results/anomaly"));
        let text = toml::to_string(&cfg).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn encode_report_fields() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2)]).unwrap();
        let (c, report) = cmd_encode(&g, Some(CoderId::StructDegree), Mode::Universal, None).unwrap();
        assert_eq!(c.n, 5);
        let line = report.to_string();
        for key in ["coder=degree", "mode=universal", "n=5", "ideal_bits=", "header_bits=", "actual_bits="] {
            assert!(line.contains(key), "{line}");
        }
        let back = cmd_decode(&c, None).unwrap();
        assert_eq!(graphcode::graph::sorted_matrix(&back), graphcode::graph::sorted_matrix(&g));
    }
}
