//! Atypicality scoring: a graph is atypical when some universal coder,
//! paying for its parameters and for naming itself, beats the typical coder.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::TypicalModel;
use crate::partition::{CoderConfig, CoderId, SortedGraph};

/// Bits to name one of the four coders.
pub const CODER_ID_BITS: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtypicalityScore {
    /// Ideal bits under the typical coder with learned parameters.
    pub typical_bits: f64,
    /// Best universal codelength, parameters and coder id included.
    pub atypical_bits: f64,
    pub winner: CoderId,
    /// `atypical_bits - typical_bits`.
    pub score: f64,
}

fn ideal_or_infinite(cfg: &CoderConfig<'_>, sorted: &SortedGraph<'_>) -> Result<f64> {
    match cfg.measure(sorted) {
        Ok(len) => Ok(len.ideal_bits),
        Err(Error::InfiniteCodelength(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn sorted_for<'g>(coder: CoderId, g: &'g Graph) -> SortedGraph<'g> {
    match coder {
        // The labeled coder ignores the order; skip the canonical search.
        CoderId::LabeledIid => {
            SortedGraph::with_order(g, (0..g.node_count()).collect()).expect("identity is a permutation")
        }
        _ => SortedGraph::new(g),
    }
}

/// Total learned-mode ideal bits of each coder over `graphs`, in
/// [`CoderId::ALL`] order.
pub fn learned_totals(model: &TypicalModel, graphs: &[Graph]) -> Result<[f64; 4]> {
    let per_graph: Vec<[f64; 4]> = graphs
        .par_iter()
        .map(|g| {
            let sorted = SortedGraph::new(g);
            let mut bits = [0.0; 4];
            for (slot, id) in bits.iter_mut().zip(CoderId::ALL) {
                *slot = ideal_or_infinite(&model.config(id, g.node_count()), &sorted)?;
            }
            Ok(bits)
        })
        .collect::<Result<_>>()?;
    let mut totals = [0.0f64; 4];
    for bits in &per_graph {
        for (t, b) in totals.iter_mut().zip(bits) {
            *t += b;
        }
    }
    Ok(totals)
}

/// Learns every parameter and selects the coder with the smallest total
/// learned codelength over the training set; ties go to the earlier coder.
pub fn train_typical(graphs: &[Graph]) -> Result<TypicalModel> {
    let mut model = TypicalModel::learn(graphs, CoderId::StructIid)?;
    let totals = learned_totals(&model, graphs)?;
    let mut best = 0;
    for i in 1..4 {
        if totals[i] < totals[best] {
            best = i;
        }
    }
    log::info!(
        "training totals (bits): {}",
        CoderId::ALL.iter().zip(&totals).map(|(c, t)| format!("{c}={t:.1}")).collect::<Vec<_>>().join(", ")
    );
    model.coder = CoderId::ALL[best];
    Ok(model)
}

/// `L_T`: learned-mode ideal bits of the model's coder. No parameter cost.
pub fn typical_codelength(model: &TypicalModel, g: &Graph) -> Result<f64> {
    ideal_or_infinite(&model.config(model.coder, g.node_count()), &sorted_for(model.coder, g))
}

/// `L_A`: the smallest universal-mode codelength plus the coder id.
pub fn atypical_codelength(g: &Graph) -> Result<(f64, CoderId)> {
    atypical_on(&SortedGraph::new(g))
}

fn atypical_on(sorted: &SortedGraph<'_>) -> Result<(f64, CoderId)> {
    let mut best = (f64::INFINITY, CoderId::LabeledIid);
    for id in CoderId::ALL {
        let bits = ideal_or_infinite(&CoderConfig::universal(id), sorted)?;
        if bits < best.0 {
            best = (bits, id);
        }
    }
    Ok((best.0 + CODER_ID_BITS, best.1))
}

pub fn score(model: &TypicalModel, g: &Graph) -> Result<AtypicalityScore> {
    let sorted = SortedGraph::new(g);
    let typical_bits = ideal_or_infinite(&model.config(model.coder, g.node_count()), &sorted)?;
    let (atypical_bits, winner) = atypical_on(&sorted)?;
    Ok(AtypicalityScore { typical_bits, atypical_bits, winner, score: atypical_bits - typical_bits })
}

/// Scores in input order, computed in parallel.
pub fn score_batch(model: &TypicalModel, graphs: &[Graph]) -> Result<Vec<AtypicalityScore>> {
    graphs.par_iter().map(|g| score(model, g)).collect()
}

/// True when the graph is declared atypical at threshold `tau`.
pub fn detect(score: &AtypicalityScore, tau: f64) -> bool {
    score.score < tau
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub tau: f64,
    /// Fraction of typical graphs flagged.
    pub false_alarm: f64,
    /// Fraction of test graphs not flagged.
    pub miss: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub curve: Vec<RatePoint>,
    /// Threshold where the two rates are closest.
    pub tau: f64,
    pub false_alarm_rate: f64,
    pub miss_rate: f64,
    /// Mean of the two rates at `tau`.
    pub equal_error_rate: f64,
}

/// False-alarm and miss rates at one threshold.
pub fn rates_at(typical: &[f64], test: &[f64], tau: f64) -> RatePoint {
    let below = |scores: &[f64]| scores.iter().filter(|&&s| s < tau).count() as f64 / scores.len() as f64;
    RatePoint { tau, false_alarm: below(typical), miss: 1.0 - below(test) }
}

/// Sweeps the threshold over every observed score (and past the largest)
/// and locates the crossing of the false-alarm and miss rates.
pub fn evaluate(typical: &[f64], test: &[f64]) -> Result<DetectionResult> {
    if typical.is_empty() || test.is_empty() {
        return Err(Error::domain("evaluation needs typical and test scores"));
    }
    if typical.iter().chain(test).any(|s| s.is_nan()) {
        return Err(Error::domain("score is NaN"));
    }
    let mut typ = typical.to_vec();
    let mut tst = test.to_vec();
    typ.sort_by(f64::total_cmp);
    tst.sort_by(f64::total_cmp);
    let mut taus: Vec<f64> = typ.iter().chain(&tst).copied().collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    taus.push(f64::INFINITY);

    let below = |sorted: &[f64], tau: f64| sorted.partition_point(|&s| s < tau) as f64 / sorted.len() as f64;
    let curve: Vec<RatePoint> = taus
        .into_iter()
        .map(|tau| RatePoint { tau, false_alarm: below(&typ, tau), miss: 1.0 - below(&tst, tau) })
        .collect();
    let best = curve
        .iter()
        .min_by(|a, b| (a.false_alarm - a.miss).abs().total_cmp(&(b.false_alarm - b.miss).abs()))
        .expect("curve is nonempty");
    Ok(DetectionResult {
        tau: best.tau,
        false_alarm_rate: best.false_alarm,
        miss_rate: best.miss,
        equal_error_rate: (best.false_alarm + best.miss) / 2.0,
        curve,
    })
}

/// Equal-width histogram of finite scores: `(bin_start, bin_end, count)`.
pub fn histogram(scores: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let finite: Vec<f64> = scores.iter().copied().filter(|s| s.is_finite()).collect();
    if finite.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for s in finite {
        let i = (((s - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_ba, gen_er};
    use crate::model::universal_overhead;
    use crate::partition::EdgeParam;

    fn fake(score: f64) -> AtypicalityScore {
        AtypicalityScore { typical_bits: 0.0, atypical_bits: score, winner: CoderId::StructIid, score }
    }

    #[test]
    fn detection_rule() {
        assert!(detect(&fake(-5.0), 0.0));
        assert!(!detect(&fake(310.0), 305.0));
        assert!(!detect(&fake(7.0), 7.0));
    }

    #[test]
    fn equal_error_rate_extremes() {
        let same = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(evaluate(&same, &same).unwrap().equal_error_rate, 0.5);
        let r = evaluate(&[10.0, 11.0, 12.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.equal_error_rate, 0.0);
        assert!(r.tau > 2.0 && r.tau <= 10.0);
        assert!(evaluate(&[], &[1.0]).is_err());
        let p = rates_at(&[1.0, 2.0, 3.0, 4.0], &[0.0, 5.0], 2.5);
        assert_eq!((p.false_alarm, p.miss), (0.5, 0.5));
        for p in &r.curve {
            assert!((0.0..=1.0).contains(&p.false_alarm) && (0.0..=1.0).contains(&p.miss));
        }
    }

    #[test]
    fn empty_graph_atypical_length() {
        let (bits, winner) = atypical_codelength(&Graph::empty(10)).unwrap();
        assert!(matches!(winner, CoderId::LabeledIid | CoderId::StructIid));
        let labeled = CoderConfig::LabeledIid(EdgeParam::Universal)
            .measure(&sorted_for(CoderId::LabeledIid, &Graph::empty(10)))
            .unwrap();
        assert!(bits <= labeled.ideal_bits + CODER_ID_BITS + 1e-9);
        // Header plus 45 bits at the clamped density 1/90.
        let expected = universal_overhead(CoderId::LabeledIid, 10) + 45.0 * -(1.0 - 1.0 / 90.0f64).log2() + 2.0;
        assert!((bits - expected).abs() < 1e-9, "{bits} vs {expected}");
    }

    #[test]
    fn training_picks_the_matching_coder() {
        // The learned triangle coder contains the iid one (p_tri = p_check),
        // so on its own training set it can only win by a hair.
        let er: Vec<Graph> = (0..20).map(|s| gen_er(60, 0.15, s)).collect();
        let model = train_typical(&er).unwrap();
        let totals = learned_totals(&model, &er).unwrap();
        let (iid, tri) = (totals[1], totals[3]);
        assert!(matches!(model.coder, CoderId::StructIid | CoderId::StructTriangle));
        assert!((tri - iid).abs() < 1e-3 * iid, "{tri} vs {iid}");
        assert!(totals[2] > iid && totals[0] > iid);
        let ba: Vec<Graph> = (0..20).map(|s| gen_ba(100, 10, s)).collect();
        assert_eq!(train_typical(&ba).unwrap().coder, CoderId::StructDegree);
        assert!(train_typical(&[]).is_err());
    }

    #[test]
    fn empty_graph_has_finite_typical_length() {
        let ba: Vec<Graph> = (0..5).map(|s| gen_ba(40, 3, s)).collect();
        let mut model = train_typical(&ba).unwrap();
        for id in CoderId::ALL {
            model.coder = id;
            assert!(typical_codelength(&model, &Graph::empty(40)).unwrap().is_finite(), "{id}");
        }
    }

    #[test]
    fn histogram_bins() {
        let h = histogram(&[0.0, 1.0, 2.0, 3.0, f64::INFINITY], 3);
        assert_eq!(h.iter().map(|b| b.2).collect::<Vec<_>>(), vec![1, 1, 2]);
        assert!(histogram(&[], 4).is_empty());
    }
}
