//! Seeded random graph families.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Er { p: f64 },
    Ba { m: usize },
    Nws { k: usize, p: f64 },
    Mix { m: usize, p_extra: f64 },
}

/// One graph distribution plus a seed. Text form: `BA n=100 m=10 seed=7`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

fn check_p(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} = {p} outside [0, 1]")))
    }
}

impl GenSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Result<Self> {
        let spec = Self { family, n, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        match self.family {
            Family::Er { p } => check_p(p, "p"),
            Family::Ba { m } | Family::Mix { m, .. } if m == 0 || m >= n => {
                Err(Error::domain(format!("BA needs 1 <= m < n, got m={m}, n={n}")))
            }
            Family::Ba { .. } => Ok(()),
            Family::Mix { p_extra, .. } => check_p(p_extra, "p_extra"),
            Family::Nws { k, .. } if k >= n => Err(Error::domain(format!("NWS needs k < n, got k={k}, n={n}"))),
            Family::Nws { p, .. } => check_p(p, "p"),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Er { .. } => "ER",
            Family::Ba { .. } => "BA",
            Family::Nws { .. } => "NWS",
            Family::Mix { .. } => "MIX",
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        self.validate()?;
        let (n, seed) = (self.n, self.seed);
        Ok(match self.family {
            Family::Er { p } => gen_er(n, p, seed),
            Family::Ba { m } => gen_ba(n, m, seed),
            Family::Nws { k, p } => gen_nws(n, k, p, seed),
            Family::Mix { m, p_extra } => gen_mixture(n, m, p_extra, seed),
        })
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}", self.family_name(), self.n)?;
        match self.family {
            Family::Er { p } => write!(f, " p={p}")?,
            Family::Ba { m } => write!(f, " m={m}")?,
            Family::Nws { k, p } => write!(f, " k={k} p={p}")?,
            Family::Mix { m, p_extra } => write!(f, " m={m} p_extra={p_extra}")?,
        }
        write!(f, " seed={}", self.seed)
    }
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::format(format!("generator spec '{s}': {msg}"));
        let mut tokens = s.split_whitespace();
        let family = tokens.next().ok_or_else(|| bad("empty".into()))?.to_ascii_uppercase();
        let mut fields = std::collections::BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| bad(format!("expected key=value, found '{tok}'")))?;
            if fields.insert(k, v).is_some() {
                return Err(bad(format!("'{k}' given twice")));
            }
        }
        let mut num = |key: &str| -> Result<f64> {
            let v = fields.remove(key).ok_or_else(|| bad(format!("missing '{key}'")))?;
            v.parse().map_err(|_| bad(format!("bad value for '{key}': '{v}'")))
        };
        let int = |v: f64, key: &str| -> Result<usize> {
            if v.fract() != 0.0 || v < 0.0 {
                return Err(bad(format!("'{key}' must be a nonnegative integer")));
            }
            Ok(v as usize)
        };
        let n = int(num("n")?, "n")?;
        let family = match family.as_str() {
            "ER" => Family::Er { p: num("p")? },
            "BA" => Family::Ba { m: int(num("m")?, "m")? },
            "NWS" => Family::Nws { k: int(num("k")?, "k")?, p: num("p")? },
            "MIX" => Family::Mix { m: int(num("m")?, "m")?, p_extra: num("p_extra")? },
            other => return Err(bad(format!("unknown family '{other}'"))),
        };
        let seed = match fields.remove("seed") {
            Some(v) => v.parse().map_err(|_| bad(format!("bad seed '{v}'")))?,
            None => 0,
        };
        if let Some(key) = fields.keys().next() {
            return Err(bad(format!("unexpected '{key}'")));
        }
        GenSpec::new(family, n, seed)
    }
}

impl TryFrom<String> for GenSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GenSpec> for String {
    fn from(spec: GenSpec) -> String {
        spec.to_string()
    }
}

/// Seed for the `index`-th stream derived from `master` (SplitMix64 output
/// function over a Weyl sequence), independent of generation order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Erdős–Rényi G(n, p).
pub fn gen_er(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Preferential attachment from `m` isolated seed nodes; every later node
/// brings `m` edges, so the edge count is `m(n - m)`.
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Graph {
    assert!(m >= 1 && m < n, "BA needs 1 <= m < n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(n);
    // Each node appears once per incident edge.
    let mut ends: Vec<usize> = Vec::with_capacity(2 * m * (n - m));
    let mut targets: Vec<usize> = (0..m).collect();
    for new in m..n {
        for &t in &targets {
            g.add_edge(new, t);
        }
        ends.extend_from_slice(&targets);
        ends.extend(std::iter::repeat(new).take(m));
        targets.clear();
        while targets.len() < m && new + 1 < n {
            let t = *ends.choose(&mut rng).expect("edges exist after the first node");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
    }
    g
}

/// Newman–Watts small world: a ring where node `i` links to the next
/// `⌊k/2⌋` nodes and, for odd `k`, even nodes also to node `i + ⌈k/2⌉`, so
/// there are `⌈nk/2⌉` lattice edges. Each lattice edge `(u, v)` then adds a
/// shortcut from `u` to a uniform new neighbor with probability `p`.
pub fn gen_nws(n: usize, k: usize, p: f64, seed: u64) -> Graph {
    assert!(k < n, "NWS needs k < n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(n);
    let mut lattice = Vec::with_capacity(n * k.div_ceil(2));
    for i in 0..n {
        for j in 1..=k / 2 {
            lattice.push((i, (i + j) % n));
        }
        if k % 2 == 1 && i % 2 == 0 {
            lattice.push((i, (i + k.div_ceil(2)) % n));
        }
    }
    lattice.retain(|&(u, v)| g.add_edge(u, v));
    for (u, _) in lattice {
        if !rng.gen_bool(p) || g.degree(u) + 1 >= n {
            continue;
        }
        loop {
            let w = rng.gen_range(0..n);
            if w != u && !g.has_edge(u, w) {
                g.add_edge(u, w);
                break;
            }
        }
    }
    g
}

/// Union of BA(n, m) and ER(n, p_extra) drawn from two derived seeds.
pub fn gen_mixture(n: usize, m: usize, p_extra: f64, seed: u64) -> Graph {
    gen_ba(n, m, derive_seed(seed, 0)).union(&gen_er(n, p_extra, derive_seed(seed, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes_and_mean_degree() {
        assert_eq!(gen_er(20, 0.0, 1), Graph::empty(20));
        assert_eq!(gen_er(20, 1.0, 1), Graph::complete(20));
        let mean: f64 =
            (0..100).map(|s| 2.0 * gen_er(100, 0.182, s).edge_count() as f64 / 100.0).sum::<f64>() / 100.0;
        assert!((mean - 18.0).abs() <= 1.0, "{mean}");
    }

    #[test]
    fn er_edge_count_within_three_sigma() {
        let (n, p) = (60usize, 0.2);
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = (0..100).map(|s| gen_er(n, p, s).edge_count() as f64).sum::<f64>() / 100.0;
        let sigma_of_mean = (pairs * p * (1.0 - p)).sqrt() / 10.0;
        assert!((mean - pairs * p).abs() <= 3.0 * sigma_of_mean);
    }

    #[test]
    fn ba_edge_counts() {
        let g = gen_ba(6, 5, 3);
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.degree(5), 5);
        for seed in 0..5 {
            assert_eq!(gen_ba(100, 10, seed).edge_count(), 900);
        }
    }

    #[test]
    fn ba_tail_is_heavier_than_er() {
        let n = 400;
        let p = 2.0 * (10.0 * (n - 10) as f64) / (n * (n - 1)) as f64;
        let wins = (0..100)
            .filter(|&s| {
                let ba = gen_ba(n, 10, s).degrees().into_iter().max().unwrap();
                let er = gen_er(n, p, 1000 + s).degrees().into_iter().max().unwrap();
                ba > er
            })
            .count();
        assert!(wins >= 95, "{wins}");
    }

    #[test]
    fn nws_lattice() {
        let ring = gen_nws(10, 2, 0.0, 0);
        assert_eq!(ring.edge_count(), 10);
        assert!(ring.degrees().iter().all(|&d| d == 2));
        for n in [20usize, 21] {
            let g = gen_nws(n, 5, 0.0, 0);
            assert_eq!(g.edge_count(), (n * 5).div_ceil(2));
        }
        let even = gen_nws(30, 4, 0.0, 0);
        assert!(even.degrees().iter().all(|&d| d == 4));
        let shortcut = gen_nws(100, 5, 0.1, 4);
        assert!(shortcut.edge_count() > 250);
    }

    #[test]
    fn mixture_extremes() {
        assert_eq!(gen_mixture(30, 3, 1.0, 5), Graph::complete(30));
        assert_eq!(gen_mixture(30, 3, 0.0, 5).edge_count(), 81);
        let mean = (0..200).map(|s| gen_mixture(100, 10, 0.01, s).edge_count() as f64).sum::<f64>() / 200.0;
        let expected = 900.0 + 0.01 * 4950.0 * (1.0 - 900.0 / 4950.0);
        assert!((mean - expected).abs() < 3.0, "{mean} vs {expected}");
    }

    #[test]
    fn deterministic() {
        for text in ["ER n=50 p=0.1 seed=3", "BA n=50 m=4 seed=3", "NWS n=50 k=5 p=0.1 seed=3", "MIX n=50 m=4 p_extra=0.05 seed=3"] {
            let spec: GenSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        }
    }

    #[test]
    fn spec_validation() {
        for bad in ["BA n=5 m=5", "ER n=5 p=1.5", "NWS n=5 k=5 p=0", "XX n=5", "ER n=5", "ER n=5 p=0.1 q=2", "ER p=0.1"] {
            assert!(bad.parse::<GenSpec>().is_err(), "{bad}");
        }
        assert_eq!("er n=5 p=0".parse::<GenSpec>().unwrap().seed, 0);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
