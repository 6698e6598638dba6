//! Exact-as-floating-point codelength arithmetic for binomial and
//! uniform codes.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Below this `min(k, n - k)` the log-binomial is summed term by term.
const DIRECT_SUM_LIMIT: u64 = 32;

/// Stirling-series remainder `ln Γ(x+1) - [(x+½)ln x - x + ½ln 2π]`, valid for
/// `x >= DIRECT_SUM_LIMIT` to well below one ulp.
fn stirling_remainder(x: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let xx = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
}

/// Natural log of `C(n, k)`; the caller guarantees `k <= n`.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if k < DIRECT_SUM_LIMIT {
        let base = (n - k) as f64;
        return (1..=k).map(|i| (1.0 + base / i as f64).ln()).sum();
    }
    // ln Γ via Stirling with the leading terms regrouped so that no large
    // quantities cancel: k ln(n/k) + (n-k) ln(n/(n-k)) are both positive.
    let (nf, kf, rf) = (n as f64, k as f64, (n - k) as f64);
    stirling_remainder(nf) - stirling_remainder(kf) - stirling_remainder(rf)
        + 0.5 * (nf / (2.0 * PI * kf * rf)).ln()
        + kf * (rf / kf).ln_1p()
        + rf * (kf / rf).ln_1p()
}

/// `log2 C(n, k)`.
pub fn log2_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("log2_binomial: k={k} exceeds n={n}")));
    }
    Ok(ln_binomial(n, k) / LN_2)
}

/// Codelength in bits of observing `ones` successes among `size` Bernoulli(p)
/// trials when only the count is coded: `-log2[C(s,m) p^m (1-p)^(s-m)]`.
pub fn binomial_codelength(size: u64, ones: u64, p: f64) -> Result<f64> {
    if ones > size {
        return Err(Error::domain(format!(
            "binomial_codelength: {ones} ones in a group of {size}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("binomial_codelength: p={p} is not a probability")));
    }
    let zeros = size - ones;
    if (ones > 0 && p == 0.0) || (zeros > 0 && p == 1.0) {
        return Err(Error::InfiniteCodelength(format!(
            "{ones} of {size} ones under p={p}"
        )));
    }
    let mut nats = -ln_binomial(size, ones);
    if ones > 0 {
        nats -= ones as f64 * p.ln();
    }
    if zeros > 0 {
        nats -= zeros as f64 * (-p).ln_1p();
    }
    Ok(nats / LN_2)
}

/// Bits needed to send one value from `0..range` with a flat code.
pub fn uniform_integer_codelength(range: u64) -> f64 {
    assert!(range >= 1, "uniform code over an empty range");
    (range as f64).log2()
}

/// `-log2` of the hypergeometric probability that a group of `draws` slots
/// out of `population` receives `hits` of the `successes` ones, all
/// placements being equally likely.
pub(crate) fn hypergeometric_codelength(
    population: u64,
    successes: u64,
    draws: u64,
    hits: u64,
) -> Result<f64> {
    if draws > population || successes > population || hits > draws || hits > successes {
        return Err(Error::contract(format!(
            "hypergeometric: {hits} hits drawing {draws} of {population} with {successes} successes"
        )));
    }
    if successes - hits > population - draws {
        return Err(Error::InfiniteCodelength(format!(
            "hypergeometric: {hits} hits leaves too many ones outside the group"
        )));
    }
    let nats = ln_binomial(population, successes)
        - ln_binomial(draws, hits)
        - ln_binomial(population - draws, successes - hits);
    Ok(nats.max(0.0) / LN_2)
}

/// `-log2` of the probability that the first of `buckets` buckets holds
/// `count` of `items` indistinguishable items, all weak compositions being
/// equally likely. Chaining this over the buckets yields a flat code over all
/// `C(items + buckets - 1, items)` histograms.
pub(crate) fn composition_codelength(items: u64, buckets: u64, count: u64) -> Result<f64> {
    if count > items || buckets == 0 {
        return Err(Error::contract(format!(
            "composition: {count} of {items} items in {buckets} buckets"
        )));
    }
    if buckets == 1 {
        return if count == items {
            Ok(0.0)
        } else {
            Err(Error::InfiniteCodelength("last bucket must take the remainder".into()))
        };
    }
    let rest = items - count;
    let nats = ln_binomial(items + buckets - 1, buckets - 1) - ln_binomial(rest + buckets - 2, buckets - 2);
    Ok(nats.max(0.0) / LN_2)
}
