//! Coding events and the three channels that consume them: an ideal-length
//! meter, an arithmetic encoder and an arithmetic decoder.
//!
//! Every coder is written once against [`Channel`]; the channel decides
//! whether a symbol is measured, written, or read back.

use crate::entropy::{
    binomial_codelength, composition_codelength, hypergeometric_codelength, ArithmeticDecoder,
    ArithmeticEncoder, Bitstream, Frequencies,
};
use crate::error::{Error, Result};
use crate::model::DegreeModel;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Event<'a> {
    /// Flat over `0..range`.
    Uniform { range: u64 },
    /// One-count of `size` Bernoulli(p) trials.
    Binomial { size: u64, p: f64 },
    /// Degree `base + symbol` given that it lies in `[base, base + slots]`.
    Degree { model: &'a DegreeModel, base: u64, slots: u64 },
    /// Ones landing in a group of `draws` out of `population` slots holding
    /// `successes` ones.
    Hypergeometric { population: u64, successes: u64, draws: u64 },
    /// Items placed in the first of `buckets` buckets out of `items`.
    Composition { items: u64, buckets: u64 },
}

impl Event<'_> {
    fn alphabet(&self) -> u64 {
        match *self {
            Event::Uniform { range } => range,
            Event::Binomial { size, .. } => size + 1,
            Event::Degree { slots, .. } => slots + 1,
            Event::Hypergeometric { draws, .. } => draws + 1,
            Event::Composition { items, .. } => items + 1,
        }
    }

    pub(crate) fn codelength(&self, symbol: u64) -> Result<f64> {
        if symbol >= self.alphabet() {
            return Err(Error::contract(format!("symbol {symbol} outside {self:?}")));
        }
        match *self {
            Event::Uniform { range } => Ok((range as f64).log2()),
            Event::Binomial { size, p } => binomial_codelength(size, symbol, p),
            Event::Degree { model, base, slots } => {
                let lp = degree_log2_prob(model, base, slots, symbol);
                if lp == f64::NEG_INFINITY {
                    Err(Error::InfiniteCodelength(format!(
                        "degree {} has zero probability",
                        base + symbol
                    )))
                } else {
                    Ok(-lp)
                }
            }
            Event::Hypergeometric { population, successes, draws } => {
                hypergeometric_codelength(population, successes, draws, symbol)
            }
            Event::Composition { items, buckets } => composition_codelength(items, buckets, symbol),
        }
    }

    /// Base-2 log-probabilities over the alphabet; `-inf` marks symbols
    /// outside the support.
    fn log2_pmf(&self) -> Vec<f64> {
        match *self {
            Event::Degree { model, base, slots } => {
                let mass: f64 = (base..=base + slots).map(|k| model.prob(k as usize)).sum();
                (0..=slots)
                    .map(|j| {
                        if mass > 0.0 {
                            (model.prob((base + j) as usize) / mass).log2()
                        } else {
                            -((slots + 1) as f64).log2()
                        }
                    })
                    .collect()
            }
            _ => (0..self.alphabet())
                .map(|s| self.codelength(s).map_or(f64::NEG_INFINITY, |b| -b))
                .collect(),
        }
    }
}

/// `log2 P(base + j | base <= k <= base + slots)`, uniform when the model
/// puts no mass on the window.
fn degree_log2_prob(model: &DegreeModel, base: u64, slots: u64, j: u64) -> f64 {
    let mass: f64 = (base..=base + slots).map(|k| model.prob(k as usize)).sum();
    if mass > 0.0 {
        (model.prob((base + j) as usize) / mass).log2()
    } else {
        -((slots + 1) as f64).log2()
    }
}

pub(crate) trait Channel {
    /// Codes one symbol. Encoding channels take `Some(symbol)` and return it;
    /// decoding channels ignore the argument and return what they read.
    fn code(&mut self, event: &Event<'_>, symbol: Option<u64>) -> Result<u64>;

    fn ideal_bits(&self) -> f64;

    fn is_decoder(&self) -> bool {
        false
    }
}

fn known(symbol: Option<u64>) -> Result<u64> {
    symbol.ok_or_else(|| Error::contract("encoding channel needs the symbol"))
}

#[derive(Debug, Default)]
pub(crate) struct Meter {
    bits: f64,
}

impl Channel for Meter {
    fn code(&mut self, event: &Event<'_>, symbol: Option<u64>) -> Result<u64> {
        let s = known(symbol)?;
        self.bits += event.codelength(s)?;
        Ok(s)
    }

    fn ideal_bits(&self) -> f64 {
        self.bits
    }
}

#[derive(Debug, Default)]
pub(crate) struct StreamEncoder {
    bits: f64,
    enc: ArithmeticEncoder,
}

impl StreamEncoder {
    pub(crate) fn finish(self) -> Bitstream {
        self.enc.finish()
    }
}

impl Channel for StreamEncoder {
    fn code(&mut self, event: &Event<'_>, symbol: Option<u64>) -> Result<u64> {
        let s = known(symbol)?;
        self.bits += event.codelength(s)?;
        match *event {
            Event::Uniform { range } => self.enc.encode_uniform(s, range)?,
            _ => {
                let freqs = Frequencies::from_log2_probs(&event.log2_pmf())?;
                self.enc.encode_symbol(&freqs, s as usize)?;
            }
        }
        Ok(s)
    }

    fn ideal_bits(&self) -> f64 {
        self.bits
    }
}

pub(crate) struct StreamDecoder<'a> {
    bits: f64,
    dec: ArithmeticDecoder<'a>,
}

impl<'a> StreamDecoder<'a> {
    pub(crate) fn new(stream: &'a Bitstream) -> Self {
        Self { bits: 0.0, dec: ArithmeticDecoder::new(stream) }
    }
}

impl Channel for StreamDecoder<'_> {
    fn code(&mut self, event: &Event<'_>, _symbol: Option<u64>) -> Result<u64> {
        let s = match *event {
            Event::Uniform { range } => self.dec.decode_uniform(range)?,
            _ => {
                let freqs = Frequencies::from_log2_probs(&event.log2_pmf())?;
                self.dec.decode_symbol(&freqs)? as u64
            }
        };
        self.bits += event
            .codelength(s)
            .map_err(|e| Error::decode(format!("decoded an impossible symbol: {e}")))?;
        Ok(s)
    }

    fn ideal_bits(&self) -> f64 {
        self.bits
    }

    fn is_decoder(&self) -> bool {
        true
    }
}
