//! Binary-output arithmetic (range) coder with a 62-bit state held in 64-bit
//! registers and frequency tables of at most `2^32 - 1` total counts.
//!
//! The coder follows the classic low/high/pending-bits construction. Each
//! normalization step emits exactly one bit, so the finished stream length is
//! the ideal codelength plus a two-bit flush plus truncation loss of roughly
//! `total / 2^60` bits per symbol.

use crate::entropy::Bitstream;
use crate::error::{Error, Result};

const PRECISION: u32 = 62;
const TOP: u64 = (1 << PRECISION) - 1;
const HALF: u64 = 1 << (PRECISION - 1);
const QUARTER: u64 = 1 << (PRECISION - 2);

/// Largest frequency total accepted by the coder.
pub const MAX_TOTAL: u64 = u32::MAX as u64;

/// Target total used when quantizing real-valued probabilities.
const QUANT_TOTAL: f64 = (1u64 << 31) as f64;

/// Termination overhead budget in bits for a finished stream.
pub const TERMINATION_BUDGET_BITS: u64 = 32;

/// Integer frequency table stored as cumulative counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frequencies {
    cumulative: Vec<u64>,
}

impl Frequencies {
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(counts.len() + 1);
        let mut acc = 0u64;
        cumulative.push(0);
        for &c in counts {
            acc = acc
                .checked_add(c)
                .ok_or_else(|| Error::contract("frequency total overflows"))?;
            cumulative.push(acc);
        }
        if acc == 0 || acc > MAX_TOTAL {
            return Err(Error::contract(format!("frequency total {acc} out of range")));
        }
        Ok(Self { cumulative })
    }

    /// Quantizes base-2 log-probabilities. Entries equal to `-inf` are outside
    /// the support and get count 0; every other entry gets at least 1.
    pub fn from_log2_probs(log2_probs: &[f64]) -> Result<Self> {
        let counts: Vec<u64> = log2_probs
            .iter()
            .map(|&lp| {
                if lp == f64::NEG_INFINITY {
                    0
                } else {
                    ((lp.exp2() * QUANT_TOTAL).round() as u64).max(1)
                }
            })
            .collect();
        Self::from_counts(&counts)
    }

    pub fn symbols(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn total(&self) -> u64 {
        *self.cumulative.last().unwrap()
    }

    pub fn frequency(&self, symbol: usize) -> u64 {
        self.cumulative[symbol + 1] - self.cumulative[symbol]
    }

    fn lookup(&self, target: u64) -> usize {
        // Last index whose cumulative start is <= target.
        self.cumulative.partition_point(|&c| c <= target) - 1
    }
}

#[derive(Debug)]
pub struct ArithmeticEncoder {
    low: u64,
    high: u64,
    pending: u64,
    out: Bitstream,
}

impl Default for ArithmeticEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArithmeticEncoder {
    pub fn new() -> Self {
        Self { low: 0, high: TOP, pending: 0, out: Bitstream::new() }
    }

    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    /// Narrows the interval to `[cum_low, cum_low + freq) / total`.
    pub fn encode_range(&mut self, cum_low: u64, freq: u64, total: u64) -> Result<()> {
        if freq == 0 {
            return Err(Error::contract("encoding a zero-frequency symbol"));
        }
        if total > MAX_TOTAL || cum_low + freq > total {
            return Err(Error::contract(format!(
                "bad range [{cum_low}, {}) of {total}",
                cum_low + freq
            )));
        }
        let range = (self.high - self.low + 1) as u128;
        self.high = self.low + (range * (cum_low + freq) as u128 / total as u128) as u64 - 1;
        self.low += (range * cum_low as u128 / total as u128) as u64;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
        Ok(())
    }

    pub fn encode_symbol(&mut self, freqs: &Frequencies, symbol: usize) -> Result<()> {
        if symbol >= freqs.symbols() {
            return Err(Error::contract(format!(
                "symbol {symbol} outside alphabet of {}",
                freqs.symbols()
            )));
        }
        self.encode_range(freqs.cumulative[symbol], freqs.frequency(symbol), freqs.total())
    }

    /// Codes `value` from a flat distribution over `0..range`, splitting
    /// ranges wider than the frequency limit into 16-bit digits.
    pub fn encode_uniform(&mut self, value: u64, range: u64) -> Result<()> {
        if value >= range {
            return Err(Error::contract(format!("uniform value {value} not below {range}")));
        }
        if range <= MAX_TOTAL {
            return self.encode_range(value, 1, range);
        }
        let high_range = ((range - 1) >> 16) + 1;
        let high = value >> 16;
        self.encode_uniform(high, high_range)?;
        self.encode_range(value & 0xffff, 1, low_digit_range(high, high_range, range))
    }

    /// Bits emitted so far, not counting the final flush.
    pub fn bits_written(&self) -> u64 {
        self.out.len() + self.pending
    }

    pub fn finish(mut self) -> Bitstream {
        self.pending += 1;
        if self.low < QUARTER {
            self.emit(false);
        } else {
            self.emit(true);
        }
        self.out
    }
}

fn low_digit_range(high: u64, high_range: u64, range: u64) -> u64 {
    if high == high_range - 1 {
        ((range - 1) & 0xffff) + 1
    } else {
        1 << 16
    }
}

#[derive(Debug)]
pub struct ArithmeticDecoder<'a> {
    input: &'a Bitstream,
    pos: u64,
    low: u64,
    high: u64,
    value: u64,
}

impl<'a> ArithmeticDecoder<'a> {
    pub fn new(input: &'a Bitstream) -> Self {
        let mut dec = Self { input, pos: 0, low: 0, high: TOP, value: 0 };
        for _ in 0..PRECISION {
            dec.value = (dec.value << 1) | dec.next_bit() as u64;
        }
        dec
    }

    fn next_bit(&mut self) -> bool {
        let bit = self.input.get(self.pos).unwrap_or(false);
        self.pos += 1;
        bit
    }

    fn check_overrun(&self) -> Result<()> {
        // A valid stream is never read more than PRECISION bits past its end.
        if self.pos > self.input.len() + PRECISION as u64 {
            Err(Error::decode("stream is truncated or corrupt"))
        } else {
            Ok(())
        }
    }

    fn target(&self, total: u64) -> u64 {
        let range = (self.high - self.low + 1) as u128;
        let offset = (self.value - self.low) as u128;
        (((offset + 1) * total as u128 - 1) / range) as u64
    }

    fn consume(&mut self, cum_low: u64, freq: u64, total: u64) {
        let range = (self.high - self.low + 1) as u128;
        self.high = self.low + (range * (cum_low + freq) as u128 / total as u128) as u64 - 1;
        self.low += (range * cum_low as u128 / total as u128) as u64;
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.next_bit() as u64;
        }
    }

    pub fn decode_symbol(&mut self, freqs: &Frequencies) -> Result<usize> {
        let total = freqs.total();
        let target = self.target(total);
        if target >= total {
            return Err(Error::decode("code value outside the coding interval"));
        }
        let symbol = freqs.lookup(target);
        self.consume(freqs.cumulative[symbol], freqs.frequency(symbol), total);
        self.check_overrun()?;
        Ok(symbol)
    }

    pub fn decode_uniform(&mut self, range: u64) -> Result<u64> {
        if range == 0 {
            return Err(Error::contract("uniform decode over an empty range"));
        }
        if range <= MAX_TOTAL {
            let v = self.target(range);
            if v >= range {
                return Err(Error::decode("code value outside the coding interval"));
            }
            self.consume(v, 1, range);
            self.check_overrun()?;
            return Ok(v);
        }
        let high_range = ((range - 1) >> 16) + 1;
        let high = self.decode_uniform(high_range)?;
        let low = self.decode_uniform(low_digit_range(high, high_range, range))?;
        Ok((high << 16) | low)
    }
}
