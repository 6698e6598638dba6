//! Entropy-coding backend: arithmetic coder, KT estimation and exact
//! combinatorial codelengths.

mod arith;
mod bitstream;
mod combinatorics;
mod kt;

pub use arith::{
    ArithmeticDecoder, ArithmeticEncoder, Frequencies, MAX_TOTAL, TERMINATION_BUDGET_BITS,
};
pub use bitstream::Bitstream;
pub use combinatorics::{binomial_codelength, log2_binomial, uniform_integer_codelength};
pub(crate) use combinatorics::{composition_codelength, hypergeometric_codelength, ln_binomial};
pub use kt::{kt_predict, KtCounter};

/// Result of coding one object.
///
/// `ideal_bits` is the exact sum of `-log2 p` over all coded events,
/// including any parameter header; `header_bits` is the part of it spent on
/// the header. `actual_bits` is present only when a real stream was produced.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CodeLength {
    pub ideal_bits: f64,
    pub header_bits: f64,
    pub actual_bits: Option<u64>,
}

impl CodeLength {
    /// Ideal bits without the parameter header.
    pub fn payload_bits(&self) -> f64 {
        self.ideal_bits - self.header_bits
    }
}
