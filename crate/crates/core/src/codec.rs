//! Code-length primitives for two-part minimum-description-length accounting.
//!
//! Everything here is measured in bits and computed from exact rational
//! probabilities. Only lengths are produced, never codewords; the logarithm
//! is evaluated in binary64 with an error budget of 1e-12 per term, while
//! the integer ceiling is computed exactly on the rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ratio::{log2_ratio, ratio_to_f64};

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("code length of a zero-probability event is infinite")]
    ZeroProbability,
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(String),
    #[error("form {form:?} occurs {count} times but has zero probability under the model")]
    IncompatibleModel { form: String, count: u64 },
}

/// Exact rational probability in `[0, 1]`.
///
/// Zero is representable (events the model rules out); operations that need
/// positivity reject it with [`CodecError::ZeroProbability`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Probability(BigRational);

impl Probability {
    pub fn new(value: BigRational) -> Result<Self, CodecError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(CodecError::ProbabilityOutOfRange(value.to_string()));
        }
        Ok(Probability(value))
    }

    /// Convenience constructor for `num/den` with small operands.
    pub fn from_u64(num: u64, den: u64) -> Result<Self, CodecError> {
        if den == 0 {
            return Err(CodecError::ProbabilityOutOfRange(format!("{num}/0")));
        }
        Self::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn one() -> Self {
        Probability(BigRational::one())
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

/// A nonnegative number of bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CodeLength(f64);

impl CodeLength {
    pub fn new(bits: f64) -> Self {
        debug_assert!(bits >= 0.0, "code length must be nonnegative, got {bits}");
        CodeLength(bits)
    }

    pub const ZERO: CodeLength = CodeLength(0.0);

    pub fn bits(self) -> f64 {
        self.0
    }
}

impl std::ops::Add for CodeLength {
    type Output = CodeLength;
    fn add(self, rhs: CodeLength) -> CodeLength {
        CodeLength(self.0 + rhs.0)
    }
}

impl std::fmt::Display for CodeLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// `-log2(p)`: the real-valued length of an ideal code for an event of
/// probability `p`. Strictly decreasing in `p`; 0 for the certain event.
pub fn ideal_code_length(p: &Probability) -> Result<CodeLength, CodecError> {
    if p.is_zero() {
        return Err(CodecError::ZeroProbability);
    }
    // -log2(p) with p ≤ 1 is ≥ 0 up to rounding; clamp the certain event.
    Ok(CodeLength::new((-log2_ratio(p.ratio())).max(0.0)))
}

/// `ceil(-log2(p))`, computed exactly on the rational: the smallest integer
/// `k` with `p ≥ 2^-k`.
pub fn integer_code_length(p: &Probability) -> Result<CodeLength, CodecError> {
    if p.is_zero() {
        return Err(CodecError::ZeroProbability);
    }
    let num = p.ratio().numer();
    let den = p.ratio().denom();
    if num >= den {
        return Ok(CodeLength::ZERO); // p = 1
    }
    // num·2^k grows past den within 2 steps of the bit-length gap.
    let mut k = (den.bits() - num.bits()).saturating_sub(1);
    while (num << k) < *den {
        k += 1;
    }
    Ok(CodeLength::new(k as f64))
}

/// Total bits to encode a corpus of per-form counts under per-form
/// probabilities: `Σ_form count(form) · ideal_code_length(prob(form))`.
///
/// Forms are visited in sorted order, so the result is bit-identical under
/// reordering of the input maps' construction.
pub fn corpus_code_length(
    counts: &BTreeMap<String, u64>,
    probs: &BTreeMap<String, Probability>,
) -> Result<CodeLength, CodecError> {
    let mut total = 0.0;
    for (form, &count) in counts {
        if count == 0 {
            continue;
        }
        let p = probs
            .get(form)
            .filter(|p| !p.is_zero())
            .ok_or_else(|| CodecError::IncompatibleModel {
                form: form.clone(),
                count,
            })?;
        total += count as f64 * ideal_code_length(p)?.bits();
    }
    Ok(CodeLength::new(total))
}

/// Two-part total: grammar description bits plus data-encoding bits.
pub fn two_part_total(grammar_bits: CodeLength, data_bits: CodeLength) -> CodeLength {
    grammar_bits + data_bits
}
