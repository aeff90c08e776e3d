//! Exact-rational helpers shared across the crate.
//!
//! Probabilities and schedule values are kept as arbitrary-precision
//! rationals for as long as the math is exact; the helpers here do the
//! controlled hand-off into binary64 (deterministic nearest-even rounding,
//! no libm involved except `log2` where a documented 1e-12 budget applies).

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Failure to parse a `"num/den"` or integer literal as an exact rational.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal {0:?}")]
    BadInteger(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"3/4"`, `"-1/8"` or a bare integer like `"2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, RationalParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let parse_int = |part: &str| {
        part.trim()
            .parse::<BigInt>()
            .map_err(|_| RationalParseError::BadInteger(s.to_owned()))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(RationalParseError::ZeroDenominator(s.to_owned()));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Renders a rational in the same `"num/den"` form `parse_rational` accepts.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn magnitude_bits(n: &BigInt) -> u64 {
    n.magnitude().bits()
}

/// Nearest binary64 value of an exact rational.
///
/// Works for magnitudes far outside the `f64` exponent range (saturating to
/// 0 or infinity) where the naive `numer/denom` double division would yield
/// `inf/inf = NaN`. Rounding is nearest-even with a sticky bit from the
/// division remainder.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let sign = match r.numer().sign() {
        Sign::NoSign => return 0.0,
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift = magnitude_bits(&num) as i64 - magnitude_bits(&den) as i64;
    // Scale so the integer quotient carries 56..58 significant bits: enough
    // for a 53-bit mantissa plus guard bits, with the remainder folded into
    // the sticky position.
    let s = 57 - shift;
    let (scaled, den) = if s >= 0 {
        (num << s as u64, den)
    } else {
        (num, den << (-s) as u64)
    };
    let q = &scaled / &den;
    let rem = scaled - &q * &den;
    let mut q: u64 = q.try_into().expect("scaled quotient fits in 64 bits");
    if !rem.is_zero() {
        q |= 1;
    }
    sign * (q as f64) * pow2(-s as i32)
}

/// Exact power of two as `f64`, saturating outside the exponent range.
fn pow2(e: i32) -> f64 {
    if e >= 1024 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        // subnormal range
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// `log2` of a positive big integer, accurate to well under 1e-12.
///
/// Uses the top 64 bits of the magnitude plus the bit length, so it stays
/// finite for integers far beyond `f64` range.
pub fn log2_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let mag = n.magnitude();
    let bits = mag.bits();
    if bits <= 64 {
        let v: u64 = mag.try_into().expect("fits in u64");
        (v as f64).log2()
    } else {
        let top: u64 = (mag >> (bits - 64))
            .try_into()
            .expect("top 64 bits fit in u64");
        (top as f64).log2() + (bits - 64) as f64
    }
}

/// `log2` of a positive rational, via `log2(num) - log2(den)`.
pub fn log2_ratio(r: &BigRational) -> f64 {
    debug_assert!(r.is_positive());
    log2_bigint(r.numer()) - log2_bigint(r.denom())
}
