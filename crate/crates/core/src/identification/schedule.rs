//! Lower-approximation schedules: computable, nondecreasing-in-step
//! functions φ(x, k) converging to a hypothesis' mass q(x) from below.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ratio::ratio_to_f64;

/// How a hypothesis' masses are approximated from below.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// φ(x, k) = q(x)·(1 − rate^k); the gap to q(x) shrinks geometrically.
    GeometricGap { rate: BigRational },
    /// Explicit per-element step tables: φ(x, k) is the value of the last
    /// row with step ≤ k (0 before the first row). `gap` declares the
    /// residual q(x) − φ(x, K_last) the table is allowed to leave.
    Staircase {
        /// rows[element_position] = [(step, value), …], steps increasing
        rows: Vec<Vec<(u64, BigRational)>>,
        gap: BigRational,
    },
}

impl Schedule {
    /// Exact value of φ(x, k); `q` is the element's mass under the
    /// hypothesis (ignored by staircase tables).
    pub fn eval_exact(&self, q: &BigRational, element_pos: usize, k: u64) -> BigRational {
        match self {
            Schedule::GeometricGap { rate } => {
                let decay = rational_pow(rate, k);
                q * (BigRational::one() - decay)
            }
            Schedule::Staircase { rows, .. } => rows
                .get(element_pos)
                .map(|table| staircase_value(table, k).cloned().unwrap_or_else(BigRational::zero))
                .unwrap_or_else(BigRational::zero),
        }
    }
}

fn staircase_value(table: &[(u64, BigRational)], k: u64) -> Option<&BigRational> {
    let idx = table.partition_point(|(step, _)| *step <= k);
    idx.checked_sub(1).map(|i| &table[i].1)
}

/// Binary exponentiation on exact rationals.
pub(crate) fn rational_pow(base: &BigRational, mut exp: u64) -> BigRational {
    let mut result = BigRational::one();
    let mut acc = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result *= &acc;
        }
        exp >>= 1;
        if exp > 0 {
            acc = &acc * &acc;
        }
    }
    result
}

/// Binary exponentiation in f64: multiplication-only, so the result is
/// identical on every platform that implements IEEE 754 (no libm pow).
pub(crate) fn det_pow(base: f64, mut exp: u64) -> f64 {
    let mut result = 1.0;
    let mut acc = base;
    while exp > 0 {
        if exp & 1 == 1 {
            result *= acc;
        }
        exp >>= 1;
        if exp > 0 {
            acc *= acc;
        }
    }
    result
}

/// Schedule pre-resolved to f64 for the simulation hot path. Keeps the
/// per-element mass alongside so evaluation needs no rational arithmetic.
#[derive(Debug, Clone)]
pub(crate) enum CompiledSchedule {
    Geometric { rate: f64, q: Vec<f64> },
    Staircase { rows: Vec<Vec<(u64, f64)>> },
}

impl CompiledSchedule {
    pub(crate) fn compile(schedule: &Schedule, masses: &[BigRational]) -> Self {
        match schedule {
            Schedule::GeometricGap { rate } => CompiledSchedule::Geometric {
                rate: ratio_to_f64(rate),
                q: masses.iter().map(ratio_to_f64).collect(),
            },
            Schedule::Staircase { rows, .. } => CompiledSchedule::Staircase {
                rows: rows
                    .iter()
                    .map(|table| {
                        table
                            .iter()
                            .map(|(step, v)| (*step, ratio_to_f64(v)))
                            .collect()
                    })
                    .collect(),
            },
        }
    }

    pub(crate) fn eval(&self, element_pos: usize, k: u64) -> f64 {
        match self {
            CompiledSchedule::Geometric { rate, q } => {
                q.get(element_pos).copied().unwrap_or(0.0) * (1.0 - det_pow(*rate, k))
            }
            CompiledSchedule::Staircase { rows } => rows
                .get(element_pos)
                .and_then(|table| staircase_value_f64(table, k))
                .unwrap_or(0.0),
        }
    }
}

fn staircase_value_f64(table: &[(u64, f64)], k: u64) -> Option<f64> {
    let idx = table.partition_point(|(step, _)| *step <= k);
    idx.checked_sub(1).map(|i| table[i].1)
}
