//! Simulation of identification-in-the-limit over an enumerated hypothesis
//! family.
//!
//! A run draws i.i.d. samples from the designated true distribution,
//! maintains an anytime confidence band around the empirical frequencies,
//! permanently eliminates hypotheses whose lower approximations overshoot
//! the band, and guesses the least surviving index that is also close to
//! the data from below. With the truth present in the family, the guess
//! sequence converges to the least index carrying the true distribution.

pub mod diagnostics;
pub mod rng;
pub mod run;
pub mod schedule;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ratio::ratio_to_f64;
use schedule::Schedule;

pub use diagnostics::{separation_diagnostics, CompetitorWitness, SeparationDiagnostics};
pub use run::{
    confidence_radius, eliminate_step, run_identification, sample_iid, select_guess,
    IdentificationConfig, RunTrace, StepRecord,
};

/// The ordered countable set of utterances. Positions here are 0-based;
/// the domain-level index `i(x)` of an element is its position plus one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub elements: Vec<String>,
}

impl Language {
    pub fn new(elements: Vec<String>) -> Self {
        Language { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn name(&self, pos: usize) -> &str {
        &self.elements[pos]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmfKind {
    /// total mass exactly 1
    Probability,
    /// total mass at most 1
    Semiprobability,
}

/// Exact-rational (semi)probability masses, aligned with a `Language`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPmf {
    pub masses: Vec<BigRational>,
    pub kind: PmfKind,
}

impl RationalPmf {
    pub fn probability(masses: Vec<BigRational>) -> Self {
        RationalPmf {
            masses,
            kind: PmfKind::Probability,
        }
    }

    pub fn semiprobability(masses: Vec<BigRational>) -> Self {
        RationalPmf {
            masses,
            kind: PmfKind::Semiprobability,
        }
    }

    pub fn total(&self) -> BigRational {
        self.masses.iter().sum()
    }

    pub fn mass(&self, pos: usize) -> BigRational {
        self.masses.get(pos).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// A distribution that can be sampled or summarized: an explicit finite pmf,
/// or the built-in halving tail with mass `2^-i` on the i-th element of an
/// unbounded language.
#[derive(Debug, Clone, PartialEq)]
pub enum Pmf {
    Finite(RationalPmf),
    GeometricHalving,
}

/// One enumerated candidate: its masses and the schedule approximating them
/// from below.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub pmf: RationalPmf,
    pub schedule: Schedule,
}

/// The enumerated family `q_1, …, q_m` with the least index `k` known to
/// carry the sampling distribution. `true_index` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFamily {
    pub language: Language,
    pub hypotheses: Vec<Hypothesis>,
    pub true_index: usize,
}

impl HypothesisFamily {
    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// The hypothesis at `true_index`; call only after `validate_family`.
    pub fn truth(&self) -> &Hypothesis {
        &self.hypotheses[self.true_index - 1]
    }
}

/// First violated family invariant, with a witness.
#[derive(Debug, Error, PartialEq)]
pub enum FamilyViolation {
    #[error("language has no elements")]
    EmptyLanguage,
    #[error("language lists element {0:?} twice")]
    DuplicateElement(String),
    #[error("hypothesis {hypothesis} has {got} masses for {expected} elements")]
    WrongArity {
        hypothesis: usize,
        expected: usize,
        got: usize,
    },
    #[error("hypothesis {hypothesis} assigns negative mass to {element:?}")]
    NegativeMass { hypothesis: usize, element: String },
    #[error("hypothesis {hypothesis} has total mass {total} > 1")]
    TotalAboveOne { hypothesis: usize, total: String },
    #[error("hypothesis {hypothesis} is declared a probability but sums to {total}")]
    NotNormalized { hypothesis: usize, total: String },
    #[error("true_index {true_index} is outside 1..={family_size}")]
    TrueIndexOutOfRange {
        true_index: usize,
        family_size: usize,
    },
    #[error("the true hypothesis {0} must be a full probability, not a semiprobability")]
    TruthNotProbability(usize),
    #[error("true_index {true_index} is not least: hypothesis {duplicate} has identical masses")]
    TruthNotLeast {
        true_index: usize,
        duplicate: usize,
    },
    #[error("hypothesis {hypothesis}: geometric-gap rate {rate} is outside (0, 1)")]
    BadRate { hypothesis: usize, rate: String },
    #[error("hypothesis {hypothesis}: staircase value at ({element:?}, step {step}) is negative")]
    ScheduleNegative {
        hypothesis: usize,
        element: String,
        step: u64,
    },
    #[error("hypothesis {hypothesis}: staircase steps not increasing at ({element:?}, step {step})")]
    StaircaseUnordered {
        hypothesis: usize,
        element: String,
        step: u64,
    },
    #[error(
        "hypothesis {hypothesis}: schedule decreases after ({element:?}, step {step}) — not monotone"
    )]
    ScheduleNotMonotone {
        hypothesis: usize,
        element: String,
        step: u64,
    },
    #[error("hypothesis {hypothesis}: schedule exceeds the mass of {element:?} at step {step}")]
    ScheduleAboveMass {
        hypothesis: usize,
        element: String,
        step: u64,
    },
    #[error(
        "hypothesis {hypothesis}: schedule for {element:?} stops {residual} short of the mass, beyond the declared gap {gap}"
    )]
    ScheduleGapExceeded {
        hypothesis: usize,
        element: String,
        residual: String,
        gap: String,
    },
    #[error("hypothesis {hypothesis}: declared staircase gap {gap} is negative")]
    NegativeGap { hypothesis: usize, gap: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum IdentificationError {
    #[error("invalid family: {0}")]
    InvalidFamily(#[from] FamilyViolation),
    #[error("operation requires a full probability mass function")]
    NotAProbability,
    #[error("empty sample")]
    EmptySample,
    #[error("every hypothesis was eliminated at step {at_step}; the truth is not in the family or the band failed")]
    FamilyExhausted { at_step: u64 },
    #[error("delta must lie strictly between 0 and 1, got {0}")]
    InvalidDelta(f64),
    #[error(
        "schedule of hypothesis {hypothesis} never approaches the mass of {element:?} within alpha/2"
    )]
    ScheduleNeverCloses { hypothesis: usize, element: String },
}

/// Steps at which schedule monotonicity and the mass bound are spot-checked.
const SCHEDULE_GRID: [u64; 9] = [0, 1, 2, 3, 4, 8, 16, 32, 64];

/// Checks every family invariant and reports the first violation found.
pub fn validate_family(family: &HypothesisFamily) -> Result<(), FamilyViolation> {
    let lang = &family.language;
    if lang.is_empty() {
        return Err(FamilyViolation::EmptyLanguage);
    }
    for (i, e) in lang.elements.iter().enumerate() {
        if lang.elements[..i].contains(e) {
            return Err(FamilyViolation::DuplicateElement(e.clone()));
        }
    }
    for (h0, hyp) in family.hypotheses.iter().enumerate() {
        let h = h0 + 1;
        if hyp.pmf.masses.len() != lang.len() {
            return Err(FamilyViolation::WrongArity {
                hypothesis: h,
                expected: lang.len(),
                got: hyp.pmf.masses.len(),
            });
        }
        for (pos, mass) in hyp.pmf.masses.iter().enumerate() {
            if mass.is_negative() {
                return Err(FamilyViolation::NegativeMass {
                    hypothesis: h,
                    element: lang.name(pos).to_owned(),
                });
            }
        }
        let total = hyp.pmf.total();
        if total > BigRational::one() {
            return Err(FamilyViolation::TotalAboveOne {
                hypothesis: h,
                total: total.to_string(),
            });
        }
        if hyp.pmf.kind == PmfKind::Probability && !total.is_one() {
            return Err(FamilyViolation::NotNormalized {
                hypothesis: h,
                total: total.to_string(),
            });
        }
        validate_schedule(h, hyp, lang)?;
    }
    let k = family.true_index;
    if k == 0 || k > family.len() {
        return Err(FamilyViolation::TrueIndexOutOfRange {
            true_index: k,
            family_size: family.len(),
        });
    }
    let truth = &family.hypotheses[k - 1];
    if truth.pmf.kind != PmfKind::Probability {
        return Err(FamilyViolation::TruthNotProbability(k));
    }
    for (i0, hyp) in family.hypotheses[..k - 1].iter().enumerate() {
        if hyp.pmf.masses == truth.pmf.masses {
            return Err(FamilyViolation::TruthNotLeast {
                true_index: k,
                duplicate: i0 + 1,
            });
        }
    }
    Ok(())
}

fn validate_schedule(h: usize, hyp: &Hypothesis, lang: &Language) -> Result<(), FamilyViolation> {
    match &hyp.schedule {
        Schedule::GeometricGap { rate } => {
            if !rate.is_positive() || *rate >= BigRational::one() {
                return Err(FamilyViolation::BadRate {
                    hypothesis: h,
                    rate: rate.to_string(),
                });
            }
        }
        Schedule::Staircase { rows, gap } => {
            if gap.is_negative() {
                return Err(FamilyViolation::NegativeGap {
                    hypothesis: h,
                    gap: gap.to_string(),
                });
            }
            if rows.len() != lang.len() {
                return Err(FamilyViolation::WrongArity {
                    hypothesis: h,
                    expected: lang.len(),
                    got: rows.len(),
                });
            }
            for (pos, table) in rows.iter().enumerate() {
                let element = lang.name(pos);
                let mass = hyp.pmf.mass(pos);
                let mut prev: Option<&(u64, BigRational)> = None;
                for row in table {
                    if row.1.is_negative() {
                        return Err(FamilyViolation::ScheduleNegative {
                            hypothesis: h,
                            element: element.to_owned(),
                            step: row.0,
                        });
                    }
                    if let Some(p) = prev {
                        if row.0 <= p.0 {
                            return Err(FamilyViolation::StaircaseUnordered {
                                hypothesis: h,
                                element: element.to_owned(),
                                step: p.0,
                            });
                        }
                        if row.1 < p.1 {
                            return Err(FamilyViolation::ScheduleNotMonotone {
                                hypothesis: h,
                                element: element.to_owned(),
                                step: p.0,
                            });
                        }
                    }
                    if row.1 > mass {
                        return Err(FamilyViolation::ScheduleAboveMass {
                            hypothesis: h,
                            element: element.to_owned(),
                            step: row.0,
                        });
                    }
                    prev = Some(row);
                }
                let last = table.last().map(|r| r.1.clone()).unwrap_or_else(BigRational::zero);
                let residual = &mass - &last;
                if residual > *gap {
                    return Err(FamilyViolation::ScheduleGapExceeded {
                        hypothesis: h,
                        element: element.to_owned(),
                        residual: residual.to_string(),
                        gap: gap.to_string(),
                    });
                }
            }
        }
    }
    // grid spot-check: φ nondecreasing in k and bounded by the mass
    for pos in 0..lang.len() {
        let mass = hyp.pmf.mass(pos);
        let mut prev: Option<(u64, BigRational)> = None;
        for &k in &SCHEDULE_GRID {
            let value = hyp.schedule.eval_exact(&mass, pos, k);
            if value > mass {
                return Err(FamilyViolation::ScheduleAboveMass {
                    hypothesis: h,
                    element: lang.name(pos).to_owned(),
                    step: k,
                });
            }
            if let Some((pk, pv)) = &prev {
                if value < *pv {
                    return Err(FamilyViolation::ScheduleNotMonotone {
                        hypothesis: h,
                        element: lang.name(pos).to_owned(),
                        step: *pk,
                    });
                }
            }
            prev = Some((k, value));
        }
    }
    Ok(())
}

/// Mean of the element index under `p`: `Σ_x i(x)·p(x)` with 1-based
/// indices. Finite pmfs are summed directly; the halving tail has the
/// registered closed form 2.
pub fn mean_index(p: &Pmf) -> Result<f64, IdentificationError> {
    match p {
        Pmf::Finite(pmf) => {
            if pmf.kind != PmfKind::Probability {
                return Err(IdentificationError::NotAProbability);
            }
            let mut sum = BigRational::zero();
            for (pos, mass) in pmf.masses.iter().enumerate() {
                sum += mass * BigRational::from_integer(BigInt::from(pos as u64 + 1));
            }
            Ok(ratio_to_f64(&sum))
        }
        Pmf::GeometricHalving => Ok(2.0),
    }
}

/// Fraction of the sample equal to the element at `element_pos`, as an
/// exact rational.
pub fn empirical_frequency(
    sample: &[u32],
    element_pos: u32,
) -> Result<BigRational, IdentificationError> {
    if sample.is_empty() {
        return Err(IdentificationError::EmptySample);
    }
    let count = sample.iter().filter(|&&x| x == element_pos).count();
    Ok(BigRational::new(
        BigInt::from(count),
        BigInt::from(sample.len()),
    ))
}
