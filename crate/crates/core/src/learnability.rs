//! From grammar cost and per-occurrence savings to years-to-learn scores.
//!
//! A restriction pays for itself once the accumulated encoding savings cover
//! the grammar-description overhead; dividing the occurrences needed for
//! that crossover by annual exposure yields a predicted learning time. The
//! scores are log-scale and best read comparatively: annual exposure shifts
//! every construction's score by the same constant.

use thiserror::Error;

use crate::constructions::{
    grammar_delta_bits, savings_per_diagnostic_occurrence, ConstructionError, ConstructionSpec,
    Smoothing, SymbolInventory,
};

#[derive(Debug, Error, PartialEq)]
pub enum LearnabilityError {
    #[error("entrenchment is undefined for a construction that never occurs")]
    ZeroFrequency,
    #[error("exposure model requires positive word counts, got corpus={corpus}, annual={annual}")]
    InvalidExposure { corpus: u64, annual: u64 },
}

/// Corpus size behind the counts and the words a learner hears per year.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExposureModel {
    corpus_total_words: u64,
    annual_exposure_words: u64,
}

impl ExposureModel {
    pub fn new(corpus_total_words: u64, annual_exposure_words: u64) -> Result<Self, LearnabilityError> {
        if corpus_total_words == 0 || annual_exposure_words == 0 {
            return Err(LearnabilityError::InvalidExposure {
                corpus: corpus_total_words,
                annual: annual_exposure_words,
            });
        }
        Ok(ExposureModel {
            corpus_total_words,
            annual_exposure_words,
        })
    }

    pub fn corpus_total_words(self) -> u64 {
        self.corpus_total_words
    }

    pub fn annual_exposure_words(self) -> u64 {
        self.annual_exposure_words
    }
}

/// Occurrences of the diagnostic form needed before the restricted grammar
/// wins the two-part comparison; `Unlearnable` when savings never accumulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccurrencesNeeded {
    Finite(u64),
    Unlearnable,
}

impl OccurrencesNeeded {
    pub fn is_unlearnable(self) -> bool {
        matches!(self, OccurrencesNeeded::Unlearnable)
    }

    /// Numeric view for reports: `Unlearnable` maps to +∞.
    pub fn as_f64(self) -> f64 {
        match self {
            OccurrencesNeeded::Finite(m) => m as f64,
            OccurrencesNeeded::Unlearnable => f64::INFINITY,
        }
    }
}

/// Predicted years of exposure; `Unlearnable` propagates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YearsToLearn {
    Finite(f64),
    Unlearnable,
}

impl YearsToLearn {
    pub fn as_f64(self) -> f64 {
        match self {
            YearsToLearn::Finite(y) => y,
            YearsToLearn::Unlearnable => f64::INFINITY,
        }
    }
}

/// Smallest integer `m` with `m·savings ≥ delta`.
///
/// The comparison is evaluated in binary64, and the result is exact with
/// respect to that arithmetic: `(m-1)·savings < delta ≤ m·savings`.
pub fn occurrences_needed(delta_bits: f64, savings_bits: f64) -> OccurrencesNeeded {
    debug_assert!(delta_bits >= 0.0);
    if delta_bits <= 0.0 {
        return OccurrencesNeeded::Finite(0);
    }
    if savings_bits <= 0.0 {
        return OccurrencesNeeded::Unlearnable;
    }
    let q = delta_bits / savings_bits;
    if q >= 9.0e18 {
        // beyond integer range; effectively never, but still learnable
        return OccurrencesNeeded::Finite(u64::MAX);
    }
    let mut m = q.ceil().max(0.0);
    // guard against ceil landing one step off the f64 comparison boundary
    while m >= 1.0 && (m - 1.0) * savings_bits >= delta_bits {
        m -= 1.0;
    }
    while m * savings_bits < delta_bits {
        m += 1.0;
    }
    OccurrencesNeeded::Finite(m as u64)
}

/// Real-valued crossover point `delta/savings`, without the integer ceiling.
/// `None` when savings ≤ 0 with positive delta.
pub fn occurrences_needed_real(delta_bits: f64, savings_bits: f64) -> Option<f64> {
    debug_assert!(delta_bits >= 0.0);
    if delta_bits <= 0.0 {
        return Some(0.0);
    }
    if savings_bits <= 0.0 {
        return None;
    }
    Some(delta_bits / savings_bits)
}

/// Diagnostic occurrences a learner hears per year, extrapolated from the
/// corpus rate.
pub fn occurrences_per_year(diagnostic_count: u64, exposure: ExposureModel) -> f64 {
    (diagnostic_count as f64 * exposure.annual_exposure_words() as f64)
        / exposure.corpus_total_words() as f64
}

pub fn years_to_learn(needed: OccurrencesNeeded, o_year: f64) -> YearsToLearn {
    match needed {
        OccurrencesNeeded::Unlearnable => YearsToLearn::Unlearnable,
        OccurrencesNeeded::Finite(0) => YearsToLearn::Finite(0.0),
        OccurrencesNeeded::Finite(_) if o_year <= 0.0 => YearsToLearn::Unlearnable,
        OccurrencesNeeded::Finite(m) => YearsToLearn::Finite(m as f64 / o_year),
    }
}

/// `log10(1/N_years)`: higher is easier to learn. `Unlearnable` maps to -∞.
pub fn learnability_score(n_years: YearsToLearn) -> f64 {
    match n_years {
        YearsToLearn::Unlearnable => f64::NEG_INFINITY,
        YearsToLearn::Finite(y) if y <= 0.0 => f64::INFINITY,
        YearsToLearn::Finite(y) => -y.log10(),
    }
}

/// `log10(O_year)`: how often the learner hears the construction.
pub fn entrenchment_score(
    diagnostic_count: u64,
    exposure: ExposureModel,
) -> Result<f64, LearnabilityError> {
    if diagnostic_count == 0 {
        return Err(LearnabilityError::ZeroFrequency);
    }
    Ok(occurrences_per_year(diagnostic_count, exposure).log10())
}

/// Everything the report and the correlation analysis need for one
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnabilityResult {
    pub construction_id: String,
    pub grammar_delta: f64,
    pub savings: f64,
    pub o_needed: OccurrencesNeeded,
    pub o_year: f64,
    pub n_years: YearsToLearn,
    pub learnability: f64,
    pub entrenchment: f64,
}

/// Runs the full per-construction pipeline: validation, costs, crossover,
/// exposure extrapolation, and both scores.
pub fn evaluate_construction(
    spec: &ConstructionSpec,
    inventory: SymbolInventory,
    exposure: ExposureModel,
    smoothing: Smoothing,
) -> Result<LearnabilityResult, ConstructionError> {
    spec.validate()?;
    let delta = grammar_delta_bits(spec, inventory);
    let savings = savings_per_diagnostic_occurrence(spec, smoothing)?;
    let o_needed = occurrences_needed(delta.bits(), savings);
    let diag = spec.diagnostic_count();
    let o_year = occurrences_per_year(diag, exposure);
    let n_years = years_to_learn(o_needed, o_year);
    let learnability = learnability_score(n_years);
    let entrenchment =
        entrenchment_score(diag, exposure).expect("validated diagnostic count is positive");
    Ok(LearnabilityResult {
        construction_id: spec.id.clone(),
        grammar_delta: delta.bits(),
        savings,
        o_needed,
        o_year,
        n_years,
        learnability,
        entrenchment,
    })
}
