//! Judgment ingestion model, Pearson correlation, and its two-tailed
//! significance under the Student-t distribution.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::learnability::LearnabilityResult;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("correlation needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("correlation is undefined when an input has zero variance")]
    DegenerateInput,
    #[error("correlation inputs must be finite")]
    NonFiniteInput,
    #[error("only {matched} constructions join results with judgments; need at least 3")]
    InsufficientData { matched: usize },
    #[error("correlation coefficient {0} is outside [-1, 1]")]
    InvalidCoefficient(f64),
}

/// Mean ratings for one construction's sentence pair on the 1–5 scale
/// (1 = clearly unacceptable, 5 = clearly acceptable).
#[derive(Debug, Clone, PartialEq)]
pub struct JudgmentRow {
    pub construction_id: String,
    pub mean_grammatical: f64,
    pub mean_ungrammatical: f64,
    pub n_respondents: u32,
}

/// One correlation line of the analysis output.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub variable: String,
    pub r: f64,
    pub p_two_tailed: f64,
    pub n_points: usize,
}

/// Rating of the restricted (ungrammatical) sentence minus rating of the
/// licit one; 4 is the ceiling, -4 the floor.
pub fn relative_grammaticality(row: &JudgmentRow) -> f64 {
    row.mean_ungrammatical - row.mean_grammatical
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(StatsError::TooFewPoints(xs.len()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteInput);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

// Lanczos approximation (g = 7, 9 terms); relative error below 1e-13 on the
// positive axis.
fn ln_gamma(x: f64) -> f64 {
    // published coefficients kept verbatim; the excess digits round away
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection Γ(x)Γ(1−x) = π/sin(πx)
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + 7.5;
        let mut sum = COEF[0];
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            sum += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
    }
}

// Continued fraction for the incomplete beta (modified Lentz), evaluated
// until the step factor is within 1e-15 of 1.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Two-tailed p-value for a Pearson coefficient `r` over `n` points, from
/// `t = r·sqrt((n−2)/(1−r²))` against Student-t with `n−2` degrees of
/// freedom. With that substitution the tail probability reduces to
/// `I_{1−r²}(ν/2, 1/2)`.
pub fn p_value_two_tailed(r: f64, n: usize) -> Result<f64, StatsError> {
    if n < 3 {
        return Err(StatsError::TooFewPoints(n));
    }
    if !r.is_finite() || r.abs() > 1.0 + 1e-12 {
        return Err(StatsError::InvalidCoefficient(r));
    }
    let r = r.clamp(-1.0, 1.0);
    if r.abs() == 1.0 {
        return Ok(0.0);
    }
    let nu = (n - 2) as f64;
    let x = 1.0 - r * r; // equals ν/(ν + t²)
    Ok(reg_inc_beta(nu / 2.0, 0.5, x).clamp(0.0, 1.0))
}

/// Why a construction was left out of the correlation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExclusionReason {
    /// present in results but not in the judgment file
    NoJudgment,
    /// judged but missing from the results
    NoResult,
    /// learnability is -∞ (unlearnable) or otherwise non-finite
    NonFiniteScore,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub construction_id: String,
    pub reason: ExclusionReason,
}

/// Both correlation lines plus the bookkeeping of what was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationOutcome {
    pub learnability: CorrelationReport,
    pub entrenchment: CorrelationReport,
    pub excluded: Vec<Exclusion>,
}

/// Joins per-construction results with judgments on construction id and
/// correlates relative grammaticality against the learnability score and
/// against the entrenchment score. Non-joining or non-finite constructions
/// are excluded and reported, never silently dropped.
pub fn correlate(
    results: &[LearnabilityResult],
    judgments: &[JudgmentRow],
) -> Result<CorrelationOutcome, StatsError> {
    let by_id: BTreeMap<&str, &LearnabilityResult> = results
        .iter()
        .map(|r| (r.construction_id.as_str(), r))
        .collect();
    let judged: BTreeMap<&str, &JudgmentRow> = judgments
        .iter()
        .map(|j| (j.construction_id.as_str(), j))
        .collect();

    let mut excluded = Vec::new();
    let mut learn_x = Vec::new();
    let mut entr_x = Vec::new();
    let mut rel_y = Vec::new();
    for (&id, judgment) in &judged {
        match by_id.get(id) {
            None => excluded.push(Exclusion {
                construction_id: id.to_owned(),
                reason: ExclusionReason::NoResult,
            }),
            Some(result) if !result.learnability.is_finite() || !result.entrenchment.is_finite() => {
                excluded.push(Exclusion {
                    construction_id: id.to_owned(),
                    reason: ExclusionReason::NonFiniteScore,
                })
            }
            Some(result) => {
                learn_x.push(result.learnability);
                entr_x.push(result.entrenchment);
                rel_y.push(relative_grammaticality(judgment));
            }
        }
    }
    for &id in by_id.keys() {
        if !judged.contains_key(id) {
            excluded.push(Exclusion {
                construction_id: id.to_owned(),
                reason: ExclusionReason::NoJudgment,
            });
        }
    }

    let n = rel_y.len();
    if n < 3 {
        return Err(StatsError::InsufficientData { matched: n });
    }
    let make = |name: &str, xs: &[f64]| -> Result<CorrelationReport, StatsError> {
        let r = pearson_r(xs, &rel_y)?;
        Ok(CorrelationReport {
            variable: name.to_owned(),
            r,
            p_two_tailed: p_value_two_tailed(r, n)?,
            n_points: n,
        })
    };
    Ok(CorrelationOutcome {
        learnability: make("learnability", &learn_x)?,
        entrenchment: make("entrenchment", &entr_x)?,
        excluded,
    })
}
