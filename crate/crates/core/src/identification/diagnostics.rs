//! Exact separation diagnostics for a hypothesis family: the margin
//! between the truth and the competitors before it, per-competitor witness
//! elements, and the schedule depths at which approximations get within
//! half the margin.

use num_rational::BigRational;
use num_traits::Zero;

use super::schedule::Schedule;
use super::{
    validate_family, FamilyViolation, HypothesisFamily, IdentificationError, PmfKind,
};

/// One hypothesis listed before the truth, with its best separating
/// element and the exact gap there.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitorWitness {
    /// 1-based hypothesis index (< true index)
    pub hypothesis: usize,
    /// separating element (least-indexed among maximizers)
    pub element: String,
    /// `|p(x) − q_i(x)|` at that element
    pub gap: BigRational,
}

/// Exact quantities describing how separated the truth is from everything
/// listed before it, and how deep the schedules must run to expose that.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationDiagnostics {
    /// smallest witness gap over competitors; `None` when the truth is first
    pub alpha: Option<BigRational>,
    pub witnesses: Vec<CompetitorWitness>,
    /// per-hypothesis (1-based index, schedule depth) pairs for indices up
    /// to and including the truth
    pub steps: Vec<(usize, u64)>,
    /// largest witness element position, 0-based; `None` when the truth is first
    pub chi: Option<usize>,
    /// largest schedule depth among `steps`
    pub theta: u64,
}

// Geometric schedules close any positive target eventually, but a rate
// near 1 can make "eventually" astronomically far; stop scanning there.
const MAX_SCHEDULE_SCAN: u64 = 1_000_000;

fn least_step_within(
    schedule: &Schedule,
    pos: usize,
    target: &BigRational,
    mass: &BigRational,
    hypothesis: usize,
    element: &str,
) -> Result<u64, IdentificationError> {
    // a staircase freezes after its last row step, so scanning past that
    // point cannot help
    let frozen_from = match schedule {
        Schedule::GeometricGap { .. } => None,
        Schedule::Staircase { rows, .. } => Some(
            rows.get(pos)
                .and_then(|row| row.last().map(|&(step, _)| step))
                .unwrap_or(0),
        ),
    };
    for t in 0..=MAX_SCHEDULE_SCAN {
        if mass - schedule.eval_exact(mass, pos, t) <= *target {
            return Ok(t);
        }
        if frozen_from.is_some_and(|f| t >= f) {
            break;
        }
    }
    Err(IdentificationError::ScheduleNeverCloses {
        hypothesis,
        element: element.to_string(),
    })
}

/// Computes the margin `α` (the smallest over competitors `i` before the
/// truth of the largest pointwise distance `|p − q_i|`), each competitor's
/// separating element, the least schedule depths within `α/2` of the
/// relevant masses, and their maxima `χ` and `θ`.
///
/// With the truth listed first there are no competitors: `alpha` and `chi`
/// are `None`, the truth's depth is 0, and `θ = 0`.
pub fn separation_diagnostics(
    family: &HypothesisFamily,
) -> Result<SeparationDiagnostics, IdentificationError> {
    validate_family(family)?;
    let k = family.true_index;
    let truth = family.truth();
    debug_assert_eq!(truth.pmf.kind, PmfKind::Probability);
    let lang = &family.language;

    let mut witnesses = Vec::with_capacity(k - 1);
    let mut alpha: Option<BigRational> = None;
    for (idx, hyp) in family.hypotheses[..k - 1].iter().enumerate() {
        let mut best_pos = 0usize;
        let mut best_gap = BigRational::zero();
        for pos in 0..lang.len() {
            let gap = {
                let d = truth.pmf.mass(pos) - hyp.pmf.mass(pos);
                if d < BigRational::zero() {
                    -d
                } else {
                    d
                }
            };
            if gap > best_gap {
                best_gap = gap;
                best_pos = pos;
            }
        }
        if best_gap.is_zero() {
            // a competitor with the truth's exact masses would make the
            // margin zero; validation already rejects this, but guard the
            // arithmetic anyway
            return Err(IdentificationError::InvalidFamily(
                FamilyViolation::TruthNotLeast {
                    true_index: k,
                    duplicate: idx + 1,
                },
            ));
        }
        alpha = Some(match alpha {
            Some(a) if a <= best_gap => a,
            _ => best_gap.clone(),
        });
        witnesses.push(CompetitorWitness {
            hypothesis: idx + 1,
            element: lang.elements[best_pos].clone(),
            gap: best_gap,
        });
    }

    let (steps, chi, theta) = match &alpha {
        None => {
            // truth first: the only depth is the truth's, and nothing needs
            // approximating, so it is 0
            (vec![(k, 0u64)], None, 0u64)
        }
        Some(alpha) => {
            let half = alpha / BigRational::from_integer(2.into());
            let mut steps = Vec::with_capacity(k);
            let mut theta = 0u64;
            for (w, hyp) in witnesses.iter().zip(&family.hypotheses[..k - 1]) {
                let pos = lang.position(&w.element).expect("witness element exists");
                let t = least_step_within(
                    &hyp.schedule,
                    pos,
                    &half,
                    &hyp.pmf.mass(pos),
                    w.hypothesis,
                    &w.element,
                )?;
                theta = theta.max(t);
                steps.push((w.hypothesis, t));
            }
            // the truth's own witness function is identically zero, so its
            // maximizer degenerates to the least element
            let t_truth = least_step_within(
                &truth.schedule,
                0,
                &half,
                &truth.pmf.mass(0),
                k,
                &lang.elements[0],
            )?;
            theta = theta.max(t_truth);
            steps.push((k, t_truth));
            let chi = witnesses
                .iter()
                .map(|w| lang.position(&w.element).expect("witness element exists"))
                .max();
            (steps, chi, theta)
        }
    };

    Ok(SeparationDiagnostics {
        alpha: alpha.clone(),
        witnesses,
        steps,
        chi,
        theta,
    })
}
