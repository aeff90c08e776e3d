//! One identification run: i.i.d. sampling, the anytime confidence band,
//! hypothesis elimination, and guess selection.

use num_bigint::BigInt;
use num_traits::Zero;

use super::rng::Xoshiro256PlusPlus;
use super::schedule::CompiledSchedule;
use super::{validate_family, HypothesisFamily, IdentificationError, Pmf, PmfKind, RationalPmf};

/// Parameters of a run. `depth` maps the sample count n to the schedule
/// step t(n) at which lower approximations are read; it must be
/// nondecreasing (default: identity).
#[derive(Debug, Clone, Copy)]
pub struct IdentificationConfig {
    pub delta: f64,
    pub n_max: u64,
    pub seed: u64,
    pub depth: fn(u64) -> u64,
}

impl IdentificationConfig {
    pub fn new(delta: f64, n_max: u64, seed: u64) -> Result<Self, IdentificationError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(IdentificationError::InvalidDelta(delta));
        }
        Ok(IdentificationConfig {
            delta,
            n_max,
            seed,
            depth: |n| n,
        })
    }

    pub fn with_depth(mut self, depth: fn(u64) -> u64) -> Self {
        self.depth = depth;
        self
    }
}

/// Anytime band radius: `ε_n = sqrt( ln(2·m·n·(n+1)/δ) / (2n) )`.
///
/// Union-bounding Hoeffding over m tracked elements and all n (weights
/// 1/(n(n+1)) sum to 1) makes every per-element, per-step inequality hold
/// simultaneously with probability at least 1 − δ.
pub fn confidence_radius(n: u64, m_tracked: usize, delta: f64) -> f64 {
    debug_assert!(n >= 1 && m_tracked >= 1 && delta > 0.0 && delta < 1.0);
    let nf = n as f64;
    let arg = 2.0 * m_tracked as f64 * nf * (nf + 1.0) / delta;
    (arg.ln() / (2.0 * nf)).sqrt()
}

/// Inverse-CDF sampler over element positions, with cumulative thresholds
/// fixed at 64-bit resolution (exact for any rational with denominator
/// dividing 2^64; otherwise off by at most 2^-64 per element).
pub(crate) struct FiniteSampler {
    thresholds: Vec<u128>,
}

impl FiniteSampler {
    pub(crate) fn new(pmf: &RationalPmf) -> Result<Self, IdentificationError> {
        if pmf.kind != PmfKind::Probability {
            return Err(IdentificationError::NotAProbability);
        }
        let mut cum = num_rational::BigRational::zero();
        let mut thresholds = Vec::with_capacity(pmf.masses.len());
        for mass in &pmf.masses {
            cum += mass;
            // ceil(cum · 2^64)
            let scaled = (cum.numer() << 64u32) + cum.denom() - BigInt::from(1);
            let t: BigInt = scaled / cum.denom();
            let t: u128 = t.try_into().expect("cumulative mass ≤ 1 fits in 65 bits");
            thresholds.push(t);
        }
        Ok(FiniteSampler { thresholds })
    }

    pub(crate) fn draw(&self, rng: &mut Xoshiro256PlusPlus) -> u32 {
        let r = rng.next_u64() as u128;
        for (pos, &t) in self.thresholds.iter().enumerate() {
            if r < t {
                return pos as u32;
            }
        }
        // only reachable for semantically-impossible r ≥ 2^64 or mass defect
        (self.thresholds.len() - 1) as u32
    }
}

/// Draws `n` i.i.d. element positions from `p`, deterministically in `seed`.
///
/// For the halving tail, position i (0-based) receives mass 2^-(i+1) and
/// the residual beyond 64 splits collapses onto position 64.
pub fn sample_iid(p: &Pmf, n: usize, seed: u64) -> Result<Vec<u32>, IdentificationError> {
    let mut rng = Xoshiro256PlusPlus::from_seed(seed);
    match p {
        Pmf::Finite(pmf) => {
            let sampler = FiniteSampler::new(pmf)?;
            Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
        }
        Pmf::GeometricHalving => Ok((0..n)
            .map(|_| {
                let r = rng.next_u64();
                // P(leading_ones = j) = 2^-(j+1); all-ones lands on 64
                r.leading_ones().min(64)
            })
            .collect()),
    }
}

/// Per-hypothesis schedule evaluators plus the tracked element set: every
/// element with positive mass under any hypothesis (observed elements are a
/// subset, since the truth is in the family).
pub(crate) struct Engine {
    pub(crate) schedules: Vec<CompiledSchedule>,
    pub(crate) tracked: Vec<usize>,
}

impl Engine {
    pub(crate) fn new(family: &HypothesisFamily) -> Self {
        let schedules = family
            .hypotheses
            .iter()
            .map(|h| CompiledSchedule::compile(&h.schedule, &h.pmf.masses))
            .collect();
        let tracked = (0..family.language.len())
            .filter(|&pos| {
                family
                    .hypotheses
                    .iter()
                    .any(|h| !h.pmf.mass(pos).is_zero())
            })
            .collect();
        Engine { schedules, tracked }
    }

    pub(crate) fn m_tracked(&self) -> usize {
        self.tracked.len().max(1)
    }

    /// Marks every live hypothesis whose lower approximation overshoots the
    /// band at some tracked element. Permanent: bits only turn on.
    pub(crate) fn eliminate(
        &self,
        counts: &[u64],
        n: u64,
        t: u64,
        epsilon: f64,
        eliminated: &mut [bool],
    ) {
        for (i, sched) in self.schedules.iter().enumerate() {
            if eliminated[i] {
                continue;
            }
            for &pos in &self.tracked {
                let p_hat = counts[pos] as f64 / n as f64;
                if sched.eval(pos, t) > p_hat + epsilon {
                    eliminated[i] = true;
                    break;
                }
            }
        }
    }

    /// Two-tier choice: the least live index whose approximation is within
    /// ε below the data everywhere; failing that, the least live index.
    /// `None` when everything is eliminated.
    pub(crate) fn select(
        &self,
        counts: &[u64],
        n: u64,
        t: u64,
        epsilon: f64,
        eliminated: &[bool],
    ) -> Option<usize> {
        let mut fallback = None;
        for (i, sched) in self.schedules.iter().enumerate() {
            if eliminated[i] {
                continue;
            }
            if fallback.is_none() {
                fallback = Some(i + 1);
            }
            let close = self.tracked.iter().all(|&pos| {
                let p_hat = counts[pos] as f64 / n as f64;
                p_hat - sched.eval(pos, t) <= epsilon
            });
            if close {
                return Some(i + 1);
            }
        }
        fallback
    }
}

fn counts_of_prefix(sample_prefix: &[u32], n: u64, n_elements: usize) -> Vec<u64> {
    assert!(
        n as usize <= sample_prefix.len(),
        "sample prefix holds {} draws, need {n}",
        sample_prefix.len()
    );
    let mut counts = vec![0u64; n_elements];
    for &x in &sample_prefix[..n as usize] {
        counts[x as usize] += 1;
    }
    counts
}

/// One elimination sweep at sample size `n` over `sample_prefix[..n]`.
/// Already-eliminated hypotheses stay eliminated.
pub fn eliminate_step(
    family: &HypothesisFamily,
    eliminated: &mut [bool],
    sample_prefix: &[u32],
    config: &IdentificationConfig,
    n: u64,
) {
    assert_eq!(eliminated.len(), family.len());
    let engine = Engine::new(family);
    let counts = counts_of_prefix(sample_prefix, n, family.language.len());
    let epsilon = confidence_radius(n, engine.m_tracked(), config.delta);
    engine.eliminate(&counts, n, (config.depth)(n), epsilon, eliminated);
}

/// The current guess at sample size `n`: least non-eliminated index passing
/// the closeness filter, else the least non-eliminated index. 1-based.
pub fn select_guess(
    family: &HypothesisFamily,
    eliminated: &[bool],
    sample_prefix: &[u32],
    config: &IdentificationConfig,
    n: u64,
) -> Result<usize, IdentificationError> {
    assert_eq!(eliminated.len(), family.len());
    let engine = Engine::new(family);
    let counts = counts_of_prefix(sample_prefix, n, family.language.len());
    let epsilon = confidence_radius(n, engine.m_tracked(), config.delta);
    engine
        .select(&counts, n, (config.depth)(n), epsilon, eliminated)
        .ok_or(IdentificationError::FamilyExhausted { at_step: n })
}

/// One step of a run's record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub n: u64,
    /// 1-based hypothesis index guessed after this step
    pub guess: usize,
    /// 1-based indices eliminated so far, ascending
    pub eliminated: Vec<usize>,
    pub epsilon: f64,
}

/// Full per-step record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub steps: Vec<StepRecord>,
    /// guess after the last step (None for an empty budget)
    pub final_guess: Option<usize>,
    /// first n from which the guess never changes again within the budget
    pub convergence_step: Option<u64>,
}

/// Runs the full loop: validate, sample, eliminate, guess, trace.
pub fn run_identification(
    family: &HypothesisFamily,
    config: &IdentificationConfig,
) -> Result<RunTrace, IdentificationError> {
    validate_family(family)?;
    if !(config.delta > 0.0 && config.delta < 1.0) {
        return Err(IdentificationError::InvalidDelta(config.delta));
    }
    let engine = Engine::new(family);
    let sampler = FiniteSampler::new(&family.truth().pmf)?;
    let mut rng = Xoshiro256PlusPlus::from_seed(config.seed);
    let m_tracked = engine.m_tracked();

    let mut counts = vec![0u64; family.language.len()];
    let mut eliminated = vec![false; family.len()];
    let mut steps = Vec::with_capacity(config.n_max as usize);
    for n in 1..=config.n_max {
        let x = sampler.draw(&mut rng);
        counts[x as usize] += 1;
        let epsilon = confidence_radius(n, m_tracked, config.delta);
        let t = (config.depth)(n);
        engine.eliminate(&counts, n, t, epsilon, &mut eliminated);
        let guess = engine
            .select(&counts, n, t, epsilon, &eliminated)
            .ok_or(IdentificationError::FamilyExhausted { at_step: n })?;
        steps.push(StepRecord {
            n,
            guess,
            eliminated: eliminated
                .iter()
                .enumerate()
                .filter_map(|(i, &e)| e.then_some(i + 1))
                .collect(),
            epsilon,
        });
    }

    let final_guess = steps.last().map(|s| s.guess);
    let convergence_step = final_guess.map(|fg| {
        let stable_from = steps
            .iter()
            .rev()
            .take_while(|s| s.guess == fg)
            .last()
            .map(|s| s.n)
            .unwrap_or(config.n_max);
        stable_from
    });
    Ok(RunTrace {
        steps,
        final_guess,
        convergence_step,
    })
}
