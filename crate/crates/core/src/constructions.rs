//! Context-partitioned model of a linguistic restriction.
//!
//! A construction is a set of contexts, each offering a choice among surface
//! forms; the restricted ("new") grammar disallows some forms per context.
//! The costs compared here are pure choice costs: bits to encode which form
//! was produced at each occurrence. Sentence content and context identity
//! cost the same under both grammars and cancel.
//!
//! * Old grammar: one pooled distribution over forms, fitted across all
//!   contexts (the choice is "always allowed", so one model covers all).
//! * New grammar: per-context distributions over the allowed options only;
//!   a context with a single allowed option costs 0 bits.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{corpus_code_length, CodeLength, Probability};

#[derive(Debug, Error, PartialEq)]
pub enum ConstructionError {
    #[error("construction has no contexts")]
    NoContexts,
    #[error("duplicate context id {0:?}")]
    DuplicateContext(String),
    #[error("context {0:?} has no options")]
    EmptyContext(String),
    #[error("context {context:?} lists form {form:?} twice")]
    DuplicateForm { context: String, form: String },
    #[error("context {0:?} allows none of its options")]
    NoAllowedOption(String),
    #[error("n_new_symbols must be positive")]
    ZeroNewSymbols,
    #[error("diagnostic context {0:?} does not exist")]
    DiagnosticMissingContext(String),
    #[error("diagnostic form {form:?} not found in context {context:?}")]
    DiagnosticMissingForm { context: String, form: String },
    #[error("diagnostic form {form:?} in context {context:?} is not allowed under the new grammar")]
    DiagnosticDisallowed { context: String, form: String },
    #[error("diagnostic form {form:?} in context {context:?} has zero count")]
    DiagnosticZeroCount { context: String, form: String },
    #[error("construction has no occurrences at all")]
    ZeroTotalCount,
    #[error(
        "restriction contradicted: disallowed form {form:?} occurs {count} times in context {context:?}"
    )]
    RestrictionContradicted {
        context: String,
        form: String,
        count: u64,
    },
    #[error("symbol inventory must hold at least 2 symbols, got {0}")]
    InventoryTooSmall(u64),
}

/// One surface form within a context: whether the restricted grammar still
/// allows it, and how often the corpus attests it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormOption {
    #[serde(rename = "form")]
    pub form_id: String,
    pub allowed: bool,
    pub count: u64,
}

/// A context in which the choice among forms arises.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBlock {
    #[serde(rename = "id")]
    pub context_id: String,
    pub options: Vec<FormOption>,
}

/// Reference to the form whose occurrences accrue the encoding savings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticRef {
    pub context: String,
    pub form: String,
}

/// One linguistic restriction: the symbols its rule definitions add to the
/// grammar, plus the context-partitioned corpus counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub id: String,
    pub name: String,
    pub n_new_symbols: u32,
    pub diagnostic: DiagnosticRef,
    pub contexts: Vec<ContextBlock>,
}

/// Size of the symbol inventory the grammar is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolInventory {
    total_symbols: u64,
}

impl SymbolInventory {
    pub fn new(total_symbols: u64) -> Result<Self, ConstructionError> {
        if total_symbols < 2 {
            return Err(ConstructionError::InventoryTooSmall(total_symbols));
        }
        Ok(SymbolInventory { total_symbols })
    }

    pub fn total_symbols(self) -> u64 {
        self.total_symbols
    }
}

/// What to do when the corpus attests a form the restriction disallows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Treat the restriction as falsified and fail.
    #[default]
    Reject,
    /// Add-one smoothing within the contradicted context only: every option
    /// there (allowed or not) gets count+1 mass, so the stray occurrences
    /// stay encodable at finite cost.
    AddOne,
}

impl ConstructionSpec {
    /// Checks every structural invariant; all cost functions assume this
    /// passed.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        if self.contexts.is_empty() {
            return Err(ConstructionError::NoContexts);
        }
        if self.n_new_symbols == 0 {
            return Err(ConstructionError::ZeroNewSymbols);
        }
        let mut context_ids = BTreeSet::new();
        for ctx in &self.contexts {
            if !context_ids.insert(ctx.context_id.as_str()) {
                return Err(ConstructionError::DuplicateContext(ctx.context_id.clone()));
            }
            if ctx.options.is_empty() {
                return Err(ConstructionError::EmptyContext(ctx.context_id.clone()));
            }
            let mut form_ids = BTreeSet::new();
            for opt in &ctx.options {
                if !form_ids.insert(opt.form_id.as_str()) {
                    return Err(ConstructionError::DuplicateForm {
                        context: ctx.context_id.clone(),
                        form: opt.form_id.clone(),
                    });
                }
            }
            if !ctx.options.iter().any(|o| o.allowed) {
                return Err(ConstructionError::NoAllowedOption(ctx.context_id.clone()));
            }
        }
        let diag = &self.diagnostic;
        let ctx = self
            .contexts
            .iter()
            .find(|c| c.context_id == diag.context)
            .ok_or_else(|| ConstructionError::DiagnosticMissingContext(diag.context.clone()))?;
        let opt = ctx
            .options
            .iter()
            .find(|o| o.form_id == diag.form)
            .ok_or_else(|| ConstructionError::DiagnosticMissingForm {
                context: diag.context.clone(),
                form: diag.form.clone(),
            })?;
        if !opt.allowed {
            return Err(ConstructionError::DiagnosticDisallowed {
                context: diag.context.clone(),
                form: diag.form.clone(),
            });
        }
        if opt.count == 0 {
            return Err(ConstructionError::DiagnosticZeroCount {
                context: diag.context.clone(),
                form: diag.form.clone(),
            });
        }
        if self.total_count() == 0 {
            return Err(ConstructionError::ZeroTotalCount);
        }
        Ok(())
    }

    /// Corpus occurrences summed over every context and option.
    pub fn total_count(&self) -> u64 {
        self.contexts
            .iter()
            .flat_map(|c| c.options.iter())
            .map(|o| o.count)
            .sum()
    }

    /// Corpus occurrences of the diagnostic form in its context (0 if the
    /// reference does not resolve; `validate` rules that out).
    pub fn diagnostic_count(&self) -> u64 {
        self.contexts
            .iter()
            .find(|c| c.context_id == self.diagnostic.context)
            .and_then(|c| c.options.iter().find(|o| o.form_id == self.diagnostic.form))
            .map_or(0, |o| o.count)
    }
}

/// Bits the new rule definitions add to the grammar description:
/// `n_new_symbols · log2(S)`.
pub fn grammar_delta_bits(spec: &ConstructionSpec, inv: SymbolInventory) -> CodeLength {
    CodeLength::new(spec.n_new_symbols as f64 * (inv.total_symbols() as f64).log2())
}

fn exact_prob(count: u64, total: u64) -> Probability {
    Probability::new(BigRational::new(BigInt::from(count), BigInt::from(total)))
        .expect("count ≤ total")
}

/// Choice cost under the unrestricted grammar: forms pooled across contexts,
/// probabilities fitted as overall relative frequencies.
pub fn old_grammar_choice_cost(spec: &ConstructionSpec) -> CodeLength {
    let mut pooled: BTreeMap<String, u64> = BTreeMap::new();
    for ctx in &spec.contexts {
        for opt in &ctx.options {
            *pooled.entry(opt.form_id.clone()).or_insert(0) += opt.count;
        }
    }
    let grand: u64 = pooled.values().sum();
    if grand == 0 {
        return CodeLength::ZERO;
    }
    let probs: BTreeMap<String, Probability> = pooled
        .iter()
        .map(|(form, &c)| (form.clone(), exact_prob(c, grand)))
        .collect();
    corpus_code_length(&pooled, &probs).expect("pooled probabilities cover all counted forms")
}

fn context_cost(ctx: &ContextBlock, smoothing: Smoothing) -> Result<f64, ConstructionError> {
    let contradiction = ctx.options.iter().find(|o| !o.allowed && o.count > 0);
    if let Some(bad) = contradiction {
        match smoothing {
            Smoothing::Reject => {
                return Err(ConstructionError::RestrictionContradicted {
                    context: ctx.context_id.clone(),
                    form: bad.form_id.clone(),
                    count: bad.count,
                })
            }
            Smoothing::AddOne => {
                let total: u64 =
                    ctx.options.iter().map(|o| o.count).sum::<u64>() + ctx.options.len() as u64;
                let counts: BTreeMap<String, u64> = ctx
                    .options
                    .iter()
                    .map(|o| (o.form_id.clone(), o.count))
                    .collect();
                let probs: BTreeMap<String, Probability> = ctx
                    .options
                    .iter()
                    .map(|o| (o.form_id.clone(), exact_prob(o.count + 1, total)))
                    .collect();
                return Ok(corpus_code_length(&counts, &probs)
                    .expect("smoothed probabilities are positive")
                    .bits());
            }
        }
    }
    let allowed_total: u64 = ctx
        .options
        .iter()
        .filter(|o| o.allowed)
        .map(|o| o.count)
        .sum();
    if allowed_total == 0 {
        return Ok(0.0);
    }
    let counts: BTreeMap<String, u64> = ctx
        .options
        .iter()
        .filter(|o| o.allowed)
        .map(|o| (o.form_id.clone(), o.count))
        .collect();
    let probs: BTreeMap<String, Probability> = ctx
        .options
        .iter()
        .filter(|o| o.allowed)
        .map(|o| (o.form_id.clone(), exact_prob(o.count, allowed_total)))
        .collect();
    Ok(corpus_code_length(&counts, &probs)
        .expect("per-context probabilities cover all counted allowed forms")
        .bits())
}

/// Choice cost under the restricted grammar: per-context distributions over
/// allowed options. Contexts are summed in sorted id order, so the result is
/// bit-identical under reordering of contexts and options.
pub fn new_grammar_choice_cost(
    spec: &ConstructionSpec,
    smoothing: Smoothing,
) -> Result<CodeLength, ConstructionError> {
    let mut by_id: Vec<&ContextBlock> = spec.contexts.iter().collect();
    by_id.sort_by(|a, b| a.context_id.cmp(&b.context_id));
    let mut total = 0.0;
    for ctx in by_id {
        total += context_cost(ctx, smoothing)?;
    }
    Ok(CodeLength::new(total))
}

/// Bits saved per occurrence of the diagnostic form when the corpus is
/// encoded under the restricted grammar instead of the pooled one. May be
/// ≤ 0 when the restriction buys nothing.
pub fn savings_per_diagnostic_occurrence(
    spec: &ConstructionSpec,
    smoothing: Smoothing,
) -> Result<f64, ConstructionError> {
    let diag = spec.diagnostic_count();
    debug_assert!(diag > 0, "validate() enforces a positive diagnostic count");
    let old = old_grammar_choice_cost(spec).bits();
    let new = new_grammar_choice_cost(spec, smoothing)?.bits();
    Ok((old - new) / diag as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn opt(form: &str, allowed: bool, count: u64) -> FormOption {
        FormOption {
            form_id: form.into(),
            allowed,
            count,
        }
    }

    /// Two contexts: contraction free in one, banned in the other.
    fn contraction_fixture() -> ConstructionSpec {
        ConstructionSpec {
            id: "c1".into(),
            name: "contraction".into(),
            n_new_symbols: 7,
            diagnostic: DiagnosticRef {
                context: "free".into(),
                form: "contracted".into(),
            },
            contexts: vec![
                ContextBlock {
                    context_id: "free".into(),
                    options: vec![opt("contracted", true, 300), opt("full", true, 600)],
                },
                ContextBlock {
                    context_id: "restricted".into(),
                    options: vec![opt("contracted", false, 0), opt("full", true, 100)],
                },
            ],
        }
    }

    #[test]
    fn fixture_validates() {
        contraction_fixture().validate().unwrap();
        assert_eq!(contraction_fixture().total_count(), 1000);
        assert_eq!(contraction_fixture().diagnostic_count(), 300);
    }

    #[test]
    fn validation_catches_each_invariant() {
        let base = contraction_fixture();

        let mut s = base.clone();
        s.contexts.clear();
        assert_eq!(s.validate(), Err(ConstructionError::NoContexts));

        let mut s = base.clone();
        s.n_new_symbols = 0;
        assert_eq!(s.validate(), Err(ConstructionError::ZeroNewSymbols));

        let mut s = base.clone();
        s.contexts[1].context_id = "free".into();
        assert_eq!(
            s.validate(),
            Err(ConstructionError::DuplicateContext("free".into()))
        );

        let mut s = base.clone();
        s.contexts[0].options.push(opt("full", true, 1));
        assert_eq!(
            s.validate(),
            Err(ConstructionError::DuplicateForm {
                context: "free".into(),
                form: "full".into()
            })
        );

        let mut s = base.clone();
        for o in &mut s.contexts[1].options {
            o.allowed = false;
        }
        assert_eq!(
            s.validate(),
            Err(ConstructionError::NoAllowedOption("restricted".into()))
        );

        let mut s = base.clone();
        s.diagnostic.context = "nowhere".into();
        assert_eq!(
            s.validate(),
            Err(ConstructionError::DiagnosticMissingContext("nowhere".into()))
        );

        let mut s = base.clone();
        s.diagnostic.form = "ghost".into();
        assert!(matches!(
            s.validate(),
            Err(ConstructionError::DiagnosticMissingForm { .. })
        ));

        let mut s = base.clone();
        s.diagnostic = DiagnosticRef {
            context: "restricted".into(),
            form: "contracted".into(),
        };
        assert!(matches!(
            s.validate(),
            Err(ConstructionError::DiagnosticDisallowed { .. })
        ));

        let mut s = base.clone();
        s.contexts[0].options[0].count = 0;
        assert!(matches!(
            s.validate(),
            Err(ConstructionError::DiagnosticZeroCount { .. })
        ));
    }

    #[test]
    fn grammar_delta_known_values() {
        let s = contraction_fixture();
        let mut one = s.clone();
        one.n_new_symbols = 1;
        assert_eq!(
            grammar_delta_bits(&one, SymbolInventory::new(2).unwrap()).bits(),
            1.0
        );
        let got = grammar_delta_bits(&s, SymbolInventory::new(100_000).unwrap()).bits();
        assert!((got - 116.26748332105768).abs() < 1e-9);
        // shrinking the inventory to 200 symbols scales the delta by
        // log2(200)/log2(100000) ≈ 0.4602 — the "approximately halved" ratio
        let small = grammar_delta_bits(&s, SymbolInventory::new(200).unwrap()).bits();
        assert!((small / got - 0.4602059991327962).abs() < 1e-12);
        assert!(SymbolInventory::new(1).is_err());
    }

    #[test]
    fn old_cost_known_values() {
        // single context, single form: nothing to encode
        let s = ConstructionSpec {
            id: "x".into(),
            name: "x".into(),
            n_new_symbols: 1,
            diagnostic: DiagnosticRef {
                context: "c".into(),
                form: "a".into(),
            },
            contexts: vec![ContextBlock {
                context_id: "c".into(),
                options: vec![opt("a", true, 100)],
            }],
        };
        assert_eq!(old_grammar_choice_cost(&s).bits(), 0.0);

        let mut two = s.clone();
        two.contexts[0].options = vec![opt("a", true, 4), opt("b", true, 4)];
        assert_eq!(old_grammar_choice_cost(&two).bits(), 8.0);

        let got = old_grammar_choice_cost(&contraction_fixture()).bits();
        assert!((got - 881.2908992306926).abs() < 1e-9);
    }

    #[test]
    fn new_cost_known_values() {
        let got = new_grammar_choice_cost(&contraction_fixture(), Smoothing::Reject)
            .unwrap()
            .bits();
        // 300·log2(3) + 600·log2(3/2)
        assert!((got - 826.4662506490406).abs() < 1e-9);

        // every context down to one allowed option: zero bits
        let mut forced = contraction_fixture();
        forced.contexts[0].options[1].allowed = false;
        forced.contexts[0].options[1].count = 0;
        assert_eq!(
            new_grammar_choice_cost(&forced, Smoothing::Reject)
                .unwrap()
                .bits(),
            0.0
        );
    }

    #[test]
    fn savings_known_values() {
        let s = contraction_fixture();
        let got = savings_per_diagnostic_occurrence(&s, Smoothing::Reject).unwrap();
        assert!((got - 0.1827488286055068).abs() < 1e-9);

        // all options allowed in a single context: old and new models coincide
        let mut open = s.clone();
        open.contexts.truncate(1);
        assert_eq!(
            savings_per_diagnostic_occurrence(&open, Smoothing::Reject).unwrap(),
            0.0
        );
    }

    #[test]
    fn contradicted_restriction_rejected_or_smoothed() {
        let mut s = contraction_fixture();
        s.contexts[1].options[0].count = 5;
        assert_eq!(
            new_grammar_choice_cost(&s, Smoothing::Reject),
            Err(ConstructionError::RestrictionContradicted {
                context: "restricted".into(),
                form: "contracted".into(),
                count: 5,
            })
        );
        // add-one smoothing keeps the context encodable: counts (5, 100),
        // probabilities (6/107, 101/107)
        let smoothed = new_grammar_choice_cost(&s, Smoothing::AddOne).unwrap().bits();
        let expected = 5.0 * (107f64 / 6.0).log2() + 100.0 * (107f64 / 101.0).log2();
        assert!((smoothed - (826.4662506490406 + expected)).abs() < 1e-9);
        // the clean context is unaffected by smoothing elsewhere
        assert!(smoothed > 826.4662506490406);
    }

    /// Deterministic pseudo-shuffle: reverse contexts and rotate options.
    fn permuted(spec: &ConstructionSpec) -> ConstructionSpec {
        let mut p = spec.clone();
        p.contexts.reverse();
        for ctx in &mut p.contexts {
            let shift = 1.min(ctx.options.len().saturating_sub(1));
            ctx.options.rotate_left(shift);
        }
        p
    }

    #[test]
    fn costs_are_bit_identical_under_reordering() {
        let s = contraction_fixture();
        let p = permuted(&s);
        assert_eq!(
            old_grammar_choice_cost(&s).bits(),
            old_grammar_choice_cost(&p).bits()
        );
        assert_eq!(
            new_grammar_choice_cost(&s, Smoothing::Reject).unwrap().bits(),
            new_grammar_choice_cost(&p, Smoothing::Reject).unwrap().bits()
        );
        assert_eq!(
            savings_per_diagnostic_occurrence(&s, Smoothing::Reject).unwrap(),
            savings_per_diagnostic_occurrence(&p, Smoothing::Reject).unwrap()
        );
    }

    /// Random clean spec: disallowed options carry count 0, every context has
    /// an allowed option, the diagnostic resolves with positive count.
    fn arb_clean_spec() -> impl Strategy<Value = ConstructionSpec> {
        let ctx = proptest::collection::vec((any::<bool>(), 0u64..=30), 1..=4);
        (proptest::collection::vec(ctx, 1..=4), 1u32..=10).prop_map(|(raw, n_sym)| {
            let mut contexts = Vec::new();
            for (ci, mut opts) in raw.into_iter().enumerate() {
                opts[0].0 = true; // at least one allowed option per context
                let options = opts
                    .into_iter()
                    .enumerate()
                    .map(|(oi, (allowed, count))| FormOption {
                        form_id: format!("f{oi}"),
                        allowed,
                        count: if allowed { count } else { 0 },
                    })
                    .collect();
                contexts.push(ContextBlock {
                    context_id: format!("c{ci}"),
                    options,
                });
            }
            contexts[0].options[0].count = contexts[0].options[0].count.max(1);
            ConstructionSpec {
                id: "r".into(),
                name: "randomized".into(),
                n_new_symbols: n_sym,
                diagnostic: DiagnosticRef {
                    context: "c0".into(),
                    form: "f0".into(),
                },
                contexts,
            }
        })
    }

    proptest! {
        // partitioning by context never encodes worse than the pooled model
        #[test]
        fn partition_refines_pooled_model(spec in arb_clean_spec()) {
            spec.validate().unwrap();
            let old = old_grammar_choice_cost(&spec).bits();
            let new = new_grammar_choice_cost(&spec, Smoothing::Reject).unwrap().bits();
            prop_assert!(new <= old + 1e-9);
        }

        // scaling all counts by c scales both costs by c and leaves the
        // per-occurrence savings unchanged
        #[test]
        fn count_scaling(spec in arb_clean_spec(), c in 2u64..=5) {
            let mut scaled = spec.clone();
            for ctx in &mut scaled.contexts {
                for opt in &mut ctx.options {
                    opt.count *= c;
                }
            }
            let old = old_grammar_choice_cost(&spec).bits();
            let old_scaled = old_grammar_choice_cost(&scaled).bits();
            prop_assert!((old_scaled - c as f64 * old).abs() <= 1e-9 * old.max(1.0));
            let new = new_grammar_choice_cost(&spec, Smoothing::Reject).unwrap().bits();
            let new_scaled = new_grammar_choice_cost(&scaled, Smoothing::Reject).unwrap().bits();
            prop_assert!((new_scaled - c as f64 * new).abs() <= 1e-9 * new.max(1.0));
            let s0 = savings_per_diagnostic_occurrence(&spec, Smoothing::Reject).unwrap();
            let s1 = savings_per_diagnostic_occurrence(&scaled, Smoothing::Reject).unwrap();
            prop_assert!((s0 - s1).abs() <= 1e-9 * s0.abs().max(1.0));
        }

        #[test]
        fn reordering_never_changes_costs(spec in arb_clean_spec()) {
            let p = permuted(&spec);
            prop_assert_eq!(
                old_grammar_choice_cost(&spec).bits(),
                old_grammar_choice_cost(&p).bits()
            );
            prop_assert_eq!(
                new_grammar_choice_cost(&spec, Smoothing::Reject).unwrap().bits(),
                new_grammar_choice_cost(&p, Smoothing::Reject).unwrap().bits()
            );
        }
    }
}
