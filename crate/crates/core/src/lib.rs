//! Minimum-description-length analysis of linguistic restrictions, and a
//! simulator for identifying a generating distribution from positive
//! examples.
//!
//! The MDL half prices a grammar change against the corpus compression it
//! buys: [`codec`] supplies exact-rational code lengths, [`constructions`]
//! compares a pooled against a context-partitioned choice model, and
//! [`learnability`] turns the per-occurrence savings into exposure-time
//! estimates that [`stats`] correlates with acceptability judgments.
//!
//! The identification half ([`identification`]) samples i.i.d. from a
//! designated member of an enumerated hypothesis family, eliminates
//! hypotheses whose lower-approximation schedules overshoot an anytime
//! confidence band, and tracks the least surviving index until it settles.
//!
//! [`ingest`] reads and writes the JSON/CSV formats shared with the
//! command-line front end.

pub mod codec;
pub mod constructions;
pub mod identification;
pub mod ingest;
pub mod learnability;
pub mod ratio;
pub mod stats;
