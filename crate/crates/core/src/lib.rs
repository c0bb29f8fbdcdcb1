//! Recommending object exchanges that move a team toward a target.
//!
//! An object space of records with attributes and an exchange parameter λ,
//! a team drawn from it, and a target aggregate define a ranking problem:
//! which (swap-out, swap-in) pairs bring the team closest to the target
//! under a one-sided weighted distance. [`ranking::brute_force_rank`] scores
//! every pair; [`ranking::rtc_star_rank`] answers the same query from an
//! [`index::NnIndex`] built around per-member virtual objects.

pub mod bench;
pub mod dataio;
pub mod error;
pub mod index;
pub mod model;
pub mod ranking;
pub mod weighting;

pub use error::{Result, RtcError};
pub use index::{IoCounters, IoStats, NnIndex};
pub use model::{
    AttributeVector, DiffVector, ObjectId, ObjectRecord, ObjectSpace, TargetContext, TeamContext,
    TruncatingVector, WeightVector,
};
pub use ranking::{
    brute_force_rank, rtc_star_rank, Fingerprint, Problem, RtcStarSearch, SwapRecommendation,
    VirtualObject,
};
pub use weighting::{compute_weights, kendall_tau, select_target, RankedSeries};
