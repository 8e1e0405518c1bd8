//! Hilbert transforms of indicators of finite unions of intervals, exact
//! level-set inversion, distribution identities and the exceptional-set
//! constructions built on them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod corpus;
pub mod distribution;
pub mod error;
pub mod hilbert;
pub mod kk;
pub mod level_set;
pub mod roots;
pub mod sets;
pub mod verify;

pub use error::{Error, Result};
pub use hilbert::{
    hilbert_indicator, hilbert_piecewise_linear, maximal_hilbert_indicator,
    truncated_hilbert_indicator, EvaluationPoint, PiecewiseLinearFunction,
};
pub use sets::{FiniteOpenSet, Interval, WhitneyPartition};
