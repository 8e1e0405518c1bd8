//! Trigonometric polynomials with large partial sums on a prescribed set.

mod construct;
pub mod oscillating;
pub mod special;
pub mod trig;

pub use construct::{
    default_delta, kk_construct, kk_construct_split, kk_split, mean_oscillation_check, shrink_set,
    verification_grid, KkCombined, KkConfig, KkConstruction, KkGridRow, KkSplit, MSearchRow,
    MeanOscillationRow, Pairing,
};
pub use oscillating::{OscillatingIndicator, Phase};
pub use trig::ComplexTrigPolynomial;
