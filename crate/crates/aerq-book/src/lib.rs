//! Runs every code block in the guide as a doctest, so the book can never
//! drift out of sync with the library. mdbook itself does not test code
//! against dependencies; including each chapter as module documentation
//! makes `cargo test --doc` do it instead.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/getting-started.md")]
pub mod getting_started {}

#[doc = include_str!("../../../book/src/regression-quantiles.md")]
pub mod regression_quantiles {}

#[doc = include_str!("../../../book/src/extreme-quantile.md")]
pub mod extreme_quantile {}

#[doc = include_str!("../../../book/src/averaged-extreme-quantile.md")]
pub mod averaged_extreme_quantile {}

#[doc = include_str!("../../../book/src/rank-scores.md")]
pub mod rank_scores {}

#[doc = include_str!("../../../book/src/minimax-route.md")]
pub mod minimax_route {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
