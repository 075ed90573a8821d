//! Geometry of the Rubik's cube state graph and models of collective
//! solving progress.
//!
//! * [`cube`]: exact n-cube states, HTM generators, packed coordinates.
//! * [`cayley`]: shell/ball/entropy profiles by exact BFS and by sampling.
//! * [`walk`]: first-passage models of solving with forward bias `p_f`.
//! * [`fit`]: progress-curve fitting, BIC comparison, learning curves.
//! * [`changepoint`]: single variance change point with permutation test.
//! * [`network`]: competitor co-participation graph and modularity.
//! * [`ingest`] and [`pipeline`]: record parsing and the batch runner.
//!
//! The numeric modules are generic over [`Real`]; the `*64` aliases below
//! fix the scalar to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cayley;
pub mod changepoint;
pub mod cube;
pub mod error;
pub mod fit;
pub mod ingest;
pub mod network;
pub mod num;
pub mod pipeline;
pub mod rng;
pub mod walk;

pub use error::{Error, Result};
pub use num::Real;

pub type ShellProfile64 = cayley::ShellProfile<f64>;
pub type FitResult64 = fit::FitResult<f64>;
pub type ProgressSeries64 = fit::ProgressSeries<f64>;
pub type LearningCurve64 = fit::LearningCurve<f64>;
pub type ChangePointResult64 = changepoint::ChangePointResult<f64>;
pub type CompetitorGraph64 = network::CompetitorGraph<f64>;
pub type CommunityAssignment64 = network::CommunityAssignment<f64>;
