//! Reconstruct the time series of a hidden common driver from two observed,
//! driven chaotic systems.
//!
//! The pipeline delay-embeds both observations, estimates their intrinsic
//! dimensions and the dimension of the joint observation, classifies the
//! causal relation, and trains an anisotropic self-organizing map whose
//! driver axis reads out the hidden driver.
//!
//! | module | contents |
//! |---|---|
//! | [`dynamics`] | coupled logistic / tent map simulators and parameter sampling |
//! | [`embedding`] | delay embedding, joint and time-permuted observations |
//! | [`neighbors`] | exact k-d tree KNN and cross-mapping |
//! | [`dimension`] | intrinsic dimension, mutual dimension, relation classifier |
//! | [`asom`] | the anisotropic SOM: grid, training, readout, grid files |
//! | [`baselines`] | phase-shuffled surrogate, PCA and CCA estimates |
//! | [`evaluation`] | correlations, lags, batch summaries |
//! | [`pipeline`] | configuration, demo and batch runners, figure data export |

pub mod asom;
pub mod baselines;
pub mod cli;
pub mod dimension;
pub mod dynamics;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod neighbors;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
