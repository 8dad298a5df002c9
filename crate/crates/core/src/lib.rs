//! Simulation, closed-form analytics and statistical verification for a
//! Markov model of best bid/ask prices whose spread opens tick by tick and
//! closes through uniform catastrophes.
//!
//! - [`model`]: regimes and exact transition laws
//! - [`simulate`]: event-driven paths of the book, the spread and the embedded chains
//! - [`analytics`]: stationary measures, drift, volatility, rate function
//! - [`estimate`]: event-log parsing and rate estimation
//! - [`verify`]: Monte Carlo checks of the limit theorems
//! - [`cli`]: reproducible command-line runs

pub mod analytics;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod model;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use model::{BookState, CatastropheDist, HcParams, LlgParams, NcParams, RegimeSpec};
