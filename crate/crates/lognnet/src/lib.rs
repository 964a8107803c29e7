//! Reservoir classifier for tabular binary classification.
//!
//! The model projects a normalized feature vector through a fixed matrix
//! filled by a chaotic congruential generator, then classifies the
//! projection with a small trained two-layer head. Around that core the
//! crate provides the experimental machinery the method is normally run
//! with: balanced K-fold cross-validation, particle-swarm search over the
//! generator parameters, wrapper backward feature elimination,
//! single-feature threshold baselines, and a RAM-footprint estimator for
//! microcontroller deployments.
//!
//! Everything is deterministic under a caller-supplied seed: fold seeds,
//! particle trajectories and subset evaluations are derived with
//! [`seeding`], so parallel and serial execution produce identical
//! results. Parallelism (rayon) is behind the default `parallel` feature;
//! disabling it yields a dependency-free sequential build with the same
//! outputs.

pub mod chaos;
pub mod dataset;
pub mod error;
pub mod network;
pub mod registry;
pub mod reservoir_opt;
pub mod seeding;
pub mod selection;
pub mod threshold;
pub mod training;

mod exec;
mod matrix;

pub use chaos::{fill_reservoir, next_state, GeneratorParams, Modulo, ReservoirMatrix};
pub use dataset::{Dataset, FeatureMask, Sample};
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use network::{
    estimate_footprint, init_model, FootprintBreakdown, ForwardTrace, LogNNetModel, NetworkShape,
};
pub use registry::FeatureRegistry;
pub use training::{
    balance_training_set, compute_metrics, kfold_evaluate, train, ConfusionMatrix, CvReport,
    Metrics, TrainConfig,
};
