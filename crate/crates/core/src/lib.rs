//! Classifier ensembles for binary screening decisions over 19 image-derived
//! features: reference learners, six fusion rules, greedy forward/backward
//! member selection, and a cross-validated experiment harness.

pub mod classifiers;
pub mod cli;
pub mod config;
pub mod dataio;
pub mod domain;
pub mod fusion;
pub mod harness;
pub mod metrics;
pub mod registry;
pub mod selection;
