//! Robust semantic frame parsing for short, noisy texts.
//!
//! Training data is expanded with delexicalized and `<unk>`-substituted
//! variants ([`expansion`]); at inference time a sentence goes through
//! Replace, Expand and Merge steps ([`inference`]) around a pluggable joint
//! intent/slot [`tagger::Tagger`].

pub mod corpus;
pub mod demo;
pub mod expansion;
pub mod inference;
pub mod metrics;
pub mod pipeline;
pub mod synth;
pub mod tagger;
