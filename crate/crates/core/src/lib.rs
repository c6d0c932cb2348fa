//! Fragment-cloud analysis of blasted muck piles from instance detections.
//!
//! The pipeline runs [`ingest`] → [`coords`] → [`spatial`] per image, and
//! [`corpus`] across images. [`synth`] generates scenes with known ground
//! truth and [`report`] writes the artifacts.

// Negated comparisons are used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coords;
pub mod corpus;
pub mod error;
pub mod ingest;
pub mod report;
pub mod spatial;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
