//! Fetal brain linear biometry.
//!
//! Computes the cerebral biparietal diameter (CBD), bone biparietal diameter
//! (BBD) and trans-cerebellum diameter (TCD) from a coronal MRI volume, its
//! four-class structure segmentation and per-slice reference probabilities.
//! The pipeline runs ROI extraction, reference slice selection, label
//! cleanup, mid-sagittal line fitting with brain orientation, the three
//! geometric measurements and a set of reliability checks.

pub mod error;
pub mod eval;
pub mod geometry;
pub mod imageops;
pub mod io;
pub mod volume;

pub use error::{Error, Result};
pub mod measure;
pub mod metrics;
pub mod msl;
pub mod phantom;
pub mod pipeline;
pub mod reliability;
pub mod roi;
pub mod slice_select;
