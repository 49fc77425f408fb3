//! Polar-frequency face recognition.
//!
//! Images are resampled on a polar grid and described by Fourier-Bessel
//! coefficients or by DFT magnitudes. Each image is then embedded by its
//! Euclidean distances to the training images and classified with
//! one-vs-rest pseudo-Fisher discriminants, optionally fusing both feature
//! types by the max rule.

pub mod bessel;
pub mod classifier;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod image;
pub mod io;
pub mod pipeline;
pub mod polar;
pub mod toy;

pub use error::{Error, Result};
pub use image::GrayImage;
