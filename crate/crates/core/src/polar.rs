//! Cartesian to polar resampling about the image center.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Image resampled on rays (fixed angular step) and rings (1 px apart).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    n_rays: usize,
    n_rings: usize,
    max_radius: f64,
    center: (f64, f64),
    /// `samples[ray * n_rings + ring]`
    samples: Vec<f64>,
}

impl PolarGrid {
    /// Radial distance between consecutive rings, in pixels.
    pub const RING_STEP: f64 = 1.0;

    pub fn from_samples(
        n_rays: usize,
        n_rings: usize,
        max_radius: f64,
        center: (f64, f64),
        samples: Vec<f64>,
    ) -> Result<Self> {
        if n_rays < 4 || n_rings == 0 {
            return Err(Error::Config(format!(
                "polar grid needs >= 4 rays and >= 1 ring, got {n_rays}x{n_rings}"
            )));
        }
        if samples.len() != n_rays * n_rings {
            return Err(Error::Config(format!(
                "expected {} samples, got {}",
                n_rays * n_rings,
                samples.len()
            )));
        }
        if !(max_radius.is_finite() && max_radius > 0.0) {
            return Err(Error::Config(format!("invalid max radius {max_radius}")));
        }
        Ok(PolarGrid {
            n_rays,
            n_rings,
            max_radius,
            center,
            samples,
        })
    }

    pub fn n_rays(&self) -> usize {
        self.n_rays
    }

    pub fn n_rings(&self) -> usize {
        self.n_rings
    }

    pub fn ring_step(&self) -> f64 {
        Self::RING_STEP
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    /// Angular step in radians.
    pub fn angle_step(&self) -> f64 {
        std::f64::consts::TAU / self.n_rays as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn ray(&self, ray: usize) -> &[f64] {
        &self.samples[ray * self.n_rings..(ray + 1) * self.n_rings]
    }

    pub fn get(&self, ray: usize, ring: usize) -> f64 {
        self.samples[ray * self.n_rings + ring]
    }

    /// Debug dump: one comma-separated row per ray.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for ray in 0..self.n_rays {
            let cells: Vec<String> = self.ray(ray).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Number of rays for an angular resolution in degrees, which must divide 360.
pub fn ray_count(angular_resolution: f64) -> Result<usize> {
    if !(angular_resolution.is_finite() && angular_resolution > 0.0) {
        return Err(Error::Config(format!(
            "angular resolution must be positive, got {angular_resolution}"
        )));
    }
    let ratio = 360.0 / angular_resolution;
    let rays = ratio.round();
    if (ratio - rays).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "angular resolution {angular_resolution} does not divide 360"
        )));
    }
    if rays < 4.0 {
        return Err(Error::Config(format!(
            "angular resolution {angular_resolution} gives fewer than 4 rays"
        )));
    }
    Ok(rays as usize)
}

/// Resamples `image` on rings `r = 0, 1, ..` out to the farthest corner and
/// on rays `theta = k * angular_resolution` (degrees), counterclockwise from
/// +x with image y pointing down.
pub fn to_polar(image: &GrayImage, angular_resolution: f64) -> Result<PolarGrid> {
    let n_rays = ray_count(angular_resolution)?;
    let x0 = (image.width() - 1) as f64 / 2.0;
    let y0 = (image.height() - 1) as f64 / 2.0;
    let max_radius = x0.hypot(y0);
    let n_rings = max_radius.floor() as usize + 1;
    let step = std::f64::consts::TAU / n_rays as f64;

    let mut samples = Vec::with_capacity(n_rays * n_rings);
    for k in 0..n_rays {
        let (sin, cos) = (k as f64 * step).sin_cos();
        for ring in 0..n_rings {
            let r = ring as f64 * PolarGrid::RING_STEP;
            samples.push(image.sample(x0 + r * cos, y0 + r * sin));
        }
    }
    PolarGrid::from_samples(n_rays, n_rings, max_radius, (x0, y0), samples)
}
