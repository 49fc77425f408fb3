use crate::error::{Error, Result};
use crate::image::GrayImage;

use super::EyePair;

/// Pixels outside the ellipse are zeroed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseMask {
    pub center: (f64, f64),
    pub semi_axes: (f64, f64),
}

impl EllipseMask {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = (x - self.center.0) / self.semi_axes.0;
        let dy = (y - self.center.1) / self.semi_axes.1;
        dx * dx + dy * dy <= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationConfig {
    pub target_left_eye: (f64, f64),
    pub target_right_eye: (f64, f64),
    pub crop_width: usize,
    pub crop_height: usize,
    pub mask: Option<EllipseMask>,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            target_left_eye: (29.0, 47.0),
            target_right_eye: (88.0, 47.0),
            crop_width: 118,
            crop_height: 140,
            mask: Some(EllipseMask {
                center: (58.5, 70.0),
                semi_axes: (56.0, 68.0),
            }),
        }
    }
}

impl NormalizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.crop_width < 2 || self.crop_height < 2 {
            return Err(Error::Config(format!(
                "crop must be at least 2x2, got {}x{}",
                self.crop_width, self.crop_height
            )));
        }
        let inside = |(x, y): (f64, f64)| {
            x.is_finite()
                && y.is_finite()
                && (0.0..=(self.crop_width - 1) as f64).contains(&x)
                && (0.0..=(self.crop_height - 1) as f64).contains(&y)
        };
        if !inside(self.target_left_eye) || !inside(self.target_right_eye) {
            return Err(Error::Config("eye targets must lie inside the crop".into()));
        }
        if self.target_left_eye == self.target_right_eye {
            return Err(Error::Config("eye targets must differ".into()));
        }
        if let Some(mask) = &self.mask {
            let (a, b) = mask.semi_axes;
            if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
                return Err(Error::Config("mask semi-axes must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Similarity transform `p -> s R p + t`, stored as the complex pair
/// `z -> a z + b`.
#[derive(Debug, Clone, Copy)]
struct Similarity {
    a: (f64, f64),
    b: (f64, f64),
}

fn cmul(p: (f64, f64), q: (f64, f64)) -> (f64, f64) {
    (p.0 * q.0 - p.1 * q.1, p.0 * q.1 + p.1 * q.0)
}

fn cdiv(p: (f64, f64), q: (f64, f64)) -> (f64, f64) {
    let d = q.0 * q.0 + q.1 * q.1;
    ((p.0 * q.0 + p.1 * q.1) / d, (p.1 * q.0 - p.0 * q.1) / d)
}

fn csub(p: (f64, f64), q: (f64, f64)) -> (f64, f64) {
    (p.0 - q.0, p.1 - q.1)
}

impl Similarity {
    /// The unique map sending `src.0 -> dst.0` and `src.1 -> dst.1`.
    fn through(src: ((f64, f64), (f64, f64)), dst: ((f64, f64), (f64, f64))) -> Self {
        let a = cdiv(csub(dst.1, dst.0), csub(src.1, src.0));
        let b = csub(dst.0, cmul(a, src.0));
        Similarity { a, b }
    }

    fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        let q = cmul(self.a, p);
        (q.0 + self.b.0, q.1 + self.b.1)
    }
}

/// Registers the eyes onto the configured target pixels with a similarity
/// transform, crops, and zeroes everything outside the mask.
pub fn normalize_face(image: &GrayImage, eyes: &EyePair, config: &NormalizationConfig) -> Result<GrayImage> {
    config.validate()?;
    let (l, r) = (eyes.left, eyes.right);
    if ![l.0, l.1, r.0, r.1].iter().all(|v| v.is_finite()) {
        return Err(Error::InputDomain("eye coordinates must be finite".into()));
    }
    if (l.0 - r.0).hypot(l.1 - r.1) < 1e-9 {
        return Err(Error::DegenerateGeometry(format!(
            "eyes coincide at ({}, {})",
            l.0, l.1
        )));
    }
    // Output pixel -> source point.
    let to_source = Similarity::through(
        (config.target_left_eye, config.target_right_eye),
        (l, r),
    );
    GrayImage::from_fn(config.crop_width, config.crop_height, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        if let Some(mask) = &config.mask {
            if !mask.contains(xf, yf) {
                return 0.0;
            }
        }
        let (sx, sy) = to_source.apply((xf, yf));
        image.sample(sx, sy)
    })
}
