use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::image::GrayImage;

use super::{FeatureLayout, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DftConfig {
    /// Radius of the selected frequency disk, in cycles per image.
    pub max_cycles: f64,
}

impl Default for DftConfig {
    fn default() -> Self {
        DftConfig { max_cycles: 19.5 }
    }
}

impl DftConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_cycles.is_finite() && self.max_cycles >= 0.0) {
            return Err(Error::Config(format!(
                "max_cycles must be finite and non-negative, got {}",
                self.max_cycles
            )));
        }
        Ok(())
    }

    pub fn layout(&self) -> FeatureLayout {
        FeatureLayout::Dft {
            max_cycles: self.max_cycles,
        }
    }
}

/// `|F(u, v)|` with DC moved to `(width / 2, height / 2)`.
///
/// `u` counts horizontal cycles per image width, `v` vertical cycles per
/// image height.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSpectrum {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl MagnitudeSpectrum {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Centered, row-major magnitudes.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn dc(&self) -> (i64, i64) {
        ((self.width / 2) as i64, (self.height / 2) as i64)
    }

    /// Magnitude at signed frequency `(u, v)`, if it is on the grid.
    pub fn at(&self, u: i64, v: i64) -> Option<f64> {
        let (dc_u, dc_v) = self.dc();
        let col = u + dc_u;
        let row = v + dc_v;
        if col < 0 || row < 0 || col >= self.width as i64 || row >= self.height as i64 {
            return None;
        }
        Some(self.values[row as usize * self.width + col as usize])
    }
}

/// Magnitude of the unitary 2-D DFT,
/// `F(u,v) = 1/sqrt(MN) sum f(x,y) exp(-j 2 pi (ux/M + vy/N))`.
pub fn dft_magnitude(image: &GrayImage) -> MagnitudeSpectrum {
    let (w, h) = (image.width(), image.height());
    let mut buf: Vec<Complex<f64>> = image
        .pixels()
        .iter()
        .map(|&p| Complex::new(p, 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    let rows = planner.plan_fft_forward(w);
    rows.process(&mut buf);

    let cols = planner.plan_fft_forward(h);
    let mut column = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = buf[y * w + x];
        }
        cols.process(&mut column);
        for y in 0..h {
            buf[y * w + x] = column[y];
        }
    }

    let scale = 1.0 / ((w * h) as f64).sqrt();
    let (dc_u, dc_v) = (w / 2, h / 2);
    let mut values = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let row = (y + dc_v) % h;
            let col = (x + dc_u) % w;
            values[row * w + col] = buf[y * w + x].norm() * scale;
        }
    }
    MagnitudeSpectrum {
        width: w,
        height: h,
        values,
    }
}

/// Integer frequencies `(u, v)` with `u^2 + v^2 <= max_cycles^2`, ordered by
/// radius, then by angle `atan2(v, u)` in `[0, 2 pi)`, then by `u`.
pub fn dft_lattice(max_cycles: f64) -> Vec<(i64, i64)> {
    if !(max_cycles.is_finite() && max_cycles >= 0.0) {
        return Vec::new();
    }
    let limit = max_cycles.floor() as i64;
    let r2 = max_cycles * max_cycles;
    let mut points = Vec::new();
    for v in -limit..=limit {
        for u in -limit..=limit {
            if ((u * u + v * v) as f64) <= r2 {
                points.push((u, v));
            }
        }
    }
    let angle = |(u, v): (i64, i64)| {
        let a = (v as f64).atan2(u as f64);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    };
    points.sort_by(|&p, &q| {
        (p.0 * p.0 + p.1 * p.1)
            .cmp(&(q.0 * q.0 + q.1 * q.1))
            .then(angle(p).total_cmp(&angle(q)))
            .then(p.0.cmp(&q.0))
    });
    points
}

/// Selects the magnitudes inside the `max_cycles` disk, DC included.
pub fn dft_features(magnitudes: &MagnitudeSpectrum, config: &DftConfig) -> Result<FeatureVector> {
    config.validate()?;
    let lattice = dft_lattice(config.max_cycles);
    let mut values = Vec::with_capacity(lattice.len());
    for (u, v) in lattice {
        let m = magnitudes.at(u, v).ok_or_else(|| {
            Error::Config(format!(
                "frequency ({u}, {v}) is beyond the {}x{} spectrum; lower max_cycles",
                magnitudes.width, magnitudes.height
            ))
        })?;
        values.push(m);
    }
    FeatureVector::new(config.layout(), values)
}
