//! Fourier-Bessel transform of a polar grid.
//!
//! The coefficients are computed by a Riemann sum over the uniform
//! `(dr = 1 px, dtheta)` grid:
//!
//! ```text
//! A_{0,i}     = 1 / (pi R^2 J_1(a_{0,i})^2)     sum f(r,t) r J_0(a_{0,i} r / R) dr dt
//! A_{n,i}/B   = 2 / (pi R^2 J_{n+1}(a_{n,i})^2) sum f(r,t) r J_n(a_{n,i} r / R) {cos nt, sin nt} dr dt
//! ```
//!
//! with `B_{0,i} = 0`. The inverse evaluates the truncated series
//! `f(r,t) = sum_{n,i} J_n(a_{n,i} r / R) (A_{n,i} cos nt + B_{n,i} sin nt)`.

use std::f64::consts::{PI, TAU};

use crate::bessel::{jn, BesselRootTable};
use crate::error::{Error, Result};
use crate::polar::{ray_count, PolarGrid};

use super::{FeatureLayout, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbtConfig {
    pub max_order: usize,
    pub max_root: usize,
    /// Degrees between rays.
    pub angular_resolution: f64,
}

impl Default for FbtConfig {
    fn default() -> Self {
        FbtConfig {
            max_order: 30,
            max_root: 3,
            angular_resolution: 0.5,
        }
    }
}

impl FbtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_root == 0 {
            return Err(Error::Config("max_root must be at least 1".into()));
        }
        ray_count(self.angular_resolution)?;
        Ok(())
    }

    pub fn layout(&self) -> FeatureLayout {
        FeatureLayout::Fbt {
            max_order: self.max_order,
            max_root: self.max_root,
        }
    }
}

/// Cosine (`A`) and sine (`B`) coefficients for orders `0..=max_order` and
/// roots `1..=max_root`.
#[derive(Debug, Clone, PartialEq)]
pub struct FbSpectrum {
    max_order: usize,
    max_root: usize,
    radius: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl FbSpectrum {
    pub fn zeros(max_order: usize, max_root: usize, radius: f64) -> Self {
        let len = (max_order + 1) * max_root;
        FbSpectrum {
            max_order,
            max_root,
            radius,
            a: vec![0.0; len],
            b: vec![0.0; len],
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn max_root(&self) -> usize {
        self.max_root
    }

    /// Outer radius `R` of the series, in pixels.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn index(&self, n: usize, i: usize) -> usize {
        assert!(n <= self.max_order && (1..=self.max_root).contains(&i));
        n * self.max_root + i - 1
    }

    /// `A_{n,i}` with 1-based root index.
    pub fn a(&self, n: usize, i: usize) -> f64 {
        self.a[self.index(n, i)]
    }

    /// `B_{n,i}` with 1-based root index.
    pub fn b(&self, n: usize, i: usize) -> f64 {
        self.b[self.index(n, i)]
    }

    pub fn set_a(&mut self, n: usize, i: usize, value: f64) {
        let k = self.index(n, i);
        self.a[k] = value;
    }

    /// Sets `B_{n,i}`; writes to order 0 are ignored since `B_{0,i} = 0`.
    pub fn set_b(&mut self, n: usize, i: usize, value: f64) {
        if n > 0 {
            let k = self.index(n, i);
            self.b[k] = value;
        }
    }

    /// Keeps roots `1..=max_root` only.
    pub fn truncated(&self, max_root: usize) -> FbSpectrum {
        let max_root = max_root.min(self.max_root);
        let mut out = FbSpectrum::zeros(self.max_order, max_root, self.radius);
        for n in 0..=self.max_order {
            for i in 1..=max_root {
                out.set_a(n, i, self.a(n, i));
                out.set_b(n, i, self.b(n, i));
            }
        }
        out
    }

    /// Rebuilds a spectrum from an `fbt-o*-r*` feature vector.
    pub fn from_features(features: &FeatureVector, radius: f64) -> Result<FbSpectrum> {
        let FeatureLayout::Fbt {
            max_order,
            max_root,
        } = *features.layout()
        else {
            return Err(Error::LayoutMismatch {
                expected: "fbt-o*-r*".into(),
                found: features.layout_id(),
            });
        };
        let half = (max_order + 1) * max_root;
        let values = features.values();
        let mut out = FbSpectrum::zeros(max_order, max_root, radius);
        out.a.copy_from_slice(&values[..half]);
        out.b.copy_from_slice(&values[half..]);
        Ok(out)
    }
}

/// Basis tables for one grid geometry, shareable across images.
#[derive(Debug, Clone)]
pub struct FbtPlan {
    config: FbtConfig,
    n_rays: usize,
    n_rings: usize,
    radius: f64,
    /// `cos(n * theta_k)` at `[n * n_rays + k]`
    cos: Vec<f64>,
    sin: Vec<f64>,
    /// `prefactor * r * J_n(a_{n,i} r / R) * dr * dtheta` at
    /// `[(n * max_root + i - 1) * n_rings + ring]`
    kernel: Vec<f64>,
}

impl FbtPlan {
    pub fn new(
        config: FbtConfig,
        roots: &BesselRootTable,
        n_rays: usize,
        n_rings: usize,
        radius: f64,
    ) -> Result<Self> {
        config.validate()?;
        if !roots.covers(config.max_order, config.max_root) {
            return Err(Error::Config(format!(
                "root table {}x{} does not cover order {} root {}",
                roots.max_order(),
                roots.max_root(),
                config.max_order,
                config.max_root
            )));
        }
        let expected_rays = ray_count(config.angular_resolution)?;
        if expected_rays != n_rays {
            return Err(Error::Config(format!(
                "grid has {n_rays} rays but angular resolution {} implies {expected_rays}",
                config.angular_resolution
            )));
        }
        if n_rings == 0 || !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config("empty polar grid".into()));
        }

        let (cos, sin) = harmonic_tables(config.max_order, n_rays);
        let d_theta = TAU / n_rays as f64;
        let d_r = PolarGrid::RING_STEP;
        let mut kernel = Vec::with_capacity((config.max_order + 1) * config.max_root * n_rings);
        for n in 0..=config.max_order {
            for i in 1..=config.max_root {
                let alpha = roots.root(n, i);
                let norm = jn(n + 1, alpha);
                let scale = if n == 0 { 1.0 } else { 2.0 };
                let prefactor = scale / (PI * radius * radius * norm * norm);
                for ring in 0..n_rings {
                    let r = ring as f64 * d_r;
                    let value = if r > radius {
                        0.0
                    } else {
                        prefactor * r * jn(n, alpha * r / radius) * d_r * d_theta
                    };
                    kernel.push(value);
                }
            }
        }
        Ok(FbtPlan {
            config,
            n_rays,
            n_rings,
            radius,
            cos,
            sin,
            kernel,
        })
    }

    /// Plan matching the geometry of `grid`.
    pub fn for_grid(config: FbtConfig, roots: &BesselRootTable, grid: &PolarGrid) -> Result<Self> {
        Self::new(config, roots, grid.n_rays(), grid.n_rings(), grid.max_radius())
    }

    pub fn config(&self) -> &FbtConfig {
        &self.config
    }

    pub fn transform(&self, grid: &PolarGrid) -> Result<FbSpectrum> {
        if grid.n_rays() != self.n_rays
            || grid.n_rings() != self.n_rings
            || (grid.max_radius() - self.radius).abs() > 1e-12 * self.radius
        {
            return Err(Error::Config(format!(
                "grid {}x{} (R = {}) does not match plan {}x{} (R = {})",
                grid.n_rays(),
                grid.n_rings(),
                grid.max_radius(),
                self.n_rays,
                self.n_rings,
                self.radius
            )));
        }
        let max_order = self.config.max_order;
        let max_root = self.config.max_root;
        let n_rings = self.n_rings;

        let mut spectrum = FbSpectrum::zeros(max_order, max_root, self.radius);
        let mut cos_proj = vec![0.0; n_rings];
        let mut sin_proj = vec![0.0; n_rings];
        for n in 0..=max_order {
            cos_proj.iter_mut().for_each(|v| *v = 0.0);
            sin_proj.iter_mut().for_each(|v| *v = 0.0);
            let cos = &self.cos[n * self.n_rays..(n + 1) * self.n_rays];
            let sin = &self.sin[n * self.n_rays..(n + 1) * self.n_rays];
            for ray in 0..self.n_rays {
                let (c, s) = (cos[ray], sin[ray]);
                for (ring, &f) in grid.ray(ray).iter().enumerate() {
                    cos_proj[ring] += f * c;
                    sin_proj[ring] += f * s;
                }
            }
            for i in 1..=max_root {
                let start = (n * max_root + i - 1) * n_rings;
                let kernel = &self.kernel[start..start + n_rings];
                let a: f64 = kernel.iter().zip(&cos_proj).map(|(k, p)| k * p).sum();
                spectrum.set_a(n, i, a);
                if n > 0 {
                    let b: f64 = kernel.iter().zip(&sin_proj).map(|(k, p)| k * p).sum();
                    spectrum.set_b(n, i, b);
                }
            }
        }
        Ok(spectrum)
    }
}

/// `cos(n theta_k)`, `sin(n theta_k)` with the angle reduced modulo the ray
/// count, so every order is exactly periodic on the grid.
fn harmonic_tables(max_order: usize, n_rays: usize) -> (Vec<f64>, Vec<f64>) {
    let step = TAU / n_rays as f64;
    let mut cos = Vec::with_capacity((max_order + 1) * n_rays);
    let mut sin = Vec::with_capacity((max_order + 1) * n_rays);
    for n in 0..=max_order {
        for k in 0..n_rays {
            let (s, c) = (((n * k) % n_rays) as f64 * step).sin_cos();
            cos.push(c);
            sin.push(s);
        }
    }
    (cos, sin)
}

/// Fourier-Bessel coefficients of `grid`.
pub fn fbt(grid: &PolarGrid, config: &FbtConfig, roots: &BesselRootTable) -> Result<FbSpectrum> {
    FbtPlan::for_grid(*config, roots, grid)?.transform(grid)
}

/// Evaluates the truncated Fourier-Bessel series of `spectrum` on a polar
/// grid with rings `r = 0, 1, ..` and `n_rays` rays; rings beyond the series
/// radius read as 0. The grid's center is reported as the origin.
pub fn inverse_fbt(
    spectrum: &FbSpectrum,
    roots: &BesselRootTable,
    n_rays: usize,
    n_rings: usize,
) -> Result<PolarGrid> {
    if !roots.covers(spectrum.max_order, spectrum.max_root) {
        return Err(Error::Config(
            "root table does not cover the spectrum".into(),
        ));
    }
    if n_rays < 4 || n_rings == 0 {
        return Err(Error::Config(format!(
            "cannot evaluate onto a {n_rays}x{n_rings} grid"
        )));
    }
    let radius = spectrum.radius;
    let (max_order, max_root) = (spectrum.max_order, spectrum.max_root);
    let (cos, sin) = harmonic_tables(max_order, n_rays);

    // Radial profiles per order: sum_i A_{n,i} J_n(...) and sum_i B_{n,i} J_n(...).
    let mut radial_a = vec![0.0; (max_order + 1) * n_rings];
    let mut radial_b = vec![0.0; (max_order + 1) * n_rings];
    for n in 0..=max_order {
        for ring in 0..n_rings {
            let r = ring as f64 * PolarGrid::RING_STEP;
            if r > radius {
                continue;
            }
            let (mut sa, mut sb) = (0.0, 0.0);
            for i in 1..=max_root {
                let j = jn(n, roots.root(n, i) * r / radius);
                sa += spectrum.a(n, i) * j;
                sb += spectrum.b(n, i) * j;
            }
            radial_a[n * n_rings + ring] = sa;
            radial_b[n * n_rings + ring] = sb;
        }
    }

    let mut samples = vec![0.0; n_rays * n_rings];
    for ray in 0..n_rays {
        let row = &mut samples[ray * n_rings..(ray + 1) * n_rings];
        for n in 0..=max_order {
            let (c, s) = (cos[n * n_rays + ray], sin[n * n_rays + ray]);
            let ra = &radial_a[n * n_rings..(n + 1) * n_rings];
            let rb = &radial_b[n * n_rings..(n + 1) * n_rings];
            for ring in 0..n_rings {
                row[ring] += ra[ring] * c + rb[ring] * s;
            }
        }
    }
    PolarGrid::from_samples(n_rays, n_rings, radius, (0.0, 0.0), samples)
}

/// Flattens `A` then `B`, each order-major and root-minor, keeping the
/// all-zero `B_0` row so the length is `(max_order + 1) * max_root * 2`.
pub fn fbt_features(spectrum: &FbSpectrum) -> FeatureVector {
    let mut values = Vec::with_capacity(spectrum.a.len() * 2);
    values.extend_from_slice(&spectrum.a);
    values.extend_from_slice(&spectrum.b);
    FeatureVector::new(
        FeatureLayout::Fbt {
            max_order: spectrum.max_order,
            max_root: spectrum.max_root,
        },
        values,
    )
    .expect("spectrum shape matches its layout")
}
