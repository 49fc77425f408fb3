//! Sinusoidal test patterns in polar coordinates, mapped to `[0, 1]`.

use std::f64::consts::TAU;

use crate::bessel::BesselRootTable;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::polar::to_polar;

use super::fbt::{fbt, FbSpectrum, FbtConfig};
use super::FbPart;

fn check(cycles: f64, size: usize) -> Result<()> {
    if !(cycles.is_finite() && cycles > 0.0) {
        return Err(Error::InputDomain(format!("cycles must be positive, got {cycles}")));
    }
    if size < 2 {
        return Err(Error::InputDomain(format!("size must be at least 2, got {size}")));
    }
    Ok(())
}

/// `0.5 + 0.5 sin(2 pi cycles r / D)` where `D` is the image diagonal, so the
/// pattern completes `cycles` periods from corner to corner.
pub fn synth_radial(cycles: f64, size: usize) -> Result<GrayImage> {
    check(cycles, size)?;
    let c = (size - 1) as f64 / 2.0;
    let diagonal = 2.0 * c * std::f64::consts::SQRT_2;
    GrayImage::from_fn(size, size, |x, y| {
        let r = (x as f64 - c).hypot(y as f64 - c);
        0.5 + 0.5 * (TAU * cycles * r / diagonal).sin()
    })
}

/// `0.5 + 0.5 sin(cycles theta)` with `theta` measured as in the polar grid.
pub fn synth_angular(cycles: u32, size: usize) -> Result<GrayImage> {
    check(cycles as f64, size)?;
    let c = (size - 1) as f64 / 2.0;
    GrayImage::from_fn(size, size, |x, y| {
        let theta = (y as f64 - c).atan2(x as f64 - c);
        0.5 + 0.5 * (cycles as f64 * theta).sin()
    })
}

/// Pixel-wise average of a radial and an angular pattern.
pub fn synth_mix(radial_cycles: f64, angular_cycles: u32, size: usize) -> Result<GrayImage> {
    let radial = synth_radial(radial_cycles, size)?;
    let angular = synth_angular(angular_cycles, size)?;
    let pixels = radial
        .pixels()
        .iter()
        .zip(angular.pixels())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    GrayImage::new(size, size, pixels)
}

/// One coefficient magnitude of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub part: FbPart,
    pub order: usize,
    pub root: usize,
    pub magnitude: f64,
}

/// `|A|` and `|B|` entries sorted by decreasing magnitude, excluding the
/// mean-intensity term `A(0, 1)` and the identically zero `B(0, i)`.
/// Equal magnitudes keep spectrum order.
pub fn principal_components(spectrum: &FbSpectrum) -> Vec<Component> {
    let mut out = Vec::new();
    for part in [FbPart::A, FbPart::B] {
        for order in 0..=spectrum.max_order() {
            for root in 1..=spectrum.max_root() {
                let skip = match part {
                    FbPart::A => order == 0 && root == 1,
                    FbPart::B => order == 0,
                };
                if skip {
                    continue;
                }
                let value = match part {
                    FbPart::A => spectrum.a(order, root),
                    FbPart::B => spectrum.b(order, root),
                };
                out.push(Component {
                    part,
                    order,
                    root,
                    magnitude: value.abs(),
                });
            }
        }
    }
    out.sort_by(|p, q| q.magnitude.total_cmp(&p.magnitude));
    out
}

/// Outcome of one synthetic-pattern check.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn describe(c: &[Component]) -> String {
    c.iter()
        .map(|c| format!("{:?}({},{})={:.4}", c.part, c.order, c.root, c.magnitude))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Radial 8-cycle, angular 4-cycle and averaged patterns must expose their
/// generating frequencies as the dominant `(order, root)` coefficients.
pub fn synth_oracle(size: usize, config: &FbtConfig, roots: &BesselRootTable) -> Result<Vec<OracleCheck>> {
    let spectrum_of = |img: &GrayImage| -> Result<Vec<Component>> {
        let grid = to_polar(img, config.angular_resolution)?;
        Ok(principal_components(&fbt(&grid, config, roots)?))
    };
    let loc = |c: &Component| (c.order, c.root);

    let radial = spectrum_of(&synth_radial(8.0, size)?)?;
    let angular = spectrum_of(&synth_angular(4, size)?)?;
    let mix = spectrum_of(&synth_mix(8.0, 4, size)?)?;

    let mut top2: Vec<(usize, usize)> = mix.iter().take(2).map(loc).collect();
    top2.sort();
    Ok(vec![
        OracleCheck {
            name: "radial-8".into(),
            passed: loc(&radial[0]) == (0, 8),
            detail: describe(&radial[..3]),
        },
        OracleCheck {
            name: "angular-4".into(),
            passed: loc(&angular[0]) == (4, 1),
            detail: describe(&angular[..3]),
        },
        OracleCheck {
            name: "mix".into(),
            passed: top2 == [(0, 8), (4, 1)],
            detail: describe(&mix[..3]),
        },
    ])
}
