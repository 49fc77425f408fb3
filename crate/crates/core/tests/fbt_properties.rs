use polarface::bessel::BesselRootTable;
use polarface::dataset::load_pgm;
use polarface::features::{fbt, fbt_features, inverse_fbt, FbSpectrum, FbtConfig};
use polarface::polar::{to_polar, PolarGrid};
use polarface::GrayImage;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn relative_l2(a: &PolarGrid, b: &PolarGrid) -> f64 {
    let num: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.samples().iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn image_strategy(max: usize) -> impl Strategy<Value = GrayImage> {
    (3..max, 3..max).prop_flat_map(|(w, h)| {
        prop::collection::vec(-50.0..50.0f64, w * h).prop_map(move |p| GrayImage::new(w, h, p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_is_linear(f in image_strategy(14), a in -3.0..3.0f64, b in -3.0..3.0f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GrayImage::from_fn(f.width(), f.height(), |_, _| rng.gen_range(-50.0..50.0)).unwrap();
        let combo = GrayImage::from_fn(f.width(), f.height(), |x, y| a * f.get(x, y) + b * g.get(x, y)).unwrap();
        let cfg = FbtConfig { max_order: 6, max_root: 4, angular_resolution: 4.0 };
        let roots = BesselRootTable::build(6, 4).unwrap();
        let sf = fbt(&to_polar(&f, 4.0).unwrap(), &cfg, &roots).unwrap();
        let sg = fbt(&to_polar(&g, 4.0).unwrap(), &cfg, &roots).unwrap();
        let sc = fbt(&to_polar(&combo, 4.0).unwrap(), &cfg, &roots).unwrap();
        for n in 0..=6 {
            for i in 1..=4 {
                prop_assert!((sc.a(n, i) - (a * sf.a(n, i) + b * sg.a(n, i))).abs() < 1e-9);
                prop_assert!((sc.b(n, i) - (a * sf.b(n, i) + b * sg.b(n, i))).abs() < 1e-9);
            }
            prop_assert_eq!(sc.b(0, 1), 0.0);
        }
    }

    #[test]
    fn polar_samples_stay_within_image_range(img in image_strategy(16), res in prop::sample::select(vec![1.0, 2.0, 7.5, 90.0])) {
        let grid = to_polar(&img, res).unwrap();
        let (x0, y0) = grid.center();
        let step = grid.angle_step();
        let (w, h) = ((img.width() - 1) as f64, (img.height() - 1) as f64);
        for ray in 0..grid.n_rays() {
            let (s, c) = (ray as f64 * step).sin_cos();
            for ring in 0..grid.n_rings() {
                let (x, y) = (x0 + ring as f64 * c, y0 + ring as f64 * s);
                let v = grid.get(ray, ring);
                if (0.0..=w).contains(&x) && (0.0..=h).contains(&y) {
                    prop_assert!(v >= img.min() - 1e-9 && v <= img.max() + 1e-9);
                } else {
                    prop_assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn quarter_turn_shifts_rays(side in 3usize..14, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img = GrayImage::from_fn(side, side, |_, _| rng.gen_range(0.0..255.0)).unwrap();
        // Content at angle t moves to angle t + 90 degrees (y down).
        let rotated = GrayImage::from_fn(side, side, |x, y| img.get(y, side - 1 - x)).unwrap();
        let a = to_polar(&img, 0.5).unwrap();
        let b = to_polar(&rotated, 0.5).unwrap();
        let quarter = a.n_rays() / 4;
        for k in 0..a.n_rays() {
            for ring in 0..a.n_rings() {
                let expected = a.get(k, ring);
                let got = b.get((k + quarter) % a.n_rays(), ring);
                prop_assert!((got - expected).abs() < 1e-6, "ray {} ring {}: {} vs {}", k, ring, got, expected);
            }
        }
    }
}

#[test]
fn polar_dump_is_deterministic() {
    let img = load_pgm(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/face_92x112.pgm"))).unwrap();
    let a = to_polar(&img, 1.0).unwrap();
    let b = to_polar(&img, 1.0).unwrap();
    assert_eq!(a, b);
    let csv = a.to_csv();
    assert_eq!(csv.lines().count(), 360);
    assert!(csv.lines().all(|l| l.split(',').count() == a.n_rings()));
}

#[test]
fn radial_image_is_nearly_constant_across_rays() {
    let img = GrayImage::from_fn(101, 101, |x, y| {
        let r = (x as f64 - 50.0).hypot(y as f64 - 50.0);
        100.0 + 50.0 * (std::f64::consts::TAU * r / 16.0).cos()
    })
    .unwrap();
    let grid = to_polar(&img, 0.5).unwrap();
    for ring in [5, 17, 33, 48] {
        let values: Vec<f64> = (0..grid.n_rays()).map(|k| grid.get(k, ring)).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((hi - lo) / 100.0 < 0.02, "ring {ring}: spread {}", hi - lo);
    }
}

fn blob(size: usize, angle: f64) -> GrayImage {
    let c = (size - 1) as f64 / 2.0;
    let (s, co) = angle.sin_cos();
    GrayImage::from_fn(size, size, |x, y| {
        // Undo the rotation, then evaluate the unrotated pattern.
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        let (u, v) = (co * dx + s * dy, -s * dx + co * dy);
        let g = |cx: f64, cy: f64, sigma: f64| (-((u - cx).powi(2) + (v - cy).powi(2)) / (2.0 * sigma * sigma)).exp();
        100.0 * g(9.0, 4.0, 10.0) + 60.0 * g(-7.0, -8.0, 9.0)
    })
    .unwrap()
}

#[test]
fn coefficient_moduli_survive_rotation() {
    let cfg = FbtConfig { max_order: 8, max_root: 5, angular_resolution: 0.5 };
    let roots = BesselRootTable::build(8, 5).unwrap();
    let modulus = |img: &GrayImage| {
        let s = fbt(&to_polar(img, 0.5).unwrap(), &cfg, &roots).unwrap();
        let mut m = Vec::new();
        for n in 0..=8 {
            for i in 1..=5 {
                m.push(s.a(n, i).hypot(s.b(n, i)));
            }
        }
        m
    };
    let base = modulus(&blob(161, 0.0));
    let largest = base.iter().copied().fold(0.0, f64::max);
    for angle in [0.3, 1.0, 2.4] {
        let turned = modulus(&blob(161, angle));
        for (k, (a, b)) in base.iter().zip(&turned).enumerate() {
            if *a > 0.05 * largest {
                assert!((a - b).abs() / a < 1e-3, "coefficient {k} at {angle} rad: {a} vs {b}");
            }
        }
    }
}

#[test]
fn round_trip_of_band_limited_pattern() {
    let roots = BesselRootTable::build(30, 30).unwrap();
    let cfg = FbtConfig { max_order: 30, max_root: 30, angular_resolution: 0.5 };
    let radius = 65.0 * 2f64.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut spectrum = FbSpectrum::zeros(30, 30, radius);
    for n in 0..=30 {
        for i in 1..=30 {
            spectrum.set_a(n, i, rng.gen_range(-1.0..1.0));
            spectrum.set_b(n, i, rng.gen_range(-1.0..1.0));
        }
    }
    let pattern = inverse_fbt(&spectrum, &roots, 720, 92).unwrap();
    let recovered = fbt(&pattern, &cfg, &roots).unwrap();
    let again = inverse_fbt(&recovered, &roots, 720, 92).unwrap();
    let err = relative_l2(&again, &pattern);
    assert!(err < 0.05, "relative error {err}");
}

#[test]
fn reconstruction_improves_with_more_roots() {
    let img = load_pgm(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/face_92x112.pgm"))).unwrap();
    let grid = to_polar(&img, 0.5).unwrap();
    let roots = BesselRootTable::build(30, 30).unwrap();
    let cfg = FbtConfig { max_order: 30, max_root: 30, angular_resolution: 0.5 };
    let full = fbt(&grid, &cfg, &roots).unwrap();
    let errors: Vec<f64> = [3, 10, 30]
        .iter()
        .map(|&m| relative_l2(&inverse_fbt(&full.truncated(m), &roots, grid.n_rays(), grid.n_rings()).unwrap(), &grid))
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn single_term_series() {
    let roots = BesselRootTable::build(2, 2).unwrap();
    let mut s = FbSpectrum::zeros(2, 2, 20.0);
    s.set_a(0, 1, 3.0);
    let grid = inverse_fbt(&s, &roots, 36, 25).unwrap();
    for k in 0..36 {
        for ring in 0..25 {
            let r = ring as f64;
            let expected = if r > 20.0 {
                0.0
            } else {
                3.0 * polarface::bessel::bessel_j(0, roots.root(0, 1) * r / 20.0).unwrap()
            };
            assert!((grid.get(k, ring) - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn flattening_round_trips() {
    let mut s = FbSpectrum::zeros(3, 2, 9.0);
    s.set_a(2, 1, 1.5);
    s.set_b(3, 2, -2.0);
    let f = fbt_features(&s);
    assert_eq!(f.len(), 16);
    assert_eq!(FbSpectrum::from_features(&f, 9.0).unwrap(), s);
    assert_eq!(fbt_features(&FbSpectrum::zeros(0, 1, 1.0)).values(), &[0.0, 0.0]);
}
