use polarface::dataset::{load_pgm, normalize_face, EyePair, NormalizationConfig};
use polarface::GrayImage;

fn face() -> GrayImage {
    load_pgm(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/face_92x112.pgm"))).unwrap()
}

/// Embeds `img` in a larger zero canvas rotated by `angle` about `pivot`
/// (bilinear), returning the canvas and the map of source points.
fn rotate(img: &GrayImage, angle: f64, pivot: (f64, f64), pad: usize) -> (GrayImage, impl Fn((f64, f64)) -> (f64, f64)) {
    let (s, c) = angle.sin_cos();
    let shift = pad as f64;
    let forward = move |(x, y): (f64, f64)| {
        let (dx, dy) = (x - pivot.0, y - pivot.1);
        (pivot.0 + c * dx - s * dy + shift, pivot.1 + s * dx + c * dy + shift)
    };
    let (w, h) = (img.width() + 2 * pad, img.height() + 2 * pad);
    let out = GrayImage::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - shift - pivot.0, y as f64 - shift - pivot.1);
        let (sx, sy) = (pivot.0 + c * dx + s * dy, pivot.1 - s * dx + c * dy);
        polarface::image::bilinear_sample(img, sx, sy).unwrap()
    })
    .unwrap();
    (out, forward)
}

fn mean_abs_diff(a: &GrayImage, b: &GrayImage) -> f64 {
    a.pixels().iter().zip(b.pixels()).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.pixels().len() as f64
}

#[test]
fn rotated_input_normalizes_to_the_same_face() {
    let img = face();
    let eyes = EyePair {
        left: (32.0, 48.0),
        right: (60.0, 47.0),
    };
    let cfg = NormalizationConfig::default();
    let reference = normalize_face(&img, &eyes, &cfg).unwrap();
    let (turned, map) = rotate(&img, 10f64.to_radians(), (46.0, 56.0), 20);
    let turned_eyes = EyePair {
        left: map(eyes.left),
        right: map(eyes.right),
    };
    let again = normalize_face(&turned, &turned_eyes, &cfg).unwrap();
    let diff = mean_abs_diff(&reference, &again);
    assert!(diff < 2.0, "mean abs diff {diff}");
}

#[test]
fn normalizing_twice_is_stable() {
    let img = face();
    let cfg = NormalizationConfig {
        mask: None,
        ..NormalizationConfig::default()
    };
    let eyes = EyePair {
        left: (31.0, 49.0),
        right: (61.0, 46.0),
    };
    let once = normalize_face(&img, &eyes, &cfg).unwrap();
    let targets = EyePair {
        left: cfg.target_left_eye,
        right: cfg.target_right_eye,
    };
    let twice = normalize_face(&once, &targets, &cfg).unwrap();
    assert!(mean_abs_diff(&once, &twice) < 1.0);
}
