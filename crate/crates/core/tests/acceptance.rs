//! Acceptance checks, one line per criterion.
//!
//! Criteria 9 and 10 need the ORL/AT&T faces tree (one directory per
//! subject); point `POLARFACE_ORL_DIR` at it to run them.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use polarface::bessel::{bessel_j, bessel_roots, BesselRootTable};
use polarface::classifier::{classify, dissimilarity_matrix, fit_pfld, train_pfld};
use polarface::cli::{cmd_experiment, cmd_synth_dataset, ExperimentKind, RunConfig};
use polarface::dataset::{load_dataset_dir, load_pgm, DatasetLayout};
use polarface::eval::{
    cmc, equal_error_rate, learning_curve, mean_and_sem, random_split, run_error_experiment, verification_roc,
    ScoreMatrix, ScoreOrientation, SplitSpec,
};
use polarface::features::{fbt, inverse_fbt, synth_angular, synth_mix, synth_radial, FbtConfig, FeatureVector};
use polarface::pipeline::{extract_dataset, ExtractorConfig, FeatureMode};
use polarface::polar::{to_polar, PolarGrid};
use polarface::toy::{toy_dataset, ToySpec};
use polarface::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn bessel_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [0u32, 1, 5, 30] {
        let exact = common::bessel_zeros(n, 30);
        let ours = bessel_roots(n as i32, 30).unwrap();
        for (a, b) in ours.iter().zip(&exact) {
            worst = worst.max((a - b).abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut residual: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=30);
        let x: f64 = rng.gen_range(0.5..150.0);
        let lhs = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
        let rhs = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
        residual = residual.max((lhs - rhs).abs());
    }
    verdict(
        worst < 1e-9 && residual < 1e-9,
        format!("max root error {worst:.2e}, max recurrence residual {residual:.2e}"),
    )
}

/// `((order, root), |value|)` of every A and B entry except `A(0,1)` and
/// the zero `B(0,.)`, largest first.
fn ranked(img: &GrayImage, cfg: &FbtConfig, roots: &BesselRootTable) -> Vec<((usize, usize), f64)> {
    let s = fbt(&to_polar(img, cfg.angular_resolution).unwrap(), cfg, roots).unwrap();
    let mut out = Vec::new();
    for n in 0..=cfg.max_order {
        for i in 1..=cfg.max_root {
            if (n, i) != (0, 1) {
                out.push(((n, i), s.a(n, i).abs()));
            }
            if n > 0 {
                out.push(((n, i), s.b(n, i).abs()));
            }
        }
    }
    out.sort_by(|p, q| q.1.total_cmp(&p.1));
    out
}

fn synthetic_patterns() -> Outcome {
    let cfg = FbtConfig {
        max_order: 30,
        max_root: 10,
        angular_resolution: 0.5,
    };
    let roots = BesselRootTable::build(30, 10).unwrap();
    let radial = ranked(&synth_radial(8.0, 131).unwrap(), &cfg, &roots);
    let angular = ranked(&synth_angular(4, 131).unwrap(), &cfg, &roots);
    let mix = ranked(&synth_mix(8.0, 4, 131).unwrap(), &cfg, &roots);
    let mut top2 = [mix[0].0, mix[1].0];
    top2.sort();
    verdict(
        radial[0].0 == (0, 8) && angular[0].0 == (4, 1) && top2 == [(0, 8), (4, 1)],
        format!(
            "radial top {:?}, angular top {:?}, mix top-2 {:?} {:?} (third {:.3})",
            radial[0], angular[0], mix[0], mix[1], mix[2].1
        ),
    )
}

fn relative_l2(a: &PolarGrid, b: &PolarGrid) -> f64 {
    let num: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.samples().iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn reconstruction() -> Outcome {
    let img = load_pgm(&data("face_92x112.pgm")).unwrap();
    let grid = to_polar(&img, 0.5).unwrap();
    let roots = BesselRootTable::build(30, 30).unwrap();
    let cfg = FbtConfig {
        max_order: 30,
        max_root: 30,
        angular_resolution: 0.5,
    };
    let full = fbt(&grid, &cfg, &roots).unwrap();
    let e: Vec<f64> = [3, 10, 30]
        .iter()
        .map(|&m| relative_l2(&inverse_fbt(&full.truncated(m), &roots, grid.n_rays(), grid.n_rings()).unwrap(), &grid))
        .collect();
    verdict(
        e[0] > e[1] && e[1] > e[2],
        format!("relative L2 error {:.4} > {:.4} > {:.4}", e[0], e[1], e[2]),
    )
}

fn pfld_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    let mut worst_dot: f64 = 0.0;
    let mut deficient = 0;
    for trial in 0..20 {
        let duplicates = if trial % 3 == 0 { 1 + trial % 4 } else { 0 };
        let dim = rng.gen_range(3..10);
        let mut raw: Vec<(Vec<f64>, String)> = (0..20 - duplicates)
            .map(|i| {
                let v = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                (v, format!("c{}", i % 4))
            })
            .collect();
        for _ in 0..duplicates {
            let j = rng.gen_range(0..raw.len());
            raw.push(raw[j].clone());
        }
        let features: Vec<_> = raw.iter().map(|(v, _)| FeatureVector::custom("p", v.clone()).unwrap()).collect();
        let labels: Vec<&str> = raw.iter().map(|(_, l)| l.as_str()).collect();
        let d = dissimilarity_matrix(&features).unwrap();
        let model = fit_pfld(&d, &labels).unwrap();
        let n = d.len();
        let means: Vec<f64> = (0..n).map(|j| (0..n).map(|i| d.get(i, j)).sum::<f64>() / n as f64).collect();
        let x: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| d.get(i, j) - means[j]).chain([1.0]).collect())
            .collect();
        let y: Vec<Vec<f64>> = labels
            .iter()
            .map(|l| model.labels().iter().map(|c| if c == l { 1.0 } else { -1.0 }).collect())
            .collect();
        let oracle = common::min_norm_solution(&x, &y);
        let probe: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let null = common::null_component(&x, &probe);
        let null_norm = null.iter().map(|v| v * v).sum::<f64>().sqrt();
        if duplicates > 0 && null_norm > 1e-3 {
            deficient += 1;
        }
        for (c, expected) in oracle.iter().enumerate() {
            let scale = expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (g, e) in model.weights(c).iter().zip(expected) {
                worst = worst.max((g - e).abs() / scale);
            }
            let dot: f64 = model.weights(c).iter().zip(&null).map(|(a, b)| a * b).sum();
            worst_dot = worst_dot.max(dot.abs() / (scale * null_norm.max(1.0)));
        }
    }
    verdict(
        worst < 1e-8 && worst_dot < 1e-8 && deficient >= 5,
        format!("max weight error {worst:.2e}, null-space component {worst_dot:.2e}, {deficient} rank-deficient problems"),
    )
}

fn zero_columns() -> Outcome {
    let ds = toy_dataset(&ToySpec {
        subjects: 5,
        images_per_subject: 10,
        size: 48,
        ..ToySpec::default()
    })
    .unwrap();
    let cfg = ExtractorConfig::default();
    let with = extract_dataset(&ds, FeatureMode::Fbt, &cfg).unwrap().fbt.unwrap();
    let (max_root, per_part) = (cfg.fbt.max_root, (cfg.fbt.max_order + 1) * cfg.fbt.max_root);
    let without: Vec<FeatureVector> = with
        .iter()
        .map(|f| {
            let kept = f
                .values()
                .iter()
                .enumerate()
                .filter(|(k, _)| !(per_part..per_part + max_root).contains(k))
                .map(|(_, &v)| v)
                .collect();
            FeatureVector::custom("fbt-no-b0", kept).unwrap()
        })
        .collect();
    let b0_zero = with.iter().all(|f| f.values()[per_part..per_part + max_root].iter().all(|&v| v == 0.0));
    let da = dissimilarity_matrix(&with).unwrap();
    let db = dissimilarity_matrix(&without).unwrap();
    let same_d = (0..da.len()).all(|i| (0..da.len()).all(|j| da.get(i, j) == db.get(i, j)));

    let subjects = ds.subject_ids();
    let split = random_split(&subjects, &SplitSpec::default(), 0).unwrap();
    let pick = |set: &[FeatureVector], idx: &[usize]| idx.iter().map(|&i| set[i].clone()).collect::<Vec<_>>();
    let labels: Vec<&str> = split.train.iter().map(|&i| subjects[i].as_str()).collect();
    let ma = train_pfld(&pick(&with, &split.train), &labels).unwrap();
    let mb = train_pfld(&pick(&without, &split.train), &labels).unwrap();
    let same_labels = split.test.iter().all(|&i| {
        classify(&ma, &with[i]).unwrap().predicted() == classify(&mb, &without[i]).unwrap().predicted()
    });
    verdict(
        b0_zero && same_d && same_labels,
        format!(
            "{} images: B0 zero {b0_zero}, dissimilarities identical {same_d}, labels identical {same_labels}",
            ds.len()
        ),
    )
}

fn toy_end_to_end() -> Outcome {
    let ds = toy_dataset(&ToySpec::default()).unwrap();
    let features = extract_dataset(&ds, FeatureMode::Fbt, &ExtractorConfig::default()).unwrap();
    let recognizer = features.recognizer(FeatureMode::Fbt).unwrap();
    let spec = SplitSpec {
        k_train_per_subject: 5,
        repetitions: 10,
        seed: 1,
        n_subjects: None,
    };
    let r = run_error_experiment(&features.subjects, recognizer.as_ref(), &spec).unwrap();
    verdict(
        r.mean == 0.0,
        format!("{} subjects x 10 images, k=5, 10 seeded splits: mean error {:.4} sem {:.4}", ds.subjects().len(), r.mean, r.sem),
    )
}

fn evaluation_math() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut notes = Vec::new();

    let classes: Vec<String> = (0..12).map(|c| format!("c{c}")).collect();
    let mut cmc_ok = true;
    for _ in 0..20 {
        let probes = rng.gen_range(5..40);
        let scores = ScoreMatrix {
            classes: classes.clone().into(),
            scores: (0..probes)
                .map(|_| (0..12).map(|_| (rng.gen_range(0..5) as f64) / 4.0).collect())
                .collect(),
        };
        let truth: Vec<String> = (0..probes).map(|_| classes[rng.gen_range(0..12)].clone()).collect();
        let c = cmc(&scores, &truth).unwrap();
        cmc_ok &= c.proportion.windows(2).all(|w| w[0] <= w[1])
            && c.proportion.iter().all(|p| (0.0..=1.0).contains(p))
            && c.at(12) == 1.0;
    }
    notes.push(format!("cmc monotone {cmc_ok}"));

    let mut roc_ok = true;
    for orientation in [ScoreOrientation::Distance, ScoreOrientation::Similarity] {
        let g: Vec<f64> = (0..300).map(|_| rng.gen_range(0.0..0.7)).collect();
        let i: Vec<f64> = (0..900).map(|_| rng.gen_range(0.3..1.0)).collect();
        let roc = verification_roc(&g, &i, orientation).unwrap();
        roc_ok &= roc.thresholds.len() == 100
            && roc.verification.windows(2).all(|w| w[0] <= w[1])
            && roc.false_alarm.windows(2).all(|w| w[0] <= w[1])
            && roc.verification.iter().chain(&roc.false_alarm).all(|p| (0.0..=1.0).contains(p));
    }
    notes.push(format!("roc monotone {roc_ok}"));

    let normal = |rng: &mut ChaCha8Rng| {
        let (u, v): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen_range(0.0..1.0));
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    };
    let g: Vec<f64> = (0..20000).map(|_| normal(&mut rng)).collect();
    let i: Vec<f64> = (0..20000).map(|_| normal(&mut rng)).collect();
    let roc = verification_roc(&g, &i, ScoreOrientation::Distance).unwrap();
    let eer = equal_error_rate(&roc);
    let step = roc
        .false_alarm
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let eer_ok = (eer.rate - 0.5).abs() <= step;
    notes.push(format!("symmetric eer {:.4} (step {:.4})", eer.rate, step));

    let values: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..0.2)).collect();
    let (mean, sem) = mean_and_sem(&values);
    let m2 = values.iter().sum::<f64>() / 10.0;
    let ss: f64 = values.iter().map(|v| (v - m2) * (v - m2)).sum();
    let direct = (ss / 9.0).sqrt() / 10f64.sqrt();
    let sem_ok = (mean - m2).abs() < 1e-12 && (sem - direct).abs() < 1e-12;
    notes.push(format!("sem diff {:.1e}", (sem - direct).abs()));

    verdict(cmc_ok && roc_ok && eer_ok && sem_ok, notes.join(", "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let toy = dir.path().join("toy");
    cmd_synth_dataset(
        &ToySpec {
            subjects: 6,
            images_per_subject: 6,
            size: 40,
            ..ToySpec::default()
        },
        &toy,
    )
    .unwrap();
    let runs = [
        (ExperimentKind::ErrorRate, FeatureMode::Fused),
        (ExperimentKind::LearningCurve, FeatureMode::Fbt),
        (ExperimentKind::Identification, FeatureMode::Dft),
        (ExperimentKind::Verification, FeatureMode::Fused),
        (ExperimentKind::FeatureMap, FeatureMode::Fbt),
    ];
    let mut compared = 0;
    let mut differing = Vec::new();
    for (experiment, mode) in runs {
        let mut files = Vec::new();
        for out in ["a", "b"] {
            let cfg = RunConfig {
                experiment,
                mode,
                dataset: Some(toy.clone()),
                out: dir.path().join(out),
                learning_k: vec![1, 3, 5],
                split: SplitSpec {
                    k_train_per_subject: 3,
                    repetitions: 4,
                    ..SplitSpec::default()
                },
                ..RunConfig::default()
            };
            files.push(cmd_experiment(&cfg).unwrap().files);
        }
        for (a, b) in files[0].iter().zip(&files[1]) {
            compared += 1;
            if std::fs::read(a).unwrap() != std::fs::read(b).unwrap() {
                differing.push(a.file_name().unwrap().to_string_lossy().into_owned());
            }
        }
    }
    verdict(
        differing.is_empty() && compared >= 10,
        format!("{compared} report files compared, {} differ {differing:?}", differing.len()),
    )
}

const ORL_ENV: &str = "POLARFACE_ORL_DIR";

fn orl_features() -> Option<(polarface::pipeline::ExtractedFeatures, usize)> {
    let dir = std::env::var_os(ORL_ENV)?;
    let ds = load_dataset_dir(Path::new(&dir), DatasetLayout::Orl).unwrap();
    let n = ds.len();
    Some((extract_dataset(&ds, FeatureMode::Fused, &ExtractorConfig::default()).unwrap(), n))
}

fn orl_error_rates(orl: &Option<(polarface::pipeline::ExtractedFeatures, usize)>) -> Outcome {
    let Some((features, n)) = orl else {
        return Skip(format!("set {ORL_ENV} to the ORL/AT&T faces tree"));
    };
    let spec = SplitSpec::default();
    let mut means = Vec::new();
    for mode in [FeatureMode::Fbt, FeatureMode::Dft, FeatureMode::Fused] {
        let r = run_error_experiment(&features.subjects, features.recognizer(mode).unwrap().as_ref(), &spec).unwrap();
        means.push(r.mean);
    }
    let (f, d, u) = (means[0], means[1], means[2]);
    verdict(
        f <= 0.07 && d <= 0.04 && u <= 0.02 && u < f.min(d),
        format!("{n} images: fbt {:.2}%, dft {:.2}%, fused {:.2}%", 100.0 * f, 100.0 * d, 100.0 * u),
    )
}

fn orl_learning_curves(orl: &Option<(polarface::pipeline::ExtractedFeatures, usize)>) -> Outcome {
    let Some((features, _)) = orl else {
        return Skip(format!("set {ORL_ENV} to the ORL/AT&T faces tree"));
    };
    let mut ok = true;
    let mut notes = Vec::new();
    for mode in [FeatureMode::Fbt, FeatureMode::Dft, FeatureMode::Fused] {
        let recognizer = features.recognizer(mode).unwrap();
        let mut good = 0;
        for seed in 1..=10 {
            let spec = SplitSpec {
                seed,
                ..SplitSpec::default()
            };
            let curve = learning_curve(&features.subjects, recognizer.as_ref(), &spec, &[1, 3, 5]).unwrap();
            if curve.windows(2).all(|w| w[1].1.mean <= w[0].1.mean) {
                good += 1;
            }
        }
        ok &= good >= 9;
        notes.push(format!("{mode} {good}/10"));
    }
    verdict(ok, format!("nonincreasing over k=1,3,5: {}", notes.join(", ")))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, check: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Fail(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("{tag} {id:>2} {name}: {detail} [{secs:.1}s]");
    };
    report(1, "bessel-oracle", &mut bessel_oracle);
    report(2, "synthetic-patterns", &mut synthetic_patterns);
    report(3, "reconstruction-monotone", &mut reconstruction);
    report(4, "pfld-oracle", &mut pfld_oracle);
    report(5, "zero-column-invariance", &mut zero_columns);
    report(6, "toy-end-to-end", &mut toy_end_to_end);
    report(7, "evaluation-math", &mut evaluation_math);
    report(8, "determinism", &mut determinism);
    let orl = orl_features();
    report(9, "orl-error-rates", &mut || orl_error_rates(&orl));
    report(10, "orl-learning-curves", &mut || orl_learning_curves(&orl));
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
