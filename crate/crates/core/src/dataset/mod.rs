//! Image collections on disk and face geometry normalization.

mod normalize;
mod pgm;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use normalize::{normalize_face, EllipseMask, NormalizationConfig};
pub use pgm::{encode_pgm, load_pgm, parse_pgm, read_pgm, save_pgm, Graymap};

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Annotated eye centers, in source pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyePair {
    pub left: (f64, f64),
    pub right: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImageSource {
    Path(PathBuf),
    Memory(GrayImage),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub image_id: String,
    pub subject_id: String,
    pub source: ImageSource,
    pub eyes: Option<EyePair>,
}

impl DatasetEntry {
    pub fn in_memory(image_id: impl Into<String>, subject_id: impl Into<String>, image: GrayImage) -> Self {
        DatasetEntry {
            image_id: image_id.into(),
            subject_id: subject_id.into(),
            source: ImageSource::Memory(image),
            eyes: None,
        }
    }

    pub fn load_image(&self) -> Result<GrayImage> {
        match &self.source {
            ImageSource::Path(p) => load_pgm(p),
            ImageSource::Memory(img) => Ok(img.clone()),
        }
    }
}

/// Labeled images, ordered by image id.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    entries: Vec<DatasetEntry>,
}

impl Dataset {
    pub fn new(mut entries: Vec<DatasetEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dataset("dataset is empty".into()));
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if e.subject_id.is_empty() {
                return Err(Error::Dataset(format!("image `{}` has an empty subject id", e.image_id)));
            }
            if !seen.insert(e.image_id.as_str()) {
                return Err(Error::Dataset(format!("duplicate image id `{}`", e.image_id)));
            }
        }
        entries.sort_by(|a, b| a.image_id.cmp(&b.image_id));
        Ok(Dataset { entries })
    }

    pub fn entries(&self) -> &[DatasetEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct subject ids, sorted.
    pub fn subjects(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| e.subject_id.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn subject_ids(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.subject_id.clone()).collect()
    }

    pub fn image_ids(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.image_id.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetLayout {
    /// One subdirectory per subject holding that subject's `.pgm` files.
    Orl,
    /// `manifest.csv`: `path,subject[,x_l,y_l,x_r,y_r]` per line.
    FlatManifest,
}

impl FromStr for DatasetLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orl" => Ok(DatasetLayout::Orl),
            "flat-manifest" => Ok(DatasetLayout::FlatManifest),
            other => Err(Error::Config(format!(
                "unknown dataset layout `{other}` (expected orl or flat-manifest)"
            ))),
        }
    }
}

impl fmt::Display for DatasetLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetLayout::Orl => "orl",
            DatasetLayout::FlatManifest => "flat-manifest",
        })
    }
}

/// File name looked up when a manifest root is a directory.
pub const MANIFEST_NAME: &str = "manifest.csv";

pub fn load_dataset_dir(root: &Path, layout: DatasetLayout) -> Result<Dataset> {
    match layout {
        DatasetLayout::Orl => load_orl(root),
        DatasetLayout::FlatManifest => {
            let manifest = if root.is_dir() {
                root.join(MANIFEST_NAME)
            } else {
                root.to_path_buf()
            };
            load_manifest(&manifest)
        }
    }
}

fn sorted_dir(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let read = std::fs::read_dir(dir).map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
    let mut out = Vec::new();
    for entry in read {
        let entry = entry.map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        out.push((name, entry.path()));
    }
    out.sort();
    Ok(out)
}

fn load_orl(root: &Path) -> Result<Dataset> {
    let mut entries = Vec::new();
    for (subject, dir) in sorted_dir(root)? {
        if !dir.is_dir() || subject.starts_with('.') {
            continue;
        }
        for (file, path) in sorted_dir(&dir)? {
            let is_pgm = Path::new(&file)
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
            if !is_pgm || !path.is_file() {
                continue;
            }
            entries.push(DatasetEntry {
                image_id: format!("{subject}/{file}"),
                subject_id: subject.clone(),
                source: ImageSource::Path(path),
                eyes: None,
            });
        }
    }
    if entries.is_empty() {
        return Err(Error::Dataset(format!(
            "no subject directories with .pgm files under {}",
            root.display()
        )));
    }
    Dataset::new(entries)
}

fn load_manifest(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading manifest {}", path.display()), e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Manifest {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 && fields.len() != 6 {
            return Err(bad(format!(
                "expected path,subject[,x_l,y_l,x_r,y_r], got {} fields",
                fields.len()
            )));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(bad("empty path or subject".into()));
        }
        let eyes = if fields.len() == 6 {
            let c: Vec<f64> = fields[2..]
                .iter()
                .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("eye coordinates must be finite numbers".into()))?;
            Some(EyePair {
                left: (c[0], c[1]),
                right: (c[2], c[3]),
            })
        } else {
            None
        };
        if !seen.insert(fields[0].to_string()) {
            return Err(bad(format!("duplicate image id `{}`", fields[0])));
        }
        entries.push(DatasetEntry {
            image_id: fields[0].to_string(),
            subject_id: fields[1].to_string(),
            source: ImageSource::Path(base.join(fields[0])),
            eyes,
        });
    }
    Dataset::new(entries)
}
