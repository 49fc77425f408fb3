//! Text model files.
//!
//! ```text
//! PFLD1
//! layout,<layout_id>
//! shape,<n_train>,<dim>,<n_classes>
//! labels,<label>,...
//! offset,<value>,...
//! train,<value>,...            (n_train lines)
//! weights,<value>,...          (n_classes lines, bias last)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureLayout, FeatureVector};
use crate::io::write_atomic;

use super::pfld::{PfldWeights, TrainedModel};

pub const MODEL_MAGIC: &str = "PFLD1";

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn write_model(model: &TrainedModel) -> String {
    let n = model.train_features.len();
    let dim = model.train_features.first().map_or(0, |f| f.len());
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC}");
    let _ = writeln!(out, "layout,{}", model.layout);
    let _ = writeln!(out, "shape,{n},{dim},{}", model.class_labels().len());
    let _ = writeln!(out, "labels,{}", model.class_labels().join(","));
    let _ = writeln!(out, "offset,{}", join(model.mean_offset()));
    for f in &model.train_features {
        let _ = writeln!(out, "train,{}", join(f.values()));
    }
    for w in &model.pfld.weights {
        let _ = writeln!(out, "weights,{}", join(w));
    }
    out
}

pub fn read_model(text: &str) -> Result<TrainedModel> {
    let mut lines = text.lines().enumerate().peekable();
    let mut offset = 0usize;
    let line_offsets: Vec<usize> = text
        .split_inclusive('\n')
        .map(|l| {
            let o = offset;
            offset += l.len();
            o
        })
        .collect();
    let err = |line: usize, message: String| Error::Parse {
        offset: line_offsets.get(line).copied().unwrap_or(text.len()),
        message,
    };

    match lines.next() {
        Some((_, MODEL_MAGIC)) => {}
        _ => return Err(err(0, format!("missing `{MODEL_MAGIC}` header"))),
    }
    let mut record = |key: &str| -> Result<(usize, Vec<String>)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| err(line_offsets.len(), format!("missing `{key}` record")))?;
        let mut fields = line.split(',');
        if fields.next() != Some(key) {
            return Err(err(no, format!("expected `{key}` record")));
        }
        Ok((no, fields.map(str::to_string).collect()))
    };
    let numbers = |no: usize, fields: &[String]| -> Result<Vec<f64>> {
        fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| err(no, format!("invalid number `{f}`")))
            })
            .collect()
    };

    let (no, layout) = record("layout")?;
    let layout: FeatureLayout = layout
        .join(",")
        .parse()
        .map_err(|e: Error| err(no, e.to_string()))?;
    let (no, shape) = record("shape")?;
    let shape: Vec<usize> = shape
        .iter()
        .map(|f| f.parse().map_err(|_| err(no, format!("invalid count `{f}`"))))
        .collect::<Result<_>>()?;
    let [n, dim, n_classes] = shape[..] else {
        return Err(err(no, "shape needs three counts".into()));
    };
    let (_, labels) = record("labels")?;
    if labels.len() != n_classes {
        return Err(err(no, "label count does not match shape".into()));
    }
    let (no, offset) = record("offset")?;
    let mean_offset = numbers(no, &offset)?;
    if mean_offset.len() != n {
        return Err(err(no, "offset length does not match shape".into()));
    }
    let mut train_features = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, fields) = record("train")?;
        let values = numbers(no, &fields)?;
        if values.len() != dim {
            return Err(err(no, "feature length does not match shape".into()));
        }
        train_features.push(
            FeatureVector::new(layout.clone(), values).map_err(|e| err(no, e.to_string()))?,
        );
    }
    let mut weights = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let (no, fields) = record("weights")?;
        let w = numbers(no, &fields)?;
        if w.len() != n + 1 {
            return Err(err(no, "weight length does not match shape".into()));
        }
        weights.push(w);
    }
    Ok(TrainedModel {
        layout,
        train_features,
        pfld: PfldWeights {
            labels: labels.into(),
            mean_offset,
            weights,
        },
    })
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    write_atomic(path, write_model(model).as_bytes())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    read_model(&text)
}
