//! Feature files: one image per line, `image-id,subject-id,layout_id,v1,v2,...`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{FeatureLayout, FeatureVector};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub image_id: String,
    pub subject_id: String,
    pub features: FeatureVector,
}

fn check_field(kind: &str, value: &str) -> Result<()> {
    if value.is_empty() || value.contains([',', '\n', '\r']) {
        return Err(Error::Config(format!(
            "{kind} `{value}` must be nonempty and free of commas and newlines"
        )));
    }
    Ok(())
}

/// Serializes records; values use the shortest representation that parses
/// back to the same `f64`.
pub fn write_feature_csv(records: &[FeatureRecord]) -> Result<String> {
    let mut out = String::new();
    for rec in records {
        check_field("image id", &rec.image_id)?;
        check_field("subject id", &rec.subject_id)?;
        let _ = write!(out, "{},{},{}", rec.image_id, rec.subject_id, rec.features.layout_id());
        for v in rec.features.values() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_feature_csv(text: &str) -> Result<Vec<FeatureRecord>> {
    let mut records = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let line = line.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            offset: start,
            message,
        };
        let mut fields = line.split(',');
        let image_id = fields.next().unwrap_or_default().to_string();
        let subject_id = fields
            .next()
            .ok_or_else(|| err("missing subject id".into()))?
            .to_string();
        let layout: FeatureLayout = fields
            .next()
            .ok_or_else(|| err("missing layout id".into()))?
            .parse()
            .map_err(|e| err(format!("{e}")))?;
        let values = fields
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("invalid value `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let features = FeatureVector::new(layout, values).map_err(|e| err(e.to_string()))?;
        records.push(FeatureRecord {
            image_id,
            subject_id,
            features,
        });
    }
    Ok(records)
}
