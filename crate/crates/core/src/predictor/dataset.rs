//! Feature tables, labels and the complete-case training dataset.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::impact_metrics::SuccessLabel;

use super::PredictorError;

/// One row per session; `None` marks an absent feature.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl FeatureTable {
    pub fn new(feature_names: Vec<String>) -> Self {
        Self {
            feature_names,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, session_id: &str, values: Vec<Option<f64>>) -> Result<(), PredictorError> {
        if values.len() != self.feature_names.len() {
            return Err(PredictorError::LengthMismatch {
                expected: self.feature_names.len(),
                got: values.len(),
            });
        }
        self.rows.push((session_id.to_string(), values));
        Ok(())
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<FeatureTable, PredictorError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.feature_names
                    .iter()
                    .position(|f| f == n)
                    .ok_or_else(|| PredictorError::UnknownFeature(n.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(FeatureTable {
            feature_names: names.iter().map(|s| s.to_string()).collect(),
            rows: self
                .rows
                .iter()
                .map(|(id, v)| (id.clone(), idx.iter().map(|&i| v[i]).collect()))
                .collect(),
        })
    }

    /// Column-wise concatenation, matching rows by session id. Sessions
    /// missing from `other` get absent values for its columns.
    pub fn join(&self, other: &FeatureTable) -> FeatureTable {
        let lookup: BTreeMap<&str, &Vec<Option<f64>>> = other.rows.iter().map(|(id, v)| (id.as_str(), v)).collect();
        let mut names = self.feature_names.clone();
        names.extend(other.feature_names.iter().cloned());
        let rows = self
            .rows
            .iter()
            .map(|(id, v)| {
                let mut row = v.clone();
                match lookup.get(id.as_str()) {
                    Some(o) => row.extend(o.iter().copied()),
                    None => row.extend(std::iter::repeat_n(None, other.feature_names.len())),
                }
                (id.clone(), row)
            })
            .collect();
        FeatureTable {
            feature_names: names,
            rows,
        }
    }

    /// CSV with a `session_id` column followed by one column per feature;
    /// absent values are empty cells. Floats use shortest round-trip form.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), PredictorError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["session_id".to_string()];
        header.extend(self.feature_names.iter().cloned());
        out.write_record(&header)?;
        for (id, v) in &self.rows {
            let mut rec = vec![id.clone()];
            rec.extend(v.iter().map(|x| x.map(|x| x.to_string()).unwrap_or_default()));
            out.write_record(&rec)?;
        }
        out.flush().map_err(|e| PredictorError::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, PredictorError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("session_id") {
            return Err(PredictorError::Csv("first column must be session_id".into()));
        }
        let mut table = FeatureTable::new(header.iter().skip(1).map(str::to_string).collect());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let values = rec
                .iter()
                .skip(1)
                .map(|cell| {
                    if cell.trim().is_empty() {
                        Ok(None)
                    } else {
                        cell.trim()
                            .parse::<f64>()
                            .map(Some)
                            .map_err(|_| PredictorError::Csv(format!("row {}: bad number {cell:?}", line + 2)))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push(&rec[0], values)?;
        }
        Ok(table)
    }
}

/// Reads a `session_id,success` CSV. Success accepts 1/0, true/false and
/// successful/unsuccessful.
pub fn read_labels_csv<R: Read>(r: R) -> Result<BTreeMap<String, SuccessLabel>, PredictorError> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = BTreeMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let label = match rec.get(1).map(|s| s.trim().to_ascii_lowercase()).as_deref() {
            Some("1" | "true" | "successful") => SuccessLabel::Successful,
            Some("0" | "false" | "unsuccessful") => SuccessLabel::Unsuccessful,
            other => {
                return Err(PredictorError::Csv(format!("row {}: bad label {other:?}", line + 2)));
            }
        };
        out.insert(rec[0].to_string(), label);
    }
    Ok(out)
}

pub fn write_labels_csv<W: Write>(w: W, labels: &[(String, SuccessLabel)]) -> Result<(), PredictorError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["session_id", "success"])?;
    for (id, l) in labels {
        out.write_record([id.as_str(), if l.is_success() { "1" } else { "0" }])?;
    }
    out.flush().map_err(|e| PredictorError::Csv(e.to_string()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub session_id: String,
    pub x: Vec<f64>,
    pub y: SuccessLabel,
}

/// Complete-case rows sharing one feature list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Row>,
}

/// Rows left out of a [`Dataset`] and why.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Dropped {
    pub absent_features: Vec<String>,
    pub unlabeled: Vec<String>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Row>) -> Result<Self, PredictorError> {
        for r in &rows {
            if r.x.len() != feature_names.len() {
                return Err(PredictorError::LengthMismatch {
                    expected: feature_names.len(),
                    got: r.x.len(),
                });
            }
            if r.x.iter().any(|v| !v.is_finite()) {
                return Err(PredictorError::NonFinite(r.session_id.clone()));
            }
        }
        Ok(Self { feature_names, rows })
    }

    /// Joins features with labels, dropping rows with any absent value or no
    /// label. Row order follows the table.
    pub fn from_table(table: &FeatureTable, labels: &BTreeMap<String, SuccessLabel>) -> (Self, Dropped) {
        let mut dropped = Dropped::default();
        let mut rows = Vec::new();
        for (id, v) in &table.rows {
            let Some(&y) = labels.get(id) else {
                dropped.unlabeled.push(id.clone());
                continue;
            };
            match v.iter().copied().collect::<Option<Vec<f64>>>() {
                Some(x) if x.iter().all(|v| v.is_finite()) => rows.push(Row {
                    session_id: id.clone(),
                    x,
                    y,
                }),
                _ => dropped.absent_features.push(id.clone()),
            }
        }
        if !dropped.absent_features.is_empty() {
            log::warn!("dropped {} rows with absent features", dropped.absent_features.len());
        }
        (
            Self {
                feature_names: table.feature_names.clone(),
                rows,
            },
            dropped,
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.rows.iter().filter(|r| r.y.is_success()).count();
        (pos, self.rows.len() - pos)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.x[j]).collect()
    }

    pub fn select(&self, names: &[&str]) -> Result<Dataset, PredictorError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.feature_names
                    .iter()
                    .position(|f| f == n)
                    .ok_or_else(|| PredictorError::UnknownFeature(n.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Dataset {
            feature_names: names.iter().map(|s| s.to_string()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    session_id: r.session_id.clone(),
                    x: idx.iter().map(|&i| r.x[i]).collect(),
                    y: r.y,
                })
                .collect(),
        })
    }

    pub fn without_row(&self, i: usize) -> Dataset {
        let mut rows = self.rows.clone();
        rows.remove(i);
        Dataset {
            feature_names: self.feature_names.clone(),
            rows,
        }
    }
}

/// Per-feature (mean, population sd) standardization. Constant features get
/// sd 1 so they standardize to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Scaler {
    pub fn fit(d: &Dataset) -> Self {
        let n = d.len() as f64;
        let p = d.n_features();
        let mut mean = vec![0.0; p];
        for r in &d.rows {
            for (m, v) in mean.iter_mut().zip(&r.x) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; p];
        for r in &d.rows {
            for ((s, v), m) in var.iter_mut().zip(&r.x).zip(&mean) {
                *s += (v - m).powi(2);
            }
        }
        let sd = var
            .into_iter()
            .zip(&mean)
            .map(|(s, m)| {
                let sd = (s / n).sqrt();
                // relative guard so float noise in a constant column is not amplified
                if sd > 1e-12 * m.abs().max(1.0) {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, sd }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}
