//! Circumplex emotion space: per-frame emotion vectors, session trajectories,
//! centers of mass, 2-D PCA, confidence ellipses and cluster occupancy.

pub mod catalog;
mod export;
mod video;

use std::collections::BTreeSet;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{emotion_index, emotion_names, CATALOG_VERSION, NUM_EMOTIONS};
pub use export::{write_trajectory_csv, TrajectorySummary};
pub use video::{video_features, VIDEO_FEATURES};

pub type Vec2 = [f64; 2];

#[derive(Debug, Error, PartialEq)]
pub enum EmotionError {
    #[error("unknown emotion name `{0}`")]
    UnknownEmotionName(String),
    #[error("emotion `{0}` listed more than once")]
    DuplicateEmotion(String),
    #[error("emotion map is missing `{0}`")]
    MissingEmotion(String),
    #[error("coordinate out of [-1, 1] for `{0}`")]
    CoordinateOutOfRange(String),
    #[error("empty input")]
    EmptyInput,
    #[error("degenerate input: all points identical")]
    DegenerateInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed map or cluster file: {0}")]
    Malformed(String),
}

/// Fixed mapping of the 48 detector emotions onto the 2-D plane, stored in
/// canonical catalog order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionMap {
    coords: Vec<Vec2>,
}

impl Default for EmotionMap {
    fn default() -> Self {
        Self::canonical()
    }
}

impl EmotionMap {
    pub fn canonical() -> Self {
        Self {
            coords: catalog::EMOTIONS.iter().map(|&(_, x, y)| [x, y]).collect(),
        }
    }

    /// Loads a `name,x,y` CSV override. Every canonical name must appear once.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, EmotionError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut coords: Vec<Option<Vec2>> = vec![None; NUM_EMOTIONS];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| EmotionError::Malformed(e.to_string()))?;
            if rec.len() != 3 {
                return Err(EmotionError::Malformed(format!(
                    "expected 3 columns, found {}",
                    rec.len()
                )));
            }
            let name = &rec[0];
            let idx = emotion_index(name)
                .ok_or_else(|| EmotionError::UnknownEmotionName(name.to_string()))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| EmotionError::Malformed(format!("{name}: {e}")))
            };
            let (x, y) = (parse(&rec[1])?, parse(&rec[2])?);
            if !(-1.0..=1.0).contains(&x) || !(-1.0..=1.0).contains(&y) {
                return Err(EmotionError::CoordinateOutOfRange(name.to_string()));
            }
            if coords[idx].replace([x, y]).is_some() {
                return Err(EmotionError::DuplicateEmotion(name.to_string()));
            }
        }
        let coords = coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| EmotionError::MissingEmotion(catalog::EMOTIONS[i].0.into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { coords })
    }

    pub fn coordinates(&self, index: usize) -> Vec2 {
        self.coords[index]
    }

    pub fn lookup(&self, name: &str) -> Result<Vec2, EmotionError> {
        emotion_index(name)
            .map(|i| self.coords[i])
            .ok_or_else(|| EmotionError::UnknownEmotionName(name.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&'static str, Vec2)> + '_ {
        emotion_names().zip(self.coords.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub name: String,
    pub members: Vec<String>,
}

/// Named emotion clusters. Memberships may overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterDefs {
    clusters: Vec<(String, Vec<usize>)>,
}

impl Default for ClusterDefs {
    fn default() -> Self {
        Self::canonical()
    }
}

impl ClusterDefs {
    /// The eight analysis clusters; `Engaged` is the union of the two
    /// engagement clusters.
    pub fn canonical() -> Self {
        let mut clusters: Vec<(String, Vec<usize>)> = catalog::CLUSTERS
            .iter()
            .map(|(name, members)| {
                let idx = members
                    .iter()
                    .map(|m| emotion_index(m).expect("catalog cluster member"))
                    .collect();
                (name.to_string(), idx)
            })
            .collect();
        let engaged: BTreeSet<usize> = clusters
            .iter()
            .filter(|(n, _)| n == catalog::ENGAGED_POSITIVE || n == catalog::ENGAGED_NEGATIVE)
            .flat_map(|(_, m)| m.iter().copied())
            .collect();
        clusters.push((catalog::ENGAGED.to_string(), engaged.into_iter().collect()));
        Self { clusters }
    }

    /// Loads a JSON array of `{"name": .., "members": [..]}` objects.
    pub fn from_json<R: Read>(reader: R) -> Result<Self, EmotionError> {
        let raw: Vec<Cluster> =
            serde_json::from_reader(reader).map_err(|e| EmotionError::Malformed(e.to_string()))?;
        Self::from_clusters(&raw)
    }

    pub fn from_clusters(raw: &[Cluster]) -> Result<Self, EmotionError> {
        let clusters = raw
            .iter()
            .map(|c| {
                let mut seen = BTreeSet::new();
                let members = c
                    .members
                    .iter()
                    .map(|m| {
                        let i = emotion_index(m)
                            .ok_or_else(|| EmotionError::UnknownEmotionName(m.clone()))?;
                        if !seen.insert(i) {
                            return Err(EmotionError::DuplicateEmotion(m.clone()));
                        }
                        Ok(i)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((c.name.clone(), members))
            })
            .collect::<Result<Vec<_>, EmotionError>>()?;
        Ok(Self { clusters })
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.clusters.iter().map(|(n, _)| n.as_str())
    }

    pub fn members(&self, name: &str) -> Option<Vec<&'static str>> {
        self.clusters
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m.iter().map(|&i| catalog::EMOTIONS[i].0).collect())
    }

    pub fn to_clusters(&self) -> Vec<Cluster> {
        self.clusters
            .iter()
            .map(|(n, m)| Cluster {
                name: n.clone(),
                members: m.iter().map(|&i| catalog::EMOTIONS[i].0.to_string()).collect(),
            })
            .collect()
    }
}

/// One video frame of detector output: independent per-emotion confidences
/// in canonical catalog order. Not normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionFrame {
    pub t: f64,
    pub p: [f64; NUM_EMOTIONS],
}

impl EmotionFrame {
    pub fn zeros(t: f64) -> Self {
        Self {
            t,
            p: [0.0; NUM_EMOTIONS],
        }
    }

    pub fn one_hot(t: f64, name: &str) -> Result<Self, EmotionError> {
        Self::from_named(t, &[(name, 1.0)])
    }

    /// Builds a frame from `(name, probability)` pairs; unnamed emotions are 0.
    pub fn from_named(t: f64, probs: &[(&str, f64)]) -> Result<Self, EmotionError> {
        let mut f = Self::zeros(t);
        for &(name, p) in probs {
            let i = emotion_index(name)
                .ok_or_else(|| EmotionError::UnknownEmotionName(name.to_string()))?;
            f.p[i] = p;
        }
        Ok(f)
    }
}

/// `v = Σ p_i · (x_i, y_i)` over the 48 mapped emotions.
pub fn emotion_vector(frame: &EmotionFrame, map: &EmotionMap) -> Vec2 {
    frame
        .p
        .iter()
        .zip(&map.coords)
        .fold([0.0, 0.0], |acc, (&p, c)| [acc[0] + p * c[0], acc[1] + p * c[1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t_norm: f64,
    pub v: Vec2,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One emotion vector per frame, time normalized to `[0, 1]` over the session.
pub fn session_trajectory(
    frames: &[EmotionFrame],
    map: &EmotionMap,
) -> Result<Trajectory, EmotionError> {
    let (first, last) = match (frames.first(), frames.last()) {
        (Some(f), Some(l)) => (f.t, l.t),
        _ => return Err(EmotionError::EmptyInput),
    };
    let span = last - first;
    let points = frames
        .iter()
        .map(|f| TrajectoryPoint {
            t_norm: if span > 0.0 { (f.t - first) / span } else { 0.0 },
            v: emotion_vector(f, map),
        })
        .collect();
    Ok(Trajectory { points })
}

pub fn center_of_mass(tr: &Trajectory) -> Result<Vec2, EmotionError> {
    if tr.is_empty() {
        return Err(EmotionError::EmptyInput);
    }
    let n = tr.len() as f64;
    let s = tr
        .points
        .iter()
        .fold([0.0, 0.0], |a, p| [a[0] + p.v[0], a[1] + p.v[1]]);
    Ok([s[0] / n, s[1] / n])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub mean: Vec2,
    /// Unit principal axes, largest variance first.
    pub components: [Vec2; 2],
    pub explained_variance: [f64; 2],
}

/// Sample covariance (divisor n-1) as `(cxx, cxy, cyy)`.
fn covariance(tr: &Trajectory, mean: Vec2) -> (f64, f64, f64) {
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &tr.points {
        let dx = p.v[0] - mean[0];
        let dy = p.v[1] - mean[1];
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let d = (tr.len() - 1) as f64;
    (sxx / d, sxy / d, syy / d)
}

// Largest-magnitude coordinate positive; x wins ties.
fn fix_sign(v: Vec2) -> Vec2 {
    let flip = if v[0].abs() >= v[1].abs() { v[0] < 0.0 } else { v[1] < 0.0 };
    let v = if flip { [-v[0], -v[1]] } else { v };
    // normalize -0.0
    [v[0] + 0.0, v[1] + 0.0]
}

pub fn pca2(tr: &Trajectory) -> Result<PcaResult, EmotionError> {
    let mean = center_of_mass(tr)?;
    let first = tr.points[0].v;
    if tr.points.iter().all(|p| p.v == first) {
        return Err(EmotionError::DegenerateInput);
    }
    let (a, b, c) = covariance(tr, mean);
    let half_trace = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let l1 = half_trace + radius;
    let l2 = (half_trace - radius).max(0.0);
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (s, co) = theta.sin_cos();
    Ok(PcaResult {
        mean,
        components: [fix_sign([co, s]), fix_sign([-s, co])],
        explained_variance: [l1, l2],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub center: Vec2,
    /// Major then minor semi-axis.
    pub semi_axes: [f64; 2],
    /// Orientation of the major axis, radians.
    pub angle: f64,
    /// Set when the minor axis has zero length (collinear points).
    pub thin: bool,
}

pub const DEFAULT_K_SIGMA: f64 = 2.0;

pub fn confidence_ellipse(tr: &Trajectory, k_sigma: f64) -> Result<Ellipse, EmotionError> {
    if !(k_sigma > 0.0 && k_sigma.is_finite()) {
        return Err(EmotionError::InvalidParameter(format!("k_sigma = {k_sigma}")));
    }
    let pca = pca2(tr)?;
    let semi_axes = [
        k_sigma * pca.explained_variance[0].sqrt(),
        k_sigma * pca.explained_variance[1].sqrt(),
    ];
    let major = pca.components[0];
    Ok(Ellipse {
        center: pca.mean,
        semi_axes,
        angle: major[1].atan2(major[0]),
        thin: semi_axes[1] == 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMass {
    pub cluster: String,
    pub mass: f64,
}

/// Mean over frames of the summed probability of each cluster's members.
pub fn cluster_occupancy(
    frames: &[EmotionFrame],
    clusters: &ClusterDefs,
) -> Result<Vec<ClusterMass>, EmotionError> {
    if frames.is_empty() {
        return Err(EmotionError::EmptyInput);
    }
    let n = frames.len() as f64;
    Ok(clusters
        .clusters
        .iter()
        .map(|(name, members)| {
            let total: f64 = frames
                .iter()
                .map(|f| members.iter().map(|&i| f.p[i]).sum::<f64>())
                .sum();
            ClusterMass {
                cluster: name.clone(),
                mass: total / n,
            }
        })
        .collect())
}
