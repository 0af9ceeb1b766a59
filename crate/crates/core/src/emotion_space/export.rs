use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{
    center_of_mass, confidence_ellipse, pca2, EmotionError, Trajectory, Vec2, CATALOG_VERSION,
};

/// Sidecar for a trajectory CSV: everything a plot needs besides the points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub catalog_version: String,
    pub n_points: usize,
    pub center: Vec2,
    pub k_sigma: f64,
    /// `None` when the trajectory has fewer than two distinct points.
    pub semi_axes: Option<[f64; 2]>,
    pub angle: Option<f64>,
    pub components: Option<[Vec2; 2]>,
    pub explained_variance: Option<[f64; 2]>,
}

impl TrajectorySummary {
    pub fn compute(tr: &Trajectory, k_sigma: f64) -> Result<Self, EmotionError> {
        let center = center_of_mass(tr)?;
        let (pca, ellipse) = match pca2(tr) {
            Ok(p) => (Some(p), Some(confidence_ellipse(tr, k_sigma)?)),
            Err(EmotionError::DegenerateInput) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(Self {
            catalog_version: CATALOG_VERSION.to_string(),
            n_points: tr.len(),
            center,
            k_sigma,
            semi_axes: ellipse.as_ref().map(|e| e.semi_axes),
            angle: ellipse.as_ref().map(|e| e.angle),
            components: pca.as_ref().map(|p| p.components),
            explained_variance: pca.as_ref().map(|p| p.explained_variance),
        })
    }
}

/// Writes `t_norm,x,y` rows.
pub fn write_trajectory_csv<W: Write>(mut w: W, tr: &Trajectory) -> io::Result<()> {
    writeln!(w, "t_norm,x,y")?;
    for p in &tr.points {
        writeln!(w, "{},{},{}", p.t_norm, p.v[0], p.v[1])?;
    }
    w.flush()
}
