//! Session-level video features derived from the emotion trajectory.

use super::{
    cluster_occupancy, confidence_ellipse, pca2, session_trajectory, ClusterDefs, EmotionFrame,
    EmotionMap,
};

/// Feature names in output order. Cluster features follow the canonical
/// cluster order.
pub const VIDEO_FEATURES: [&str; 15] = [
    "video_com_x",
    "video_com_y",
    "video_pca_var1",
    "video_pca_var2",
    "video_pca_angle",
    "video_ellipse_major",
    "video_ellipse_minor",
    "video_cluster_active_positive",
    "video_cluster_active_negative",
    "video_cluster_passive_positive",
    "video_cluster_strongest_passive_positive",
    "video_cluster_passive_negative",
    "video_cluster_engaged_positive",
    "video_cluster_engaged_negative",
    "video_cluster_engaged",
];

/// Computes [`VIDEO_FEATURES`]; entries are `None` where undefined (no frames,
/// or fewer than two distinct emotion vectors for the PCA/ellipse entries).
///
/// `clusters` must have eight entries for the cluster slots to line up; extra
/// or missing clusters leave the tail absent.
pub fn video_features(
    frames: &[EmotionFrame],
    map: &EmotionMap,
    clusters: &ClusterDefs,
    k_sigma: f64,
) -> Vec<Option<f64>> {
    let mut out = vec![None; VIDEO_FEATURES.len()];
    let Ok(tr) = session_trajectory(frames, map) else {
        return out;
    };
    if let Ok(com) = super::center_of_mass(&tr) {
        out[0] = Some(com[0]);
        out[1] = Some(com[1]);
    }
    if let (Ok(p), Ok(e)) = (pca2(&tr), confidence_ellipse(&tr, k_sigma)) {
        out[2] = Some(p.explained_variance[0]);
        out[3] = Some(p.explained_variance[1]);
        out[4] = Some(e.angle);
        out[5] = Some(e.semi_axes[0]);
        out[6] = Some(e.semi_axes[1]);
    }
    if clusters.len() == 8 {
        if let Ok(occ) = cluster_occupancy(frames, clusters) {
            for (slot, c) in out[7..].iter_mut().zip(occ) {
                *slot = Some(c.mass);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_frames_all_absent() {
        let v = video_features(&[], &EmotionMap::canonical(), &ClusterDefs::canonical(), 2.0);
        assert!(v.iter().all(Option::is_none));
    }

    #[test]
    fn constant_frames_have_no_spread_features() {
        let frames: Vec<_> = (0..4)
            .map(|i| EmotionFrame::one_hot(i as f64, "Joy").unwrap())
            .collect();
        let v = video_features(&frames, &EmotionMap::canonical(), &ClusterDefs::canonical(), 2.0);
        assert_eq!(v[0], Some(0.95));
        assert!(v[2..7].iter().all(Option::is_none));
        assert_eq!(v[7], Some(1.0)); // active-positive
        assert_eq!(v[14], Some(1.0)); // engaged
    }
}
