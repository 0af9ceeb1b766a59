//! Features derived from the four formant means.

use super::AudioError;

/// Speed of sound in the vocal tract, cm/s.
pub const SPEED_OF_SOUND_CM_S: f64 = 35_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedFormants {
    pub average_hz: f64,
    pub dispersion_hz: f64,
    pub spacing_hz: f64,
    pub vocal_tract_length_cm: f64,
    /// Mean F0 times vocal tract length; absent without a pitch estimate.
    pub gpr_vtl: Option<f64>,
}

/// `formants` are the F1..F4 means. Dispersion is (F4 - F1)/3, which equals
/// the mean consecutive spacing; VTL follows the uniform-tube relation
/// c / (2 * spacing).
pub fn derived_formant_features(formants: [Option<f64>; 4], f0_mean: Option<f64>) -> Result<DerivedFormants, AudioError> {
    let mut f = [0.0; 4];
    for (i, v) in formants.iter().enumerate() {
        f[i] = v.ok_or_else(|| AudioError::MissingFormant(format!("F{} absent", i + 1)))?;
    }
    let average = f.iter().sum::<f64>() / 4.0;
    let dispersion = (f[3] - f[0]) / 3.0;
    let spacing = f.windows(2).map(|w| w[1] - w[0]).sum::<f64>() / 3.0;
    if !(spacing > 0.0) {
        return Err(AudioError::MissingFormant(format!("formant spacing {spacing} Hz is not positive")));
    }
    let vtl = SPEED_OF_SOUND_CM_S / (2.0 * spacing);
    Ok(DerivedFormants {
        average_hz: average,
        dispersion_hz: dispersion,
        spacing_hz: spacing,
        vocal_tract_length_cm: vtl,
        gpr_vtl: f0_mean.map(|f0| f0 * vtl),
    })
}
