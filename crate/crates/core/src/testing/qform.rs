use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::testing::{NullMethod, NullSpec, QFORM_MAX_ALPHA};

/// `(Φ⁻¹(1 − α/2))²`, the level-α bound for a mean-one Gaussian quadratic form.
pub fn qform_unit_threshold(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= QFORM_MAX_ALPHA) {
        return invalid(format!(
            "the quadratic-form bound is only valid for 0 < alpha <= {QFORM_MAX_ALPHA}, got {alpha}"
        ));
    }
    let z = Normal::standard().inverse_cdf(1.0 - alpha / 2.0);
    Ok(z * z)
}

/// Threshold on the scaled statistic: `mean_estimate · (Φ⁻¹(1 − α/2))²`,
/// where `mean_estimate` is the plug-in null mean used as the normaliser.
pub fn qform_threshold<T: Real>(spec: &NullSpec, mean_estimate: T) -> Result<T> {
    if !matches!(spec.method, NullMethod::QFormBound) {
        return invalid("quadratic-form threshold requested with a different null method");
    }
    spec.validate()?;
    if !(mean_estimate > T::zero() && mean_estimate.is_finite()) {
        return invalid(format!("null mean estimate must be positive, got {mean_estimate}"));
    }
    Ok(mean_estimate * T::from_f64_lossy(qform_unit_threshold(spec.alpha)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_alpha_above_validity_bound() {
        assert!(qform_threshold(&NullSpec::qform(0.3), 1.0f64).is_err());
        assert!(qform_unit_threshold(0.2151).is_err());
        assert!(qform_unit_threshold(0.215).is_ok());
    }

    #[test]
    fn scales_with_mean_estimate() {
        let unit = qform_threshold(&NullSpec::qform(0.05), 1.0f64).unwrap();
        let scaled = qform_threshold(&NullSpec::qform(0.05), 2.5f64).unwrap();
        assert!((scaled - 2.5 * unit).abs() < 1e-12);
        assert!(qform_threshold(&NullSpec::qform(0.05), 0.0f64).is_err());
    }
}
