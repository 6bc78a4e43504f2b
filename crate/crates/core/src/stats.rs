use serde::{Deserialize, Serialize};

/// Monte Carlo estimate against a closed-form reference.
///
/// `standard_error` and `z_score` are NaN (serialized as `null`) when fewer
/// than two samples are available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimate: f64,
    pub standard_error: f64,
    pub reference: f64,
    pub z_score: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl McReport {
    pub fn from_samples(samples: &[f64], reference: f64, seed: u64) -> Self {
        let n = samples.len();
        let estimate = if n == 0 {
            f64::NAN
        } else {
            samples.iter().sum::<f64>() / n as f64
        };
        let standard_error = if n < 2 {
            f64::NAN
        } else {
            let ss: f64 = samples.iter().map(|x| (x - estimate).powi(2)).sum();
            (ss / (n as f64 - 1.0) / n as f64).sqrt()
        };
        // a degenerate sample that hits the reference exactly agrees with it
        let z_score = if standard_error == 0.0 && estimate == reference {
            0.0
        } else {
            (estimate - reference) / standard_error
        };
        Self {
            estimate,
            standard_error,
            reference,
            z_score,
            n_paths: n,
            seed,
        }
    }

    /// `|z| ≤ z_max`; false when the z-score is undefined.
    pub fn passes(&self, z_max: f64) -> bool {
        self.z_score.abs() <= z_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_score_definition() {
        let r = McReport::from_samples(&[1.0, 2.0, 3.0, 4.0], 2.0, 7);
        assert_eq!(r.estimate, 2.5);
        let se = (5.0f64 / 3.0 / 4.0).sqrt();
        assert!((r.standard_error - se).abs() < 1e-15);
        assert!((r.z_score - 0.5 / se).abs() < 1e-12);
        assert!(r.passes(4.0));
        let one = McReport::from_samples(&[3.0], 0.0, 0);
        assert!(one.standard_error.is_nan() && !one.passes(4.0));
        assert_eq!(McReport::from_samples(&[0.0; 5], 0.0, 0).z_score, 0.0);
        assert!(!McReport::from_samples(&[1.0; 5], 0.0, 0).passes(4.0));
    }
}
