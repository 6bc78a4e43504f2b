use super::ProcessSpec;
use crate::error::{Error, Result};
use crate::regulated::{Partition, Side};

fn check(spec: &ProcessSpec, pi: &Partition) -> Result<()> {
    if pi.horizon() != spec.horizon() {
        return Err(Error::InvalidPartition(format!(
            "partition ends at {} but the process lives on [0, {}]",
            pi.horizon(),
            spec.horizon()
        )));
    }
    Ok(())
}

/// `Σᵢ Σⱼ E[(X_{tᵢ-} - X_{tᵢ₋₁+})(X_{tⱼ-} - X_{tⱼ₋₁+})]²`.
pub fn planar_qv_sum(spec: &ProcessSpec, pi: &Partition) -> Result<f64> {
    check(spec, pi)?;
    let p = pi.points();
    let n = pi.len_intervals();
    let inc = |i: usize, j: usize| -> f64 {
        let (a0, a1, b0, b1) = (p[i - 1], p[i], p[j - 1], p[j]);
        spec.cov(a1, Side::Left, b1, Side::Left) - spec.cov(a1, Side::Left, b0, Side::Right)
            - spec.cov(a0, Side::Right, b1, Side::Left)
            + spec.cov(a0, Side::Right, b0, Side::Right)
    };
    let mut total = 0.0;
    for i in 1..=n {
        total += inc(i, i).powi(2);
        for j in i + 1..=n {
            total += 2.0 * inc(i, j).powi(2);
        }
    }
    Ok(total)
}

/// `Σᵢ Σⱼ |R(tᵢ,tⱼ) + R(tᵢ₋₁,tⱼ₋₁) - R(tᵢ,tⱼ₋₁) - R(tᵢ₋₁,tⱼ)|`.
pub fn planar_variation_sum(spec: &ProcessSpec, pi: &Partition) -> Result<f64> {
    check(spec, pi)?;
    let p = pi.points();
    let n = pi.len_intervals();
    let r = |a: f64, b: f64| spec.cov(a, Side::At, b, Side::At);
    let mut total = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            total += (r(p[i], p[j]) + r(p[i - 1], p[j - 1]) - r(p[i], p[j - 1]) - r(p[i - 1], p[j])).abs();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_values() {
        let b = ProcessSpec::brownian(1.0).unwrap();
        let pi = Partition::uniform(1.0, 4).unwrap();
        assert_eq!(planar_qv_sum(&b, &pi).unwrap(), 0.25);
        assert!((planar_variation_sum(&b, &pi).unwrap() - 1.0).abs() < 1e-15);
        let f = ProcessSpec::fbm(0.5, 1.0).unwrap();
        assert!((planar_qv_sum(&f, &pi).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn single_interval_is_the_increment_variance() {
        let f = ProcessSpec::fbm(0.7, 2.0).unwrap();
        let pi = Partition::uniform(2.0, 1).unwrap();
        let v = planar_variation_sum(&f, &pi).unwrap();
        assert!((v - 2f64.powf(1.4)).abs() < 1e-14);
    }

    #[test]
    fn horizon_mismatch() {
        let b = ProcessSpec::brownian(1.0).unwrap();
        assert!(planar_qv_sum(&b, &Partition::uniform(2.0, 4).unwrap()).is_err());
    }
}
