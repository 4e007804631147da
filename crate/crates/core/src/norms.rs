//! Weighted discrete norms and convergence-rate estimation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormError {
    #[error("exact field has zero norm")]
    ZeroExactNorm,
    #[error("length mismatch between fields ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two (dx, error) points, got {0}")]
    InsufficientPoints(usize),
    #[error("dx and error values must be positive")]
    NonPositivePoint,
}

/// Relative error `||num - exact|| / ||exact||` with `||v||^2 = sum v_i^2 w_i`.
pub fn relative_error(num: &[f64], exact: &[f64], weights: Option<&[f64]>) -> Result<f64, NormError> {
    if num.len() != exact.len() {
        return Err(NormError::LengthMismatch(num.len(), exact.len()));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let mut diff2 = 0.0;
    let mut ref2 = 0.0;
    for i in 0..num.len() {
        let d = num[i] - exact[i];
        diff2 += d * d * w(i);
        ref2 += exact[i] * exact[i] * w(i);
    }
    if ref2 == 0.0 {
        return Err(NormError::ZeroExactNorm);
    }
    Ok((diff2 / ref2).sqrt())
}

/// Least-squares slope of `log E` against `log dx`.
pub fn convergence_rate(points: &[(f64, f64)]) -> Result<f64, NormError> {
    if points.len() < 2 {
        return Err(NormError::InsufficientPoints(points.len()));
    }
    if points.iter().any(|&(dx, e)| dx <= 0.0 || e <= 0.0) {
        return Err(NormError::NonPositivePoint);
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(dx, e) in points {
        let x = dx.ln();
        let y = e.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_zero() {
        let v = vec![1.0, -2.0, 3.0];
        assert_eq!(relative_error(&v, &v, None).unwrap(), 0.0);
    }

    #[test]
    fn homogeneity() {
        let exact = vec![1.0, 2.0];
        let num = vec![2.0, 4.0];
        assert!((relative_error(&num, &exact, None).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_value() {
        // ||(3,4)|| / 10 = 0.5 with exact norm 10
        let exact = vec![6.0, 8.0];
        let num = vec![9.0, 12.0];
        assert!((relative_error(&num, &exact, None).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scale_invariance_in_exact_field() {
        let exact = vec![1.0, -0.5, 2.0];
        let num = vec![1.1, -0.4, 2.2];
        let e1 = relative_error(&num, &exact, None).unwrap();
        let scaled_num: Vec<f64> = num.iter().map(|v| v * 7.0).collect();
        let scaled_exact: Vec<f64> = exact.iter().map(|v| v * 7.0).collect();
        let e2 = relative_error(&scaled_num, &scaled_exact, None).unwrap();
        assert!((e1 - e2).abs() < 1e-14);
    }

    #[test]
    fn zero_exact_norm_errors() {
        assert!(matches!(
            relative_error(&[1.0], &[0.0], None),
            Err(NormError::ZeroExactNorm)
        ));
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, h * h)).collect();
        assert!((convergence_rate(&pts).unwrap() - 2.0).abs() < 1e-12);
        let two: Vec<(f64, f64)> = vec![(0.1, 0.1), (0.01, 0.01)];
        assert!((convergence_rate(&two).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_invariant_under_reordering_and_scaling() {
        let pts = vec![(0.1, 3e-3), (0.05, 8e-4), (0.025, 2.1e-4)];
        let mut shuffled = pts.clone();
        shuffled.swap(0, 2);
        let r1 = convergence_rate(&pts).unwrap();
        let r2 = convergence_rate(&shuffled).unwrap();
        assert!((r1 - r2).abs() < 1e-14);
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(h, e)| (h, 5.0 * e)).collect();
        let r3 = convergence_rate(&scaled).unwrap();
        assert!((r1 - r3).abs() < 1e-14);
    }

    #[test]
    fn insufficient_points() {
        assert!(matches!(
            convergence_rate(&[(0.1, 0.01)]),
            Err(NormError::InsufficientPoints(1))
        ));
    }
}
