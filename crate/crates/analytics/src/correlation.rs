//! Pearson, Spearman (average ranks on ties), and the powered-series
//! nonlinear correlation.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CorrError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{which} series has zero variance; correlation is undefined")]
    ZeroVariance { which: &'static str },
    #[error("{which} series contains a non-finite value")]
    NonFinite { which: &'static str },
    #[error("nonlinear correlation degree must be 1, 2, or 3, got {0}")]
    BadDegree(u32),
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), CorrError> {
    if x.len() != y.len() {
        return Err(CorrError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(CorrError::TooFewSamples {
            got: x.len(),
            need: 3,
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(CorrError::NonFinite { which: "x" });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(CorrError::NonFinite { which: "y" });
    }
    Ok(())
}

fn pearson_checked(x: &[f64], y: &[f64]) -> Result<f64, CorrError> {
    let m = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / m;
    let mean_y = y.iter().sum::<f64>() / m;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 {
        return Err(CorrError::ZeroVariance { which: "x" });
    }
    if var_y == 0.0 {
        return Err(CorrError::ZeroVariance { which: "y" });
    }
    // Rounding can push a perfect correlation a hair outside [-1, 1];
    // clamp so downstream range invariants hold.
    Ok((cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}

/// Linear correlation coefficient of two series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, CorrError> {
    check_pair(x, y)?;
    pearson_checked(x, y)
}

/// Ranks with ties replaced by the average of the positions they occupy.
fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the value; ranks are 1-based.
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Rank correlation: Pearson over the two rank vectors, measuring how
/// well one series tracks the other through any monotone relationship.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, CorrError> {
    check_pair(x, y)?;
    pearson_checked(&average_ranks(x), &average_ranks(y))
}

/// Correlation of the elementwise `degree`-th powers of the two series,
/// with means taken after powering. Degree 1 reduces to plain Pearson and
/// exists as a diagnostic; 2 and 3 are the working orders.
pub fn nonlinear_corr(x: &[f64], y: &[f64], degree: u32) -> Result<f64, CorrError> {
    if !(1..=3).contains(&degree) {
        return Err(CorrError::BadDegree(degree));
    }
    check_pair(x, y)?;
    let pow = |v: &[f64]| -> Vec<f64> { v.iter().map(|a| a.powi(degree as i32)).collect() };
    pearson_checked(&pow(x), &pow(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    const X4: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
    const Y4: [f64; 4] = [1.0, 3.0, 2.0, 5.0];

    #[test]
    fn pearson_perfect_affine() {
        let y: Vec<f64> = X4.iter().map(|v| 2.0 * v + 3.0).collect();
        assert_eq!(pearson(&X4, &y).unwrap(), 1.0);
        let neg: Vec<f64> = X4.iter().map(|v| -v).collect();
        assert_eq!(pearson(&X4, &neg).unwrap(), -1.0);
    }

    #[test]
    fn pearson_hand_fixture() {
        // 11 / (5 sqrt 7), worked out by hand with exact fractions.
        let r = pearson(&X4, &Y4).unwrap();
        assert!((r - 0.831_521_840_620_299_9).abs() < 1e-12);
    }

    #[test]
    fn pearson_rejects_degenerate_input() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(CorrError::ZeroVariance { which: "x" })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(CorrError::TooFewSamples { got: 2, need: 3 })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(CorrError::LengthMismatch(3, 2))
        ));
        assert!(matches!(
            pearson(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]),
            Err(CorrError::NonFinite { which: "x" })
        ));
    }

    #[test]
    fn spearman_monotone_is_one() {
        let y: Vec<f64> = X4.iter().map(|v| v.powi(3)).collect();
        assert_eq!(spearman(&X4, &y).unwrap(), 1.0);
        let rev: Vec<f64> = X4.iter().rev().cloned().collect();
        assert_eq!(spearman(&X4, &rev).unwrap(), -1.0);
    }

    #[test]
    fn spearman_hand_fixtures() {
        // Tie-free: ranks of (1,3,2,5) are (1,3,2,4) giving 0.8 exactly.
        assert!((spearman(&X4, &Y4).unwrap() - 0.8).abs() < 1e-12);
        // Tied pair: ranks of (1,2,2,3) are (1, 2.5, 2.5, 4), and the
        // correlation against (1,2,3,4) is 3 / sqrt 10.
        let tied = [1.0, 2.0, 2.0, 3.0];
        let straight = [1.0, 2.0, 3.0, 4.0];
        let r = spearman(&tied, &straight).unwrap();
        assert!((r - 0.948_683_298_050_513_8).abs() < 1e-12);
    }

    #[test]
    fn spearman_constant_series_is_an_error() {
        assert!(matches!(
            spearman(&[5.0, 5.0, 5.0, 5.0], &[1.0, 2.0, 3.0, 4.0]),
            Err(CorrError::ZeroVariance { .. })
        ));
    }

    #[test]
    fn average_ranks_handle_runs() {
        assert_eq!(average_ranks(&[10.0, 20.0, 20.0, 30.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[7.0, 7.0, 7.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn nonlinear_identity_and_reduction() {
        assert_eq!(nonlinear_corr(&X4, &X4, 2).unwrap(), 1.0);
        assert_eq!(nonlinear_corr(&X4, &X4, 3).unwrap(), 1.0);
        let direct = pearson(&X4, &Y4).unwrap();
        let reduced = nonlinear_corr(&X4, &Y4, 1).unwrap();
        assert!((direct - reduced).abs() < 1e-12);
        assert!(matches!(
            nonlinear_corr(&X4, &Y4, 4),
            Err(CorrError::BadDegree(4))
        ));
    }

    #[test]
    fn nonlinear_hand_fixtures() {
        // Same 4-point pair as the Pearson fixture, powered elementwise.
        let c2 = nonlinear_corr(&X4, &Y4, 2).unwrap();
        assert!((c2 - 0.858_407_729_099_759).abs() < 1e-12);
        let c3 = nonlinear_corr(&X4, &Y4, 3).unwrap();
        assert!((c3 - 0.904_433_733_248_194_3).abs() < 1e-12);
        // Symmetric x against x squared: the squares line up affinely.
        let x = [-2.0, -1.0, 1.0, 2.0];
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert!((nonlinear_corr(&x, &y, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_zero_variance_after_powering() {
        // Values distinct, squares identical.
        let x = [-1.0, 1.0, -1.0, 1.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        assert!(pearson(&x, &y).is_ok());
        assert!(matches!(
            nonlinear_corr(&x, &y, 2),
            Err(CorrError::ZeroVariance { which: "x" })
        ));
    }
}
