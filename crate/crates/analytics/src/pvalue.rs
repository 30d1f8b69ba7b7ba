//! Significance of a correlation: the two-tailed probability of seeing a
//! coefficient at least as large under the null, via the exact relation
//! between the t tail and the regularized incomplete beta function.

use crate::correlation::{pearson, CorrError};

/// Lanczos approximation of ln Gamma, good to ~1e-14 for positive x.
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, &g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued fraction for the incomplete beta function, modified Lentz
/// method. Converges quickly for x < (a+1)/(a+b+2).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Two-tailed tail mass of the Student-t law with `df` degrees of
/// freedom: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
pub fn t_two_tailed(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Two-tailed p-value for a correlation coefficient `r` over `m` paired
/// samples, from t = r sqrt((m-2)/(1-r^2)) with m-2 degrees of freedom.
/// A perfect correlation returns 0.
pub fn p_value_from_r(r: f64, m: usize) -> Result<f64, CorrError> {
    if m < 4 {
        return Err(CorrError::TooFewSamples { got: m, need: 4 });
    }
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let df = (m - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    Ok(t_two_tailed(t, df))
}

/// Convenience wrapper: correlate first, then test.
pub fn p_value_pearson(x: &[f64], y: &[f64]) -> Result<f64, CorrError> {
    if x.len() < 4 {
        return Err(CorrError::TooFewSamples {
            got: x.len(),
            need: 4,
        });
    }
    let r = pearson(x, y)?;
    p_value_from_r(r, x.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_correlation_is_never_significant() {
        assert_eq!(p_value_from_r(0.0, 30).unwrap(), 1.0);
    }

    #[test]
    fn perfect_correlation_is_certain() {
        assert_eq!(p_value_from_r(1.0, 10).unwrap(), 0.0);
        assert_eq!(p_value_from_r(-1.0, 10).unwrap(), 0.0);
    }

    #[test]
    fn reference_values_match() {
        // Cross-checked against an established statistics package.
        let cases = [
            (0.5, 30, 0.004_899_933_667_068_092),
            (-0.3, 12, 0.343_438_571_054_687_67),
            (0.2, 100, 0.046_036_286_460_054_136),
        ];
        for (r, m, want) in cases {
            let got = p_value_from_r(r, m).unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want,
                "r={r}, m={m}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn sign_of_r_does_not_matter() {
        let a = p_value_from_r(0.42, 25).unwrap();
        let b = p_value_from_r(-0.42, 25).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn more_samples_make_the_same_r_more_significant() {
        let small = p_value_from_r(0.3, 10).unwrap();
        let large = p_value_from_r(0.3, 100).unwrap();
        assert!(large < small);
    }

    #[test]
    fn needs_four_samples() {
        assert!(matches!(
            p_value_from_r(0.5, 3),
            Err(CorrError::TooFewSamples { got: 3, need: 4 })
        ));
        assert!(matches!(
            p_value_pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]),
            Err(CorrError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn wrapper_matches_manual_composition() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let r = pearson(&x, &y).unwrap();
        let direct = p_value_pearson(&x, &y).unwrap();
        let composed = p_value_from_r(r, x.len()).unwrap();
        assert_eq!(direct, composed);
    }
}
