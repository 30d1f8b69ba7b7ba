//! Prediction-quality metrics: MAPE, PRED(25), RMSE, and two flavours of
//! R-squared.
//!
//! The default `r2` centers its denominator on the mean of the *actuals*
//! but sums squared deviations of the *predictions* from it,
//!
//! ```text
//! r2 = 1 - sum((y_i - yhat_i)^2) / sum((yhat_i - mean(y))^2)
//! ```
//!
//! which is the form this toolkit standardizes on for model comparisons.
//! `r2_conventional` is the textbook coefficient of determination
//! (denominator `sum((y_i - mean(y))^2)`) and is reported alongside as a
//! diagnostic; the two agree only when the predictions' spread about the
//! actual mean matches the actuals' own spread.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("actuals and predictions differ in length ({actual} vs {predicted})")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("need at least one observation")]
    Empty,
    #[error("non-finite value in {which}")]
    NonFinite { which: &'static str },
}

/// The metric suite for one set of predictions.
///
/// `mape` is `None` when any actual is zero, since the absolute
/// percentage error is undefined there; every other metric is still
/// computed. An `r2` of negative infinity marks a degenerate denominator
/// (no spread to explain) with nonzero error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub mape: Option<f64>,
    pub pred25: f64,
    pub rmse: f64,
    pub r2: f64,
    pub r2_conventional: f64,
}

fn r2_from(sse: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        1.0 - sse / denom
    } else if sse == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

/// Score predictions `y_hat` against actuals `y`.
pub fn evaluate(y: &[f64], y_hat: &[f64]) -> Result<EvalReport, MetricsError> {
    if y.len() != y_hat.len() {
        return Err(MetricsError::LengthMismatch {
            actual: y.len(),
            predicted: y_hat.len(),
        });
    }
    if y.is_empty() {
        return Err(MetricsError::Empty);
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite { which: "actuals" });
    }
    if y_hat.iter().any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite {
            which: "predictions",
        });
    }

    let m = y.len() as f64;
    let mean_y = y.iter().sum::<f64>() / m;

    let mut sse = 0.0;
    let mut abs_pct_sum = 0.0;
    let mut has_zero_actual = false;
    let mut within_25 = 0usize;
    let mut spread_pred = 0.0;
    let mut spread_actual = 0.0;
    for (&yi, &hi) in y.iter().zip(y_hat) {
        let err = yi - hi;
        sse += err * err;
        if yi == 0.0 {
            has_zero_actual = true;
        } else {
            abs_pct_sum += err.abs() / yi.abs();
        }
        // |y - yhat| <= 0.25 |y| is the within-25% test without the
        // division, so a zero actual demands an exactly zero error.
        if err.abs() <= 0.25 * yi.abs() {
            within_25 += 1;
        }
        spread_pred += (hi - mean_y) * (hi - mean_y);
        spread_actual += (yi - mean_y) * (yi - mean_y);
    }

    Ok(EvalReport {
        mape: (!has_zero_actual).then(|| abs_pct_sum / m),
        pred25: within_25 as f64 / m,
        rmse: (sse / m).sqrt(),
        r2: r2_from(sse, spread_pred),
        r2_conventional: r2_from(sse, spread_actual),
    })
}
