//! L1-penalized least squares by cyclic coordinate descent.
//!
//! Minimizes `0.5 * sum(residual^2) + lambda * sum(|beta_j|)` with an
//! unpenalized intercept. Feature columns are standardized to zero mean
//! and unit variance internally, and coefficients are reported on that
//! standardized scale so their magnitudes are comparable across
//! parameters with different units. The fit keeps the column means and
//! deviations it used, so predictions still accept raw feature rows.

use thiserror::Error;

const TOLERANCE: f64 = 1e-8;
const MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum LassoError {
    #[error("feature matrix has {rows} rows but y has {targets}")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("row {row} has {got} features, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("lambda must be finite and nonnegative, got {0}")]
    BadLambda(f64),
    #[error("non-finite value in {which}")]
    NonFinite { which: &'static str },
    #[error("column {column} has zero variance and cannot be standardized")]
    ZeroVarianceColumn { column: usize },
    #[error("coordinate descent did not converge within {sweeps} sweeps")]
    NotConverged {
        sweeps: usize,
        /// Standardized-scale coefficients at the point of giving up.
        last: Vec<f64>,
    },
}

/// A fitted L1-penalized model. `coefficients[j]` multiplies the j-th
/// feature after standardization, so magnitudes are unit-free.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    /// Mean of the targets; the model in standardized space needs no
    /// other offset.
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Full passes over the coordinates before the update stabilized.
    pub sweeps: usize,
    /// Per-column centering and scaling the fit was computed under.
    pub feature_means: Vec<f64>,
    pub feature_stds: Vec<f64>,
}

impl LassoFit {
    /// Predict from a raw (unstandardized) feature row.
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(features)
                .zip(self.feature_means.iter().zip(&self.feature_stds))
                .map(|((b, x), (mu, sigma))| b * (x - mu) / sigma)
                .sum::<f64>()
    }
}

/// Column-major standardized view of the design matrix.
struct Standardized {
    cols: Vec<Vec<f64>>,
    means: Vec<f64>,
    stds: Vec<f64>,
    y_mean: f64,
    y_centered: Vec<f64>,
}

fn standardize(x: &[Vec<f64>], y: &[f64]) -> Result<Standardized, LassoError> {
    if x.len() != y.len() {
        return Err(LassoError::LengthMismatch {
            rows: x.len(),
            targets: y.len(),
        });
    }
    let m = y.len();
    if m < 2 {
        return Err(LassoError::TooFewSamples { got: m, need: 2 });
    }
    let p = x[0].len();
    for (i, row) in x.iter().enumerate() {
        if row.len() != p {
            return Err(LassoError::RaggedRow {
                row: i,
                got: row.len(),
                expected: p,
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(LassoError::NonFinite { which: "features" });
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(LassoError::NonFinite { which: "targets" });
    }

    let y_mean = y.iter().sum::<f64>() / m as f64;
    let y_centered: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let mut cols = Vec::with_capacity(p);
    let mut means = Vec::with_capacity(p);
    let mut stds = Vec::with_capacity(p);
    for j in 0..p {
        let mean = x.iter().map(|row| row[j]).sum::<f64>() / m as f64;
        let var = x.iter().map(|row| (row[j] - mean).powi(2)).sum::<f64>() / m as f64;
        if var <= 0.0 {
            return Err(LassoError::ZeroVarianceColumn { column: j });
        }
        let std = var.sqrt();
        cols.push(x.iter().map(|row| (row[j] - mean) / std).collect());
        means.push(mean);
        stds.push(std);
    }
    Ok(Standardized {
        cols,
        means,
        stds,
        y_mean,
        y_centered,
    })
}

fn soft_threshold(rho: f64, lambda: f64) -> f64 {
    if rho > lambda {
        rho - lambda
    } else if rho < -lambda {
        rho + lambda
    } else {
        0.0
    }
}

fn fit_with_limit(
    x: &[Vec<f64>],
    y: &[f64],
    lambda: f64,
    max_sweeps: usize,
) -> Result<LassoFit, LassoError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(LassoError::BadLambda(lambda));
    }
    let std_view = standardize(x, y)?;
    let m = y.len() as f64;
    let p = std_view.cols.len();

    let mut beta = vec![0.0; p];
    let mut residual = std_view.y_centered.clone();
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for j in 0..p {
            let col = &std_view.cols[j];
            // Standardized columns satisfy col . col == m, so the
            // single-coordinate minimizer has this closed form.
            let rho: f64 = col
                .iter()
                .zip(&residual)
                .map(|(c, r)| c * r)
                .sum::<f64>()
                + m * beta[j];
            let updated = soft_threshold(rho, lambda) / m;
            let delta = updated - beta[j];
            if delta != 0.0 {
                for (r, c) in residual.iter_mut().zip(col) {
                    *r -= delta * c;
                }
                beta[j] = updated;
            }
            max_change = max_change.max(delta.abs());
        }
        if max_change <= TOLERANCE {
            return Ok(LassoFit {
                intercept: std_view.y_mean,
                coefficients: beta,
                sweeps,
                feature_means: std_view.means,
                feature_stds: std_view.stds,
            });
        }
    }
    Err(LassoError::NotConverged {
        sweeps,
        last: beta,
    })
}

/// Fit the penalized model at the given `lambda`.
pub fn lasso_fit(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<LassoFit, LassoError> {
    fit_with_limit(x, y, lambda, MAX_SWEEPS)
}

/// The smallest penalty at which every coefficient is exactly zero:
/// the largest absolute inner product of a standardized column with the
/// centered targets.
pub fn lambda_max(x: &[Vec<f64>], y: &[f64]) -> Result<f64, LassoError> {
    let std_view = standardize(x, y)?;
    Ok(std_view
        .cols
        .iter()
        .map(|col| {
            col.iter()
                .zip(&std_view.y_centered)
                .map(|(c, yc)| c * yc)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max))
}
