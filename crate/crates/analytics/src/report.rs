//! The prevalent-parameter selection pipeline: correlate every parameter
//! with the target four ways, attach a significance test and an L1
//! coefficient, then flag the parameters with enough evidence.

use thiserror::Error;

use crate::correlation::{nonlinear_corr, pearson, spearman, CorrError};
use crate::dataset::Dataset;
use crate::lasso::{lambda_max, lasso_fit, LassoError};
use crate::pvalue::p_value_from_r;

/// Default evidence gates: at least one correlation magnitude at or
/// above the mark, with a significant Pearson test.
pub const PREVALENT_CORR_THRESHOLD: f64 = 0.35;
pub const PREVALENT_P_THRESHOLD: f64 = 0.05;

/// Penalty used for the report's L1 column, as a fraction of the
/// full-shrinkage penalty: a tenth keeps the column sparse enough to be
/// informative without zeroing everything.
const REPORT_LASSO_FRACTION: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("need at least {need} observations, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("target has zero variance, nothing to correlate against")]
    DegenerateTarget,
    #[error(transparent)]
    Correlation(#[from] CorrError),
    #[error(transparent)]
    Lasso(#[from] LassoError),
}

/// One parameter's row of evidence. A `None` means the statistic is
/// undefined for this column (for example a correlation whose powered
/// series collapses to a constant); missing evidence never counts
/// toward prevalence.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterStats {
    pub name: String,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub corr2: Option<f64>,
    pub corr3: Option<f64>,
    pub lasso_coefficient: Option<f64>,
    pub p_value: Option<f64>,
    pub prevalent: bool,
    /// The parameter column itself was constant, so no statistic exists.
    pub degenerate: bool,
}

impl ParameterStats {
    /// Largest correlation magnitude across the four flavours, if any
    /// of them is defined.
    pub fn best_correlation(&self) -> Option<f64> {
        [self.pearson, self.spearman, self.corr2, self.corr3]
            .into_iter()
            .flatten()
            .map(f64::abs)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// Evidence rows for every parameter, plus the thresholds the
/// `prevalent` flags were computed under.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyReport {
    pub parameters: Vec<ParameterStats>,
    pub corr_threshold: f64,
    pub p_threshold: f64,
}

impl DependencyReport {
    pub fn prevalent_names(&self) -> Vec<&str> {
        self.parameters
            .iter()
            .filter(|p| p.prevalent)
            .map(|p| p.name.as_str())
            .collect()
    }

    pub fn excluded_names(&self) -> Vec<&str> {
        self.parameters
            .iter()
            .filter(|p| !p.prevalent)
            .map(|p| p.name.as_str())
            .collect()
    }

    /// Delimited rendering, one row per parameter; undefined statistics
    /// become empty cells.
    pub fn to_table(&self) -> String {
        fn cell(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let mut out = String::from(
            "parameter,p_value,pearson,spearman,corr2,corr3,lasso_coefficient,prevalent,degenerate\n",
        );
        for p in &self.parameters {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                p.name,
                cell(p.p_value),
                cell(p.pearson),
                cell(p.spearman),
                cell(p.corr2),
                cell(p.corr3),
                cell(p.lasso_coefficient),
                p.prevalent,
                p.degenerate,
            ));
        }
        out
    }
}

/// Treat a statistic as absent when its inputs have no variance, but
/// surface every other failure.
fn defined_or_none(result: Result<f64, CorrError>) -> Result<Option<f64>, ReportError> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(CorrError::ZeroVariance { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Correlate every parameter column against the target and assemble the
/// unflagged evidence table. Run [`select_prevalent`] on the result to
/// set the flags.
pub fn build_dependency_report(dataset: &Dataset) -> Result<DependencyReport, ReportError> {
    let m = dataset.n_samples();
    if m < 4 {
        return Err(ReportError::TooFewSamples { got: m, need: 4 });
    }
    let y = &dataset.y;
    if y.iter().all(|v| *v == y[0]) {
        return Err(ReportError::DegenerateTarget);
    }

    let mut parameters = Vec::with_capacity(dataset.n_parameters());
    let mut lasso_columns: Vec<usize> = Vec::new();
    for j in 0..dataset.n_parameters() {
        let name = dataset.column_names[j].clone();
        let col = dataset.column(j);
        if col.iter().all(|v| *v == col[0]) {
            parameters.push(ParameterStats {
                name,
                pearson: None,
                spearman: None,
                corr2: None,
                corr3: None,
                lasso_coefficient: None,
                p_value: None,
                prevalent: false,
                degenerate: true,
            });
            continue;
        }
        lasso_columns.push(j);
        let r = pearson(&col, y)?;
        parameters.push(ParameterStats {
            name,
            pearson: Some(r),
            spearman: Some(spearman(&col, y)?),
            corr2: defined_or_none(nonlinear_corr(&col, y, 2))?,
            corr3: defined_or_none(nonlinear_corr(&col, y, 3))?,
            lasso_coefficient: None,
            p_value: Some(p_value_from_r(r, m)?),
            prevalent: false,
            degenerate: false,
        });
    }

    if !lasso_columns.is_empty() {
        let design: Vec<Vec<f64>> = dataset
            .x
            .iter()
            .map(|row| lasso_columns.iter().map(|&j| row[j]).collect())
            .collect();
        let penalty = REPORT_LASSO_FRACTION * lambda_max(&design, y)?;
        let fit = lasso_fit(&design, y, penalty)?;
        for (pos, &j) in lasso_columns.iter().enumerate() {
            parameters[j].lasso_coefficient = Some(fit.coefficients[pos]);
        }
    }

    Ok(DependencyReport {
        parameters,
        corr_threshold: PREVALENT_CORR_THRESHOLD,
        p_threshold: PREVALENT_P_THRESHOLD,
    })
}

/// Flag each parameter as prevalent iff its best correlation magnitude
/// reaches `corr_threshold` and its p-value is at most `p_threshold`.
pub fn select_prevalent(
    mut report: DependencyReport,
    corr_threshold: f64,
    p_threshold: f64,
) -> DependencyReport {
    for stats in &mut report.parameters {
        stats.prevalent = stats
            .best_correlation()
            .is_some_and(|c| c >= corr_threshold)
            && stats.p_value.is_some_and(|p| p <= p_threshold);
    }
    report.corr_threshold = corr_threshold;
    report.p_threshold = p_threshold;
    report
}
