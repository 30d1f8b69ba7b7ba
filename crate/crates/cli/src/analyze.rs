//! The `analyze` command: the full dependency pipeline on a dataset
//! file. Correlations, p-values and Lasso scores per parameter, the
//! prevalent-parameter selection, then two cross-validated forests (all
//! parameters versus prevalent-only) scored on pooled held-out
//! predictions.

use thiserror::Error;
use wsn_analytics::report::ReportError;
use wsn_analytics::{
    build_dependency_report, evaluate, forest_fit, kfold_split, select_prevalent, Dataset,
    DependencyReport, EvalReport, FoldError, ForestError, MetricsError,
};

use crate::output::{CellValue, Report, Table};
use crate::seeds::repeat_seed;

pub const DEFAULT_CORR_THRESHOLD: f64 = 0.35;
/// Relaxed pass mark available by flag.
pub const RELAXED_CORR_THRESHOLD: f64 = 0.25;
pub const DEFAULT_P_THRESHOLD: f64 = 0.05;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("prevalent column `{0}` is missing from the dataset")]
    MissingColumn(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub corr_threshold: f64,
    pub p_threshold: f64,
    pub folds: usize,
    pub seed: u64,
    pub n_trees: usize,
    pub min_leaf: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            corr_threshold: DEFAULT_CORR_THRESHOLD,
            p_threshold: DEFAULT_P_THRESHOLD,
            folds: 5,
            seed: 1,
            n_trees: 20,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisOutput {
    pub options: AnalyzeOptions,
    pub report: DependencyReport,
    pub all_features: EvalReport,
    /// Absent when no parameter passed the prevalence gate.
    pub prevalent_only: Option<EvalReport>,
}

/// Cross-validated pooled predictions: each fold's rows are predicted
/// by a forest trained on the other folds, with a per-fold seed, and
/// the pooled vector is scored once against the actuals.
fn cv_eval(
    x: &[Vec<f64>],
    y: &[f64],
    folds: &[Vec<usize>],
    n_trees: usize,
    seed: u64,
    min_leaf: usize,
) -> Result<EvalReport, AnalyzeError> {
    let mut y_hat = vec![0.0f64; y.len()];
    let mut in_test = vec![false; y.len()];
    for (fold_index, test_rows) in folds.iter().enumerate() {
        in_test.iter_mut().for_each(|b| *b = false);
        for &i in test_rows {
            in_test[i] = true;
        }
        let mut train_x = Vec::with_capacity(y.len() - test_rows.len());
        let mut train_y = Vec::with_capacity(y.len() - test_rows.len());
        for i in 0..y.len() {
            if !in_test[i] {
                train_x.push(x[i].clone());
                train_y.push(y[i]);
            }
        }
        let model = forest_fit(
            &train_x,
            &train_y,
            n_trees,
            repeat_seed(seed, fold_index),
            min_leaf,
        )?;
        for &i in test_rows {
            y_hat[i] = model.predict(&x[i]);
        }
    }
    Ok(evaluate(y, &y_hat)?)
}

pub fn analyze(dataset: &Dataset, options: &AnalyzeOptions) -> Result<AnalysisOutput, AnalyzeError> {
    let report = select_prevalent(
        build_dependency_report(dataset)?,
        options.corr_threshold,
        options.p_threshold,
    );

    let folds = kfold_split(dataset.n_samples(), options.folds, options.seed)?;
    let all_features = cv_eval(
        &dataset.x,
        &dataset.y,
        &folds,
        options.n_trees,
        options.seed,
        options.min_leaf,
    )?;

    let prevalent = report.prevalent_names();
    let prevalent_only = if prevalent.is_empty() {
        None
    } else {
        let mut indices = Vec::with_capacity(prevalent.len());
        for name in &prevalent {
            let j = dataset
                .column_names
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| AnalyzeError::MissingColumn(name.to_string()))?;
            indices.push(j);
        }
        let sub_x: Vec<Vec<f64>> = dataset
            .x
            .iter()
            .map(|row| indices.iter().map(|&j| row[j]).collect())
            .collect();
        Some(cv_eval(
            &sub_x,
            &dataset.y,
            &folds,
            options.n_trees,
            options.seed,
            options.min_leaf,
        )?)
    };

    Ok(AnalysisOutput {
        options: *options,
        report,
        all_features,
        prevalent_only,
    })
}

fn optional_cell(v: Option<f64>) -> CellValue {
    match v {
        Some(x) => x.into(),
        None => "".into(),
    }
}

fn metric_row(label: &str, n_features: usize, report: &EvalReport) -> Vec<CellValue> {
    vec![
        label.into(),
        n_features.into(),
        optional_cell(report.mape),
        report.pred25.into(),
        report.rmse.into(),
        report.r2.into(),
        report.r2_conventional.into(),
    ]
}

impl AnalysisOutput {
    pub fn prevalent_names(&self) -> Vec<&str> {
        self.report.prevalent_names()
    }

    pub fn to_report(&self) -> Report {
        let mut out = Report::new("analyze");
        out.setting("corr_threshold", self.options.corr_threshold);
        out.setting("p_threshold", self.options.p_threshold);
        out.setting("folds", self.options.folds);
        out.setting("seed", self.options.seed);
        out.setting("trees", self.options.n_trees);
        out.setting("min_leaf", self.options.min_leaf);

        let prevalent = self.prevalent_names();
        if prevalent.is_empty() {
            out.note("prevalent = (none); prevalent-only forest skipped");
        } else {
            out.note(format!("prevalent = {}", prevalent.join(",")));
        }

        let mut dep = Table::new(
            "dependency",
            &[
                "parameter",
                "p_value",
                "pearson",
                "spearman",
                "corr2",
                "corr3",
                "lasso_coefficient",
                "prevalent",
                "degenerate",
            ],
        );
        for p in &self.report.parameters {
            dep.push_row(vec![
                p.name.as_str().into(),
                optional_cell(p.p_value),
                optional_cell(p.pearson),
                optional_cell(p.spearman),
                optional_cell(p.corr2),
                optional_cell(p.corr3),
                optional_cell(p.lasso_coefficient),
                p.prevalent.to_string().into(),
                p.degenerate.to_string().into(),
            ]);
        }

        let mut cv = Table::new(
            "forest_cv",
            &[
                "model",
                "n_features",
                "mape",
                "pred25",
                "rmse",
                "r2",
                "r2_conventional",
            ],
        );
        cv.push_row(metric_row(
            "all",
            self.report.parameters.len(),
            &self.all_features,
        ));
        if let Some(prevalent_report) = &self.prevalent_only {
            cv.push_row(metric_row("prevalent", prevalent.len(), prevalent_report));
        }

        out.tables.push(dep);
        out.tables.push(cv);
        out
    }
}
