//! The `fit-edm` command: fits the per-constituent flow regression on a
//! flow table and scores it on a held-out third of the rows.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use wsn_analytics::{evaluate, EvalReport, MetricsError};
use wsn_sim::edm::{edm_fit, parse_flow_table, EdmError, EdmModel, FLOW_COLUMN_NAMES};

use crate::output::{Report, Table};

#[derive(Debug, Error)]
pub enum FitEdmError {
    #[error(transparent)]
    Edm(#[from] EdmError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("need at least {need} rows to fit and hold out a third, got {got}")]
    TooFewRows { got: usize, need: usize },
    #[error("flow table contains no data rows")]
    EmptyTable,
}

/// The fit needs six training rows and the holdout at least one, so
/// nine rows is the floor under a one-third holdout.
const MIN_ROWS: usize = 9;

#[derive(Debug, Clone)]
pub struct FitEdmOutput {
    pub model: EdmModel,
    pub metrics: EvalReport,
    pub train_rows: usize,
    pub holdout_rows: usize,
    pub seed: u64,
}

/// Parses a flow table, shuffles the rows with the given seed, trains
/// on two thirds and evaluates on the remaining third.
pub fn fit_edm(text: &str, seed: u64) -> Result<FitEdmOutput, FitEdmError> {
    let rows = parse_flow_table(text)?;
    if rows.is_empty() {
        return Err(FitEdmError::EmptyTable);
    }
    let m = rows.len();
    if m < MIN_ROWS {
        return Err(FitEdmError::TooFewRows { got: m, need: MIN_ROWS });
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let holdout_rows = m / 3;
    let train_rows = m - holdout_rows;

    let train: Vec<([f64; 5], f64)> = order[..train_rows].iter().map(|&i| rows[i]).collect();
    let holdout: Vec<([f64; 5], f64)> = order[train_rows..].iter().map(|&i| rows[i]).collect();

    let model = edm_fit(&train)?;
    let actual: Vec<f64> = holdout.iter().map(|(_, e)| *e).collect();
    let predicted: Vec<f64> = holdout.iter().map(|(flows, _)| model.predict(flows)).collect();
    let metrics = evaluate(&actual, &predicted)?;

    Ok(FitEdmOutput {
        model,
        metrics,
        train_rows,
        holdout_rows,
        seed,
    })
}

impl FitEdmOutput {
    pub fn to_report(&self) -> Report {
        let mut report = Report::new("fit-edm");
        report.setting("seed", self.seed);
        report.setting("train_rows", self.train_rows);
        report.setting("holdout_rows", self.holdout_rows);

        let mut coefficients = Table::new("coefficients", &["term", "value"]);
        coefficients.push_row(vec![FLOW_COLUMN_NAMES[0].into(), self.model.intercept.into()]);
        for (name, value) in FLOW_COLUMN_NAMES[1..]
            .iter()
            .zip(self.model.flow_coefficients)
        {
            coefficients.push_row(vec![(*name).into(), value.into()]);
        }

        let mut metrics = Table::new("metrics", &["metric", "value"]);
        match self.metrics.mape {
            Some(mape) => metrics.push_row(vec!["mape".into(), mape.into()]),
            None => metrics.push_row(vec!["mape".into(), "".into()]),
        }
        metrics.push_row(vec!["pred25".into(), self.metrics.pred25.into()]);
        metrics.push_row(vec!["rmse".into(), self.metrics.rmse.into()]);
        metrics.push_row(vec!["r2".into(), self.metrics.r2.into()]);
        metrics.push_row(vec![
            "r2_conventional".into(),
            self.metrics.r2_conventional.into(),
        ]);

        report.tables.push(coefficients);
        report.tables.push(metrics);
        report
    }
}
