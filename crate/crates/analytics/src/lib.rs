//! Statistics for sensor-network experiment data.
//!
//! [`correlation`] holds Pearson, Spearman, and the powered-series
//! nonlinear correlation; [`pvalue`] the two-tailed significance test for
//! a correlation; [`lasso`] coordinate-descent Lasso regression;
//! [`metrics`] the MAPE / PRED(25) / RMSE / R-squared evaluation suite;
//! [`forest`] SSE-split regression trees and bootstrap forests; [`folds`]
//! seeded k-fold splits; [`dataset`] the delimited table format the
//! pipeline consumes; [`report`] the per-parameter dependency report and
//! prevalent-parameter selection.

pub mod correlation;
pub mod dataset;
pub mod folds;
pub mod forest;
pub mod lasso;
pub mod metrics;
pub mod pvalue;
pub mod report;

pub use correlation::{nonlinear_corr, pearson, spearman, CorrError};
pub use dataset::{parse_dataset, Dataset, DatasetError};
pub use folds::{kfold_split, FoldError};
pub use forest::{forest_fit, tree_fit, ForestError, ForestModel, RegressionTree};
pub use lasso::{lambda_max, lasso_fit, LassoError, LassoFit};
pub use metrics::{evaluate, EvalReport, MetricsError};
pub use pvalue::{p_value_from_r, p_value_pearson, t_two_tailed};
pub use report::{build_dependency_report, select_prevalent, DependencyReport, ParameterStats};
