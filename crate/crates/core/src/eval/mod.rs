//! Link-prediction scoring, ranking metrics and cross-walk correlation.

pub mod metrics;
mod report;
mod score;

pub use metrics::{auc_pr, auc_roc, cosine, median, pearson};
pub use report::{
    aggregate_medians, correlation_matrix, evaluate_graph, file_stem, CorrelationMatrix, EvalReport, Failure,
    GraphReport, ScoreTable, Summary, SummaryRow, WalkMetrics,
};
pub use score::{minmax_normalize, read_scores, score_edges, write_scores, ScoreVector};
