use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::metrics::{auc_pr, auc_roc, median, pearson};
use super::score::{minmax_normalize, ScoreVector};
use crate::error::{Error, Result};
use crate::graph::LabeledEdgeSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkMetrics {
    pub auc: f64,
    pub auc_pr: f64,
}

/// Square matrix over walk names. `None` marks an undefined correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub walks: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.walks.iter().position(|w| w == a)?;
        let j = self.walks.iter().position(|w| w == b)?;
        self.cells[i][j]
    }

    /// Defined cells strictly above the diagonal, as `(row, col, r)`.
    pub fn off_diagonal(&self) -> Vec<(usize, usize, f64)> {
        let n = self.walks.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| self.cells[i][j].map(|r| (i, j, r)))
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.walks.len();
        (0..n).all(|i| self.cells[i][i] == Some(1.0) && (0..n).all(|j| self.cells[i][j] == self.cells[j][i]))
    }

    /// CSV with the walk names as header row and first column; undefined
    /// cells are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("walk");
        for w in &self.walks {
            out.push(',');
            out.push_str(&csv_field(w));
        }
        out.push('\n');
        for (w, row) in self.walks.iter().zip(&self.cells) {
            out.push_str(&csv_field(w));
            for cell in row {
                out.push(',');
                if let Some(r) = cell {
                    write!(out, "{r}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Pearson r of raw scores for every pair of walks. Cells whose correlation
/// is undefined (a constant score vector) are recorded as `None`.
pub fn correlation_matrix(scores: &[ScoreVector]) -> Result<CorrelationMatrix> {
    if let Some(first) = scores.first() {
        if let Some(bad) = scores.iter().find(|s| s.scores.len() != first.scores.len()) {
            return Err(Error::LengthMismatch(first.scores.len(), bad.scores.len()));
        }
    }
    let n = scores.len();
    let mut cells = vec![vec![None; n]; n];
    for i in 0..n {
        cells[i][i] = Some(1.0);
        for j in i + 1..n {
            let r = match pearson(&scores[i].scores, &scores[j].scores) {
                Ok(r) => Some(r),
                Err(Error::UndefinedCorrelation) => {
                    log::warn!("correlation {} vs {} undefined", scores[i].walk, scores[j].walk);
                    None
                }
                Err(e) => return Err(e),
            };
            cells[i][j] = r;
            cells[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        walks: scores.iter().map(|s| s.walk.clone()).collect(),
        cells,
    })
}

/// Metrics and cross-walk correlation for one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphReport {
    pub graph: String,
    pub nodes: usize,
    pub edges: usize,
    pub positives: usize,
    pub negatives: usize,
    /// In walk order.
    pub metrics: Vec<(String, WalkMetrics)>,
    pub corr: CorrelationMatrix,
}

impl GraphReport {
    pub fn metric(&self, walk: &str) -> Option<WalkMetrics> {
        self.metrics.iter().find(|(w, _)| w == walk).map(|&(_, m)| m)
    }

    /// Largest minus smallest AUC across walks.
    pub fn auc_spread(&self) -> f64 {
        let aucs = self.metrics.iter().map(|(_, m)| m.auc);
        let max = aucs.clone().fold(f64::NEG_INFINITY, f64::max);
        let min = aucs.fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Evaluates the score vectors of every walk on one graph's labeled set.
/// AUCs are computed on min-max normalized scores, correlations on raw ones.
pub fn evaluate_graph(
    graph: &str,
    nodes: usize,
    edges: usize,
    labels: &LabeledEdgeSet,
    scores: &[ScoreVector],
) -> Result<GraphReport> {
    let truth = labels.labels();
    let mut metrics = Vec::with_capacity(scores.len());
    for s in scores {
        let norm = minmax_normalize(s);
        let m = WalkMetrics {
            auc: auc_roc(&truth, &norm.scores)?,
            auc_pr: auc_pr(&truth, &norm.scores)?,
        };
        metrics.push((s.walk.clone(), m));
    }
    Ok(GraphReport {
        graph: graph.to_owned(),
        nodes,
        edges,
        positives: labels.n_pos(),
        negatives: labels.n_neg(),
        metrics,
        corr: correlation_matrix(scores)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub walk: String,
    pub median_auc: f64,
    pub median_auc_pr: f64,
    /// Graphs contributing to the medians.
    pub graphs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Sorted by descending median AUC; ties keep walk order.
    pub rows: Vec<SummaryRow>,
    /// Per-pair median of the defined correlations across graphs.
    pub median_corr: CorrelationMatrix,
}

/// Medians across graphs of each walk's metrics and each walk pair's
/// correlation.
pub fn aggregate_medians(reports: &[GraphReport]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("graph reports"));
    }
    let mut walks: Vec<String> = Vec::new();
    for r in reports {
        for (w, _) in &r.metrics {
            if !walks.contains(w) {
                walks.push(w.clone());
            }
        }
    }
    let mut rows: Vec<SummaryRow> = walks
        .iter()
        .map(|w| {
            let ms: Vec<WalkMetrics> = reports.iter().filter_map(|r| r.metric(w)).collect();
            let auc: Vec<f64> = ms.iter().map(|m| m.auc).collect();
            let ap: Vec<f64> = ms.iter().map(|m| m.auc_pr).collect();
            SummaryRow {
                walk: w.clone(),
                median_auc: median(&auc).unwrap_or(f64::NAN),
                median_auc_pr: median(&ap).unwrap_or(f64::NAN),
                graphs: ms.len(),
            }
        })
        .collect();
    rows.sort_by(|a, b| b.median_auc.total_cmp(&a.median_auc));

    let n = walks.len();
    let mut cells = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i..n {
            let values: Vec<f64> = reports.iter().filter_map(|r| r.corr.get(&walks[i], &walks[j])).collect();
            let m = if i == j { Some(1.0) } else { median(&values) };
            cells[i][j] = m;
            cells[j][i] = m;
        }
    }
    Ok(Summary {
        rows,
        median_corr: CorrelationMatrix { walks, cells },
    })
}

/// A (graph, walk) combination that did not produce metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub graph: String,
    pub walk: Option<String>,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub graphs: Vec<GraphReport>,
    pub summary: Option<Summary>,
    pub failures: Vec<Failure>,
}

impl EvalReport {
    pub fn new(graphs: Vec<GraphReport>, failures: Vec<Failure>) -> Result<Self> {
        let summary = if graphs.is_empty() {
            None
        } else {
            Some(aggregate_medians(&graphs)?)
        };
        Ok(EvalReport {
            graphs,
            summary,
            failures,
        })
    }

    pub fn entry_count(&self) -> usize {
        self.graphs.iter().map(|g| g.metrics.len()).sum()
    }

    /// The report document. Key order is fixed and no timing information is
    /// included, so equal inputs serialize to equal bytes.
    pub fn to_json(&self) -> Value {
        let mut graphs = Map::new();
        let mut corr = Map::new();
        let mut info = Map::new();
        for g in &self.graphs {
            let mut walks = Map::new();
            for (w, m) in &g.metrics {
                walks.insert(w.clone(), json!({ "auc": m.auc, "auc_pr": m.auc_pr }));
            }
            graphs.insert(g.graph.clone(), Value::Object(walks));
            corr.insert(g.graph.clone(), matrix_json(&g.corr));
            info.insert(
                g.graph.clone(),
                json!({
                    "nodes": g.nodes,
                    "edges": g.edges,
                    "positives": g.positives,
                    "negatives": g.negatives,
                }),
            );
        }
        let summary = self.summary.as_ref().map(|s| {
            json!({
                "walks": s.rows.iter().map(|r| json!({
                    "walk": r.walk,
                    "median_auc": finite_or_null(r.median_auc),
                    "median_auc_pr": finite_or_null(r.median_auc_pr),
                    "graphs": r.graphs,
                })).collect::<Vec<_>>(),
                "median_correlation": matrix_json(&s.median_corr),
            })
        });
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| json!({ "graph": f.graph, "walk": f.walk, "stage": f.stage, "message": f.message }))
            .collect();
        json!({
            "graphs": graphs,
            "graph_info": info,
            "correlations": corr,
            "summary": summary,
            "failures": failures,
        })
    }

    /// Writes `report.json`, `corr_<graph>.csv` for every graph and the
    /// `plotdata/` directory under `dir`.
    pub fn write(&self, dir: &Path, tables: &[ScoreTable<'_>]) -> Result<()> {
        fs::create_dir_all(dir.join("plotdata")).map_err(|e| Error::io(dir, e))?;
        for g in &self.graphs {
            write_file(&dir.join(format!("corr_{}.csv", file_stem(&g.graph))), &g.corr.to_csv())?;
        }
        write_file(&dir.join("plotdata/metrics.csv"), &self.metrics_csv())?;
        if let Some(s) = &self.summary {
            write_file(&dir.join("plotdata/median_correlation.csv"), &s.median_corr.to_csv())?;
            let mut out = String::from("walk,median_auc,median_auc_pr,graphs\n");
            for r in &s.rows {
                writeln!(out, "{},{},{},{}", csv_field(&r.walk), r.median_auc, r.median_auc_pr, r.graphs).unwrap();
            }
            write_file(&dir.join("plotdata/summary.csv"), &out)?;
        }
        for t in tables {
            write_file(&dir.join(format!("plotdata/scores_{}.csv", file_stem(t.graph))), &t.to_csv())?;
        }
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        text.push('\n');
        write_file(&dir.join("report.json"), &text)
    }

    fn metrics_csv(&self) -> String {
        let mut out = String::from("graph,walk,auc,auc_pr\n");
        for g in &self.graphs {
            for (w, m) in &g.metrics {
                writeln!(out, "{},{},{},{}", csv_field(&g.graph), csv_field(w), m.auc, m.auc_pr).unwrap();
            }
        }
        out
    }
}

/// Normalized scores of every walk on one graph, for scatter plots of one
/// walk's similarities against another's.
#[derive(Debug, Clone, Copy)]
pub struct ScoreTable<'a> {
    pub graph: &'a str,
    pub labels: &'a LabeledEdgeSet,
    pub scores: &'a [ScoreVector],
}

impl ScoreTable<'_> {
    pub fn to_csv(&self) -> String {
        let norm: Vec<ScoreVector> = self.scores.iter().map(minmax_normalize).collect();
        let mut out = String::from("u,v,label");
        for s in &norm {
            out.push(',');
            out.push_str(&csv_field(&s.walk));
        }
        out.push('\n');
        for (i, e) in self.labels.edges.iter().enumerate() {
            write!(out, "{},{},{}", e.u, e.v, e.label).unwrap();
            for s in &norm {
                write!(out, ",{}", s.scores[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn matrix_json(m: &CorrelationMatrix) -> Value {
    json!({ "walks": m.walks, "matrix": m.cells })
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Graph names reduced to characters safe in a file name.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
