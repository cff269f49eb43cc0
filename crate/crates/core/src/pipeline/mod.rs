//! Experiment orchestration: graph preparation, per-walk corpus, embedding
//! and scoring stages, and report assembly.
//!
//! Every stage persists its output under the run directory and can be rerun
//! on its own from the previous stage's files:
//!
//! ```text
//! <output_dir>/manifest.json
//! <output_dir>/graphs/<graph>/{graph.txt, nodes.tsv, labels.csv}
//! <output_dir>/graphs/<graph>/<walk>.{corpus, emb, scores}
//! <output_dir>/{report.json, corr_<graph>.csv, plotdata/}
//! ```

mod config;

pub use config::{graph_name, ExperimentConfig, DEFAULT_SPLIT_FRACTION};

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::dataset::{self, default_cache_dir, parse_manifest, validate_selection, DatasetDescriptor};
use crate::error::{Error, Result};
use crate::eval::{evaluate_graph, file_stem, read_scores, score_edges, write_scores, EvalReport, Failure, ScoreTable, ScoreVector};
use crate::graph::{
    build_graph, largest_component, load_edge_list, read_graph, read_labeled_edges, read_node_map, split_labeled,
    write_graph, write_labeled_edges, write_node_map, Graph, LabeledEdgeSet,
};
use crate::sgns::{read_embedding_binary, train_sgns, write_embedding_binary, EmbeddingMatrix, TrainConfig};
use crate::walk::{generate_corpus, read_corpus, write_corpus, WalkConfig, WalkCorpus, WalkKind};

/// Stable 64-bit seed for one stage of one (graph, walk) combination.
pub fn derive_seed(master: u64, stage: &str, graph: &str, walk: &str) -> u64 {
    let digest = Sha256::digest(format!("{master}\0{stage}\0{graph}\0{walk}"));
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Residual graph and labeled edges of one prepared graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub name: String,
    pub residual: Graph,
    pub labels: LabeledEdgeSet,
}

impl Prepared {
    /// Edge count before the held-out edges were removed.
    pub fn edge_count(&self) -> usize {
        self.residual.edge_count() + self.labels.n_pos()
    }
}

/// A run directory for one configuration.
#[derive(Debug, Clone)]
pub struct RunLayout {
    pub root: PathBuf,
}

impl RunLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunLayout { root: root.into() }
    }

    pub fn graph_dir(&self, graph: &str) -> PathBuf {
        self.root.join("graphs").join(file_stem(graph))
    }

    pub fn artifact(&self, graph: &str, walk: &WalkKind, ext: &str) -> PathBuf {
        self.graph_dir(graph).join(format!("{}.{ext}", walk.slug()))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn save(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn load_manifest(cfg: &ExperimentConfig) -> Result<Vec<DatasetDescriptor>> {
    match &cfg.manifest {
        Some(p) => parse_manifest(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
        None => Ok(Vec::new()),
    }
}

/// Loads a graph reference, keeps its largest connected component and holds
/// out the labeled edges.
pub fn prepare_graph(cfg: &ExperimentConfig, reference: &str, manifest: &[DatasetDescriptor]) -> Result<Prepared> {
    let name = graph_name(reference);
    let cache = cfg.cache_dir.clone().unwrap_or_else(default_cache_dir);
    let raw = load_edge_list(dataset::open_dataset(reference, manifest, &cache)?)?;
    let lcc = largest_component(&build_graph(&raw)?);
    let selection = validate_selection(&lcc);
    for w in &selection.warnings {
        log::warn!("{name}: {w}");
    }
    if !selection.passed {
        return Err(Error::InvalidParameter(format!("{name}: {}", selection.failures.join("; "))));
    }
    let seed = derive_seed(cfg.master_seed, "split", &name, "");
    let (residual, labels) = split_labeled(&lcc, cfg.split_fraction, seed)?;
    log::info!(
        "{name}: {} nodes, {} edges, {} held out",
        lcc.node_count(),
        lcc.edge_count(),
        labels.n_pos()
    );
    Ok(Prepared { name, residual, labels })
}

pub fn save_prepared(layout: &RunLayout, p: &Prepared) -> Result<()> {
    let dir = layout.graph_dir(&p.name);
    save(&dir.join("graph.txt"), |w| write_graph(&p.residual, w))?;
    save(&dir.join("nodes.tsv"), |w| write_node_map(&p.residual, w))?;
    save(&dir.join("labels.csv"), |w| write_labeled_edges(&p.labels, w))
}

pub fn load_prepared(layout: &RunLayout, name: &str) -> Result<Prepared> {
    let dir = layout.graph_dir(name);
    let graph = read_graph(open(&dir.join("graph.txt"))?)?;
    let labels = read_node_map(open(&dir.join("nodes.tsv"))?)?;
    let residual = graph.with_labels(labels)?;
    let labels = read_labeled_edges(open(&dir.join("labels.csv"))?)?;
    if let Some(e) = labels.edges.iter().find(|e| e.u.max(e.v) >= residual.node_count()) {
        return Err(Error::Format {
            stage: "prepare",
            message: format!("labeled edge ({}, {}) outside the graph", e.u, e.v),
        });
    }
    Ok(Prepared {
        name: name.to_owned(),
        residual,
        labels,
    })
}

pub fn walk_config(cfg: &ExperimentConfig, graph: &str, kind: WalkKind) -> WalkConfig {
    WalkConfig {
        kind,
        walks_per_node: cfg.walks_per_node,
        walk_length: cfg.walk_length,
        seed: derive_seed(cfg.master_seed, "walk", graph, &kind.slug()),
    }
}

pub fn train_config(cfg: &ExperimentConfig, graph: &str, kind: WalkKind) -> TrainConfig {
    TrainConfig {
        seed: derive_seed(cfg.master_seed, "embed", graph, &kind.slug()),
        ..cfg.train
    }
}

/// Corpus stage for one walk on a prepared graph.
pub fn walk_stage(cfg: &ExperimentConfig, p: &Prepared, kind: WalkKind) -> Result<WalkCorpus> {
    let wc = walk_config(cfg, &p.name, kind);
    wc.validate()?;
    Ok(generate_corpus(&p.residual, &wc))
}

/// Embedding stage. Rejects a corpus walked with other parameters than the
/// configuration asks for.
pub fn embed_stage(cfg: &ExperimentConfig, p: &Prepared, corpus: &WalkCorpus) -> Result<EmbeddingMatrix<f32>> {
    let expected = walk_config(cfg, &p.name, corpus.config.kind);
    if corpus.config != expected {
        return Err(Error::Format {
            stage: "walk",
            message: format!("corpus parameters {:?} do not match the configuration {:?}", corpus.config, expected),
        });
    }
    let trained = train_sgns(corpus, p.residual.node_count(), &train_config(cfg, &p.name, corpus.config.kind))?;
    if let (Some(first), Some(last)) = (trained.epoch_loss.first(), trained.epoch_loss.last()) {
        log::debug!("{} {}: loss {first:.4} -> {last:.4} over {} pairs", p.name, corpus.config.kind, trained.pairs);
    }
    Ok(trained.embedding)
}

pub fn score_stage(p: &Prepared, kind: WalkKind, emb: &EmbeddingMatrix<f32>) -> Result<ScoreVector> {
    if emb.rows() != p.residual.node_count() {
        return Err(Error::Format {
            stage: "embed",
            message: format!("{} rows for a graph of {} nodes", emb.rows(), p.residual.node_count()),
        });
    }
    score_edges(emb, &p.labels, &kind.to_string())
}

/// Writes the seeds and parameters of a run to `manifest.json`.
pub fn write_run_manifest(cfg: &ExperimentConfig, names: &[String]) -> Result<()> {
    let layout = RunLayout::new(&cfg.output_dir);
    let seeds: serde_json::Map<String, serde_json::Value> = names
        .iter()
        .map(|g| {
            let walks: serde_json::Map<String, serde_json::Value> = cfg
                .walks
                .iter()
                .map(|k| {
                    (
                        k.to_string(),
                        json!({
                            "walk": walk_config(cfg, g, *k).seed,
                            "embed": train_config(cfg, g, *k).seed,
                        }),
                    )
                })
                .collect();
            (
                g.clone(),
                json!({ "split": derive_seed(cfg.master_seed, "split", g, ""), "walks": walks }),
            )
        })
        .collect();
    let doc = json!({ "config": cfg, "seeds": seeds });
    let path = layout.root.join("manifest.json");
    save(&path, |w| {
        serde_json::to_writer_pretty(&mut *w, &doc)?;
        writeln!(w)
    })
}

fn thread_pool(cfg: &ExperimentConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn failure(graph: &str, walk: Option<WalkKind>, stage: &str, err: &Error) -> Failure {
    log::error!("{graph}{}: {stage} failed: {err}", walk.map(|w| format!(" {w}")).unwrap_or_default());
    Failure {
        graph: graph.to_owned(),
        walk: walk.map(|w| w.to_string()),
        stage: stage.to_owned(),
        message: err.to_string(),
    }
}

/// `prepare` stage for every configured graph. Graphs that fail are
/// reported and skipped.
pub fn run_prepare(cfg: &ExperimentConfig) -> Result<(Vec<Prepared>, Vec<Failure>)> {
    cfg.validate()?;
    let manifest = load_manifest(cfg)?;
    let layout = RunLayout::new(&cfg.output_dir);
    let names: Vec<String> = cfg.graphs.iter().map(|g| graph_name(g)).collect();
    write_run_manifest(cfg, &names)?;
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for reference in &cfg.graphs {
        let t = Instant::now();
        match prepare_graph(cfg, reference, &manifest).and_then(|p| save_prepared(&layout, &p).map(|_| p)) {
            Ok(p) => {
                log::info!("{}: prepared in {:.2?}", p.name, t.elapsed());
                ok.push(p);
            }
            Err(e) => failures.push(failure(&graph_name(reference), None, "prepare", &e)),
        }
    }
    Ok((ok, failures))
}

/// Which stages a per-walk task runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageSet {
    Walk,
    Embed,
    Score,
    /// Walk, embed and score without rereading intermediate files.
    All,
}

fn walk_task(cfg: &ExperimentConfig, layout: &RunLayout, p: &Prepared, kind: WalkKind, stages: StageSet) -> std::result::Result<(), Failure> {
    let fail = |stage: &str, e: Error| failure(&p.name, Some(kind), stage, &e);
    let corpus_path = layout.artifact(&p.name, &kind, "corpus");
    let emb_path = layout.artifact(&p.name, &kind, "emb");
    let score_path = layout.artifact(&p.name, &kind, "scores");

    let corpus = if matches!(stages, StageSet::Walk | StageSet::All) {
        let t = Instant::now();
        let corpus = walk_stage(cfg, p, kind).map_err(|e| fail("walk", e))?;
        save(&corpus_path, |w| write_corpus(&corpus, w)).map_err(|e| fail("walk", e))?;
        log::info!("{} {kind}: {} tokens walked in {:.2?}", p.name, corpus.token_count(), t.elapsed());
        Some(corpus)
    } else {
        None
    };
    if stages == StageSet::Walk {
        return Ok(());
    }

    let emb = if matches!(stages, StageSet::Embed | StageSet::All) {
        let corpus = match corpus {
            Some(c) => c,
            None => open(&corpus_path).and_then(read_corpus).map_err(|e| fail("embed", e))?,
        };
        let t = Instant::now();
        let emb = embed_stage(cfg, p, &corpus).map_err(|e| fail("embed", e))?;
        save(&emb_path, |w| write_embedding_binary(&emb, w)).map_err(|e| fail("embed", e))?;
        log::info!("{} {kind}: embedded in {:.2?}", p.name, t.elapsed());
        Some(emb)
    } else {
        None
    };
    if stages == StageSet::Embed {
        return Ok(());
    }

    let emb = match emb {
        Some(e) => e,
        None => open(&emb_path).and_then(read_embedding_binary).map_err(|e| fail("score", e))?,
    };
    let scores = score_stage(p, kind, &emb).map_err(|e| fail("score", e))?;
    save(&score_path, |w| write_scores(&scores, w)).map_err(|e| fail("score", e))?;
    Ok(())
}

/// Runs `stages` for every configured walk on every prepared graph found in
/// the run directory. Returns the per-walk failures.
pub fn run_walk_stages(cfg: &ExperimentConfig, stages: StageSet) -> Result<Vec<Failure>> {
    cfg.validate()?;
    let layout = RunLayout::new(&cfg.output_dir);
    let mut failures = Vec::new();
    let mut prepared = Vec::new();
    for reference in &cfg.graphs {
        let name = graph_name(reference);
        match load_prepared(&layout, &name) {
            Ok(p) => prepared.push(p),
            Err(e) => failures.push(failure(&name, None, "prepare", &e)),
        }
    }
    failures.extend(walk_tasks(cfg, &layout, &prepared, stages)?);
    Ok(failures)
}

fn walk_tasks(cfg: &ExperimentConfig, layout: &RunLayout, prepared: &[Prepared], stages: StageSet) -> Result<Vec<Failure>> {
    let tasks: Vec<(&Prepared, WalkKind)> = prepared
        .iter()
        .flat_map(|p| cfg.walks.iter().map(move |&k| (p, k)))
        .collect();
    let pool = thread_pool(cfg)?;
    let results: Vec<std::result::Result<(), Failure>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, kind)| walk_task(cfg, layout, p, kind, stages))
            .collect()
    });
    Ok(results.into_iter().filter_map(|r| r.err()).collect())
}

/// Assembles the report from persisted score files and writes it. Walks
/// already listed in `known` are not reported again as missing.
pub fn assemble_report(cfg: &ExperimentConfig, known: Vec<Failure>) -> Result<EvalReport> {
    cfg.validate()?;
    let layout = RunLayout::new(&cfg.output_dir);
    let mut failures = known;
    let mut graphs = Vec::new();
    let mut tables: Vec<(Prepared, Vec<ScoreVector>)> = Vec::new();
    let mut any_scores = false;
    for reference in &cfg.graphs {
        let name = graph_name(reference);
        if failures.iter().any(|f| f.graph == name && f.walk.is_none()) {
            continue;
        }
        let p = match load_prepared(&layout, &name) {
            Ok(p) => p,
            Err(e) => {
                failures.push(failure(&name, None, "prepare", &e));
                continue;
            }
        };
        let mut scores = Vec::new();
        for kind in &cfg.walks {
            let path = layout.artifact(&name, kind, "scores");
            if !path.is_file() {
                let walk = kind.to_string();
                if !failures.iter().any(|f| f.graph == name && f.walk.as_deref() == Some(walk.as_str())) {
                    failures.push(failure(&name, Some(*kind), "score", &Error::EmptyInput("score file")));
                }
                continue;
            }
            any_scores = true;
            let s = open(&path).and_then(read_scores)?;
            if s.scores.len() != p.labels.len() {
                return Err(Error::Format {
                    stage: "score",
                    message: format!("{}: {} scores for {} labeled edges", path.display(), s.scores.len(), p.labels.len()),
                });
            }
            scores.push(s);
        }
        if scores.is_empty() {
            continue;
        }
        match evaluate_graph(&name, p.residual.node_count(), p.edge_count(), &p.labels, &scores) {
            Ok(r) => graphs.push(r),
            Err(e) => failures.push(failure(&name, None, "report", &e)),
        }
        tables.push((p, scores));
    }
    if !any_scores {
        return Err(Error::EmptyInput("score directory"));
    }
    let report = EvalReport::new(graphs, failures)?;
    let views: Vec<ScoreTable<'_>> = tables
        .iter()
        .map(|(p, s)| ScoreTable {
            graph: &p.name,
            labels: &p.labels,
            scores: s,
        })
        .collect();
    report.write(&layout.root, &views)?;
    Ok(report)
}

/// Prepares every graph, runs every walk through embedding and scoring, and
/// writes the report. Per-(graph, walk) failures are recorded in the report
/// rather than aborting the run.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let start = Instant::now();
    let (prepared, mut failures) = run_prepare(cfg)?;
    let layout = RunLayout::new(&cfg.output_dir);
    failures.extend(walk_tasks(cfg, &layout, &prepared, StageSet::All)?);
    let report = assemble_report(cfg, failures)?;
    log::info!(
        "{} entries over {} graphs, {} failures, {:.2?} total",
        report.entry_count(),
        report.graphs.len(),
        report.failures.len(),
        start.elapsed()
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = derive_seed(1, "walk", "g", "rw");
        assert_eq!(a, derive_seed(1, "walk", "g", "rw"));
        assert_ne!(a, derive_seed(2, "walk", "g", "rw"));
        assert_ne!(a, derive_seed(1, "embed", "g", "rw"));
        assert_ne!(a, derive_seed(1, "walk", "g", "dg"));
    }

    #[test]
    fn layout_paths() {
        let l = RunLayout::new("/tmp/run");
        assert_eq!(
            l.artifact("Student Cooperation", &WalkKind::n2v(1.5, 0.5), "emb"),
            PathBuf::from("/tmp/run/graphs/Student_Cooperation/n2v_1.5_0.5.emb")
        );
    }
}
