//! Cross-validated experiment runner and report writer.
//!
//! For every scenario the labeled data is split into stratified folds. Inside
//! each fold the pool is trained, every (search, energy, strategy) cell
//! selects its ensemble on the energy-on data, and the fused ensemble is
//! evaluated on the held-out fold. Fold metrics are averaged; test-fold
//! positive scores are pooled into one ROC curve per cell.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{fit_checked, Learner, TrainError};
use crate::config::{ConfigError, DataSource, EnergyOn, ExperimentConfig, GridAxes};
use crate::dataio::{
    apply_scenario, generate_synthetic, load_csv, stratified_holdout, stratified_kfold, DataIoError, Dataset,
    FoldPlan, Provenance, Scenario,
};
use crate::domain::{Classifier, LabeledData};
use crate::fusion::{build_combiner, Combiner, ScoreTable};
use crate::metrics::{confusion, roc_auc, ConfusionCounts, MetricsError, RocCurve};
use crate::selection::{
    build_energy, build_search, energy_weights, EnergyFunction, EnsembleObjective, SearchMethod, TraceStep, POSITIVE,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataIoError),
    #[error("scenario {scenario}, fold {fold}: {source}")]
    Fold {
        scenario: Scenario,
        fold: usize,
        #[source]
        source: TrainError,
    },
    #[error("scenario {scenario}: {source}")]
    Metrics {
        scenario: Scenario,
        #[source]
        source: MetricsError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("cannot start worker pool: {0}")]
    Threads(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker thread cap; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: ExperimentConfig,
    pub data: DataSummary,
    /// Description of each pool member, in pool order.
    pub members: Vec<String>,
    pub scenarios: Vec<ScenarioReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub provenance: Provenance,
    pub n_records: usize,
    pub grade_counts: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub n_samples: usize,
    pub n_positive: usize,
    pub cv_seed: u64,
    pub folds: Vec<FoldRecord>,
    /// Each pool member on its own.
    pub members: Vec<CellReport>,
    pub cells: Vec<CellReport>,
}

/// Sample ids (record indices) used by one fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub fold: usize,
    /// Seed of the validation holdout, when one is carved out.
    pub holdout_seed: Option<u64>,
    /// Training data of the pool.
    pub fit_ids: Vec<usize>,
    /// Data on which search energies and weights are computed.
    pub eval_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
    /// Labels of `test_ids`, in the same order.
    pub test_truth: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub search: String,
    pub energy: String,
    pub strategy: String,
}

impl CellKey {
    pub fn label(&self) -> String {
        format!("{}/{}/{}", self.search, self.energy, self.strategy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    /// Grid cell, or `None` for a single pool member.
    pub key: Option<CellKey>,
    pub name: String,
    pub summary: CellSummary,
    pub folds: Vec<FoldOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub sensitivity: f64,
    pub specificity: f64,
    pub accuracy: f64,
    /// Empirical AUC of the pooled test-fold positive scores.
    pub auc: f64,
    /// Most frequent per-fold roster; earliest fold wins ties.
    pub modal_roster: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub roster: Vec<usize>,
    /// Energy reached by the search on the energy-on data.
    pub search_energy: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub trace: Vec<TraceStep>,
    /// Test-fold predictions, aligned with the fold's `test_ids`.
    pub predictions: Vec<usize>,
    pub positive_scores: Vec<f64>,
    pub counts: ConfusionCounts,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads or generates the configured dataset.
pub fn load_dataset(config: &ExperimentConfig) -> Result<Dataset, HarnessError> {
    Ok(match config.data.source()? {
        DataSource::Path(p) => load_csv(p)?,
        DataSource::Synth(params) => generate_synthetic(&params)?,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<EvaluationReport, HarnessError> {
    run_experiment_with(config, RunOptions::default())
}

pub fn run_experiment_with(config: &ExperimentConfig, options: RunOptions) -> Result<EvaluationReport, HarnessError> {
    let data = load_dataset(config)?;
    run_on_dataset_with(config, &data, options)
}

pub fn run_on_dataset(config: &ExperimentConfig, data: &Dataset) -> Result<EvaluationReport, HarnessError> {
    run_on_dataset_with(config, data, RunOptions::default())
}

pub fn run_on_dataset_with(
    config: &ExperimentConfig,
    data: &Dataset,
    options: RunOptions,
) -> Result<EvaluationReport, HarnessError> {
    match options.threads {
        None => run_inner(config, data),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HarnessError::Threads(e.to_string()))?
            .install(|| run_inner(config, data)),
    }
}

struct Plan {
    axes: GridAxes,
    learners: Vec<Box<dyn Learner>>,
    combiners: Vec<Arc<dyn Combiner>>,
    energies: Vec<Arc<dyn EnergyFunction>>,
    searches: Vec<Arc<dyn SearchMethod>>,
}

impl Plan {
    fn new(config: &ExperimentConfig) -> Result<Self, ConfigError> {
        let axes = config.validate()?;
        let learners = config
            .pool
            .iter()
            .enumerate()
            .map(|(i, s)| s.build().map_err(|e| ConfigError::new(format!("pool[{i}]"), e.to_string())))
            .collect::<Result<_, _>>()?;
        let options = config.fusion_options();
        let combiners = axes
            .strategies
            .iter()
            .map(|s| build_combiner(s, &options).map_err(|e| ConfigError::new("fusion", e.to_string())))
            .collect::<Result<_, _>>()?;
        let energies = axes
            .energies
            .iter()
            .map(|e| build_energy(e).map_err(|err| ConfigError::new("energy", err.to_string())))
            .collect::<Result<_, _>>()?;
        let searches = axes
            .searches
            .iter()
            .map(|s| build_search(s, config.search_mode).map_err(|e| ConfigError::new("search", e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Plan {
            axes,
            learners,
            combiners,
            energies,
            searches,
        })
    }

    /// Cells in report order: search, then energy, then strategy.
    fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for s in 0..self.searches.len() {
            for e in 0..self.energies.len() {
                for c in 0..self.combiners.len() {
                    out.push((s, e, c));
                }
            }
        }
        out
    }

    fn key(&self, (s, e, c): (usize, usize, usize)) -> CellKey {
        CellKey {
            search: self.axes.searches[s].clone(),
            energy: self.axes.energies[e].clone(),
            strategy: self.axes.strategies[c].clone(),
        }
    }
}

/// Mixes a fold index into a base seed (splitmix64 finalizer).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_inner(config: &ExperimentConfig, data: &Dataset) -> Result<EvaluationReport, HarnessError> {
    let plan = Plan::new(config)?;
    let members: Vec<String> = plan.learners.iter().map(|l| l.describe()).collect();
    let scenarios = plan
        .axes
        .scenarios
        .iter()
        .map(|&sc| run_scenario(config, &plan, &members, data, sc))
        .collect::<Result<_, _>>()?;
    Ok(EvaluationReport {
        config: config.clone(),
        data: DataSummary {
            provenance: data.provenance.clone(),
            n_records: data.len(),
            grade_counts: data.grade_counts(),
        },
        members,
        scenarios,
    })
}

struct FoldRun {
    record: FoldRecord,
    members: Vec<FoldOutcome>,
    cells: Vec<FoldOutcome>,
}

fn run_scenario(
    config: &ExperimentConfig,
    plan: &Plan,
    member_names: &[String],
    data: &Dataset,
    scenario: Scenario,
) -> Result<ScenarioReport, HarnessError> {
    let labeled = apply_scenario(data, scenario)?;
    let folds = stratified_kfold(labeled.labels(), config.cv.k, config.cv.seed)?;
    let runs: Vec<FoldRun> = (0..folds.k)
        .into_par_iter()
        .map(|f| run_fold(config, plan, &labeled, &folds, f).map_err(|source| HarnessError::Fold { scenario, fold: f, source }))
        .collect::<Result<_, _>>()?;

    let records: Vec<FoldRecord> = runs.iter().map(|r| r.record.clone()).collect();
    let summarize_all = |outcomes: Vec<Vec<FoldOutcome>>, names: Vec<(Option<CellKey>, String)>| {
        outcomes
            .into_iter()
            .zip(names)
            .map(|(folds, (key, name))| {
                let summary = summarize(&folds, &records).map_err(|source| HarnessError::Metrics { scenario, source })?;
                Ok(CellReport {
                    key,
                    name,
                    summary,
                    folds,
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    };

    let transpose = |pick: fn(&FoldRun) -> &Vec<FoldOutcome>, n: usize| -> Vec<Vec<FoldOutcome>> {
        (0..n).map(|i| runs.iter().map(|r| pick(r)[i].clone()).collect()).collect()
    };
    let cell_ids = plan.cells();
    let member_reports = summarize_all(
        transpose(|r| &r.members, member_names.len()),
        member_names.iter().map(|n| (None, n.clone())).collect(),
    )?;
    let cell_reports = summarize_all(
        transpose(|r| &r.cells, cell_ids.len()),
        cell_ids
            .iter()
            .map(|&id| {
                let key = plan.key(id);
                (Some(key.clone()), key.label())
            })
            .collect(),
    )?;

    Ok(ScenarioReport {
        scenario,
        n_samples: labeled.len(),
        n_positive: labeled.labels().iter().filter(|&&l| l == POSITIVE).count(),
        cv_seed: config.cv.seed,
        folds: records,
        members: member_reports,
        cells: cell_reports,
    })
}

fn run_fold(
    config: &ExperimentConfig,
    plan: &Plan,
    labeled: &LabeledData,
    folds: &FoldPlan,
    fold: usize,
) -> Result<FoldRun, TrainError> {
    let train = folds.train_positions(fold);
    let test = folds.test_positions(fold);
    let (fit, eval, holdout_seed) = match config.energy_on {
        EnergyOn::Train => (train.clone(), train, None),
        EnergyOn::Validation => {
            let seed = derive_seed(config.cv.seed, fold as u64);
            let train_labels: Vec<usize> = train.iter().map(|&p| labeled.labels()[p]).collect();
            let (kept, held) = stratified_holdout(&train_labels, config.validation_fraction, seed);
            let fit = kept.iter().map(|&i| train[i]).collect();
            let eval = held.iter().map(|&i| train[i]).collect();
            (fit, eval, Some(seed))
        }
    };
    let fit_data = labeled.subset(&fit);
    let eval_data = labeled.subset(&eval);
    let test_data = labeled.subset(&test);

    let models: Vec<Arc<dyn Classifier>> = plan
        .learners
        .par_iter()
        .map(|l| fit_checked(l.as_ref(), &fit_data))
        .collect::<Result<_, _>>()?;
    let eval_table = ScoreTable::from_members(&models, eval_data.samples());
    let test_table = ScoreTable::from_members(&models, test_data.samples());
    let eval_truth = eval_data.labels();
    let test_truth = test_data.labels();

    let outcome = |roster: Vec<usize>,
                   predictions: Vec<usize>,
                   positive_scores: Vec<f64>,
                   search_energy: Option<f64>,
                   weights: Option<Vec<f64>>,
                   trace: Vec<TraceStep>| {
        let counts = confusion(&predictions, test_truth, POSITIVE).expect("test fold is non-empty");
        FoldOutcome {
            roster,
            search_energy,
            weights,
            trace,
            predictions,
            positive_scores,
            counts,
        }
    };

    let members = (0..models.len())
        .map(|j| {
            let scores = (0..test_table.n_samples()).map(|s| test_table.row(j, s)[POSITIVE]).collect();
            outcome(vec![j], test_table.member_decisions(j), scores, None, None, Vec::new())
        })
        .collect();

    let cells = plan
        .cells()
        .into_par_iter()
        .map(|(s, e, c)| {
            let combiner = plan.combiners[c].as_ref();
            let energy = plan.energies[e].as_ref();
            let weights = combiner
                .needs_weights()
                .then(|| energy_weights(&eval_table, eval_truth, energy));
            let objective = EnsembleObjective {
                scores: &eval_table,
                truth: eval_truth,
                combiner,
                weights: weights.as_deref(),
                energy,
            };
            let result = plan.searches[s].search(&objective);
            let fused = test_table.fuse(&result.selected, combiner, weights.as_deref());
            outcome(
                result.selected,
                fused.predictions,
                fused.positive_scores,
                Some(result.energy),
                weights,
                result.trace,
            )
        })
        .collect();

    Ok(FoldRun {
        record: FoldRecord {
            fold,
            holdout_seed,
            fit_ids: fit_data.ids().to_vec(),
            eval_ids: eval_data.ids().to_vec(),
            test_ids: test_data.ids().to_vec(),
            test_truth: test_truth.to_vec(),
        },
        members,
        cells,
    })
}

/// Recomputes a cell summary from per-fold predictions and scores.
pub fn summarize(folds: &[FoldOutcome], records: &[FoldRecord]) -> Result<CellSummary, MetricsError> {
    let k = folds.len() as f64;
    let (mut sn, mut sp, mut acc) = (0.0, 0.0, 0.0);
    let mut scores = Vec::new();
    let mut truth = Vec::new();
    for (outcome, record) in folds.iter().zip(records) {
        let c = confusion(&outcome.predictions, &record.test_truth, POSITIVE)?;
        sn += c.sensitivity();
        sp += c.specificity();
        acc += c.accuracy();
        scores.extend_from_slice(&outcome.positive_scores);
        truth.extend(record.test_truth.iter().map(|&t| t == POSITIVE));
    }
    let auc = roc_auc(&scores, &truth)?.auc;
    Ok(CellSummary {
        sensitivity: sn / k,
        specificity: sp / k,
        accuracy: acc / k,
        auc,
        modal_roster: modal_roster(folds),
    })
}

fn modal_roster(folds: &[FoldOutcome]) -> Vec<usize> {
    let mut best: Option<(&Vec<usize>, usize)> = None;
    for f in folds {
        let count = folds.iter().filter(|g| g.roster == f.roster).count();
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((&f.roster, count));
        }
    }
    best.map(|(r, _)| r.clone()).unwrap_or_default()
}

/// Pooled test-fold ROC curve of a cell.
pub fn pooled_roc(cell: &CellReport, records: &[FoldRecord]) -> Result<RocCurve, MetricsError> {
    let scores: Vec<f64> = cell.folds.iter().flat_map(|f| f.positive_scores.iter().copied()).collect();
    let truth: Vec<bool> = records
        .iter()
        .flat_map(|r| r.test_truth.iter().map(|&t| t == POSITIVE))
        .collect();
    roc_auc(&scores, &truth)
}

/// Recomputes every stored summary and confusion count; returns mismatches.
pub fn recompute_from_manifest(report: &EvaluationReport) -> Vec<String> {
    let mut problems = Vec::new();
    for sc in &report.scenarios {
        for cell in sc.members.iter().chain(&sc.cells) {
            for (outcome, record) in cell.folds.iter().zip(&sc.folds) {
                match confusion(&outcome.predictions, &record.test_truth, POSITIVE) {
                    Ok(c) if c == outcome.counts => {}
                    Ok(c) => problems.push(format!(
                        "{} {} fold {}: stored counts {:?}, recomputed {:?}",
                        sc.scenario, cell.name, record.fold, outcome.counts, c
                    )),
                    Err(e) => problems.push(format!("{} {} fold {}: {e}", sc.scenario, cell.name, record.fold)),
                }
            }
            match summarize(&cell.folds, &sc.folds) {
                Ok(s) if s == cell.summary => {}
                Ok(s) => problems.push(format!(
                    "{} {}: stored summary {:?}, recomputed {:?}",
                    sc.scenario, cell.name, cell.summary, s
                )),
                Err(e) => problems.push(format!("{} {}: {e}", sc.scenario, cell.name)),
            }
        }
    }
    problems
}

/// Checks that test folds partition the scenario's samples and that no test
/// sample was used for training or energy evaluation in its fold.
pub fn audit_leakage(report: &EvaluationReport) -> Vec<String> {
    let mut problems = Vec::new();
    for sc in &report.scenarios {
        let mut seen = BTreeSet::new();
        for f in &sc.folds {
            let used: BTreeSet<usize> = f.fit_ids.iter().chain(&f.eval_ids).copied().collect();
            let leaked: Vec<usize> = f.test_ids.iter().copied().filter(|i| used.contains(i)).collect();
            if !leaked.is_empty() {
                problems.push(format!("{} fold {}: test ids reused {:?}", sc.scenario, f.fold, leaked));
            }
            if used.len() + f.test_ids.len() != sc.n_samples {
                problems.push(format!(
                    "{} fold {}: {} training/eval + {} test ids, expected {} in total",
                    sc.scenario,
                    f.fold,
                    used.len(),
                    f.test_ids.len(),
                    sc.n_samples
                ));
            }
            for &i in &f.test_ids {
                if !seen.insert(i) {
                    problems.push(format!("{}: id {i} appears in more than one test fold", sc.scenario));
                }
            }
        }
        if seen.len() != sc.n_samples {
            problems.push(format!(
                "{}: test folds cover {} of {} samples",
                sc.scenario,
                seen.len(),
                sc.n_samples
            ));
        }
    }
    problems
}

fn percent_cell(s: &CellSummary) -> String {
    format!(
        "{:.1}%/{:.1}%/{:.1}%",
        100.0 * s.sensitivity,
        100.0 * s.specificity,
        100.0 * s.accuracy
    )
}

fn axis_values(cells: &[CellReport], pick: fn(&CellKey) -> &String) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for k in cells.iter().filter_map(|c| c.key.as_ref()) {
        if !out.contains(pick(k)) {
            out.push(pick(k).clone());
        }
    }
    out
}

/// Strategy-by-energy grid of one search method as (text, csv).
pub fn grid_tables(sc: &ScenarioReport, search: &str) -> (String, String) {
    let cells: Vec<&CellReport> = sc
        .cells
        .iter()
        .filter(|c| c.key.as_ref().is_some_and(|k| k.search == search))
        .collect();
    let owned: Vec<CellReport> = cells.iter().map(|&c| c.clone()).collect();
    let strategies = axis_values(&owned, |k| &k.strategy);
    let energies = axis_values(&owned, |k| &k.energy);
    let lookup = |strategy: &str, energy: &str| {
        cells
            .iter()
            .find(|c| c.key.as_ref().is_some_and(|k| k.strategy == strategy && k.energy == energy))
            .map(|c| percent_cell(&c.summary))
            .unwrap_or_default()
    };

    let width = 20;
    let mut text = format!(
        "{} / {} search: Sn/Sp/Acc, mean over {} folds\n{:<10}",
        sc.scenario,
        search,
        sc.folds.len(),
        "strategy"
    );
    let mut csv = String::from("strategy");
    for e in &energies {
        let _ = write!(text, "{e:<width$}");
        let _ = write!(csv, ",{e}");
    }
    text.truncate(text.trim_end().len());
    text.push('\n');
    csv.push('\n');
    for s in &strategies {
        let _ = write!(text, "{s:<10}");
        csv.push_str(s);
        for e in &energies {
            let cell = lookup(s, e);
            let _ = write!(text, "{cell:<width$}");
            let _ = write!(csv, ",{cell}");
        }
        text.truncate(text.trim_end().len());
        text.push('\n');
        csv.push('\n');
    }
    (text, csv)
}

/// Sensitivity/specificity/accuracy/AUC for each member and each cell.
pub fn comparison_csv(sc: &ScenarioReport) -> String {
    let mut out = String::from("method,sensitivity,specificity,accuracy,auc\n");
    for c in sc.members.iter().chain(&sc.cells) {
        let s = &c.summary;
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{}",
            c.name, s.sensitivity, s.specificity, s.accuracy, s.auc
        );
    }
    out
}

fn rosters_text(sc: &ScenarioReport, members: &[String]) -> String {
    let names = |r: &[usize]| r.iter().map(|&j| members[j].as_str()).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    for c in &sc.cells {
        let _ = writeln!(out, "{}: modal [{}]", c.name, names(&c.summary.modal_roster));
        for (i, f) in c.folds.iter().enumerate() {
            let _ = writeln!(out, "  fold {i}: {:?}", f.roster);
        }
    }
    out
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

/// Writes the grids, comparison tables, ROC files, rosters and the manifest
/// under `out_dir`. Returns the written paths in write order.
pub fn emit_report(report: &EvaluationReport, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let roc_dir = out_dir.join("roc");
    fs::create_dir_all(&roc_dir).map_err(io_err(&roc_dir))?;
    let mut written = Vec::new();
    let mut write = |path: PathBuf, content: &str| -> Result<(), HarnessError> {
        fs::write(&path, content).map_err(io_err(&path))?;
        written.push(path);
        Ok(())
    };

    for sc in &report.scenarios {
        let name = sc.scenario.name();
        for search in axis_values(&sc.cells, |k| &k.search) {
            let (text, csv) = grid_tables(sc, &search);
            write(out_dir.join(format!("{name}_{search}_grid.txt")), &text)?;
            write(out_dir.join(format!("{name}_{search}_grid.csv")), &csv)?;
        }
        write(out_dir.join(format!("{name}_comparison.csv")), &comparison_csv(sc))?;
        write(out_dir.join(format!("{name}_rosters.txt")), &rosters_text(sc, &report.members))?;

        let metrics_err = |source| HarnessError::Metrics {
            scenario: sc.scenario,
            source,
        };
        for (j, m) in sc.members.iter().enumerate() {
            let roc = pooled_roc(m, &sc.folds).map_err(metrics_err)?;
            let kind = report.config.pool[j].kind.as_str();
            write(roc_dir.join(format!("{name}_member{j}_{kind}.roc")), &roc.to_text())?;
        }
        for c in &sc.cells {
            let roc = pooled_roc(c, &sc.folds).map_err(metrics_err)?;
            let key = c.key.as_ref().expect("grid cells carry keys");
            let stem = file_stem(&format!("{name}_{}_{}_{}", key.search, key.energy, key.strategy));
            write(roc_dir.join(format!("{stem}.roc")), &roc.to_text())?;
        }
    }

    let manifest = serde_json::to_string_pretty(report).expect("report serializes");
    write(out_dir.join("manifest.json"), &manifest)?;
    Ok(written)
}

pub fn load_manifest(path: &Path) -> Result<EvaluationReport, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
