//! Ensemble membership search.
//!
//! Forward search starts from the best single member and makes one pass over
//! the remaining members in pool order, adding each one whose inclusion
//! strictly raises the energy. Backward search starts from the full pool and
//! makes one pass removing members whose removal strictly raises the energy.
//! `all` and `single_best` are the two reference baselines.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion::{Combiner, ScoreTable};
use crate::metrics::{confusion, ConfusionCounts, MetricsError};
use crate::registry::{Registry, UnknownName};

/// Class index treated as positive in energy evaluation.
pub const POSITIVE: usize = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Unknown(#[from] UnknownName),
    #[error("the classifier pool is empty")]
    EmptyPool,
}

/// Scalar objective maximized by ensemble search. Values lie in `[0, 1]`.
pub trait EnergyFunction: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn evaluate(&self, counts: &ConfusionCounts) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct Sensitivity;

impl EnergyFunction for Sensitivity {
    fn name(&self) -> &'static str {
        "sensitivity"
    }

    fn evaluate(&self, counts: &ConfusionCounts) -> f64 {
        counts.sensitivity()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Accuracy;

impl EnergyFunction for Accuracy {
    fn name(&self) -> &'static str {
        "accuracy"
    }

    fn evaluate(&self, counts: &ConfusionCounts) -> f64 {
        counts.accuracy()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FScore;

impl EnergyFunction for FScore {
    fn name(&self) -> &'static str {
        "fscore"
    }

    fn evaluate(&self, counts: &ConfusionCounts) -> f64 {
        counts.fscore()
    }
}

pub type EnergyCtor = fn() -> Box<dyn EnergyFunction>;

pub const ENERGY_NAMES: [&str; 3] = ["sensitivity", "accuracy", "fscore"];

pub fn energy_registry() -> Registry<EnergyCtor> {
    Registry::<EnergyCtor>::new("energy function")
        .with("sensitivity", || Box::new(Sensitivity))
        .with("accuracy", || Box::new(Accuracy))
        .with("fscore", || Box::new(FScore))
}

pub fn build_energy(name: &str) -> Result<Arc<dyn EnergyFunction>, SelectionError> {
    let ctor = *energy_registry().get(name)?;
    Ok(Arc::from(ctor()))
}

/// Energy of binary `predictions` against `truth`, class 1 positive.
pub fn energy(kind: &dyn EnergyFunction, predictions: &[usize], truth: &[usize]) -> Result<f64, SelectionError> {
    Ok(kind.evaluate(&confusion(predictions, truth, POSITIVE)?))
}

/// Energy of any member subset (sorted pool indices).
pub trait Objective {
    fn pool_size(&self) -> usize;

    fn energy(&self, subset: &[usize]) -> f64;
}

/// Fused-ensemble energy over cached member scores.
#[derive(Debug)]
pub struct EnsembleObjective<'a> {
    pub scores: &'a ScoreTable,
    pub truth: &'a [usize],
    pub combiner: &'a dyn Combiner,
    pub weights: Option<&'a [f64]>,
    pub energy: &'a dyn EnergyFunction,
}

impl EnsembleObjective<'_> {
    pub fn counts(&self, subset: &[usize]) -> ConfusionCounts {
        let predictions = self.scores.fuse_decisions(subset, self.combiner, self.weights);
        let mut counts = ConfusionCounts::default();
        for (&p, &t) in predictions.iter().zip(self.truth) {
            counts.record(p == POSITIVE, t == POSITIVE);
        }
        counts
    }
}

impl Objective for EnsembleObjective<'_> {
    fn pool_size(&self) -> usize {
        self.scores.n_members()
    }

    fn energy(&self, subset: &[usize]) -> f64 {
        self.energy.evaluate(&self.counts(subset))
    }
}

/// Each member's own energy on `truth`, scaled to sum one (uniform when every
/// member scores zero). Used as weighted-majority weights.
pub fn energy_weights(scores: &ScoreTable, truth: &[usize], energy: &dyn EnergyFunction) -> Vec<f64> {
    let raw: Vec<f64> = (0..scores.n_members())
        .map(|j| {
            let mut counts = ConfusionCounts::default();
            for (p, &t) in scores.member_decisions(j).into_iter().zip(truth) {
                counts.record(p == POSITIVE, t == POSITIVE);
            }
            energy.evaluate(&counts)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / raw.len() as f64; raw.len()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Evaluation of a starting configuration.
    Init,
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub kind: StepKind,
    /// Member added or removed; for `Init` steps the evaluated singleton, or
    /// `None` for a whole-pool start.
    pub candidate: Option<usize>,
    pub energy: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Sorted pool indices of the chosen members.
    pub selected: Vec<usize>,
    pub energy: f64,
    pub trace: Vec<TraceStep>,
}

impl SearchResult {
    /// Rebuilds the selection from the trace: the accepted `Init` step fixes
    /// the start, then accepted `Add`/`Remove` steps apply in order.
    /// Returns the subset and the last accepted energy.
    pub fn replay(&self, pool_size: usize) -> (Vec<usize>, f64) {
        let mut current: Vec<usize> = Vec::new();
        let mut energy = f64::NAN;
        for step in self.trace.iter().filter(|s| s.accepted) {
            match (step.kind, step.candidate) {
                (StepKind::Init, Some(c)) => current = vec![c],
                (StepKind::Init, None) => current = (0..pool_size).collect(),
                (StepKind::Add, Some(c)) => {
                    current.push(c);
                    current.sort_unstable();
                }
                (StepKind::Remove, Some(c)) => current.retain(|&m| m != c),
                (_, None) => {}
            }
            energy = step.energy;
        }
        (current, energy)
    }

    /// Energy evaluations after the starting configuration.
    pub fn candidate_evaluations(&self) -> usize {
        self.trace.iter().filter(|s| s.kind != StepKind::Init).count()
    }
}

/// Single pass in pool order, or repeated passes until nothing changes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    #[default]
    SinglePass,
    Iterative,
}

pub trait SearchMethod: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn search(&self, objective: &dyn Objective) -> SearchResult;
}

pub type SearchCtor = fn(SearchMode) -> Box<dyn SearchMethod>;

pub const SEARCH_NAMES: [&str; 4] = ["forward", "backward", "all", "single_best"];

pub fn search_registry() -> Registry<SearchCtor> {
    Registry::<SearchCtor>::new("search method")
        .with("forward", |mode| Box::new(ForwardSearch { mode }))
        .with("backward", |mode| Box::new(BackwardSearch { mode }))
        .with("all", |_| Box::new(SelectAll))
        .with("single_best", |_| Box::new(SingleBest))
}

pub fn build_search(name: &str, mode: SearchMode) -> Result<Arc<dyn SearchMethod>, SelectionError> {
    let ctor = *search_registry().get(name)?;
    Ok(Arc::from(ctor(mode)))
}

/// Evaluates every singleton; the first maximum wins.
fn best_singleton(objective: &dyn Objective, trace: &mut Vec<TraceStep>) -> (usize, f64) {
    let energies: Vec<f64> = (0..objective.pool_size()).map(|i| objective.energy(&[i])).collect();
    let best = crate::domain::argmax_lowest(&energies);
    trace.extend(energies.iter().enumerate().map(|(i, &e)| TraceStep {
        kind: StepKind::Init,
        candidate: Some(i),
        energy: e,
        accepted: i == best,
    }));
    (best, energies[best])
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ForwardSearch {
    pub mode: SearchMode,
}

impl SearchMethod for ForwardSearch {
    fn name(&self) -> &'static str {
        "forward"
    }

    fn search(&self, objective: &dyn Objective) -> SearchResult {
        let pool = objective.pool_size();
        assert!(pool > 0, "search over an empty pool");
        let mut trace = Vec::new();
        let (start, mut best) = best_singleton(objective, &mut trace);
        let mut selected = vec![start];
        loop {
            let mut changed = false;
            for i in 0..pool {
                if selected.contains(&i) {
                    continue;
                }
                let mut candidate = selected.clone();
                candidate.push(i);
                candidate.sort_unstable();
                let e = objective.energy(&candidate);
                let accepted = e > best;
                trace.push(TraceStep {
                    kind: StepKind::Add,
                    candidate: Some(i),
                    energy: e,
                    accepted,
                });
                if accepted {
                    selected = candidate;
                    best = e;
                    changed = true;
                }
            }
            if !changed || self.mode == SearchMode::SinglePass {
                break;
            }
        }
        SearchResult {
            selected,
            energy: best,
            trace,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BackwardSearch {
    pub mode: SearchMode,
}

impl SearchMethod for BackwardSearch {
    fn name(&self) -> &'static str {
        "backward"
    }

    fn search(&self, objective: &dyn Objective) -> SearchResult {
        let pool = objective.pool_size();
        assert!(pool > 0, "search over an empty pool");
        let mut selected: Vec<usize> = (0..pool).collect();
        let mut best = objective.energy(&selected);
        let mut trace = vec![TraceStep {
            kind: StepKind::Init,
            candidate: None,
            energy: best,
            accepted: true,
        }];
        loop {
            let mut changed = false;
            for i in 0..pool {
                // Never empty the ensemble.
                if selected.len() == 1 || !selected.contains(&i) {
                    continue;
                }
                let candidate: Vec<usize> = selected.iter().copied().filter(|&m| m != i).collect();
                let e = objective.energy(&candidate);
                let accepted = e > best;
                trace.push(TraceStep {
                    kind: StepKind::Remove,
                    candidate: Some(i),
                    energy: e,
                    accepted,
                });
                if accepted {
                    selected = candidate;
                    best = e;
                    changed = true;
                }
            }
            if !changed || self.mode == SearchMode::SinglePass {
                break;
            }
        }
        SearchResult {
            selected,
            energy: best,
            trace,
        }
    }
}

/// Every pool member.
#[derive(Debug, Clone, Copy)]
pub struct SelectAll;

impl SearchMethod for SelectAll {
    fn name(&self) -> &'static str {
        "all"
    }

    fn search(&self, objective: &dyn Objective) -> SearchResult {
        let selected: Vec<usize> = (0..objective.pool_size()).collect();
        assert!(!selected.is_empty(), "search over an empty pool");
        let energy = objective.energy(&selected);
        SearchResult {
            selected,
            energy,
            trace: vec![TraceStep {
                kind: StepKind::Init,
                candidate: None,
                energy,
                accepted: true,
            }],
        }
    }
}

/// The best individual member.
#[derive(Debug, Clone, Copy)]
pub struct SingleBest;

impl SearchMethod for SingleBest {
    fn name(&self) -> &'static str {
        "single_best"
    }

    fn search(&self, objective: &dyn Objective) -> SearchResult {
        assert!(objective.pool_size() > 0, "search over an empty pool");
        let mut trace = Vec::new();
        let (best, energy) = best_singleton(objective, &mut trace);
        SearchResult {
            selected: vec![best],
            energy,
            trace,
        }
    }
}

pub fn forward_search(objective: &dyn Objective) -> SearchResult {
    ForwardSearch::default().search(objective)
}

pub fn backward_search(objective: &dyn Objective) -> SearchResult {
    BackwardSearch::default().search(objective)
}

pub fn select_all(objective: &dyn Objective) -> SearchResult {
    SelectAll.search(objective)
}

pub fn select_single_best(objective: &dyn Objective) -> SearchResult {
    SingleBest.search(objective)
}
