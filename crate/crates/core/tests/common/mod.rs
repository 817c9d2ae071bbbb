#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ensemble_screen::domain::{Classifier, DiscriminatorScores, FeatureVector};

pub const STRATEGIES: [&str; 6] = ["maj", "wmaj", "avg", "pro", "min", "max"];
pub const ENERGIES: [&str; 3] = ["sensitivity", "accuracy", "fscore"];

/// The five reference learners at their defaults.
pub const FIVE_LEARNERS: &str = r#"
[[pool]]
kind = "knn"
k = 5

[[pool]]
kind = "naive_bayes"

[[pool]]
kind = "decision_tree"

[[pool]]
kind = "random_forest"
n_trees = 50
seed = 3

[[pool]]
kind = "adaboost"
n_rounds = 50
"#;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ensemble-screen"))
}

pub fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Writes `exp.toml` into `dir` and returns its path.
pub fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("exp.toml");
    fs::write(&path, body).unwrap();
    path
}

/// Every file under `dir`, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, at: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(at).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// First index of the maximum under a total order given by `greater`.
pub fn first_max<T>(values: &[T], greater: impl Fn(&T, &T) -> bool) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if greater(&values[i], &values[best]) {
            best = i;
        }
    }
    best
}

/// Brute-force fusion over integer scores `rows[member][class]` that share a
/// common denominator. Exact for every strategy except `wmaj`, which takes
/// real weights.
pub fn oracle_fuse(strategy: &str, rows: &[Vec<u64>], weights: &[f64]) -> usize {
    let m = rows[0].len();
    let vote = |r: &Vec<u64>| first_max(r, |a, b| a > b);
    match strategy {
        "maj" => {
            let mut votes = vec![0u64; m];
            for r in rows {
                votes[vote(r)] += 1;
            }
            first_max(&votes, |a, b| a > b)
        }
        "wmaj" => {
            let mut votes = vec![0.0f64; m];
            for (r, w) in rows.iter().zip(weights) {
                votes[vote(r)] += w;
            }
            first_max(&votes, |a, b| a > b)
        }
        // The mean's common factor 1/L does not change the argmax.
        "avg" => first_max(&(0..m).map(|c| rows.iter().map(|r| r[c]).sum::<u64>()).collect::<Vec<_>>(), |a, b| a > b),
        "pro" => first_max(
            &(0..m).map(|c| rows.iter().map(|r| r[c] as u128).product::<u128>()).collect::<Vec<_>>(),
            |a, b| a > b,
        ),
        "min" => first_max(&(0..m).map(|c| rows.iter().map(|r| r[c]).min().unwrap()).collect::<Vec<_>>(), |a, b| a > b),
        "max" => first_max(&(0..m).map(|c| rows.iter().map(|r| r[c]).max().unwrap()).collect::<Vec<_>>(), |a, b| a > b),
        other => panic!("unknown strategy {other}"),
    }
}

/// Deterministic fixture classifier: a logistic ramp on one feature,
/// quantized to sixteenths so fused values are exact.
#[derive(Debug, Clone)]
pub struct RampRule {
    pub name: String,
    pub feature: usize,
    pub center: f64,
    pub scale: f64,
}

impl RampRule {
    pub fn sixteenths(&self, x: &FeatureVector) -> u64 {
        let z = (x.get(self.feature) - self.center) / self.scale;
        let p = 1.0 / (1.0 + (-z).exp());
        (p * 16.0).round() as u64
    }
}

impl Classifier for RampRule {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_classes(&self) -> usize {
        2
    }

    fn score(&self, x: &FeatureVector) -> DiscriminatorScores {
        let k = self.sixteenths(x) as f64;
        DiscriminatorScores::new(vec![(16.0 - k) / 16.0, k / 16.0]).unwrap()
    }
}
