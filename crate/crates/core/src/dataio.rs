//! Dataset ingestion and preparation: the `chi0..chi18,grade` CSV schema,
//! scenario relabeling, stratified k-fold plans and a synthetic cohort
//! generator.

use std::fmt;
use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution, Gamma, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{validate_feature_vector, FeatureVector, Grade, GradedRecord, LabeledData, N_FEATURES};

#[derive(Debug, Error)]
pub enum DataIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: file has no data rows")]
    EmptyFile { path: PathBuf },
    #[error("{path}: bad header: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("{path}:{line}: {message}")]
    Value {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("no usable data after applying scenario {scenario}: {reason}")]
    EmptyAfterFilter { scenario: Scenario, reason: String },
    #[error("cannot build {k} folds: {reason}")]
    TooFewSamples { k: usize, reason: String },
    #[error("bad grade proportions: {0}")]
    BadProportions(String),
    #[error("bad generator parameter: {0}")]
    BadParameter(String),
}

/// Header of the ingestion format.
pub fn csv_header() -> Vec<String> {
    (0..N_FEATURES)
        .map(|i| format!("chi{i}"))
        .chain(std::iter::once("grade".to_string()))
        .collect()
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    File(PathBuf),
    Synthetic(SynthParams),
    InMemory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<GradedRecord>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn grade_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for r in &self.records {
            counts[r.grade.index() as usize] += 1;
        }
        counts
    }
}

/// One problem found while auditing a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn io_error(path: &Path, source: io::Error) -> DataIoError {
    DataIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_row(record: &csv::StringRecord) -> Result<GradedRecord, String> {
    if record.len() != N_FEATURES + 1 {
        return Err(format!(
            "expected {} fields ({} features + grade), found {}",
            N_FEATURES + 1,
            N_FEATURES,
            record.len()
        ));
    }
    let mut raw = [0.0; N_FEATURES];
    for (i, field) in record.iter().take(N_FEATURES).enumerate() {
        raw[i] = field
            .parse()
            .map_err(|_| format!("chi{i}: `{field}` is not a number"))?;
    }
    let features = validate_feature_vector(&raw).map_err(|e| e.to_string())?;
    let grade_field = &record[N_FEATURES];
    let grade = grade_field
        .parse::<u8>()
        .ok()
        .and_then(Grade::from_index)
        .ok_or_else(|| format!("grade `{grade_field}` must be one of 0, 1, 2, 3"))?;
    Ok(GradedRecord { features, grade })
}

/// Reads rows, handing each `(line, parsed row)` to `visit`. Header and I/O
/// problems abort; row problems are the visitor's business.
fn scan_csv(
    path: &Path,
    mut visit: impl FnMut(u64, Result<GradedRecord, String>) -> Result<(), DataIoError>,
) -> Result<usize, DataIoError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader.headers().map_err(|e| DataIoError::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(DataIoError::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    let expected = csv_header();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        let message = if !header.iter().any(|h| h == "grade") {
            "missing `grade` column".to_string()
        } else {
            format!("expected `{}`", expected.join(","))
        };
        return Err(DataIoError::Schema {
            path: path.to_path_buf(),
            message,
        });
    }
    let mut rows = 0;
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(line, |p| p.line());
                rows += 1;
                visit(line, parse_row(&record))?;
            }
            Err(e) => {
                rows += 1;
                let line = e.position().map_or(line, |p| p.line());
                visit(line, Err(e.to_string()))?;
            }
        }
    }
    Ok(rows)
}

/// Loads a dataset, failing on the first invalid row.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, DataIoError> {
    let path = path.as_ref();
    let mut records = Vec::new();
    scan_csv(path, |line, row| match row {
        Ok(r) => {
            records.push(r);
            Ok(())
        }
        Err(message) => Err(DataIoError::Value {
            path: path.to_path_buf(),
            line,
            message,
        }),
    })?;
    if records.is_empty() {
        return Err(DataIoError::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(Dataset {
        records,
        provenance: Provenance::File(path.to_path_buf()),
    })
}

/// Checks every row and reports all problems. Header/I/O problems and an
/// empty file are still hard errors.
pub fn audit_csv(path: impl AsRef<Path>) -> Result<Vec<Diagnostic>, DataIoError> {
    let path = path.as_ref();
    let mut diagnostics = Vec::new();
    let rows = scan_csv(path, |line, row| {
        if let Err(message) = row {
            diagnostics.push(Diagnostic { line, message });
        }
        Ok(())
    })?;
    if rows == 0 {
        return Err(DataIoError::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(diagnostics)
}

/// Writes records in order; values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DataIoError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut writer = csv::Writer::from_writer(io::BufWriter::new(file));
    let to_io = |e: csv::Error| io_error(path, io::Error::other(e));
    writer.write_record(csv_header()).map_err(to_io)?;
    for r in &dataset.records {
        let row = r
            .features
            .values()
            .iter()
            .map(|v| v.to_string())
            .chain(std::iter::once(r.grade.index().to_string()));
        writer.write_record(row).map_err(to_io)?;
    }
    writer.flush().map_err(|e| io_error(path, e))?;
    Ok(())
}

/// Binary relabeling of grades.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// R0 (negative) against R1 (positive); R2 and R3 are dropped.
    R0VsR1,
    /// R0 (negative) against R1, R2 and R3 (positive).
    NodrVsDr,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::R0VsR1, Scenario::NodrVsDr];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::R0VsR1 => "r0_vs_r1",
            Scenario::NodrVsDr => "nodr_vs_dr",
        }
    }

    /// `Some(true)` for positive, `Some(false)` for negative, `None` when
    /// the grade is excluded.
    pub fn label(self, grade: Grade) -> Option<bool> {
        match (self, grade) {
            (_, Grade::R0) => Some(false),
            (Scenario::R0VsR1, Grade::R1) => Some(true),
            (Scenario::R0VsR1, _) => None,
            (Scenario::NodrVsDr, _) => Some(true),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}` (expected r0_vs_r1 or nodr_vs_dr)"))
    }
}

/// Binary dataset for `scenario`: class 1 positive, class 0 negative. Sample
/// ids are the record indices in `data`.
pub fn apply_scenario(data: &Dataset, scenario: Scenario) -> Result<LabeledData, DataIoError> {
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    for (i, r) in data.records.iter().enumerate() {
        if let Some(positive) = scenario.label(r.grade) {
            samples.push(r.features);
            labels.push(usize::from(positive));
            ids.push(i);
        }
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    let reason = if samples.is_empty() {
        Some("no records survive".to_string())
    } else if positives == 0 {
        Some("no positive records".to_string())
    } else if positives == samples.len() {
        Some("no negative records".to_string())
    } else {
        None
    };
    if let Some(reason) = reason {
        return Err(DataIoError::EmptyAfterFilter { scenario, reason });
    }
    Ok(LabeledData::with_ids(samples, labels, ids, 2).expect("binary labels are in range"))
}

/// Assignment of samples to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold of each sample position.
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn test_positions(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_positions(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }
}

/// Seeded stratified k-fold plan over `labels`: within every class, fold
/// counts differ by at most one, and so do total fold sizes.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldPlan, DataIoError> {
    if k < 2 {
        return Err(DataIoError::TooFewSamples {
            k,
            reason: "k must be at least 2".into(),
        });
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    if let Some((class, members)) = by_class
        .iter()
        .enumerate()
        .find(|(_, m)| !m.is_empty() && m.len() < k)
    {
        return Err(DataIoError::TooFewSamples {
            k,
            reason: format!("class {class} has only {} samples", members.len()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut cursor = 0;
    for members in by_class.iter_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            assignment[i] = cursor % k;
            cursor += 1;
        }
    }
    Ok(FoldPlan { k, seed, assignment })
}

/// Splits `labels` positions into (kept, held out) with roughly `fraction`
/// of every class held out. Classes with one sample are never held out.
pub fn stratified_holdout(labels: &[usize], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = Vec::new();
    let mut held = Vec::new();
    for class in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        let n = members.len();
        let take = if n < 2 {
            0
        } else {
            ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
        };
        held.extend_from_slice(&members[..take]);
        kept.extend_from_slice(&members[take..]);
    }
    kept.sort_unstable();
    held.sort_unstable();
    (kept, held)
}

/// Grade proportions of the 1200-image reference population
/// (540 R0, 153 R1, 247 R2, 260 R3).
pub const REFERENCE_PROPORTIONS: [f64; 4] = [540.0 / 1200.0, 153.0 / 1200.0, 247.0 / 1200.0, 260.0 / 1200.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n: usize,
    pub proportions: [f64; 4],
    /// Strength of the grade signal; `0` makes features independent of grade.
    pub separation: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n: 1200,
            proportions: REFERENCE_PROPORTIONS,
            separation: 5.0,
            seed: 0,
        }
    }
}

/// Largest-remainder apportionment of `n` over `proportions`; remainder ties
/// go to the lower index.
pub fn apportion(n: usize, proportions: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = proportions.iter().map(|p| p * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

// Per-grade disease severity in [0, 1]; scaled by `separation`.
const SEVERITY: [f64; 4] = [0.0, 0.6, 0.8, 1.0];

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn sample_features(grade: Grade, separation: f64, rng: &mut ChaCha8Rng) -> FeatureVector {
    let effect = separation * SEVERITY[grade.index() as usize];
    let mut x = [0.0; N_FEATURES];

    x[0] = round6(Beta::new(6.0, 2.0).unwrap().sample(rng));
    let severe_rate = 0.05 + 0.85 * (1.0 - (-0.4 * effect).exp());
    x[1] = if rng.random_bool(severe_rate) { 1.0 } else { 0.0 };

    // Microaneurysms: nested counts, each confidence level keeping a share
    // of the detections at the level below.
    let activity: f64 = Gamma::new(4.0, 0.25).unwrap().sample(rng);
    let ma_rate = (6.0 * activity * (0.5 * effect).exp()).max(1e-9);
    let mut count = Poisson::new(ma_rate).unwrap().sample(rng);
    for slot in x.iter_mut().take(8).skip(2) {
        *slot = count;
        count = Binomial::new(count as u64, 0.7).unwrap().sample(rng) as f64;
    }

    // Exudates: often absent; when present, decaying over confidence levels.
    let present = 0.3 + 0.6 * (1.0 - (-0.3 * effect).exp());
    if rng.random_bool(present) {
        let amount: f64 = Gamma::new(2.0, 0.01 * (0.4 * effect).exp()).unwrap().sample(rng);
        for (j, slot) in x.iter_mut().skip(8).take(9).enumerate() {
            *slot = round6(amount * 0.8f64.powi(j as i32));
        }
    }

    let distance = Normal::new(0.5 + 0.03 * effect, 0.03 + 0.02 * effect).unwrap();
    x[17] = round6(distance.sample(rng).abs());
    let amfm = Normal::new(0.2 + 0.1 * effect, 0.1).unwrap();
    x[18] = round6(amfm.sample(rng).abs());

    validate_feature_vector(&x).expect("generator emits valid features")
}

/// Draws a synthetic cohort with grade counts apportioned from
/// `proportions`. Output depends only on the parameters.
pub fn generate_synthetic(params: &SynthParams) -> Result<Dataset, DataIoError> {
    let sum: f64 = params.proportions.iter().sum();
    if params.proportions.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-6 {
        return Err(DataIoError::BadProportions(format!(
            "{:?} must be non-negative and sum to 1 (sum is {sum})",
            params.proportions
        )));
    }
    if params.n < 4 {
        return Err(DataIoError::BadParameter(format!("n must be at least 4, got {}", params.n)));
    }
    if !(params.separation.is_finite() && params.separation >= 0.0) {
        return Err(DataIoError::BadParameter(format!(
            "separation must be non-negative, got {}",
            params.separation
        )));
    }
    let counts = apportion(params.n, &params.proportions);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut grades: Vec<Grade> = Grade::ALL
        .iter()
        .zip(&counts)
        .flat_map(|(&g, &c)| std::iter::repeat_n(g, c))
        .collect();
    grades.shuffle(&mut rng);
    let records = grades
        .into_iter()
        .map(|grade| GradedRecord {
            features: sample_features(grade, params.separation, &mut rng),
            grade,
        })
        .collect();
    Ok(Dataset {
        records,
        provenance: Provenance::Synthetic(*params),
    })
}
