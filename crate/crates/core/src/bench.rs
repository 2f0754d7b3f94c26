//! Repeated stratified k-fold cross-validation of the classifier.
//!
//! Repeat `r` uses folds drawn with seed `splitmix64(seed ^ r)`. Each
//! (repeat, fold) cell rebuilds the training graph from the out-of-fold rows
//! only (normalization statistics and ε included) and classifies the in-fold
//! rows one at a time against it.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    load_csv, make_folds, Dataset, FoldPlan, LoadOptions, NormalizationPolicy, Normalizer,
};
use crate::error::Result;
use crate::hlclass::{ClassifierConfig, HighLevelClassifier, Insertion, Scoring};
use crate::netbuild::{ConstructionConfig, Method};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Display name of the dataset in reports.
    pub dataset: String,
    pub data: PathBuf,
    pub load: LoadOptions,
    pub normalization: NormalizationPolicy,
    pub construction: ConstructionConfig,
    pub use_priors: bool,
    #[serde(default)]
    pub insertion: Insertion,
    #[serde(default)]
    pub scoring: Scoring,
    pub fold_count: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(
        dataset: impl Into<String>,
        data: impl Into<PathBuf>,
        load: LoadOptions,
        construction: ConstructionConfig,
        seed: u64,
    ) -> Self {
        Self {
            dataset: dataset.into(),
            data: data.into(),
            load,
            normalization: NormalizationPolicy::None,
            construction,
            use_priors: true,
            insertion: Insertion::default(),
            scoring: Scoring::default(),
            fold_count: 10,
            repeats: 10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(crate::Error::InvalidConfig(
                "repeats must be at least 1".into(),
            ));
        }
        if self.fold_count < 2 {
            return Err(crate::Error::InvalidConfig(
                "fold count must be at least 2".into(),
            ));
        }
        self.classifier_config().validate()
    }

    pub fn classifier_config(&self) -> ClassifierConfig {
        ClassifierConfig {
            use_priors: self.use_priors,
            insertion: self.insertion,
            scoring: self.scoring,
            ..ClassifierConfig::new(self.construction)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub repeat: usize,
    pub fold: usize,
    pub n_test: usize,
    pub n_correct: usize,
    /// `None` when the cell errored.
    pub accuracy: Option<f64>,
    pub epsilon: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub spec: ExperimentSpec,
    /// One entry per (repeat, fold), repeat-major.
    pub folds: Vec<FoldOutcome>,
    pub mean: Option<f64>,
    /// Sample standard deviation over the valid fold accuracies.
    pub std: Option<f64>,
    pub errored_folds: usize,
    pub wall_time_secs: f64,
}

impl EvalReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.folds.iter().filter_map(|f| f.accuracy).collect()
    }

    /// Mean and std as percentages, `"95.56 ± 10.18"`.
    pub fn accuracy_cell(&self) -> String {
        match (self.mean, self.std) {
            (Some(m), Some(s)) => format!("{:.2} ± {:.2}", 100.0 * m, 100.0 * s),
            _ => format!(
                "error ({}/{} folds failed)",
                self.errored_folds,
                self.folds.len()
            ),
        }
    }

    /// JSON without the timing field, for byte-level comparisons.
    pub fn to_json_untimed(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&untimed(self)?)?)
    }
}

fn untimed(r: &EvalReport) -> Result<serde_json::Value> {
    let mut v = serde_json::to_value(r)?;
    if let Some(o) = v.as_object_mut() {
        o.remove("wall_time_secs");
    }
    Ok(v)
}

/// A JSON array of reports, optionally without their timing fields.
pub fn reports_to_json(reports: &[EvalReport], timed: bool) -> Result<String> {
    let text = if timed {
        serde_json::to_string_pretty(reports)?
    } else {
        let values: Vec<serde_json::Value> = reports.iter().map(untimed).collect::<Result<_>>()?;
        serde_json::to_string_pretty(&values)?
    };
    Ok(text + "\n")
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fold_seed(seed: u64, repeat: usize) -> u64 {
    splitmix64(seed ^ repeat as u64)
}

pub fn mean_and_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, std))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<EvalReport> {
    let d = load_csv(&spec.data, &spec.load)?;
    evaluate(&d, spec)
}

/// Cross-validates on an already loaded dataset (`spec.data` is only echoed).
pub fn evaluate(d: &Dataset, spec: &ExperimentSpec) -> Result<EvalReport> {
    spec.validate()?;
    let started = Instant::now();
    let plans: Vec<FoldPlan> = (0..spec.repeats)
        .map(|r| make_folds(d, spec.fold_count, fold_seed(spec.seed, r)))
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (0..spec.repeats)
        .flat_map(|r| (0..spec.fold_count).map(move |f| (r, f)))
        .collect();
    let folds: Vec<FoldOutcome> = cells
        .par_iter()
        .map(|&(r, f)| run_cell(d, spec, &plans[r], r, f))
        .collect();

    let accs: Vec<f64> = folds.iter().filter_map(|f| f.accuracy).collect();
    let stats = mean_and_std(&accs);
    Ok(EvalReport {
        spec: spec.clone(),
        errored_folds: folds.iter().filter(|f| f.accuracy.is_none()).count(),
        folds,
        mean: stats.map(|s| s.0),
        std: stats.map(|s| s.1),
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

fn run_cell(
    d: &Dataset,
    spec: &ExperimentSpec,
    plan: &FoldPlan,
    repeat: usize,
    fold: usize,
) -> FoldOutcome {
    let test = plan.test_indices(fold);
    let mut out = FoldOutcome {
        repeat,
        fold,
        n_test: test.len(),
        n_correct: 0,
        accuracy: None,
        epsilon: None,
        error: None,
    };
    match score_cell(d, spec, plan, fold, &test) {
        Ok((correct, eps)) => {
            out.n_correct = correct;
            out.accuracy = Some(correct as f64 / test.len() as f64);
            out.epsilon = eps;
        }
        Err(e) => out.error = Some(e),
    }
    out
}

fn score_cell(
    d: &Dataset,
    spec: &ExperimentSpec,
    plan: &FoldPlan,
    fold: usize,
    test: &[usize],
) -> std::result::Result<(usize, Option<f64>), String> {
    if test.is_empty() {
        return Err("empty test fold".into());
    }
    let train = d.subset(&plan.train_indices(fold));
    let present = d.class_counts();
    let kept = train.class_counts();
    if let Some(c) = (0..d.n_classes()).find(|&c| present[c] > 0 && kept[c] == 0) {
        return Err(format!("training split lost class {}", d.class_names()[c]));
    }
    let normalizer = Normalizer::fit(&train, spec.normalization);
    let train = normalizer.apply(&train);
    let clf =
        HighLevelClassifier::fit(&train, spec.classifier_config()).map_err(|e| e.to_string())?;
    if cfg!(debug_assertions) {
        assert_no_leakage(clf.network().graph.instances(), test);
    }
    let mut correct = 0;
    for &t in test {
        let x = normalizer.apply_row(d.row(t));
        let r = clf.classify(&x).map_err(|e| e.to_string())?;
        if r.predicted == d.label(t) {
            correct += 1;
        }
    }
    Ok((correct, clf.network().epsilon.map(|e| e.value)))
}

/// Panics if any test index appears among the training graph's instances.
pub fn assert_no_leakage(node_instances: &[Option<usize>], test: &[usize]) {
    for inst in node_instances.iter().flatten() {
        assert!(
            test.binary_search(inst).is_err(),
            "test instance {inst} leaked into the training graph"
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub dataset: String,
    pub method: Method,
    pub k: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub accuracy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub reports: Vec<EvalReport>,
}

/// Label in the "Prediction" column of comparison tables.
pub const PREDICTION_LABEL: &str = "BC-perturbation";

impl ComparisonRow {
    fn from_report(r: &EvalReport) -> Self {
        Self {
            dataset: r.spec.dataset.clone(),
            method: r.spec.construction.method,
            k: r.spec.construction.k,
            mean: r.mean,
            std: r.std,
            accuracy: r.accuracy_cell(),
        }
    }

    pub fn building(&self) -> String {
        format!("{} ({})", self.method, self.k)
    }
}

pub fn compare(specs: &[ExperimentSpec]) -> Result<Comparison> {
    if specs.len() < 2 {
        return Err(crate::Error::InvalidConfig(
            "compare needs at least two experiments".into(),
        ));
    }
    let reports: Vec<EvalReport> = specs.iter().map(run_experiment).collect::<Result<_>>()?;
    Ok(Comparison::from_reports(reports))
}

impl Comparison {
    pub fn from_reports(mut reports: Vec<EvalReport>) -> Self {
        reports.sort_by(|a, b| {
            let key = |r: &EvalReport| {
                (
                    r.spec.dataset.clone(),
                    r.spec.construction.method.key(),
                    r.spec.construction.k,
                )
            };
            key(a).cmp(&key(b))
        });
        Self {
            rows: reports.iter().map(ComparisonRow::from_report).collect(),
            reports,
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut s =
            String::from("| Dataset | Prediction | Building (k) | Accuracy |\n|---|---|---|---|\n");
        for r in &self.rows {
            s.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                r.dataset,
                PREDICTION_LABEL,
                r.building(),
                r.accuracy
            ));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("dataset,method,k,mean,std\n");
        for r in &self.rows {
            let f = |v: Option<f64>| v.map_or(String::new(), |v| format!("{:.2}", 100.0 * v));
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.dataset,
                r.method.key(),
                r.k,
                f(r.mean),
                f(r.std)
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{toy, ColumnRef};

    fn spec(method: Method, k: usize, folds: usize, repeats: usize, seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            fold_count: folds,
            repeats,
            ..ExperimentSpec::new(
                "toy",
                "toy.csv",
                LoadOptions::new(ColumnRef::Index(0)),
                ConstructionConfig::new(method, k),
                seed,
            )
        }
    }

    #[test]
    fn tiny_run_is_deterministic() {
        let d = toy(&[&[0.0], &[0.5], &[10.0], &[10.5]], &[0, 0, 1, 1]);
        let s = spec(Method::KnnOnly, 1, 2, 1, 5);
        let a = evaluate(&d, &s).unwrap();
        let b = evaluate(&d, &s).unwrap();
        assert_eq!(a.to_json_untimed().unwrap(), b.to_json_untimed().unwrap());
        assert_eq!(a.folds.len(), 2);
        assert_eq!(a.errored_folds, 0);
        assert_eq!(a.mean, Some(1.0));
    }

    #[test]
    fn lost_class_is_flagged() {
        // class 1 has a single member; the fold that tests it loses the class
        let d = toy(&[&[0.0], &[0.1], &[0.2], &[0.3], &[9.0]], &[0, 0, 0, 0, 1]);
        let r = evaluate(&d, &spec(Method::KnnOnly, 1, 2, 3, 1)).unwrap();
        assert_eq!(r.folds.len(), 6);
        assert_eq!(r.errored_folds, 3);
        assert!(r.folds.iter().filter(|f| f.error.is_some()).all(|f| f
            .error
            .as_ref()
            .unwrap()
            .contains("lost class")));
        let accs = r.accuracies();
        assert_eq!(accs.len(), 3);
        assert_eq!(r.mean, mean_and_std(&accs).map(|m| m.0));
    }

    #[test]
    fn stats() {
        let (m, s) = mean_and_std(&[0.5, 1.0, 1.0, 0.5]).unwrap();
        assert_eq!(m, 0.75);
        assert!((s - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_std(&[0.9]), Some((0.9, 0.0)));
        assert_eq!(mean_and_std(&[]), None);
    }

    #[test]
    fn seed_mixing_differs_per_repeat() {
        assert_ne!(fold_seed(42, 0), fold_seed(42, 1));
        assert_eq!(fold_seed(42, 3), fold_seed(42, 3));
    }

    #[test]
    fn invalid_specs() {
        let d = toy(&[&[0.0], &[1.0]], &[0, 1]);
        assert!(evaluate(&d, &spec(Method::KnnOnly, 1, 2, 0, 0)).is_err());
        assert!(evaluate(&d, &spec(Method::KnnOnly, 1, 1, 1, 0)).is_err());
        assert!(evaluate(&d, &spec(Method::KnnOnly, 0, 2, 1, 0)).is_err());
    }

    #[test]
    fn error_row_rendering() {
        let d = toy(&[&[0.0], &[0.1], &[9.0]], &[0, 0, 1]);
        let all_bad = evaluate(&d, &spec(Method::KnnOnly, 1, 3, 1, 0)).unwrap();
        let spread = toy(
            &[
                &[0.0],
                &[0.5],
                &[1.1],
                &[1.8],
                &[2.6],
                &[3.5],
                &[20.0],
                &[20.5],
                &[21.1],
                &[21.8],
                &[22.6],
                &[23.5],
            ],
            &[0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1],
        );
        let ok = evaluate(&spread, &spec(Method::AttributeMeta, 1, 2, 1, 0)).unwrap();
        // one of the three folds holds the lone class-1 row; the others test class 0
        assert!(all_bad.errored_folds >= 1);
        let mut broken = all_bad.clone();
        broken.folds.iter_mut().for_each(|f| f.accuracy = None);
        broken.mean = None;
        broken.std = None;
        broken.errored_folds = 3;
        let table = Comparison::from_reports(vec![ok, broken]);
        let md = table.to_markdown();
        assert!(md.contains("error (3/3 folds failed)"), "{md}");
        assert!(md.contains("100.00 ± 0.00"), "{md}");
        assert!(!table.to_csv().contains("0.00,0.00\ntoy,knn,"));
    }

    #[test]
    fn leakage_check_panics() {
        let result =
            std::panic::catch_unwind(|| assert_no_leakage(&[Some(1), Some(4), None], &[2, 4]));
        assert!(result.is_err());
        assert_no_leakage(&[Some(1), Some(3), None], &[2, 4]);
    }
}
