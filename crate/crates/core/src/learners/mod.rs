//! Six supervised classifiers behind one train/predict contract.
//!
//! All training procedures are deterministic given the seed in
//! `Hyperparams`; every tie (argmax scores, votes, nearest-neighbor
//! similarity) resolves to the lexicographically smallest class so repeated
//! runs are bit-identical.

mod knn;
mod linear;
mod nb;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "NB")]
    Nb,
    #[serde(rename = "LR")]
    Lr,
    #[serde(rename = "SVM")]
    Svm,
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "DT")]
    Dt,
    #[serde(rename = "RF")]
    Rf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Nb, Algorithm::Lr, Algorithm::Svm, Algorithm::Knn, Algorithm::Dt, Algorithm::Rf];

    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Nb => "NB",
            Algorithm::Lr => "LR",
            Algorithm::Svm => "SVM",
            Algorithm::Knn => "KNN",
            Algorithm::Dt => "DT",
            Algorithm::Rf => "RF",
        }
    }

    pub fn parse(s: &str) -> Result<Algorithm> {
        match s.to_ascii_uppercase().as_str() {
            "NB" => Ok(Algorithm::Nb),
            "LR" => Ok(Algorithm::Lr),
            "SVM" => Ok(Algorithm::Svm),
            "KNN" => Ok(Algorithm::Knn),
            "DT" => Ok(Algorithm::Dt),
            "RF" => Ok(Algorithm::Rf),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub algorithm: Algorithm,
    pub l2_lambda: f64,
    pub epochs: usize,
    pub learning_rate0: f64,
    pub k_neighbors: usize,
    pub max_depth: usize,
    pub dt_max_features: usize,
    pub num_trees: usize,
    pub smoothing: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            algorithm: Algorithm::Nb,
            l2_lambda: 1e-4,
            epochs: 5,
            learning_rate0: 0.1,
            k_neighbors: 5,
            max_depth: 20,
            dt_max_features: 1000,
            num_trees: 10,
            smoothing: 1.0,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        Hyperparams { algorithm, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("l2_lambda", self.l2_lambda),
            ("learning_rate0", self.learning_rate0),
            ("smoothing", self.smoothing),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidTrainingInput(format!("{name} must be positive")));
            }
        }
        if self.k_neighbors == 0 || self.max_depth == 0 || self.dt_max_features == 0
            || self.num_trees == 0
        {
            return Err(Error::InvalidTrainingInput(
                "k_neighbors, max_depth, dt_max_features and num_trees must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    pub classes: Vec<String>,
    pub dimension: usize,
    kind: ModelKind,
}

#[derive(Debug, Clone)]
enum ModelKind {
    NaiveBayes(nb::NbModel),
    Linear(linear::LinearModel),
    Knn(knn::KnnModel),
    Forest(tree::ForestModel),
}

/// Train a model on sparse vectors and string labels.
pub fn train(x: &[SparseVector], y: &[String], h: &Hyperparams) -> Result<TrainedModel> {
    h.validate()?;
    if x.is_empty() {
        return Err(Error::InvalidTrainingInput("empty training set".into()));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidTrainingInput(format!(
            "{} vectors but {} labels",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidTrainingInput("need at least 2 training examples".into()));
    }
    let mut classes: Vec<String> = y.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidTrainingInput("need at least 2 classes".into()));
    }
    let dimension = x[0].dimension;
    for v in x {
        if v.dimension != dimension {
            return Err(Error::DimensionMismatch { got: v.dimension, expected: dimension });
        }
    }
    // class indices follow the sorted class list, so index order is
    // lexicographic order and first-max argmax is the lexicographic tie-break
    let y_idx: Vec<u32> = y
        .iter()
        .map(|label| classes.binary_search(label).unwrap() as u32)
        .collect();
    let n_classes = classes.len();
    let mut rng = SplitMix64::new(h.seed);

    let kind = match h.algorithm {
        Algorithm::Nb => ModelKind::NaiveBayes(nb::fit(x, &y_idx, n_classes, dimension, h.smoothing)),
        Algorithm::Lr => {
            ModelKind::Linear(linear::fit_logistic(x, &y_idx, n_classes, dimension, h, &mut rng))
        }
        Algorithm::Svm => {
            ModelKind::Linear(linear::fit_svm(x, &y_idx, n_classes, dimension, h, &mut rng))
        }
        Algorithm::Knn => ModelKind::Knn(knn::fit(x, &y_idx, dimension, h.k_neighbors)),
        Algorithm::Dt => ModelKind::Forest(tree::fit_decision_tree(x, &y_idx, n_classes, dimension, h)),
        Algorithm::Rf => {
            ModelKind::Forest(tree::fit_random_forest(x, &y_idx, n_classes, dimension, h, &mut rng))
        }
    };
    Ok(TrainedModel { algorithm: h.algorithm, classes, dimension, kind })
}

/// Predict labels for a batch of vectors.
pub fn predict(model: &TrainedModel, x: &[SparseVector]) -> Result<Vec<String>> {
    for v in x {
        if v.dimension != model.dimension {
            return Err(Error::DimensionMismatch { got: v.dimension, expected: model.dimension });
        }
    }
    let n_classes = model.classes.len();
    let class_indices: Vec<u32> = match &model.kind {
        ModelKind::NaiveBayes(m) => x.iter().map(|v| argmax(&m.scores(v))).collect(),
        ModelKind::Linear(m) => x.iter().map(|v| argmax(&m.scores(v))).collect(),
        ModelKind::Knn(m) => m.predict_batch(x, n_classes),
        ModelKind::Forest(m) => x.iter().map(|v| m.predict(v)).collect(),
    };
    Ok(class_indices.iter().map(|&c| model.classes[c as usize].clone()).collect())
}

/// First index attaining the maximum; with classes in sorted order this is
/// the lexicographically smallest class among ties.
pub(crate) fn argmax(scores: &[f64]) -> u32 {
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best as u32
}

#[cfg(test)]
pub(crate) fn scores_for_test(model: &TrainedModel, v: &SparseVector) -> Vec<f64> {
    match &model.kind {
        ModelKind::NaiveBayes(m) => m.scores(v),
        ModelKind::Linear(m) => m.scores(v),
        _ => panic!("scores only available for NB and linear models"),
    }
}
