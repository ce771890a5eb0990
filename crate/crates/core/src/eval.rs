//! Confusion matrices, precision/recall/F-measure with micro and macro
//! aggregation, and the holdout / k-fold evaluation drivers.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::{self, Corpus};
use crate::error::{Error, Result};
use crate::features::{fit_feature_space, vectorize_corpus, FeatureConfig};
use crate::learners::{self, Hyperparams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    /// rows = gold, columns = predicted
    pub counts: Vec<Vec<u64>>,
}

pub fn confusion(gold: &[String], pred: &[String], classes: &[String]) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::LabelLengthMismatch { gold: gold.len(), pred: pred.len() });
    }
    let index = |label: &String| -> Result<usize> {
        classes
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))
    };
    let mut counts = vec![vec![0u64; classes.len()]; classes.len()];
    for (g, p) in gold.iter().zip(pred) {
        counts[index(g)?][index(p)?] += 1;
    }
    Ok(ConfusionMatrix { classes: classes.to_vec(), counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub accuracy: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Per-class precision/recall/F, macro means, micro F from pooled counts,
/// accuracy from the trace. Zero denominators yield 0.
pub fn quality(cm: &ConfusionMatrix) -> QualityReport {
    let k = cm.classes.len();
    let total: u64 = cm.counts.iter().flatten().sum();
    let mut per_class = Vec::with_capacity(k);
    let (mut pooled_tp, mut pooled_fp, mut pooled_fn) = (0u64, 0u64, 0u64);
    for i in 0..k {
        let tp = cm.counts[i][i];
        let fp: u64 = (0..k).filter(|&r| r != i).map(|r| cm.counts[r][i]).sum();
        let fn_: u64 = (0..k).filter(|&c| c != i).map(|c| cm.counts[i][c]).sum();
        pooled_tp += tp;
        pooled_fp += fp;
        pooled_fn += fn_;
        let p = ratio(tp as f64, (tp + fp) as f64);
        let r = ratio(tp as f64, (tp + fn_) as f64);
        per_class.push(ClassMetrics {
            class: cm.classes[i].clone(),
            precision: p,
            recall: r,
            f1: f_measure(p, r),
        });
    }
    let kf = k as f64;
    let macro_precision = per_class.iter().map(|m| m.precision).sum::<f64>() / kf;
    let macro_recall = per_class.iter().map(|m| m.recall).sum::<f64>() / kf;
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / kf;
    let micro_p = ratio(pooled_tp as f64, (pooled_tp + pooled_fp) as f64);
    let micro_r = ratio(pooled_tp as f64, (pooled_tp + pooled_fn) as f64);
    let micro_f1 = f_measure(micro_p, micro_r);
    let accuracy = ratio((0..k).map(|i| cm.counts[i][i]).sum::<u64>() as f64, total as f64);
    QualityReport { per_class, macro_precision, macro_recall, macro_f1, micro_f1, accuracy }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum EvalMethod {
    Holdout { test_permille: u32 },
    Kfold { k: usize },
}

impl EvalMethod {
    pub fn holdout(test_fraction: f64) -> Self {
        EvalMethod::Holdout { test_permille: (test_fraction * 1000.0).round() as u32 }
    }

    pub fn test_fraction(&self) -> Option<f64> {
        match self {
            EvalMethod::Holdout { test_permille } => Some(*test_permille as f64 / 1000.0),
            EvalMethod::Kfold { .. } => None,
        }
    }

    /// Stable textual form used in the CSV (`holdout` or `kfold(5)`).
    pub fn label(&self) -> String {
        match self {
            EvalMethod::Holdout { .. } => "holdout".to_string(),
            EvalMethod::Kfold { k } => format!("kfold({k})"),
        }
    }
}

/// One cell of the experiment matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: learners::Algorithm,
    pub task: String,
    pub size_mb: f64,
    pub eval_method: EvalMethod,
    pub seed: u64,
    pub featurize_s: f64,
    pub train_s: f64,
    pub predict_s: f64,
    pub quality: QualityReport,
    /// quality * size / time, filled by the trade-off layer
    pub performance: Option<f64>,
}

struct FoldOutcome {
    featurize_s: f64,
    train_s: f64,
    predict_s: f64,
    quality: QualityReport,
}

fn evaluate_split(
    train: &Corpus,
    test: &Corpus,
    h: &Hyperparams,
    features: &FeatureConfig,
) -> Result<FoldOutcome> {
    let t0 = Instant::now();
    let space = fit_feature_space(train, features)?;
    let x_train = vectorize_corpus(train, &space);
    let x_test = vectorize_corpus(test, &space);
    let featurize_s = t0.elapsed().as_secs_f64();

    let y_train = train.labels();
    let t1 = Instant::now();
    let model = learners::train(&x_train, &y_train, h)?;
    let train_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let pred = learners::predict(&model, &x_test)?;
    let predict_s = t2.elapsed().as_secs_f64();

    let gold = test.labels();
    // evaluate against the full class set of train+test so gold labels
    // unseen in training still count as errors rather than failures
    let mut classes: Vec<String> = model.classes.clone();
    classes.extend(test.classes().iter().cloned());
    classes.sort();
    classes.dedup();
    let cm = confusion(&gold, &pred, &classes)?;
    Ok(FoldOutcome { featurize_s, train_s, predict_s, quality: quality(&cm) })
}

/// Single 80/20-style holdout evaluation. The feature space is fitted on
/// the training side only.
pub fn evaluate_holdout(
    corpus: &Corpus,
    h: &Hyperparams,
    test_fraction: f64,
    features: &FeatureConfig,
    seed: u64,
    task: &str,
) -> Result<RunRecord> {
    let (train, test) = corpus::holdout_split(corpus, test_fraction, seed)?;
    let out = evaluate_split(&train, &test, h, features)?;
    Ok(RunRecord {
        algorithm: h.algorithm,
        task: task.to_string(),
        size_mb: corpus.total_bytes() as f64 / 1e6,
        eval_method: EvalMethod::holdout(test_fraction),
        seed,
        featurize_s: out.featurize_s,
        train_s: out.train_s,
        predict_s: out.predict_s,
        quality: out.quality,
        performance: None,
    })
}

/// Stratified k-fold evaluation: quality fields are unweighted means over
/// folds, time fields are sums (total compute spent to reach the estimate).
pub fn evaluate_kfold(
    corpus: &Corpus,
    h: &Hyperparams,
    k: usize,
    features: &FeatureConfig,
    seed: u64,
    task: &str,
) -> Result<RunRecord> {
    let folds = corpus::k_folds(corpus, k, seed)?;
    let mut outcomes = Vec::with_capacity(k);
    for (train, test) in &folds {
        outcomes.push(evaluate_split(train, test, h, features)?);
    }
    let quality = mean_quality(&outcomes);
    Ok(RunRecord {
        algorithm: h.algorithm,
        task: task.to_string(),
        size_mb: corpus.total_bytes() as f64 / 1e6,
        eval_method: EvalMethod::Kfold { k },
        seed,
        featurize_s: outcomes.iter().map(|o| o.featurize_s).sum(),
        train_s: outcomes.iter().map(|o| o.train_s).sum(),
        predict_s: outcomes.iter().map(|o| o.predict_s).sum(),
        quality,
        performance: None,
    })
}

fn mean_quality(outcomes: &[FoldOutcome]) -> QualityReport {
    let n = outcomes.len() as f64;
    let mean = |f: &dyn Fn(&QualityReport) -> f64| {
        outcomes.iter().map(|o| f(&o.quality)).sum::<f64>() / n
    };
    // per-class lists are identical across stratified folds
    let classes: Vec<String> =
        outcomes[0].quality.per_class.iter().map(|m| m.class.clone()).collect();
    let per_class = classes
        .iter()
        .enumerate()
        .map(|(i, class)| ClassMetrics {
            class: class.clone(),
            precision: mean(&|q| q.per_class[i].precision),
            recall: mean(&|q| q.per_class[i].recall),
            f1: mean(&|q| q.per_class[i].f1),
        })
        .collect();
    QualityReport {
        per_class,
        macro_precision: mean(&|q| q.macro_precision),
        macro_recall: mean(&|q| q.macro_recall),
        macro_f1: mean(&|q| q.macro_f1),
        micro_f1: mean(&|q| q.micro_f1),
        accuracy: mean(&|q| q.accuracy),
    }
}
