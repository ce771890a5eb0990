//! Multinomial Naive Bayes over TF-IDF values treated as counts.

use crate::features::SparseVector;

#[derive(Debug, Clone)]
pub struct NbModel {
    pub log_prior: Vec<f64>,
    /// per class, per feature: ln((count + s) / (total + s * V))
    pub log_likelihood: Vec<Vec<f64>>,
}

pub fn fit(
    x: &[SparseVector],
    y_idx: &[u32],
    n_classes: usize,
    dimension: usize,
    smoothing: f64,
) -> NbModel {
    let mut counts = vec![vec![0.0f64; dimension]; n_classes];
    let mut class_docs = vec![0usize; n_classes];
    for (v, &c) in x.iter().zip(y_idx) {
        class_docs[c as usize] += 1;
        for &(i, value) in &v.entries {
            counts[c as usize][i as usize] += value;
        }
    }
    let n = x.len() as f64;
    let log_prior: Vec<f64> =
        class_docs.iter().map(|&d| (d as f64 / n).ln()).collect();
    let log_likelihood = counts
        .into_iter()
        .map(|class_counts| {
            let total: f64 = class_counts.iter().sum();
            let denom = total + smoothing * dimension as f64;
            class_counts.into_iter().map(|c| ((c + smoothing) / denom).ln()).collect()
        })
        .collect();
    NbModel { log_prior, log_likelihood }
}

impl NbModel {
    pub fn scores(&self, v: &SparseVector) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(&prior, ll)| {
                prior
                    + v.entries
                        .iter()
                        .map(|&(i, value)| value * ll[i as usize])
                        .sum::<f64>()
            })
            .collect()
    }
}
