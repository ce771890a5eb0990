//! Sparse TF-IDF bag-of-words features over a capped vocabulary.
//!
//! The feature space is always fitted on training data only; vectorizing a
//! test document simply drops out-of-vocabulary tokens.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_FEATURES: usize = 50_000;
pub const DEFAULT_MIN_DF: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub max_features: usize,
    pub min_df: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { max_features: DEFAULT_MAX_FEATURES, min_df: DEFAULT_MIN_DF }
    }
}

#[derive(Debug, Clone)]
pub struct FeatureSpace {
    terms: Vec<String>,
    index_of: HashMap<String, usize>,
    idf: Vec<f64>,
}

impl FeatureSpace {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index_of.get(term).copied()
    }

    pub fn idf(&self, index: usize) -> f64 {
        self.idf[index]
    }
}

/// Sorted sparse vector; values finite and non-zero, indices strictly
/// increasing and below `dimension`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub entries: Vec<(u32, f64)>,
    pub dimension: usize,
}

impl SparseVector {
    pub fn empty(dimension: usize) -> Self {
        SparseVector { entries: Vec::new(), dimension }
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ai, av) = self.entries[i];
            let (bi, bv) = other.entries[j];
            match ai.cmp(&bi) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += av * bv;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }
}

/// Lowercase, split on runs of non-alphanumeric characters, drop tokens
/// shorter than 2 characters. No stemming, no stopword removal.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(String::from)
        .collect()
}

/// Fit the vocabulary and idf table on a corpus.
///
/// Terms with df >= min_df are ranked by descending document frequency
/// (ties lexicographic), truncated to max_features, then stored in
/// lexicographic order. idf = ln((1+N)/(1+df)) + 1.
pub fn fit_feature_space(corpus: &Corpus, config: &FeatureConfig) -> Result<FeatureSpace> {
    assert!(config.max_features >= 1 && config.min_df >= 1);
    let mut df: HashMap<String, usize> = HashMap::new();
    for doc in corpus.documents() {
        let mut tokens = tokenize(&doc.text);
        tokens.sort_unstable();
        tokens.dedup();
        for tok in tokens {
            *df.entry(tok).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> =
        df.into_iter().filter(|(_, n)| *n >= config.min_df).collect();
    if ranked.is_empty() {
        return Err(Error::EmptyFeatureSpace);
    }
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(config.max_features);
    ranked.sort_by(|a, b| a.0.cmp(&b.0));

    let n = corpus.len() as f64;
    let mut terms = Vec::with_capacity(ranked.len());
    let mut idf = Vec::with_capacity(ranked.len());
    let mut index_of = HashMap::with_capacity(ranked.len());
    for (i, (term, d)) in ranked.into_iter().enumerate() {
        idf.push(((1.0 + n) / (1.0 + d as f64)).ln() + 1.0);
        index_of.insert(term.clone(), i);
        terms.push(term);
    }
    Ok(FeatureSpace { terms, index_of, idf })
}

/// TF-IDF vector for one document body, L2-normalized. Fully
/// out-of-vocabulary documents map to the empty vector.
pub fn vectorize(text: &str, space: &FeatureSpace) -> SparseVector {
    let mut tf: HashMap<usize, f64> = HashMap::new();
    for tok in tokenize(text) {
        if let Some(i) = space.index_of(&tok) {
            *tf.entry(i).or_insert(0.0) += 1.0;
        }
    }
    if tf.is_empty() {
        return SparseVector::empty(space.dimension());
    }
    let mut entries: Vec<(u32, f64)> =
        tf.into_iter().map(|(i, f)| (i as u32, f * space.idf(i))).collect();
    entries.sort_unstable_by_key(|(i, _)| *i);
    let norm = entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    for (_, v) in entries.iter_mut() {
        *v /= norm;
    }
    SparseVector { entries, dimension: space.dimension() }
}

/// Vectorize every document of a corpus.
pub fn vectorize_corpus(corpus: &Corpus, space: &FeatureSpace) -> Vec<SparseVector> {
    corpus.documents().iter().map(|d| vectorize(&d.text, space)).collect()
}
