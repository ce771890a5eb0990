//! CART decision trees and random forests with Gini impurity.
//!
//! Candidate features are capped to the most document-frequent ones, which
//! keeps split search tractable on sparse text. Splits are binary,
//! `value > threshold`, with thresholds at midpoints of adjacent distinct
//! observed values.

use crate::features::SparseVector;
use crate::learners::{argmax, Hyperparams};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq)]
enum TreeNode {
    Leaf { class: u32 },
    /// left: value <= threshold, right: value > threshold
    Split { feature: u32, threshold: f64, left: u32, right: u32 },
}

impl Tree {
    pub fn predict(&self, v: &SparseVector) -> u32 {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                TreeNode::Leaf { class } => return *class,
                TreeNode::Split { feature, threshold, left, right } => {
                    let value = feature_value(v, *feature);
                    node = if value > *threshold { *right as usize } else { *left as usize };
                }
            }
        }
    }
}

fn feature_value(v: &SparseVector, feature: u32) -> f64 {
    match v.entries.binary_search_by_key(&feature, |(i, _)| *i) {
        Ok(pos) => v.entries[pos].1,
        Err(_) => 0.0,
    }
}

#[derive(Debug, Clone)]
pub struct ForestModel {
    trees: Vec<Tree>,
    n_classes: usize,
}

impl ForestModel {
    pub fn predict(&self, v: &SparseVector) -> u32 {
        let mut votes = vec![0.0f64; self.n_classes];
        for tree in &self.trees {
            votes[tree.predict(v) as usize] += 1.0;
        }
        argmax(&votes)
    }
}

/// The dt_max_features most document-frequent features, ties toward lower
/// feature index.
fn candidate_features(x: &[SparseVector], dimension: usize, cap: usize) -> Vec<u32> {
    let mut df = vec![0u32; dimension];
    for v in x {
        for &(i, _) in &v.entries {
            df[i as usize] += 1;
        }
    }
    let mut features: Vec<u32> = (0..dimension as u32).filter(|&f| df[f as usize] > 0).collect();
    features.sort_by(|a, b| df[*b as usize].cmp(&df[*a as usize]).then_with(|| a.cmp(b)));
    features.truncate(cap);
    features
}

pub(crate) struct TreeOptions<'a> {
    pub max_depth: usize,
    pub candidate_features: &'a [u32],
    /// when set, each split draws this many candidates from the pool
    pub features_per_split: Option<usize>,
    pub n_classes: usize,
}

pub(crate) fn build_tree(
    x: &[SparseVector],
    y_idx: &[u32],
    samples: Vec<u32>,
    opts: &TreeOptions<'_>,
    rng: &mut SplitMix64,
) -> Tree {
    let mut nodes = Vec::new();
    grow(x, y_idx, samples, 0, opts, rng, &mut nodes);
    Tree { nodes }
}

fn majority(y_idx: &[u32], samples: &[u32], n_classes: usize) -> u32 {
    let mut counts = vec![0.0f64; n_classes];
    for &s in samples {
        counts[y_idx[s as usize] as usize] += 1.0;
    }
    argmax(&counts)
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

fn grow(
    x: &[SparseVector],
    y_idx: &[u32],
    samples: Vec<u32>,
    depth: usize,
    opts: &TreeOptions<'_>,
    rng: &mut SplitMix64,
    nodes: &mut Vec<TreeNode>,
) -> u32 {
    let id = nodes.len() as u32;
    nodes.push(TreeNode::Leaf { class: 0 }); // placeholder
    let pure = samples.windows(2).all(|w| y_idx[w[0] as usize] == y_idx[w[1] as usize]);
    if depth >= opts.max_depth || samples.len() < 2 || pure {
        nodes[id as usize] = TreeNode::Leaf { class: majority(y_idx, &samples, opts.n_classes) };
        return id;
    }

    let drawn;
    let features: &[u32] = match opts.features_per_split {
        Some(m) => {
            let m = m.min(opts.candidate_features.len());
            let picked = rng.sample_indices(opts.candidate_features.len(), m);
            drawn = picked.into_iter().map(|i| opts.candidate_features[i]).collect::<Vec<_>>();
            &drawn
        }
        None => opts.candidate_features,
    };

    let mut class_counts = vec![0usize; opts.n_classes];
    for &s in &samples {
        class_counts[y_idx[s as usize] as usize] += 1;
    }
    let n = samples.len();
    let parent_gini = gini(&class_counts, n);

    let mut best: Option<(f64, u32, f64)> = None; // (gain, feature, threshold)
    let mut values: Vec<(f64, u32)> = Vec::with_capacity(n);
    for &feature in features {
        values.clear();
        values.extend(
            samples.iter().map(|&s| (feature_value(&x[s as usize], feature), y_idx[s as usize])),
        );
        values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut left_counts = vec![0usize; opts.n_classes];
        let mut left_n = 0usize;
        for i in 0..n - 1 {
            left_counts[values[i].1 as usize] += 1;
            left_n += 1;
            if values[i + 1].0 <= values[i].0 {
                continue;
            }
            let threshold = (values[i].0 + values[i + 1].0) / 2.0;
            let right_counts: Vec<usize> =
                class_counts.iter().zip(&left_counts).map(|(&c, &l)| c - l).collect();
            let weighted = (left_n as f64 * gini(&left_counts, left_n)
                + (n - left_n) as f64 * gini(&right_counts, n - left_n))
                / n as f64;
            let gain = parent_gini - weighted;
            if gain > best.map_or(1e-12, |(g, _, _)| g) {
                best = Some((gain, feature, threshold));
            }
        }
    }

    let Some((_, feature, threshold)) = best else {
        nodes[id as usize] = TreeNode::Leaf { class: majority(y_idx, &samples, opts.n_classes) };
        return id;
    };
    let (left_samples, right_samples): (Vec<u32>, Vec<u32>) = samples
        .into_iter()
        .partition(|&s| feature_value(&x[s as usize], feature) <= threshold);
    let left = grow(x, y_idx, left_samples, depth + 1, opts, rng, nodes);
    let right = grow(x, y_idx, right_samples, depth + 1, opts, rng, nodes);
    nodes[id as usize] = TreeNode::Split { feature, threshold, left, right };
    id
}

pub fn fit_decision_tree(
    x: &[SparseVector],
    y_idx: &[u32],
    n_classes: usize,
    dimension: usize,
    h: &Hyperparams,
) -> ForestModel {
    let candidates = candidate_features(x, dimension, h.dt_max_features);
    let opts = TreeOptions {
        max_depth: h.max_depth,
        candidate_features: &candidates,
        features_per_split: None,
        n_classes,
    };
    let mut rng = SplitMix64::new(h.seed);
    let samples: Vec<u32> = (0..x.len() as u32).collect();
    let tree = build_tree(x, y_idx, samples, &opts, &mut rng);
    ForestModel { trees: vec![tree], n_classes }
}

pub fn fit_random_forest(
    x: &[SparseVector],
    y_idx: &[u32],
    n_classes: usize,
    dimension: usize,
    h: &Hyperparams,
    rng: &mut SplitMix64,
) -> ForestModel {
    let candidates = candidate_features(x, dimension, h.dt_max_features);
    let per_split = ((h.dt_max_features as f64).sqrt().floor() as usize).max(1);
    let opts = TreeOptions {
        max_depth: h.max_depth,
        candidate_features: &candidates,
        features_per_split: Some(per_split),
        n_classes,
    };
    let n = x.len();
    let trees = (0..h.num_trees)
        .map(|_| {
            let samples: Vec<u32> =
                (0..n).map(|_| rng.next_below(n as u64) as u32).collect();
            build_tree(x, y_idx, samples, &opts, rng)
        })
        .collect();
    ForestModel { trees, n_classes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(values: &[f64]) -> SparseVector {
        SparseVector {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i as u32, *v))
                .collect(),
            dimension: values.len(),
        }
    }

    fn toy() -> (Vec<SparseVector>, Vec<u32>) {
        let x = vec![
            dense(&[0.9, 0.1, 0.0]),
            dense(&[0.8, 0.3, 0.2]),
            dense(&[0.1, 0.9, 0.0]),
            dense(&[0.2, 0.8, 0.1]),
            dense(&[0.15, 0.7, 0.3]),
            dense(&[0.85, 0.2, 0.4]),
        ];
        let y = vec![0, 0, 1, 1, 1, 0];
        (x, y)
    }

    #[test]
    fn brute_force_tree_oracle_on_toy_points() {
        // exhaustive check: a depth-1 stump on feature 0 at any midpoint in
        // (0.2, 0.8) separates the toy data; the builder must reach accuracy 1
        let (x, y) = toy();
        let h = Hyperparams::default();
        let model = fit_decision_tree(&x, &y, 2, 3, &h);
        for (v, &label) in x.iter().zip(&y) {
            assert_eq!(model.predict(v), label);
        }
    }

    #[test]
    fn single_tree_forest_without_bootstrap_equals_dt() {
        let (x, y) = toy();
        let candidates = candidate_features(&x, 3, 1000);
        let opts = TreeOptions {
            max_depth: 20,
            candidate_features: &candidates,
            features_per_split: None,
            n_classes: 2,
        };
        let mut rng = SplitMix64::new(0);
        let samples: Vec<u32> = (0..x.len() as u32).collect();
        let forest_tree = build_tree(&x, &y, samples, &opts, &mut rng);
        let h = Hyperparams { seed: 0, ..Hyperparams::default() };
        let dt = fit_decision_tree(&x, &y, 2, 3, &h);
        assert_eq!(dt.trees[0], forest_tree);
    }

    #[test]
    fn candidate_cap_by_document_frequency() {
        let x = vec![
            dense(&[1.0, 1.0, 0.0, 1.0]),
            dense(&[0.0, 1.0, 0.0, 1.0]),
            dense(&[0.0, 1.0, 1.0, 0.0]),
        ];
        // df: f0=1, f1=3, f2=1, f3=2
        assert_eq!(candidate_features(&x, 4, 2), vec![1, 3]);
        assert_eq!(candidate_features(&x, 4, 3), vec![1, 3, 0]);
    }

    #[test]
    fn leaf_tie_breaks_to_smallest_class() {
        // identical feature values, split impossible, 1-1 vote
        let x = vec![dense(&[0.5]), dense(&[0.5])];
        let y = vec![1, 0];
        let h = Hyperparams::default();
        let model = fit_decision_tree(&x, &y, 2, 1, &h);
        assert_eq!(model.predict(&dense(&[0.5])), 0);
    }
}
