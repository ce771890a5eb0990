//! k-nearest neighbors over cosine similarity.
//!
//! Training builds an inverted index over the stored vectors; prediction
//! accumulates similarities along postings lists, which exploits sparsity
//! instead of scanning every stored vector per query. Vectors are
//! L2-normalized by construction, so the dot product is the cosine.

use crate::features::SparseVector;
use crate::learners::argmax;

#[derive(Debug, Clone)]
pub struct KnnModel {
    labels: Vec<u32>,
    k: usize,
    /// per feature: (training doc index, value)
    postings: Vec<Vec<(u32, f64)>>,
}

pub fn fit(x: &[SparseVector], y_idx: &[u32], dimension: usize, k: usize) -> KnnModel {
    let mut postings: Vec<Vec<(u32, f64)>> = vec![Vec::new(); dimension];
    for (doc, v) in x.iter().enumerate() {
        for &(i, value) in &v.entries {
            postings[i as usize].push((doc as u32, value));
        }
    }
    KnnModel { labels: y_idx.to_vec(), k, postings }
}

impl KnnModel {
    pub fn predict_batch(&self, queries: &[SparseVector], n_classes: usize) -> Vec<u32> {
        let n = self.labels.len();
        let mut sims = vec![0.0f64; n];
        let mut stamp = vec![0u32; n];
        let mut generation = 0u32;
        let mut touched: Vec<u32> = Vec::new();
        queries
            .iter()
            .map(|q| {
                generation += 1;
                touched.clear();
                for &(feat, qv) in &q.entries {
                    for &(doc, tv) in &self.postings[feat as usize] {
                        let d = doc as usize;
                        if stamp[d] != generation {
                            stamp[d] = generation;
                            sims[d] = 0.0;
                            touched.push(doc);
                        }
                        sims[d] += qv * tv;
                    }
                }
                self.vote(&mut touched, &sims, &stamp, generation, n_classes)
            })
            .collect()
    }

    fn vote(
        &self,
        touched: &mut Vec<u32>,
        sims: &[f64],
        stamp: &[u32],
        generation: u32,
        n_classes: usize,
    ) -> u32 {
        let n = self.labels.len();
        let k = self.k.min(n);
        // similarity descending, then lower training index
        let by_sim = |a: &u32, b: &u32| {
            sims[*b as usize]
                .partial_cmp(&sims[*a as usize])
                .unwrap()
                .then_with(|| a.cmp(b))
        };
        let neighbors: Vec<u32> = if touched.len() >= k {
            touched.select_nth_unstable_by(k - 1, by_sim);
            let mut top: Vec<u32> = touched[..k].to_vec();
            top.sort_unstable_by(by_sim);
            top
        } else {
            // fewer candidates with nonzero similarity than k: pad with
            // zero-similarity vectors in training-index order
            let mut top: Vec<u32> = touched.to_vec();
            top.sort_unstable_by(by_sim);
            let mut doc = 0u32;
            while top.len() < k {
                if stamp[doc as usize] != generation {
                    top.push(doc);
                }
                doc += 1;
            }
            top
        };
        let mut votes = vec![0.0f64; n_classes];
        for &doc in &neighbors {
            votes[self.labels[doc as usize] as usize] += 1.0;
        }
        argmax(&votes)
    }
}
