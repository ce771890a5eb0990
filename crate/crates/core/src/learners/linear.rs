//! One-vs-rest linear models trained by SGD.
//!
//! LR uses the decaying step eta_t = eta0 / (1 + eta0 * lambda * t) with L2
//! regularization; SVM uses Pegasos-style hinge-loss updates with step
//! 1 / (lambda * t). Regularization decay is applied through a scale factor
//! so each update touches only the nonzero coordinates of the example.

use crate::features::SparseVector;
use crate::learners::Hyperparams;
use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub struct LinearModel {
    /// one dense weight vector per class, in class order
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn scores(&self, v: &SparseVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, &b)| b + v.entries.iter().map(|&(i, x)| x * w[i as usize]).sum::<f64>())
            .collect()
    }
}

struct ScaledVector {
    v: Vec<f64>,
    scale: f64,
}

impl ScaledVector {
    fn new(dimension: usize) -> Self {
        ScaledVector { v: vec![0.0; dimension], scale: 1.0 }
    }

    fn dot(&self, x: &SparseVector) -> f64 {
        self.scale * x.entries.iter().map(|&(i, xv)| xv * self.v[i as usize]).sum::<f64>()
    }

    fn decay(&mut self, factor: f64) {
        self.scale *= factor;
        if self.scale.abs() < 1e-100 {
            self.v.fill(0.0);
            self.scale = 1.0;
        }
    }

    fn add(&mut self, x: &SparseVector, coeff: f64) {
        for &(i, xv) in &x.entries {
            self.v[i as usize] += coeff * xv / self.scale;
        }
    }

    fn materialize(self) -> Vec<f64> {
        self.v.into_iter().map(|w| w * self.scale).collect()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn fit_logistic(
    x: &[SparseVector],
    y_idx: &[u32],
    n_classes: usize,
    dimension: usize,
    h: &Hyperparams,
    rng: &mut SplitMix64,
) -> LinearModel {
    let mut weights = Vec::with_capacity(n_classes);
    let mut bias = Vec::with_capacity(n_classes);
    let mut order: Vec<usize> = (0..x.len()).collect();
    for class in 0..n_classes as u32 {
        let mut w = ScaledVector::new(dimension);
        let mut b = 0.0f64;
        let mut t = 0u64;
        for _ in 0..h.epochs {
            rng.shuffle(&mut order);
            for &i in &order {
                let eta = h.learning_rate0 / (1.0 + h.learning_rate0 * h.l2_lambda * t as f64);
                t += 1;
                let target = if y_idx[i] == class { 1.0 } else { 0.0 };
                let p = sigmoid(w.dot(&x[i]) + b);
                let g = target - p;
                w.decay(1.0 - eta * h.l2_lambda);
                w.add(&x[i], eta * g);
                b += eta * g;
            }
        }
        weights.push(w.materialize());
        bias.push(b);
    }
    LinearModel { weights, bias }
}

pub fn fit_svm(
    x: &[SparseVector],
    y_idx: &[u32],
    n_classes: usize,
    dimension: usize,
    h: &Hyperparams,
    rng: &mut SplitMix64,
) -> LinearModel {
    let mut weights = Vec::with_capacity(n_classes);
    let mut bias = Vec::with_capacity(n_classes);
    let mut order: Vec<usize> = (0..x.len()).collect();
    for class in 0..n_classes as u32 {
        let mut w = ScaledVector::new(dimension);
        let mut b = 0.0f64;
        let mut t = 1u64;
        for _ in 0..h.epochs {
            rng.shuffle(&mut order);
            for &i in &order {
                let eta = 1.0 / (h.l2_lambda * t as f64);
                let target = if y_idx[i] == class { 1.0 } else { -1.0 };
                let margin = target * (w.dot(&x[i]) + b);
                // the bias is treated as a regularized constant feature so the
                // 1/t averaging applies to it as well
                let factor = 1.0 - 1.0 / t as f64;
                if factor == 0.0 {
                    w.v.fill(0.0);
                    w.scale = 1.0;
                    b = 0.0;
                } else {
                    w.decay(factor);
                    b *= factor;
                }
                if margin < 1.0 {
                    w.add(&x[i], eta * target);
                    b += eta * target;
                }
                t += 1;
            }
        }
        weights.push(w.materialize());
        bias.push(b);
    }
    LinearModel { weights, bias }
}
