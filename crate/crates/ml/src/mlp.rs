use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::classifier::Model;
use crate::dataset::Dataset;
use crate::{logit_loss, sigmoid, MlError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpOptions {
    pub hidden: usize,
    pub lr: f64,
    pub epochs: usize,
}

impl Default for MlpOptions {
    fn default() -> Self {
        Self { hidden: 16, lr: 0.01, epochs: 3000 }
    }
}

/// One ReLU hidden layer and a sigmoid output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    /// `hidden x dim`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    dim: usize,
}

/// Gradient with the same layout as [`MlpModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpModel {
    /// He-normal weights, zero biases.
    pub fn init(dim: usize, hidden: usize, seed: u64) -> Result<Self, MlError> {
        if hidden == 0 {
            return Err(MlError::Config("MLP needs at least one hidden unit".into()));
        }
        if dim == 0 {
            return Err(MlError::Config("MLP needs at least one input".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n1 = Normal::new(0.0, (2.0 / dim as f64).sqrt()).expect("positive sigma");
        let n2 = Normal::new(0.0, (2.0 / hidden as f64).sqrt()).expect("positive sigma");
        let w1 = (0..hidden * dim).map(|_| n1.sample(&mut rng)).collect();
        let w2 = (0..hidden).map(|_| n2.sample(&mut rng)).collect();
        Ok(Self { w1, b1: vec![0.0; hidden], w2, b2: 0.0, dim })
    }

    pub fn hidden(&self) -> usize {
        self.b1.len()
    }

    fn forward(&self, x: &[f64], act: &mut [f64]) -> f64 {
        let d = self.dim;
        let mut z = self.b2;
        for (h, a) in act.iter_mut().enumerate() {
            let pre = self.b1[h] + self.w1[h * d..(h + 1) * d].iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            *a = pre.max(0.0);
            z += self.w2[h] * *a;
        }
        z
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        let mut act = vec![0.0; self.hidden()];
        self.forward(x, &mut act)
    }

    /// Mean cross-entropy over `data` and its gradient by backpropagation.
    pub fn loss_and_gradient(&self, data: &Dataset) -> (f64, MlpGradient) {
        let (d, h) = (self.dim, self.hidden());
        let n = data.len() as f64;
        let mut g = MlpGradient { w1: vec![0.0; h * d], b1: vec![0.0; h], w2: vec![0.0; h], b2: 0.0 };
        let mut act = vec![0.0; h];
        let mut loss = 0.0;
        for (x, t) in data.rows().iter().zip(data.targets()) {
            let z = self.forward(x, &mut act);
            loss += logit_loss(z, t);
            let dz = (sigmoid(z) - t) / n;
            g.b2 += dz;
            for k in 0..h {
                g.w2[k] += dz * act[k];
                if act[k] > 0.0 {
                    let da = dz * self.w2[k];
                    g.b1[k] += da;
                    for (gw, v) in g.w1[k * d..(k + 1) * d].iter_mut().zip(x) {
                        *gw += da * v;
                    }
                }
            }
        }
        (loss / n, g)
    }

    fn step(&mut self, g: &MlpGradient, lr: f64) {
        let upd = |p: &mut [f64], q: &[f64]| p.iter_mut().zip(q).for_each(|(a, b)| *a -= lr * b);
        upd(&mut self.w1, &g.w1);
        upd(&mut self.b1, &g.b1);
        upd(&mut self.w2, &g.w2);
        self.b2 -= lr * g.b2;
    }

    /// Full-batch gradient descent from the seeded initialisation.
    pub fn train(data: &Dataset, opts: &MlpOptions, seed: u64) -> Result<Self, MlError> {
        if data.is_empty() {
            return Err(MlError::Empty);
        }
        if !(opts.lr > 0.0) {
            return Err(MlError::Config("MLP learning rate must be positive".into()));
        }
        let mut m = Self::init(data.dim(), opts.hidden, seed)?;
        for epoch in 0..opts.epochs {
            let (loss, g) = m.loss_and_gradient(data);
            if !loss.is_finite() {
                return Err(MlError::Divergence { epoch, loss });
            }
            m.step(&g, opts.lr);
        }
        let (loss, _) = m.loss_and_gradient(data);
        if !loss.is_finite() {
            return Err(MlError::Divergence { epoch: opts.epochs, loss });
        }
        Ok(m)
    }
}

impl Model for MlpModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }
}
