use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{GcnModel, ModelGrads};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment estimates for each weight matrix, in [`GcnModel::params`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    first: Vec<Array2<f64>>,
    second: Vec<Array2<f64>>,
}

impl AdamState {
    pub fn new(model: &GcnModel, config: AdamConfig) -> Self {
        let zeros: Vec<Array2<f64>> = model.params().iter().map(|w| Array2::zeros(w.raw_dim())).collect();
        Self {
            config,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }

    /// One bias-corrected Adam update of `model` in place.
    pub fn step(&mut self, model: &mut GcnModel, grads: &ModelGrads) -> Result<()> {
        let grads = grads.params();
        let mut params = model.params_mut();
        if grads.len() != params.len() || params.len() != self.first.len() {
            return Err(Error::DimensionMismatch("gradient layout does not match the model".into()));
        }
        for (k, (w, g)) in params.iter().zip(&grads).enumerate() {
            if w.dim() != g.dim() || w.dim() != self.first[k].dim() {
                return Err(Error::DimensionMismatch(format!(
                    "parameter {k}: weights {:?}, gradient {:?}, moments {:?}",
                    w.dim(),
                    g.dim(),
                    self.first[k].dim()
                )));
            }
        }
        self.step += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        let t = self.step as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for (k, (w, g)) in params.iter_mut().zip(grads).enumerate() {
            ndarray::Zip::from(&mut **w)
                .and(&mut self.first[k])
                .and(&mut self.second[k])
                .and(g)
                .for_each(|w, m, v, &g| {
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                });
        }
        Ok(())
    }
}
