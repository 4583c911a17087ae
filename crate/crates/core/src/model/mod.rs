//! Two-layer GCN encoder with an inner-product decoder, in AE and VAE form,
//! trained with hand-derived gradients and Adam.

mod adam;
mod backward;
mod checkpoint;
mod encoder;
mod loss;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use backward::{backward, loss_and_gradients, LossBreakdown};
pub use checkpoint::Checkpoint;
pub use encoder::{embed, encode, forward, ForwardCache};
pub use loss::{
    decode_pair, kl_divergence, negative_sampling_pairs, reconstruction_loss,
    reconstruction_loss_and_grad, LossConfig, PairSet, PosWeight,
};
pub use train::{train, Strategy, TrainConfig, TrainOutput};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ae,
    Vae,
}

/// GCN weights. The VAE shares the first layer and has two output heads.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    pub kind: ModelKind,
    /// `f x h` first-layer weights (`n x h` for featureless graphs).
    pub w0: Array2<f64>,
    /// `h x d` output weights; the mean head for the VAE.
    pub w_mu: Array2<f64>,
    /// `h x d` log-standard-deviation head, VAE only.
    pub w_sigma: Option<Array2<f64>>,
}

/// Gradients with the same layout as [`GcnModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrads {
    pub w0: Array2<f64>,
    pub w_mu: Array2<f64>,
    pub w_sigma: Option<Array2<f64>>,
}

fn glorot<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-bound..=bound))
}

/// Glorot-uniform initialization, deterministic per seed.
pub fn init_glorot(f: usize, h: usize, d: usize, kind: ModelKind, seed: u64) -> GcnModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w0 = glorot(f, h, &mut rng);
    let w_mu = glorot(h, d, &mut rng);
    let w_sigma = match kind {
        ModelKind::Ae => None,
        ModelKind::Vae => Some(glorot(h, d, &mut rng)),
    };
    GcnModel { kind, w0, w_mu, w_sigma }
}

impl GcnModel {
    pub fn input_dim(&self) -> usize {
        self.w0.nrows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w0.ncols()
    }

    pub fn embedding_dim(&self) -> usize {
        self.w_mu.ncols()
    }

    pub fn params(&self) -> Vec<&Array2<f64>> {
        let mut v = vec![&self.w0, &self.w_mu];
        v.extend(self.w_sigma.as_ref());
        v
    }

    pub fn params_mut(&mut self) -> Vec<&mut Array2<f64>> {
        let mut v = vec![&mut self.w0, &mut self.w_mu];
        v.extend(self.w_sigma.as_mut());
        v
    }

    pub fn zeros_like(&self) -> ModelGrads {
        ModelGrads {
            w0: Array2::zeros(self.w0.raw_dim()),
            w_mu: Array2::zeros(self.w_mu.raw_dim()),
            w_sigma: self.w_sigma.as_ref().map(|w| Array2::zeros(w.raw_dim())),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.params().iter().all(|w| w.iter().all(|v| v.is_finite()))
    }
}

impl ModelGrads {
    pub fn params(&self) -> Vec<&Array2<f64>> {
        let mut v = vec![&self.w0, &self.w_mu];
        v.extend(self.w_sigma.as_ref());
        v
    }
}
