use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{GcnModel, ModelKind};
use crate::error::{Error, Result};
use crate::graph::{NodeFeatures, NormalizedAdjacency};

/// Activations kept from the forward pass for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    /// `Ã X W0`, before the ReLU.
    pub h1_pre: Array2<f64>,
    /// `ReLU(h1_pre)` with the dropout mask applied.
    pub h1: Array2<f64>,
    /// `Ã h1`, shared input of the output heads.
    pub ah1: Array2<f64>,
    pub mu: Array2<f64>,
    pub log_sigma: Option<Array2<f64>>,
    pub noise: Option<Array2<f64>>,
    pub dropout_mask: Option<Array2<f64>>,
    /// Embeddings fed to the decoder.
    pub z: Array2<f64>,
}

/// Deterministic forward pass.
///
/// AE: `Z = Ã ReLU(Ã X W0) W1`. VAE: `mu` and `log_sigma` from the two heads,
/// `Z = mu + exp(log_sigma) ⊙ noise`, or `Z = mu` when `noise` is `None`.
/// With identity features the first product is `Ã W0`.
pub fn forward(
    model: &GcnModel,
    a_norm: &NormalizedAdjacency,
    x: &NodeFeatures,
    noise: Option<&Array2<f64>>,
    dropout_mask: Option<&Array2<f64>>,
) -> Result<ForwardCache> {
    let n = a_norm.num_nodes();
    x.check_nodes(n)?;
    if x.dim() != model.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "features have {} columns, first layer expects {}",
            x.dim(),
            model.input_dim()
        )));
    }
    let (h, d) = (model.hidden_dim(), model.embedding_dim());
    if model.w_mu.nrows() != h {
        return Err(Error::DimensionMismatch(format!(
            "output head expects {} inputs, hidden layer has {h}",
            model.w_mu.nrows()
        )));
    }
    if let Some(mask) = dropout_mask {
        if mask.dim() != (n, h) {
            return Err(Error::DimensionMismatch(format!("dropout mask is {:?}, expected ({n}, {h})", mask.dim())));
        }
    }

    let h1_pre = match x {
        NodeFeatures::Identity { .. } => a_norm.matmul(model.w0.view())?,
        NodeFeatures::Dense(x) => a_norm.matmul(x.dot(&model.w0).view())?,
    };
    let mut h1 = h1_pre.mapv(|v| v.max(0.0));
    if let Some(mask) = dropout_mask {
        h1 *= mask;
    }
    let ah1 = a_norm.matmul(h1.view())?;
    let mu = ah1.dot(&model.w_mu);

    let (log_sigma, z) = match (model.kind, &model.w_sigma) {
        (ModelKind::Ae, _) => (None, mu.clone()),
        (ModelKind::Vae, Some(w_sigma)) => {
            let ls = ah1.dot(w_sigma);
            let z = match noise {
                Some(eps) => {
                    if eps.dim() != (n, d) {
                        return Err(Error::DimensionMismatch(format!(
                            "noise is {:?}, expected ({n}, {d})",
                            eps.dim()
                        )));
                    }
                    &mu + &(ls.mapv(f64::exp) * eps)
                }
                None => mu.clone(),
            };
            (Some(ls), z)
        }
        (ModelKind::Vae, None) => {
            return Err(Error::DimensionMismatch("VAE model is missing its sigma head".into()));
        }
    };

    Ok(ForwardCache {
        h1_pre,
        h1,
        ah1,
        mu,
        log_sigma,
        noise: noise.filter(|_| model.kind == ModelKind::Vae).cloned(),
        dropout_mask: dropout_mask.cloned(),
        z,
    })
}

/// Training-mode forward pass: draws the dropout mask and, for the VAE, the
/// standard-normal noise from `rng`.
pub fn encode<R: Rng + ?Sized>(
    model: &GcnModel,
    a_norm: &NormalizedAdjacency,
    x: &NodeFeatures,
    dropout: f64,
    rng: &mut R,
) -> Result<ForwardCache> {
    let n = a_norm.num_nodes();
    let mask = (dropout > 0.0).then(|| {
        let keep = 1.0 / (1.0 - dropout);
        Array2::from_shape_simple_fn((n, model.hidden_dim()), || {
            if rng.random::<f64>() < dropout {
                0.0
            } else {
                keep
            }
        })
    });
    let noise = (model.kind == ModelKind::Vae).then(|| {
        Array2::from_shape_simple_fn((n, model.embedding_dim()), || rng.sample(StandardNormal))
    });
    forward(model, a_norm, x, noise.as_ref(), mask.as_ref())
}

/// Inference embeddings: `Z` for the AE, the posterior means for the VAE.
pub fn embed(model: &GcnModel, a_norm: &NormalizedAdjacency, x: &NodeFeatures) -> Result<Array2<f64>> {
    Ok(forward(model, a_norm, x, None, None)?.mu)
}
