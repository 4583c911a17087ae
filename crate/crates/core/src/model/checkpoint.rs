use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{GcnModel, ModelKind, TrainConfig};
use crate::error::{Error, Result};

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl From<&Array2<f64>> for Matrix {
    fn from(a: &Array2<f64>) -> Self {
        Self {
            rows: a.nrows(),
            cols: a.ncols(),
            data: a.iter().copied().collect(),
        }
    }
}

impl Matrix {
    fn into_array(self, name: &str) -> Result<Array2<f64>> {
        Array2::from_shape_vec((self.rows, self.cols), self.data)
            .map_err(|e| Error::Checkpoint(format!("{name}: {e}")))
    }
}

/// Versioned JSON dump of the model weights and the config that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    format_version: u32,
    kind: ModelKind,
    pub config: TrainConfig,
    w0: Matrix,
    w_mu: Matrix,
    w_sigma: Option<Matrix>,
}

impl Checkpoint {
    pub fn new(model: &GcnModel, config: &TrainConfig) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            kind: model.kind,
            config: *config,
            w0: (&model.w0).into(),
            w_mu: (&model.w_mu).into(),
            w_sigma: model.w_sigma.as_ref().map(Matrix::from),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self).map_err(|e| Error::Checkpoint(e.to_string()))?;
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let ckpt: Self = serde_json::from_str(&text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if ckpt.format_version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                ckpt.format_version
            )));
        }
        Ok(ckpt)
    }

    pub fn model(&self) -> Result<GcnModel> {
        let model = GcnModel {
            kind: self.kind,
            w0: self.w0.clone().into_array("w0")?,
            w_mu: self.w_mu.clone().into_array("w_mu")?,
            w_sigma: self.w_sigma.clone().map(|m| m.into_array("w_sigma")).transpose()?,
        };
        if (model.kind == ModelKind::Vae) != model.w_sigma.is_some() {
            return Err(Error::Checkpoint("sigma head does not match the model kind".into()));
        }
        Ok(model)
    }
}
