//! JSON encoding of models, POVMs and complex arrays.
//!
//! A complex number is a `[re, im]` pair. A matrix is either a row-major
//! flat list of `d²` pairs or a list of `d` rows of pairs; both are read,
//! the flat form is written.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::*;
use crate::model::{materialize, EstimationModel, GeneratorModel, RankOnePovm};
use crate::quasipure::{build_quasipure, QuasiPureModel};
use crate::tolerances::Tolerances;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsFile {
    pub rho0: Value,
    pub hamiltonians: Vec<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchFile {
    pub weight: f64,
    pub state: Vec<Pair>,
}

/// On-disk model description. `drho` takes precedence over `generators`;
/// `branches` with `primary_generators` describes a quasi-pure model.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_params: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drho: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<GeneratorsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<BranchFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_generators: Option<Vec<Value>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub vectors: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: EstimationModel,
    pub quasi_pure: Option<QuasiPureModel>,
    /// Tolerances embedded in the file, if any.
    pub tolerances: Option<Tolerances>,
}

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn vector_to_pairs(v: &CVec) -> Vec<Pair> {
    v.iter().map(|&z| pair(z)).collect()
}

pub fn vector_from_pairs(p: &[Pair]) -> CVec {
    CVec::from_iterator(p.len(), p.iter().map(|&[re, im]| c(re, im)))
}

/// Row-major flat list of pairs.
pub fn matrix_to_value(m: &CMat) -> Value {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(pair(m[(i, j)]));
        }
    }
    serde_json::to_value(out).expect("pairs serialize")
}

pub fn real_matrix_to_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn parse_pair(v: &Value, what: &str) -> Result<C64> {
    match v {
        Value::Array(xs) if xs.len() == 2 => {
            let re = xs[0].as_f64();
            let im = xs[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(c(re, im)),
                _ => Err(Error::Schema(format!("{what}: complex entries must be [re, im] numbers"))),
            }
        }
        _ => Err(Error::Schema(format!("{what}: expected a [re, im] pair"))),
    }
}

/// Parse a square matrix, checking its size against `dim` when given.
pub fn matrix_from_value(v: &Value, dim: Option<usize>, what: &str) -> Result<CMat> {
    let Value::Array(items) = v else {
        return Err(Error::Schema(format!("{what}: expected an array")));
    };
    if items.is_empty() {
        return Err(Error::Schema(format!("{what}: empty matrix")));
    }
    let nested = matches!(&items[0], Value::Array(row) if row.first().is_some_and(Value::is_array));
    let entries: Vec<C64> = if nested {
        let d = items.len();
        let mut out = Vec::with_capacity(d * d);
        for (i, row) in items.iter().enumerate() {
            let Value::Array(row) = row else {
                return Err(Error::Schema(format!("{what}: row {i} is not an array")));
            };
            if row.len() != d {
                return Err(Error::Schema(format!("{what}: row {i} has {} entries, expected {d}", row.len())));
            }
            for x in row {
                out.push(parse_pair(x, what)?);
            }
        }
        out
    } else {
        items.iter().map(|x| parse_pair(x, what)).collect::<Result<_>>()?
    };
    let d = (entries.len() as f64).sqrt().round() as usize;
    if d * d != entries.len() {
        return Err(Error::Schema(format!("{what}: {} entries is not a square count", entries.len())));
    }
    if let Some(expected) = dim {
        if expected != d {
            return Err(Error::DimensionMismatch(format!("{what} is {d}x{d}, expected {expected}x{expected}")));
        }
    }
    Ok(CMat::from_row_slice(d, d, &entries))
}

fn lambda_or_zeros(file: &ModelFile, s: usize) -> Result<Vec<f64>> {
    match &file.lambda {
        Some(l) if l.len() != s => Err(Error::DimensionMismatch(format!(
            "lambda has {} entries for {s} parameters",
            l.len()
        ))),
        Some(l) => Ok(l.clone()),
        None => Ok(vec![0.0; s]),
    }
}

fn check_declared(file: &ModelFile, model: &EstimationModel) -> Result<()> {
    if let Some(d) = file.dim {
        if d != model.dim {
            return Err(Error::DimensionMismatch(format!("declared dim {d}, model has {}", model.dim)));
        }
    }
    if let Some(s) = file.num_params {
        if s != model.num_params {
            return Err(Error::DimensionMismatch(format!(
                "declared num_params {s}, model has {}",
                model.num_params
            )));
        }
    }
    Ok(())
}

impl ModelFile {
    /// Build and validate the model under `tol`; the embedded tolerances are
    /// returned, not applied.
    pub fn load(&self, tol: &Tolerances) -> Result<LoadedModel> {
        let (model, quasi_pure) = if let Some(branches) = &self.branches {
            let gens = self
                .primary_generators
                .as_ref()
                .ok_or_else(|| Error::Schema("branches require primary_generators".into()))?;
            if self.rho.is_some() || self.drho.is_some() || self.generators.is_some() {
                return Err(Error::Schema(
                    "a quasi-pure model cannot also give rho, drho or generators".into(),
                ));
            }
            let hs = gens
                .iter()
                .enumerate()
                .map(|(j, h)| matrix_from_value(h, None, &format!("primary_generators[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            let qp = QuasiPureModel {
                branch_weights: branches.iter().map(|b| b.weight).collect(),
                branch_states: branches.iter().map(|b| vector_from_pairs(&b.state)).collect(),
                lambda_point: lambda_or_zeros(self, hs.len())?,
                generators: hs,
            };
            (build_quasipure(&qp, tol)?, Some(qp))
        } else if let Some(drho) = &self.drho {
            let rho = self
                .rho
                .as_ref()
                .ok_or_else(|| Error::Schema("drho requires rho".into()))?;
            let rho = matrix_from_value(rho, self.dim, "rho")?;
            let d = rho.nrows();
            let drho = drho
                .iter()
                .enumerate()
                .map(|(i, m)| matrix_from_value(m, Some(d), &format!("drho[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let lambda = lambda_or_zeros(self, drho.len())?;
            (EstimationModel::new(rho, drho, lambda, tol)?, None)
        } else if let Some(g) = &self.generators {
            let rho0 = matrix_from_value(&g.rho0, self.dim, "generators.rho0")?;
            let d = rho0.nrows();
            let hs = g
                .hamiltonians
                .iter()
                .enumerate()
                .map(|(j, h)| matrix_from_value(h, Some(d), &format!("generators.hamiltonians[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            let gen = GeneratorModel {
                rho0,
                lambda_point: lambda_or_zeros(self, hs.len())?,
                hamiltonians: hs,
            };
            let model = materialize(&gen, tol)?;
            if let Some(rho) = &self.rho {
                let rho = matrix_from_value(rho, Some(d), "rho")?;
                let gap = max_abs(&(rho - &model.rho));
                if gap > tol.trace {
                    return Err(Error::Schema(format!(
                        "rho differs from the generator state at lambda by {gap:.3e}"
                    )));
                }
            }
            (model, None)
        } else {
            return Err(Error::Schema("model needs drho, generators or branches".into()));
        };
        check_declared(self, &model)?;
        Ok(LoadedModel {
            model,
            quasi_pure,
            tolerances: self.tolerances,
        })
    }

    pub fn from_model(model: &EstimationModel, tolerances: Option<Tolerances>) -> Self {
        ModelFile {
            dim: Some(model.dim),
            num_params: Some(model.num_params),
            rho: Some(matrix_to_value(&model.rho)),
            drho: Some(model.drho.iter().map(matrix_to_value).collect()),
            lambda: Some(model.lambda_point.clone()),
            tolerances,
            ..ModelFile::default()
        }
    }

    pub fn from_quasipure(qp: &QuasiPureModel, tolerances: Option<Tolerances>) -> Self {
        ModelFile {
            dim: Some(qp.dim()),
            num_params: Some(qp.generators.len()),
            lambda: Some(qp.lambda_point.clone()),
            tolerances,
            branches: Some(
                qp.branch_weights
                    .iter()
                    .zip(&qp.branch_states)
                    .map(|(&weight, s)| BranchFile {
                        weight,
                        state: vector_to_pairs(s),
                    })
                    .collect(),
            ),
            primary_generators: Some(qp.generators.iter().map(matrix_to_value).collect()),
            ..ModelFile::default()
        }
    }
}

impl PovmFile {
    pub fn to_povm(&self) -> Result<RankOnePovm> {
        if self.vectors.is_empty() {
            return Err(Error::Schema("POVM has no vectors".into()));
        }
        let d = self.vectors[0].len();
        if let Some((k, _)) = self.vectors.iter().enumerate().find(|(_, v)| v.len() != d) {
            return Err(Error::DimensionMismatch(format!("POVM vector {k} has a different length")));
        }
        let vectors: Vec<CVec> = self.vectors.iter().map(|v| vector_from_pairs(v)).collect();
        match &self.weights {
            None => Ok(RankOnePovm::new(vectors)),
            Some(w) if w.len() != vectors.len() => Err(Error::Schema(format!(
                "{} weights for {} vectors",
                w.len(),
                vectors.len()
            ))),
            Some(w) if w.iter().any(|x| x.is_nan() || *x < 0.0) => Err(Error::Schema("POVM weights must be nonnegative".into())),
            Some(w) => Ok(RankOnePovm::weighted(vectors, w.clone())),
        }
    }

    pub fn from_povm(povm: &RankOnePovm) -> Self {
        PovmFile {
            vectors: povm.vectors.iter().map(vector_to_pairs).collect(),
            weights: povm.weights.clone(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn load_model(path: &Path, tol: &Tolerances) -> Result<LoadedModel> {
    read_json::<ModelFile>(path)?.load(tol)
}

pub fn load_povm(path: &Path) -> Result<RankOnePovm> {
    read_json::<PovmFile>(path)?.to_povm()
}
