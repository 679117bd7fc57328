//! JSON documents for models and optimization results, and the curve CSV.
//!
//! Model documents are discriminated by their `type` field:
//!
//! ```json
//! {"type":"hmm","n_states":2,"t0":[[0.5,0.0],[0.0,0.5]],"t1":[[0.5,0.0],[0.0,0.5]],"p0":[1.0,0.0]}
//! {"type":"hqmm","dim":2,"kraus":{"0":[[[[1,0],[0,0]],[[0,0],[0,0]]]],"1":[...]},"rho0":[[[1,0],[0,0]],[[0,0],[0,0]]]}
//! ```
//!
//! Matrices are row-major; complex entries are `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::classical::HmmModel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix, C64};
use crate::optimize::{CurveRow, DecodedModel, OptimizationResult};
use crate::quantum::{DensityMatrix, HqmmModel, KrausSet};
use crate::format::format_sig15;
use crate::word::Symbol;

pub const CURVE_HEADER: &str = "k,word,classical_max,quantum_max,gap,restarts,evaluations";

type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmDocument {
    pub n_states: usize,
    pub t0: Vec<Vec<f64>>,
    pub t1: Vec<Vec<f64>>,
    pub p0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausDocument {
    #[serde(rename = "0")]
    pub zero: Vec<ComplexRows>,
    #[serde(rename = "1")]
    pub one: Vec<ComplexRows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HqmmDocument {
    pub dim: usize,
    pub kraus: KrausDocument,
    pub rho0: ComplexRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelDocument {
    Hmm(HmmDocument),
    Hqmm(HqmmDocument),
}

/// Model decoded from a document, structurally checked but not validated.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Hmm(HmmModel),
    Hqmm(HqmmModel),
}

fn complex_rows(m: &ComplexMatrix) -> ComplexRows {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn complex_matrix(rows: &ComplexRows, dim: usize, what: &str) -> Result<ComplexMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Dimension(format!("{what} must be {dim}x{dim}")));
    }
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

impl ModelDocument {
    pub fn from_hmm(m: &HmmModel) -> Self {
        ModelDocument::Hmm(HmmDocument {
            n_states: m.n_states(),
            t0: m.t0().to_rows(),
            t1: m.t1().to_rows(),
            p0: m.p0().to_vec(),
        })
    }

    pub fn from_hqmm(m: &HqmmModel) -> Self {
        let ops = |s: Symbol| m.kraus().ops(s).iter().map(complex_rows).collect();
        ModelDocument::Hqmm(HqmmDocument {
            dim: m.dim(),
            kraus: KrausDocument {
                zero: ops(Symbol::ZERO),
                one: ops(Symbol::ONE),
            },
            rho0: complex_rows(m.rho0().matrix()),
        })
    }

    pub fn from_model(m: &Model) -> Self {
        match m {
            Model::Hmm(h) => Self::from_hmm(h),
            Model::Hqmm(q) => Self::from_hqmm(q),
        }
    }

    /// Structural decoding; dimension problems are [`Error::Dimension`].
    pub fn to_model(&self) -> Result<Model> {
        match self {
            ModelDocument::Hmm(d) => {
                if d.p0.len() != d.n_states {
                    return Err(Error::Dimension(format!(
                        "p0 has {} entries, n_states is {}",
                        d.p0.len(),
                        d.n_states
                    )));
                }
                let t0 = RealMatrix::from_rows(&d.t0)?;
                let t1 = RealMatrix::from_rows(&d.t1)?;
                Ok(Model::Hmm(HmmModel::from_parts(t0, t1, d.p0.clone())?))
            }
            ModelDocument::Hqmm(d) => {
                let ops = |list: &[ComplexRows]| {
                    list.iter()
                        .map(|m| complex_matrix(m, d.dim, "Kraus operator"))
                        .collect::<Result<Vec<_>>>()
                };
                let kraus = KrausSet::new(ops(&d.kraus.zero)?, ops(&d.kraus.one)?)?;
                let rho0 = complex_matrix(&d.rho0, d.dim, "rho0")?;
                Ok(Model::Hqmm(HqmmModel::from_parts(
                    kraus,
                    DensityMatrix::new_unchecked(rho0),
                )?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    // serde_json appends "at line L column C" whenever a position is known.
    Error::Parse(e.to_string())
}

/// Parses a model document, reporting line and column on failure.
pub fn parse_model_document(text: &str) -> Result<ModelDocument> {
    serde_json::from_str(text).map_err(parse_error)
}

/// Serialized form of an [`OptimizationResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationDocument {
    pub family: String,
    pub word: String,
    pub best_value: f64,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus_per_symbol: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warm_started: Option<bool>,
    pub best_params: Vec<f64>,
    pub model: ModelDocument,
}

impl OptimizationDocument {
    pub fn new(r: &OptimizationResult) -> Self {
        let (model, kraus_per_symbol) = match &r.model {
            DecodedModel::Hmm(m) => (ModelDocument::from_hmm(m), None),
            DecodedModel::Hqmm(m) => (ModelDocument::from_hqmm(m), Some(m.kraus().counts())),
        };
        OptimizationDocument {
            family: r.family.as_str().to_string(),
            word: r.word.to_string(),
            best_value: r.best_value,
            best_restart: r.best_restart,
            restart_values: r.restart_values.clone(),
            evaluations: r.evaluations,
            kraus_per_symbol,
            warm_started: r.warm_started,
            best_params: r.best_params.clone(),
            model,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }
}

/// Curve rows as CSV with [`CURVE_HEADER`], `\n` line endings.
pub fn curve_to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            r.word,
            format_sig15(r.classical_max),
            format_sig15(r.quantum_max),
            format_sig15(r.gap),
            r.restarts,
            r.evaluations
        ));
    }
    out
}
