//! JSON model files: a top-level `type` tag selects the payload, numbers are
//! exact amplitude literals (strings), real floats, or `[re, im]` float
//! pairs. One file must stay on one backend.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use qmt_core::models::{HopperSpec, SlitSpec};
use qmt_core::{
    parse_amplitude, BranchVectorModel, DecoherenceFunctional, HistorySpace, OperatorModel,
    OperatorStepSpec, Scalar,
};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Deserialize)]
pub struct ModelDoc {
    pub schema_version: u32,
    #[serde(flatten)]
    pub model: ModelKind,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelKind {
    Amplitudes {
        labels: Option<Vec<String>>,
        amplitudes: Vec<NumberLit>,
        final_classes: Option<Vec<usize>>,
    },
    Matrix {
        labels: Option<Vec<String>>,
        entries: Vec<Vec<NumberLit>>,
        #[serde(default)]
        allow_invalid: bool,
    },
    Hopper {
        num_sites: Option<usize>,
        num_steps: usize,
        initial_site: Option<usize>,
        unitary: Option<Vec<Vec<NumberLit>>>,
    },
    Slits {
        labels: Option<Vec<String>>,
        amplitudes: Vec<NumberLit>,
    },
    Operator {
        dimension: usize,
        rho: Vec<Vec<NumberLit>>,
        steps: Vec<StepDoc>,
    },
}

#[derive(Deserialize)]
pub struct StepDoc {
    pub unitary: Vec<Vec<NumberLit>>,
    pub projectors: Vec<Vec<Vec<NumberLit>>>,
    pub outcome_labels: Option<Vec<String>>,
}

/// One number in a model file: an exact literal, a real double, or a
/// complex double as `[re, im]`.
#[derive(Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum NumberLit {
    Exact(String),
    Real(f64),
    Complex([f64; 2]),
}

impl NumberLit {
    pub fn to_scalar(&self) -> Result<Scalar, CliError> {
        match self {
            NumberLit::Exact(text) => Ok(Scalar::Exact(
                parse_amplitude(text).map_err(|e| CliError::input(format!("in `{text}`: {e}")))?,
            )),
            NumberLit::Real(x) => Ok(Scalar::Float(Complex64::new(*x, 0.0))),
            NumberLit::Complex([re, im]) => Ok(Scalar::Float(Complex64::new(*re, *im))),
        }
    }

    pub fn from_scalar(s: &Scalar) -> NumberLit {
        match s {
            Scalar::Exact(_) => NumberLit::Exact(s.render()),
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    NumberLit::Real(z.re)
                } else {
                    NumberLit::Complex([z.re, z.im])
                }
            }
        }
    }
}

fn scalars(row: &[NumberLit]) -> Result<Vec<Scalar>, CliError> {
    row.iter().map(|x| x.to_scalar()).collect()
}

fn scalar_matrix(rows: &[Vec<NumberLit>]) -> Result<Vec<Vec<Scalar>>, CliError> {
    rows.iter().map(|r| scalars(r)).collect()
}

/// Reads a model file and builds its decoherence functional.
pub fn load_functional(path: &std::path::Path, epsilon: f64) -> Result<DecoherenceFunctional, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let doc: ModelDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: schema error: {e}", path.display())))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(CliError::input(format!(
            "{}: unsupported schema_version {} (expected {SCHEMA_VERSION})",
            path.display(),
            doc.schema_version
        )));
    }
    build_functional(doc.model, epsilon)
}

fn build_functional(model: ModelKind, epsilon: f64) -> Result<DecoherenceFunctional, CliError> {
    match model {
        ModelKind::Amplitudes {
            labels,
            amplitudes,
            final_classes,
        } => {
            let n = amplitudes.len();
            let space = space_for(labels, n)?;
            let classes = final_classes.unwrap_or_else(|| vec![0; n]);
            let model = BranchVectorModel::new(space, scalars(&amplitudes)?, classes)?;
            Ok(DecoherenceFunctional::from_amplitudes(&model, epsilon)?)
        }
        ModelKind::Matrix {
            labels,
            entries,
            allow_invalid,
        } => {
            let n = entries.len();
            let space = space_for(labels, n)?;
            let rows = scalar_matrix(&entries)?;
            Ok(DecoherenceFunctional::from_matrix(space, rows, epsilon, allow_invalid)?)
        }
        ModelKind::Hopper {
            num_sites,
            num_steps,
            initial_site,
            unitary,
        } => {
            let num_sites = num_sites.unwrap_or(2);
            let unitary = match unitary {
                Some(rows) => scalar_matrix(&rows)?,
                None if num_sites == 2 => HopperSpec::two_site_default().unitary,
                None => {
                    return Err(CliError::input(
                        "hopper models with more than two sites must spell out the unitary".into(),
                    ))
                }
            };
            let spec = HopperSpec {
                num_sites,
                num_steps,
                initial_site: initial_site.unwrap_or(0),
                unitary,
            };
            let model = qmt_core::models::make_hopper(&spec)?;
            Ok(DecoherenceFunctional::from_amplitudes(&model, epsilon)?)
        }
        ModelKind::Slits { labels, amplitudes } => {
            let spec = SlitSpec {
                amplitudes: scalars(&amplitudes)?,
                labels,
            };
            let model = qmt_core::models::make_slits(&spec)?;
            Ok(DecoherenceFunctional::from_amplitudes(&model, epsilon)?)
        }
        ModelKind::Operator {
            dimension,
            rho,
            steps,
        } => {
            let steps = steps
                .into_iter()
                .map(|s| {
                    Ok(OperatorStepSpec {
                        unitary: scalar_matrix(&s.unitary)?,
                        projectors: s
                            .projectors
                            .iter()
                            .map(|p| scalar_matrix(p))
                            .collect::<Result<Vec<_>, CliError>>()?,
                        outcome_labels: s.outcome_labels,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let model = OperatorModel::new(dimension, scalar_matrix(&rho)?, steps, epsilon)?;
            Ok(DecoherenceFunctional::from_operators(&model, epsilon)?)
        }
    }
}

fn space_for(labels: Option<Vec<String>>, n: usize) -> Result<HistorySpace, CliError> {
    Ok(match labels {
        Some(ls) => HistorySpace::new(ls)?,
        None => HistorySpace::with_default_labels(n)?,
    })
}

/// Model document for a raw matrix, used by `compose` output.
#[derive(Serialize)]
pub struct MatrixDoc {
    pub schema_version: u32,
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<NumberLit>>,
}

impl MatrixDoc {
    pub fn from_functional(d: &DecoherenceFunctional) -> MatrixDoc {
        let n = d.n();
        MatrixDoc {
            schema_version: SCHEMA_VERSION,
            kind: "matrix",
            labels: d.space().labels().to_vec(),
            entries: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| NumberLit::from_scalar(&d.entry(i, j)))
                        .collect()
                })
                .collect(),
        }
    }
}
