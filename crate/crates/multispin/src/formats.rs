//! On-disk document types and their conversions to the in-memory models.
//! All documents are JSON; complex table entries are [re, im] pairs,
//! row-major in scope order with the last scope coordinate varying fastest.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::builders::Hypergraph;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianFactor, GaussianFactorKind, GaussianModel};
use crate::spinmodel::{Factor, Space, SpinSystem};

#[derive(Debug, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub size: usize,
    pub probs: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FactorDoc {
    pub scope: Vec<usize>,
    pub table: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpinModelDoc {
    pub spaces: Vec<SpaceDoc>,
    pub factors: Vec<FactorDoc>,
}

impl SpinModelDoc {
    pub fn from_system(system: &SpinSystem) -> Self {
        SpinModelDoc {
            spaces: system
                .spaces
                .iter()
                .map(|s| SpaceDoc {
                    size: s.size,
                    probs: s.probs.clone(),
                })
                .collect(),
            factors: system
                .factors
                .iter()
                .map(|f| FactorDoc {
                    scope: f.scope.clone(),
                    table: f.table.iter().map(|c| [c.re, c.im]).collect(),
                })
                .collect(),
        }
    }

    pub fn into_system(self) -> SpinSystem {
        SpinSystem::new(
            self.spaces
                .into_iter()
                .map(|s| Space {
                    size: s.size,
                    probs: s.probs,
                })
                .collect(),
            self.factors
                .into_iter()
                .map(|f| Factor {
                    scope: f.scope,
                    table: f
                        .table
                        .into_iter()
                        .map(|[re, im]| Complex64::new(re, im))
                        .collect(),
                })
                .collect(),
        )
    }
}

/// Kind-specific parameter payloads for Gaussian factors.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GaussianKindDoc {
    AbsLinear { coeffs: Vec<f64>, offset: f64 },
    EuclideanDistance { block_dim: usize },
    PiecewiseLinearOfSum {
        knots: Vec<f64>,
        slopes: Vec<f64>,
        value_at_zero: f64,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GaussianFactorDoc {
    #[serde(flatten)]
    pub kind: GaussianKindDoc,
    pub scope: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GaussianModelDoc {
    pub n: usize,
    pub factors: Vec<GaussianFactorDoc>,
}

impl GaussianModelDoc {
    pub fn from_model(model: &GaussianModel) -> Self {
        GaussianModelDoc {
            n: model.n,
            factors: model
                .factors
                .iter()
                .map(|f| GaussianFactorDoc {
                    kind: match &f.kind {
                        GaussianFactorKind::AbsLinear { coeffs, offset } => {
                            GaussianKindDoc::AbsLinear {
                                coeffs: coeffs.clone(),
                                offset: *offset,
                            }
                        }
                        GaussianFactorKind::EuclideanDistance { block_dim } => {
                            GaussianKindDoc::EuclideanDistance {
                                block_dim: *block_dim,
                            }
                        }
                        GaussianFactorKind::PiecewiseLinearOfSum {
                            knots,
                            slopes,
                            value_at_zero,
                        } => GaussianKindDoc::PiecewiseLinearOfSum {
                            knots: knots.clone(),
                            slopes: slopes.clone(),
                            value_at_zero: *value_at_zero,
                        },
                    },
                    scope: f.scope.clone(),
                    truncation: f.truncation,
                })
                .collect(),
        }
    }

    pub fn into_model(self) -> GaussianModel {
        GaussianModel {
            n: self.n,
            factors: self
                .factors
                .into_iter()
                .map(|f| {
                    let kind = match f.kind {
                        GaussianKindDoc::AbsLinear { coeffs, offset } => {
                            GaussianFactorKind::AbsLinear { coeffs, offset }
                        }
                        GaussianKindDoc::EuclideanDistance { block_dim } => {
                            GaussianFactorKind::EuclideanDistance { block_dim }
                        }
                        GaussianKindDoc::PiecewiseLinearOfSum {
                            knots,
                            slopes,
                            value_at_zero,
                        } => GaussianFactorKind::PiecewiseLinearOfSum {
                            knots,
                            slopes,
                            value_at_zero,
                        },
                    };
                    GaussianFactor {
                        kind,
                        scope: f.scope,
                        truncation: f.truncation,
                        offset: 0.0,
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HypergraphDoc {
    pub num_vertices: usize,
    pub edges: Vec<Vec<usize>>,
}

impl From<HypergraphDoc> for Hypergraph {
    fn from(doc: HypergraphDoc) -> Self {
        Hypergraph {
            num_vertices: doc.num_vertices,
            edges: doc.edges,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IsingGraphDoc {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub field: Vec<f64>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_spin_model(text: &str) -> Result<SpinSystem> {
    Ok(parse::<SpinModelDoc>(text, "spin model")?.into_system())
}

pub fn parse_gaussian_model(text: &str) -> Result<GaussianModel> {
    Ok(parse::<GaussianModelDoc>(text, "gaussian model")?.into_model())
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    Ok(parse::<HypergraphDoc>(text, "hypergraph")?.into())
}

pub fn parse_ising_graph(text: &str) -> Result<IsingGraphDoc> {
    parse(text, "ising graph")
}

/// The structured report every CLI command prints on standard output.
/// Absent sections are omitted, so each command carries only its fields.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_value: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_upper: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_zero_modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// Interpolation plan echo inside a report.
#[derive(Debug, Serialize, Deserialize)]
pub struct PlanDoc {
    pub truncation_degree: usize,
    pub interpolation_degree: usize,
    pub rho: f64,
    pub beta: f64,
    pub radius: f64,
    pub log_lower_beta: f64,
}
