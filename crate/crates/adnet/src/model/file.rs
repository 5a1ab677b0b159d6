//! TOML schema for model declarations.
//!
//! ```toml
//! [states]
//! node = ["rest", "active"]     # node alphabet, >= 2 names
//! edge = ["weak", "strong"]     # edge alphabet, >= 2 names
//!
//! [domain]
//! kind = "torus"                # "torus" | "points"
//! dim = 1                       # torus only: 1 | 2
//! quadrature = 16               # torus only: nodes per axis
//! # points only:
//! # weights = [0.5, 0.5]
//! # metric = [[0.0, 1.0], [1.0, 0.0]]
//!
//! [node_rates]
//! family = "affine-softplus"    # | "table"
//! bias = [[0.0, -0.5], [0.3, 0.0]]             # [alpha][beta]
//! weight = [ [ [[0,0],[0,0]], [[1,0],[0,0]] ],
//!            [ [[0,0],[0,0]], [[0,0],[0,0]] ] ] # [alpha][beta][a][zeta]
//! # table family instead: rate = [[0.0, 1.0], [1.0, 0.0]]
//!
//! [edge_rates]
//! mode = "autonomous"           # "symmetric" | "asymmetric" | "autonomous"
//! rate = [ [ [0,0], [1,2] ], [ [3,0], [0,0] ] ]
//! # autonomous: rate[b][a][sigma_k]; other modes: rate[b][a][sigma_j][sigma_k]
//! # (a 4-level table is also accepted in autonomous mode and checked for
//! #  independence of sigma_j)
//!
//! [initial]
//! rho = [0.5, 0.5]              # node marginal, sums to 1
//! rho_modulation = [0.4, -0.4]  # optional, entries in (-1, 1)
//! kappa = [ [ [1.0, 0.0], [0.5, 0.5] ],
//!           [ [0.5, 0.5], [0.0, 1.0] ] ]        # [alpha][beta][a]
//! kappa_mix = 0.0               # optional, in [0, 1]
//!
//! [horizon]
//! t = 2.0
//! ```
//!
//! Unknown keys anywhere are rejected.

use serde::Deserialize;

use super::{EdgeMode, InitialKernel, ModelError, NodeRates, SpatialDomain, StateSpaces};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    states: StatesSection,
    domain: DomainSection,
    node_rates: NodeRatesSection,
    edge_rates: EdgeRatesSection,
    initial: InitialSection,
    horizon: HorizonSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatesSection {
    node: Vec<String>,
    edge: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSection {
    kind: String,
    dim: Option<u8>,
    quadrature: Option<usize>,
    weights: Option<Vec<f64>>,
    metric: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRatesSection {
    family: String,
    bias: Option<Vec<Vec<f64>>>,
    weight: Option<Vec<Vec<Vec<Vec<f64>>>>>,
    rate: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRatesSection {
    mode: String,
    rate: toml::Value,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    rho: Vec<f64>,
    rho_modulation: Option<Vec<f64>>,
    kappa: Vec<Vec<Vec<f64>>>,
    kappa_mix: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct HorizonSection {
    t: f64,
}

fn flatten2(v: &[Vec<f64>], rows: usize, cols: usize, what: &str) -> Result<Vec<f64>, ModelError> {
    if v.len() != rows || v.iter().any(|r| r.len() != cols) {
        return Err(ModelError::BadShape(format!("{what}: expected {rows} x {cols}")));
    }
    Ok(v.iter().flatten().copied().collect())
}

impl ModelFile {
    pub(super) fn states(&self) -> StateSpaces {
        StateSpaces { node_names: self.states.node.clone(), edge_names: self.states.edge.clone() }
    }

    pub(super) fn domain(&self) -> Result<SpatialDomain, ModelError> {
        match self.domain.kind.as_str() {
            "torus" => {
                let dim = self.domain.dim.unwrap_or(1);
                let q = self
                    .domain
                    .quadrature
                    .ok_or_else(|| ModelError::BadQuadrature("torus needs `quadrature`".into()))?;
                if self.domain.weights.is_some() || self.domain.metric.is_some() {
                    return Err(ModelError::BadQuadrature(
                        "`weights`/`metric` only apply to kind = \"points\"".into(),
                    ));
                }
                Ok(SpatialDomain::Torus { dim, q })
            }
            "points" => {
                let weights = self
                    .domain
                    .weights
                    .clone()
                    .ok_or_else(|| ModelError::BadQuadrature("points need `weights`".into()))?;
                let q = weights.len();
                let metric = flatten2(
                    self.domain
                        .metric
                        .as_ref()
                        .ok_or_else(|| ModelError::BadQuadrature("points need `metric`".into()))?,
                    q,
                    q,
                    "metric",
                )
                .map_err(|_| ModelError::BadQuadrature("metric must be q x q".into()))?;
                if self.domain.dim.is_some() || self.domain.quadrature.is_some() {
                    return Err(ModelError::BadQuadrature(
                        "`dim`/`quadrature` only apply to kind = \"torus\"".into(),
                    ));
                }
                Ok(SpatialDomain::Points { weights, metric })
            }
            other => Err(ModelError::BadQuadrature(format!("unknown domain kind '{other}'"))),
        }
    }

    pub(super) fn node_rates(&self, nn: usize, ne: usize) -> Result<NodeRates, ModelError> {
        match self.node_rates.family.as_str() {
            "table" => {
                let rate = self
                    .node_rates
                    .rate
                    .as_ref()
                    .ok_or_else(|| ModelError::BadShape("table family needs `rate`".into()))?;
                if self.node_rates.bias.is_some() || self.node_rates.weight.is_some() {
                    return Err(ModelError::BadShape(
                        "`bias`/`weight` only apply to the affine-softplus family".into(),
                    ));
                }
                Ok(NodeRates::Table { rate: flatten2(rate, nn, nn, "node rate")? })
            }
            "affine-softplus" => {
                if self.node_rates.rate.is_some() {
                    return Err(ModelError::BadShape(
                        "`rate` only applies to the table family".into(),
                    ));
                }
                let bias = flatten2(
                    self.node_rates
                        .bias
                        .as_ref()
                        .ok_or_else(|| ModelError::BadShape("affine family needs `bias`".into()))?,
                    nn,
                    nn,
                    "bias",
                )?;
                let wsrc = self
                    .node_rates
                    .weight
                    .as_ref()
                    .ok_or_else(|| ModelError::BadShape("affine family needs `weight`".into()))?;
                if wsrc.len() != nn || wsrc.iter().any(|r| r.len() != nn) {
                    return Err(ModelError::BadShape("weight: expected [alpha][beta][a][zeta]".into()));
                }
                let mut weight = Vec::with_capacity(nn * nn * ne * nn);
                for row in wsrc {
                    for w in row {
                        weight.extend(flatten2(w, ne, nn, "weight block")?);
                    }
                }
                Ok(NodeRates::AffineSoftplus { bias, weight })
            }
            other => Err(ModelError::BadShape(format!("unknown node rate family '{other}'"))),
        }
    }

    pub(super) fn edge_rates(
        &self,
        nn: usize,
        ne: usize,
    ) -> Result<(EdgeMode, Vec<f64>), ModelError> {
        let mode = match self.edge_rates.mode.as_str() {
            "symmetric" => EdgeMode::Symmetric,
            "asymmetric" => EdgeMode::Asymmetric,
            "autonomous" => EdgeMode::Autonomous,
            other => return Err(ModelError::BadShape(format!("unknown edge mode '{other}'"))),
        };
        let depth = value_depth(&self.edge_rates.rate);
        let table = match (mode, depth) {
            (EdgeMode::Autonomous, 3) => {
                // reduced table rate[b][a][sigma_k], expanded to be constant in sigma_j
                let reduced = nested_f64(&self.edge_rates.rate, &[ne, ne, nn], "edge rate")?;
                let mut full = vec![0.0; ne * ne * nn * nn];
                for b in 0..ne {
                    for a in 0..ne {
                        for sj in 0..nn {
                            for sk in 0..nn {
                                full[((b * ne + a) * nn + sj) * nn + sk] =
                                    reduced[(b * ne + a) * nn + sk];
                            }
                        }
                    }
                }
                full
            }
            (_, 4) => nested_f64(&self.edge_rates.rate, &[ne, ne, nn, nn], "edge rate")?,
            (EdgeMode::Autonomous, d) => {
                return Err(ModelError::BadShape(format!(
                    "autonomous edge rate must be [b][a][sigma_k] or [b][a][sigma_j][sigma_k], got depth {d}"
                )))
            }
            (_, d) => {
                return Err(ModelError::BadShape(format!(
                    "edge rate must be [b][a][sigma_j][sigma_k], got depth {d}"
                )))
            }
        };
        Ok((mode, table))
    }

    pub(super) fn initial(&self) -> InitialKernel {
        InitialKernel {
            rho: self.initial.rho.clone(),
            rho_mod: self.initial.rho_modulation.clone(),
            kappa: self.initial.kappa.iter().flatten().flatten().copied().collect(),
            kappa_mix: self.initial.kappa_mix.unwrap_or(0.0),
        }
    }

    pub(super) fn horizon_t(&self) -> f64 {
        self.horizon.t
    }
}

fn value_depth(v: &toml::Value) -> usize {
    match v {
        toml::Value::Array(items) => 1 + items.first().map_or(0, value_depth),
        _ => 0,
    }
}

/// Flatten a nested TOML array of numbers with the exact given shape.
fn nested_f64(v: &toml::Value, shape: &[usize], what: &str) -> Result<Vec<f64>, ModelError> {
    fn rec(v: &toml::Value, shape: &[usize], out: &mut Vec<f64>, what: &str) -> Result<(), ModelError> {
        match shape.split_first() {
            None => match v {
                toml::Value::Float(x) => {
                    out.push(*x);
                    Ok(())
                }
                toml::Value::Integer(x) => {
                    out.push(*x as f64);
                    Ok(())
                }
                _ => Err(ModelError::BadShape(format!("{what}: expected a number"))),
            },
            Some((&len, rest)) => match v {
                toml::Value::Array(items) if items.len() == len => {
                    for item in items {
                        rec(item, rest, out, what)?;
                    }
                    Ok(())
                }
                toml::Value::Array(items) => Err(ModelError::BadShape(format!(
                    "{what}: expected length {len}, got {}",
                    items.len()
                ))),
                _ => Err(ModelError::BadShape(format!("{what}: expected an array"))),
            },
        }
    }
    let mut out = Vec::new();
    rec(v, shape, &mut out, what)?;
    Ok(out)
}
