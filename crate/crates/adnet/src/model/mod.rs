//! Model declaration and validation: state alphabets, spatial domain,
//! node/edge rate functions and the initial-condition kernel.
//!
//! A model is declared in a TOML file (see [`file`] for the schema) and
//! turned into a [`Model`] by [`Model::from_toml_str`], which verifies every
//! structural invariant: rate nonnegativity, kernel normalization, quadrature
//! weights, metric axioms, and the rate bounds `f_max` / `l_max` that the
//! exact simulators rely on.
//!
//! Alphabets are index sets: node states and edge states are addressed by
//! their position in the declared name lists, and all tables are stored
//! row-major in those indices.

mod file;

pub use file::ModelFile;

use serde::{Deserialize, Serialize};

use crate::rng::categorical;
use rand::Rng;

pub const WEIGHT_TOL: f64 = 1e-12;

/// Numerically stable softplus, `ln(1 + e^x)`.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("negative rate in {0}")]
    NegativeRate(String),
    #[error("unnormalized or invalid kernel: {0}")]
    UnnormalizedKernel(String),
    #[error("autonomous edge table depends on the first node state at (b={b}, a={a})")]
    InconsistentAutonomousTable { b: usize, a: usize },
    #[error("bad quadrature: {0}")]
    BadQuadrature(String),
    #[error("bad state spaces: {0}")]
    BadStates(String),
    #[error("table shape mismatch: {0}")]
    BadShape(String),
    #[error("horizon must be positive")]
    HorizonNotPositive,
    #[error("source and target state coincide")]
    SameState,
    #[error("position out of domain: {0}")]
    PositionOutOfDomain(String),
}

#[derive(Debug, thiserror::Error)]
pub enum ModelLoadError {
    #[error("model file parse error: {0}")]
    Parse(String),
    #[error("model validation failed: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ModelError>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// State alphabets

/// The two finite alphabets: node states and edge states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpaces {
    pub node_names: Vec<String>,
    pub edge_names: Vec<String>,
}

impl StateSpaces {
    pub fn n_node(&self) -> usize {
        self.node_names.len()
    }
    pub fn n_edge(&self) -> usize {
        self.edge_names.len()
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (label, names) in [("node", &self.node_names), ("edge", &self.edge_names)] {
            if names.len() < 2 {
                return Err(ModelError::BadStates(format!("{label} alphabet needs >= 2 states")));
            }
            if names.len() > 255 {
                return Err(ModelError::BadStates(format!("{label} alphabet too large")));
            }
            for (i, a) in names.iter().enumerate() {
                if names[..i].contains(a) {
                    return Err(ModelError::BadStates(format!("duplicate {label} state '{a}'")));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Spatial domain

/// A point of the spatial domain: a coordinate on the flat 1- or 2-torus
/// (coordinates live in `[0,1)` per axis) or a site of a finite metric space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Position {
    Torus1(f64),
    Torus2(f64, f64),
    Site(usize),
}

impl Position {
    /// First coordinate, used by the spatially modulated initial kernel.
    pub fn coord(&self, n_sites: usize) -> f64 {
        match *self {
            Position::Torus1(x) => x,
            Position::Torus2(x, _) => x,
            Position::Site(i) => i as f64 / n_sites.max(1) as f64,
        }
    }
}

fn torus_axis_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Spatial domain with its quadrature discretization of the position law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpatialDomain {
    /// Flat torus of dimension 1 or 2, uniform position law, equispaced
    /// quadrature (`q` nodes per axis, uniform weights).
    Torus { dim: u8, q: usize },
    /// Finite point set with an explicit metric (row-major `q x q`) and
    /// arbitrary nonnegative weights summing to 1.
    Points { weights: Vec<f64>, metric: Vec<f64> },
}

impl SpatialDomain {
    pub fn quadrature_len(&self) -> usize {
        match self {
            SpatialDomain::Torus { dim: 1, q } => *q,
            SpatialDomain::Torus { dim: _, q } => q * q,
            SpatialDomain::Points { weights, .. } => weights.len(),
        }
    }

    /// Quadrature nodes and weights approximating the position law.
    pub fn quadrature(&self) -> Vec<(Position, f64)> {
        match self {
            SpatialDomain::Torus { dim: 1, q } => {
                let w = 1.0 / *q as f64;
                (0..*q).map(|i| (Position::Torus1(i as f64 / *q as f64), w)).collect()
            }
            SpatialDomain::Torus { dim: _, q } => {
                let w = 1.0 / (q * q) as f64;
                let mut out = Vec::with_capacity(q * q);
                for i in 0..*q {
                    for j in 0..*q {
                        out.push((
                            Position::Torus2(i as f64 / *q as f64, j as f64 / *q as f64),
                            w,
                        ));
                    }
                }
                out
            }
            SpatialDomain::Points { weights, .. } => {
                weights.iter().enumerate().map(|(i, &w)| (Position::Site(i), w)).collect()
            }
        }
    }

    pub fn distance(&self, a: &Position, b: &Position) -> Result<f64, ModelError> {
        match (self, a, b) {
            (SpatialDomain::Torus { dim: 1, .. }, Position::Torus1(x), Position::Torus1(y)) => {
                Ok(torus_axis_dist(*x, *y))
            }
            (
                SpatialDomain::Torus { dim: 2, .. },
                Position::Torus2(x1, x2),
                Position::Torus2(y1, y2),
            ) => Ok(torus_axis_dist(*x1, *y1) + torus_axis_dist(*x2, *y2)),
            (SpatialDomain::Points { weights, metric }, Position::Site(i), Position::Site(j)) => {
                let q = weights.len();
                if *i >= q || *j >= q {
                    return Err(ModelError::PositionOutOfDomain(format!("site {i} or {j}")));
                }
                Ok(metric[i * q + j])
            }
            _ => Err(ModelError::PositionOutOfDomain(format!("{a:?} vs domain {self:?}"))),
        }
    }

    /// Upper bound on the metric.
    pub fn diameter(&self) -> f64 {
        match self {
            SpatialDomain::Torus { dim, .. } => 0.5 * f64::from(*dim),
            SpatialDomain::Points { metric, .. } => {
                metric.iter().copied().fold(0.0, f64::max)
            }
        }
    }

    /// Index of the quadrature cell containing `p` (nearest node).
    pub fn quad_cell(&self, p: &Position) -> Result<usize, ModelError> {
        match (self, p) {
            (SpatialDomain::Torus { dim: 1, q }, Position::Torus1(x)) => {
                Ok(((x.rem_euclid(1.0) * *q as f64).round() as usize) % q)
            }
            (SpatialDomain::Torus { dim: 2, q }, Position::Torus2(x, y)) => {
                let i = ((x.rem_euclid(1.0) * *q as f64).round() as usize) % q;
                let j = ((y.rem_euclid(1.0) * *q as f64).round() as usize) % q;
                Ok(i * q + j)
            }
            (SpatialDomain::Points { weights, .. }, Position::Site(i)) if *i < weights.len() => {
                Ok(*i)
            }
            _ => Err(ModelError::PositionOutOfDomain(format!("{p:?}"))),
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        match self {
            SpatialDomain::Torus { dim, q } => {
                if *dim != 1 && *dim != 2 {
                    return Err(ModelError::BadQuadrature("torus dim must be 1 or 2".into()));
                }
                if *q == 0 {
                    return Err(ModelError::BadQuadrature("quadrature needs >= 1 node".into()));
                }
                Ok(())
            }
            SpatialDomain::Points { weights, metric } => {
                let q = weights.len();
                if q == 0 {
                    return Err(ModelError::BadQuadrature("empty point set".into()));
                }
                if metric.len() != q * q {
                    return Err(ModelError::BadQuadrature("metric must be q x q".into()));
                }
                if weights.iter().any(|&w| w < 0.0) {
                    return Err(ModelError::BadQuadrature("negative weight".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(ModelError::BadQuadrature(format!(
                        "weights sum to {total}, expected 1"
                    )));
                }
                // metric axioms, exhaustively testable at desk scale
                for i in 0..q {
                    if metric[i * q + i] != 0.0 {
                        return Err(ModelError::BadQuadrature(format!("nonzero diagonal at {i}")));
                    }
                    for j in 0..q {
                        let d = metric[i * q + j];
                        if d < 0.0 {
                            return Err(ModelError::BadQuadrature("negative distance".into()));
                        }
                        if (d - metric[j * q + i]).abs() > WEIGHT_TOL {
                            return Err(ModelError::BadQuadrature(format!(
                                "metric not symmetric at ({i},{j})"
                            )));
                        }
                    }
                }
                if q <= 200 {
                    for i in 0..q {
                        for j in 0..q {
                            for k in 0..q {
                                if metric[i * q + j] > metric[i * q + k] + metric[k * q + j] + 1e-12 {
                                    return Err(ModelError::BadQuadrature(format!(
                                        "triangle inequality fails at ({i},{j},{k})"
                                    )));
                                }
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Local field (element of the simplex over edge-state x node-state)

/// Table over `(edge state a, node state zeta)` representing a (sub-)
/// probability measure: the local field a node reads its flip rates from.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalField {
    vals: Vec<f64>,
    n_edge: usize,
    n_node: usize,
}

impl LocalField {
    pub fn zeros(n_edge: usize, n_node: usize) -> Self {
        LocalField { vals: vec![0.0; n_edge * n_node], n_edge, n_node }
    }

    pub fn from_vals(vals: Vec<f64>, n_edge: usize, n_node: usize) -> Self {
        assert_eq!(vals.len(), n_edge * n_node);
        LocalField { vals, n_edge, n_node }
    }

    /// Point mass at `(a, zeta)`.
    pub fn point_mass(n_edge: usize, n_node: usize, a: usize, zeta: usize) -> Self {
        let mut f = Self::zeros(n_edge, n_node);
        f.vals[a * n_node + zeta] = 1.0;
        f
    }

    #[inline]
    pub fn get(&self, a: usize, zeta: usize) -> f64 {
        self.vals[a * self.n_node + zeta]
    }

    #[inline]
    pub fn set(&mut self, a: usize, zeta: usize, v: f64) {
        self.vals[a * self.n_node + zeta] = v;
    }

    #[inline]
    pub fn add(&mut self, a: usize, zeta: usize, v: f64) {
        self.vals[a * self.n_node + zeta] += v;
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn total(&self) -> f64 {
        self.vals.iter().sum()
    }

    pub fn l1_dist(&self, other: &LocalField) -> f64 {
        self.vals.iter().zip(&other.vals).map(|(x, y)| (x - y).abs()).sum()
    }

    pub fn n_edge(&self) -> usize {
        self.n_edge
    }
    pub fn n_node(&self) -> usize {
        self.n_node
    }
}

// ---------------------------------------------------------------------------
// Node rates

/// Node flip-rate family.
///
/// `AffineSoftplus` evaluates `softplus(bias[α→β] + Σ_{a,ζ} w[α→β](a,ζ) g(a,ζ))`
/// on a local field `g`; `Table` is a field-independent constant per ordered
/// pair (and admits exact zeros, which softplus cannot produce).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeRates {
    AffineSoftplus {
        /// `bias[α * nΓ + β]`, diagonal ignored.
        bias: Vec<f64>,
        /// `weight[((α * nΓ + β) * nE + a) * nΓ + ζ]`.
        weight: Vec<f64>,
    },
    Table {
        /// `rate[α * nΓ + β]`, diagonal ignored.
        rate: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRateSpec {
    pub rates: NodeRates,
    /// Verified upper bound for every `f_{α→β}` over the solid simplex
    /// (all tables `g >= 0` with `Σ g <= 1`; the zero vertex covers the
    /// self-edge-excluded fields, which sum to `(n-1)/n`).
    pub f_max: f64,
    /// Lipschitz constant of every `f_{α→β}` w.r.t. the l1 norm on fields.
    pub lip_f: f64,
    n_node: usize,
    n_edge: usize,
}

impl NodeRateSpec {
    fn build(rates: NodeRates, n_node: usize, n_edge: usize) -> Result<Self, ModelError> {
        let (f_max, lip_f) = match &rates {
            NodeRates::Table { rate } => {
                if rate.len() != n_node * n_node {
                    return Err(ModelError::BadShape("node rate table".into()));
                }
                let mut fm = 0.0f64;
                for alpha in 0..n_node {
                    for beta in 0..n_node {
                        if alpha == beta {
                            continue;
                        }
                        let r = rate[alpha * n_node + beta];
                        if r < 0.0 {
                            return Err(ModelError::NegativeRate(format!(
                                "node rate ({alpha}->{beta})"
                            )));
                        }
                        fm = fm.max(r);
                    }
                }
                (fm, 0.0)
            }
            NodeRates::AffineSoftplus { bias, weight } => {
                if bias.len() != n_node * n_node {
                    return Err(ModelError::BadShape("node rate bias".into()));
                }
                if weight.len() != n_node * n_node * n_edge * n_node {
                    return Err(ModelError::BadShape("node rate weight".into()));
                }
                let mut fm = 0.0f64;
                let mut lip = 0.0f64;
                for alpha in 0..n_node {
                    for beta in 0..n_node {
                        if alpha == beta {
                            continue;
                        }
                        // sup of the affine part over the solid simplex is
                        // attained at a vertex or at the zero table
                        let base = (alpha * n_node + beta) * n_edge * n_node;
                        let w = &weight[base..base + n_edge * n_node];
                        let wmax = w.iter().copied().fold(0.0f64, f64::max);
                        fm = fm.max(softplus(bias[alpha * n_node + beta] + wmax));
                        lip = lip.max(w.iter().map(|x| x.abs()).fold(0.0, f64::max));
                    }
                }
                (fm, lip)
            }
        };
        Ok(NodeRateSpec { rates, f_max, lip_f, n_node, n_edge })
    }

    /// Flip rate `f_{α→β}(g)`. Errors when `α == β`.
    pub fn eval(&self, alpha: usize, beta: usize, g: &LocalField) -> Result<f64, ModelError> {
        if alpha == beta {
            return Err(ModelError::SameState);
        }
        Ok(self.eval_unchecked(alpha, beta, g))
    }

    #[inline]
    pub fn eval_unchecked(&self, alpha: usize, beta: usize, g: &LocalField) -> f64 {
        match &self.rates {
            NodeRates::Table { rate } => rate[alpha * self.n_node + beta],
            NodeRates::AffineSoftplus { bias, weight } => {
                let base = (alpha * self.n_node + beta) * self.n_edge * self.n_node;
                let mut acc = bias[alpha * self.n_node + beta];
                let w = &weight[base..base + self.n_edge * self.n_node];
                for (wi, gi) in w.iter().zip(g.values()) {
                    acc += wi * gi;
                }
                softplus(acc)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Edge rates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeMode {
    /// Undirected edges: one variable per unordered pair, mirrored in state.
    Symmetric,
    /// Independent ordered edges.
    Asymmetric,
    /// Independent ordered edges whose flip rate reads only the second
    /// (pre-synaptic) node state.
    Autonomous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRateSpec {
    pub mode: EdgeMode,
    /// Full table `rate[((b * nE + a) * nΓ + σj) * nΓ + σk]`; in autonomous
    /// mode the table is constant in `σj` (expanded from the reduced input).
    rate: Vec<f64>,
    pub l_max: f64,
    n_node: usize,
    n_edge: usize,
}

impl EdgeRateSpec {
    fn build(
        mode: EdgeMode,
        mut rate: Vec<f64>,
        n_node: usize,
        n_edge: usize,
    ) -> Result<Self, ModelError> {
        if rate.len() != n_edge * n_edge * n_node * n_node {
            return Err(ModelError::BadShape("edge rate table".into()));
        }
        let mut l_max = 0.0f64;
        for b in 0..n_edge {
            for a in 0..n_edge {
                for sj in 0..n_node {
                    for sk in 0..n_node {
                        let idx = ((b * n_edge + a) * n_node + sj) * n_node + sk;
                        if b == a {
                            rate[idx] = 0.0;
                            continue;
                        }
                        let r = rate[idx];
                        if r < 0.0 {
                            return Err(ModelError::NegativeRate(format!(
                                "edge rate ({b}->{a}) at nodes ({sj},{sk})"
                            )));
                        }
                        l_max = l_max.max(r);
                    }
                }
            }
        }
        if mode == EdgeMode::Autonomous {
            for b in 0..n_edge {
                for a in 0..n_edge {
                    if b == a {
                        continue;
                    }
                    for sk in 0..n_node {
                        let r0 = rate[((b * n_edge + a) * n_node) * n_node + sk];
                        for sj in 1..n_node {
                            let r = rate[((b * n_edge + a) * n_node + sj) * n_node + sk];
                            if r != r0 {
                                return Err(ModelError::InconsistentAutonomousTable { b, a });
                            }
                        }
                    }
                }
            }
        }
        Ok(EdgeRateSpec { mode, rate, l_max, n_node, n_edge })
    }

    /// Flip rate `l_{b→a}(σj, σk)`. Errors when `b == a`.
    pub fn eval(&self, b: usize, a: usize, sj: usize, sk: usize) -> Result<f64, ModelError> {
        if b == a {
            return Err(ModelError::SameState);
        }
        Ok(self.eval_unchecked(b, a, sj, sk))
    }

    #[inline]
    pub fn eval_unchecked(&self, b: usize, a: usize, sj: usize, sk: usize) -> f64 {
        self.rate[((b * self.n_edge + a) * self.n_node + sj) * self.n_node + sk]
    }
}

// ---------------------------------------------------------------------------
// Initial kernel

/// Product-form initial kernel: node marginal `ρ_x(α)` (optionally modulated
/// along the first coordinate) and conditional edge law `κ_xy(a | α, β)`
/// (optionally blended toward uniform with a distance-decaying mix).
///
/// Assembled kernel: `v_xy(α, β, a) = ρ_x(α) ρ_y(β) κ_xy(a | α, β)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialKernel {
    /// Base node marginal `rho[α]`, a probability vector.
    pub rho: Vec<f64>,
    /// Optional per-state modulation amplitudes, each in `(-1, 1)`:
    /// `ρ_x(α) ∝ rho[α] (1 + rho_mod[α] cos(2π x₁))`.
    pub rho_mod: Option<Vec<f64>>,
    /// `kappa[(α * nΓ + β) * nE + a]`, each `(α, β)` row a probability vector.
    pub kappa: Vec<f64>,
    /// Mix weight in `[0, 1]`: at distance `d` the conditional edge law is
    /// `(1 - m) κ + m uniform` with `m = kappa_mix (1 - d / diam)`.
    pub kappa_mix: f64,
}

impl InitialKernel {
    fn validate(&self, n_node: usize, n_edge: usize) -> Result<(), ModelError> {
        if self.rho.len() != n_node {
            return Err(ModelError::BadShape("rho".into()));
        }
        if self.rho.iter().any(|&p| p < 0.0) {
            return Err(ModelError::UnnormalizedKernel("rho has negative entries".into()));
        }
        let total: f64 = self.rho.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(ModelError::UnnormalizedKernel(format!("rho sums to {total}")));
        }
        if let Some(m) = &self.rho_mod {
            if m.len() != n_node {
                return Err(ModelError::BadShape("rho_modulation".into()));
            }
            if m.iter().any(|&x| x.abs() >= 1.0) {
                return Err(ModelError::UnnormalizedKernel(
                    "rho_modulation amplitudes must lie in (-1, 1)".into(),
                ));
            }
        }
        if self.kappa.len() != n_node * n_node * n_edge {
            return Err(ModelError::BadShape("kappa".into()));
        }
        for alpha in 0..n_node {
            for beta in 0..n_node {
                let row = &self.kappa[(alpha * n_node + beta) * n_edge..][..n_edge];
                if row.iter().any(|&p| p < 0.0) {
                    return Err(ModelError::UnnormalizedKernel(format!(
                        "kappa({alpha},{beta}) has negative entries"
                    )));
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > WEIGHT_TOL {
                    return Err(ModelError::UnnormalizedKernel(format!(
                        "kappa({alpha},{beta}) sums to {s}"
                    )));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.kappa_mix) {
            return Err(ModelError::UnnormalizedKernel("kappa_mix must lie in [0,1]".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The validated model

/// A fully validated model: immutable after construction and safe to share
/// read-only across workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub states: StateSpaces,
    pub domain: SpatialDomain,
    pub node_rates: NodeRateSpec,
    pub edge_rates: EdgeRateSpec,
    pub initial: InitialKernel,
    pub horizon: f64,
}

impl Model {
    pub fn from_toml_str(text: &str) -> Result<Model, ModelLoadError> {
        let raw: ModelFile =
            toml::from_str(text).map_err(|e| ModelLoadError::Parse(e.to_string()))?;
        Model::validate(raw).map_err(ModelLoadError::Invalid)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Model, ModelLoadError> {
        let text = std::fs::read_to_string(path)?;
        Model::from_toml_str(&text)
    }

    /// Validate a parsed declaration, collecting every violation.
    pub fn validate(raw: ModelFile) -> Result<Model, Vec<ModelError>> {
        let mut errs = Vec::new();

        let states = raw.states();
        if let Err(e) = states.validate() {
            errs.push(e);
            return Err(errs);
        }
        let (nn, ne) = (states.n_node(), states.n_edge());

        let domain = match raw.domain() {
            Ok(d) => {
                if let Err(e) = d.validate() {
                    errs.push(e);
                }
                Some(d)
            }
            Err(e) => {
                errs.push(e);
                None
            }
        };

        let node_rates = match raw.node_rates(nn, ne).and_then(|r| NodeRateSpec::build(r, nn, ne))
        {
            Ok(s) => Some(s),
            Err(e) => {
                errs.push(e);
                None
            }
        };

        let edge_rates = match raw
            .edge_rates(nn, ne)
            .and_then(|(mode, table)| EdgeRateSpec::build(mode, table, nn, ne))
        {
            Ok(s) => Some(s),
            Err(e) => {
                errs.push(e);
                None
            }
        };

        let initial = raw.initial();
        if let Err(e) = initial.validate(nn, ne) {
            errs.push(e);
        }

        if !(raw.horizon_t() > 0.0) {
            errs.push(ModelError::HorizonNotPositive);
        }

        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(Model {
            states,
            domain: domain.unwrap(),
            node_rates: node_rates.unwrap(),
            edge_rates: edge_rates.unwrap(),
            initial,
            horizon: raw.horizon_t(),
        })
    }

    pub fn n_node_states(&self) -> usize {
        self.states.n_node()
    }
    pub fn n_edge_states(&self) -> usize {
        self.states.n_edge()
    }

    /// Node marginal `ρ_x` at a position, exactly normalized.
    pub fn rho_at(&self, x: &Position) -> Vec<f64> {
        let nn = self.n_node_states();
        let mut out = Vec::with_capacity(nn);
        match &self.initial.rho_mod {
            None => out.extend_from_slice(&self.initial.rho),
            Some(m) => {
                let c = (2.0 * std::f64::consts::PI * x.coord(self.domain.quadrature_len())).cos();
                for alpha in 0..nn {
                    out.push(self.initial.rho[alpha] * (1.0 + m[alpha] * c));
                }
                let total: f64 = out.iter().sum();
                for v in &mut out {
                    *v /= total;
                }
            }
        }
        out
    }

    /// Conditional edge law `κ_xy(· | α, β)`, exactly normalized.
    pub fn kappa_at(&self, x: &Position, y: &Position, alpha: usize, beta: usize) -> Vec<f64> {
        let ne = self.n_edge_states();
        let base = &self.initial.kappa[(alpha * self.n_node_states() + beta) * ne..][..ne];
        if self.initial.kappa_mix == 0.0 {
            return base.to_vec();
        }
        let d = self.domain.distance(x, y).unwrap_or(0.0);
        let m = self.initial.kappa_mix * (1.0 - d / self.domain.diameter());
        let u = 1.0 / ne as f64;
        base.iter().map(|&k| (1.0 - m) * k + m * u).collect()
    }

    /// Assembled initial kernel `v_xy(α, β, a)`.
    pub fn v_at(&self, x: &Position, y: &Position, alpha: usize, beta: usize, a: usize) -> f64 {
        self.rho_at(x)[alpha] * self.rho_at(y)[beta] * self.kappa_at(x, y, alpha, beta)[a]
    }

    /// Deterministic default node positions: equispaced on the 1-torus, an
    /// equispaced grid (square n) or golden-ratio lattice on the 2-torus,
    /// and largest-remainder apportionment by weight on point sets.
    pub fn default_positions(&self, n: usize) -> Vec<Position> {
        match &self.domain {
            SpatialDomain::Torus { dim: 1, .. } => {
                (0..n).map(|j| Position::Torus1(j as f64 / n as f64)).collect()
            }
            SpatialDomain::Torus { .. } => {
                let m = (n as f64).sqrt().round() as usize;
                if m * m == n {
                    let mut out = Vec::with_capacity(n);
                    for i in 0..m {
                        for j in 0..m {
                            out.push(Position::Torus2(i as f64 / m as f64, j as f64 / m as f64));
                        }
                    }
                    out
                } else {
                    // golden-ratio lattice: equidistributed for any n
                    let phi = 0.618_033_988_749_894_9_f64;
                    (0..n)
                        .map(|j| {
                            Position::Torus2(j as f64 / n as f64, (j as f64 * phi).fract())
                        })
                        .collect()
                }
            }
            SpatialDomain::Points { weights, .. } => {
                // largest-remainder apportionment of n nodes over sites
                let q = weights.len();
                let mut counts: Vec<usize> = weights.iter().map(|w| (w * n as f64) as usize).collect();
                let assigned: usize = counts.iter().sum();
                let mut rema: Vec<(f64, usize)> = weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (w * n as f64 - counts[i] as f64, i))
                    .collect();
                rema.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
                for k in 0..(n - assigned) {
                    counts[rema[k % q].1] += 1;
                }
                let mut out = Vec::with_capacity(n);
                for (i, &c) in counts.iter().enumerate() {
                    out.extend(std::iter::repeat(Position::Site(i)).take(c));
                }
                out
            }
        }
    }

    /// Check that positions live in this domain.
    pub fn check_positions(&self, positions: &[Position]) -> Result<(), ModelError> {
        for p in positions {
            self.domain.distance(p, p)?;
        }
        Ok(())
    }

    /// Draw initial node and edge states for `n` nodes at the given
    /// positions: nodes independently from `ρ_{θj}`, then edges conditionally
    /// independently from `κ_{θjθk}(· | σj, σk)`. In symmetric mode the pair
    /// `j < k` is sampled and mirrored.
    pub fn sample_initial_network<R: Rng>(
        &self,
        positions: &[Position],
        include_self_edges: bool,
        rng: &mut R,
    ) -> Result<InitialNetwork, ModelError> {
        self.check_positions(positions)?;
        let n = positions.len();
        let mut sigma = Vec::with_capacity(n);
        for p in positions {
            let rho = self.rho_at(p);
            sigma.push(categorical(rng, &rho) as u8);
        }
        let mut edges = vec![0u8; n * n];
        let symmetric = self.edge_rates.mode == EdgeMode::Symmetric;
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    if include_self_edges {
                        let kap = self.kappa_at(
                            &positions[j],
                            &positions[j],
                            sigma[j] as usize,
                            sigma[j] as usize,
                        );
                        edges[j * n + j] = categorical(rng, &kap) as u8;
                    }
                    continue;
                }
                if symmetric && k < j {
                    continue; // mirrored below
                }
                let kap = self.kappa_at(
                    &positions[j],
                    &positions[k],
                    sigma[j] as usize,
                    sigma[k] as usize,
                );
                let a = categorical(rng, &kap) as u8;
                edges[j * n + k] = a;
                if symmetric {
                    edges[k * n + j] = a;
                }
            }
        }
        Ok(InitialNetwork { sigma, edges })
    }

    /// Node rate `f_{α→β}(g)`; see [`NodeRateSpec::eval`].
    pub fn node_rate(&self, alpha: usize, beta: usize, g: &LocalField) -> Result<f64, ModelError> {
        self.node_rates.eval(alpha, beta, g)
    }

    /// Edge rate `l_{b→a}(σj, σk)`; see [`EdgeRateSpec::eval`].
    pub fn edge_rate(&self, b: usize, a: usize, sj: usize, sk: usize) -> Result<f64, ModelError> {
        self.edge_rates.eval(b, a, sj, sk)
    }
}

/// Initial assignment of node and edge states (row-major `n x n` edges;
/// the diagonal is used only when self-edges are enabled).
#[derive(Debug, Clone)]
pub struct InitialNetwork {
    pub sigma: Vec<u8>,
    pub edges: Vec<u8>,
}
