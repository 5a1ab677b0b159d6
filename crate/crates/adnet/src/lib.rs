//! Simulation and limit-law solvers for adaptive networks of interacting
//! Poissonian jump processes.
//!
//! Nodes carry states in a finite alphabet and flip at rates read from the
//! local empirical measure of their incident edges and neighbours; edges
//! carry their own finite states and flip at rates read from their endpoint
//! nodes. The crate provides:
//!
//! - exact event-driven simulation of the finite-n system ([`sim`]),
//!   including the decoupled auxiliary system and a channel-coupled pair of
//!   systems with discrepancy observables;
//! - the edge-marginal propagator and the mean-field map that feeds node
//!   intensities in the large-n limit ([`edge_field`]);
//! - a Monte-Carlo Picard solver for the self-consistent limit law
//!   ([`limit_solver`]);
//! - a deterministic pair-density ODE solver for the autonomous case
//!   ([`autonomous_pde`]);
//! - path / Wasserstein metrics and empirical-measure utilities used to
//!   verify convergence ([`metrics`]);
//! - an experiment driver behind the `adnet` binary ([`experiment`]).
//!
//! Model instances are declared in a TOML file; see `models/` for specimen
//! files and the README for the schema. Every run is reproducible from a
//! single 64-bit master seed.
//!
//! Each major capability has a runnable program under `examples/`:
//!
//! ```text
//! cargo run --release -p adnet --example validate_model
//! cargo run --release -p adnet --example simulate_network
//! cargo run --release -p adnet --example edge_propagator
//! cargo run --release -p adnet --example pde_autonomous
//! cargo run --release -p adnet --example solve_limit_law
//! cargo run --release -p adnet --example coupled_discrepancy
//! cargo run --release -p adnet --example convergence_sweep
//! ```

pub mod autonomous_pde;
pub mod edge_field;
pub mod experiment;
pub mod limit_solver;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod sim;
pub mod traj;

pub use model::{Model, ModelError, Position};
pub use traj::TrajectoryPath;
