//! Rumour spreading laboratory.
//!
//! Simulates the synchronous push, pull and push&pull broadcast protocols
//! with independent per-message transmission failures, generates the graph
//! families used to probe their robustness (including two adversarial
//! two-block constructions), and provides closed-form runtime predictions
//! together with exact one-round oracles for tiny graphs.

pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod theory;

pub use engine::{
    run_round, simulate, InformedSet, Protocol, ProtocolConfig, RoundRecord, TrialResult,
};
pub use error::{Error, Result};
pub use graph::{
    delete_random, edge_boundary, generate, generate_network, is_connected, mixing_deviation,
    spectral_profile, CompleteGraph, Family, FamilySpec, Graph, Network, SpectralMethod,
    SpectralProfile, Topology,
};
pub use theory::{
    lambda_max_pp, predict_rounds, predict_tilde_rounds, protocol_constant, two_block_matrix,
    FormulaId, PredictionKind, TheoryPrediction, TwoBlockMatrix,
};

/// Version string embedded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
