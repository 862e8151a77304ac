//! Lazy pre-decoding for the surface code.
//!
//! The crate builds surface-code and toric-code patches with their syndrome
//! extraction circuit, samples circuit-level or perfect-measurement noise,
//! turns the extraction circuit into a space-time decoding graph, and decodes
//! with a lazy pre-decoder backed by Union-Find or minimum-weight perfect
//! matching. On top of that sit the Monte Carlo campaigns and the resource
//! model that sizes bandwidth and decoder hardware for a `K`-qubit machine.

pub mod code_model;
pub mod decoding_graph;
pub mod experiments;
pub mod full_decoders;
pub mod lazy_decoder;
pub mod noise;
pub mod resource_model;
pub mod rng;
