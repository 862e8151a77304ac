//! JSON listing of a decoding graph.
//!
//! ```text
//! {
//!   "check_basis": "X" | "Z",
//!   "model": "CircuitLevel" | "PerfectMeasurement",
//!   "rounds": 5,
//!   "vertices":   [{"id": 0, "x": 2, "y": 0, "t": 0}, ...],
//!   "edges":      [{"id": 0, "u": 0, "v": 1, "probability": 1.3e-3, "weight": 6.6, "class": "Space"}, ...],
//!   "half_edges": [{"id": 0, "u": 0, "probability": 6.7e-4, "weight": 7.3}, ...]
//! }
//! ```
//! Coordinates are doubled; edges are listed in scan order.

use serde::Serialize;

use super::{DecodingGraph, EdgeClass, GraphModel, VertexIndex};
use crate::code_model::Basis;

#[derive(Debug, Clone, Serialize)]
pub struct VertexRecord {
    pub id: VertexIndex,
    pub x: i32,
    pub y: i32,
    pub t: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeRecord {
    pub id: u32,
    pub u: VertexIndex,
    pub v: VertexIndex,
    pub probability: f64,
    pub weight: f64,
    pub class: EdgeClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct HalfEdgeRecord {
    pub id: u32,
    pub u: VertexIndex,
    pub probability: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphDump {
    pub check_basis: String,
    pub model: GraphModel,
    pub rounds: usize,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub half_edges: Vec<HalfEdgeRecord>,
}

impl GraphDump {
    pub fn new(graph: &DecodingGraph) -> Self {
        let vertices = (0..graph.num_vertices() as VertexIndex)
            .map(|id| {
                let (x, y, t) = graph.coord(id);
                VertexRecord { id, x, y, t }
            })
            .collect();
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeRecord {
                id: i as u32,
                u: e.u,
                v: e.v,
                probability: e.probability,
                weight: e.weight,
                class: e.class,
            })
            .collect();
        let half_edges = graph
            .half_edges()
            .iter()
            .enumerate()
            .map(|(i, h)| HalfEdgeRecord { id: i as u32, u: h.u, probability: h.probability, weight: h.weight })
            .collect();
        GraphDump {
            check_basis: match graph.check_basis() {
                Basis::X => "X".into(),
                Basis::Z => "Z".into(),
            },
            model: graph.model(),
            rounds: graph.rounds(),
            vertices,
            edges,
            half_edges,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph dump contains only finite numbers")
    }
}
