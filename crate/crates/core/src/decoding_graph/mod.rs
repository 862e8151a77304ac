//! Space-time decoding graph of one check basis.
//!
//! Vertices are syndrome locations `(x, y, t)`; vertex `t * checks_per_round + i`
//! is check `i` (row-major `basis_index`) at round `t`, so vertex ids sort
//! lexicographically by `(t, y, x)`. Every fault of the extraction circuit
//! flips the difference syndrome at zero, one or two vertices and becomes a
//! half-edge `{u, -}` or an edge `{u, v}`. Parallel faults are merged.
//!
//! Edges are stored in the canonical scan order used by the lazy decoder:
//! by smaller endpoint, then direction class (space, time, diagonal), then
//! larger endpoint. Half-edges are sorted by vertex.

mod build;
mod dump;

pub use build::{build_decoding_graph, GraphWindow};
pub use dump::GraphDump;

use serde::Serialize;
use thiserror::Error;

use crate::code_model::{Basis, CodeLayout, LayoutError};
use crate::noise::{FaultEvent, NoiseError};

pub type VertexIndex = u32;
pub type EdgeIndex = u32;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("fault {0:?} triggers {1} detectors of one basis; the schedule is not graphlike")]
    HyperedgeFault(FaultEvent, usize),
    #[error("fault {0:?} is not a location of this graph")]
    UnknownFault(FaultEvent),
    #[error("invalid edge list: {0}")]
    InvalidEdge(String),
    #[error("data qubit {0} is not part of this graph")]
    UnknownQubit(usize),
    #[error("graph was built for {0}; this operation needs the other fault model")]
    WrongModel(&'static str),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeClass {
    Space,
    Time,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub u: VertexIndex,
    pub v: VertexIndex,
    pub probability: f64,
    pub weight: f64,
    pub class: EdgeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfEdge {
    pub u: VertexIndex,
    pub probability: f64,
    pub weight: f64,
}

/// Reference to an edge or a half-edge of a [`DecodingGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeRef {
    Edge(EdgeIndex),
    Half(EdgeIndex),
}

/// Which fault model a graph was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphModel {
    /// Circuit-level noise over several rounds.
    CircuitLevel,
    /// Data-qubit errors with perfect measurements, a single time slice.
    PerfectMeasurement,
    /// Built by hand from an edge list.
    Custom,
}

const NO_EDGE: u32 = u32::MAX;
const NOT_A_LOCATION: u32 = u32::MAX - 1;

#[derive(Debug, Clone)]
pub(crate) enum FaultTable {
    /// Indexed by `((round * locations_per_round) + location) * 16 + pauli code`.
    Circuit { step_offsets: Vec<usize>, locations_per_round: usize, rounds: usize, entries: Vec<u32> },
    /// Indexed by data qubit.
    Data { entries: Vec<u32> },
}

/// Decoding graph of one check basis. Immutable after construction.
#[derive(Debug, Clone)]
pub struct DecodingGraph {
    check_basis: Basis,
    model: GraphModel,
    rounds: usize,
    centers: Vec<(i32, i32)>,
    edges: Vec<Edge>,
    half_edges: Vec<HalfEdge>,
    /// CSR adjacency: neighbors of `v` are `adjacency[offsets[v]..offsets[v + 1]]`.
    offsets: Vec<u32>,
    adjacency: Vec<(VertexIndex, EdgeIndex)>,
    half_edge_at: Vec<u32>,
    edge_effects: Vec<Vec<usize>>,
    half_edge_effects: Vec<Vec<usize>>,
    faults: FaultTable,
}

impl DecodingGraph {
    pub(crate) fn assemble(
        check_basis: Basis,
        model: GraphModel,
        rounds: usize,
        centers: Vec<(i32, i32)>,
        edges: Vec<(Edge, Vec<usize>)>,
        half_edges: Vec<(HalfEdge, Vec<usize>)>,
        faults: FaultTable,
    ) -> DecodingGraph {
        let n = rounds * centers.len();
        let (edges, edge_effects): (Vec<_>, Vec<_>) = edges.into_iter().unzip();
        let (half_edges, half_edge_effects): (Vec<_>, Vec<_>) = half_edges.into_iter().unzip();

        let mut degree = vec![0u32; n + 1];
        for e in &edges {
            degree[e.u as usize] += 1;
            degree[e.v as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0, 0); offsets[n] as usize];
        // edges are visited in canonical order so each neighbor list is sorted by edge index
        for (i, e) in edges.iter().enumerate() {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                adjacency[fill[a as usize] as usize] = (b, i as EdgeIndex);
                fill[a as usize] += 1;
            }
        }
        let mut half_edge_at = vec![NO_EDGE; n];
        for (i, h) in half_edges.iter().enumerate() {
            half_edge_at[h.u as usize] = i as u32;
        }
        DecodingGraph {
            check_basis,
            model,
            rounds,
            centers,
            edges,
            half_edges,
            offsets,
            adjacency,
            half_edge_at,
            edge_effects,
            half_edge_effects,
            faults,
        }
    }

    /// Single-round graph on `num_vertices` vertices from explicit
    /// `(u, v, probability)` edges and `(u, probability)` half-edges. Vertex
    /// `i` sits at `(2i, 0)`. Data effects are empty.
    pub fn from_parts(
        num_vertices: usize,
        edges: &[(VertexIndex, VertexIndex, f64)],
        half_edges: &[(VertexIndex, f64)],
    ) -> Result<DecodingGraph, GraphError> {
        build::custom_graph(num_vertices, edges, half_edges)
    }

    /// Single-slice graph for perfect-measurement noise: one (half-)edge per
    /// data qubit, with edge probability `p`.
    pub fn perfect_measurement(layout: &CodeLayout, check_basis: Basis, p: f64) -> Result<DecodingGraph, GraphError> {
        build::perfect_measurement_graph(layout, check_basis, p)
    }

    pub fn check_basis(&self) -> Basis {
        self.check_basis
    }

    pub fn model(&self) -> GraphModel {
        self.model
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn checks_per_round(&self) -> usize {
        self.centers.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.rounds * self.centers.len()
    }

    pub fn vertex(&self, round: usize, basis_index: usize) -> VertexIndex {
        (round * self.centers.len() + basis_index) as VertexIndex
    }

    /// Doubled `(x, y)` center of the check and the round `t`.
    pub fn coord(&self, v: VertexIndex) -> (i32, i32, usize) {
        let n = self.centers.len();
        let (x, y) = self.centers[v as usize % n];
        (x, y, v as usize / n)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn edge(&self, e: EdgeIndex) -> &Edge {
        &self.edges[e as usize]
    }

    pub fn half_edge(&self, h: EdgeIndex) -> &HalfEdge {
        &self.half_edges[h as usize]
    }

    /// Neighbors `N_v` with the connecting edge, sorted by edge index.
    pub fn neighbors(&self, v: VertexIndex) -> &[(VertexIndex, EdgeIndex)] {
        let v = v as usize;
        &self.adjacency[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn half_edge_at(&self, v: VertexIndex) -> Option<EdgeIndex> {
        let h = self.half_edge_at[v as usize];
        (h != NO_EDGE).then_some(h)
    }

    pub fn endpoints(&self, e: EdgeRef) -> (VertexIndex, Option<VertexIndex>) {
        match e {
            EdgeRef::Edge(i) => (self.edges[i as usize].u, Some(self.edges[i as usize].v)),
            EdgeRef::Half(i) => (self.half_edges[i as usize].u, None),
        }
    }

    pub fn weight(&self, e: EdgeRef) -> f64 {
        match e {
            EdgeRef::Edge(i) => self.edges[i as usize].weight,
            EdgeRef::Half(i) => self.half_edges[i as usize].weight,
        }
    }

    pub fn probability(&self, e: EdgeRef) -> f64 {
        match e {
            EdgeRef::Edge(i) => self.edges[i as usize].probability,
            EdgeRef::Half(i) => self.half_edges[i as usize].probability,
        }
    }

    /// Representative data-qubit error (of the type this graph detects)
    /// left behind by a fault on `e`.
    pub fn data_effect(&self, e: EdgeRef) -> &[usize] {
        match e {
            EdgeRef::Edge(i) => &self.edge_effects[i as usize],
            EdgeRef::Half(i) => &self.half_edge_effects[i as usize],
        }
    }

    fn decode_entry(&self, raw: u32) -> Option<EdgeRef> {
        if raw == NO_EDGE {
            None
        } else if (raw as usize) < self.edges.len() {
            Some(EdgeRef::Edge(raw))
        } else {
            Some(EdgeRef::Half(raw - self.edges.len() as u32))
        }
    }

    /// Edge triggered by a circuit fault, or `None` for a fault this basis
    /// cannot see.
    pub fn edge_for_fault(&self, fault: &FaultEvent) -> Result<Option<EdgeRef>, GraphError> {
        let FaultTable::Circuit { step_offsets, locations_per_round, rounds, entries } = &self.faults else {
            return Err(GraphError::WrongModel("perfect-measurement noise"));
        };
        let loc = fault.location;
        let in_round = step_offsets.get(loc.step).and_then(|&start| {
            let end = step_offsets.get(loc.step + 1).copied().unwrap_or(*locations_per_round);
            (start + loc.event < end).then_some(start + loc.event)
        });
        let Some(in_round) = in_round.filter(|_| loc.round < *rounds) else {
            return Err(GraphError::UnknownFault(*fault));
        };
        let raw = entries[(loc.round * locations_per_round + in_round) * 16 + fault.pauli.code()];
        if raw == NOT_A_LOCATION {
            return Err(GraphError::UnknownFault(*fault));
        }
        Ok(self.decode_entry(raw))
    }

    /// Edge triggered by an error on data qubit `q` (perfect-measurement graphs).
    pub fn edge_for_data_qubit(&self, q: usize) -> Result<Option<EdgeRef>, GraphError> {
        let FaultTable::Data { entries } = &self.faults else {
            return Err(GraphError::WrongModel("circuit-level noise"));
        };
        let raw = *entries.get(q).ok_or(GraphError::UnknownQubit(q))?;
        Ok(self.decode_entry(raw))
    }

    pub fn dump(&self) -> GraphDump {
        GraphDump::new(self)
    }
}

/// Set of defect vertices, sorted and without repeats.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Syndrome {
    defects: Vec<VertexIndex>,
}

impl Syndrome {
    pub fn empty() -> Self {
        Syndrome::default()
    }

    pub fn from_defects(defects: impl IntoIterator<Item = VertexIndex>) -> Self {
        let mut defects: Vec<_> = defects.into_iter().collect();
        defects.sort_unstable();
        defects.dedup();
        Syndrome { defects }
    }

    /// Each occurrence toggles the vertex; vertices hit an even number of times cancel.
    pub fn from_toggles(toggles: impl IntoIterator<Item = VertexIndex>) -> Self {
        let mut v: Vec<_> = toggles.into_iter().collect();
        v.sort_unstable();
        let mut defects = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            let mut j = i;
            while j < v.len() && v[j] == v[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                defects.push(v[i]);
            }
            i = j;
        }
        Syndrome { defects }
    }

    pub fn defects(&self) -> &[VertexIndex] {
        &self.defects
    }

    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn contains(&self, v: VertexIndex) -> bool {
        self.defects.binary_search(&v).is_ok()
    }

    pub fn position(&self, v: VertexIndex) -> Option<usize> {
        self.defects.binary_search(&v).ok()
    }
}

/// A set of edges and half-edges proposed as the fault locations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Correction {
    edges: Vec<EdgeRef>,
}

impl Correction {
    pub fn empty() -> Self {
        Correction::default()
    }

    /// Sorted, with pairs of identical entries cancelled.
    pub fn from_toggles(toggles: impl IntoIterator<Item = EdgeRef>) -> Self {
        let mut v: Vec<_> = toggles.into_iter().collect();
        v.sort_unstable();
        let mut edges = Vec::with_capacity(v.len());
        for e in v {
            if edges.last() == Some(&e) {
                edges.pop();
            } else {
                edges.push(e);
            }
        }
        Correction { edges }
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices incident to an odd number of the correction's edges.
    pub fn syndrome(&self, graph: &DecodingGraph) -> Syndrome {
        Syndrome::from_toggles(self.edges.iter().flat_map(|&e| {
            let (u, v) = graph.endpoints(e);
            std::iter::once(u).chain(v)
        }))
    }

    pub fn weight(&self, graph: &DecodingGraph) -> f64 {
        self.edges.iter().map(|&e| graph.weight(e)).sum()
    }

    /// Data qubits flipped by applying the correction.
    pub fn data_effect(&self, graph: &DecodingGraph) -> Vec<usize> {
        xor_qubits(self.edges.iter().flat_map(|&e| graph.data_effect(e).iter().copied()))
    }
}

pub(crate) fn xor_qubits(qubits: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<_> = qubits.into_iter().collect();
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    for q in v {
        if out.last() == Some(&q) {
            out.pop();
        } else {
            out.push(q);
        }
    }
    out
}

/// Difference syndrome of per-round raw syndrome bits: `s̄(t) = s(t) xor s(t-1)`
/// for `t >= 1`, and `s̄(0) = 0`. Round `t` check `i` maps to vertex
/// `t * width + i`.
pub fn difference_syndrome(raw: &[Vec<bool>]) -> Syndrome {
    let width = raw.first().map_or(0, Vec::len);
    let mut defects = Vec::new();
    for t in 1..raw.len() {
        for i in 0..width {
            if raw[t][i] != raw[t - 1][i] {
                defects.push((t * width + i) as VertexIndex);
            }
        }
    }
    Syndrome { defects }
}

/// Defects produced by a list of circuit faults, by XOR over their edges.
pub fn faults_to_syndrome(graph: &DecodingGraph, faults: &[FaultEvent]) -> Result<Syndrome, GraphError> {
    let mut toggles = Vec::with_capacity(2 * faults.len());
    for f in faults {
        if let Some(e) = graph.edge_for_fault(f)? {
            let (u, v) = graph.endpoints(e);
            toggles.push(u);
            toggles.extend(v);
        }
    }
    Ok(Syndrome::from_toggles(toggles))
}

/// Defects produced by data-qubit errors on a perfect-measurement graph.
pub fn data_errors_to_syndrome(graph: &DecodingGraph, qubits: &[usize]) -> Result<Syndrome, GraphError> {
    let mut toggles = Vec::with_capacity(2 * qubits.len());
    for &q in qubits {
        if let Some(e) = graph.edge_for_data_qubit(q)? {
            let (u, v) = graph.endpoints(e);
            toggles.push(u);
            toggles.extend(v);
        }
    }
    Ok(Syndrome::from_toggles(toggles))
}

/// Defects split by their relation to the boundary.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DefectClasses {
    /// Defects without a half-edge.
    pub bulk: Vec<VertexIndex>,
    /// `∂s̄`: every defect incident to a half-edge.
    pub boundary: Vec<VertexIndex>,
    /// `∂s̄*` ⊆ `∂s̄`: boundary defects with no defect neighbor.
    pub boundary_isolated: Vec<VertexIndex>,
}

impl DefectClasses {
    /// Lower bound on the size of any correction: `(|s̄| - |∂s̄*|)/2 + |∂s̄*|`.
    pub fn correction_lower_bound(&self) -> f64 {
        let total = (self.bulk.len() + self.boundary.len()) as f64;
        let isolated = self.boundary_isolated.len() as f64;
        (total - isolated) / 2.0 + isolated
    }
}

pub fn classify_defects(graph: &DecodingGraph, syndrome: &Syndrome) -> DefectClasses {
    let mut classes = DefectClasses::default();
    for &v in syndrome.defects() {
        if graph.half_edge_at(v).is_some() {
            classes.boundary.push(v);
            if !graph.neighbors(v).iter().any(|&(w, _)| syndrome.contains(w)) {
                classes.boundary_isolated.push(v);
            }
        } else {
            classes.bulk.push(v);
        }
    }
    classes
}
