//! Minimum-weight perfect matching over shortest-path distances between
//! defects, with one boundary copy per defect.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{max_weight_matching, DecodeError};
use crate::decoding_graph::{Correction, DecodingGraph, EdgeIndex, EdgeRef, Syndrome, VertexIndex};

const SCALE: f64 = (1u64 << 24) as f64;
const NO_EDGE: EdgeIndex = EdgeIndex::MAX;

#[derive(PartialEq)]
struct Item(f64, VertexIndex);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct MwpmDecoder<'g> {
    graph: &'g DecodingGraph,
    /// Drop defect pairs that are farther apart than both of their boundaries.
    prune: bool,
    has_boundary: bool,
    dist: Vec<f64>,
    pred: Vec<EdgeIndex>,
    done: Vec<bool>,
    touched: Vec<VertexIndex>,
    heap: BinaryHeap<Item>,
}

/// Distances found by one Dijkstra run from a defect.
struct Reach {
    /// Distance to each defect, by position in the syndrome.
    to_defect: Vec<f64>,
    boundary: f64,
}

impl<'g> MwpmDecoder<'g> {
    pub fn new(graph: &'g DecodingGraph) -> Self {
        let n = graph.num_vertices();
        MwpmDecoder {
            graph,
            prune: true,
            has_boundary: !graph.half_edges().is_empty(),
            dist: vec![f64::INFINITY; n],
            pred: vec![NO_EDGE; n],
            done: vec![false; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    /// Turns pair pruning on or off. The matching found is optimal either way.
    pub fn with_pruning(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    fn clear(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = f64::INFINITY;
            self.pred[v as usize] = NO_EDGE;
            self.done[v as usize] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }

    fn relax(&mut self, v: VertexIndex, d: f64, via: EdgeIndex) {
        let slot = &mut self.dist[v as usize];
        if d < *slot {
            if slot.is_infinite() {
                self.touched.push(v);
            }
            *slot = d;
            self.pred[v as usize] = via;
            self.heap.push(Item(d, v));
        }
    }

    /// Dijkstra from `source` until every defect is settled and no vertex
    /// closer than the best boundary exit is left. Returns the boundary exit
    /// vertex along with the distances.
    fn search(&mut self, source: VertexIndex, syndrome: &Syndrome, stop_at: Option<VertexIndex>) -> (Reach, Option<VertexIndex>) {
        self.clear();
        let graph = self.graph;
        let defects = syndrome.defects();
        let mut to_defect = vec![f64::INFINITY; defects.len()];
        let mut remaining = defects.len();
        let mut boundary = f64::INFINITY;
        let mut exit = None;
        self.relax(source, 0.0, NO_EDGE);
        while let Some(Item(d, v)) = self.heap.pop() {
            if self.done[v as usize] {
                continue;
            }
            if remaining == 0 && d >= boundary {
                break;
            }
            self.done[v as usize] = true;
            if let Some(i) = syndrome.position(v) {
                to_defect[i] = d;
                remaining -= 1;
            }
            if Some(v) == stop_at {
                break;
            }
            if let Some(h) = graph.half_edge_at(v) {
                let b = d + graph.half_edge(h).weight;
                if b < boundary {
                    boundary = b;
                    exit = Some(v);
                }
            }
            for &(w, e) in graph.neighbors(v) {
                if !self.done[w as usize] {
                    self.relax(w, d + graph.edge(e).weight, e);
                }
            }
        }
        (Reach { to_defect, boundary }, exit)
    }

    /// Edges of the shortest path from the last search source to `target`.
    fn trace(&self, target: VertexIndex, out: &mut Vec<EdgeRef>) {
        let mut v = target;
        while self.pred[v as usize] != NO_EDGE {
            let e = self.pred[v as usize];
            out.push(EdgeRef::Edge(e));
            let edge = self.graph.edge(e);
            v = if edge.u == v { edge.v } else { edge.u };
        }
    }

    pub fn decode(&mut self, syndrome: &Syndrome) -> Result<Correction, DecodeError> {
        let defects = syndrome.defects();
        let k = defects.len();
        if k == 0 {
            return Ok(Correction::empty());
        }
        if !self.has_boundary && k % 2 == 1 {
            return Err(DecodeError::Unmatchable);
        }
        let reach: Vec<Reach> = defects.iter().map(|&s| self.search(s, syndrome, None).0).collect();

        let mut weighted = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let d = reach[i].to_defect[j];
                if !d.is_finite() {
                    continue;
                }
                if self.prune && self.has_boundary && d > reach[i].boundary + reach[j].boundary {
                    continue;
                }
                weighted.push((i, j, d));
            }
            if self.has_boundary {
                if reach[i].boundary.is_finite() {
                    weighted.push((i, k + i, reach[i].boundary));
                }
                for j in i + 1..k {
                    weighted.push((k + i, k + j, 0.0));
                }
            }
        }
        let top = weighted.iter().map(|w| (w.2 * SCALE).round() as i64).max().unwrap_or(0) + 1;
        let edges: Vec<(usize, usize, i64)> =
            weighted.iter().map(|&(a, b, w)| (a, b, top - (w * SCALE).round() as i64)).collect();
        let mate = max_weight_matching(&edges, true);
        let nodes = if self.has_boundary { 2 * k } else { k };
        if mate.len() < nodes || mate.iter().take(nodes).any(Option::is_none) {
            return Err(DecodeError::Unmatchable);
        }

        let mut toggles = Vec::new();
        for i in 0..k {
            let m = mate[i].expect("perfect matching");
            if m < k {
                if m > i {
                    self.search(defects[i], syndrome, Some(defects[m]));
                    self.trace(defects[m], &mut toggles);
                }
            } else {
                let (_, exit) = self.search(defects[i], syndrome, None);
                let exit = exit.ok_or(DecodeError::Unmatchable)?;
                self.trace(exit, &mut toggles);
                toggles.push(EdgeRef::Half(self.graph.half_edge_at(exit).expect("exit has a half-edge")));
            }
        }
        Ok(Correction::from_toggles(toggles))
    }
}
