//! Union-Find decoder: unweighted cluster growth by half-edges, then peeling.

use std::collections::VecDeque;

use super::DecodeError;
use crate::decoding_graph::{Correction, DecodingGraph, EdgeIndex, EdgeRef, Syndrome, VertexIndex};

enum Fusion {
    Edge(EdgeIndex),
    Half(VertexIndex),
}

/// Scratch space is sized to the graph and reset sparsely between calls.
pub struct UnionFindDecoder<'g> {
    graph: &'g DecodingGraph,
    parent: Vec<VertexIndex>,
    size: Vec<u32>,
    odd: Vec<bool>,
    at_boundary: Vec<bool>,
    frontier: Vec<Vec<VertexIndex>>,
    in_use: Vec<bool>,
    touched: Vec<VertexIndex>,
    support: Vec<u8>,
    half_support: Vec<u8>,
    grown: Vec<EdgeRef>,
    mark: Vec<bool>,
    seen: Vec<u8>,
    tree_edge: Vec<EdgeIndex>,
}

impl<'g> UnionFindDecoder<'g> {
    pub fn new(graph: &'g DecodingGraph) -> Self {
        let n = graph.num_vertices();
        UnionFindDecoder {
            graph,
            parent: (0..n as VertexIndex).collect(),
            size: vec![1; n],
            odd: vec![false; n],
            at_boundary: vec![false; n],
            frontier: vec![Vec::new(); n],
            in_use: vec![false; n],
            touched: Vec::new(),
            support: vec![0; graph.edges().len()],
            half_support: vec![0; graph.half_edges().len()],
            grown: Vec::new(),
            mark: vec![false; n],
            seen: vec![0; n],
            tree_edge: vec![0; n],
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            let v = v as usize;
            self.parent[v] = v as VertexIndex;
            self.size[v] = 1;
            self.odd[v] = false;
            self.at_boundary[v] = false;
            self.frontier[v].clear();
            self.in_use[v] = false;
            self.mark[v] = false;
            self.seen[v] = 0;
        }
        self.touched.clear();
        for &e in &self.grown {
            match e {
                EdgeRef::Edge(i) => self.support[i as usize] = 0,
                EdgeRef::Half(i) => self.half_support[i as usize] = 0,
            }
        }
        self.grown.clear();
    }

    fn touch(&mut self, v: VertexIndex) {
        if !self.in_use[v as usize] {
            self.in_use[v as usize] = true;
            self.touched.push(v);
            self.frontier[v as usize].push(v);
        }
    }

    fn find(&mut self, v: VertexIndex) -> VertexIndex {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut v = v;
        while self.parent[v as usize] != root {
            let next = self.parent[v as usize];
            self.parent[v as usize] = root;
            v = next;
        }
        root
    }

    fn union(&mut self, a: VertexIndex, b: VertexIndex) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] { (a, b) } else { (b, a) };
        let (big, small) = (big as usize, small as usize);
        self.parent[small] = big as VertexIndex;
        self.size[big] += self.size[small];
        self.odd[big] ^= self.odd[small];
        self.at_boundary[big] |= self.at_boundary[small];
        let moved = std::mem::take(&mut self.frontier[small]);
        self.frontier[big].extend(moved);
    }

    fn saturated(&self, v: VertexIndex) -> bool {
        self.graph.neighbors(v).iter().all(|&(_, e)| self.support[e as usize] >= 2)
            && self.graph.half_edge_at(v).is_none_or(|h| self.half_support[h as usize] >= 2)
    }

    fn active(&self, root: VertexIndex) -> bool {
        self.odd[root as usize] && !self.at_boundary[root as usize]
    }

    pub fn decode(&mut self, syndrome: &Syndrome) -> Result<Correction, DecodeError> {
        self.reset();
        let graph = self.graph;
        for &v in syndrome.defects() {
            self.touch(v);
            self.odd[v as usize] = true;
            self.mark[v as usize] = true;
        }
        let mut active: Vec<VertexIndex> = syndrome.defects().to_vec();
        let mut fusions = Vec::new();
        while !active.is_empty() {
            for &root in &active {
                for &v in &self.frontier[root as usize] {
                    for &(_, e) in graph.neighbors(v) {
                        let s = &mut self.support[e as usize];
                        if *s < 2 {
                            if *s == 0 {
                                self.grown.push(EdgeRef::Edge(e));
                            }
                            *s += 1;
                            if *s == 2 {
                                fusions.push(Fusion::Edge(e));
                            }
                        }
                    }
                    if let Some(h) = graph.half_edge_at(v) {
                        let s = &mut self.half_support[h as usize];
                        if *s < 2 {
                            if *s == 0 {
                                self.grown.push(EdgeRef::Half(h));
                            }
                            *s += 1;
                            if *s == 2 {
                                fusions.push(Fusion::Half(v));
                            }
                        }
                    }
                }
            }
            for f in fusions.drain(..) {
                match f {
                    Fusion::Edge(e) => {
                        let edge = graph.edge(e);
                        self.touch(edge.u);
                        self.touch(edge.v);
                        self.union(edge.u, edge.v);
                    }
                    Fusion::Half(v) => {
                        let r = self.find(v);
                        self.at_boundary[r as usize] = true;
                    }
                }
            }
            let mut next = Vec::with_capacity(active.len());
            for &r in &active {
                let r = self.find(r);
                if self.active(r) && !next.contains(&r) {
                    next.push(r);
                }
            }
            for &r in &next {
                let mut list = std::mem::take(&mut self.frontier[r as usize]);
                list.retain(|&v| !self.saturated(v));
                if list.is_empty() {
                    return Err(DecodeError::Unmatchable);
                }
                self.frontier[r as usize] = list;
            }
            active = next;
        }
        self.peel(syndrome)
    }

    fn grown_half(&self, v: VertexIndex) -> Option<EdgeIndex> {
        self.graph.half_edge_at(v).filter(|&h| self.half_support[h as usize] == 2)
    }

    fn peel(&mut self, syndrome: &Syndrome) -> Result<Correction, DecodeError> {
        let graph = self.graph;
        let mut correction = Vec::new();
        let mut component = Vec::new();
        let mut queue = VecDeque::new();
        for &d in syndrome.defects() {
            if self.seen[d as usize] != 0 {
                continue;
            }
            // pass 1: collect the grown component of d
            component.clear();
            self.seen[d as usize] = 1;
            queue.push_back(d);
            while let Some(v) = queue.pop_front() {
                component.push(v);
                for &(w, e) in graph.neighbors(v) {
                    if self.support[e as usize] == 2 && self.seen[w as usize] == 0 {
                        self.seen[w as usize] = 1;
                        queue.push_back(w);
                    }
                }
            }
            // pass 2: spanning tree rooted at a boundary vertex when there is one
            let root = component.iter().copied().find(|&v| self.grown_half(v).is_some()).unwrap_or(d);
            let mut order = Vec::with_capacity(component.len());
            self.seen[root as usize] = 2;
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &(w, e) in graph.neighbors(v) {
                    if self.support[e as usize] == 2 && self.seen[w as usize] == 1 {
                        self.seen[w as usize] = 2;
                        self.tree_edge[w as usize] = e;
                        queue.push_back(w);
                    }
                }
            }
            for &v in order[1..].iter().rev() {
                if self.mark[v as usize] {
                    let e = self.tree_edge[v as usize];
                    let edge = graph.edge(e);
                    let up = if edge.u == v { edge.v } else { edge.u };
                    correction.push(EdgeRef::Edge(e));
                    self.mark[v as usize] = false;
                    self.mark[up as usize] ^= true;
                }
            }
            if self.mark[root as usize] {
                let h = self.grown_half(root).ok_or(DecodeError::Unmatchable)?;
                correction.push(EdgeRef::Half(h));
                self.mark[root as usize] = false;
            }
        }
        Ok(Correction::from_toggles(correction))
    }
}
