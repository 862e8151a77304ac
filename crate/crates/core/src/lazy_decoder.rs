//! Lazy pre-decoder.
//!
//! Pass 1 scans the edges in canonical order and matches every edge whose two
//! endpoints are still unmatched defects. Pass 2 scans the half-edges and
//! sends each remaining defect with a half-edge to the boundary, counting the
//! choice as ambiguous when the vertex has a defect neighbor. Two ambiguous
//! choices, or a defect left over, make the decoder give up.
//!
//! Only edges between two defects can pass the pass-1 test, so the scan below
//! visits the neighbor lists of defects instead of the whole edge list. It
//! visits them in edge-index order, so the result is that of the full scan.

use serde::Serialize;
use thiserror::Error;

use crate::decoding_graph::{Correction, DecodingGraph, EdgeRef, Syndrome, VertexIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FailureReason {
    /// A second ambiguous half-edge was selected.
    TooManyAmbiguous,
    /// Some defect was left without an edge or half-edge.
    ResidualSyndrome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LazyResult {
    Success(Correction),
    Failure(FailureReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LazyOutcome {
    pub result: LazyResult,
    /// `N_amb` when the decoder returned.
    pub ambiguous_count: u32,
}

impl LazyOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self.result, LazyResult::Success(_))
    }

    pub fn correction(&self) -> Option<&Correction> {
        match &self.result {
            LazyResult::Success(c) => Some(c),
            LazyResult::Failure(_) => None,
        }
    }

    pub fn failure(&self) -> Option<FailureReason> {
        match self.result {
            LazyResult::Success(_) => None,
            LazyResult::Failure(r) => Some(r),
        }
    }
}

/// Which defect set the ambiguity test of pass 2 looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityRule {
    /// `N_u ∩ s̄ ≠ ∅` with the input syndrome.
    #[default]
    Original,
    /// `N_u ∩ s̄' ≠ ∅` with the defects still unmatched.
    Working,
}

pub fn lazy_decode(graph: &DecodingGraph, syndrome: &Syndrome) -> LazyOutcome {
    lazy_decode_with(graph, syndrome, AmbiguityRule::Original)
}

pub fn lazy_decode_with(graph: &DecodingGraph, syndrome: &Syndrome, rule: AmbiguityRule) -> LazyOutcome {
    let defects = syndrome.defects();
    // open[i]: defects[i] is still in s̄'
    let mut open = vec![true; defects.len()];
    let mut chosen = Vec::with_capacity(defects.len());

    for (i, &u) in defects.iter().enumerate() {
        for &(w, e) in graph.neighbors(u) {
            if !open[i] {
                break;
            }
            if w <= u {
                continue;
            }
            if let Some(j) = syndrome.position(w) {
                if open[j] {
                    open[i] = false;
                    open[j] = false;
                    chosen.push(EdgeRef::Edge(e));
                }
            }
        }
    }

    let mut ambiguous = 0;
    let mut residual = false;
    for (i, &u) in defects.iter().enumerate() {
        if !open[i] {
            continue;
        }
        let Some(h) = graph.half_edge_at(u) else {
            residual = true;
            continue;
        };
        chosen.push(EdgeRef::Half(h));
        open[i] = false;
        let hit = graph.neighbors(u).iter().any(|&(w, _)| match (rule, syndrome.position(w)) {
            (_, None) => false,
            (AmbiguityRule::Original, Some(_)) => true,
            (AmbiguityRule::Working, Some(j)) => open[j],
        });
        if hit {
            ambiguous += 1;
            if ambiguous > 1 {
                return LazyOutcome { result: LazyResult::Failure(FailureReason::TooManyAmbiguous), ambiguous_count: ambiguous };
            }
        }
    }
    let result = if residual {
        LazyResult::Failure(FailureReason::ResidualSyndrome)
    } else {
        LazyResult::Success(Correction::from_toggles(chosen))
    };
    LazyOutcome { result, ambiguous_count: ambiguous }
}

/// Bits sent to the decoding unit for one basis over a `d`-round window:
/// nothing on success, every syndrome bit of the basis on failure.
pub fn count_message_bits(outcome: &LazyOutcome, d: usize) -> u64 {
    if outcome.is_success() {
        0
    } else {
        window_message_bits(d)
    }
}

/// Syndrome bits of one basis over `d` rounds: `(d^2 - 1) / 2 * d`.
pub fn window_message_bits(d: usize) -> u64 {
    ((d * d - 1) / 2 * d) as u64
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StreamError {
    #[error("graph has an edge spanning {0} rounds; streaming needs edges within adjacent rounds")]
    LongEdge(usize),
    #[error("round {round} has {got} syndrome bits, expected {expected}")]
    RoundWidth { round: usize, got: usize, expected: usize },
    #[error("window has {0} rounds, all were already received")]
    TooManyRounds(usize),
    #[error("window has {expected} rounds, only {got} were received")]
    MissingRounds { got: usize, expected: usize },
}

/// Decisions about the defects of one round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundDecision {
    pub round: usize,
    /// Edges whose smaller endpoint lies in `round`, and half-edges of `round`.
    /// Empty once the window has failed.
    pub edges: Vec<EdgeRef>,
    /// The window is known to fail; raw syndrome goes to the decoding unit.
    pub window_failed: bool,
}

/// Lazy decoding on the fly, holding three rounds of syndrome.
///
/// Edges join vertices of the same or adjacent rounds, so when round `k`
/// arrives the pass-1 decisions for edges starting in round `k - 1` are
/// final, and the pass-2 decisions of round `k - 2` can be emitted. The
/// outcome returned by [`finish`](Self::finish) equals [`lazy_decode`] on
/// the whole window.
#[derive(Debug, Clone)]
pub struct StreamingLazyDecoder<'g> {
    graph: &'g DecodingGraph,
    rule: AmbiguityRule,
    width: usize,
    received: usize,
    previous: Vec<bool>,
    defect: Vec<bool>,
    open: Vec<bool>,
    by_round: Vec<Vec<VertexIndex>>,
    pass1: Vec<Vec<EdgeRef>>,
    chosen: Vec<EdgeRef>,
    ambiguous: u32,
    too_many: bool,
    residual: bool,
}

impl<'g> StreamingLazyDecoder<'g> {
    pub fn new(graph: &'g DecodingGraph) -> Result<Self, StreamError> {
        Self::with_rule(graph, AmbiguityRule::Original)
    }

    pub fn with_rule(graph: &'g DecodingGraph, rule: AmbiguityRule) -> Result<Self, StreamError> {
        let width = graph.checks_per_round();
        let span = graph.edges().iter().map(|e| (e.v as usize / width) - (e.u as usize / width)).max().unwrap_or(0);
        if span > 1 {
            return Err(StreamError::LongEdge(span));
        }
        let n = graph.num_vertices();
        Ok(StreamingLazyDecoder {
            graph,
            rule,
            width,
            received: 0,
            previous: vec![false; width],
            defect: vec![false; n],
            open: vec![false; n],
            by_round: vec![Vec::new(); graph.rounds()],
            pass1: vec![Vec::new(); graph.rounds()],
            chosen: Vec::new(),
            ambiguous: 0,
            too_many: false,
            residual: false,
        })
    }

    pub fn failed(&self) -> bool {
        self.too_many || self.residual
    }

    pub fn ambiguous_count(&self) -> u32 {
        self.ambiguous
    }

    /// Feeds the raw syndrome bits of the next round and returns the
    /// decisions that became final.
    pub fn push_round(&mut self, raw: &[bool]) -> Result<Option<RoundDecision>, StreamError> {
        let k = self.received;
        if k >= self.graph.rounds() {
            return Err(StreamError::TooManyRounds(self.graph.rounds()));
        }
        if raw.len() != self.width {
            return Err(StreamError::RoundWidth { round: k, got: raw.len(), expected: self.width });
        }
        if k > 0 {
            for (i, (&now, &before)) in raw.iter().zip(&self.previous).enumerate() {
                if now != before {
                    let v = k * self.width + i;
                    self.defect[v] = true;
                    self.open[v] = true;
                    self.by_round[k].push(v as VertexIndex);
                }
            }
        }
        self.previous.copy_from_slice(raw);
        self.received += 1;
        if k >= 1 {
            self.match_edges(k - 1);
        }
        Ok(if k >= 2 { Some(self.settle(k - 2)) } else { None })
    }

    /// Completes the window and returns the remaining decisions with the outcome.
    pub fn finish(mut self) -> Result<(Vec<RoundDecision>, LazyOutcome), StreamError> {
        let rounds = self.graph.rounds();
        if self.received != rounds {
            return Err(StreamError::MissingRounds { got: self.received, expected: rounds });
        }
        self.match_edges(rounds - 1);
        let tail = rounds.saturating_sub(2)..rounds;
        let decisions = tail.map(|r| self.settle(r)).collect();
        let result = if self.too_many {
            LazyResult::Failure(FailureReason::TooManyAmbiguous)
        } else if self.residual {
            LazyResult::Failure(FailureReason::ResidualSyndrome)
        } else {
            LazyResult::Success(Correction::from_toggles(self.chosen))
        };
        Ok((decisions, LazyOutcome { result, ambiguous_count: self.ambiguous }))
    }

    /// Pass 1 over edges whose smaller endpoint is in round `r`.
    fn match_edges(&mut self, r: usize) {
        for &u in &self.by_round[r] {
            for &(w, e) in self.graph.neighbors(u) {
                if !self.open[u as usize] {
                    break;
                }
                if w > u && self.open[w as usize] {
                    self.open[u as usize] = false;
                    self.open[w as usize] = false;
                    self.pass1[r].push(EdgeRef::Edge(e));
                }
            }
        }
    }

    /// Pass 2 over the half-edges of round `r`.
    fn settle(&mut self, r: usize) -> RoundDecision {
        let mut edges = std::mem::take(&mut self.pass1[r]);
        for i in 0..self.by_round[r].len() {
            let u = self.by_round[r][i];
            if !self.open[u as usize] || self.too_many {
                continue;
            }
            let Some(h) = self.graph.half_edge_at(u) else {
                self.residual = true;
                continue;
            };
            edges.push(EdgeRef::Half(h));
            self.open[u as usize] = false;
            let hit = self.graph.neighbors(u).iter().any(|&(w, _)| match self.rule {
                AmbiguityRule::Original => self.defect[w as usize],
                AmbiguityRule::Working => self.open[w as usize],
            });
            if hit {
                self.ambiguous += 1;
                if self.ambiguous > 1 {
                    self.too_many = true;
                }
            }
        }
        // defects left open in round r can no longer be matched
        if self.by_round[r].iter().any(|&u| self.open[u as usize]) {
            self.residual = true;
        }
        let failed = self.failed();
        if !failed {
            self.chosen.extend_from_slice(&edges);
        }
        RoundDecision { round: r, edges: if failed { Vec::new() } else { edges }, window_failed: failed }
    }
}

/// Streams `rounds` raw syndrome rounds through a [`StreamingLazyDecoder`].
pub fn lazy_decode_stream<I, R>(graph: &DecodingGraph, rounds: I) -> Result<(Vec<RoundDecision>, LazyOutcome), StreamError>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[bool]>,
{
    let mut decoder = StreamingLazyDecoder::new(graph)?;
    let mut decisions = Vec::new();
    for raw in rounds {
        decisions.extend(decoder.push_round(raw.as_ref())?);
    }
    let (tail, outcome) = decoder.finish()?;
    decisions.extend(tail);
    Ok((decisions, outcome))
}

#[cfg(test)]
mod tests;
