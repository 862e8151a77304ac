//! Union-Find and minimum-weight perfect matching decoders, and their
//! composition behind the lazy decoder.

mod blossom;
mod mwpm;
mod union_find;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use blossom::max_weight_matching;
pub use mwpm::MwpmDecoder;
pub use union_find::UnionFindDecoder;

use crate::decoding_graph::{Correction, DecodingGraph, Syndrome, VertexIndex};
use crate::lazy_decoder::{lazy_decode, FailureReason, LazyResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecoderKind {
    Lazy,
    UnionFind,
    Mwpm,
    LazyThenUnionFind,
    LazyThenMwpm,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] = [
        DecoderKind::Lazy,
        DecoderKind::UnionFind,
        DecoderKind::Mwpm,
        DecoderKind::LazyThenUnionFind,
        DecoderKind::LazyThenMwpm,
    ];

    pub fn uses_lazy(self) -> bool {
        matches!(self, DecoderKind::Lazy | DecoderKind::LazyThenUnionFind | DecoderKind::LazyThenMwpm)
    }

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Lazy => "lazy",
            DecoderKind::UnionFind => "uf",
            DecoderKind::Mwpm => "mwpm",
            DecoderKind::LazyThenUnionFind => "lazy+uf",
            DecoderKind::LazyThenMwpm => "lazy+mwpm",
        }
    }

    pub fn from_name(name: &str) -> Option<DecoderKind> {
        DecoderKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("defect {0} is not a vertex of the graph")]
    UnknownVertex(VertexIndex),
    #[error("no correction exists: a set of defects of odd size cannot reach the boundary")]
    Unmatchable,
    #[error("lazy decoder failed ({0:?}) and no fallback decoder is configured")]
    LazyFailed(FailureReason),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeRecord {
    pub correction: Correction,
    /// The correction comes from the fallback decoder.
    pub used_fallback: bool,
    /// Failure reason of the lazy stage, when it ran and failed.
    pub lazy_failure: Option<FailureReason>,
    /// Seconds spent in the decode call.
    pub wall_time: f64,
}

fn check_defects(graph: &DecodingGraph, syndrome: &Syndrome) -> Result<(), DecodeError> {
    match syndrome.defects().last() {
        Some(&v) if v as usize >= graph.num_vertices() => Err(DecodeError::UnknownVertex(v)),
        _ => Ok(()),
    }
}

enum Fallback<'g> {
    None,
    UnionFind(UnionFindDecoder<'g>),
    Mwpm(MwpmDecoder<'g>),
}

/// A decoder of one kind bound to one graph, owning its scratch space.
/// Instances are cheap to reuse across calls; use one per worker.
pub struct Decoder<'g> {
    graph: &'g DecodingGraph,
    kind: DecoderKind,
    fallback: Fallback<'g>,
}

impl<'g> Decoder<'g> {
    pub fn new(graph: &'g DecodingGraph, kind: DecoderKind) -> Self {
        let fallback = match kind {
            DecoderKind::Lazy => Fallback::None,
            DecoderKind::UnionFind | DecoderKind::LazyThenUnionFind => Fallback::UnionFind(UnionFindDecoder::new(graph)),
            DecoderKind::Mwpm | DecoderKind::LazyThenMwpm => Fallback::Mwpm(MwpmDecoder::new(graph)),
        };
        Decoder { graph, kind, fallback }
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn decode(&mut self, syndrome: &Syndrome) -> Result<DecodeRecord, DecodeError> {
        let start = Instant::now();
        check_defects(self.graph, syndrome)?;
        let mut lazy_failure = None;
        if self.kind.uses_lazy() {
            let outcome = lazy_decode(self.graph, syndrome);
            match outcome.result {
                LazyResult::Success(correction) => {
                    return Ok(DecodeRecord {
                        correction,
                        used_fallback: false,
                        lazy_failure: None,
                        wall_time: start.elapsed().as_secs_f64(),
                    });
                }
                LazyResult::Failure(reason) => lazy_failure = Some(reason),
            }
        }
        let correction = match &mut self.fallback {
            Fallback::None => return Err(DecodeError::LazyFailed(lazy_failure.expect("lazy stage ran"))),
            Fallback::UnionFind(uf) => uf.decode(syndrome)?,
            Fallback::Mwpm(m) => m.decode(syndrome)?,
        };
        Ok(DecodeRecord { correction, used_fallback: true, lazy_failure, wall_time: start.elapsed().as_secs_f64() })
    }
}

pub fn uf_decode(graph: &DecodingGraph, syndrome: &Syndrome) -> Result<Correction, DecodeError> {
    check_defects(graph, syndrome)?;
    UnionFindDecoder::new(graph).decode(syndrome)
}

pub fn mwpm_decode(graph: &DecodingGraph, syndrome: &Syndrome) -> Result<Correction, DecodeError> {
    check_defects(graph, syndrome)?;
    MwpmDecoder::new(graph).decode(syndrome)
}

/// Lazy decoding first; on failure the fallback of `kind` decodes the
/// original syndrome.
pub fn hierarchical_decode(
    graph: &DecodingGraph,
    syndrome: &Syndrome,
    kind: DecoderKind,
) -> Result<DecodeRecord, DecodeError> {
    Decoder::new(graph, kind).decode(syndrome)
}
