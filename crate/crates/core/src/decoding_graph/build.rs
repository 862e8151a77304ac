use std::collections::HashMap;
use std::ops::Range;

use super::{
    xor_qubits, DecodingGraph, Edge, EdgeClass, FaultTable, GraphError, GraphModel, HalfEdge, VertexIndex, NO_EDGE,
    NOT_A_LOCATION,
};
use crate::code_model::{Basis, CircuitSchedule, CodeLayout, GateEvent};
use crate::noise::{FaultEvent, FaultLocation, FaultPauli, NoiseMode, NoiseParams, RoundLocations};

/// Rounds covered by a circuit-level graph and the rounds in which faults occur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphWindow {
    pub rounds: usize,
    pub noisy: Range<usize>,
}

impl GraphWindow {
    /// Every round is noisy.
    pub fn open(rounds: usize) -> Self {
        GraphWindow { rounds, noisy: 0..rounds }
    }

    /// `noisy_rounds` noisy rounds between a noiseless first round and a
    /// noiseless closing round.
    pub fn closed(noisy_rounds: usize) -> Self {
        GraphWindow { rounds: noisy_rounds + 2, noisy: 1..noisy_rounds + 1 }
    }
}

/// Pauli frame restricted to the qubits it acts on.
#[derive(Debug, Clone, Default, PartialEq)]
struct Frame(Vec<(usize, bool, bool)>);

impl Frame {
    fn get(&self, q: usize) -> (bool, bool) {
        self.0.iter().find(|e| e.0 == q).map_or((false, false), |e| (e.1, e.2))
    }

    fn toggle(&mut self, q: usize, x: bool, z: bool) {
        match self.0.iter_mut().find(|e| e.0 == q) {
            Some(e) => {
                e.1 ^= x;
                e.2 ^= z;
            }
            None => self.0.push((q, x, z)),
        }
    }

    fn remove(&mut self, q: usize) {
        self.0.retain(|e| e.0 != q);
    }

    fn prune(&mut self) {
        self.0.retain(|e| e.1 || e.2);
    }
}

/// What a fault does by the end of its round: flipped measurements of this
/// round (global plaquette ids) and the Pauli left on data qubits.
#[derive(Debug, Clone, Default, PartialEq)]
struct RoundEffect {
    meas: Vec<usize>,
    data: Frame,
}

impl RoundEffect {
    fn xor(&mut self, other: &RoundEffect) {
        for &m in &other.meas {
            match self.meas.iter().position(|&x| x == m) {
                Some(i) => {
                    self.meas.swap_remove(i);
                }
                None => self.meas.push(m),
            }
        }
        for &(q, x, z) in &other.data.0 {
            self.data.toggle(q, x, z);
        }
        self.data.prune();
    }
}

struct Propagator<'s> {
    schedule: &'s CircuitSchedule,
    /// `event_of[step][qubit]`: index of the event touching `qubit` in `step`.
    event_of: Vec<Vec<u32>>,
}

impl<'s> Propagator<'s> {
    fn new(schedule: &'s CircuitSchedule) -> Self {
        let event_of = schedule
            .steps()
            .iter()
            .map(|step| {
                let mut map = vec![u32::MAX; schedule.num_qubits()];
                for (i, ev) in step.iter().enumerate() {
                    let (a, b) = ev.qubits();
                    map[a] = i as u32;
                    if let Some(b) = b {
                        map[b] = i as u32;
                    }
                }
                map
            })
            .collect();
        Propagator { schedule, event_of }
    }

    /// Pushes a Pauli injected after `step` through the rest of the round.
    fn propagate(&self, step: usize, mut frame: Frame) -> RoundEffect {
        let steps = self.schedule.steps();
        let mut meas = Vec::new();
        let mut touched = Vec::new();
        for s in step + 1..steps.len() {
            touched.clear();
            touched.extend(frame.0.iter().map(|e| self.event_of[s][e.0]));
            touched.sort_unstable();
            touched.dedup();
            for &ev in &touched {
                match steps[s][ev as usize] {
                    GateEvent::Cnot { control, target } => {
                        let (xc, _) = frame.get(control);
                        let (_, zt) = frame.get(target);
                        frame.toggle(target, xc, false);
                        frame.toggle(control, false, zt);
                    }
                    GateEvent::MeasureAncilla { qubit, basis, plaquette } => {
                        let (x, z) = frame.get(qubit);
                        let flipped = match basis {
                            Basis::X => z,
                            Basis::Z => x,
                        };
                        if flipped {
                            meas.push(plaquette);
                        }
                        frame.remove(qubit);
                    }
                    GateEvent::PrepAncilla { qubit, .. } => frame.remove(qubit),
                    GateEvent::Wait { .. } => {}
                }
            }
            frame.prune();
        }
        frame.0.retain(|e| self.schedule.is_data_qubit(e.0));
        frame.0.sort_unstable_by_key(|e| e.0);
        RoundEffect { meas, data: frame }
    }

    /// Effect of every fault at one location, as `(pauli code, effect, probability)`.
    fn location_faults(&self, step: usize, event: &GateEvent, p: f64) -> Vec<(FaultPauli, RoundEffect, f64)> {
        let single = |q: usize, x: bool, z: bool| self.propagate(step, Frame(vec![(q, x, z)]));
        let combine = |parts: &[(bool, &RoundEffect)]| {
            let mut acc = RoundEffect::default();
            for (on, e) in parts {
                if *on {
                    acc.xor(e);
                }
            }
            acc
        };
        match *event {
            GateEvent::PrepAncilla { qubit, .. } | GateEvent::Wait { qubit } => {
                let (ex, ez) = (single(qubit, true, false), single(qubit, false, true));
                crate::noise::Pauli1::ALL
                    .iter()
                    .map(|&pa| {
                        let eff = combine(&[(pa.has_x(), &ex), (pa.has_z(), &ez)]);
                        (FaultPauli::Single(pa), eff, p / 3.0)
                    })
                    .collect()
            }
            GateEvent::Cnot { control, target } => {
                let comps = [
                    single(control, true, false),
                    single(control, false, true),
                    single(target, true, false),
                    single(target, false, true),
                ];
                FaultPauli::all_pairs()
                    .map(|fp| {
                        let FaultPauli::Pair(a, b) = fp else { unreachable!() };
                        let eff = combine(&[
                            (a.is_some_and(|p| p.has_x()), &comps[0]),
                            (a.is_some_and(|p| p.has_z()), &comps[1]),
                            (b.is_some_and(|p| p.has_x()), &comps[2]),
                            (b.is_some_and(|p| p.has_z()), &comps[3]),
                        ]);
                        (fp, eff, p / 15.0)
                    })
                    .collect()
            }
            GateEvent::MeasureAncilla { plaquette, .. } => {
                vec![(FaultPauli::MeasFlip, RoundEffect { meas: vec![plaquette], data: Frame::default() }, 2.0 * p / 3.0)]
            }
        }
    }
}

/// Effect of a fault projected on one check basis.
struct Signature {
    pauli: FaultPauli,
    /// Checks whose difference syndrome flips in the fault's round.
    now: Vec<usize>,
    /// Checks whose difference syndrome flips in the next round.
    next: Vec<usize>,
    /// Data qubits left with an error of the detected type.
    data: Vec<usize>,
    probability: f64,
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    xor_qubits(a.iter().chain(b).copied())
}

fn signature(
    layout: &CodeLayout,
    schedule: &CircuitSchedule,
    basis: Basis,
    (pauli, eff, probability): (FaultPauli, RoundEffect, f64),
) -> Signature {
    let now = xor_qubits(eff.meas.iter().filter_map(|&pid| {
        let (b, i) = schedule.plaquette_basis(pid);
        (b == basis).then_some(i)
    }));
    let data: Vec<usize> = eff
        .data
        .0
        .iter()
        .filter(|&&(_, x, z)| match basis {
            Basis::X => z,
            Basis::Z => x,
        })
        .map(|e| e.0)
        .collect();
    let syn = xor_qubits(data.iter().flat_map(|&q| layout.checks_of_qubit(q, basis).iter().copied()));
    let next = xor_sorted(&now, &syn);
    Signature { pauli, now, next, data, probability }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Half(VertexIndex),
    Edge(VertexIndex, VertexIndex),
}

struct Accumulator {
    probability: f64,
    effect: Vec<usize>,
}

#[derive(Default)]
struct EdgeSet {
    acc: HashMap<Key, Accumulator>,
}

impl EdgeSet {
    /// Folds the (mutually exclusive) faults of one location into the set:
    /// contributions to the same key are summed, then XOR-combined with
    /// what independent locations already contributed.
    fn fold_location(&mut self, local: &mut Vec<(Key, f64, Vec<usize>)>) {
        local.sort_by_key(|(k, ..)| match *k {
            Key::Half(u) => (u, u32::MAX),
            Key::Edge(u, v) => (u, v),
        });
        let mut i = 0;
        while i < local.len() {
            let key = local[i].0;
            let mut q = 0.0;
            let mut j = i;
            while j < local.len() && local[j].0 == key {
                q += local[j].1;
                j += 1;
            }
            let effect = std::mem::take(&mut local[i].2);
            let acc = self.acc.entry(key).or_insert(Accumulator { probability: 0.0, effect });
            acc.probability = acc.probability * (1.0 - q) + q * (1.0 - acc.probability);
            i = j;
        }
        local.clear();
    }
}

fn weight_of(p: f64) -> f64 {
    let p = p.clamp(1e-15, 0.5);
    ((1.0 - p) / p).ln()
}

fn key_for(dets: &[VertexIndex]) -> Option<Key> {
    match *dets {
        [] => None,
        [u] => Some(Key::Half(u)),
        [a, b] => Some(Key::Edge(a.min(b), a.max(b))),
        _ => None,
    }
}

/// Sorts accumulated keys into canonical order and returns the key → entry map.
fn finish(
    set: EdgeSet,
    checks_per_round: usize,
) -> (Vec<(Edge, Vec<usize>)>, Vec<(HalfEdge, Vec<usize>)>, HashMap<Key, u32>) {
    let n = checks_per_round as u32;
    let class = |u: u32, v: u32| {
        if u / n == v / n {
            EdgeClass::Space
        } else if u % n == v % n {
            EdgeClass::Time
        } else {
            EdgeClass::Diagonal
        }
    };
    let mut edges = Vec::new();
    let mut halves = Vec::new();
    for (key, acc) in set.acc {
        match key {
            Key::Edge(u, v) => edges.push((
                Edge { u, v, probability: acc.probability, weight: weight_of(acc.probability), class: class(u, v) },
                acc.effect,
            )),
            Key::Half(u) => halves.push((
                HalfEdge { u, probability: acc.probability, weight: weight_of(acc.probability) },
                acc.effect,
            )),
        }
    }
    edges.sort_by_key(|(e, _)| (e.u, e.class, e.v));
    halves.sort_by_key(|(h, _)| h.u);
    let mut index = HashMap::with_capacity(edges.len() + halves.len());
    for (i, (e, _)) in edges.iter().enumerate() {
        index.insert(Key::Edge(e.u, e.v), i as u32);
    }
    for (i, (h, _)) in halves.iter().enumerate() {
        index.insert(Key::Half(h.u), (edges.len() + i) as u32);
    }
    (edges, halves, index)
}

impl DecodingGraph {
    /// Circuit-level graph of `check_basis` over a window of rounds.
    pub fn circuit_level(
        layout: &CodeLayout,
        schedule: &CircuitSchedule,
        window: &GraphWindow,
        noise: NoiseParams,
        check_basis: Basis,
    ) -> Result<DecodingGraph, GraphError> {
        if noise.mode != NoiseMode::CircuitLevel {
            return Err(crate::noise::NoiseError::WrongMode("circuit-level graph", NoiseMode::CircuitLevel).into());
        }
        if window.rounds == 0 {
            return Err(crate::noise::NoiseError::NoRounds.into());
        }
        let rounds = window.rounds;
        let n = layout.num_checks(check_basis);
        let locations = RoundLocations::new(schedule);
        let per_round = locations.len();
        let propagator = Propagator::new(schedule);
        let signatures: Vec<Vec<Signature>> = locations
            .slots
            .iter()
            .map(|&(s, e)| {
                propagator
                    .location_faults(s, &schedule.steps()[s][e], noise.p)
                    .into_iter()
                    .map(|f| signature(layout, schedule, check_basis, f))
                    .collect()
            })
            .collect();

        let mut keys = vec![NOT_A_LOCATION as u64; rounds * per_round * 16];
        const NONE_KEY: u64 = u64::MAX - 1;
        let encode = |k: Option<Key>| match k {
            None => NONE_KEY,
            Some(Key::Half(u)) => ((u as u64) << 32) | u32::MAX as u64,
            Some(Key::Edge(u, v)) => ((u as u64) << 32) | v as u64,
        };
        let mut set = EdgeSet::default();
        let mut local = Vec::new();
        let mut dets = Vec::with_capacity(8);
        for round in window.noisy.start..window.noisy.end.min(rounds) {
            for (li, sigs) in signatures.iter().enumerate() {
                for sig in sigs {
                    dets.clear();
                    if round >= 1 {
                        dets.extend(sig.now.iter().map(|&i| (round * n + i) as VertexIndex));
                    }
                    if round + 1 < rounds {
                        dets.extend(sig.next.iter().map(|&i| ((round + 1) * n + i) as VertexIndex));
                    }
                    if dets.len() > 2 {
                        let (step, event) = locations.slots[li];
                        let fault = FaultEvent { location: FaultLocation { round, step, event }, pauli: sig.pauli };
                        return Err(GraphError::HyperedgeFault(fault, dets.len()));
                    }
                    let key = key_for(&dets);
                    keys[(round * per_round + li) * 16 + sig.pauli.code()] = encode(key);
                    if let Some(k) = key {
                        if sig.probability > 0.0 {
                            local.push((k, sig.probability, sig.data.clone()));
                        }
                    }
                }
                set.fold_location(&mut local);
            }
        }

        let (edges, halves, index) = finish(set, n);
        let entries = keys
            .into_iter()
            .map(|raw| match raw {
                r if r == NOT_A_LOCATION as u64 => NOT_A_LOCATION,
                NONE_KEY => NO_EDGE,
                r => {
                    let (u, v) = ((r >> 32) as u32, r as u32);
                    let key = if v == u32::MAX { Key::Half(u) } else { Key::Edge(u, v) };
                    // keys of zero-probability faults never made it into the set
                    index.get(&key).copied().unwrap_or(NO_EDGE)
                }
            })
            .collect();
        let centers = layout.checks(check_basis).map(|p| p.center).collect();
        let faults = FaultTable::Circuit {
            step_offsets: locations.step_offsets.clone(),
            locations_per_round: per_round,
            rounds,
            entries,
        };
        Ok(DecodingGraph::assemble(check_basis, GraphModel::CircuitLevel, rounds, centers, edges, halves, faults))
    }
}

/// Graph of `check_basis` for `rounds` rounds of circuit-level noise, every
/// round noisy.
pub fn build_decoding_graph(
    layout: &CodeLayout,
    schedule: &CircuitSchedule,
    rounds: usize,
    noise: NoiseParams,
    check_basis: Basis,
) -> Result<DecodingGraph, GraphError> {
    DecodingGraph::circuit_level(layout, schedule, &GraphWindow::open(rounds), noise, check_basis)
}

pub(super) fn perfect_measurement_graph(
    layout: &CodeLayout,
    check_basis: Basis,
    p: f64,
) -> Result<DecodingGraph, GraphError> {
    let mut set = EdgeSet::default();
    let mut keys = Vec::with_capacity(layout.num_data_qubits());
    let mut local = Vec::new();
    for q in 0..layout.num_data_qubits() {
        let dets: Vec<VertexIndex> = layout.checks_of_qubit(q, check_basis).iter().map(|&i| i as VertexIndex).collect();
        let key = key_for(&dets);
        keys.push(key);
        if let Some(k) = key {
            local.push((k, p, vec![q]));
            set.fold_location(&mut local);
        }
    }
    let (edges, halves, index) = finish(set, layout.num_checks(check_basis));
    let entries = keys.into_iter().map(|k| k.and_then(|k| index.get(&k).copied()).unwrap_or(NO_EDGE)).collect();
    let centers = layout.checks(check_basis).map(|p| p.center).collect();
    Ok(DecodingGraph::assemble(
        check_basis,
        GraphModel::PerfectMeasurement,
        1,
        centers,
        edges,
        halves,
        FaultTable::Data { entries },
    ))
}

pub(super) fn custom_graph(
    num_vertices: usize,
    edges: &[(VertexIndex, VertexIndex, f64)],
    half_edges: &[(VertexIndex, f64)],
) -> Result<DecodingGraph, GraphError> {
    let n = num_vertices as VertexIndex;
    let mut set = EdgeSet::default();
    let mut local = Vec::new();
    let valid = |p: f64| p > 0.0 && p <= 0.5;
    for &(u, v, p) in edges {
        if u == v || u >= n || v >= n || !valid(p) {
            return Err(GraphError::InvalidEdge(format!("{{{u}, {v}}} with probability {p}")));
        }
        local.push((Key::Edge(u.min(v), u.max(v)), p, Vec::new()));
        set.fold_location(&mut local);
    }
    for &(u, p) in half_edges {
        if u >= n || !valid(p) {
            return Err(GraphError::InvalidEdge(format!("{{{u}, -}} with probability {p}")));
        }
        local.push((Key::Half(u), p, Vec::new()));
        set.fold_location(&mut local);
    }
    if set.acc.len() != edges.len() + half_edges.len() {
        return Err(GraphError::InvalidEdge("repeated edge".into()));
    }
    let (edges, halves, _) = finish(set, num_vertices.max(1));
    let centers = (0..num_vertices as i32).map(|i| (2 * i, 0)).collect();
    Ok(DecodingGraph::assemble(
        Basis::X,
        GraphModel::Custom,
        1,
        centers,
        edges,
        halves,
        FaultTable::Data { entries: Vec::new() },
    ))
}
