//! Circuit-level Pauli noise, perfect-measurement data noise, and a dense
//! Pauli-frame simulator of the noisy extraction circuit.
//!
//! Fault locations are every gate event of every round: a single-qubit Pauli
//! after each preparation and each waiting qubit (rate `p`, uniform over
//! X, Y, Z), a two-qubit Pauli after each CNOT (rate `p`, uniform over the 15
//! non-identity pairs) and a flipped outcome for each measurement (rate
//! `2p/3`). Sampling uses geometric skipping so a trial costs time
//! proportional to the number of faults, not the number of locations.

use std::ops::Range;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::code_model::{Basis, CircuitSchedule, CodeLayout, GateEvent};
use crate::rng::{seeded_rng, TrialRng};

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("error rate must lie in [0, 1), got {0}")]
    InvalidRate(f64),
    #[error("{0} requires {1:?} noise")]
    WrongMode(&'static str, NoiseMode),
    #[error("at least one round is required")]
    NoRounds,
    #[error("fault {0:?} does not match the gate at its location")]
    MismatchedFault(FaultEvent),
    #[error("fault location {0:?} is outside the circuit")]
    UnknownLocation(FaultLocation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NoiseMode {
    CircuitLevel,
    PerfectMeasurement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseParams {
    pub p: f64,
    pub mode: NoiseMode,
}

impl NoiseParams {
    pub fn new(p: f64, mode: NoiseMode) -> Result<Self, NoiseError> {
        if !(0.0..1.0).contains(&p) {
            return Err(NoiseError::InvalidRate(p));
        }
        Ok(NoiseParams { p, mode })
    }

    pub fn circuit(p: f64) -> Result<Self, NoiseError> {
        Self::new(p, NoiseMode::CircuitLevel)
    }

    pub fn perfect_measurement(p: f64) -> Result<Self, NoiseError> {
        Self::new(p, NoiseMode::PerfectMeasurement)
    }
}

/// Single-qubit Pauli, encoded as `x | z << 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pauli1 {
    X = 1,
    Z = 2,
    Y = 3,
}

impl Pauli1 {
    pub const ALL: [Pauli1; 3] = [Pauli1::X, Pauli1::Y, Pauli1::Z];

    pub fn has_x(self) -> bool {
        (self as u8) & 1 != 0
    }

    pub fn has_z(self) -> bool {
        (self as u8) & 2 != 0
    }

    fn from_bits(bits: u8) -> Option<Pauli1> {
        match bits {
            1 => Some(Pauli1::X),
            2 => Some(Pauli1::Z),
            3 => Some(Pauli1::Y),
            _ => None,
        }
    }
}

/// Fault applied after a gate event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FaultPauli {
    Single(Pauli1),
    /// Non-identity two-qubit Pauli on (control, target) of a CNOT.
    Pair(Option<Pauli1>, Option<Pauli1>),
    MeasFlip,
}

impl FaultPauli {
    /// All 15 non-identity two-qubit Paulis in code order.
    pub fn all_pairs() -> impl Iterator<Item = FaultPauli> {
        (1u8..16).map(|c| FaultPauli::from_code_pair(c))
    }

    fn from_code_pair(code: u8) -> FaultPauli {
        FaultPauli::Pair(Pauli1::from_bits(code & 3), Pauli1::from_bits(code >> 2))
    }

    /// Dense code in `0..16`, unique per location kind.
    pub(crate) fn code(self) -> usize {
        match self {
            FaultPauli::Single(p) => p as usize,
            FaultPauli::Pair(a, b) => {
                a.map_or(0, |p| p as usize) | (b.map_or(0, |p| p as usize) << 2)
            }
            FaultPauli::MeasFlip => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaultLocation {
    pub round: usize,
    pub step: usize,
    /// Index of the gate event within its timestep.
    pub event: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaultEvent {
    pub location: FaultLocation,
    pub pauli: FaultPauli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LocationKind {
    OneQubit,
    TwoQubit,
    Measurement,
}

fn location_kind(event: &GateEvent) -> LocationKind {
    match event {
        GateEvent::PrepAncilla { .. } | GateEvent::Wait { .. } => LocationKind::OneQubit,
        GateEvent::Cnot { .. } => LocationKind::TwoQubit,
        GateEvent::MeasureAncilla { .. } => LocationKind::Measurement,
    }
}

/// Flat enumeration of the fault locations of one round.
#[derive(Debug, Clone)]
pub(crate) struct RoundLocations {
    /// `(step, event)` of every location, in schedule order.
    pub slots: Vec<(usize, usize)>,
    pub kinds: Vec<LocationKind>,
    /// Offset of each step in `slots`.
    pub step_offsets: Vec<usize>,
}

impl RoundLocations {
    pub fn new(schedule: &CircuitSchedule) -> Self {
        let mut slots = Vec::with_capacity(schedule.num_events());
        let mut kinds = Vec::with_capacity(schedule.num_events());
        let mut step_offsets = Vec::with_capacity(schedule.steps().len());
        for (s, step) in schedule.steps().iter().enumerate() {
            step_offsets.push(slots.len());
            for (e, ev) in step.iter().enumerate() {
                slots.push((s, e));
                kinds.push(location_kind(ev));
            }
        }
        RoundLocations { slots, kinds, step_offsets }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }
}

/// Precomputed sampler for circuit-level faults over a window of rounds.
#[derive(Debug, Clone)]
pub struct FaultSampler {
    locations: RoundLocations,
    /// In-round location indices at rate `p`.
    gate_class: Vec<usize>,
    /// In-round location indices at rate `2p/3`.
    meas_class: Vec<usize>,
    noisy_rounds: Range<usize>,
    p: f64,
}

impl FaultSampler {
    pub fn new(schedule: &CircuitSchedule, rounds: usize, noise: NoiseParams) -> Result<Self, NoiseError> {
        Self::with_noisy_rounds(schedule, rounds, 0..rounds, noise)
    }

    /// Faults only occur in `noisy` (clamped to `0..rounds`).
    pub fn with_noisy_rounds(
        schedule: &CircuitSchedule,
        rounds: usize,
        noisy: Range<usize>,
        noise: NoiseParams,
    ) -> Result<Self, NoiseError> {
        if noise.mode != NoiseMode::CircuitLevel {
            return Err(NoiseError::WrongMode("circuit fault sampling", NoiseMode::CircuitLevel));
        }
        if rounds == 0 {
            return Err(NoiseError::NoRounds);
        }
        let locations = RoundLocations::new(schedule);
        let (meas_class, gate_class): (Vec<usize>, Vec<usize>) =
            (0..locations.len()).partition(|&i| locations.kinds[i] == LocationKind::Measurement);
        let noisy_rounds = noisy.start.min(rounds)..noisy.end.min(rounds);
        Ok(FaultSampler { locations, gate_class, meas_class, noisy_rounds, p: noise.p })
    }

    pub fn noisy_rounds(&self) -> Range<usize> {
        self.noisy_rounds.clone()
    }

    /// Number of `(prep + wait + CNOT, measurement)` locations over the noisy rounds.
    pub fn location_census(&self) -> (usize, usize) {
        let r = self.noisy_rounds.len();
        (r * self.gate_class.len(), r * self.meas_class.len())
    }

    /// Appends one trial's faults to `out`, sorted by location.
    pub fn sample_into(&self, rng: &mut TrialRng, out: &mut Vec<FaultEvent>) {
        out.clear();
        let first = self.noisy_rounds.start;
        let rounds = self.noisy_rounds.len();
        for (class, rate) in [(&self.gate_class, self.p), (&self.meas_class, 2.0 * self.p / 3.0)] {
            let total = rounds * class.len();
            let mut skip = GeometricSkip::new(rate, total, rng);
            while let Some(flat) = skip.next() {
                let rng = &mut *skip.rng;
                let round = first + flat / class.len();
                let loc = class[flat % class.len()];
                let (step, event) = self.locations.slots[loc];
                let pauli = match self.locations.kinds[loc] {
                    LocationKind::OneQubit => FaultPauli::Single(Pauli1::ALL[rng.random_range(0..3)]),
                    LocationKind::TwoQubit => FaultPauli::from_code_pair(rng.random_range(1..16u8)),
                    LocationKind::Measurement => FaultPauli::MeasFlip,
                };
                out.push(FaultEvent { location: FaultLocation { round, step, event }, pauli });
            }
        }
        out.sort_unstable();
    }

    pub fn sample(&self, rng: &mut TrialRng) -> Vec<FaultEvent> {
        let mut out = Vec::new();
        self.sample_into(rng, &mut out);
        out
    }
}

/// Positions of successes in `total` Bernoulli(`rate`) trials, drawn by
/// skipping geometrically distributed gaps.
struct GeometricSkip<'r> {
    log_q: f64,
    next: usize,
    total: usize,
    rng: &'r mut TrialRng,
}

impl<'r> GeometricSkip<'r> {
    fn new(rate: f64, total: usize, rng: &'r mut TrialRng) -> Self {
        let log_q = if rate <= 0.0 { 0.0 } else { (-rate).ln_1p() };
        let mut skip = GeometricSkip { log_q, next: 0, total, rng };
        if rate <= 0.0 {
            skip.next = total;
        } else {
            skip.advance();
        }
        skip
    }

    fn advance(&mut self) {
        if self.log_q == f64::NEG_INFINITY {
            return; // rate 1: every position
        }
        let u: f64 = 1.0 - self.rng.random::<f64>();
        let gap = (u.ln() / self.log_q).floor();
        if gap >= (self.total - self.next) as f64 {
            self.next = self.total;
        } else {
            self.next += gap as usize;
        }
    }
}

impl Iterator for GeometricSkip<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.next >= self.total {
            return None;
        }
        let here = self.next;
        self.next += 1;
        if self.next < self.total {
            self.advance();
        }
        Some(here)
    }
}

/// Circuit-level faults for `rounds` rounds, deterministic in `seed`.
pub fn sample_faults(
    schedule: &CircuitSchedule,
    rounds: usize,
    noise: NoiseParams,
    seed: u64,
) -> Result<Vec<FaultEvent>, NoiseError> {
    let sampler = FaultSampler::new(schedule, rounds, noise)?;
    Ok(sampler.sample(&mut seeded_rng(seed)))
}

/// Independent Z errors on data qubits, each with probability `p`.
pub fn sample_data_errors_with(layout: &CodeLayout, p: f64, rng: &mut TrialRng) -> Vec<usize> {
    GeometricSkip::new(p, layout.num_data_qubits(), rng).collect()
}

/// Perfect-measurement noise: sorted ids of data qubits carrying a Z error.
pub fn sample_data_errors(layout: &CodeLayout, noise: NoiseParams, seed: u64) -> Result<Vec<usize>, NoiseError> {
    if noise.mode != NoiseMode::PerfectMeasurement {
        return Err(NoiseError::WrongMode("data error sampling", NoiseMode::PerfectMeasurement));
    }
    Ok(sample_data_errors_with(layout, noise.p, &mut seeded_rng(seed)))
}

/// Result of replaying a faulty circuit on a Pauli frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitRecord {
    /// Measurement flips per round, indexed by global plaquette id.
    pub measurements: Vec<Vec<bool>>,
    /// Final `(x, z)` frame of every data qubit.
    pub data_frame: Vec<(bool, bool)>,
}

impl CircuitRecord {
    /// Per-round syndrome bits of one basis, indexed by `basis_index`.
    pub fn syndrome_rounds(&self, schedule: &CircuitSchedule, basis: Basis) -> Vec<Vec<bool>> {
        self.measurements
            .iter()
            .map(|round| {
                let mut bits = Vec::new();
                for (pid, &flip) in round.iter().enumerate() {
                    let (b, idx) = schedule.plaquette_basis(pid);
                    if b == basis {
                        if bits.len() <= idx {
                            bits.resize(idx + 1, false);
                        }
                        bits[idx] = flip;
                    }
                }
                bits
            })
            .collect()
    }

    /// Data qubits carrying the error type detected by `check_basis`.
    pub fn data_errors(&self, check_basis: Basis) -> Vec<usize> {
        self.data_frame
            .iter()
            .enumerate()
            .filter(|(_, &(x, z))| match check_basis {
                Basis::X => z,
                Basis::Z => x,
            })
            .map(|(q, _)| q)
            .collect()
    }
}

/// Replays `rounds` rounds of the schedule gate by gate on a dense Pauli
/// frame, injecting `faults` after their gate events.
pub fn simulate_circuit(
    schedule: &CircuitSchedule,
    rounds: usize,
    faults: &[FaultEvent],
) -> Result<CircuitRecord, NoiseError> {
    let n = schedule.num_qubits();
    let mut x = vec![false; n];
    let mut z = vec![false; n];
    let mut sorted = faults.to_vec();
    sorted.sort_unstable();
    let mut cursor = 0;
    let mut measurements = Vec::with_capacity(rounds);

    for round in 0..rounds {
        let mut flips = vec![false; schedule.num_plaquettes()];
        for (s, step) in schedule.steps().iter().enumerate() {
            for ev in step {
                match *ev {
                    GateEvent::PrepAncilla { qubit, .. } => {
                        x[qubit] = false;
                        z[qubit] = false;
                    }
                    GateEvent::Cnot { control, target } => {
                        x[target] ^= x[control];
                        z[control] ^= z[target];
                    }
                    GateEvent::MeasureAncilla { qubit, basis, plaquette } => {
                        flips[plaquette] = match basis {
                            Basis::X => z[qubit],
                            Basis::Z => x[qubit],
                        };
                    }
                    GateEvent::Wait { .. } => {}
                }
            }
            while let Some(f) = sorted.get(cursor) {
                let loc = f.location;
                if (loc.round, loc.step) > (round, s) {
                    break;
                }
                if (loc.round, loc.step) < (round, s) {
                    return Err(NoiseError::UnknownLocation(loc));
                }
                let ev = step.get(loc.event).ok_or(NoiseError::UnknownLocation(loc))?;
                match (ev, f.pauli) {
                    (GateEvent::PrepAncilla { qubit, .. } | GateEvent::Wait { qubit }, FaultPauli::Single(p)) => {
                        x[*qubit] ^= p.has_x();
                        z[*qubit] ^= p.has_z();
                    }
                    (GateEvent::Cnot { control, target }, FaultPauli::Pair(a, b)) => {
                        for (q, p) in [(*control, a), (*target, b)] {
                            if let Some(p) = p {
                                x[q] ^= p.has_x();
                                z[q] ^= p.has_z();
                            }
                        }
                    }
                    (GateEvent::MeasureAncilla { plaquette, .. }, FaultPauli::MeasFlip) => {
                        flips[*plaquette] ^= true;
                    }
                    _ => return Err(NoiseError::MismatchedFault(*f)),
                }
                cursor += 1;
            }
        }
        measurements.push(flips);
    }
    if let Some(f) = sorted.get(cursor) {
        return Err(NoiseError::UnknownLocation(f.location));
    }
    let data_frame = (0..schedule.num_data_qubits()).map(|q| (x[q], z[q])).collect();
    Ok(CircuitRecord { measurements, data_frame })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::CodeLayout;
    use crate::rng::trial_rng;

    fn schedule(d: usize) -> CircuitSchedule {
        CircuitSchedule::new(&CodeLayout::rotated_surface(d).unwrap())
    }

    #[test]
    fn zero_rate_gives_no_faults() {
        let s = schedule(5);
        for seed in 0..20 {
            assert!(sample_faults(&s, 5, NoiseParams::circuit(0.0).unwrap(), seed).unwrap().is_empty());
        }
        let l = CodeLayout::toric(4).unwrap();
        assert!(sample_data_errors(&l, NoiseParams::perfect_measurement(0.0).unwrap(), 3).unwrap().is_empty());
    }

    #[test]
    fn mode_and_rate_are_checked() {
        let s = schedule(3);
        let pm = NoiseParams::perfect_measurement(0.01).unwrap();
        assert!(matches!(sample_faults(&s, 3, pm, 0), Err(NoiseError::WrongMode(..))));
        assert!(NoiseParams::circuit(1.0).is_err());
        assert!(NoiseParams::circuit(-0.1).is_err());
        assert_eq!(sample_faults(&s, 0, NoiseParams::circuit(0.1).unwrap(), 0), Err(NoiseError::NoRounds));
    }

    #[test]
    fn nearly_certain_rate_hits_every_location() {
        let s = schedule(3);
        let locs = RoundLocations::new(&s);
        let noise = NoiseParams::circuit(1.0 - 1e-12).unwrap();
        let faults = sample_faults(&s, 1, noise, 5).unwrap();
        // measurements flip at 2p/3, every other location fires
        let gates = locs.kinds.iter().filter(|&&k| k != LocationKind::Measurement).count();
        let flips = faults.iter().filter(|f| f.pauli == FaultPauli::MeasFlip).count();
        assert_eq!(faults.len() - flips, gates);
        assert!(flips <= locs.len() - gates);
        for f in &faults {
            let kind = locs.kinds[locs.step_offsets[f.location.step] + f.location.event];
            match (kind, f.pauli) {
                (LocationKind::OneQubit, FaultPauli::Single(_))
                | (LocationKind::TwoQubit, FaultPauli::Pair(..))
                | (LocationKind::Measurement, FaultPauli::MeasFlip) => {}
                other => panic!("mismatched fault {other:?}"),
            }
        }
    }

    #[test]
    fn two_qubit_paulis_are_uniform() {
        // Frequency of each of the 15 Paulis at one CNOT location vs 1/15.
        let s = schedule(3);
        let sampler = FaultSampler::new(&s, 1, NoiseParams::circuit(1.0 - 1e-12).unwrap()).unwrap();
        let trials = 100_000;
        let mut counts = [0u32; 16];
        let mut buf = Vec::new();
        for t in 0..trials {
            sampler.sample_into(&mut trial_rng(11, t), &mut buf);
            let at: Vec<_> = buf.iter().filter(|f| f.location.step == 1 && f.location.event == 0).collect();
            assert_eq!(at.len(), 1);
            counts[at[0].pauli.code()] += 1;
        }
        assert_eq!(counts[0], 0);
        let mean = trials as f64 / 15.0;
        let sigma = (trials as f64 * (1.0 / 15.0) * (14.0 / 15.0)).sqrt();
        for c in &counts[1..] {
            assert!((*c as f64 - mean).abs() < 3.0 * sigma + 1.0, "{counts:?}");
        }
    }

    #[test]
    fn mean_fault_count_matches_location_census() {
        let s = schedule(5);
        let p = 1e-3;
        let sampler = FaultSampler::new(&s, 5, NoiseParams::circuit(p).unwrap()).unwrap();
        let (gates, meas) = sampler.location_census();
        let expected = p * gates as f64 + 2.0 * p / 3.0 * meas as f64;
        let variance = p * (1.0 - p) * gates as f64 + (2.0 * p / 3.0) * (1.0 - 2.0 * p / 3.0) * meas as f64;
        let trials = 100_000u64;
        let mut buf = Vec::new();
        let total: usize = (0..trials)
            .map(|t| {
                sampler.sample_into(&mut trial_rng(3, t), &mut buf);
                buf.len()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let sigma = (variance / trials as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sigma, "mean {mean} expected {expected}");
    }

    #[test]
    fn data_error_rate() {
        let l = CodeLayout::toric(20).unwrap();
        let p = 1e-3;
        let trials = 100_000u64;
        let total: usize = (0..trials).map(|t| sample_data_errors_with(&l, p, &mut trial_rng(9, t)).len()).sum();
        let mean = total as f64 / trials as f64;
        let sigma = (800.0 * p * (1.0 - p) / trials as f64).sqrt();
        assert!((mean - 0.8).abs() < 3.0 * sigma, "{mean}");
        let all = sample_data_errors_with(&l, 1.0, &mut trial_rng(0, 0));
        assert_eq!(all.len(), 800);
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = schedule(5);
        let noise = NoiseParams::circuit(5e-3).unwrap();
        assert_eq!(sample_faults(&s, 5, noise, 99).unwrap(), sample_faults(&s, 5, noise, 99).unwrap());
    }

    #[test]
    fn single_data_error_flips_adjacent_checks_every_round() {
        let l = CodeLayout::rotated_surface(3).unwrap();
        let s = CircuitSchedule::new(&l);
        // Z on data qubit 4 (center) while it waits during the round-0 prep step.
        let event = s.steps()[0].iter().position(|e| *e == GateEvent::Wait { qubit: 4 }).unwrap();
        let f = FaultEvent {
            location: FaultLocation { round: 0, step: 0, event },
            pauli: FaultPauli::Single(Pauli1::Z),
        };
        let rec = simulate_circuit(&s, 3, &[f]).unwrap();
        let rounds = rec.syndrome_rounds(&s, Basis::X);
        let expected: Vec<bool> = {
            let flipped = l.syndrome_of(Basis::X, &[4]).unwrap();
            (0..l.num_checks(Basis::X)).map(|i| flipped.contains(&i)).collect()
        };
        assert!(rounds.iter().all(|r| *r == expected));
        assert_eq!(rec.data_errors(Basis::X), vec![4]);
        assert!(rec.syndrome_rounds(&s, Basis::Z).iter().flatten().all(|b| !b));
    }
}
