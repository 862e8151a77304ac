//! Code layouts and the scheduled syndrome-extraction circuit.
//!
//! Two families are supported:
//!
//! - the rotated surface code on a `d x d` grid of data qubits, with weight-4
//!   bulk plaquettes and weight-2 boundary plaquettes (`d^2 - 1` checks), and
//! - the 2D toric code with `2 d^2` data qubits on the edges of a periodic
//!   `d x d` lattice.
//!
//! All coordinates are *doubled* integer coordinates so that plaquette centers
//! stay integral. For the rotated code the data qubit at grid position
//! `(x, y)` sits at `(2x, 2y)` and the plaquette whose north-west corner is
//! `(cx, cy)` is centered at `(2cx + 1, 2cy + 1)`. For the toric code data
//! qubits sit at the points with `x + y` odd, X-checks (stars) at even/even
//! points and Z-checks (faces) at odd/odd points, all modulo `2d`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Default duration of one syndrome-extraction round, in seconds.
pub const DEFAULT_ROUND_DURATION: f64 = 1e-6;

/// Number of timesteps in one extraction round: prep, four CNOT layers, measure.
pub const STEPS_PER_ROUND: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CodeKind {
    RotatedSurface,
    Toric2D,
}

/// Pauli basis of a check (and of its ancilla preparation and measurement).
///
/// X-checks detect Z-type errors and Z-checks detect X-type errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub fn other(self) -> Basis {
        match self {
            Basis::X => Basis::Z,
            Basis::Z => Basis::X,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Basis::X => 0,
            Basis::Z => 1,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::X => f.write_str("X"),
            Basis::Z => f.write_str("Z"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("rotated surface code distance must be odd and at least 3, got {0}")]
    InvalidRotatedDistance(usize),
    #[error("toric code distance must be at least 3, got {0}")]
    InvalidToricDistance(usize),
    #[error("data qubit {0} is out of range")]
    UnknownQubit(usize),
    #[error("residual error has a non-trivial syndrome on {0} check(s)")]
    NonTrivialSyndrome(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataQubit {
    pub id: usize,
    pub coord: (i32, i32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Plaquette {
    /// Global plaquette index, row-major over all plaquettes.
    pub id: usize,
    /// Row-major index among plaquettes of the same basis.
    pub basis_index: usize,
    pub basis: Basis,
    /// Doubled center coordinate.
    pub center: (i32, i32),
    /// Data qubits in CNOT order. `None` marks a slot where a boundary
    /// plaquette has no qubit and its ancilla idles.
    pub slots: [Option<usize>; 4],
    pub ancilla: usize,
}

impl Plaquette {
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().flatten().copied()
    }

    pub fn weight(&self) -> usize {
        self.slots.iter().flatten().count()
    }
}

/// Qubit and plaquette geometry of one code patch. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeLayout {
    kind: CodeKind,
    distance: usize,
    data_qubits: Vec<DataQubit>,
    plaquettes: Vec<Plaquette>,
    #[serde(skip)]
    by_basis: [Vec<usize>; 2],
    #[serde(skip)]
    qubit_checks: Vec<[Vec<usize>; 2]>,
}

/// Rotated-frame compass labels mapped to grid corners of a rotated plaquette.
#[derive(Clone, Copy)]
enum Corner {
    NorthWest,
    NorthEast,
    SouthWest,
    SouthEast,
}

// X-checks: N, E, W, S. Z-checks: N, W, E, S.
const X_ORDER: [Corner; 4] = [Corner::NorthWest, Corner::NorthEast, Corner::SouthWest, Corner::SouthEast];
const Z_ORDER: [Corner; 4] = [Corner::NorthWest, Corner::SouthWest, Corner::NorthEast, Corner::SouthEast];

impl CodeLayout {
    /// Rotated surface code with a `d x d` grid of data qubits.
    pub fn rotated_surface(d: usize) -> Result<CodeLayout, LayoutError> {
        if d < 3 || d % 2 == 0 {
            return Err(LayoutError::InvalidRotatedDistance(d));
        }
        let di = d as i32;
        let data_qubits = (0..di)
            .flat_map(|y| (0..di).map(move |x| (x, y)))
            .enumerate()
            .map(|(id, (x, y))| DataQubit { id, coord: (2 * x, 2 * y) })
            .collect::<Vec<_>>();
        let qubit_at = |x: i32, y: i32| -> Option<usize> {
            (0..di).contains(&x).then_some(())?;
            (0..di).contains(&y).then_some(())?;
            Some((y * di + x) as usize)
        };

        let mut raw = Vec::new();
        for cy in -1..di {
            for cx in -1..di {
                let basis = if (cx + cy).rem_euclid(2) == 0 { Basis::X } else { Basis::Z };
                let bulk_x = (0..di - 1).contains(&cx);
                let bulk_y = (0..di - 1).contains(&cy);
                let keep = match (bulk_x, bulk_y) {
                    (true, true) => true,
                    // top and bottom rows carry X-checks
                    (true, false) => basis == Basis::X,
                    // left and right columns carry Z-checks
                    (false, true) => basis == Basis::Z,
                    (false, false) => false,
                };
                if !keep {
                    continue;
                }
                let order = match basis {
                    Basis::X => X_ORDER,
                    Basis::Z => Z_ORDER,
                };
                let slots = order.map(|corner| {
                    let (x, y) = match corner {
                        Corner::NorthWest => (cx, cy),
                        Corner::NorthEast => (cx + 1, cy),
                        Corner::SouthWest => (cx, cy + 1),
                        Corner::SouthEast => (cx + 1, cy + 1),
                    };
                    qubit_at(x, y)
                });
                raw.push((basis, (2 * cx + 1, 2 * cy + 1), slots));
            }
        }
        Ok(Self::assemble(CodeKind::RotatedSurface, d, data_qubits, raw))
    }

    /// Toric code on a periodic `d x d` lattice.
    pub fn toric(d: usize) -> Result<CodeLayout, LayoutError> {
        if d < 3 {
            return Err(LayoutError::InvalidToricDistance(d));
        }
        let n = 2 * d as i32;
        let mut grid = vec![usize::MAX; (n * n) as usize];
        let mut data_qubits = Vec::with_capacity(2 * d * d);
        for y in 0..n {
            for x in 0..n {
                if (x + y) % 2 == 1 {
                    grid[(y * n + x) as usize] = data_qubits.len();
                    data_qubits.push(DataQubit { id: data_qubits.len(), coord: (x, y) });
                }
            }
        }
        let at = |x: i32, y: i32| grid[(y.rem_euclid(n) * n + x.rem_euclid(n)) as usize];

        let mut raw = Vec::new();
        for y in 0..n {
            for x in 0..n {
                if (x + y) % 2 == 1 {
                    continue;
                }
                let north = at(x, y - 1);
                let south = at(x, y + 1);
                let west = at(x - 1, y);
                let east = at(x + 1, y);
                let (basis, slots) = if x % 2 == 0 {
                    (Basis::X, [north, east, west, south])
                } else {
                    (Basis::Z, [north, west, east, south])
                };
                raw.push((basis, (x, y), slots.map(Some)));
            }
        }
        Ok(Self::assemble(CodeKind::Toric2D, d, data_qubits, raw))
    }

    fn assemble(
        kind: CodeKind,
        distance: usize,
        data_qubits: Vec<DataQubit>,
        raw: Vec<(Basis, (i32, i32), [Option<usize>; 4])>,
    ) -> CodeLayout {
        let n_data = data_qubits.len();
        let mut by_basis: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        let mut qubit_checks = vec![[Vec::new(), Vec::new()]; n_data];
        // raw is generated in row-major order of centers
        let plaquettes = raw
            .into_iter()
            .enumerate()
            .map(|(id, (basis, center, slots))| {
                let basis_index = by_basis[basis.index()].len();
                by_basis[basis.index()].push(id);
                for q in slots.iter().flatten() {
                    qubit_checks[*q][basis.index()].push(basis_index);
                }
                Plaquette { id, basis_index, basis, center, slots, ancilla: n_data + id }
            })
            .collect();
        CodeLayout { kind, distance, data_qubits, plaquettes, by_basis, qubit_checks }
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn data_qubits(&self) -> &[DataQubit] {
        &self.data_qubits
    }

    pub fn num_data_qubits(&self) -> usize {
        self.data_qubits.len()
    }

    /// Data qubits followed by one ancilla per plaquette.
    pub fn num_qubits(&self) -> usize {
        self.data_qubits.len() + self.plaquettes.len()
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn num_checks(&self, basis: Basis) -> usize {
        self.by_basis[basis.index()].len()
    }

    /// Plaquettes of one basis, ordered by `basis_index`.
    pub fn checks(&self, basis: Basis) -> impl Iterator<Item = &Plaquette> + '_ {
        self.by_basis[basis.index()].iter().map(move |&i| &self.plaquettes[i])
    }

    pub fn check(&self, basis: Basis, basis_index: usize) -> &Plaquette {
        &self.plaquettes[self.by_basis[basis.index()][basis_index]]
    }

    /// Basis indices of the `basis` checks whose support contains data qubit `q`.
    pub fn checks_of_qubit(&self, q: usize, basis: Basis) -> &[usize] {
        &self.qubit_checks[q][basis.index()]
    }

    /// Supports of the logical operators (of the opposite Pauli type) that
    /// detect a logical error among the errors checked by `check_basis`.
    ///
    /// For `check_basis == X` the residual is Z-type and a probe is an
    /// X-logical: a column of the rotated code, or the two dual cycles of the
    /// torus.
    pub fn logical_probes(&self, check_basis: Basis) -> Vec<Vec<usize>> {
        let select = |pred: &dyn Fn((i32, i32)) -> bool| -> Vec<usize> {
            self.data_qubits.iter().filter(|q| pred(q.coord)).map(|q| q.id).collect()
        };
        match (self.kind, check_basis) {
            (CodeKind::RotatedSurface, Basis::X) => vec![select(&|(x, _)| x == 0)],
            (CodeKind::RotatedSurface, Basis::Z) => vec![select(&|(_, y)| y == 0)],
            (CodeKind::Toric2D, Basis::X) => vec![select(&|(x, _)| x == 1), select(&|(_, y)| y == 1)],
            (CodeKind::Toric2D, Basis::Z) => vec![select(&|(x, _)| x == 0), select(&|(_, y)| y == 0)],
        }
    }

    /// Basis indices of the `check_basis` checks that anticommute with an
    /// error supported on `qubits` (each qubit counted with multiplicity).
    pub fn syndrome_of(&self, check_basis: Basis, qubits: &[usize]) -> Result<Vec<usize>, LayoutError> {
        let mut flips = vec![false; self.num_checks(check_basis)];
        for &q in qubits {
            if q >= self.data_qubits.len() {
                return Err(LayoutError::UnknownQubit(q));
            }
            for &c in self.checks_of_qubit(q, check_basis) {
                flips[c] ^= true;
            }
        }
        Ok(flips.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect())
    }

    /// Whether `residual` (the errors detected by `check_basis`, i.e. Z-type
    /// for X-checks) acts as a non-trivial logical operator.
    ///
    /// The residual must commute with every check; otherwise the correction
    /// did not clear the syndrome and an error is returned.
    pub fn is_logical_failure(&self, check_basis: Basis, residual: &[usize]) -> Result<bool, LayoutError> {
        let syndrome = self.syndrome_of(check_basis, residual)?;
        if !syndrome.is_empty() {
            return Err(LayoutError::NonTrivialSyndrome(syndrome.len()));
        }
        let mut on = vec![false; self.data_qubits.len()];
        for &q in residual {
            on[q] ^= true;
        }
        Ok(self
            .logical_probes(check_basis)
            .iter()
            .any(|probe| probe.iter().filter(|&&q| on[q]).count() % 2 == 1))
    }
}

/// One gate event of the extraction circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GateEvent {
    PrepAncilla { qubit: usize, basis: Basis },
    Cnot { control: usize, target: usize },
    MeasureAncilla { qubit: usize, basis: Basis, plaquette: usize },
    Wait { qubit: usize },
}

impl GateEvent {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            GateEvent::PrepAncilla { qubit, .. }
            | GateEvent::MeasureAncilla { qubit, .. }
            | GateEvent::Wait { qubit } => (qubit, None),
            GateEvent::Cnot { control, target } => (control, Some(target)),
        }
    }
}

/// One round of syndrome extraction, repeated identically every round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitSchedule {
    steps: Vec<Vec<GateEvent>>,
    round_duration: f64,
    num_qubits: usize,
    num_data_qubits: usize,
    /// Basis of each plaquette, indexed by global plaquette id.
    #[serde(skip)]
    plaquette_basis: Vec<(Basis, usize)>,
}

impl CircuitSchedule {
    pub fn new(layout: &CodeLayout) -> CircuitSchedule {
        let n_data = layout.num_data_qubits();
        let plaquettes = layout.plaquettes();
        let mut steps = Vec::with_capacity(STEPS_PER_ROUND);

        let mut prep: Vec<GateEvent> = plaquettes
            .iter()
            .map(|p| GateEvent::PrepAncilla { qubit: p.ancilla, basis: p.basis })
            .collect();
        prep.extend((0..n_data).map(|qubit| GateEvent::Wait { qubit }));
        steps.push(prep);

        for slot in 0..4 {
            let mut busy = vec![false; n_data];
            let mut layer = Vec::new();
            let mut idle_ancillas = Vec::new();
            for p in plaquettes {
                match p.slots[slot] {
                    Some(q) => {
                        busy[q] = true;
                        layer.push(match p.basis {
                            Basis::X => GateEvent::Cnot { control: p.ancilla, target: q },
                            Basis::Z => GateEvent::Cnot { control: q, target: p.ancilla },
                        });
                    }
                    None => idle_ancillas.push(GateEvent::Wait { qubit: p.ancilla }),
                }
            }
            layer.extend(idle_ancillas);
            layer.extend((0..n_data).filter(|&q| !busy[q]).map(|qubit| GateEvent::Wait { qubit }));
            steps.push(layer);
        }

        let mut measure: Vec<GateEvent> = plaquettes
            .iter()
            .map(|p| GateEvent::MeasureAncilla { qubit: p.ancilla, basis: p.basis, plaquette: p.id })
            .collect();
        measure.extend((0..n_data).map(|qubit| GateEvent::Wait { qubit }));
        steps.push(measure);

        CircuitSchedule {
            steps,
            round_duration: DEFAULT_ROUND_DURATION,
            num_qubits: layout.num_qubits(),
            num_data_qubits: n_data,
            plaquette_basis: plaquettes.iter().map(|p| (p.basis, p.basis_index)).collect(),
        }
    }

    pub fn with_round_duration(mut self, seconds: f64) -> Self {
        self.round_duration = seconds;
        self
    }

    pub fn steps(&self) -> &[Vec<GateEvent>] {
        &self.steps
    }

    pub fn round_duration(&self) -> f64 {
        self.round_duration
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_data_qubits(&self) -> usize {
        self.num_data_qubits
    }

    pub fn num_plaquettes(&self) -> usize {
        self.plaquette_basis.len()
    }

    /// `(basis, basis_index)` of a global plaquette id.
    pub fn plaquette_basis(&self, plaquette: usize) -> (Basis, usize) {
        self.plaquette_basis[plaquette]
    }

    pub fn is_data_qubit(&self, q: usize) -> bool {
        q < self.num_data_qubits
    }

    pub fn num_events(&self) -> usize {
        self.steps.iter().map(Vec::len).sum()
    }
}

pub fn build_rotated_surface_code(d: usize) -> Result<CodeLayout, LayoutError> {
    CodeLayout::rotated_surface(d)
}

pub fn build_toric_code(d: usize) -> Result<CodeLayout, LayoutError> {
    CodeLayout::toric(d)
}

pub fn build_schedule(layout: &CodeLayout) -> CircuitSchedule {
    CircuitSchedule::new(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn layouts() -> Vec<CodeLayout> {
        let mut v: Vec<_> = [3, 5, 7].iter().map(|&d| CodeLayout::rotated_surface(d).unwrap()).collect();
        v.extend([3, 4, 5].iter().map(|&d| CodeLayout::toric(d).unwrap()));
        v
    }

    #[test]
    fn rotated_counts() {
        let l5 = CodeLayout::rotated_surface(5).unwrap();
        assert_eq!(l5.num_data_qubits(), 25);
        assert_eq!(l5.plaquettes().len(), 24);
        assert_eq!(l5.num_checks(Basis::X), 12);
        assert_eq!(l5.num_checks(Basis::Z), 12);

        let l3 = CodeLayout::rotated_surface(3).unwrap();
        assert_eq!((l3.num_data_qubits(), l3.plaquettes().len()), (9, 8));
        assert_eq!(CodeLayout::rotated_surface(27).unwrap().plaquettes().len(), 728);
    }

    #[test]
    fn rejects_bad_distances() {
        assert_eq!(CodeLayout::rotated_surface(4), Err(LayoutError::InvalidRotatedDistance(4)));
        assert_eq!(CodeLayout::rotated_surface(1), Err(LayoutError::InvalidRotatedDistance(1)));
        assert_eq!(CodeLayout::toric(2), Err(LayoutError::InvalidToricDistance(2)));
    }

    #[test]
    fn rotated_support_sizes() {
        for d in [3, 5, 9] {
            let l = CodeLayout::rotated_surface(d).unwrap();
            for p in l.plaquettes() {
                let (cx, cy) = ((p.center.0 - 1) / 2, (p.center.1 - 1) / 2);
                let interior = (0..d as i32 - 1).contains(&cx) && (0..d as i32 - 1).contains(&cy);
                assert_eq!(p.weight(), if interior { 4 } else { 2 }, "{p:?}");
            }
            let boundary = l.plaquettes().iter().filter(|p| p.weight() == 2).count();
            assert_eq!(boundary, 2 * (d - 1));
        }
    }

    #[test]
    fn toric_counts() {
        let l = CodeLayout::toric(3).unwrap();
        assert_eq!(l.num_data_qubits(), 18);
        assert_eq!(l.num_checks(Basis::Z), 9);
        assert_eq!(l.num_checks(Basis::X), 9);
        assert!(l.plaquettes().iter().all(|p| p.weight() == 4));
        assert_eq!(CodeLayout::toric(20).unwrap().num_data_qubits(), 800);
    }

    #[test]
    fn checks_commute() {
        for l in layouts() {
            for x in l.checks(Basis::X) {
                let xs: HashSet<_> = x.support().collect();
                for z in l.checks(Basis::Z) {
                    let overlap = z.support().filter(|q| xs.contains(q)).count();
                    assert!(overlap == 0 || overlap == 2, "{:?} {:?}", x.center, z.center);
                }
            }
        }
    }

    #[test]
    fn schedule_interleaving_measures_stabilizers() {
        // A pair of overlapping X and Z checks is measured correctly iff the
        // number of shared qubits touched by the X-check first is even.
        for l in layouts() {
            for x in l.checks(Basis::X) {
                for z in l.checks(Basis::Z) {
                    let mut x_first = 0;
                    for (sx, qx) in x.slots.iter().enumerate() {
                        let Some(q) = qx else { continue };
                        if let Some(sz) = z.slots.iter().position(|s| *s == Some(*q)) {
                            assert_ne!(sx, sz);
                            x_first += usize::from(sx < sz);
                        }
                    }
                    assert_eq!(x_first % 2, 0);
                }
            }
        }
    }

    #[test]
    fn toric_z_checks_are_dependent() {
        use rand::{Rng, SeedableRng};
        let l = CodeLayout::toric(5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let errors: Vec<usize> = (0..l.num_data_qubits()).filter(|_| rng.random_bool(0.3)).collect();
            assert_eq!(l.syndrome_of(Basis::Z, &errors).unwrap().len() % 2, 0);
            assert_eq!(l.syndrome_of(Basis::X, &errors).unwrap().len() % 2, 0);
        }
    }

    #[test]
    fn schedule_shape() {
        let l = CodeLayout::rotated_surface(3).unwrap();
        let s = CircuitSchedule::new(&l);
        assert_eq!(s.steps().len(), 6);
        let cnots = |step: &Vec<GateEvent>| step.iter().filter(|e| matches!(e, GateEvent::Cnot { .. })).count();
        assert_eq!(s.steps().iter().map(cnots).sum::<usize>(), 24);

        let s5 = CircuitSchedule::new(&CodeLayout::rotated_surface(5).unwrap());
        assert!(s5.steps().iter().all(|st| cnots(st) <= 24));
    }

    #[test]
    fn schedule_timesteps_are_disjoint_and_complete() {
        for l in layouts() {
            let s = CircuitSchedule::new(&l);
            for step in s.steps() {
                let mut seen = vec![false; s.num_qubits()];
                for e in step {
                    let (a, b) = e.qubits();
                    for q in std::iter::once(a).chain(b) {
                        assert!(!seen[q], "qubit {q} twice in one timestep");
                        seen[q] = true;
                    }
                }
                // every qubit is either acting or explicitly waiting
                assert!(seen.iter().all(|&b| b));
            }
            let mut touches = vec![0usize; s.num_qubits()];
            for step in s.steps() {
                for e in step {
                    if !matches!(e, GateEvent::Wait { .. }) {
                        let (a, b) = e.qubits();
                        if !s.is_data_qubit(a) {
                            touches[a] += 1;
                        }
                        if let Some(b) = b.filter(|&b| !s.is_data_qubit(b)) {
                            touches[b] += 1;
                        }
                    }
                }
            }
            for p in l.plaquettes() {
                assert_eq!(touches[p.ancilla], 2 + p.weight());
            }
        }
    }

    #[test]
    fn rebuild_is_identical() {
        assert_eq!(CodeLayout::rotated_surface(7).unwrap(), CodeLayout::rotated_surface(7).unwrap());
        let a = CircuitSchedule::new(&CodeLayout::toric(4).unwrap());
        let b = CircuitSchedule::new(&CodeLayout::toric(4).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn logical_failure_examples() {
        let l = CodeLayout::rotated_surface(5).unwrap();
        assert_eq!(l.is_logical_failure(Basis::X, &[]), Ok(false));
        let row: Vec<usize> = (0..5).map(|x| 2 * 5 + x).collect();
        assert_eq!(l.is_logical_failure(Basis::X, &row), Ok(true));
        for z in l.checks(Basis::Z) {
            let s: Vec<usize> = z.support().collect();
            assert_eq!(l.is_logical_failure(Basis::X, &s), Ok(false));
        }
        assert_eq!(l.is_logical_failure(Basis::X, &[12]), Err(LayoutError::NonTrivialSyndrome(2)));

        let col: Vec<usize> = (0..5).map(|y| y * 5 + 3).collect();
        assert_eq!(l.is_logical_failure(Basis::Z, &col), Ok(true));
    }

    #[test]
    fn toric_logicals() {
        let l = CodeLayout::toric(4).unwrap();
        let find = |c: (i32, i32)| l.data_qubits().iter().find(|q| q.coord == c).unwrap().id;
        // Z on a horizontal primal cycle
        let cycle: Vec<usize> = (0..4).map(|i| find((2 * i + 1, 2))).collect();
        assert_eq!(l.is_logical_failure(Basis::X, &cycle), Ok(true));
        for z in l.checks(Basis::Z) {
            let s: Vec<usize> = z.support().collect();
            assert_eq!(l.is_logical_failure(Basis::X, &s), Ok(false));
        }
        for x in l.checks(Basis::X) {
            let s: Vec<usize> = x.support().collect();
            assert_eq!(l.is_logical_failure(Basis::Z, &s), Ok(false));
        }
        // X on a dual cycle crossing vertical edges of one row
        let dual: Vec<usize> = (0..4).map(|i| find((2 * i, 3))).collect();
        assert_eq!(l.is_logical_failure(Basis::Z, &dual), Ok(true));
    }
}
