//! Training states and the pairwise witness `⟨Z_i Z_j⟩²` at the final time.

use crate::error::{Error, Result};
use crate::hamiltonian::{propagate, Method};
use crate::schedule::{pair_count, pairs, Schedule};
use crate::state::{QuantumState, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The four two-qubit training states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairStateKind {
    /// (|00⟩ + |11⟩)/√2, fully entangled.
    Bell,
    /// (|00⟩ + |01⟩ + |10⟩ + |11⟩)/2, product state.
    Flat,
    /// (2|00⟩ + |01⟩)/√5, classically correlated.
    C,
    /// (|01⟩ + |10⟩ + |11⟩)/√3, partially entangled.
    P,
}

impl PairStateKind {
    pub const ALL: [PairStateKind; 4] = [Self::Bell, Self::Flat, Self::C, Self::P];

    /// Desired witness output.
    pub fn target(self) -> f64 {
        match self {
            Self::Bell => 1.0,
            Self::Flat | Self::C => 0.0,
            Self::P => 0.443,
        }
    }

    /// Unnormalized real amplitudes over |00⟩, |01⟩, |10⟩, |11⟩.
    fn raw_amplitudes(self) -> [f64; 4] {
        match self {
            Self::Bell => [1.0, 0.0, 0.0, 1.0],
            Self::Flat => [1.0, 1.0, 1.0, 1.0],
            Self::C => [2.0, 1.0, 0.0, 0.0],
            Self::P => [0.0, 1.0, 1.0, 1.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bell => "bell",
            Self::Flat => "flat",
            Self::C => "c",
            Self::P => "p",
        }
    }
}

impl fmt::Display for PairStateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairStateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bell" => Ok(Self::Bell),
            "flat" => Ok(Self::Flat),
            "c" => Ok(Self::C),
            "p" => Ok(Self::P),
            other => Err(Error::Parse(format!(
                "unknown state \"{other}\" (expected bell, flat, c or p)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessTarget {
    pub kind: PairStateKind,
    pub target: f64,
}

impl From<PairStateKind> for WitnessTarget {
    fn from(kind: PairStateKind) -> Self {
        Self {
            kind,
            target: kind.target(),
        }
    }
}

/// Places the two-qubit `kind` state on qubits `(i, j)` of an `n`-qubit
/// register; every other qubit is |0⟩.
pub fn make_pair_state(kind: PairStateKind, pair: (usize, usize), n: usize) -> Result<StateVector> {
    let (i, j) = pair;
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n_qubits: n });
    }
    if i >= j {
        return Err(Error::InvalidArgument(format!("pair ({i},{j}) must satisfy i < j")));
    }
    let raw = kind.raw_amplitudes();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (two_bit, a) in raw.iter().enumerate() {
        let (bi, bj) = (two_bit >> 1, two_bit & 1);
        let idx = (bi << (n - 1 - i)) | (bj << (n - 1 - j));
        amps[idx] = Complex64::new(*a, 0.0);
    }
    StateVector::normalized(n, amps)
}

/// `⟨Z_i Z_j⟩²` after evolving `initial` under `schedule`.
pub fn witness_value(
    initial: &QuantumState,
    pair: (usize, usize),
    schedule: &Schedule,
    method: Method,
) -> Result<f64> {
    let fin = propagate(initial, schedule, method)?;
    let zz = fin.expectation_zz(pair.0, pair.1)?;
    Ok(zz * zz)
}

#[derive(Clone, Debug)]
pub struct TrainingItem {
    pub kind: PairStateKind,
    pub pair: (usize, usize),
    pub state: StateVector,
    pub target: f64,
}

#[derive(Clone, Debug)]
pub struct TrainingSet {
    n_qubits: usize,
    items: Vec<TrainingItem>,
}

impl TrainingSet {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn items(&self) -> &[TrainingItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Arbitrary items; used for custom targets and tests.
    pub fn from_items(n_qubits: usize, items: Vec<TrainingItem>) -> Result<Self> {
        if let Some(bad) = items.iter().find(|it| it.state.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: bad.state.n_qubits(),
            });
        }
        Ok(Self { n_qubits, items })
    }
}

/// Four items (Bell, Flat, C, P) for every pair `i < j`: `4·C(n,2)` total.
pub fn build_training_set(n: usize) -> Result<TrainingSet> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "training needs at least two qubits, got {n}"
        )));
    }
    let mut items = Vec::with_capacity(4 * pair_count(n));
    for pair in pairs(n) {
        for kind in PairStateKind::ALL {
            items.push(TrainingItem {
                kind,
                pair,
                state: make_pair_state(kind, pair, n)?,
                target: kind.target(),
            });
        }
    }
    Ok(TrainingSet { n_qubits: n, items })
}

/// One `state_kind,pair,method,value` CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessRow {
    pub kind: PairStateKind,
    pub pair: (usize, usize),
    pub method: Method,
    pub value: f64,
}

impl WitnessRow {
    pub const CSV_HEADER: &'static str = "state_kind,pair,method,value";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{}-{},{},{:.17e}",
            self.kind, self.pair.0, self.pair.1, self.method, self.value
        )
    }
}
