//! Schedule → Ry/Rz/CNOT circuit compilation.
//!
//! Each chunk becomes, in application order, one `CNOT · Rz(2ζΔt) · CNOT`
//! block per pair (lexicographic) followed by one `Ry(β) Rz(2Δt√(K²+ε²))
//! Ry(−β)` block per qubit (ascending; matrix-product order, so `Ry(−β)`
//! is applied first), mirroring the ordering of
//! [`chunked_chunk_propagator`](crate::hamiltonian::chunked_chunk_propagator).
//! Rotation gates take half-angle arguments, hence the factor 2 on both
//! blocks.

use crate::error::{Error, Result};
use crate::gates::{circuit_unitary, Circuit, GateOp, DEFAULT_DENSE_CAP};
use crate::hamiltonian::{propagate_density, schedule_unitary, Method};
use crate::schedule::{pairs, Schedule};
use crate::state::DensityMatrix;
use crate::witness::{make_pair_state, PairStateKind};
use serde::Serialize;

/// Gates whose |angle| falls below this are dropped when eliding.
pub const ELISION_THRESHOLD: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub elide: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self { elide: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationAngles {
    /// Tilt of the rotation axis from ẑ towards x̂, in (−π, π].
    pub beta: f64,
    /// Half-angle-convention argument for the central Rz.
    pub alpha_gate: f64,
    /// `K = ε = 0`: the block is the identity.
    pub identity: bool,
}

/// Solves `Ry(β) Rz(α̃) Ry(−β) = exp(−iΔt(K X + ε Z))`.
pub fn extract_rotation_angles(k: f64, eps: f64, dt: f64) -> Result<RotationAngles> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if !(k.is_finite() && eps.is_finite()) {
        return Err(Error::NonFinite("rotation parameters".into()));
    }
    if k == 0.0 && eps == 0.0 {
        return Ok(RotationAngles {
            beta: 0.0,
            alpha_gate: 0.0,
            identity: true,
        });
    }
    Ok(RotationAngles {
        beta: k.atan2(eps),
        alpha_gate: 2.0 * dt * k.hypot(eps),
        identity: false,
    })
}

/// Relabeled circuit weights for one chunk (full-angle magnitudes).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChunkWeights {
    /// `ζ_ij Δt` per pair.
    pub w_zz: Vec<f64>,
    /// Mixing angle β per qubit.
    pub w_beta: Vec<f64>,
    /// `Δt √(K² + ε²)` per qubit.
    pub w_alpha: Vec<f64>,
}

pub fn chunk_weights(schedule: &Schedule) -> Vec<ChunkWeights> {
    let n = schedule.n_qubits();
    let dt = schedule.dt();
    schedule
        .chunks()
        .iter()
        .map(|c| ChunkWeights {
            w_zz: c.zeta.iter().map(|z| z * dt).collect(),
            w_beta: (0..n).map(|q| c.k[q].atan2(c.eps[q])).collect(),
            w_alpha: (0..n).map(|q| dt * c.k[q].hypot(c.eps[q])).collect(),
        })
        .collect()
}

fn tiny(angle: f64) -> bool {
    angle.abs() < ELISION_THRESHOLD
}

fn single_qubit_block(k: f64, eps: f64, dt: f64, qubit: usize, opts: &CompileOptions) -> Result<Vec<GateOp>> {
    let a = extract_rotation_angles(k, eps, dt)?;
    if opts.elide {
        if a.identity || tiny(a.alpha_gate) {
            return Ok(Vec::new());
        }
        if tiny(a.beta) {
            return Ok(vec![GateOp::RotZ {
                qubit,
                angle: a.alpha_gate,
            }]);
        }
    }
    // application order; the matrix product reads Ry(β)·Rz·Ry(−β)
    Ok(vec![
        GateOp::RotY { qubit, angle: -a.beta },
        GateOp::RotZ {
            qubit,
            angle: a.alpha_gate,
        },
        GateOp::RotY { qubit, angle: a.beta },
    ])
}

fn zz_block(zeta: f64, dt: f64, i: usize, j: usize, opts: &CompileOptions) -> Result<Vec<GateOp>> {
    if i == j {
        return Err(Error::InvalidArgument(format!("ZZ block on a single qubit {i}")));
    }
    let angle = 2.0 * zeta * dt;
    if opts.elide && tiny(angle) {
        return Ok(Vec::new());
    }
    let cx = GateOp::Cnot { control: i, target: j };
    Ok(vec![cx, GateOp::RotZ { qubit: j, angle }, cx])
}

/// Gates for `exp(−iΔt(K X + ε Z))` on `qubit`, in application order
/// `[Ry(−β), Rz(α̃), Ry(β)]`; empty for `K = ε = 0`.
pub fn compile_single_qubit(k: f64, eps: f64, dt: f64, qubit: usize) -> Result<Vec<GateOp>> {
    single_qubit_block(k, eps, dt, qubit, &CompileOptions::default())
}

/// Gates for `exp(−iζΔt Z_i Z_j)`; empty for `ζ = 0`.
pub fn compile_zz(zeta: f64, dt: f64, i: usize, j: usize) -> Result<Vec<GateOp>> {
    zz_block(zeta, dt, i, j, &CompileOptions::default())
}

/// Compiles every chunk in chronological order.
///
/// Without elision the circuit has `C·(3N + 3·C(N,2))` gates.
pub fn compile_schedule(schedule: &Schedule, opts: &CompileOptions) -> Circuit {
    let n = schedule.n_qubits();
    let dt = schedule.dt();
    let mut circuit = Circuit::new(n);
    for c in schedule.chunks() {
        let zz = pairs(n).flat_map(|(i, j)| zz_block(c.zeta_of(i, j), dt, i, j, opts).expect("i < j"));
        let singles = (0..n).flat_map(|q| single_qubit_block(c.k[q], c.eps[q], dt, q, opts).expect("validated schedule"));
        circuit
            .extend(zz.chain(singles))
            .expect("compiled gates address valid qubits");
    }
    circuit
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateDistances {
    pub state: PairStateKind,
    pub gate_vs_chunked: f64,
    pub chunked_vs_exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub n_qubits: usize,
    pub chunk_count: usize,
    pub gate_count: usize,
    /// ‖U_gates − U_chunked‖_F over full unitaries.
    pub frobenius_gate_vs_chunked: f64,
    /// ‖U_chunked − U_exact‖_F over full unitaries.
    pub frobenius_chunked_vs_exact: f64,
    /// Final density-matrix distances for the four training states on pair (0,1).
    pub states: Vec<StateDistances>,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Compares compiled gates, chunked and exact propagation.
pub fn verify_equivalence(schedule: &Schedule) -> Result<EquivalenceReport> {
    let circuit = compile_schedule(schedule, &CompileOptions::default());
    verify_circuit(schedule, &circuit)
}

/// As [`verify_equivalence`] but against a caller-supplied circuit.
pub fn verify_circuit(schedule: &Schedule, circuit: &Circuit) -> Result<EquivalenceReport> {
    let n = schedule.n_qubits();
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            n_qubits: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    if n < 2 {
        return Err(Error::InvalidArgument("verification needs at least two qubits".into()));
    }
    if circuit.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: circuit.n_qubits(),
        });
    }
    let u_gates = circuit_unitary(circuit)?;
    let u_chunked = schedule_unitary(schedule, Method::Chunked)?;
    let u_exact = schedule_unitary(schedule, Method::Exact)?;
    let mut states = Vec::new();
    for kind in PairStateKind::ALL {
        let rho = DensityMatrix::from_pure(&make_pair_state(kind, (0, 1), n)?);
        let chunked = propagate_density(&rho, schedule, Method::Chunked)?;
        let exact = propagate_density(&rho, schedule, Method::Exact)?;
        let gates = rho.evolve(&u_gates)?;
        states.push(StateDistances {
            state: kind,
            gate_vs_chunked: gates.matrix().distance(chunked.matrix())?,
            chunked_vs_exact: chunked.matrix().distance(exact.matrix())?,
        });
    }
    Ok(EquivalenceReport {
        n_qubits: n,
        chunk_count: schedule.chunk_count(),
        gate_count: circuit.len(),
        frobenius_gate_vs_chunked: u_gates.distance(&u_chunked)?,
        frobenius_chunked_vs_exact: u_chunked.distance(&u_exact)?,
        states,
    })
}
