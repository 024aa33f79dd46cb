//! All-to-all Ising-type Hamiltonian and its per-chunk propagators.
//!
//! `H = Σ_i (K_i X_i + ε_i Z_i) + Σ_{i<j} ζ_ij Z_i Z_j`, with ħ = 1.

use crate::compiler::{compile_schedule, CompileOptions};
use crate::error::{Error, Result};
use crate::gates::{pauli_exponential, Circuit, DEFAULT_DENSE_CAP};
use crate::linalg::{embed_single, pauli_x, ComplexMatrix, I, ONE, ZERO};
use crate::schedule::{pairs, ChunkParams, Schedule};
use crate::state::{zz_parity, Block2, DensityMatrix, QuantumState, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// How a schedule is turned into time evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// `exp(-i H_k Δt)` per chunk.
    Exact,
    /// Product of single-qubit and ZZ exponentials per chunk.
    Chunked,
    /// Compiled Ry/Rz/CNOT circuit applied gate by gate.
    Gates,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "chunked" => Ok(Method::Chunked),
            "gates" => Ok(Method::Gates),
            other => Err(Error::Parse(format!(
                "unknown method \"{other}\" (expected exact, chunked or gates)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Chunked => "chunked",
            Method::Gates => "gates",
        })
    }
}

fn check_params(params: &ChunkParams, n: usize) -> Result<()> {
    if params.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: params.n_qubits(),
        });
    }
    params.validate(n)
}

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")))
    }
}

/// Dense `2^n × 2^n` Hamiltonian for one chunk.
pub fn build_hamiltonian(params: &ChunkParams, n: usize) -> Result<ComplexMatrix> {
    check_params(params, n)?;
    let dim = 1usize << n;
    let mut diag = vec![0.0; dim];
    for q in 0..n {
        for (b, d) in diag.iter_mut().enumerate() {
            *d += params.eps[q] * if (b >> (n - 1 - q)) & 1 == 0 { 1.0 } else { -1.0 };
        }
    }
    for (i, j) in pairs(n) {
        let z = params.zeta_of(i, j);
        for (b, d) in diag.iter_mut().enumerate() {
            *d += z * zz_parity(b, i, j, n);
        }
    }
    let diag: Vec<Complex64> = diag.into_iter().map(Complex64::from).collect();
    let mut h = ComplexMatrix::from_diagonal(&diag);
    let x = pauli_x();
    for q in 0..n {
        if params.k[q] != 0.0 {
            h = h + embed_single(&x, q, n).scale(params.k[q].into());
        }
    }
    Ok(h)
}

/// `exp(-i H Δt)` by eigendecomposition.
pub fn exact_chunk_propagator(params: &ChunkParams, n: usize, dt: f64) -> Result<ComplexMatrix> {
    check_dt(dt)?;
    build_hamiltonian(params, n)?.hermitian_exp(dt)
}

/// `exp(-i Δt (K X + ε Z))` in closed form.
pub fn single_qubit_block(k: f64, eps: f64, dt: f64) -> Block2 {
    let r = k.hypot(eps);
    if r == 0.0 {
        return [[ONE, ZERO], [ZERO, ONE]];
    }
    let (c, s) = ((r * dt).cos(), (r * dt).sin() / r);
    [
        [Complex64::new(c, -s * eps), Complex64::new(0.0, -s * k)],
        [Complex64::new(0.0, -s * k), Complex64::new(c, s * eps)],
    ]
}

/// Diagonal of `Π_{i<j} exp(-i ζ_ij Δt Z_i Z_j)`.
pub fn zz_phase_diagonal(params: &ChunkParams, n: usize, dt: f64) -> Vec<Complex64> {
    (0..1usize << n)
        .map(|b| {
            let e: f64 = pairs(n).map(|(i, j)| params.zeta_of(i, j) * zz_parity(b, i, j, n)).sum();
            (-I * (e * dt)).exp()
        })
        .collect()
}

/// Dense Trotterized chunk propagator
/// `[Π_i exp(-i H_i Δt)] · [Π_{i<j} exp(-i H_ij Δt)]`.
pub fn chunked_chunk_propagator(params: &ChunkParams, n: usize, dt: f64) -> Result<ComplexMatrix> {
    check_params(params, n)?;
    check_dt(dt)?;
    let dim = 1usize << n;
    let mut pair_part = ComplexMatrix::identity(dim);
    for (i, j) in pairs(n) {
        let w = params.zeta_of(i, j) * dt;
        let diag: Vec<Complex64> = (0..dim).map(|b| (-I * (w * zz_parity(b, i, j, n))).exp()).collect();
        pair_part = pair_part * ComplexMatrix::from_diagonal(&diag);
    }
    let mut single_part = ComplexMatrix::identity(dim);
    for q in 0..n {
        let (k, eps) = (params.k[q], params.eps[q]);
        let r = k.hypot(eps);
        let factor = if r == 0.0 {
            ComplexMatrix::identity(2)
        } else {
            pauli_exponential([k / r, 0.0, eps / r], r * dt)?
        };
        single_part = single_part * embed_single(&factor, q, n);
    }
    Ok(single_part * pair_part)
}

/// Full-schedule unitary, chunk 0 applied first.
pub fn schedule_unitary(schedule: &Schedule, method: Method) -> Result<ComplexMatrix> {
    let n = schedule.n_qubits();
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            n_qubits: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let dt = schedule.dt();
    match method {
        Method::Gates => {
            let circuit = compile_schedule(schedule, &CompileOptions::default());
            crate::gates::circuit_unitary(&circuit)
        }
        _ => schedule.chunks().iter().try_fold(ComplexMatrix::identity(1 << n), |acc, c| {
            let u = match method {
                Method::Exact => exact_chunk_propagator(c, n, dt)?,
                _ => chunked_chunk_propagator(c, n, dt)?,
            };
            Ok(u * acc)
        }),
    }
}

/// A schedule prepared for repeated application to pure states.
///
/// Chunked evolution streams 2×2 blocks and diagonal phases; exact
/// evolution precomputes the dense unitary once.
#[derive(Clone, Debug)]
pub enum Evolution {
    Dense(ComplexMatrix),
    Trotter {
        n_qubits: usize,
        /// Per chunk: ZZ phase diagonal, then one block per qubit.
        steps: Vec<(Vec<Complex64>, Vec<Block2>)>,
    },
    Circuit(Circuit),
}

impl Evolution {
    pub fn prepare(schedule: &Schedule, method: Method) -> Result<Self> {
        let n = schedule.n_qubits();
        let dt = schedule.dt();
        Ok(match method {
            Method::Exact => Evolution::Dense(schedule_unitary(schedule, Method::Exact)?),
            Method::Chunked => Evolution::Trotter {
                n_qubits: n,
                steps: schedule
                    .chunks()
                    .iter()
                    .map(|c| {
                        let blocks = (0..n).map(|q| single_qubit_block(c.k[q], c.eps[q], dt)).collect();
                        (zz_phase_diagonal(c, n, dt), blocks)
                    })
                    .collect(),
            },
            Method::Gates => Evolution::Circuit(compile_schedule(schedule, &CompileOptions::default())),
        })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        match self {
            Evolution::Dense(u) => psi.apply_matrix(u),
            Evolution::Trotter { n_qubits, steps } => {
                if psi.n_qubits() != *n_qubits {
                    return Err(Error::DimensionMismatch {
                        expected: *n_qubits,
                        found: psi.n_qubits(),
                    });
                }
                let mut out = psi.clone();
                for (diag, blocks) in steps {
                    out.apply_diagonal(diag)?;
                    for (q, b) in blocks.iter().enumerate() {
                        out.apply_single_qubit(q, b)?;
                    }
                }
                Ok(out)
            }
            Evolution::Circuit(c) => psi.apply_circuit(c),
        }
    }
}

/// Evolves `initial` through every chunk of `schedule`, chunk 0 first.
/// Density matrices evolve as `U ρ U†`.
pub fn propagate(initial: &QuantumState, schedule: &Schedule, method: Method) -> Result<QuantumState> {
    if initial.n_qubits() != schedule.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: schedule.n_qubits(),
            found: initial.n_qubits(),
        });
    }
    match initial {
        QuantumState::Pure(psi) => Ok(Evolution::prepare(schedule, method)?.apply(psi)?.into()),
        QuantumState::Mixed(rho) => {
            let u = schedule_unitary(schedule, method)?;
            Ok(QuantumState::Mixed(rho.evolve(&u)?))
        }
    }
}

/// Convenience wrapper for density-matrix inputs.
pub fn propagate_density(rho: &DensityMatrix, schedule: &Schedule, method: Method) -> Result<DensityMatrix> {
    match propagate(&rho.clone().into(), schedule, method)? {
        QuantumState::Mixed(r) => Ok(r),
        QuantumState::Pure(_) => unreachable!("propagate preserves the variant"),
    }
}
