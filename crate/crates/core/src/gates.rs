//! Primitive gates and circuits.
//!
//! Rotations use the half-angle convention `R_a(θ) = exp(-i θ/2 σ_a)`.
//! [`pauli_exponential`] uses the full angle, `exp(-i α n̂·σ)`.

use crate::error::{Error, Result};
use crate::linalg::{embed_single, pauli_x, pauli_y, pauli_z, ComplexMatrix, I, ONE, ZERO};
use num_complex::Complex64;
use std::fmt;

/// Largest register `circuit_unitary` will densify by default.
pub const DEFAULT_DENSE_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// 2×2 rotation matrix about `axis` by `theta` radians.
pub fn rotation_matrix(axis: Axis, theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let c = Complex64::new(c, 0.0);
    match axis {
        Axis::X => ComplexMatrix::from_rows(2, 2, &[c, -I * s, -I * s, c]),
        Axis::Y => ComplexMatrix::from_rows(
            2,
            2,
            &[c, Complex64::new(-s, 0.0), Complex64::new(s, 0.0), c],
        ),
        Axis::Z => ComplexMatrix::from_diagonal(&[(-I * (theta / 2.0)).exp(), (I * (theta / 2.0)).exp()]),
    }
}

/// `I cos α − i (n̂·σ) sin α` for a unit axis `n_hat`.
pub fn pauli_exponential(n_hat: [f64; 3], alpha: f64) -> Result<ComplexMatrix> {
    let norm = n_hat.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "rotation axis must be a unit vector, |n| = {norm}"
        )));
    }
    let [nx, ny, nz] = n_hat;
    let generator = pauli_x().scale(nx.into()) + pauli_y().scale(ny.into()) + pauli_z().scale(nz.into());
    Ok(ComplexMatrix::identity(2).scale(alpha.cos().into()) + generator.scale(-I * alpha.sin()))
}

/// A primitive operation in application order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    RotX { qubit: usize, angle: f64 },
    RotY { qubit: usize, angle: f64 },
    RotZ { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl GateOp {
    pub fn rotation(axis: Axis, qubit: usize, angle: f64) -> Self {
        match axis {
            Axis::X => GateOp::RotX { qubit, angle },
            Axis::Y => GateOp::RotY { qubit, angle },
            Axis::Z => GateOp::RotZ { qubit, angle },
        }
    }

    /// `(axis, qubit, angle)` for rotations, `None` for CNOT.
    pub fn as_rotation(&self) -> Option<(Axis, usize, f64)> {
        match *self {
            GateOp::RotX { qubit, angle } => Some((Axis::X, qubit, angle)),
            GateOp::RotY { qubit, angle } => Some((Axis::Y, qubit, angle)),
            GateOp::RotZ { qubit, angle } => Some((Axis::Z, qubit, angle)),
            GateOp::Cnot { .. } => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Cnot { .. })
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |index: usize| {
            if index >= n_qubits {
                Err(Error::IndexOutOfRange { index, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            GateOp::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::InvalidArgument(format!(
                        "CNOT control and target are both qubit {control}"
                    )));
                }
                Ok(())
            }
            _ => {
                let (_, q, angle) = self.as_rotation().expect("rotation");
                if !angle.is_finite() {
                    return Err(Error::NonFinite(format!("rotation angle on qubit {q}")));
                }
                check(q)
            }
        }
    }

    /// Dense `2^n × 2^n` matrix of this gate on an `n`-qubit register.
    pub fn embedded_matrix(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        self.validate(n_qubits)?;
        Ok(match *self {
            GateOp::Cnot { control, target } => {
                let dim = 1usize << n_qubits;
                let cbit = 1usize << (n_qubits - 1 - control);
                let tbit = 1usize << (n_qubits - 1 - target);
                ComplexMatrix::from_fn(dim, dim, |r, c| {
                    let image = if c & cbit != 0 { c ^ tbit } else { c };
                    if r == image {
                        ONE
                    } else {
                        ZERO
                    }
                })
            }
            _ => {
                let (axis, q, angle) = self.as_rotation().expect("rotation");
                embed_single(&rotation_matrix(axis, angle), q, n_qubits)
            }
        })
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::RotX { qubit, angle } => write!(f, "Rx({angle}) q{qubit}"),
            GateOp::RotY { qubit, angle } => write!(f, "Ry({angle}) q{qubit}"),
            GateOp::RotZ { qubit, angle } => write!(f, "Rz({angle}) q{qubit}"),
            GateOp::Cnot { control, target } => write!(f, "CNOT q{control} -> q{target}"),
        }
    }
}

/// Ordered gate list; `ops[0]` acts on the state first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        ops.iter().try_for_each(|g| g.validate(n_qubits))?;
        Ok(Self { n_qubits, ops })
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<()> {
        ops.into_iter().try_for_each(|g| self.push(g))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn ops_mut(&mut self) -> &mut [GateOp] {
        &mut self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `(one_qubit, two_qubit)` gate counts.
    pub fn gate_counts(&self) -> (usize, usize) {
        let two = self.ops.iter().filter(|g| g.is_two_qubit()).count();
        (self.ops.len() - two, two)
    }
}

/// Dense unitary of `circuit`, first op rightmost in the product.
pub fn circuit_unitary(circuit: &Circuit) -> Result<ComplexMatrix> {
    circuit_unitary_with_cap(circuit, DEFAULT_DENSE_CAP)
}

pub fn circuit_unitary_with_cap(circuit: &Circuit, cap: usize) -> Result<ComplexMatrix> {
    let n = circuit.n_qubits();
    if n > cap {
        return Err(Error::CapExceeded { n_qubits: n, cap });
    }
    circuit.ops().iter().try_fold(ComplexMatrix::identity(1 << n), |acc, g| {
        Ok(g.embedded_matrix(n)? * acc)
    })
}
