//! Pure and mixed register states.

use crate::error::{Error, Result};
use crate::gates::{rotation_matrix, Circuit, GateOp};
use crate::linalg::{ComplexMatrix, ONE, ZERO};
use num_complex::Complex64;
use rand::Rng;

const NORM_TOL: f64 = 1e-10;

/// 2×2 complex block in row-major order.
pub type Block2 = [[Complex64; 2]; 2];

fn check_qubit(index: usize, n_qubits: usize) -> Result<()> {
    if index >= n_qubits {
        Err(Error::IndexOutOfRange { index, n_qubits })
    } else {
        Ok(())
    }
}

fn check_pair(i: usize, j: usize, n_qubits: usize) -> Result<()> {
    check_qubit(i, n_qubits)?;
    check_qubit(j, n_qubits)?;
    if i == j {
        return Err(Error::InvalidArgument(format!("pair uses qubit {i} twice")));
    }
    Ok(())
}

/// Basis-state bit of `qubit` (qubit 0 is the most significant bit).
#[inline]
pub fn bit(index: usize, qubit: usize, n_qubits: usize) -> usize {
    (index >> (n_qubits - 1 - qubit)) & 1
}

/// `(-1)^(b_i + b_j)` for basis index `index`.
#[inline]
pub fn zz_parity(index: usize, i: usize, j: usize, n_qubits: usize) -> f64 {
    if bit(index, i, n_qubits) == bit(index, j, n_qubits) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Validated constructor; amplitudes must have unit norm within 1e-10.
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("register needs at least one qubit".into()));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                found: amps.len(),
            });
        }
        let s = Self { n_qubits, amps };
        let norm = s.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(norm));
        }
        Ok(s)
    }

    /// Normalizes real or complex amplitudes before validating.
    pub fn normalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Unnormalized(norm * norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(n_qubits, amps)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n_qubits];
        *amps.get_mut(index).ok_or(Error::InvalidArgument(format!(
            "basis index {index} outside a {n_qubits}-qubit register"
        )))? = ONE;
        Self::new(n_qubits, amps)
    }

    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0).expect("index 0 always valid")
    }

    /// Random normalized state with uniform box-distributed components.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Self::normalized(n_qubits, amps).expect("nonzero random state")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies a 2×2 block to `qubit` by pairing amplitudes one stride apart.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &Block2) -> Result<()> {
        check_qubit(qubit, self.n_qubits)?;
        let stride = 1usize << (self.n_qubits - 1 - qubit);
        for base in (0..self.amps.len()).step_by(2 * stride) {
            for lo in base..base + stride {
                let hi = lo + stride;
                let (a0, a1) = (self.amps[lo], self.amps[hi]);
                self.amps[lo] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[hi] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Multiplies each amplitude by the matching diagonal entry.
    pub fn apply_diagonal(&mut self, diag: &[Complex64]) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: diag.len(),
            });
        }
        self.amps.iter_mut().zip(diag).for_each(|(a, d)| *a *= d);
        Ok(())
    }

    pub fn apply_gate_mut(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            GateOp::Cnot { control, target } => {
                let n = self.n_qubits;
                let cbit = 1usize << (n - 1 - control);
                let tbit = 1usize << (n - 1 - target);
                for idx in 0..self.amps.len() {
                    if idx & cbit != 0 && idx & tbit == 0 {
                        self.amps.swap(idx, idx | tbit);
                    }
                }
                Ok(())
            }
            _ => {
                let (axis, qubit, angle) = gate.as_rotation().expect("rotation");
                let m = rotation_matrix(axis, angle);
                let block = [[m.get(0, 0), m.get(0, 1)], [m.get(1, 0), m.get(1, 1)]];
                self.apply_single_qubit(qubit, &block)
            }
        }
    }

    pub fn apply_gate(&self, gate: &GateOp) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub fn apply_circuit_mut(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: circuit.n_qubits(),
            });
        }
        circuit.ops().iter().try_for_each(|g| self.apply_gate_mut(g))
    }

    pub fn apply_circuit(&self, circuit: &Circuit) -> Result<Self> {
        let mut out = self.clone();
        out.apply_circuit_mut(circuit)?;
        Ok(out)
    }

    /// Dense `U|ψ⟩`.
    pub fn apply_matrix(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.rows(),
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: u.mul_vec(&self.amps),
        })
    }

    /// ⟨Z_i Z_j⟩ as a parity-weighted sum of basis probabilities.
    pub fn expectation_zz(&self, i: usize, j: usize) -> Result<f64> {
        check_pair(i, j, self.n_qubits)?;
        let n = self.n_qubits;
        let v: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * zz_parity(b, i, j, n))
            .sum();
        Ok(v.clamp(-1.0, 1.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: ComplexMatrix,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, unit trace, positive semidefinite
    /// (all within 1e-10).
    pub fn new(n_qubits: usize, rho: ComplexMatrix) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if rho.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.rows(),
            });
        }
        if rho.distance(&rho.adjoint())? > NORM_TOL {
            return Err(Error::InvalidArgument("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("density matrix trace is {tr}")));
        }
        let min_eig = rho
            .inner()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min_eig}"
            )));
        }
        Ok(Self { n_qubits, rho })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let rho = ComplexMatrix::from_fn(a.len(), a.len(), |r, c| a[r] * a[c].conj());
        Self {
            n_qubits: psi.n_qubits(),
            rho,
        }
    }

    /// Convex mixture `Σ w_k |ψ_k⟩⟨ψ_k|`; weights must sum to one.
    pub fn mixture(components: &[(f64, StateVector)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let n = first.1.n_qubits();
        let dim = 1usize << n;
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, psi) in components {
            if psi.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: psi.n_qubits(),
                });
            }
            acc = acc + Self::from_pure(psi).rho.scale((*w).into());
        }
        Self::new(n, acc)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.shape() != self.rho.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.rho.rows(),
                found: u.rows(),
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            rho: &(u * &self.rho) * &u.adjoint(),
        })
    }

    /// Tr[ρ Z_i Z_j]; Z_i Z_j is diagonal, so only ρ's diagonal contributes.
    pub fn expectation_zz(&self, i: usize, j: usize) -> Result<f64> {
        check_pair(i, j, self.n_qubits)?;
        let n = self.n_qubits;
        let v: f64 = (0..self.rho.rows())
            .map(|b| self.rho.get(b, b).re * zz_parity(b, i, j, n))
            .sum();
        Ok(v.clamp(-1.0, 1.0))
    }
}

/// Either representation; propagation preserves the variant.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.n_qubits(),
            QuantumState::Mixed(r) => r.n_qubits(),
        }
    }

    pub fn expectation_zz(&self, i: usize, j: usize) -> Result<f64> {
        match self {
            QuantumState::Pure(s) => s.expectation_zz(i, j),
            QuantumState::Mixed(r) => r.expectation_zz(i, j),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(s) => DensityMatrix::from_pure(s),
            QuantumState::Mixed(r) => r.clone(),
        }
    }
}

impl From<StateVector> for QuantumState {
    fn from(s: StateVector) -> Self {
        QuantumState::Pure(s)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(r: DensityMatrix) -> Self {
        QuantumState::Mixed(r)
    }
}

/// Free-function form of [`QuantumState::expectation_zz`].
pub fn expectation_zz(state: &QuantumState, i: usize, j: usize) -> Result<f64> {
    state.expectation_zz(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::circuit_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn cnot_on_basis_states() {
        let cx = GateOp::Cnot { control: 0, target: 1 };
        let s00 = StateVector::basis(2, 0b00).unwrap();
        assert_eq!(s00.apply_gate(&cx).unwrap(), s00);
        let s10 = StateVector::basis(2, 0b10).unwrap();
        assert_eq!(s10.apply_gate(&cx).unwrap(), StateVector::basis(2, 0b11).unwrap());
    }

    #[test]
    fn streaming_ry_matches_dense_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = StateVector::random(3, &mut rng);
        let g = GateOp::RotY { qubit: 1, angle: 0.3 };
        let streamed = psi.apply_gate(&g).unwrap();
        let dense = psi.apply_matrix(&g.embedded_matrix(3).unwrap()).unwrap();
        let err: f64 = streamed
            .amplitudes()
            .iter()
            .zip(dense.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12);
        assert!((streamed.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_index_out_of_range() {
        let psi = StateVector::zero(2);
        assert!(matches!(
            psi.apply_gate(&GateOp::RotZ { qubit: 5, angle: 1.0 }),
            Err(Error::IndexOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn zz_expectation_examples() {
        assert_eq!(StateVector::zero(2).expectation_zz(0, 1).unwrap(), 1.0);
        let flat = StateVector::new(2, real(&[0.5; 4])).unwrap();
        assert!(flat.expectation_zz(0, 1).unwrap().abs() < 1e-15);
        // parities of |01>, |10>, |11> are -1, -1, +1
        let s = 1.0 / 3f64.sqrt();
        let p = StateVector::new(2, real(&[0.0, s, s, s])).unwrap();
        assert!((p.expectation_zz(0, 1).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(p.expectation_zz(1, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn density_and_pure_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = StateVector::random(3, &mut rng);
        let rho = DensityMatrix::from_pure(&psi);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let a = psi.expectation_zz(i, j).unwrap();
            let b = rho.expectation_zz(i, j).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_validation() {
        let bad = ComplexMatrix::from_diagonal(&real(&[0.7, 0.7]));
        assert!(DensityMatrix::new(1, bad).is_err());
        let neg = ComplexMatrix::from_diagonal(&real(&[1.2, -0.2]));
        assert!(DensityMatrix::new(1, neg).is_err());
        let ok = ComplexMatrix::from_diagonal(&real(&[0.25, 0.75]));
        assert!(DensityMatrix::new(1, ok).is_ok());
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(
            StateVector::new(1, real(&[1.0, 1.0])),
            Err(Error::Unnormalized(_))
        ));
        assert!(matches!(
            StateVector::new(2, real(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_evolution_matches_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = StateVector::random(2, &mut rng);
        let c = Circuit::from_ops(
            2,
            vec![
                GateOp::RotX { qubit: 0, angle: 0.4 },
                GateOp::Cnot { control: 0, target: 1 },
                GateOp::RotZ { qubit: 1, angle: -1.1 },
            ],
        )
        .unwrap();
        let u = circuit_unitary(&c).unwrap();
        let via_rho = DensityMatrix::from_pure(&psi).evolve(&u).unwrap();
        let via_psi = DensityMatrix::from_pure(&psi.apply_circuit(&c).unwrap());
        assert!(via_rho.matrix().distance(via_psi.matrix()).unwrap() < 1e-12);
    }
}
