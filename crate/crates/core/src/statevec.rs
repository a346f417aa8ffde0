//! Real-amplitude statevector engine.
//!
//! Every gate used by the solver (RY, CNOT, X, H and the derivative factor
//! `-(i/2)σ_Y`) is a real matrix, so amplitudes are stored as `f64`.
//!
//! Qubit `q` is bit `q` of the basis index: qubit 0 is the least-significant
//! bit, and grid point `i` of a discretised field is basis state `|i⟩`.
//! Circuit wire `j` (1-based, top to bottom) acts on qubit `j - 1`, so the
//! leading factor of a tensor product such as `X ⊗ I ⊗ I` is the last wire.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{domain, Result};

/// Largest register the engine accepts. Dense `2^n` storage beyond this is
/// not useful for the problem sizes the solver targets.
pub const MAX_QUBITS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Ry { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    PauliX(usize),
    Hadamard(usize),
    /// Derivative insertion `-(i/2)σ_Y = [[0, -1/2], [1/2, 0]]`.
    Dry(usize),
}

impl GateOp {
    fn check(&self, n_qubits: usize) -> Result<()> {
        let in_range = |q: usize| -> Result<()> {
            if q < n_qubits {
                Ok(())
            } else {
                Err(domain(format!(
                    "qubit index {q} out of range for {n_qubits} qubits"
                )))
            }
        };
        match *self {
            GateOp::Ry { qubit, angle } => {
                in_range(qubit)?;
                if !angle.is_finite() {
                    return Err(domain("rotation angle must be finite"));
                }
                Ok(())
            }
            GateOp::Cnot { control, target } => {
                in_range(control)?;
                in_range(target)?;
                if control == target {
                    return Err(domain("CNOT control and target must differ"));
                }
                Ok(())
            }
            GateOp::PauliX(q) | GateOp::Hadamard(q) | GateOp::Dry(q) => in_range(q),
        }
    }

    /// The 2×2 real matrix of a single-qubit gate, row-major.
    fn single_qubit_matrix(&self) -> Option<(usize, [f64; 4])> {
        match *self {
            GateOp::Ry { qubit, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                Some((qubit, [c, -s, s, c]))
            }
            GateOp::PauliX(q) => Some((q, [0.0, 1.0, 1.0, 0.0])),
            GateOp::Hadamard(q) => Some((q, [FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])),
            GateOp::Dry(q) => Some((q, [0.0, -0.5, 0.5, 0.0])),
            GateOp::Cnot { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealState {
    n_qubits: usize,
    amplitudes: Vec<f64>,
}

impl RealState {
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        Ok(Self {
            n_qubits,
            amplitudes: vec![0.0; 1 << n_qubits],
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::zeros(n_qubits)?;
        if index >= state.dim() {
            return Err(domain(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        state.amplitudes[index] = 1.0;
        Ok(state)
    }

    /// Wraps an amplitude vector. The length must be a power of two and all
    /// entries finite.
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(domain(format!(
                "amplitude vector length {len} is not a power of two ≥ 2"
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(domain("amplitudes must be finite"));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
    }

    pub fn inner(&self, other: &RealState) -> Result<f64> {
        inner_product(&self.amplitudes, &other.amplitudes)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.check(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Returns a new state with `gate` applied.
    pub fn applied(&self, gate: &GateOp) -> Result<RealState> {
        let mut out = self.clone();
        out.apply(gate)?;
        Ok(out)
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        for gate in gates {
            self.apply(gate)?;
        }
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &GateOp) {
        match gate.single_qubit_matrix() {
            Some((qubit, m)) => apply_single(&mut self.amplitudes, qubit, m),
            None => {
                if let GateOp::Cnot { control, target } = *gate {
                    apply_cnot(&mut self.amplitudes, control, target);
                }
            }
        }
    }
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(domain(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}

fn apply_single(amps: &mut [f64], qubit: usize, m: [f64; 4]) {
    let stride = 1usize << qubit;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (v0, v1) = (*a0, *a1);
            *a0 = m[0] * v0 + m[1] * v1;
            *a1 = m[2] * v0 + m[3] * v1;
        }
    }
}

fn apply_cnot(amps: &mut [f64], control: usize, target: usize) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    for i in 0..amps.len() {
        if i & cbit != 0 && i & tbit == 0 {
            amps.swap(i, i | tbit);
        }
    }
}

/// `Σ_i a_i b_i` over equal-length slices.
pub fn inner_product(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(domain(format!(
            "inner product length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
}
