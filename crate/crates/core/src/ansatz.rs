//! Real-amplitude layered ansätze and their parameter derivatives.
//!
//! A circuit is `n_layers` blocks, each an RY layer (one rotation per wire)
//! followed by a CNOT entangling layer. Linear entanglement chains
//! wire `j → j+1`; circular entanglement appends the ring-closing
//! CNOT from the last wire to the first. With [`FinalLayer::Unentangled`]
//! the last block has no entangling layer.
//!
//! Parameters are stored layer-major: index `(l-1)·n + (j-1)` holds the angle
//! of wire `j` in layer `l`.

use crate::error::{domain, Result};
use crate::statevec::{GateOp, RealState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entanglement {
    Linear,
    Circular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FinalLayer {
    Entangled,
    Unentangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub entanglement: Entanglement,
    pub final_layer: FinalLayer,
}

impl AnsatzSpec {
    pub fn new(
        n_qubits: usize,
        n_layers: usize,
        entanglement: Entanglement,
        final_layer: FinalLayer,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::statevec::MAX_QUBITS {
            return Err(domain(format!("invalid qubit count {n_qubits}")));
        }
        if n_layers == 0 {
            return Err(domain("an ansatz needs at least one layer"));
        }
        Ok(Self {
            n_qubits,
            n_layers,
            entanglement,
            final_layer,
        })
    }

    /// Circular entanglement after every block, including the last.
    pub fn full_circular(n_qubits: usize, n_layers: usize) -> Result<Self> {
        Self::new(n_qubits, n_layers, Entanglement::Circular, FinalLayer::Entangled)
    }

    pub fn is_full_circular(&self) -> bool {
        self.entanglement == Entanglement::Circular && self.final_layer == FinalLayer::Entangled
    }

    pub fn param_count(&self) -> usize {
        self.n_qubits * self.n_layers
    }

    /// Flat parameter index of `(layer, wire)`, both 1-based.
    pub fn param_index(&self, layer: usize, wire: usize) -> usize {
        debug_assert!((1..=self.n_layers).contains(&layer) && (1..=self.n_qubits).contains(&wire));
        (layer - 1) * self.n_qubits + (wire - 1)
    }

    /// Short label used in configs and output manifests.
    pub fn variant_name(&self) -> &'static str {
        match (self.entanglement, self.final_layer) {
            (Entanglement::Linear, FinalLayer::Unentangled) => "linear-unentangled",
            (Entanglement::Linear, FinalLayer::Entangled) => "linear",
            (Entanglement::Circular, FinalLayer::Unentangled) => "circular-unentangled",
            (Entanglement::Circular, FinalLayer::Entangled) => "full-circular",
        }
    }

    pub fn from_variant_name(name: &str, n_qubits: usize, n_layers: usize) -> Result<Self> {
        let (e, f) = match name {
            "linear-unentangled" | "a" => (Entanglement::Linear, FinalLayer::Unentangled),
            "linear" | "b" => (Entanglement::Linear, FinalLayer::Entangled),
            "circular-unentangled" | "c" => (Entanglement::Circular, FinalLayer::Unentangled),
            "full-circular" | "d" => (Entanglement::Circular, FinalLayer::Entangled),
            other => return Err(domain(format!("unknown ansatz variant '{other}'"))),
        };
        Self::new(n_qubits, n_layers, e, f)
    }

    pub fn all_variants(n_qubits: usize, n_layers: usize) -> Result<[AnsatzSpec; 4]> {
        Ok([
            Self::new(n_qubits, n_layers, Entanglement::Linear, FinalLayer::Unentangled)?,
            Self::new(n_qubits, n_layers, Entanglement::Linear, FinalLayer::Entangled)?,
            Self::new(n_qubits, n_layers, Entanglement::Circular, FinalLayer::Unentangled)?,
            Self::new(n_qubits, n_layers, Entanglement::Circular, FinalLayer::Entangled)?,
        ])
    }

    /// CNOTs of one entangling layer, in application order.
    pub fn entangling_layer(&self) -> Vec<GateOp> {
        entangling_layer(self.n_qubits, self.entanglement)
    }

    fn has_entangler(&self, layer: usize) -> bool {
        layer < self.n_layers || self.final_layer == FinalLayer::Entangled
    }

    fn check_thetas(&self, thetas: &[f64]) -> Result<()> {
        if thetas.len() != self.param_count() {
            return Err(domain(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                thetas.len()
            )));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(domain("parameters must be finite"));
        }
        Ok(())
    }

    /// The gate sequence for `thetas`, tagged with the parameter each RY reads.
    pub fn circuit(&self, thetas: &[f64]) -> Result<Vec<(GateOp, Option<usize>)>> {
        self.check_thetas(thetas)?;
        let entangler = self.entangling_layer();
        let mut ops = Vec::with_capacity(self.param_count() + self.n_layers * entangler.len());
        for layer in 1..=self.n_layers {
            for wire in 1..=self.n_qubits {
                let k = self.param_index(layer, wire);
                ops.push((GateOp::Ry { qubit: wire - 1, angle: thetas[k] }, Some(k)));
            }
            if self.has_entangler(layer) {
                ops.extend(entangler.iter().map(|g| (*g, None)));
            }
        }
        Ok(ops)
    }

    /// Normalised trial state `|ψ(θ)⟩`, applied to `|0…0⟩`.
    pub fn build_state(&self, thetas: &[f64]) -> Result<RealState> {
        let mut state = RealState::basis(self.n_qubits, 0)?;
        for (gate, _) in self.circuit(thetas)? {
            state.apply_unchecked(&gate);
        }
        Ok(state)
    }

    /// `∂|ψ(θ)⟩/∂θ_k` for the 0-based parameter index `k`. The derivative factor
    /// is inserted directly after the rotation it differentiates (the two
    /// commute), so the result has norm exactly 1/2.
    pub fn derivative_state(&self, thetas: &[f64], k: usize) -> Result<RealState> {
        if k >= self.param_count() {
            return Err(domain(format!(
                "parameter index {k} out of range for {} parameters",
                self.param_count()
            )));
        }
        let mut state = RealState::basis(self.n_qubits, 0)?;
        for (gate, param) in self.circuit(thetas)? {
            state.apply_unchecked(&gate);
            if param == Some(k) {
                if let GateOp::Ry { qubit, .. } = gate {
                    state.apply_unchecked(&GateOp::Dry(qubit));
                }
            }
        }
        Ok(state)
    }

    /// All derivative states, in parameter order.
    pub fn derivative_states(&self, thetas: &[f64]) -> Result<Vec<RealState>> {
        (0..self.param_count())
            .map(|k| self.derivative_state(thetas, k))
            .collect()
    }
}

pub(crate) fn entangling_layer(n_qubits: usize, entanglement: Entanglement) -> Vec<GateOp> {
    let mut gates: Vec<GateOp> = (0..n_qubits.saturating_sub(1))
        .map(|q| GateOp::Cnot { control: q, target: q + 1 })
        .collect();
    if entanglement == Entanglement::Circular && n_qubits > 1 {
        gates.push(GateOp::Cnot { control: n_qubits - 1, target: 0 });
    }
    gates
}

/// Normalisation parameter `θ0` together with the circuit angles.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub theta0: f64,
    pub thetas: Vec<f64>,
}

impl ParameterSet {
    pub fn new(theta0: f64, thetas: Vec<f64>) -> Self {
        Self { theta0, thetas }
    }

    pub fn zeros(spec: &AnsatzSpec) -> Self {
        Self::new(1.0, vec![0.0; spec.param_count()])
    }

    /// `(θ0, θ_1, …, θ_N)` as one vector.
    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.theta0).chain(self.thetas.iter().copied()).collect()
    }

    pub fn from_vec(v: &[f64]) -> Self {
        Self::new(v[0], v[1..].to_vec())
    }

    pub fn len(&self) -> usize {
        self.thetas.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_finite(&self) -> bool {
        self.theta0.is_finite() && self.thetas.iter().all(|t| t.is_finite())
    }
}
