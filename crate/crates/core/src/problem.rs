//! Ready-made problem setups: Hamiltonian, source, initial parameters and the
//! matching classical reference for each experiment family.

use crate::ansatz::{AnsatzSpec, ParameterSet};
use crate::dlvo::{dlvo_potential_vector, energy_vector, recover_physical, DlvoParams, GridSpec};
use crate::encode::{encode_impulse, params_heaviside, params_reverse_step, StepDirection};
use crate::error::Result;
use crate::hamiltonian::{BoundaryCondition, HamiltonianSpec, SourceSpec};
use crate::reference::{reference_evolve, reference_steady_state, ReferenceSolution};
use crate::vqs::EvolutionConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub ansatz: AnsatzSpec,
    pub initial: ParameterSet,
    pub hamiltonian: HamiltonianSpec,
    pub source: SourceSpec,
    /// Interaction energy on the grid; zeros when no potential applies.
    pub energy: Vec<f64>,
}

impl Problem {
    /// `u_t = u_xx` on `[0, 1]` from the reverse step.
    pub fn heat_benchmark(ansatz: AnsatzSpec, bc: BoundaryCondition) -> Result<Self> {
        let n = ansatz.n_qubits;
        let dx = 1.0 / (1u64 << n) as f64;
        Ok(Self {
            initial: params_reverse_step(&ansatz),
            hamiltonian: HamiltonianSpec::laplacian(bc, 1.0, dx, n)?,
            source: SourceSpec::none(),
            energy: vec![0.0; 1 << n],
            ansatz,
        })
    }

    /// Substituted Smoluchowski equation between an absorbing wall and a
    /// no-flux far field, starting from the impulse `|x⟩`.
    pub fn smoluchowski(ansatz: AnsatzSpec, dlvo: &DlvoParams, impulse: u64) -> Result<Self> {
        let initial = encode_impulse(&ansatz, impulse)?.params;
        Self::wall_problem(ansatz, dlvo, initial, SourceSpec::none())
    }

    /// Einstein-Smoluchowski equation with a unit far-field source, starting
    /// from the step-up profile.
    pub fn einstein_smoluchowski(ansatz: AnsatzSpec, dlvo: &DlvoParams) -> Result<Self> {
        let initial = params_heaviside(&ansatz, StepDirection::Up)?;
        let source = SourceSpec::all_ones_pauli_x(ansatz.n_qubits);
        Self::wall_problem(ansatz, dlvo, initial, source)
    }

    fn wall_problem(ansatz: AnsatzSpec, dlvo: &DlvoParams, initial: ParameterSet, source: SourceSpec) -> Result<Self> {
        dlvo.validate()?;
        let n = ansatz.n_qubits;
        let grid = GridSpec::new(n)?;
        let (phi, energy) = if dlvo.is_none() {
            (vec![0.0; 1 << n], vec![0.0; 1 << n])
        } else {
            (dlvo_potential_vector(&grid, dlvo)?, energy_vector(&grid, dlvo)?)
        };
        Ok(Self {
            hamiltonian: HamiltonianSpec::new(BoundaryCondition::DirichletNeumann, &phi, 1.0, grid.spacing(), n)?,
            ansatz,
            initial,
            source,
            energy,
        })
    }

    /// Classical profile `θ0 |ψ(θ)⟩` at the initial parameters.
    pub fn initial_profile(&self) -> Result<Vec<f64>> {
        let state = self.ansatz.build_state(&self.initial.thetas)?;
        Ok(state.amplitudes().iter().map(|a| a * self.initial.theta0).collect())
    }

    pub fn reference(&self, dt: f64, t_final: f64) -> Result<ReferenceSolution> {
        let m = self.hamiltonian.dense_matrix()?;
        let f = self.source.state(self.ansatz.n_qubits)?;
        reference_evolve(&m, &f, &self.initial_profile()?, dt, t_final)
    }

    pub fn steady_state(&self) -> Result<Vec<f64>> {
        let m = self.hamiltonian.dense_matrix()?;
        let f = self.source.state(self.ansatz.n_qubits)?;
        reference_steady_state(&m, &f)
    }

    pub fn evolution_config(&self, dt: f64, t_final: f64) -> EvolutionConfig {
        let mut cfg = EvolutionConfig::new(self.ansatz, self.initial.clone(), self.hamiltonian.clone(), dt, t_final);
        cfg.source = self.source.clone();
        cfg
    }

    /// Physical-space profile from a normalised state and `θ0`.
    pub fn physical(&self, psi: &[f64], theta0: f64) -> Result<Vec<f64>> {
        recover_physical(psi, theta0, &self.energy)
    }
}
