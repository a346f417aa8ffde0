//! Ancilla-interference estimates of the McLachlan matrix entries.
//!
//! Each entry is a real inner product `⟨φ_l| O |φ_r⟩` between two circuit
//! outputs. The circuit puts an ancilla in `|+⟩`, prepares `φ_r` on the `|0⟩`
//! branch and `φ_l` on the `|1⟩` branch, applies a final Hadamard to the
//! ancilla and measures the ancilla together with `O` written as
//! `U† diag(w) U`. An outcome `(a, k)` has probability
//! `|(Uφ_r ± Uφ_l)_k / 2|²` and value `(-1)^a w_k`, so the mean value is
//! exactly `⟨φ_l|O|φ_r⟩`. With `O = I` this is the plain Hadamard test.
//!
//! Derivative operands use the unitary insertion `-iσ_Y` (a real matrix); the
//! coefficient `1/2` of each derivative is applied to the estimate afterwards.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::ansatz::AnsatzSpec;
use crate::error::{domain, Result};
use crate::hamiltonian::{DiagonalObservable, HamiltonianSpec, SourceSpec};
use crate::statevec::RealState;

/// Shots per circuit used unless configured otherwise.
pub const DEFAULT_SHOTS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    /// The trial state `|ψ(θ)⟩`.
    Trial,
    /// The trial circuit with the derivative factor inserted at parameter `k`.
    Derivative(usize),
}

impl Operand {
    fn prefactor(&self) -> f64 {
        match self {
            Operand::Trial => 1.0,
            Operand::Derivative(_) => 0.5,
        }
    }
}

/// One quantity that enters the McLachlan system (without `θ0` factors).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryDescriptor {
    /// `⟨l|r⟩`
    Overlap(Operand, Operand),
    /// `⟨l|H|ψ⟩`
    Hamiltonian(Operand),
    /// `⟨l|F|0⟩`
    Source(Operand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Expectation computed from the outcome probabilities, no sampling noise.
    ExactProbabilities,
    Shots(u64),
}

/// Outcome distribution of one measured circuit, scaled so that its mean is
/// that circuit's contribution to an entry.
#[derive(Debug, Clone)]
struct Measurement {
    probabilities: Vec<f64>,
    values: Vec<f64>,
    scale: f64,
}

impl Measurement {
    fn new(left: &RealState, right: &RealState, observable: &DiagonalObservable, scale: f64) -> Self {
        let mut l = left.clone();
        let mut r = right.clone();
        observable.basis.apply(&mut l);
        observable.basis.apply(&mut r);
        let dim = l.dim();
        let mut probabilities = Vec::with_capacity(2 * dim);
        let mut values = Vec::with_capacity(2 * dim);
        for sign in [1.0, -1.0] {
            for k in 0..dim {
                let amp = 0.5 * (r.amplitudes()[k] + sign * l.amplitudes()[k]);
                probabilities.push(amp * amp);
                values.push(sign * observable.weights[k]);
            }
        }
        Self { probabilities, values, scale }
    }

    fn mean(&self) -> f64 {
        self.scale * self.probabilities.iter().zip(&self.values).map(|(p, v)| p * v).sum::<f64>()
    }

    fn variance(&self) -> f64 {
        let m = self.probabilities.iter().zip(&self.values).map(|(p, v)| p * v).sum::<f64>();
        let m2 = self.probabilities.iter().zip(&self.values).map(|(p, v)| p * v * v).sum::<f64>();
        self.scale * self.scale * (m2 - m * m).max(0.0)
    }

    fn sample<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Result<f64> {
        let dist = WeightedIndex::new(&self.probabilities)
            .map_err(|e| domain(format!("invalid outcome distribution: {e}")))?;
        let total: f64 = (0..shots).map(|_| self.values[dist.sample(rng)]).sum();
        Ok(self.scale * total / shots as f64)
    }
}

/// Circuit outputs and observables at one parameter point.
#[derive(Debug, Clone)]
pub struct CircuitContext {
    trial: RealState,
    /// Unit-norm states with `-iσ_Y` inserted, one per parameter.
    inserted: Vec<RealState>,
    ground: RealState,
    hamiltonian: Vec<DiagonalObservable>,
    source: Vec<(f64, DiagonalObservable)>,
    h_applied: Vec<f64>,
    f_state: Vec<f64>,
}

impl CircuitContext {
    pub fn new(
        ansatz: &AnsatzSpec,
        thetas: &[f64],
        hamiltonian: &HamiltonianSpec,
        source: &SourceSpec,
    ) -> Result<Self> {
        let n = ansatz.n_qubits;
        if hamiltonian.n_qubits() != n {
            return Err(domain(format!(
                "ansatz has {n} qubits but the Hamiltonian has {}",
                hamiltonian.n_qubits()
            )));
        }
        let trial = ansatz.build_state(thetas)?;
        let inserted = ansatz
            .derivative_states(thetas)?
            .into_iter()
            .map(|mut d| {
                d.scale(2.0);
                d
            })
            .collect();
        let h_applied = hamiltonian.apply(&trial)?;
        Ok(Self {
            h_applied,
            f_state: source.state(n)?,
            ground: RealState::basis(n, 0)?,
            hamiltonian: hamiltonian.measurement_groups(),
            source: source.terms.iter().map(|(c, p)| (*c, p.observable(n))).collect(),
            trial,
            inserted,
        })
    }

    pub fn trial(&self) -> &RealState {
        &self.trial
    }

    pub fn param_count(&self) -> usize {
        self.inserted.len()
    }

    fn operand(&self, op: Operand) -> Result<&RealState> {
        match op {
            Operand::Trial => Ok(&self.trial),
            Operand::Derivative(k) => self.inserted.get(k).ok_or_else(|| {
                domain(format!("derivative index {k} out of range for {} parameters", self.inserted.len()))
            }),
        }
    }

    /// Statevector value of the entry.
    pub fn exact(&self, entry: EntryDescriptor) -> Result<f64> {
        match entry {
            EntryDescriptor::Overlap(l, r) => {
                Ok(l.prefactor() * r.prefactor() * self.operand(l)?.inner(self.operand(r)?)?)
            }
            EntryDescriptor::Hamiltonian(l) => {
                let s = self.operand(l)?;
                Ok(l.prefactor() * crate::statevec::inner_product(s.amplitudes(), &self.h_applied)?)
            }
            EntryDescriptor::Source(l) => {
                let s = self.operand(l)?;
                Ok(l.prefactor() * crate::statevec::inner_product(s.amplitudes(), &self.f_state)?)
            }
        }
    }

    fn measurements(&self, entry: EntryDescriptor) -> Result<Vec<Measurement>> {
        let identity = |dim: usize| DiagonalObservable {
            basis: Default::default(),
            weights: vec![1.0; dim],
        };
        Ok(match entry {
            EntryDescriptor::Overlap(l, r) => {
                let scale = l.prefactor() * r.prefactor();
                vec![Measurement::new(self.operand(l)?, self.operand(r)?, &identity(self.trial.dim()), scale)]
            }
            EntryDescriptor::Hamiltonian(l) => {
                let left = self.operand(l)?;
                self.hamiltonian
                    .iter()
                    .map(|obs| Measurement::new(left, &self.trial, obs, l.prefactor()))
                    .collect()
            }
            EntryDescriptor::Source(l) => {
                let left = self.operand(l)?;
                self.source
                    .iter()
                    .map(|(c, obs)| Measurement::new(left, &self.ground, obs, c * l.prefactor()))
                    .collect()
            }
        })
    }

    /// Estimate of the entry through the measurement circuits.
    pub fn estimate<R: Rng + ?Sized>(&self, entry: EntryDescriptor, sampling: Sampling, rng: &mut R) -> Result<f64> {
        let circuits = self.measurements(entry)?;
        match sampling {
            Sampling::ExactProbabilities => Ok(circuits.iter().map(Measurement::mean).sum()),
            Sampling::Shots(0) => Err(domain("at least one shot is required")),
            Sampling::Shots(shots) => circuits.iter().map(|m| m.sample(shots, rng)).sum(),
        }
    }

    /// Standard error of a `shots`-shot estimate, from the exact outcome
    /// distribution.
    pub fn standard_error(&self, entry: EntryDescriptor, shots: u64) -> Result<f64> {
        if shots == 0 {
            return Err(domain("at least one shot is required"));
        }
        let var: f64 = self.measurements(entry)?.iter().map(Measurement::variance).sum();
        Ok((var / shots as f64).sqrt())
    }
}

/// Estimates one entry with `shots` samples per circuit from a fresh stream
/// seeded by `seed`.
pub fn hadamard_test_estimate(
    ctx: &CircuitContext,
    entry: EntryDescriptor,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    ctx.estimate(entry, Sampling::Shots(shots), &mut rng)
}
