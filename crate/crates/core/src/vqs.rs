//! Variational time evolution via McLachlan's principle.
//!
//! The unnormalised solution is represented as `θ0 |ψ(θ)⟩`. Each step solves
//! `A θ̇ = C` for the rates of all `N + 1` parameters and advances them with an
//! explicit integrator.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{AnsatzSpec, ParameterSet};
use crate::error::{domain, numeric, Error, Result};
use crate::hamiltonian::{HamiltonianSpec, SourceSpec};
use crate::reference::{norm_error, step_count, trace_error, ReferenceSolution};
use crate::sampling::{CircuitContext, EntryDescriptor, Operand, Sampling};
use crate::statevec::RealState;

/// Default relative singular-value cutoff of the pseudo-inverse.
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stepper {
    Euler,
    Rk4,
}

impl Stepper {
    pub fn name(&self) -> &'static str {
        match self {
            Stepper::Euler => "euler",
            Stepper::Rk4 => "rk4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euler" => Ok(Stepper::Euler),
            "rk4" | "runge-kutta" => Ok(Stepper::Rk4),
            other => Err(domain(format!("unknown stepper '{other}'"))),
        }
    }
}

/// Evaluates system entries for one backend. Owns the random stream of a
/// sampled run so consecutive assemblies draw fresh shots.
#[derive(Debug, Clone)]
pub struct Estimator {
    mode: Mode,
}

#[derive(Debug, Clone)]
enum Mode {
    Statevector,
    Circuits(Sampling, ChaCha8Rng),
}

impl Estimator {
    pub fn new(backend: Backend) -> Result<Self> {
        match backend {
            Backend::Exact => Ok(Self::exact()),
            Backend::Sampled { shots: 0, .. } => Err(domain("at least one shot is required")),
            Backend::Sampled { shots, seed } => Ok(Self {
                mode: Mode::Circuits(Sampling::Shots(shots), ChaCha8Rng::seed_from_u64(seed)),
            }),
        }
    }

    pub fn exact() -> Self {
        Self { mode: Mode::Statevector }
    }

    /// Runs the measurement circuits but takes expectations from the outcome
    /// probabilities instead of sampling.
    pub fn exact_probabilities() -> Self {
        Self {
            mode: Mode::Circuits(Sampling::ExactProbabilities, ChaCha8Rng::seed_from_u64(0)),
        }
    }

    fn eval(&mut self, ctx: &CircuitContext, entry: EntryDescriptor) -> Result<f64> {
        match &mut self.mode {
            Mode::Statevector => ctx.exact(entry),
            Mode::Circuits(sampling, rng) => ctx.estimate(entry, *sampling, rng),
        }
    }
}

/// The `(N+1)×(N+1)` system `A θ̇ = C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
    pub c: DVector<f64>,
}

pub fn assemble_system(
    ansatz: &AnsatzSpec,
    params: &ParameterSet,
    hamiltonian: &HamiltonianSpec,
    source: &SourceSpec,
    estimator: &mut Estimator,
) -> Result<LinearSystem> {
    let np = ansatz.param_count();
    if params.thetas.len() != np {
        return Err(domain(format!("expected {np} angles, got {}", params.thetas.len())));
    }
    let ctx = CircuitContext::new(ansatz, &params.thetas, hamiltonian, source)?;
    let t0 = params.theta0;
    let has_source = !source.is_none();
    let dim = np + 1;
    let mut a = DMatrix::zeros(dim, dim);
    let mut c = DVector::zeros(dim);

    a[(0, 0)] = 1.0;
    c[0] = t0 * estimator.eval(&ctx, EntryDescriptor::Hamiltonian(Operand::Trial))?;
    if has_source {
        c[0] += estimator.eval(&ctx, EntryDescriptor::Source(Operand::Trial))?;
    }
    for i in 0..np {
        let di = Operand::Derivative(i);
        let v = t0 * estimator.eval(&ctx, EntryDescriptor::Overlap(Operand::Trial, di))?;
        a[(0, i + 1)] = v;
        a[(i + 1, 0)] = v;
        for j in i..np {
            let v = t0 * t0 * estimator.eval(&ctx, EntryDescriptor::Overlap(di, Operand::Derivative(j)))?;
            a[(i + 1, j + 1)] = v;
            a[(j + 1, i + 1)] = v;
        }
        c[i + 1] = t0 * t0 * estimator.eval(&ctx, EntryDescriptor::Hamiltonian(di))?;
        if has_source {
            c[i + 1] += t0 * estimator.eval(&ctx, EntryDescriptor::Source(di))?;
        }
    }
    Ok(LinearSystem { a, c })
}

/// Least-squares solution through an SVD pseudo-inverse; singular values
/// below `cutoff · σ_max` are dropped.
pub fn solve_rates(system: &LinearSystem, cutoff: f64) -> Result<Vec<f64>> {
    if !(cutoff >= 0.0) {
        return Err(domain("the SVD cutoff must be non-negative"));
    }
    if system.a.iter().chain(system.c.iter()).any(|v| !v.is_finite()) {
        return Err(numeric("non-finite entries in the linear system"));
    }
    let svd = system.a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let threshold = cutoff * smax;
    let (u, vt) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(numeric("SVD did not produce singular vectors")),
    };
    let mut y = u.transpose() * &system.c;
    for (k, s) in svd.singular_values.iter().enumerate() {
        y[k] = if *s > threshold && *s > 0.0 { y[k] / s } else { 0.0 };
    }
    let x = vt.transpose() * y;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(numeric("non-finite parameter rates"));
    }
    Ok(x.iter().copied().collect())
}

fn advance(params: &ParameterSet, rates: &[f64], h: f64) -> ParameterSet {
    let v: Vec<f64> = params.to_vec().iter().zip(rates).map(|(p, r)| p + h * r).collect();
    ParameterSet::from_vec(&v)
}

pub fn step_euler<F>(params: &ParameterSet, dt: f64, mut rates: F) -> Result<ParameterSet>
where
    F: FnMut(&ParameterSet) -> Result<Vec<f64>>,
{
    let k1 = rates(params)?;
    Ok(advance(params, &k1, dt))
}

/// Classical RK4; the system is re-assembled at each of the four stages.
pub fn step_rk4<F>(params: &ParameterSet, dt: f64, mut rates: F) -> Result<ParameterSet>
where
    F: FnMut(&ParameterSet) -> Result<Vec<f64>>,
{
    let k1 = rates(params)?;
    let k2 = rates(&advance(params, &k1, dt / 2.0))?;
    let k3 = rates(&advance(params, &k2, dt / 2.0))?;
    let k4 = rates(&advance(params, &k3, dt))?;
    let v: Vec<f64> = params
        .to_vec()
        .iter()
        .enumerate()
        .map(|(i, p)| p + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    Ok(ParameterSet::from_vec(&v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub ansatz: AnsatzSpec,
    pub initial: ParameterSet,
    pub hamiltonian: HamiltonianSpec,
    pub source: SourceSpec,
    pub dt: f64,
    pub t_final: f64,
    pub stepper: Stepper,
    pub backend: Backend,
    pub svd_cutoff: f64,
    pub record_states: bool,
}

impl EvolutionConfig {
    pub fn new(
        ansatz: AnsatzSpec,
        initial: ParameterSet,
        hamiltonian: HamiltonianSpec,
        dt: f64,
        t_final: f64,
    ) -> Self {
        Self {
            ansatz,
            initial,
            hamiltonian,
            source: SourceSpec::none(),
            dt,
            t_final,
            stepper: Stepper::Euler,
            backend: Backend::Exact,
            svd_cutoff: DEFAULT_SVD_CUTOFF,
            record_states: true,
        }
    }

    pub fn steps(&self) -> usize {
        step_count(self.dt, self.t_final)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(domain(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(domain(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if self.initial.thetas.len() != self.ansatz.param_count() {
            return Err(domain(format!(
                "expected {} initial angles, got {}",
                self.ansatz.param_count(),
                self.initial.thetas.len()
            )));
        }
        if !self.initial.is_finite() {
            return Err(domain("initial parameters must be finite"));
        }
        if self.hamiltonian.n_qubits() != self.ansatz.n_qubits {
            return Err(domain("ansatz and Hamiltonian qubit counts differ"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub theta0: Vec<f64>,
    pub thetas: Vec<Vec<f64>>,
    /// Normalised trial states, empty unless recording was requested.
    pub states: Vec<RealState>,
    pub trace_errors: Option<Vec<f64>>,
    pub norm_errors: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_params(&self) -> ParameterSet {
        let last = self.len() - 1;
        ParameterSet::new(self.theta0[last], self.thetas[last].clone())
    }

    /// `θ0 |ψ⟩` at recorded step `k`.
    pub fn solution(&self, k: usize) -> Option<Vec<f64>> {
        self.states
            .get(k)
            .map(|s| s.amplitudes().iter().map(|a| a * self.theta0[k]).collect())
    }

    pub fn mean_trace_error(&self) -> Option<f64> {
        self.trace_errors.as_deref().map(mean)
    }

    pub fn mean_norm_error(&self) -> Option<f64> {
        self.norm_errors.as_deref().map(mean)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Runs the variational evolution. When a reference is given, trace and norm
/// errors are recorded against its profile at every step.
pub fn run_evolution(cfg: &EvolutionConfig, reference: Option<&ReferenceSolution>) -> Result<Trajectory> {
    cfg.validate()?;
    let steps = cfg.steps();
    if let Some(r) = reference {
        if r.profiles.len() < steps + 1 {
            return Err(domain(format!(
                "reference has {} profiles but {} are needed",
                r.profiles.len(),
                steps + 1
            )));
        }
        if r.profiles[0].len() != cfg.hamiltonian.dim() {
            return Err(domain("reference grid size does not match the Hamiltonian"));
        }
    }
    let mut estimator = Estimator::new(cfg.backend)?;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        theta0: Vec::with_capacity(steps + 1),
        thetas: Vec::with_capacity(steps + 1),
        states: Vec::new(),
        trace_errors: reference.map(|_| Vec::with_capacity(steps + 1)),
        norm_errors: reference.map(|_| Vec::with_capacity(steps + 1)),
    };

    let mut params = cfg.initial.clone();
    for k in 0..=steps {
        if !params.is_finite() {
            return Err(Error::Numeric {
                step: Some(k),
                message: "parameters became non-finite".into(),
            });
        }
        let time = cfg.dt * k as f64;
        traj.times.push(time);
        traj.theta0.push(params.theta0);
        traj.thetas.push(params.thetas.clone());
        if cfg.record_states || reference.is_some() {
            let state = cfg.ansatz.build_state(&params.thetas)?;
            if let Some(r) = reference {
                let profile = &r.profiles[k];
                traj.trace_errors.as_mut().unwrap().push(trace_error(state.amplitudes(), profile)?);
                traj.norm_errors.as_mut().unwrap().push(norm_error(params.theta0, profile)?);
            }
            if cfg.record_states {
                traj.states.push(state);
            }
        }
        if k == steps {
            break;
        }
        let rates = |p: &ParameterSet| -> Result<Vec<f64>> {
            let sys = assemble_system(&cfg.ansatz, p, &cfg.hamiltonian, &cfg.source, &mut estimator)?;
            solve_rates(&sys, cfg.svd_cutoff)
        };
        let next = match cfg.stepper {
            Stepper::Euler => step_euler(&params, cfg.dt, rates),
            Stepper::Rk4 => step_rk4(&params, cfg.dt, rates),
        };
        params = next.map_err(|e| match e {
            Error::Numeric { message, .. } => Error::Numeric { step: Some(k), message },
            other => other,
        })?;
    }
    Ok(traj)
}
