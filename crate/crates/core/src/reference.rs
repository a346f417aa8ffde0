//! Classical finite-difference oracle and the fidelity metrics used to grade
//! variational runs against it.

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, numeric, Error, Result};

/// Internal RK4 substeps per recorded step.
pub const SUBSTEPS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub times: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

impl ReferenceSolution {
    pub fn final_profile(&self) -> &[f64] {
        self.profiles.last().expect("a reference solution has at least one profile")
    }
}

/// Number of steps of size `dt` needed to reach `t_final`.
pub fn step_count(dt: f64, t_final: f64) -> usize {
    ((t_final / dt) - 1e-9).ceil().max(0.0) as usize
}

/// Integrates `u' = M u + f` with classical RK4 at `dt / SUBSTEPS`, recording
/// at every multiple of `dt`.
pub fn reference_evolve(
    m: &DMatrix<f64>,
    f: &[f64],
    u0: &[f64],
    dt: f64,
    t_final: f64,
) -> Result<ReferenceSolution> {
    reference_evolve_with(m, f, u0, dt, t_final, SUBSTEPS)
}

pub fn reference_evolve_with(
    m: &DMatrix<f64>,
    f: &[f64],
    u0: &[f64],
    dt: f64,
    t_final: f64,
    substeps: usize,
) -> Result<ReferenceSolution> {
    let dim = u0.len();
    if m.nrows() != dim || m.ncols() != dim || f.len() != dim {
        return Err(domain(format!(
            "reference dimensions disagree: M is {}×{}, f has {}, u0 has {}",
            m.nrows(),
            m.ncols(),
            f.len(),
            dim
        )));
    }
    if !(dt > 0.0) || !(t_final >= 0.0) || substeps == 0 {
        return Err(domain("need dt > 0, t_final ≥ 0 and at least one substep"));
    }
    let f = DVector::from_column_slice(f);
    let rhs = |u: &DVector<f64>| m * u + &f;
    let h = dt / substeps as f64;
    let steps = step_count(dt, t_final);

    let mut u = DVector::from_column_slice(u0);
    let mut out = ReferenceSolution {
        times: Vec::with_capacity(steps + 1),
        profiles: Vec::with_capacity(steps + 1),
        norms: Vec::with_capacity(steps + 1),
    };
    let mut record = |t: f64, u: &DVector<f64>| {
        out.times.push(t);
        out.profiles.push(u.as_slice().to_vec());
        out.norms.push(u.norm());
    };
    record(0.0, &u);
    for step in 1..=steps {
        for _ in 0..substeps {
            let k1 = rhs(&u);
            let k2 = rhs(&(&u + &k1 * (h / 2.0)));
            let k3 = rhs(&(&u + &k2 * (h / 2.0)));
            let k4 = rhs(&(&u + &k3 * h));
            u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                step: Some(step),
                message: "reference solution diverged".into(),
            });
        }
        record(step as f64 * dt, &u);
    }
    Ok(out)
}

/// Solves `M u = -f`.
pub fn reference_steady_state(m: &DMatrix<f64>, f: &[f64]) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() || m.nrows() != f.len() {
        return Err(domain("steady state needs a square matrix matching f"));
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= 1e-12 * smax {
        return Err(Error::Singular(
            "operator is singular; no unique steady state".into(),
        ));
    }
    let rhs = -DVector::from_column_slice(f);
    let u = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("LU factorisation failed".into()))?;
    if u.iter().any(|v| !v.is_finite()) {
        return Err(numeric("steady state is not finite"));
    }
    Ok(u.as_slice().to_vec())
}

/// `√(1 - ⟨û_c|ψ̂⟩²)`, with both inputs normalised here and the result clamped
/// to `[0, 1]`.
pub fn trace_error(quantum: &[f64], classical: &[f64]) -> Result<f64> {
    if quantum.len() != classical.len() {
        return Err(domain("trace error inputs differ in length"));
    }
    let nc = l2(classical);
    let nq = l2(quantum);
    if nc == 0.0 || nq == 0.0 {
        return Err(domain("trace error of a zero vector is undefined"));
    }
    let overlap: f64 = quantum.iter().zip(classical).map(|(a, b)| a * b).sum::<f64>() / (nc * nq);
    Ok((1.0 - overlap * overlap).clamp(0.0, 1.0).sqrt())
}

/// `|1 - θ0/‖u_c‖|`.
pub fn norm_error(theta0: f64, classical: &[f64]) -> Result<f64> {
    let nc = l2(classical);
    if nc == 0.0 {
        return Err(domain("norm error against a zero vector is undefined"));
    }
    Ok((1.0 - theta0 / nc).abs())
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Estimated circuit evaluations per time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitCounts {
    /// `(n_p + 1)(n_p/2 + n_h)`
    pub vqs: f64,
    /// `n_it (n_p + n_h)`
    pub vqe: f64,
}

pub fn circuit_counts(n_params: usize, n_terms: usize, n_iterations: usize) -> CircuitCounts {
    let np = n_params as f64;
    let nh = n_terms as f64;
    CircuitCounts {
        vqs: (np + 1.0) * (np / 2.0 + nh),
        vqe: n_iterations as f64 * (np + nh),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{BoundaryCondition, HamiltonianSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn mixed_laplacian(n: usize) -> DMatrix<f64> {
        HamiltonianSpec::laplacian(BoundaryCondition::DirichletNeumann, 1.0, 1.0 / (1 << n) as f64, n)
            .unwrap()
            .dense_matrix()
            .unwrap()
    }

    #[test]
    fn zero_operator_keeps_profile() {
        let u0 = [0.1, -0.4, 2.0, 0.0];
        let sol = reference_evolve(&DMatrix::zeros(4, 4), &[0.0; 4], &u0, 0.1, 1.0).unwrap();
        assert_eq!(sol.times.len(), 11);
        assert!(sol.profiles.iter().all(|p| p == &u0));
    }

    #[test]
    fn scalar_exponential() {
        let lambda = -3.7;
        let m = DMatrix::from_element(1, 1, lambda);
        let sol = reference_evolve(&m, &[0.0], &[2.0], 0.01, 0.5).unwrap();
        for (t, p) in sol.times.iter().zip(&sol.profiles) {
            assert_relative_eq!(p[0], 2.0 * (lambda * t).exp(), max_relative = 1e-8);
        }
    }

    #[test]
    fn periodic_mass_conserved() {
        let n = 4;
        let m = HamiltonianSpec::laplacian(BoundaryCondition::Periodic, 1.0, 1.0 / 16.0, n)
            .unwrap()
            .dense_matrix()
            .unwrap();
        let u0: Vec<f64> = (0..16).map(|i| if i < 8 { 0.25 } else { -0.1 }).collect();
        let mass0: f64 = u0.iter().sum();
        let sol = reference_evolve(&m, &[0.0; 16], &u0, 1e-4, 1e-2).unwrap();
        for p in &sol.profiles {
            assert_abs_diff_eq!(p.iter().sum::<f64>(), mass0, epsilon = 1e-10);
        }
    }

    #[test]
    fn substep_halving_converged() {
        let m = mixed_laplacian(4);
        let mut u0 = vec![0.0; 16];
        u0[8] = 1.0;
        let coarse = reference_evolve_with(&m, &[0.0; 16], &u0, 1e-4, 1e-2, SUBSTEPS).unwrap();
        let fine = reference_evolve_with(&m, &[0.0; 16], &u0, 1e-4, 1e-2, 2 * SUBSTEPS).unwrap();
        for (a, b) in coarse.profiles.iter().zip(&fine.profiles) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn steady_state_examples() {
        let m = mixed_laplacian(4);
        assert_eq!(reference_steady_state(&m, &[0.0; 16]).unwrap(), vec![0.0; 16]);

        let mut f = vec![0.0; 16];
        f[15] = 1.0;
        let u = reference_steady_state(&m, &f).unwrap();
        assert!(u[0] > 0.0);
        assert!(u.windows(2).all(|w| w[1] > w[0]));
        // Flux 1 through a 256-per-cell coupling gives a ramp of slope 1/256.
        for (i, v) in u.iter().enumerate() {
            assert_abs_diff_eq!(*v, (i + 1) as f64 / 256.0, epsilon = 1e-12);
        }
        let residual = &m * DVector::from_column_slice(&u) + DVector::from_column_slice(&f);
        assert!(residual.norm() < 1e-10);

        let periodic = HamiltonianSpec::laplacian(BoundaryCondition::Periodic, 1.0, 0.25, 2)
            .unwrap()
            .dense_matrix()
            .unwrap();
        assert!(matches!(reference_steady_state(&periodic, &[0.0; 4]), Err(Error::Singular(_))));
    }

    #[test]
    fn evolution_approaches_steady_state() {
        let m = mixed_laplacian(4);
        let mut f = vec![0.0; 16];
        f[15] = 1.0;
        let u0: Vec<f64> = (0..16).map(|i| if i >= 8 { 8f64.sqrt().recip() } else { 0.0 }).collect();
        let sol = reference_evolve(&m, &f, &u0, 1e-3, 8.0).unwrap();
        let ss = reference_steady_state(&m, &f).unwrap();
        for (a, b) in sol.final_profile().iter().zip(&ss) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn trace_error_examples() {
        assert_abs_diff_eq!(trace_error(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 0.0, epsilon = 1e-7);
        assert_eq!(trace_error(&[1.0, 0.0], &[0.0, 3.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(trace_error(&[0.8, 0.6], &[1.0, 0.0]).unwrap(), 0.6, epsilon = 1e-12);
        assert!(trace_error(&[1.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn norm_error_examples() {
        let u = [3.0, 4.0];
        assert_eq!(norm_error(5.0, &u).unwrap(), 0.0);
        assert_eq!(norm_error(0.0, &u).unwrap(), 1.0);
        assert_abs_diff_eq!(norm_error(5.25, &u).unwrap(), 0.05, epsilon = 1e-12);
        assert!(norm_error(1.0, &[0.0]).is_err());
    }

    #[test]
    fn circuit_count_examples() {
        let c = circuit_counts(16, 6, 8);
        assert_eq!(c.vqs, 238.0);
        assert_eq!(c.vqe, 176.0);
        // n_p ≈ 2 n_it ≫ n_h puts the two within a few percent of each other.
        let c = circuit_counts(400, 1, 200);
        assert!((c.vqs / c.vqe - 1.0).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn trace_error_scale_invariant(
            a in prop::collection::vec(-1.0f64..1.0, 8),
            b in prop::collection::vec(-1.0f64..1.0, 8),
            s in 1e-3f64..1e3, t in 1e-3f64..1e3,
        ) {
            prop_assume!(l2(&a) > 1e-3 && l2(&b) > 1e-3);
            let base = trace_error(&a, &b).unwrap();
            // The square root amplifies rounding when the vectors are nearly parallel.
            prop_assume!(base > 1e-3);
            let sa: Vec<f64> = a.iter().map(|x| x * s).collect();
            let tb: Vec<f64> = b.iter().map(|x| x * t).collect();
            let scaled = trace_error(&sa, &tb).unwrap();
            prop_assert!((base - scaled).abs() < 1e-12);
        }
    }
}
