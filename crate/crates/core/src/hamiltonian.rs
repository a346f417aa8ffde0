//! Discretised evolution operators as sums of shift-conjugated local terms.
//!
//! On a `2^n` point grid the operator is
//!
//! ```text
//! H = diag(w)·H1 + k·{ H2 + S†[ -H3 + H4 - H5 + H6 ]S }
//! ```
//!
//! with `k = a/Δx²`, `H1 = H3 = I`, `H2 = H4 = I⊗…⊗I⊗X` (X on qubit 0),
//! `H5 = P⊗X`, `H6 = P⊗I`, `P = |0…0⟩⟨0…0|` on qubits `1..n`, and `S` the cyclic
//! shift `|i⟩ → |i+1 mod 2^n⟩`. `H2` couples the even bonds `(2m, 2m+1)`,
//! `S†H4S` the odd bonds including the wrap-around `(2^n-1, 0)`, `S†H5S`
//! removes the wrap-around bond and `S†H6S` adds `k` on both end diagonals.
//!
//! | boundary            | terms         | weights `w`                 |
//! |---------------------|---------------|-----------------------------|
//! | periodic            | H1..H4        | `φ - k`                     |
//! | Dirichlet           | H1..H5        | `φ - k`                     |
//! | Neumann             | H1..H6        | `φ - k`                     |
//! | Dirichlet-Neumann   | H1..H5        | `φ - k(1 - e_last)`         |

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::statevec::RealState;

/// Largest register for which [`HamiltonianSpec::dense_matrix`] will allocate.
pub const DENSE_QUBIT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Periodic,
    Dirichlet,
    Neumann,
    /// Absorbing at grid index 0, zero-gradient at the last grid index.
    DirichletNeumann,
}

impl BoundaryCondition {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Periodic => "periodic",
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
            Self::DirichletNeumann => "dirichlet-neumann",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Self::Periodic),
            "dirichlet" => Ok(Self::Dirichlet),
            "neumann" => Ok(Self::Neumann),
            "dirichlet-neumann" | "mixed" => Ok(Self::DirichletNeumann),
            other => Err(domain(format!("unknown boundary condition '{other}'"))),
        }
    }

    pub fn terms(&self) -> &'static [HamiltonianTerm] {
        use HamiltonianTerm::*;
        match self {
            Self::Periodic => &[H1, H2, H3, H4],
            Self::Dirichlet | Self::DirichletNeumann => &[H1, H2, H3, H4, H5],
            Self::Neumann => &[H1, H2, H3, H4, H5, H6],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianTerm {
    /// Weighted identity carrying the diagonal.
    H1,
    /// `X` on qubit 0.
    H2,
    /// `S† I S`, subtracted.
    H3,
    /// `S† X_0 S`.
    H4,
    /// `S† (P⊗X) S`, subtracted.
    H5,
    /// `S† (P⊗I) S`.
    H6,
}

/// A coefficient that is either uniform or sampled per grid point.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    Grid(Vec<f64>),
}

impl Coefficient {
    fn value(&self, i: usize) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Grid(v) => v[i],
        }
    }

    fn check_len(&self, len: usize, name: &str) -> Result<()> {
        match self {
            Self::Grid(v) if v.len() != len => Err(domain(format!(
                "coefficient {name} has {} entries, expected {len}",
                v.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// Coefficients of `∂_t u = a ∂²u + b ∂u + c u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeCoefficients {
    pub a: f64,
    pub b: Coefficient,
    pub c: Coefficient,
    pub dx: f64,
}

/// Potential vector left after eliminating the first-derivative term:
/// `φ = c - b²/(4a) - (a/2)·∂x(b/(2a))`. The last term is evaluated by
/// central differences (one-sided at the ends) and dropped when `b` is
/// constant.
pub fn potential_vector(coeffs: &PdeCoefficients, n_points: usize) -> Result<Vec<f64>> {
    let a = coeffs.a;
    if a == 0.0 || !a.is_finite() {
        return Err(domain("diffusion coefficient must be finite and nonzero"));
    }
    if coeffs.dx <= 0.0 || !coeffs.dx.is_finite() {
        return Err(domain("grid interval must be positive"));
    }
    coeffs.b.check_len(n_points, "b")?;
    coeffs.c.check_len(n_points, "c")?;

    let mut phi: Vec<f64> = (0..n_points)
        .map(|i| {
            let b = coeffs.b.value(i);
            coeffs.c.value(i) - b * b / (4.0 * a)
        })
        .collect();

    if let Coefficient::Grid(b) = &coeffs.b {
        if n_points >= 2 {
            let g: Vec<f64> = b.iter().map(|bi| bi / (2.0 * a)).collect();
            let dx = coeffs.dx;
            for i in 0..n_points {
                let dg = if i == 0 {
                    (g[1] - g[0]) / dx
                } else if i == n_points - 1 {
                    (g[i] - g[i - 1]) / dx
                } else {
                    (g[i + 1] - g[i - 1]) / (2.0 * dx)
                };
                phi[i] -= 0.5 * a * dg;
            }
        }
    }
    Ok(phi)
}

/// Boundary-tagged decomposition of a discretised operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    bc: BoundaryCondition,
    /// Weights of `H1`, i.e. the bracketed diagonal including the `-k` shift.
    diag: Vec<f64>,
    /// Coupling strength `a/Δx²`.
    kinetic: f64,
}

impl HamiltonianSpec {
    /// Builds the term decomposition for `bc` from a potential vector.
    pub fn new(bc: BoundaryCondition, phi: &[f64], a: f64, dx: f64, n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::statevec::MAX_QUBITS {
            return Err(domain(format!("invalid qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if phi.len() != dim {
            return Err(domain(format!(
                "potential vector has {} entries, expected {dim}",
                phi.len()
            )));
        }
        if !(dx > 0.0) || !dx.is_finite() || !a.is_finite() {
            return Err(domain("need finite a and positive dx"));
        }
        if phi.iter().any(|p| !p.is_finite()) {
            return Err(domain("potential vector must be finite"));
        }
        let kinetic = a / (dx * dx);
        let mut diag: Vec<f64> = phi.iter().map(|p| p - kinetic).collect();
        if bc == BoundaryCondition::DirichletNeumann {
            diag[dim - 1] += kinetic;
        }
        Ok(Self {
            n_qubits,
            bc,
            diag,
            kinetic,
        })
    }

    /// Pure diffusion `a ∂²` with no potential.
    pub fn laplacian(bc: BoundaryCondition, a: f64, dx: f64, n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::statevec::MAX_QUBITS {
            return Err(domain(format!("invalid qubit count {n_qubits}")));
        }
        Self::new(bc, &vec![0.0; 1usize << n_qubits], a, dx, n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn kinetic(&self) -> f64 {
        self.kinetic
    }

    pub fn terms(&self) -> &'static [HamiltonianTerm] {
        self.bc.terms()
    }

    pub fn term_count(&self) -> usize {
        self.terms().len()
    }

    fn has(&self, term: HamiltonianTerm) -> bool {
        self.terms().contains(&term)
    }

    /// `H·v`, evaluated term by term without forming a matrix.
    pub fn apply_slice(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(domain(format!(
                "state dimension {} does not match operator dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let k = self.kinetic;
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(w, x)| w * x).collect();

        // H2
        for (i, o) in out.iter_mut().enumerate() {
            *o += k * v[i ^ 1];
        }

        // S†[…]S
        let shifted = shift(v, false);
        let mut inner = vec![0.0; v.len()];
        for (i, x) in inner.iter_mut().enumerate() {
            let lo_block = self.projector(i);
            let mut val = -shifted[i] + shifted[i ^ 1];
            if lo_block && self.has(HamiltonianTerm::H5) {
                val -= shifted[i ^ 1];
            }
            if lo_block && self.has(HamiltonianTerm::H6) {
                val += shifted[i];
            }
            *x = val;
        }
        for (o, s) in out.iter_mut().zip(shift(&inner, true)) {
            *o += k * s;
        }
        Ok(out)
    }

    pub fn apply(&self, state: &RealState) -> Result<Vec<f64>> {
        self.apply_slice(state.amplitudes())
    }

    /// Whether basis index `i` lies in the support of `P` (qubits `1..n` all zero).
    fn projector(&self, i: usize) -> bool {
        i >> 1 == 0
    }

    /// Column `j` is `H·e_j`.
    pub fn dense_matrix(&self) -> Result<DMatrix<f64>> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::Resource(format!(
                "dense matrix for {} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit guard",
                self.n_qubits
            )));
        }
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for j in 0..dim {
            e[j] = 1.0;
            let col = self.apply_slice(&e)?;
            m.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        Ok(m)
    }

    /// Splits `H` into observables that are diagonal after a basis change,
    /// which is how the sampled backend measures `⟨φ|H|ψ⟩`.
    pub fn measurement_groups(&self) -> Vec<DiagonalObservable> {
        let dim = self.dim();
        let k = self.kinetic;
        let mut diagonal = self.diag.clone();
        for (i, w) in diagonal.iter_mut().enumerate() {
            // S† D S is diagonal with entries D[(i+1) mod N].
            *w -= k;
            if self.has(HamiltonianTerm::H6) && self.projector((i + 1) % dim) {
                *w += k;
            }
        }
        let parity0 = |i: usize| if i & 1 == 0 { 1.0 } else { -1.0 };
        let neighbour = (0..dim).map(|i| k * parity0(i)).collect();
        let shifted = (0..dim)
            .map(|i| {
                let cut = self.has(HamiltonianTerm::H5) && self.projector(i);
                if cut {
                    0.0
                } else {
                    k * parity0(i)
                }
            })
            .collect();
        vec![
            DiagonalObservable {
                basis: BasisChange::default(),
                weights: diagonal,
            },
            DiagonalObservable {
                basis: BasisChange { shift: false, hadamards: 1 },
                weights: neighbour,
            },
            DiagonalObservable {
                basis: BasisChange { shift: true, hadamards: 1 },
                weights: shifted,
            },
        ]
    }
}

/// Applies the cyclic shift `S` (amplitude at `i` moves to `i+1 mod 2^n`) or
/// its adjoint.
pub fn apply_shift(state: &RealState, adjoint: bool) -> RealState {
    RealState::from_amplitudes(shift(state.amplitudes(), adjoint))
        .expect("shift preserves a valid state")
}

fn shift(v: &[f64], adjoint: bool) -> Vec<f64> {
    let mut out = v.to_vec();
    if adjoint {
        out.rotate_left(1);
    } else {
        out.rotate_right(1);
    }
    out
}

/// A basis change `U` made of an optional cyclic shift followed by Hadamards
/// on the qubits set in `hadamards`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BasisChange {
    pub shift: bool,
    pub hadamards: u64,
}

impl BasisChange {
    pub fn apply(&self, state: &mut RealState) {
        if self.shift {
            *state = apply_shift(state, false);
        }
        for q in 0..state.n_qubits() {
            if self.hadamards >> q & 1 == 1 {
                state.apply_unchecked(&crate::statevec::GateOp::Hadamard(q));
            }
        }
    }
}

/// The observable `U† diag(weights) U`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalObservable {
    pub basis: BasisChange,
    pub weights: Vec<f64>,
}

impl DiagonalObservable {
    /// `⟨left|U† D U|right⟩` computed directly.
    pub fn expectation(&self, left: &RealState, right: &RealState) -> f64 {
        let mut l = left.clone();
        let mut r = right.clone();
        self.basis.apply(&mut l);
        self.basis.apply(&mut r);
        l.amplitudes()
            .iter()
            .zip(r.amplitudes())
            .zip(&self.weights)
            .map(|((a, b), w)| a * w * b)
            .sum()
    }
}

/// A real Pauli string over `{I, X, Z}`: bit `q` of `x_mask`/`z_mask` selects
/// `X`/`Z` on qubit `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliString {
    pub x_mask: u64,
    pub z_mask: u64,
}

impl PauliString {
    pub fn new(x_mask: u64, z_mask: u64) -> Result<Self> {
        if x_mask & z_mask != 0 {
            return Err(Error::Unsupported(
                "Y factors make the source operator complex".into(),
            ));
        }
        Ok(Self { x_mask, z_mask })
    }

    /// The string as a diagonal observable: Hadamards on the X qubits, then a
    /// parity over all non-identity qubits.
    pub fn observable(&self, n_qubits: usize) -> DiagonalObservable {
        let support = self.x_mask | self.z_mask;
        let weights = (0..1usize << n_qubits)
            .map(|i| {
                if (i as u64 & support).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        DiagonalObservable {
            basis: BasisChange { shift: false, hadamards: self.x_mask },
            weights,
        }
    }
}

/// Non-homogeneous operator `F` written as a signed sum of Pauli strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SourceSpec {
    pub terms: Vec<(f64, PauliString)>,
}

impl SourceSpec {
    pub fn none() -> Self {
        Self::default()
    }

    /// `F = X^{⊗n}`, a unit source at the last grid point.
    pub fn all_ones_pauli_x(n_qubits: usize) -> Self {
        let mask = if n_qubits >= 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        Self {
            terms: vec![(1.0, PauliString { x_mask: mask, z_mask: 0 })],
        }
    }

    pub fn is_none(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `|f⟩ = F|0⟩`.
    pub fn state(&self, n_qubits: usize) -> Result<Vec<f64>> {
        let dim = 1usize << n_qubits;
        let mut f = vec![0.0; dim];
        for (c, p) in &self.terms {
            let idx = p.x_mask as usize;
            if idx >= dim || (p.z_mask as usize) >= dim {
                return Err(domain("source Pauli string acts outside the register"));
            }
            f[idx] += c;
        }
        Ok(f)
    }
}

/// `|f⟩ = F|0⟩` for a source descriptor.
pub fn source_state(source: &SourceSpec, n_qubits: usize) -> Result<Vec<f64>> {
    source.state(n_qubits)
}
