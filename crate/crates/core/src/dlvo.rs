//! Sphere-wall DLVO interaction: a screened electric double-layer repulsion
//! plus a van der Waals attraction, in units of `k_B T` and particle radius.
//!
//! The drift term of the Smoluchowski equation is removed with the
//! substitution `p = ρ·e^{-U/2}`, which leaves the potential
//! `φ = U''/2 - (U'/2)²` on the diagonal of the operator.

use crate::error::{domain, Result};

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Dimensionless DLVO coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlvoParams {
    /// van der Waals coefficient `A = A_H / 6 k_B T`.
    pub hamaker: f64,
    /// Electric double-layer coefficient `Z`.
    pub double_layer: f64,
    /// Inverse Debye length scaled by the particle radius.
    pub kappa: f64,
}

impl DlvoParams {
    pub fn new(hamaker: f64, double_layer: f64, kappa: f64) -> Result<Self> {
        let p = Self { hamaker, double_layer, kappa };
        p.validate()?;
        Ok(p)
    }

    /// No interaction.
    pub fn none() -> Self {
        Self { hamaker: 0.0, double_layer: 0.0, kappa: 1.0 }
    }

    pub fn is_none(&self) -> bool {
        self.hamaker == 0.0 && self.double_layer == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hamaker.is_finite() && self.double_layer.is_finite() && self.kappa.is_finite()) {
            return Err(domain("DLVO parameters must be finite"));
        }
        if self.hamaker < 0.0 || self.double_layer < 0.0 {
            return Err(domain("A and Z must be non-negative"));
        }
        if self.double_layer > 0.0 && self.kappa <= 0.0 {
            return Err(domain("kappa must be positive when Z > 0"));
        }
        Ok(())
    }
}

/// Separation grid `H_i = (i+1)·ΔH`, `ΔH = 2^{-n}`, covering `(0, 1]`. The
/// absorbing wall sits at the ghost point `H = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    n_qubits: usize,
    points: Vec<f64>,
}

impl GridSpec {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::statevec::MAX_QUBITS {
            return Err(domain(format!("invalid qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        let step = 1.0 / dim as f64;
        Ok(Self {
            n_qubits,
            points: (0..dim).map(|i| (i + 1) as f64 * step).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Interaction energy and its first two derivatives at one separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlvoEnergy {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
}

pub fn dlvo_energy(h: f64, p: &DlvoParams) -> Result<DlvoEnergy> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(domain(format!("separation must be positive, got {h}")));
    }
    let (a, z, k) = (p.hamaker, p.double_layer, p.kappa);
    let edl = if z == 0.0 { 0.0 } else { z * (-k * h).exp() };
    Ok(DlvoEnergy {
        u: edl - a / h,
        du: -k * edl + a / (h * h),
        d2u: k * k * edl - 2.0 * a / (h * h * h),
    })
}

/// `U(H_i)` over the grid.
pub fn energy_vector(grid: &GridSpec, p: &DlvoParams) -> Result<Vec<f64>> {
    grid.points.iter().map(|&h| dlvo_energy(h, p).map(|e| e.u)).collect()
}

/// `φ_i = U''(H_i)/2 - (U'(H_i)/2)²`.
pub fn dlvo_potential_vector(grid: &GridSpec, p: &DlvoParams) -> Result<Vec<f64>> {
    grid.points
        .iter()
        .map(|&h| {
            let e = dlvo_energy(h, p)?;
            Ok(0.5 * e.d2u - 0.25 * e.du * e.du)
        })
        .collect()
}

/// Physical inputs for [`dlvo_coefficients`], all SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalInputs {
    /// Relative permittivity of the medium.
    pub eps_r: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Particle radius, m.
    pub radius: f64,
    /// Zeta potential of the particle, V.
    pub zeta_particle: f64,
    /// Zeta potential of the wall, V.
    pub zeta_wall: f64,
    /// Ion valence.
    pub valence: f64,
    /// Ionic strength as a number density, m⁻³.
    pub ionic_strength: f64,
    /// Hamaker constant, J.
    pub hamaker_constant: f64,
}

/// Dimensionless `(A, Z, κ)` from physical inputs.
pub fn dlvo_coefficients(inp: &PhysicalInputs) -> Result<DlvoParams> {
    let finite = [
        inp.eps_r,
        inp.temperature,
        inp.radius,
        inp.zeta_particle,
        inp.zeta_wall,
        inp.valence,
        inp.ionic_strength,
        inp.hamaker_constant,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !finite {
        return Err(domain("physical inputs must be finite"));
    }
    if inp.temperature <= 0.0 || inp.radius <= 0.0 || inp.eps_r <= 0.0 {
        return Err(domain("temperature, radius and permittivity must be positive"));
    }
    if inp.ionic_strength < 0.0 || inp.hamaker_constant < 0.0 {
        return Err(domain("ionic strength and Hamaker constant must be non-negative"));
    }
    if inp.valence == 0.0 {
        return Err(domain("ion valence must be nonzero"));
    }
    let kt = BOLTZMANN * inp.temperature;
    let ze = inp.valence * ELEMENTARY_CHARGE;
    let eps = inp.eps_r * VACUUM_PERMITTIVITY;
    let z = 64.0 * std::f64::consts::PI * eps * inp.radius * kt / (ze * ze)
        * (ze * inp.zeta_particle / kt).tanh()
        * (ze * inp.zeta_wall / kt).tanh();
    let kappa = inp.radius * (2.0 * ze * ze * inp.ionic_strength / (eps * kt)).sqrt();
    let hamaker = inp.hamaker_constant / (6.0 * kt);
    Ok(DlvoParams { hamaker, double_layer: z, kappa })
}

/// Physical solution `p_i = θ0·ψ_i·e^{-U_i/2}` from the substituted variable.
pub fn recover_physical(psi: &[f64], theta0: f64, energy: &[f64]) -> Result<Vec<f64>> {
    if psi.len() != energy.len() {
        return Err(domain(format!(
            "state has {} entries but energy has {}",
            psi.len(),
            energy.len()
        )));
    }
    Ok(psi
        .iter()
        .zip(energy)
        .map(|(r, u)| theta0 * r * (-0.5 * u).exp())
        .collect())
}
