//! Closed-form initial parameters for the full circular ansatz.
//!
//! A circular CNOT layer maps computational basis states to basis states, and
//! on bit strings it acts as a linear map `C_n` over GF(2). Bit `i` of a
//! string is qubit `i` (wire `i+1`), so the string of basis state `|x⟩` is
//! simply the binary expansion of `x`. An impulse `|x⟩` can then be prepared
//! by a single π rotation at the layer whose remaining entangling layers carry
//! a unit-weight string onto `x`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::ansatz::{AnsatzSpec, FinalLayer, ParameterSet};
use crate::error::{domain, Error, Result};

/// Square matrix over GF(2); row `i` is a bit mask of the inputs feeding
/// output bit `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    n: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        (self.rows[i] >> j & 1) as u8
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, row)| acc | (((row & x).count_ones() as u64) & 1) << i)
    }

    pub fn apply_pow(&self, x: u64, k: usize) -> u64 {
        (0..k).fold(x, |y, _| self.apply(y))
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The bit-string map of one circular entangling layer:
/// `(C_n)_{ij} = 0` if `j > i > 0` or `i = j = 0`, else 1.
pub fn entangler_matrix(n: usize) -> Result<Gf2Matrix> {
    if !(2..=63).contains(&n) {
        return Err(domain(format!("entangler matrix needs 2 ≤ n ≤ 63, got {n}")));
    }
    let all = (1u64 << n) - 1;
    let rows = (0..n)
        .map(|i| if i == 0 { all & !1 } else { (1u64 << (i + 1)) - 1 })
        .collect();
    Ok(Gf2Matrix { n, rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Members in iteration order: `members[k+1] = C_n · members[k]`.
    pub members: Vec<u64>,
}

impl Orbit {
    pub fn period(&self) -> usize {
        self.members.len()
    }

    pub fn contains_unit_weight(&self) -> bool {
        self.members.iter().any(|m| m.count_ones() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSet {
    pub n: usize,
    pub orbits: Vec<Orbit>,
}

impl OrbitSet {
    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Orbit::period).collect()
    }

    /// Positive-weight strings sharing an orbit with some unit-weight string.
    pub fn reachable(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .orbits
            .iter()
            .filter(|o| o.contains_unit_weight())
            .flat_map(|o| o.members.iter().copied())
            .filter(|&m| m != 0)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn orbit_of(&self, x: u64) -> Option<&Orbit> {
        self.orbits.iter().find(|o| o.members.contains(&x))
    }
}

/// Cycle decomposition of `{0,1}^n` under repeated application of `C_n`.
pub fn orbit_decomposition(n: usize) -> Result<OrbitSet> {
    if !(2..=20).contains(&n) {
        return Err(domain(format!("orbit decomposition needs 2 ≤ n ≤ 20, got {n}")));
    }
    let c = entangler_matrix(n)?;
    let dim = 1usize << n;
    let mut seen = vec![false; dim];
    let mut orbits = Vec::new();
    for start in 0..dim as u64 {
        if seen[start as usize] {
            continue;
        }
        let mut members = vec![start];
        seen[start as usize] = true;
        let mut y = c.apply(start);
        while y != start {
            // C_n is a product of CNOTs, hence a bijection, so this terminates.
            seen[y as usize] = true;
            members.push(y);
            y = c.apply(y);
        }
        orbits.push(Orbit { members });
    }
    Ok(OrbitSet { n, orbits })
}

/// Initial parameters for the reverse step `H^{⊗n}(X⊗I^{⊗n-1})|0⟩`
/// (`+2^{-n/2}` on the lower half of the grid, `-2^{-n/2}` on the upper half).
///
/// Only the final RY layer is set: `-π/2` on every wire when it is followed by
/// an entangling layer; otherwise `-π/2` on the most significant qubit (last
/// wire) and `+π/2` elsewhere.
pub fn params_reverse_step(spec: &AnsatzSpec) -> ParameterSet {
    let mut params = ParameterSet::zeros(spec);
    let n = spec.n_qubits;
    for wire in 1..=n {
        let angle = match spec.final_layer {
            FinalLayer::Entangled => -FRAC_PI_2,
            FinalLayer::Unentangled if wire == n => -FRAC_PI_2,
            FinalLayer::Unentangled => FRAC_PI_2,
        };
        params.thetas[spec.param_index(spec.n_layers, wire)] = angle;
    }
    params
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDirection {
    /// Uniform on the upper half of the grid.
    Up,
    /// Uniform on the lower half of the grid.
    Down,
}

/// Heaviside step `(X⊗H^{⊗n-1})|0⟩` centred at `|2^{n-1}⟩` on a full circular
/// ansatz: every angle of the final layer is π/2 and wire 2 of the layer
/// before is `(-1)^{n-1}·π/2`, negated for the step-down profile.
pub fn params_heaviside(spec: &AnsatzSpec, direction: StepDirection) -> Result<ParameterSet> {
    if !spec.is_full_circular() {
        return Err(Error::Unsupported(format!(
            "step encoding needs the full circular ansatz, got {}",
            spec.variant_name()
        )));
    }
    if spec.n_layers < 2 || spec.n_qubits < 2 {
        return Err(Error::Unsupported(
            "step encoding needs at least two layers and two qubits".into(),
        ));
    }
    let mut params = ParameterSet::zeros(spec);
    for wire in 1..=spec.n_qubits {
        params.thetas[spec.param_index(spec.n_layers, wire)] = FRAC_PI_2;
    }
    let sign = if spec.n_qubits % 2 == 1 { 1.0 } else { -1.0 };
    let sign = match direction {
        StepDirection::Up => sign,
        StepDirection::Down => -sign,
    };
    params.thetas[spec.param_index(spec.n_layers - 1, 2)] = sign * FRAC_PI_2;
    Ok(params)
}

/// Result of [`encode_impulse`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseEncoding {
    pub params: ParameterSet,
    /// Bit-flip location, 1-based; `None` for `x = 0`.
    pub flip: Option<BitFlip>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitFlip {
    pub layer: usize,
    pub wire: usize,
    /// Entangling layers between the flip and the output.
    pub entangling_layers: usize,
    /// Unit-weight string produced by the flip.
    pub seed: u64,
}

/// Parameters whose circuit outputs exactly `|x⟩`, using one RY(π).
///
/// A flip in layer `L` passes through the entangling layers of blocks
/// `L..=n_l`, so the search looks for the fewest layers `m = n_l - L + 1`
/// with `C_n^m · e_w = x`.
pub fn encode_impulse(spec: &AnsatzSpec, x: u64) -> Result<ImpulseEncoding> {
    if !spec.is_full_circular() {
        return Err(Error::Unsupported(format!(
            "impulse encoding needs the full circular ansatz, got {}",
            spec.variant_name()
        )));
    }
    let n = spec.n_qubits;
    if n < 2 {
        return Err(Error::Unsupported("impulse encoding needs at least two qubits".into()));
    }
    if x >= 1u64 << n {
        return Err(domain(format!("target {x} out of range for {n} qubits")));
    }
    let mut params = ParameterSet::zeros(spec);
    if x == 0 {
        return Ok(ImpulseEncoding { params, flip: None });
    }
    let c = entangler_matrix(n)?;
    let mut frontier: Vec<u64> = (0..n).map(|w| 1u64 << w).collect();
    for m in 1..=spec.n_layers {
        frontier.iter_mut().for_each(|s| *s = c.apply(*s));
        if let Some(w) = frontier.iter().position(|&s| s == x) {
            let layer = spec.n_layers - m + 1;
            let wire = w + 1;
            params.thetas[spec.param_index(layer, wire)] = PI;
            return Ok(ImpulseEncoding {
                params,
                flip: Some(BitFlip {
                    layer,
                    wire,
                    entangling_layers: m,
                    seed: 1u64 << w,
                }),
            });
        }
    }
    Err(Error::Unreachable {
        target: x,
        layers: spec.n_layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{GateOp, RealState};
    use approx::assert_abs_diff_eq;

    /// Gate-by-gate construction of a target state from `|0…0⟩`.
    fn gate_state(n: usize, gates: &[GateOp]) -> RealState {
        let mut s = RealState::basis(n, 0).unwrap();
        s.apply_all(gates).unwrap();
        s
    }

    fn assert_states_eq(a: &RealState, b: &RealState) {
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn c6_matches_printed_matrix() {
        let printed = [
            [0, 1, 1, 1, 1, 1],
            [1, 1, 0, 0, 0, 0],
            [1, 1, 1, 0, 0, 0],
            [1, 1, 1, 1, 0, 0],
            [1, 1, 1, 1, 1, 0],
            [1, 1, 1, 1, 1, 1],
        ];
        let c = entangler_matrix(6).unwrap();
        for (i, row) in printed.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(c.get(i, j), *v as u8, "entry ({i},{j})");
            }
        }
        assert_eq!(c.apply(0), 0);
        assert!(entangler_matrix(1).is_err());
    }

    #[test]
    fn entangler_matches_circuit() {
        for n in 2..=6 {
            let c = entangler_matrix(n).unwrap();
            let layer = AnsatzSpec::full_circular(n, 1).unwrap().entangling_layer();
            for x in 0..1usize << n {
                let mut s = RealState::basis(n, x).unwrap();
                s.apply_all(&layer).unwrap();
                let expected = RealState::basis(n, c.apply(x as u64) as usize).unwrap();
                assert_eq!(s, expected, "n={n}, x={x}");
            }
        }
    }

    #[test]
    fn orbit_tables() {
        let o4 = orbit_decomposition(4).unwrap();
        let mut sizes = o4.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 15]);

        let o5 = orbit_decomposition(5).unwrap();
        let mut sizes = o5.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 7, 21]);
        let big = o5.orbits.iter().find(|o| o.period() == 21).unwrap();
        for w in 0..5 {
            assert!(big.members.contains(&(1 << w)));
        }
        assert_eq!(o5.reachable().len(), 21);

        let o6 = orbit_decomposition(6).unwrap();
        assert_eq!(o6.orbits.len(), 4);
        assert_eq!(o6.reachable().len(), 63);
    }

    #[test]
    fn orbits_partition_and_close() {
        for n in 2..=8 {
            let set = orbit_decomposition(n).unwrap();
            let c = entangler_matrix(n).unwrap();
            let mut all: Vec<u64> = set.orbits.iter().flat_map(|o| o.members.clone()).collect();
            all.sort_unstable();
            assert_eq!(all, (0..1u64 << n).collect::<Vec<_>>());
            assert_eq!(set.orbit_of(0).unwrap().period(), 1);
            for o in &set.orbits {
                assert!(o.period() < 1 << n);
                for &m in &o.members {
                    assert_eq!(c.apply_pow(m, o.period()), m);
                }
            }
        }
    }

    #[test]
    fn reverse_step_matches_gate_construction() {
        for n in 2..=6 {
            let mut gates: Vec<GateOp> = vec![GateOp::PauliX(n - 1)];
            gates.extend((0..n).map(GateOp::Hadamard));
            let target = gate_state(n, &gates);
            for spec in AnsatzSpec::all_variants(n, 3).unwrap() {
                let s = spec.build_state(&params_reverse_step(&spec).thetas).unwrap();
                assert_abs_diff_eq!(s.inner(&target).unwrap(), 1.0, epsilon = 1e-12);
                let amp = 2f64.powf(-(n as f64) / 2.0);
                assert!(s.amplitudes().iter().all(|a| (a.abs() - amp).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn reverse_step_two_qubits() {
        // H⊗H then X on the leading factor (qubit 1) applied to |00⟩.
        let target = gate_state(2, &[GateOp::PauliX(1), GateOp::Hadamard(0), GateOp::Hadamard(1)]);
        for (a, b) in target.amplitudes().iter().zip([0.5, 0.5, -0.5, -0.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn heaviside_matches_gate_construction() {
        for n in 2..=6 {
            let mut gates = vec![GateOp::PauliX(n - 1)];
            gates.extend((0..n - 1).map(GateOp::Hadamard));
            let up = gate_state(n, &gates);
            let spec = AnsatzSpec::full_circular(n, 3).unwrap();
            let s = spec.build_state(&params_heaviside(&spec, StepDirection::Up).unwrap().thetas).unwrap();
            assert_states_eq(&s, &up);

            let down = spec
                .build_state(&params_heaviside(&spec, StepDirection::Down).unwrap().thetas)
                .unwrap();
            let half = 1 << (n - 1);
            let amp = 2f64.powf(-((n - 1) as f64) / 2.0);
            for (i, a) in down.amplitudes().iter().enumerate() {
                assert_abs_diff_eq!(a.abs(), if i < half { amp } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn heaviside_layout() {
        let spec = AnsatzSpec::full_circular(4, 5).unwrap();
        let p = params_heaviside(&spec, StepDirection::Up).unwrap();
        for wire in 1..=4 {
            assert_eq!(p.thetas[spec.param_index(5, wire)], FRAC_PI_2);
        }
        assert_eq!(p.thetas[spec.param_index(4, 2)], -FRAC_PI_2);
        assert_eq!(p.thetas.iter().filter(|t| **t != 0.0).count(), 5);

        let s = spec.build_state(&p.thetas).unwrap();
        let expect = 1.0 / 8f64.sqrt();
        for (i, a) in s.amplitudes().iter().enumerate() {
            assert_abs_diff_eq!(*a, if i < 8 { 0.0 } else { expect }, epsilon = 1e-12);
        }
    }

    #[test]
    fn heaviside_rejects_other_variants() {
        let spec = AnsatzSpec::from_variant_name("circular-unentangled", 4, 4).unwrap();
        assert!(matches!(params_heaviside(&spec, StepDirection::Up), Err(Error::Unsupported(_))));
        let short = AnsatzSpec::full_circular(4, 1).unwrap();
        assert!(matches!(params_heaviside(&short, StepDirection::Up), Err(Error::Unsupported(_))));
    }

    #[test]
    fn impulse_ten_on_four_qubits() {
        let spec = AnsatzSpec::full_circular(4, 4).unwrap();
        let enc = encode_impulse(&spec, 10).unwrap();
        let flip = enc.flip.unwrap();
        assert_eq!(flip.layer, 3);
        assert_eq!(flip.wire, 3);
        assert_eq!(flip.seed, 0b0100);
        assert_eq!(flip.entangling_layers, 2);
        let s = spec.build_state(&enc.params.thetas).unwrap();
        assert_eq!(s.amplitudes()[10], 1.0);
    }

    #[test]
    fn impulse_zero_and_errors() {
        let spec = AnsatzSpec::full_circular(4, 4).unwrap();
        let enc = encode_impulse(&spec, 0).unwrap();
        assert!(enc.params.thetas.iter().all(|t| *t == 0.0));
        assert!(enc.flip.is_none());
        assert!(encode_impulse(&spec, 16).is_err());
        let linear = AnsatzSpec::from_variant_name("linear", 4, 4).unwrap();
        assert!(matches!(encode_impulse(&linear, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn impulse_unreachable_on_five_qubits() {
        let set = orbit_decomposition(5).unwrap();
        let reachable = set.reachable();
        let spec = AnsatzSpec::full_circular(5, 21).unwrap();
        for x in 1..32u64 {
            let res = encode_impulse(&spec, x);
            if reachable.contains(&x) {
                assert!(res.is_ok(), "x={x}");
            } else {
                assert!(matches!(res, Err(Error::Unreachable { .. })), "x={x}");
            }
        }
    }

    #[test]
    fn impulse_builds_exact_basis_states() {
        for n in 2..=6 {
            let orbits = orbit_decomposition(n).unwrap();
            let max_period = orbits.sizes().into_iter().max().unwrap();
            let spec = AnsatzSpec::full_circular(n, max_period).unwrap();
            let mut count = 0;
            for x in 1..1u64 << n {
                let Ok(enc) = encode_impulse(&spec, x) else { continue };
                count += 1;
                assert_eq!(enc.params.thetas.iter().filter(|t| **t != 0.0).count(), 1);
                let s = spec.build_state(&enc.params.thetas).unwrap();
                for (i, a) in s.amplitudes().iter().enumerate() {
                    assert_abs_diff_eq!(*a, if i as u64 == x { 1.0 } else { 0.0 }, epsilon = 1e-12);
                }
            }
            assert_eq!(count, orbits.reachable().len(), "n={n}");
        }
    }

    #[test]
    fn layer_budget_reachability() {
        let count = |n: usize, layers: usize| {
            let spec = AnsatzSpec::full_circular(n, layers).unwrap();
            (1..1u64 << n).filter(|&x| encode_impulse(&spec, x).is_ok()).count()
        };
        assert_eq!(count(4, 4), 15);
        assert_eq!(count(5, 5), 21);
        assert_eq!(count(6, 6), 36);
        assert_eq!(count(6, 12), 63);
    }
}
