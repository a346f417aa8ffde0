//! Browser bindings: run a variational evolution next to its reference, plot
//! DLVO curves, and list impulse encodings.

use serde::Serialize;
use vqspde::dlvo::{dlvo_potential_vector, energy_vector, DlvoParams, GridSpec};
use vqspde::encode::{encode_impulse, orbit_decomposition};
use vqspde::vqs::run_evolution;
use vqspde::{AnsatzSpec, BoundaryCondition, Problem, Stepper};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Serialize)]
pub struct Simulation {
    pub grid: Vec<f64>,
    pub times: Vec<f64>,
    /// Physical-space profiles, one row per frame.
    pub vqs: Vec<Vec<f64>>,
    pub reference: Vec<Vec<f64>>,
    pub trace_error: Vec<f64>,
    pub norm_error: Vec<f64>,
    pub frame_times: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DlvoCurves {
    pub h: Vec<f64>,
    pub energy: Vec<f64>,
    /// Potential scaled by the grid spacing squared.
    pub scaled_potential: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EncodingRow {
    pub target: u64,
    pub bits: String,
    pub orbit_size: usize,
    pub layer: Option<usize>,
    pub wire: Option<usize>,
    pub entangling_layers: Option<usize>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Runs one of `heat`, `smoluchowski` or `einstein-smoluchowski` on four
/// qubits and keeps `frames` evenly spaced profiles.
#[allow(clippy::too_many_arguments)]
pub fn simulate_native(
    experiment: &str,
    layers: usize,
    dt: f64,
    t_final: f64,
    rk4: bool,
    a: f64,
    z: f64,
    kappa: f64,
    frames: usize,
) -> Result<Simulation, String> {
    let n = 4;
    let spec = AnsatzSpec::full_circular(n, layers).map_err(err)?;
    let dlvo = DlvoParams::new(a, z, kappa).map_err(err)?;
    let problem = match experiment {
        "heat" => Problem::heat_benchmark(spec, BoundaryCondition::Periodic),
        "smoluchowski" => Problem::smoluchowski(spec, &dlvo, 1 << (n - 1)),
        "einstein-smoluchowski" => Problem::einstein_smoluchowski(spec, &dlvo),
        other => return Err(format!("unknown experiment '{other}'")),
    }
    .map_err(err)?;
    let reference = problem.reference(dt, t_final).map_err(err)?;
    let mut cfg = problem.evolution_config(dt, t_final);
    if rk4 {
        cfg.stepper = Stepper::Rk4;
    }
    let traj = run_evolution(&cfg, Some(&reference)).map_err(err)?;

    let grid = if experiment == "heat" {
        (0..1 << n).map(|i| i as f64 / (1 << n) as f64).collect()
    } else {
        GridSpec::new(n).map_err(err)?.points().to_vec()
    };
    let steps = traj.len() - 1;
    let frames = frames.clamp(2, steps + 1);
    let picks: Vec<usize> = (0..frames).map(|f| f * steps / (frames - 1)).collect();
    let mut out = Simulation {
        grid,
        times: traj.times.clone(),
        vqs: Vec::new(),
        reference: Vec::new(),
        trace_error: traj.trace_errors.clone().unwrap_or_default(),
        norm_error: traj.norm_errors.clone().unwrap_or_default(),
        frame_times: Vec::new(),
    };
    for k in picks {
        out.vqs.push(problem.physical(traj.states[k].amplitudes(), traj.theta0[k]).map_err(err)?);
        out.reference.push(problem.physical(&reference.profiles[k], 1.0).map_err(err)?);
        out.frame_times.push(traj.times[k]);
    }
    Ok(out)
}

pub fn dlvo_curves_native(a: f64, z: f64, kappa: f64, n: usize) -> Result<DlvoCurves, String> {
    let grid = GridSpec::new(n).map_err(err)?;
    let p = DlvoParams::new(a, z, kappa).map_err(err)?;
    let dx2 = grid.spacing() * grid.spacing();
    Ok(DlvoCurves {
        h: grid.points().to_vec(),
        energy: energy_vector(&grid, &p).map_err(err)?,
        scaled_potential: dlvo_potential_vector(&grid, &p)
            .map_err(err)?
            .into_iter()
            .map(|v| v * dx2)
            .collect(),
    })
}

pub fn encoding_table_native(n: usize, layers: usize) -> Result<Vec<EncodingRow>, String> {
    let spec = AnsatzSpec::full_circular(n, layers).map_err(err)?;
    let orbits = orbit_decomposition(n).map_err(err)?;
    Ok((1..1u64 << n)
        .map(|x| {
            let flip = encode_impulse(&spec, x).ok().and_then(|e| e.flip);
            EncodingRow {
                target: x,
                bits: format!("{x:0n$b}"),
                orbit_size: orbits.orbit_of(x).map(|o| o.members.len()).unwrap_or(0),
                layer: flip.map(|f| f.layer),
                wire: flip.map(|f| f.wire),
                entangling_layers: flip.map(|f| f.entangling_layers),
            }
        })
        .collect())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<JsValue, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
        .and_then(|v| serde_wasm_bindgen::to_value(&v).map_err(|e| JsValue::from_str(&e.to_string())))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    experiment: &str,
    layers: usize,
    dt: f64,
    t_final: f64,
    rk4: bool,
    a: f64,
    z: f64,
    kappa: f64,
    frames: usize,
) -> Result<JsValue, JsValue> {
    to_js(simulate_native(experiment, layers, dt, t_final, rk4, a, z, kappa, frames))
}

#[wasm_bindgen]
pub fn dlvo_curves(a: f64, z: f64, kappa: f64) -> Result<JsValue, JsValue> {
    to_js(dlvo_curves_native(a, z, kappa, 4))
}

#[wasm_bindgen]
pub fn encoding_table(n: usize, layers: usize) -> Result<JsValue, JsValue> {
    to_js(encoding_table_native(n, layers))
}
