use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};
use vqspde::ansatz::AnsatzSpec;
use vqspde::encode::{encode_impulse, orbit_decomposition};
use vqspde::reference::{circuit_counts, trace_error};
use vqspde::vqs::run_evolution;
use vqspde::{Error, Problem, Stepper};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;

/// Full double precision, 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    /// One-line description for the terminal.
    pub headline: String,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    let (files, mut manifest, headline) = match cfg.experiment {
        Experiment::Orbits => orbits(cfg)?,
        Experiment::EncodeTable => encode_table(cfg)?,
        _ => evolution(cfg)?,
    };
    let config: Map<String, Value> = cfg
        .echo()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v)))
        .collect();
    manifest.insert("config".into(), Value::Object(config));
    manifest.insert("wall_time_seconds".into(), json!(start.elapsed().as_secs_f64()));
    manifest.insert("files".into(), json!(files));
    let text = serde_json::to_string_pretty(&Value::Object(manifest)).expect("manifest serialises");
    fs::write(cfg.output_dir.join("meta.json"), text + "\n")?;
    let mut files = files;
    files.push("meta.json".into());
    Ok(RunSummary {
        output_dir: cfg.output_dir.clone(),
        files,
        headline,
    })
}

fn build_problem(cfg: &ExperimentConfig) -> Result<Problem, CliError> {
    let problem = match cfg.experiment {
        Experiment::HeatBenchmark => Problem::heat_benchmark(cfg.ansatz, cfg.bc),
        Experiment::Smoluchowski => Problem::smoluchowski(cfg.ansatz, &cfg.dlvo, cfg.impulse),
        Experiment::EinsteinSmoluchowski => Problem::einstein_smoluchowski(cfg.ansatz, &cfg.dlvo),
        _ => unreachable!("not an evolution experiment"),
    };
    problem.map_err(|e| match e {
        Error::Numeric { .. } | Error::Singular(_) => e.into(),
        other => CliError::Config {
            key: None,
            message: other.to_string(),
        },
    })
}

fn write(dir: &Path, name: &str, body: String) -> Result<String, CliError> {
    fs::write(dir.join(name), body)?;
    Ok(name.to_string())
}

type Outputs = (Vec<String>, Map<String, Value>, String);

fn evolution(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let problem = build_problem(cfg)?;
    let reference = problem.reference(cfg.dt, cfg.t_final)?;
    let mut ev = problem.evolution_config(cfg.dt, cfg.t_final);
    ev.stepper = cfg.stepper;
    ev.backend = cfg.backend;
    ev.svd_cutoff = cfg.svd_cutoff;
    let traj = run_evolution(&ev, Some(&reference))?;
    let trace = traj.trace_errors.as_ref().expect("reference given");
    let norm = traj.norm_errors.as_ref().expect("reference given");

    let mut out = String::from("step,time,theta0,trace_error,norm_error\n");
    for k in 0..traj.len() {
        writeln!(
            out,
            "{k},{},{},{},{}",
            fmt17(traj.times[k]),
            fmt17(traj.theta0[k]),
            fmt17(trace[k]),
            fmt17(norm[k])
        )
        .unwrap();
    }
    let mut files = vec![write(&cfg.output_dir, "trajectory.csv", out)?];

    let dim = problem.hamiltonian.dim();
    let mut out = String::from("time");
    for i in 0..dim {
        write!(out, ",u{i}").unwrap();
    }
    out.push('\n');
    for k in 0..traj.len() {
        let p = problem.physical(traj.states[k].amplitudes(), traj.theta0[k])?;
        out.push_str(&fmt17(traj.times[k]));
        for v in p {
            out.push(',');
            out.push_str(&fmt17(v));
        }
        out.push('\n');
    }
    files.push(write(&cfg.output_dir, "profiles.csv", out)?);

    let last = traj.final_params();
    let mut out = String::from("index,value\n");
    for (i, v) in last.to_vec().iter().enumerate() {
        writeln!(out, "{i},{}", fmt17(*v)).unwrap();
    }
    files.push(write(&cfg.output_dir, "params.csv", out)?);

    let np = cfg.ansatz.param_count();
    let nh = problem.hamiltonian.term_count();
    let ns = problem.source.term_count();
    let per_assembly = circuit_counts(np, nh, 0).vqs + (ns * (np + 1)) as f64;
    let stages = match cfg.stepper {
        Stepper::Euler => 1,
        Stepper::Rk4 => 4,
    };
    let steps = traj.len() - 1;
    let mean_trace = traj.mean_trace_error().unwrap();
    let mean_norm = traj.mean_norm_error().unwrap();
    let mut summary = json!({
        "steps": steps,
        "mean_trace_error": mean_trace,
        "mean_norm_error": mean_norm,
        "max_trace_error": trace.iter().cloned().fold(0.0, f64::max),
        "max_norm_error": norm.iter().cloned().fold(0.0, f64::max),
        "final_trace_error": trace[steps],
        "final_norm_error": norm[steps],
    });
    if !problem.source.is_none() {
        let steady = problem.steady_state()?;
        let e = trace_error(traj.states[steps].amplitudes(), &steady)?;
        summary["steady_state_trace_error"] = json!(e);
    }
    let mut manifest = Map::new();
    manifest.insert(
        "circuits".into(),
        json!({
            "parameters": np,
            "hamiltonian_terms": nh,
            "source_terms": ns,
            "per_assembly": per_assembly,
            "assemblies_per_step": stages,
            "total": per_assembly * (stages * steps) as f64,
        }),
    );
    manifest.insert("summary".into(), summary);
    let headline = format!(
        "{}: {steps} steps, mean trace error {mean_trace:.4e}, mean norm error {mean_norm:.4e}",
        cfg.experiment
    );
    Ok((files, manifest, headline))
}

/// Text table of the orbit decomposition for `n` qubits.
pub fn orbit_report(n: usize) -> Result<String, CliError> {
    let set = orbit_decomposition(n).map_err(|e| CliError::Config {
        key: Some("n".into()),
        message: e.to_string(),
    })?;
    let mut out = String::new();
    writeln!(out, "orbit  size  unit-weight  members").unwrap();
    for (k, orbit) in set.orbits.iter().enumerate() {
        let members: Vec<String> = orbit.members.iter().map(|m| format!("{m:0n$b}")).collect();
        writeln!(
            out,
            "{k:>5}  {:>4}  {:>11}  {}",
            orbit.members.len(),
            if orbit.contains_unit_weight() { "yes" } else { "no" },
            members.join(" ")
        )
        .unwrap();
    }
    let reach = set.reachable().len();
    writeln!(out, "reachable: {reach} of {} nonzero states", (1u64 << n) - 1).unwrap();
    Ok(out)
}

fn orbits(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let n = cfg.n_qubits;
    let set = orbit_decomposition(n)?;
    let mut out = String::from("orbit,size,unit_weight,members\n");
    for (k, orbit) in set.orbits.iter().enumerate() {
        let members: Vec<String> = orbit.members.iter().map(|m| m.to_string()).collect();
        writeln!(out, "{k},{},{},{}", orbit.members.len(), orbit.contains_unit_weight(), members.join(" ")).unwrap();
    }
    let files = vec![write(&cfg.output_dir, "orbits.csv", out)?];
    let reach = set.reachable().len();
    let mut manifest = Map::new();
    manifest.insert(
        "summary".into(),
        json!({ "orbit_sizes": set.sizes(), "reachable": reach }),
    );
    let headline = format!("orbits n={n}: sizes {:?}, {reach} reachable", set.sizes());
    Ok((files, manifest, headline))
}

/// Encoding of one target on a full circular ansatz, as text.
pub fn encode_report(n: usize, layers: usize, target: u64) -> Result<String, CliError> {
    let spec = AnsatzSpec::full_circular(n, layers).map_err(|e| CliError::Config {
        key: Some("n".into()),
        message: e.to_string(),
    })?;
    let enc = encode_impulse(&spec, target).map_err(|e| CliError::Config {
        key: Some("target".into()),
        message: e.to_string(),
    })?;
    let mut out = String::new();
    match enc.flip {
        None => writeln!(out, "target {target} is the all-zero state: every angle is 0").unwrap(),
        Some(f) => writeln!(
            out,
            "target {target} ({target:0n$b}): RY(pi) at layer {} wire {} (index {}), seed {:0n$b}, {} entangling layers",
            f.layer,
            f.wire,
            spec.param_index(f.layer, f.wire),
            f.seed,
            f.entangling_layers
        )
        .unwrap(),
    }
    let angles: Vec<String> = enc.params.thetas.iter().map(|t| fmt17(*t)).collect();
    writeln!(out, "angles: {}", angles.join(",")).unwrap();
    Ok(out)
}

fn encode_table(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let n = cfg.n_qubits;
    let spec = AnsatzSpec::full_circular(n, cfg.n_layers)?;
    let mut out = String::from("target,bits,layer,wire,param_index,entangling_layers,seed\n");
    let mut reachable = 0usize;
    for x in 1..(1u64 << n) {
        match encode_impulse(&spec, x) {
            Ok(enc) => {
                let f = enc.flip.expect("nonzero target has a flip");
                reachable += 1;
                writeln!(
                    out,
                    "{x},{x:0n$b},{},{},{},{},{:0n$b}",
                    f.layer,
                    f.wire,
                    spec.param_index(f.layer, f.wire),
                    f.entangling_layers,
                    f.seed
                )
                .unwrap();
            }
            Err(Error::Unreachable { .. }) => writeln!(out, "{x},{x:0n$b},,,,,").unwrap(),
            Err(e) => return Err(e.into()),
        }
    }
    let files = vec![write(&cfg.output_dir, "encode.csv", out)?];
    let mut manifest = Map::new();
    manifest.insert("summary".into(), json!({ "encodable": reachable, "targets": (1u64 << n) - 1 }));
    let headline = format!(
        "encode-table n={n} n_l={}: {reachable} of {} targets encodable",
        cfg.n_layers,
        (1u64 << n) - 1
    );
    Ok((files, manifest, headline))
}
