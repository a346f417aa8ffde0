//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use vqspde::ansatz::AnsatzSpec;
use vqspde::dlvo::DlvoParams;
use vqspde::hamiltonian::BoundaryCondition;
use vqspde::reference::step_count;
use vqspde::vqs::{Backend, Stepper, DEFAULT_SVD_CUTOFF};
use vqspde::sampling::DEFAULT_SHOTS;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    HeatBenchmark,
    Smoluchowski,
    EinsteinSmoluchowski,
    Orbits,
    EncodeTable,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::HeatBenchmark => "heat-benchmark",
            Experiment::Smoluchowski => "smoluchowski",
            Experiment::EinsteinSmoluchowski => "einstein-smoluchowski",
            Experiment::Orbits => "orbits",
            Experiment::EncodeTable => "encode-table",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Experiment::HeatBenchmark,
            Experiment::Smoluchowski,
            Experiment::EinsteinSmoluchowski,
            Experiment::Orbits,
            Experiment::EncodeTable,
        ]
        .into_iter()
        .find(|e| e.name() == s)
    }

    pub fn is_evolution(&self) -> bool {
        matches!(
            self,
            Experiment::HeatBenchmark | Experiment::Smoluchowski | Experiment::EinsteinSmoluchowski
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const KEYS: &[&str] = &[
    "experiment",
    "n_qubits",
    "n_layers",
    "ansatz",
    "bc",
    "dt",
    "t_final",
    "stepper",
    "backend",
    "shots",
    "seed",
    "svd_cutoff",
    "dlvo.A",
    "dlvo.Z",
    "dlvo.kappa",
    "impulse",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_qubits: usize,
    pub n_layers: usize,
    pub ansatz: AnsatzSpec,
    pub bc: BoundaryCondition,
    pub dt: f64,
    pub t_final: f64,
    pub stepper: Stepper,
    pub backend: Backend,
    pub svd_cutoff: f64,
    pub dlvo: DlvoParams,
    /// Basis state of the initial impulse (Smoluchowski only).
    pub impulse: u64,
    pub output_dir: PathBuf,
}

fn config_err(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: Some(key.to_string()),
        message: message.into(),
    }
}

/// Raw key/value pairs, later entries overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Config {
                key: None,
                message: format!("line {}: expected key = value, got '{line}'", lineno + 1),
            })?;
            let key = key.trim();
            if raw.values.contains_key(key) {
                return Err(config_err(key, format!("line {}: duplicate key", lineno + 1)));
            }
            raw.set(key, value.trim())?;
        }
        Ok(raw)
    }

    /// Reads a key=value file, or the `config` object of a run manifest.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            key: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config {
                key: None,
                message: format!("{}: {e}", path.display()),
            })?;
            let obj = manifest
                .get("config")
                .and_then(|c| c.as_object())
                .ok_or_else(|| CliError::Config {
                    key: None,
                    message: format!("{}: no config object in manifest", path.display()),
                })?;
            let mut raw = RawConfig::default();
            for (k, v) in obj {
                let v = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                raw.set(k, &v)?;
            }
            return Ok(raw);
        }
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(config_err(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| CliError::Config {
            key: None,
            message: format!("override '{assignment}' is not key=value"),
        })?;
        self.set(k.trim(), v.trim())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| config_err(key, format!("cannot parse '{v}'"))),
        }
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let experiment = match raw.get("experiment") {
            None => return Err(config_err("experiment", "missing")),
            Some(v) => Experiment::parse(v).ok_or_else(|| config_err("experiment", format!("unknown experiment '{v}'")))?,
        };
        let n_qubits: usize = raw.parsed("n_qubits", 4)?;
        let n_layers: usize = raw.parsed("n_layers", 4)?;
        let (max_qubits, what) = if experiment.is_evolution() {
            (vqspde::hamiltonian::DENSE_QUBIT_LIMIT, "evolution experiments")
        } else {
            (20, "orbit tables")
        };
        if n_qubits < 2 || n_qubits > max_qubits {
            return Err(config_err("n_qubits", format!("must be in 2..={max_qubits} for {what}")));
        }
        if n_layers == 0 {
            return Err(config_err("n_layers", "must be positive"));
        }
        let variant = raw.get("ansatz").unwrap_or("full-circular");
        let ansatz = AnsatzSpec::from_variant_name(variant, n_qubits, n_layers)
            .map_err(|e| config_err("ansatz", e.to_string()))?;

        let wall = matches!(experiment, Experiment::Smoluchowski | Experiment::EinsteinSmoluchowski);
        let default_bc = if wall { "dirichlet-neumann" } else { "periodic" };
        let bc = BoundaryCondition::parse(raw.get("bc").unwrap_or(default_bc)).map_err(|e| config_err("bc", e.to_string()))?;
        if wall && bc != BoundaryCondition::DirichletNeumann {
            return Err(config_err("bc", format!("{experiment} needs dirichlet-neumann, got {}", bc.name())));
        }
        if wall && !ansatz.is_full_circular() {
            return Err(config_err("ansatz", format!("{experiment} initial states need full-circular")));
        }

        let dt: f64 = raw.parsed("dt", 1e-4)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(config_err("dt", "must be positive"));
        }
        let t_final: f64 = raw.parsed("t_final", 1e-2)?;
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(config_err("t_final", "must be positive"));
        }
        let stepper = Stepper::parse(raw.get("stepper").unwrap_or("euler")).map_err(|e| config_err("stepper", e.to_string()))?;
        let shots: u64 = raw.parsed("shots", DEFAULT_SHOTS)?;
        let seed: u64 = raw.parsed("seed", 0)?;
        let backend = match raw.get("backend").unwrap_or("exact") {
            "exact" => Backend::Exact,
            "sampled" => {
                if shots == 0 {
                    return Err(config_err("shots", "must be at least 1"));
                }
                Backend::Sampled { shots, seed }
            }
            other => return Err(config_err("backend", format!("unknown backend '{other}'"))),
        };
        let svd_cutoff: f64 = raw.parsed("svd_cutoff", DEFAULT_SVD_CUTOFF)?;
        if !(svd_cutoff >= 0.0 && svd_cutoff.is_finite()) {
            return Err(config_err("svd_cutoff", "must be non-negative"));
        }

        let dlvo_keys = ["dlvo.A", "dlvo.Z", "dlvo.kappa"];
        let dlvo = if dlvo_keys.iter().any(|k| raw.get(k).is_some()) {
            if !wall {
                let key = dlvo_keys.iter().find(|k| raw.get(k).is_some()).unwrap();
                return Err(config_err(key, format!("{experiment} has no interaction potential")));
            }
            let a: f64 = raw.parsed("dlvo.A", 0.0)?;
            let z: f64 = raw.parsed("dlvo.Z", 0.0)?;
            let kappa: f64 = raw.parsed("dlvo.kappa", 10.0)?;
            if !(kappa > 0.0) {
                return Err(config_err("dlvo.kappa", "must be positive"));
            }
            let p = DlvoParams::new(a, z, kappa)
                .map_err(|e| config_err(if a < 0.0 || !a.is_finite() { "dlvo.A" } else { "dlvo.Z" }, e.to_string()))?;
            if p.is_none() {
                DlvoParams::none()
            } else {
                p
            }
        } else {
            DlvoParams::none()
        };

        let impulse: u64 = raw.parsed("impulse", 1u64 << (n_qubits - 1))?;
        if impulse >= 1u64 << n_qubits {
            return Err(config_err("impulse", format!("must be below 2^{n_qubits}")));
        }
        if experiment == Experiment::Smoluchowski {
            vqspde::encode::encode_impulse(&ansatz, impulse).map_err(|e| config_err("impulse", e.to_string()))?;
        }
        if experiment == Experiment::EinsteinSmoluchowski && n_layers < 2 {
            return Err(config_err("n_layers", "the step initial state needs at least two layers"));
        }
        if experiment.is_evolution() && step_count(dt, t_final) == 0 {
            return Err(config_err("t_final", "shorter than one step"));
        }

        let output_dir = PathBuf::from(raw.get("output_dir").unwrap_or("results"));
        Ok(Self {
            experiment,
            n_qubits,
            n_layers,
            ansatz,
            bc,
            dt,
            t_final,
            stepper,
            backend,
            svd_cutoff,
            dlvo,
            impulse,
            output_dir,
        })
    }

    /// Canonical key/value echo; parsing it back gives the same config.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("experiment", self.experiment.name().to_string()),
            ("n_qubits", self.n_qubits.to_string()),
            ("n_layers", self.n_layers.to_string()),
        ];
        if self.experiment.is_evolution() {
            out.push(("ansatz", self.ansatz.variant_name().to_string()));
            out.push(("bc", self.bc.name().to_string()));
            out.push(("dt", format!("{:e}", self.dt)));
            out.push(("t_final", format!("{:e}", self.t_final)));
            out.push(("stepper", self.stepper.name().to_string()));
            match self.backend {
                Backend::Exact => out.push(("backend", "exact".into())),
                Backend::Sampled { shots, seed } => {
                    out.push(("backend", "sampled".into()));
                    out.push(("shots", shots.to_string()));
                    out.push(("seed", seed.to_string()));
                }
            }
            out.push(("svd_cutoff", format!("{:e}", self.svd_cutoff)));
            if !self.dlvo.is_none() {
                out.push(("dlvo.A", format!("{:e}", self.dlvo.hamaker)));
                out.push(("dlvo.Z", format!("{:e}", self.dlvo.double_layer)));
                out.push(("dlvo.kappa", format!("{:e}", self.dlvo.kappa)));
            }
            if self.experiment == Experiment::Smoluchowski {
                out.push(("impulse", self.impulse.to_string()));
            }
        } else {
            out.push(("ansatz", self.ansatz.variant_name().to_string()));
        }
        out.push(("output_dir", self.output_dir.display().to_string()));
        out
    }
}
