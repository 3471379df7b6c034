//! Run configuration, failure classes and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const THREADS_ENV: &str = "HYPFILL_THREADS";

/// Settings shared by all commands. Every field is optional in the config
/// file; the resolved values are written back into the manifest.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub res: Option<usize>,
    pub grid: Option<(usize, usize)>,
    pub radius: Option<f64>,
    pub bins: Option<usize>,
    pub theta_samples: Option<usize>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(p) = path else { return Ok(Self::default()) };
        let src = fs::read_to_string(p).map_err(|e| Failure::validation(format!("cannot read config {}: {e}", p.display())))?;
        let mut cfg: Self = serde_json::from_str(&src).map_err(|e| Failure::validation(format!("bad config {}: {e}", p.display())))?;
        cfg.inputs.clear();
        Ok(cfg)
    }

    /// Size the global worker pool from the environment or the config.
    pub fn init_threads(&mut self) -> Result<(), Failure> {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Failure::validation(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
            self.threads = Some(n);
        }
        let n = self.threads.unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::validation(e.to_string()))?;
        self.threads = Some(rayon::current_num_threads());
        Ok(())
    }

    pub fn out_dir(&self) -> Result<PathBuf, Failure> {
        let d = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&d).map_err(|e| Failure::validation(format!("output directory {}: {e}", d.display())))?;
        Ok(d)
    }

    pub fn positive(name: &str, v: f64) -> Result<f64, Failure> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Failure::validation(format!("{name} must be positive, got {v}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    pub fn validation(m: impl Into<String>) -> Self {
        Failure::Validation(m.into())
    }

    pub fn numerical(m: impl Into<String>) -> Self {
        Failure::Numerical(m.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Validation(_) => "validation_error",
            Failure::Numerical(_) => "numerical_failure",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.message(), "exit_code": self.code() }).to_string()
    }
}

/// What a command produced. A report may carry a failure when partial
/// output was still written.
#[derive(Debug)]
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub summary: Value,
    pub failure: Option<Failure>,
}

pub fn write_file(dir: &Path, name: &str, body: &str, outputs: &mut Vec<PathBuf>) -> Result<(), Failure> {
    let p = dir.join(name);
    fs::write(&p, body).map_err(|e| Failure::validation(format!("cannot write {}: {e}", p.display())))?;
    outputs.push(p);
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    cli_version: &'static str,
    core_version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    status: &'static str,
    exit_code: u8,
    message: Option<&'a str>,
    outputs: Vec<String>,
    summary: &'a Value,
}

pub fn write_manifest(command: &str, cfg: &RunConfig, result: &Result<Report, Failure>) -> Result<(), Failure> {
    let failure = match result {
        Ok(r) => r.failure.as_ref(),
        Err(f) => Some(f),
    };
    let null = Value::Null;
    let m = Manifest {
        tool: "hypfill",
        cli_version: env!("CARGO_PKG_VERSION"),
        core_version: hypfill::VERSION,
        command,
        config: cfg,
        status: failure.map_or("ok", Failure::kind),
        exit_code: failure.map_or(0, Failure::code),
        message: failure.map(Failure::message),
        outputs: result
            .as_ref()
            .map(|r| r.outputs.iter().map(|p| p.display().to_string()).collect())
            .unwrap_or_default(),
        summary: result.as_ref().map_or(&null, |r| &r.summary),
    };
    let dir = cfg.out_dir()?;
    let body = serde_json::to_string_pretty(&m).map_err(|e| Failure::numerical(e.to_string()))?;
    fs::write(dir.join("manifest.json"), body + "\n").map_err(|e| Failure::validation(format!("cannot write manifest: {e}")))
}
