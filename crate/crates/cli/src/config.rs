use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use transim::circuit::QubitLayout;
use transim::verify::{Family, FuzzBounds};
use transim::{Error, Result, DEFAULT_MAX_ARITY};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Generate,
    Plan,
    Amplitude,
    Sample,
    Curves,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Chain,
    Grid,
    Bristlecone,
}

impl From<LayoutKind> for Family {
    fn from(k: LayoutKind) -> Self {
        match k {
            LayoutKind::Chain => Family::Chain,
            LayoutKind::Grid => Family::Grid,
            LayoutKind::Bristlecone => Family::Bristlecone,
        }
    }
}

/// Where `sample` gets outcome probabilities from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Full state vector of the generated circuit.
    Enumerated,
    /// Porter-Thomas table of `--n` qubits drawn from `--seed`.
    Synthetic,
    /// One transversal amplitude per proposal.
    Circuit,
}

/// Every flag of every command. A `--config` JSON object overrides flags key
/// by key.
#[derive(Clone, Debug, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "transim", version, about = "Transversal simulation of random quantum circuits")]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    #[arg(long, value_enum)]
    pub layout: Option<LayoutKind>,
    /// Rows (grid, bristlecone).
    #[arg(long)]
    pub m: Option<usize>,
    /// Qubits (chain) or columns.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Circuit JSON to read instead of generating one.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Output bitstring, qubit 0 first; all zeros by default.
    #[arg(long)]
    pub outcome: Option<String>,

    /// Direct state-vector path instead of the transversal one.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub no_fuse: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ARITY)]
    pub max_arity: usize,
    /// State-vector cap in qubits; derived from available memory when unset.
    #[arg(long)]
    pub max_qubits: Option<usize>,

    #[arg(long, default_value_t = 2.4)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "enumerated")]
    pub source: Source,
    /// Accepted samples to collect.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Run exactly this many proposals instead of stopping at `--samples`.
    #[arg(long)]
    pub proposals: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub proposal_seed: u64,
    #[arg(long, default_value_t = 2)]
    pub accept_seed: u64,

    #[arg(long, default_value_t = 0.1)]
    pub t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub t_step: f64,
    /// Threshold of the distribution curve.
    #[arg(long, default_value_t = 2.4)]
    pub dist_t: f64,
    /// Points of the continuum distribution curve.
    #[arg(long, default_value_t = 200)]
    pub dist_points: usize,

    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub families: Vec<LayoutKind>,
    #[arg(long, default_value_t = FuzzBounds::default().chain_max_n)]
    pub chain_max_n: usize,
    #[arg(long, default_value_t = FuzzBounds::default().chain_max_depth)]
    pub chain_max_depth: usize,
    #[arg(long, default_value_t = FuzzBounds::default().grid_max_side)]
    pub grid_max_side: usize,
    #[arg(long, default_value_t = FuzzBounds::default().grid_max_depth)]
    pub grid_max_depth: usize,
    #[arg(long, default_value_t = FuzzBounds::default().bristlecone_max_side)]
    pub bristlecone_max_side: usize,
    #[arg(long, default_value_t = FuzzBounds::default().bristlecone_max_depth)]
    pub bristlecone_max_depth: usize,
    /// Corrupt every logical circuit before evaluation.
    #[arg(long)]
    pub inject_fault: bool,

    /// Main output file; stdout when unset.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Metrics JSON of `sample`; stdout when unset.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Distribution CSV of `curves`.
    #[arg(long)]
    pub distribution: Option<PathBuf>,
    /// Failed cases of `verify`, one JSON object per line.
    #[arg(long)]
    pub report: Option<PathBuf>,

    #[arg(long)]
    pub threads: Option<usize>,
    /// Include wall time in amplitude records.
    #[arg(long)]
    pub timing: bool,

    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl RunConfig {
    /// Flags with the keys of the `--config` file laid over them.
    pub fn resolve(self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)?;
        let overrides: Value = serde_json::from_str(&text)?;
        let mut cfg = self.overlay(overrides)?;
        cfg.config = Some(path);
        Ok(cfg)
    }

    pub fn overlay(&self, overrides: Value) -> Result<Self> {
        let Value::Object(over) = overrides else {
            return Err(Error::InvalidArgument("config file must hold a JSON object".into()));
        };
        let Value::Object(mut base) = serde_json::to_value(self)? else {
            unreachable!("config serializes to an object");
        };
        base.extend(over);
        let mut cfg: RunConfig = serde_json::from_value(Value::Object(base))?;
        cfg.config = self.config.clone();
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn qubit_layout(&self) -> Result<QubitLayout> {
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for this layout")))
        };
        match self.layout {
            None => Err(Error::InvalidArgument("--layout or --circuit is required".into())),
            Some(LayoutKind::Chain) => QubitLayout::chain(need(self.n, "n")?),
            Some(LayoutKind::Grid) => QubitLayout::grid(need(self.m, "m")?, need(self.n, "n")?),
            Some(LayoutKind::Bristlecone) => {
                QubitLayout::bristlecone(need(self.m, "m")?, need(self.n, "n")?)
            }
        }
    }

    pub fn require_depth(&self) -> Result<usize> {
        self.depth
            .ok_or_else(|| Error::InvalidArgument("--depth is required".into()))
    }

    pub fn fuzz_bounds(&self) -> FuzzBounds {
        FuzzBounds {
            chain_max_n: self.chain_max_n,
            chain_max_depth: self.chain_max_depth,
            grid_max_side: self.grid_max_side,
            grid_max_depth: self.grid_max_depth,
            bristlecone_max_side: self.bristlecone_max_side,
            bristlecone_max_depth: self.bristlecone_max_depth,
        }
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.output.as_deref()
    }
}
