use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use transim::circuit::{validate_circuit, Circuit, CircuitGenerator, GateSet, Outcome};
use transim::rewrite::{plan_logical_qubits, renormalize, RewriteConfig};
use transim::sampler::{
    cross_entropy_fidelity, cross_entropy_of_probabilities, curves_csv, cut_peak_distribution,
    distribution_csv, sampling_efficiency, sorted_population, threshold_reject_run, CircuitSource,
    ProbabilitySource, SamplerOptions, StopRule, TableSource, ThresholdConfig,
};
use transim::statevector::{amplitude_direct, amplitude_transversal, MemoryCap, Method};
use transim::verify::{check_bounds, corrupt_first_gate, fuzz_equivalence_with, Family, FuzzConfig};
use transim::{Error, Result};

use crate::config::{Command, RunConfig, Source};

pub enum Status {
    Done,
    /// Verification ran and found this many failures.
    Failed(usize),
}

pub fn run(cfg: &RunConfig) -> Result<Status> {
    match cfg.command {
        Command::Generate => generate(cfg),
        Command::Plan => plan(cfg),
        Command::Amplitude => amplitude(cfg),
        Command::Sample => sample(cfg),
        Command::Curves => curves(cfg),
        Command::Verify => return verify(cfg),
    }?;
    Ok(Status::Done)
}

fn meta(cfg: &RunConfig) -> Value {
    json!({
        "tool": "transim",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
    })
}

fn csv_header(cfg: &RunConfig) -> String {
    format!(
        "# transim {}\n# config {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.to_json()
    )
}

/// JSON object with `meta` first and the body's keys after it.
fn with_meta(cfg: &RunConfig, body: Value) -> String {
    let mut obj = Map::new();
    obj.insert("meta".into(), meta(cfg));
    if let Value::Object(b) = body {
        obj.extend(b);
    }
    serde_json::to_string_pretty(&Value::Object(obj)).expect("json serializes") + "\n"
}

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn memory_cap(cfg: &RunConfig) -> MemoryCap {
    cfg.max_qubits.map(MemoryCap::qubits).unwrap_or_default()
}

fn rewrite_config(cfg: &RunConfig) -> RewriteConfig {
    RewriteConfig {
        max_arity: cfg.max_arity,
        memory_cap: memory_cap(cfg),
        fuse: !cfg.no_fuse,
    }
}

fn load_circuit(cfg: &RunConfig) -> Result<Circuit> {
    if let Some(path) = &cfg.circuit {
        return Circuit::from_json(&fs::read_to_string(path)?);
    }
    CircuitGenerator::new(GateSet::default()).generate(cfg.qubit_layout()?, cfg.require_depth()?, cfg.seed)
}

fn generate(cfg: &RunConfig) -> Result<()> {
    let c = load_circuit(cfg)?;
    if let Some(v) = validate_circuit(&c).first() {
        return Err(Error::InvalidArgument(format!("generated circuit is invalid: {v:?}")));
    }
    let body: Value = serde_json::from_str(&c.to_json())?;
    write_to(cfg.output_path(), &with_meta(cfg, body))
}

fn plan(cfg: &RunConfig) -> Result<()> {
    let (layout, depth) = match &cfg.circuit {
        Some(_) => {
            let c = load_circuit(cfg)?;
            (c.layout, c.depth)
        }
        None => (cfg.qubit_layout()?, cfg.require_depth()?),
    };
    let (k, slices) = plan_logical_qubits(&layout, depth);
    let bytes = 16u128 << k;
    let cap = memory_cap(cfg);
    let text = format!(
        "{}k={k}, slices={slices}\nstate_bytes={bytes}\nfits_cap={} (max_qubits={})\n",
        csv_header(cfg),
        k <= cap.max_qubits,
        cap.max_qubits
    );
    write_to(cfg.output_path(), &text)
}

fn amplitude(cfg: &RunConfig) -> Result<()> {
    let c = load_circuit(cfg)?;
    let outcome: Outcome = match &cfg.outcome {
        Some(s) => s.parse()?,
        None => Outcome::zeros(c.num_qubits()),
    };
    let result = if cfg.oracle {
        amplitude_direct(&c, &outcome, memory_cap(cfg))?
    } else {
        let lc = renormalize(&c, &outcome, &rewrite_config(cfg))?;
        amplitude_transversal(&lc, memory_cap(cfg))?
    };
    let mut body = json!({
        "outcome": outcome.to_string(),
        "value": [result.value.re, result.value.im],
        "probability": result.value.norm_sqr(),
        "method": result.method,
        "stats": result.stats,
    });
    if cfg.timing {
        body["stats"]["wall_time_s"] = json!(result.stats.wall_time_s);
    }
    write_to(cfg.output_path(), &with_meta(cfg, body))
}

fn sample(cfg: &RunConfig) -> Result<()> {
    let cap = memory_cap(cfg);
    let source: Box<dyn ProbabilitySource> = match cfg.source {
        Source::Enumerated => Box::new(TableSource::from_circuit(&load_circuit(cfg)?, cap)?),
        Source::Synthetic => {
            let n = cfg
                .n
                .ok_or_else(|| Error::InvalidArgument("--n is required for synthetic sampling".into()))?;
            Box::new(TableSource::porter_thomas(n, cfg.seed)?)
        }
        Source::Circuit => {
            let src = CircuitSource {
                circuit: load_circuit(cfg)?,
                method: if cfg.oracle { Method::Direct } else { Method::Transversal },
                config: rewrite_config(cfg),
            };
            Box::new(src)
        }
    };
    let n = source.num_qubits();
    let tc = ThresholdConfig::new(cfg.t, n as u32)?;
    let opts = SamplerOptions {
        proposal_seed: cfg.proposal_seed,
        accept_seed: cfg.accept_seed,
        ..SamplerOptions::default()
    };
    let stop = match cfg.proposals {
        Some(p) => StopRule::Proposals(p),
        None => StopRule::Accepted(cfg.samples),
    };
    let run = threshold_reject_run(source.as_ref(), &tc, &opts, stop)?;

    if let Some(path) = &cfg.output {
        let mut text = csv_header(cfg);
        text.push_str("index,bitstring,probability\n");
        for (&i, &p) in run.samples.iter().zip(&run.probabilities) {
            text.push_str(&format!("{i},{},{p}\n", Outcome::from_index(i, n)));
        }
        fs::write(path, text)?;
    }
    let f_ce = if run.samples.is_empty() {
        Value::Null
    } else {
        json!(cross_entropy_of_probabilities(&run.samples, &run.probabilities, n)?)
    };
    let body = json!({
        "n": n,
        "t": cfg.t,
        "proposals": run.proposals,
        "accepted": run.samples.len(),
        "acceptance_ratio": run.acceptance_ratio(),
        "f_ce": f_ce,
        "eta_theory": sampling_efficiency(cfg.t)?,
        "f_ce_theory": cross_entropy_fidelity(cfg.t)?,
    });
    write_to(cfg.metrics.as_deref(), &with_meta(cfg, body))
}

/// `t_min, t_min + step, ...` up to `t_max`, rounded so that grid points such
/// as 2.4 print exactly.
fn threshold_grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    if !(cfg.t_step > 0.0 && cfg.t_min > 0.0 && cfg.t_max >= cfg.t_min) {
        return Err(Error::InvalidArgument(
            "need 0 < t-min <= t-max and a positive t-step".into(),
        ));
    }
    let count = ((cfg.t_max - cfg.t_min) / cfg.t_step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((cfg.t_min + i as f64 * cfg.t_step) * 1e9).round() / 1e9)
        .collect())
}

fn curves(cfg: &RunConfig) -> Result<()> {
    let scan = csv_header(cfg) + &curves_csv(&threshold_grid(cfg)?)?;
    write_to(cfg.output_path(), &scan)?;
    let Some(path) = &cfg.distribution else {
        return Ok(());
    };
    let body = match cfg.n {
        Some(n) => {
            let tc = ThresholdConfig::new(cfg.dist_t, n as u32)?;
            let dim = tc.dim() as f64;
            let mut out = String::from("rank,p_times_2n,ptilde_times_2n\n");
            for i in 0..tc.dim() {
                let p = sorted_population(i, n as u32)? * dim;
                let q = cut_peak_distribution(i, &tc)? * dim;
                out.push_str(&format!("{i},{p},{q}\n"));
            }
            out
        }
        None => distribution_csv(cfg.dist_t, cfg.dist_points)?,
    };
    fs::write(path, csv_header(cfg) + &body)?;
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<Status> {
    let families: Vec<Family> = if cfg.families.is_empty() {
        Family::ALL.to_vec()
    } else {
        cfg.families.iter().map(|&f| f.into()).collect()
    };
    let fc = FuzzConfig {
        rewrite: rewrite_config(cfg),
        ..FuzzConfig::new(cfg.trials, cfg.seed)
            .families(&families)
            .bounds(cfg.fuzz_bounds())
    };
    check_bounds(&fc)?;
    let inject = cfg.inject_fault;
    let report = fuzz_equivalence_with(&fc, |_, lc| {
        if inject {
            corrupt_first_gate(lc)
        }
    })?;
    if let Some(path) = &cfg.report {
        fs::write(path, report.failure_lines())?;
    }
    let failures = report.failure_count();
    let body = json!({
        "trials": report.trials,
        "failures": failures,
        "max_error": report.max_error,
        "tolerance": fc.tolerance,
    });
    write_to(cfg.output_path(), &with_meta(cfg, body))?;
    Ok(if failures == 0 {
        Status::Done
    } else {
        Status::Failed(failures)
    })
}
