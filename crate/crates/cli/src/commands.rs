use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use ssrk_core::accounting::state_space;
use ssrk_core::harness::fuzz::{fuzz_closure as fuzz, Fault};
use ssrk_core::harness::sweep::{run_sweep_to_path, ExperimentSpec};
use ssrk_core::harness::{run as run_engine, GenOptions, GeneratorRegistry, RunOptions};
use ssrk_core::protocol::{count_colliding_pairs, in_initialized_set, in_safe_set};
use ssrk_core::{Configuration, Constants, Error, FinderRegistry, ProtocolParams, RngStream};

use crate::{CheckArgs, FuzzArgs, RunArgs, SweepArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_VIOLATION: u8 = 3;

pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Param(_) => "param",
            Error::Io { .. } => "io",
            _ => "config",
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<ssrk_core::ParamError> for CliError {
    fn from(e: ssrk_core::ParamError) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError {
        kind: "config",
        message: format!("{}: {e}", path.display()),
    }
}

fn load_constants(path: Option<&Path>) -> CliResult<Constants> {
    match path {
        None => Ok(Constants::default()),
        Some(p) => Constants::from_json(&read(p)?).map_err(|e| json_error(p, e)),
    }
}

fn load_snapshot(path: &Path) -> CliResult<Configuration> {
    Configuration::from_json(&read(path)?).map_err(|e| json_error(path, e))
}

/// Keys come out sorted because `serde_json::Map` is a `BTreeMap`.
fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("value serializes")
    );
}

pub fn run(a: RunArgs) -> CliResult<u8> {
    let constants = load_constants(a.constants.as_deref())?;
    let params = ProtocolParams::with_constants(a.n, a.rho, &constants)?;
    let finder = FinderRegistry::default().get(&a.finder)?;
    let mut config = match &a.snapshot_in {
        Some(path) => {
            let c = load_snapshot(path)?;
            c.validate(&params)
                .map_err(|m| Error::InvalidConfiguration(format!("{}: {m}", path.display())))?;
            c
        }
        None => {
            let g = GeneratorRegistry::default().get(&a.init)?;
            let opts = GenOptions {
                distinct_ranks: a.distinct_ranks,
            };
            g.generate(&params, &mut RngStream::derive(a.seed, 0), &opts)
        }
    };
    let opts = RunOptions {
        max_interactions: a.max_interactions,
        stride: a.stride,
        tail: a.tail,
    };
    let report = run_engine(&mut config, &params, a.seed, &opts, finder.as_ref());
    if let Some(path) = &a.snapshot_out {
        write(path, &config.to_json())?;
    }
    let mut v = serde_json::to_value(&report).expect("report serializes");
    v["succeeded"] = json!(report.succeeded());
    print_json(&v);
    Ok(if !report.reached_safe() {
        EXIT_BUDGET
    } else if report.tail_rank_changes > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

pub fn sweep(a: SweepArgs) -> CliResult<u8> {
    if a.jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    let spec_text = read(&a.spec)?;
    let spec = ExperimentSpec::from_json(&spec_text).map_err(|e| match e {
        Error::Json(j) => json_error(&a.spec, j),
        other => other.into(),
    })?;
    let out = a
        .out
        .clone()
        .or_else(|| spec.output.as_ref().map(Into::into))
        .ok_or_else(|| CliError::usage("no output path: pass --out or set `output` in the spec"))?;
    let summary = run_sweep_to_path(&spec, a.jobs, &out)?;
    print_json(&json!({
        "cells": summary.cells,
        "data_rows": summary.data_rows,
        "output": out.display().to_string(),
        "safe_trials": summary.safe_trials,
    }));
    Ok(EXIT_OK)
}

pub fn fuzz_closure(a: FuzzArgs) -> CliResult<u8> {
    if a.configs == 0 {
        return Err(CliError::usage("--configs must be at least 1"));
    }
    let constants = load_constants(a.constants.as_deref())?;
    let params = ProtocolParams::with_constants(a.n, a.rho, &constants)?;
    let fault = if a.inject_fault {
        Fault::CopyInitiatorRank
    } else {
        Fault::None
    };
    let finder = FinderRegistry::default().get("baseline")?;
    let report = fuzz(&params, a.configs, a.seed, finder.as_ref(), fault);
    let mut v = json!({
        "configs_checked": report.configs_checked,
        "pairs_checked": report.pairs_checked,
        "violating_configs": report.violating_configs,
        "violations": report.violations,
    });
    if let Some(first) = &report.first {
        v["counterexample"] = serde_json::to_value(first).expect("counterexample serializes");
    }
    print_json(&v);
    Ok(if report.violations == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

pub fn check_config(a: CheckArgs) -> CliResult<u8> {
    if a.snapshot.is_none() && a.spec.is_none() && a.constants.is_none() {
        return Err(CliError::usage(
            "pass at least one of --snapshot, --spec, --constants",
        ));
    }
    let mut out = serde_json::Map::new();
    let constants = load_constants(a.constants.as_deref())?;
    if a.constants.is_some() {
        out.insert(
            "constants".into(),
            serde_json::to_value(&constants).expect("serializes"),
        );
    }
    let snapshot = a.snapshot.as_deref().map(load_snapshot).transpose()?;
    let n = a.n.or(snapshot.as_ref().map(|c| c.len() as u32));
    if let (Some(n), Some(rho)) = (n, a.rho) {
        let params = ProtocolParams::with_constants(n, rho, &constants)?;
        let space = state_space(&params);
        out.insert(
            "params".into(),
            json!({
                "derived": serde_json::to_value(&params).expect("serializes"),
                "state_bits": space.total_bits(),
                "list_bits": space.bits_of("list"),
            }),
        );
        if let (Some(c), Some(path)) = (&snapshot, &a.snapshot) {
            c.validate(&params)
                .map_err(|m| Error::InvalidConfiguration(format!("{}: {m}", path.display())))?;
            out.insert(
                "snapshot".into(),
                json!({
                    "agents": c.len(),
                    "colliding_pairs": count_colliding_pairs(c),
                    "in_initialized_set": in_initialized_set(c),
                    "in_safe_set": in_safe_set(c, &params),
                }),
            );
        }
    } else if snapshot.is_some() {
        return Err(CliError::usage("checking a snapshot needs --rho"));
    }
    if let Some(path) = &a.spec {
        let spec = ExperimentSpec::from_json(&read(path)?).map_err(|e| match e {
            Error::Json(j) => json_error(path, j),
            other => other.into(),
        })?;
        let cells = spec.n.len() * spec.rho.len() * spec.generators.len();
        out.insert(
            "spec".into(),
            json!({"cells": cells, "trials": spec.trials, "valid": true}),
        );
    }
    print_json(&Value::Object(out));
    Ok(EXIT_OK)
}
