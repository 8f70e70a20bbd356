//! Parameter sweeps: every `(n, rho, generator)` cell runs `trials`
//! independent runs and yields one CSV row per trial plus one aggregate row.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::generators::{GenOptions, GeneratorRegistry};
use crate::harness::run::{run, RunOptions, RunReport, DEFAULT_TAIL};
use crate::params::{Constants, ProtocolParams};
use crate::rng::{mix64, RngStream};
use crate::target::FinderRegistry;

pub const CSV_HEADER: [&str; 14] = [
    "n",
    "rho",
    "generator",
    "trial",
    "seed",
    "first_safe_entry",
    "parallel_time_to_safe",
    "last_rank_change",
    "det_events",
    "leader_changes",
    "interactions_executed",
    "median_parallel_time",
    "p90_parallel_time",
    "safe_trials",
];

fn default_tail() -> u64 {
    DEFAULT_TAIL
}

fn default_finder() -> String {
    "baseline".to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n: Vec<u32>,
    pub rho: Vec<u32>,
    pub generators: Vec<String>,
    pub trials: u64,
    pub max_interactions: u64,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stride: Option<u64>,
    #[serde(default = "default_tail")]
    pub tail: u64,
    #[serde(default = "default_finder")]
    pub finder: String,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks list sizes, names, and that every `(n, rho)` cell is valid.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.n.is_empty() {
            return bad("n list is empty");
        }
        if self.rho.is_empty() {
            return bad("rho list is empty");
        }
        if self.generators.is_empty() {
            return bad("generator list is empty");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        let gens = GeneratorRegistry::default();
        for g in &self.generators {
            gens.get(g)?;
        }
        FinderRegistry::default().get(&self.finder)?;
        for &n in &self.n {
            for &rho in &self.rho {
                ProtocolParams::with_constants(n, rho, &self.constants)?;
            }
        }
        Ok(())
    }
}

/// Seed of one trial, a pure function of the base seed and the cell.
pub fn trial_seed(base: u64, n: u32, rho: u32, generator: &str, trial: u64) -> u64 {
    let mut h = mix64(base);
    for b in generator.bytes() {
        h = mix64(h ^ b as u64);
    }
    h = mix64(h ^ ((n as u64) << 32 | rho as u64));
    mix64(h ^ trial)
}

/// One trial: generator stream derived from the trial seed, run stream
/// seeded with it directly.
pub fn run_trial(
    spec: &ExperimentSpec,
    params: &ProtocolParams,
    generator: &str,
    trial: u64,
) -> Result<RunReport> {
    let seed = trial_seed(spec.seed, params.n, params.rho, generator, trial);
    let g = GeneratorRegistry::default().get(generator)?;
    let finder = FinderRegistry::default().get(&spec.finder)?;
    let mut config = g.generate(
        params,
        &mut RngStream::derive(seed, 0),
        &GenOptions::default(),
    );
    let opts = RunOptions {
        max_interactions: spec.max_interactions,
        stride: spec.stride,
        tail: spec.tail,
    };
    Ok(run(&mut config, params, seed, &opts, finder.as_ref()))
}

/// Median (mean of the middle two for even counts) and nearest-rank 90th
/// percentile.
pub fn median_p90(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    let median = if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    };
    let rank = ((0.9 * k as f64).ceil() as usize).max(1);
    Some((median, v[rank - 1]))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn data_row(generator: &str, trial: u64, r: &RunReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.rho.to_string(),
        generator.to_string(),
        trial.to_string(),
        r.seed.to_string(),
        opt(r.first_safe_entry),
        opt(r.parallel_time_to_safe),
        r.last_rank_change.to_string(),
        r.det_events.to_string(),
        r.leader_changes.to_string(),
        r.interactions_executed.to_string(),
        String::new(),
        String::new(),
        String::new(),
    ]
}

fn aggregate_row(n: u32, rho: u32, generator: &str, reports: &[RunReport]) -> Vec<String> {
    let times: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.parallel_time_to_safe)
        .collect();
    let stats = median_p90(&times);
    let mut row = vec![String::new(); CSV_HEADER.len()];
    row[0] = n.to_string();
    row[1] = rho.to_string();
    row[2] = format!("{generator}/agg");
    row[11] = opt(stats.map(|s| s.0));
    row[12] = opt(stats.map(|s| s.1));
    row[13] = times.len().to_string();
    row
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub cells: u64,
    pub data_rows: u64,
    pub safe_trials: u64,
}

/// Runs the sweep and writes the CSV to `writer`, flushing after every cell
/// so an interrupted sweep leaves complete cells behind. Rows come out in
/// `(n, rho, generator, trial)` order whatever the worker count.
pub fn run_sweep<W: Write>(spec: &ExperimentSpec, jobs: usize, writer: W) -> Result<SweepSummary> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start {jobs} workers: {e}")))?;
    let mut out = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::Io {
        path: "csv output".to_string(),
        source: e.into(),
    };
    out.write_record(CSV_HEADER).map_err(csv_err)?;
    let mut summary = SweepSummary::default();
    for &n in &spec.n {
        for &rho in &spec.rho {
            let params = ProtocolParams::with_constants(n, rho, &spec.constants)?;
            for generator in &spec.generators {
                let reports: Vec<RunReport> = pool.install(|| {
                    (0..spec.trials)
                        .into_par_iter()
                        .map(|t| run_trial(spec, &params, generator, t))
                        .collect::<Result<Vec<_>>>()
                })?;
                for (t, r) in reports.iter().enumerate() {
                    out.write_record(data_row(generator, t as u64, r))
                        .map_err(csv_err)?;
                }
                out.write_record(aggregate_row(n, rho, generator, &reports))
                    .map_err(csv_err)?;
                out.flush().map_err(|e| Error::Io {
                    path: "csv output".to_string(),
                    source: e,
                })?;
                summary.cells += 1;
                summary.data_rows += reports.len() as u64;
                summary.safe_trials += reports.iter().filter(|r| r.reached_safe()).count() as u64;
            }
        }
    }
    Ok(summary)
}

/// [`run_sweep`] into a file, creating or truncating it.
pub fn run_sweep_to_path(spec: &ExperimentSpec, jobs: usize, path: &Path) -> Result<SweepSummary> {
    let file = File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    run_sweep(spec, jobs, file)
}
