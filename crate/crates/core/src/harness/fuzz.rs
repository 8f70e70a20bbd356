//! Closure fuzzing: sample safe configurations and apply every ordered pair
//! once, checking that the result is still safe.

use serde::Serialize;

use crate::harness::generators::{ConfigGenerator, GenOptions, SafeFuzzed};
use crate::params::ProtocolParams;
use crate::protocol::{interact, safe_set_violation};
use crate::rng::RngStream;
use crate::state::Configuration;
use crate::target::TargetFinder;

/// A deliberately wrong transition used to check that the fuzzer can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// After the real interaction, the responder copies the initiator's rank.
    CopyInitiatorRank,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureViolation {
    pub config_index: u64,
    pub initiator: usize,
    pub responder: usize,
    pub violation: String,
    pub pre: Configuration,
    pub post: Configuration,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClosureReport {
    pub configs_checked: u64,
    pub pairs_checked: u64,
    /// Violating (configuration, ordered pair) combinations.
    pub violations: u64,
    pub violating_configs: u64,
    pub first: Option<ClosureViolation>,
}

/// Tries every ordered pair on `config`; returns the violations found.
pub fn check_closure(
    config: &Configuration,
    params: &ProtocolParams,
    finder: &dyn TargetFinder,
    fault: Fault,
    rng: &mut RngStream,
) -> Vec<(usize, usize, String, Configuration)> {
    let n = config.len();
    let mut found = Vec::new();
    let mut post = config.clone();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            post.agents[i].clone_from(&config.agents[i]);
            post.agents[j].clone_from(&config.agents[j]);
            interact(&mut post, i, j, params, rng, finder);
            if fault == Fault::CopyInitiatorRank {
                post.agents[j].rank = post.agents[i].rank;
            }
            if let Some(v) = safe_set_violation(&post, params) {
                found.push((i, j, format!("{v:?}"), post.clone()));
            }
        }
    }
    found
}

/// Checks `configs` safe configurations drawn from `safe_fuzzed`, the k-th
/// one from `RngStream::derive(seed, k)`.
pub fn fuzz_closure(
    params: &ProtocolParams,
    configs: u64,
    seed: u64,
    finder: &dyn TargetFinder,
    fault: Fault,
) -> ClosureReport {
    let n = params.n as u64;
    let mut report = ClosureReport::default();
    for k in 0..configs {
        let mut rng = RngStream::derive(seed, k);
        let config = SafeFuzzed.generate(params, &mut rng, &GenOptions::default());
        let found = check_closure(&config, params, finder, fault, &mut rng);
        report.configs_checked += 1;
        report.pairs_checked += n * (n - 1);
        if found.is_empty() {
            continue;
        }
        report.violations += found.len() as u64;
        report.violating_configs += 1;
        if report.first.is_none() {
            let (i, j, violation, post) = found.into_iter().next().expect("non-empty");
            report.first = Some(ClosureViolation {
                config_index: k,
                initiator: i,
                responder: j,
                violation,
                pre: config,
                post,
            });
        }
    }
    report
}
