//! The run engine: uniform random scheduling until the safe set is reached,
//! then a confirmation tail during which no rank may change.

use serde::{Deserialize, Serialize};

use crate::params::ProtocolParams;
use crate::protocol::{count_colliding_pairs, in_safe_set, interact_agents};
use crate::rng::RngStream;
use crate::state::Configuration;
use crate::target::TargetFinder;

pub const DEFAULT_TAIL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Budget for reaching the safe set. The tail runs on top of it.
    pub max_interactions: u64,
    /// Interactions between safe-set checks; `None` means `n`.
    pub stride: Option<u64>,
    pub tail: u64,
}

impl RunOptions {
    pub fn new(max_interactions: u64) -> Self {
        RunOptions {
            max_interactions,
            stride: None,
            tail: DEFAULT_TAIL,
        }
    }
}

/// Outcome of one run. `first_safe_entry` is stride-granular: it is the
/// interaction count at the first check that found the configuration safe,
/// so the true entry lies within one stride before it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub n: u32,
    pub rho: u32,
    pub interactions_executed: u64,
    pub first_safe_entry: Option<u64>,
    /// Interaction number of the last rank change, 0 if none happened.
    pub last_rank_change: u64,
    pub parallel_time_to_safe: Option<f64>,
    pub collisions_initial: u64,
    /// Number of times some agent's `det` went from 0 to 1.
    pub det_events: u64,
    /// Leader-bit flips, either direction.
    pub leader_changes: u64,
    pub stride: u64,
    pub tail_interactions: u64,
    pub tail_rank_changes: u64,
}

impl RunReport {
    pub fn reached_safe(&self) -> bool {
        self.first_safe_entry.is_some()
    }

    /// Reached the safe set and kept every rank through the tail.
    pub fn succeeded(&self) -> bool {
        self.reached_safe() && self.tail_rank_changes == 0
    }
}

#[derive(Default)]
struct Counters {
    executed: u64,
    last_rank_change: u64,
    rank_changes: u64,
    det_events: u64,
    leader_changes: u64,
}

impl Counters {
    #[inline]
    fn step(
        &mut self,
        config: &mut Configuration,
        params: &ProtocolParams,
        rng: &mut RngStream,
        finder: &dyn TargetFinder,
    ) {
        let (i, j) = rng.sample_ordered_pair(config.len());
        let (ini, res) = config.pair_mut(i, j);
        let before = (ini.rank, res.rank, ini.det, res.det, ini.leader, res.leader);
        interact_agents(ini, res, params, rng, finder);
        self.executed += 1;
        if ini.rank != before.0 || res.rank != before.1 {
            self.rank_changes += 1;
            self.last_rank_change = self.executed;
        }
        self.det_events += (ini.det && !before.2) as u64 + (res.det && !before.3) as u64;
        self.leader_changes += (ini.leader != before.4) as u64 + (res.leader != before.5) as u64;
    }
}

/// Runs `config` in place with scheduler and nonce draws from
/// `RngStream::new(seed)`.
pub fn run(
    config: &mut Configuration,
    params: &ProtocolParams,
    seed: u64,
    opts: &RunOptions,
    finder: &dyn TargetFinder,
) -> RunReport {
    let n = config.len() as u64;
    let stride = opts.stride.unwrap_or(n).max(1);
    let mut rng = RngStream::new(seed);
    let collisions_initial = count_colliding_pairs(config);
    let mut counters = Counters::default();

    let mut first_safe_entry = in_safe_set(config, params).then_some(0);
    while first_safe_entry.is_none() && counters.executed < opts.max_interactions {
        let chunk = stride.min(opts.max_interactions - counters.executed);
        for _ in 0..chunk {
            counters.step(config, params, &mut rng, finder);
        }
        if in_safe_set(config, params) {
            first_safe_entry = Some(counters.executed);
        }
    }

    let (mut tail_interactions, mut tail_rank_changes) = (0, 0);
    if first_safe_entry.is_some() {
        let changes_before = counters.rank_changes;
        for _ in 0..opts.tail {
            counters.step(config, params, &mut rng, finder);
        }
        tail_interactions = opts.tail;
        tail_rank_changes = counters.rank_changes - changes_before;
    }

    RunReport {
        seed,
        n: params.n,
        rho: params.rho,
        interactions_executed: counters.executed,
        first_safe_entry,
        last_rank_change: counters.last_rank_change,
        parallel_time_to_safe: first_safe_entry.map(|t| t as f64 / n as f64),
        collisions_initial,
        det_events: counters.det_events,
        leader_changes: counters.leader_changes,
        stride,
        tail_interactions,
        tail_rank_changes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generators::{generate_config, GenOptions};
    use crate::target::BaselineFinder;

    #[test]
    fn already_safe_is_detected_immediately() {
        let p = ProtocolParams::new(16, 2).unwrap();
        let mut c = generate_config(
            "initialized",
            &p,
            &mut RngStream::new(1),
            &GenOptions::default(),
        )
        .unwrap();
        let opts = RunOptions {
            max_interactions: 1000,
            stride: None,
            tail: 5000,
        };
        let r = run(&mut c, &p, 9, &opts, &BaselineFinder);
        assert_eq!(r.first_safe_entry, Some(0));
        assert_eq!(r.parallel_time_to_safe, Some(0.0));
        assert_eq!(r.interactions_executed, 5000);
        assert!(r.succeeded());
    }

    #[test]
    fn budget_exhaustion() {
        let p = ProtocolParams::new(16, 2).unwrap();
        let mut c = generate_config(
            "all_same_rank",
            &p,
            &mut RngStream::new(1),
            &GenOptions::default(),
        )
        .unwrap();
        let opts = RunOptions {
            max_interactions: 100,
            stride: Some(7),
            tail: 10,
        };
        let r = run(&mut c, &p, 9, &opts, &BaselineFinder);
        assert_eq!(r.first_safe_entry, None);
        assert_eq!(r.interactions_executed, 100);
        assert_eq!(r.tail_interactions, 0);
        assert_eq!(r.collisions_initial, 120);
    }

    #[test]
    fn deterministic() {
        let p = ProtocolParams::new(16, 2).unwrap();
        let c0 = generate_config(
            "uniform_random",
            &p,
            &mut RngStream::new(2),
            &GenOptions::default(),
        )
        .unwrap();
        let opts = RunOptions {
            max_interactions: 2_000_000,
            stride: None,
            tail: 10_000,
        };
        let (mut a, mut b) = (c0.clone(), c0);
        let ra = run(&mut a, &p, 77, &opts, &BaselineFinder);
        let rb = run(&mut b, &p, 77, &opts, &BaselineFinder);
        assert_eq!(ra, rb);
        assert_eq!(a, b);
        if let Some(t) = ra.first_safe_entry {
            assert!(t <= ra.interactions_executed);
            assert_eq!(ra.parallel_time_to_safe, Some(t as f64 / 16.0));
        }
    }
}
