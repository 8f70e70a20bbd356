//! Instrumented runs that measure one building block or one window at a
//! time.

use crate::blocks::{clock_update, epidemic_step};
use crate::params::ProtocolParams;
use crate::protocol::{agent_initialized, interact_agents, ranks_distinct};
use crate::rank::split_aligned;
use crate::rng::RngStream;
use crate::state::{phase, Configuration, Mode};
use crate::target::TargetFinder;

/// Interactions until a one-way epidemic started at one agent covers all
/// `n` agents, or `None` past `budget`.
pub fn epidemic_completion(n: usize, rng: &mut RngStream, budget: u64) -> Option<u64> {
    let mut infected = vec![false; n];
    infected[0] = true;
    let mut count = 1;
    for t in 1..=budget {
        let (i, j) = rng.sample_ordered_pair(n);
        let after = epidemic_step(infected[i], infected[j]);
        if after != infected[j] {
            infected[j] = after;
            count += 1;
            if count == n {
                return Some(t);
            }
        }
    }
    None
}

/// Runs the leader-driven phase clock alone (agent 0 leads, every clock
/// starts at 0) and returns, for each phase `0..=max_phase`, the longest
/// stretch of interactions during which every agent sat in that phase.
pub fn phase_clock_windows(
    params: &ProtocolParams,
    rng: &mut RngStream,
    max_phase: u32,
    budget: u64,
) -> Vec<u64> {
    let n = params.n as usize;
    let cap = params.clock_cap();
    let mut clocks = vec![0u32; n];
    let mut count = vec![0usize; params.t4 as usize + 1];
    count[0] = n;
    let mut longest = vec![0u64; max_phase as usize + 1];
    let mut since = 0u64;
    for t in 1..=budget {
        let (i, j) = rng.sample_ordered_pair(n);
        let old = clocks[j];
        let new = clock_update(clocks[i], old, j == 0, cap);
        if new == old {
            continue;
        }
        clocks[j] = new;
        let (p_old, p_new) = (params.phase_of(old) as usize, params.phase_of(new) as usize);
        if p_old == p_new {
            continue;
        }
        if count[p_old] == n && p_old <= max_phase as usize {
            longest[p_old] = longest[p_old].max(t - since);
        }
        count[p_old] -= 1;
        count[p_new] += 1;
        if count[p_new] == n {
            since = t;
        }
        if count[..=max_phase as usize].iter().all(|&c| c == 0) {
            break;
        }
    }
    longest
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DetectWindowOutcome {
    /// `det` transitions from 0 to 1.
    pub det_events: u64,
    /// Every agent held `det = 1` when it first reached phase `t3 - 1`.
    pub all_detected: bool,
    pub interactions: u64,
    /// False if the budget ran out before every agent left the window.
    pub completed: bool,
}

/// Runs the full protocol from a detection-window entry configuration until
/// every agent has reached phase `t3 - 1`.
pub fn run_detect_window(
    config: &mut Configuration,
    params: &ProtocolParams,
    rng: &mut RngStream,
    finder: &dyn TargetFinder,
    budget: u64,
) -> DetectWindowOutcome {
    let n = config.len();
    let exit = params.t3 - 1;
    let mut left = vec![false; n];
    let mut remaining = n;
    let mut out = DetectWindowOutcome {
        all_detected: true,
        ..Default::default()
    };
    for (k, a) in config.agents.iter().enumerate() {
        if phase(a, params) >= exit {
            left[k] = true;
            remaining -= 1;
            out.all_detected &= a.det;
        }
    }
    while remaining > 0 && out.interactions < budget {
        let (i, j) = rng.sample_ordered_pair(n);
        let (ini, res) = config.pair_mut(i, j);
        let before = (ini.det, res.det);
        interact_agents(ini, res, params, rng, finder);
        out.interactions += 1;
        out.det_events += (ini.det && !before.0) as u64 + (res.det && !before.1) as u64;
        if !left[j] && phase(res, params) >= exit {
            left[j] = true;
            remaining -= 1;
            out.all_detected &= res.det;
        }
    }
    out.completed = remaining == 0;
    out.all_detected &= out.completed;
    out
}

/// Runs the full protocol from a target-finding entry configuration until
/// every agent has reached phase `t2 - 1`, and returns each agent's target at
/// that moment (`None` if the budget ran out first).
pub fn run_find_window(
    config: &mut Configuration,
    params: &ProtocolParams,
    rng: &mut RngStream,
    finder: &dyn TargetFinder,
    budget: u64,
) -> Option<Vec<Option<u32>>> {
    let n = config.len();
    let exit = params.t2 - 1;
    let mut targets: Vec<Option<Option<u32>>> = config
        .agents
        .iter()
        .map(|a| (phase(a, params) >= exit).then_some(a.target))
        .collect();
    let mut remaining = targets.iter().filter(|t| t.is_none()).count();
    let mut spent = 0;
    while remaining > 0 && spent < budget {
        let (i, j) = rng.sample_ordered_pair(n);
        let (ini, res) = config.pair_mut(i, j);
        interact_agents(ini, res, params, rng, finder);
        spent += 1;
        if targets[j].is_none() && phase(res, params) >= exit {
            targets[j] = Some(res.target);
            remaining -= 1;
        }
    }
    targets.into_iter().collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankWindowOutcome {
    /// Ranks formed exactly `[1, n]` when the first agent reached `t4`.
    pub ranks_exact: bool,
    /// Every probe during the splitting part found all ranks aligned.
    pub alignment_held: bool,
    pub probes: u64,
    pub interactions: u64,
}

/// Runs the full protocol from a ranking-window entry configuration until
/// some agent reaches phase `t4`. The alignment invariant is probed every `n`
/// interactions while every agent is still before `t3_5`.
pub fn run_rank_window(
    config: &mut Configuration,
    params: &ProtocolParams,
    rng: &mut RngStream,
    finder: &dyn TargetFinder,
    budget: u64,
) -> RankWindowOutcome {
    let n = config.len();
    let mut out = RankWindowOutcome {
        alignment_held: true,
        ..Default::default()
    };
    let mut max_phase = config
        .agents
        .iter()
        .map(|a| phase(a, params))
        .max()
        .unwrap_or(0);
    while out.interactions < budget {
        if out.interactions.is_multiple_of(n as u64) && max_phase < params.t3_5 {
            out.probes += 1;
            out.alignment_held &= config
                .agents
                .iter()
                .all(|a| a.mode != Mode::R || split_aligned(a, params));
        }
        let (i, j) = rng.sample_ordered_pair(n);
        let (ini, res) = config.pair_mut(i, j);
        interact_agents(ini, res, params, rng, finder);
        out.interactions += 1;
        max_phase = max_phase.max(phase(res, params));
        if max_phase >= params.t4 {
            out.ranks_exact = ranks_distinct(config);
            break;
        }
    }
    out
}

/// Interactions until the initialized set is entered, or `None` past
/// `budget`. Membership is tracked per agent, so even a short visit counts.
pub fn run_until_initialized(
    config: &mut Configuration,
    params: &ProtocolParams,
    rng: &mut RngStream,
    finder: &dyn TargetFinder,
    budget: u64,
) -> Option<u64> {
    let n = config.len();
    let mut outside = config
        .agents
        .iter()
        .filter(|a| !agent_initialized(a))
        .count();
    if outside == 0 {
        return Some(0);
    }
    for t in 1..=budget {
        let (i, j) = rng.sample_ordered_pair(n);
        let (ini, res) = config.pair_mut(i, j);
        let before = agent_initialized(ini) as usize + agent_initialized(res) as usize;
        interact_agents(ini, res, params, rng, finder);
        let after = agent_initialized(ini) as usize + agent_initialized(res) as usize;
        outside = outside + before - after;
        if outside == 0 {
            return Some(t);
        }
    }
    None
}
