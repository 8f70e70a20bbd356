//! The main cycle: reset propagation, leader delay, the phase clock, mode
//! switching, and guarded dispatch into the three sub-protocols. Also the
//! checkers for the initialized set and the safe set.

use crate::blocks::{lsle_step, phase_clock_step};
use crate::detect::{detect_init, detect_step, is_king, is_ronin, is_vassal, RNameView};
use crate::params::ProtocolParams;
use crate::rank::{rank_init, rank_step};
use crate::rng::RngStream;
use crate::state::{phase, AgentState, Configuration, Mode};
use crate::target::TargetFinder;

/// Applies one interaction between `config[ini_idx]` (initiator) and
/// `config[res_idx]` (responder). Total on every configuration.
pub fn interact(
    config: &mut Configuration,
    ini_idx: usize,
    res_idx: usize,
    params: &ProtocolParams,
    rng: &mut RngStream,
    finder: &dyn TargetFinder,
) {
    let (ini, res) = config.pair_mut(ini_idx, res_idx);
    interact_agents(ini, res, params, rng, finder);
}

/// Moves `a` into `next`, running that mode's initialization. An agent that
/// leaves mode R without a rank falls back to rank 1.
pub fn switch_mode(
    a: &mut AgentState,
    next: Mode,
    params: &ProtocolParams,
    finder: &dyn TargetFinder,
) {
    if a.mode == next {
        return;
    }
    if a.mode == Mode::R && a.rank.is_none() {
        a.rank = Some(1);
    }
    a.mode = next;
    match next {
        Mode::Bot => {}
        Mode::F => finder.init(a),
        Mode::D => detect_init(a),
        Mode::R => rank_init(a, params),
    }
}

fn apply_reset(a: &mut AgentState, params: &ProtocolParams, finder: &dyn TargetFinder) {
    a.clock = 0;
    a.delay = params.delay_max();
    switch_mode(a, Mode::Bot, params, finder);
    a.det = false;
}

/// Mode the responder should hold after reaching phase `p2`.
#[inline]
fn scheduled_mode(res: &AgentState, p2: u32, params: &ProtocolParams) -> Mode {
    if p2 + 1 == params.t1 {
        Mode::F
    } else if p2 + 1 == params.t2 {
        Mode::D
    } else if p2 + 1 == params.t3 && res.det {
        Mode::R
    } else {
        res.mode
    }
}

pub fn interact_agents(
    ini: &mut AgentState,
    res: &mut AgentState,
    params: &ProtocolParams,
    rng: &mut RngStream,
    finder: &dyn TargetFinder,
) {
    lsle_step(ini, res, params);

    let reset = ini.reset.saturating_sub(1).max(res.reset.saturating_sub(1));
    ini.reset = reset;
    res.reset = reset;

    if res.reset > 0 {
        apply_reset(res, params, finder);
        apply_reset(ini, params, finder);
        return;
    }
    if res.leader && res.delay > 0 {
        res.delay -= 1;
        return;
    }

    phase_clock_step(ini, res, params);
    let p2 = phase(res, params);
    if p2 == params.t4 {
        res.reset = params.reset_max();
    }
    let p1 = phase(ini, params);

    let next = scheduled_mode(res, p2, params);
    switch_mode(res, next, params, finder);

    if ini.mode != res.mode || (res.mode == Mode::D && ini.target != res.target) {
        return;
    }
    match res.mode {
        Mode::F if p1 >= params.t1 && p2 + 2 <= params.t2 => finder.step(ini, res),
        Mode::D if p1 >= params.t2 && p2 + 2 <= params.t3 => {
            let r = res.target.unwrap_or(0);
            detect_step(ini, res, r, params.rho);
        }
        Mode::R if p1 >= params.t3 && p2 < params.t4 => rank_step(ini, res, params, rng),
        _ => {}
    }
}

/// Per-agent part of the initialized set. Only the leader's delay counts:
/// non-leaders never decrement theirs.
#[inline]
pub fn agent_initialized(a: &AgentState) -> bool {
    a.clock == 0 && a.reset == 0 && !a.det && a.mode == Mode::Bot && (!a.leader || a.delay == 0)
}

/// Every agent at clock 0 with no pending reset, no detection flag, mode
/// Bot, and (for leaders) no remaining delay.
pub fn in_initialized_set(config: &Configuration) -> bool {
    config.agents.iter().all(agent_initialized)
}

/// Same as [`in_initialized_set`] but also requires `delay = 0` on
/// non-leaders.
pub fn in_initialized_set_literal(config: &Configuration) -> bool {
    config
        .agents
        .iter()
        .all(|a| agent_initialized(a) && a.delay == 0)
}

/// Ranks are a permutation of `[1, n]`.
pub fn ranks_distinct(config: &Configuration) -> bool {
    let n = config.len();
    let mut seen = vec![false; n + 1];
    for a in &config.agents {
        match a.rank {
            Some(r) if (r as usize) <= n && r >= 1 && !seen[r as usize] => seen[r as usize] = true,
            _ => return false,
        }
    }
    true
}

/// Which clause of the safe-set definition fails first, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SafeViolation {
    DuplicateRank,
    ModeR,
    DetRaised,
    SuspiciousKingOrRonin { agent: usize },
    InconsistentVassal { king: usize, vassal: usize },
}

pub fn safe_set_violation(
    config: &Configuration,
    params: &ProtocolParams,
) -> Option<SafeViolation> {
    if !ranks_distinct(config) {
        return Some(SafeViolation::DuplicateRank);
    }
    if config.agents.iter().any(|a| a.mode == Mode::R) {
        return Some(SafeViolation::ModeR);
    }
    if config.agents.iter().any(|a| a.det) {
        return Some(SafeViolation::DetRaised);
    }
    let n = config.len();
    // With distinct ranks there is at most one king per target value.
    let mut king_of = vec![usize::MAX; n + 1];
    for (i, a) in config.agents.iter().enumerate() {
        if a.mode != Mode::D {
            continue;
        }
        let r = a.target.unwrap_or(0);
        let king = is_king(a, r);
        if (king || is_ronin(a, RNameView::new(params.rho, r))) && a.susp {
            return Some(SafeViolation::SuspiciousKingOrRonin { agent: i });
        }
        if king {
            king_of[r as usize] = i;
        }
    }
    for (j, b) in config.agents.iter().enumerate() {
        if b.mode != Mode::D || !is_vassal(b) {
            continue;
        }
        let Some(r) = b.target else { continue };
        let k = king_of.get(r as usize).copied().unwrap_or(usize::MAX);
        if k == usize::MAX {
            continue;
        }
        let a = &config.agents[k];
        if b.list.is_subset(&a.list) && (b.susp || a.kid != b.kid) {
            return Some(SafeViolation::InconsistentVassal { king: k, vassal: j });
        }
    }
    None
}

/// Membership in the safe set: distinct ranks, no mode R, no `det`, no
/// suspicious king or ronin, and every vassal whose list is covered by its
/// king's list is calm and shares the king's kingdom id.
pub fn in_safe_set(config: &Configuration, params: &ProtocolParams) -> bool {
    safe_set_violation(config, params).is_none()
}

/// Number of unordered agent pairs sharing a (non-null) rank.
pub fn count_colliding_pairs(config: &Configuration) -> u64 {
    let mut counts = std::collections::HashMap::<u32, u64>::new();
    for r in config.agents.iter().filter_map(|a| a.rank) {
        *counts.entry(r).or_default() += 1;
    }
    counts.values().map(|&c| c * (c - 1) / 2).sum()
}
