//! Hand-built starting points at the entry of each sub-protocol window.
//!
//! Every builder places all agents at the last clock value of the phase just
//! before the window, in the window's mode with that mode's initialization
//! already applied. Agent 0 is the only leader, with a full timer and no
//! remaining delay.

use crate::detect::detect_init;
use crate::params::ProtocolParams;
use crate::rank::rank_init;
use crate::state::{AgentState, Configuration, Mode};
use crate::target::TargetFinder;

fn base(params: &ProtocolParams, ranks: &[u32], phase: u32) -> Configuration {
    assert_eq!(ranks.len(), params.n as usize, "one rank per agent");
    let clock = params.c_m * phase;
    let agents = ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| AgentState {
            rank: Some(r),
            clock,
            leader: i == 0,
            ltimer: params.lsle_timer_max,
            target: Some(1),
            ..Default::default()
        })
        .collect();
    Configuration::new(agents)
}

/// Entry of the target-finding window.
pub fn c_init_f(
    params: &ProtocolParams,
    ranks: &[u32],
    finder: &dyn TargetFinder,
) -> Configuration {
    let mut c = base(params, ranks, params.t1 - 1);
    for a in &mut c.agents {
        a.mode = Mode::F;
        finder.init(a);
    }
    c
}

/// Entry of the detection window with every agent targeting `r`.
pub fn c_init_d(params: &ProtocolParams, ranks: &[u32], r: u32) -> Configuration {
    let mut c = base(params, ranks, params.t2 - 1);
    for a in &mut c.agents {
        a.mode = Mode::D;
        a.target = Some(r);
        detect_init(a);
    }
    c
}

/// Entry of the ranking window: agent 0 holds rank 1, the rest are null.
pub fn c_init_r(params: &ProtocolParams) -> Configuration {
    let ranks: Vec<u32> = (1..=params.n).collect();
    let mut c = base(params, &ranks, params.t3 - 1);
    for a in &mut c.agents {
        a.mode = Mode::R;
        a.det = true;
        rank_init(a, params);
    }
    c
}
