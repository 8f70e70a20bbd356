//! Building blocks shared by the main cycle: one-way epidemic, the
//! single-leader phase clock, and a timer-based loosely-stabilizing leader
//! election.

use crate::params::ProtocolParams;
use crate::state::AgentState;

/// One-way epidemic: the responder keeps the larger of the two values.
#[inline]
pub fn epidemic_step<T: Ord + Copy>(ini_value: T, res_value: T) -> T {
    ini_value.max(res_value)
}

/// New responder clock under the single-leader phase clock with ceiling `cap`.
#[inline]
pub fn clock_update(ini_clock: u32, res_clock: u32, res_leader: bool, cap: u32) -> u32 {
    if res_leader && ini_clock == res_clock {
        (res_clock + 1).min(cap)
    } else {
        ini_clock.max(res_clock)
    }
}

/// Phase clock capped at `c_M * t4`. Only the responder changes.
#[inline]
pub fn phase_clock_step(ini: &AgentState, res: &mut AgentState, params: &ProtocolParams) {
    res.clock = clock_update(ini.clock, res.clock, res.leader, params.clock_cap());
}

/// Timer-epidemic leader election.
///
/// Two leaders meeting demote the responder; leaders hold a full timer;
/// a non-leader responder inherits the larger timer minus one, and takes the
/// leader role when its timer runs out.
#[inline]
pub fn lsle_step(ini: &mut AgentState, res: &mut AgentState, params: &ProtocolParams) {
    let full = params.lsle_timer_max;
    if ini.leader && res.leader {
        res.leader = false;
    }
    if ini.leader {
        ini.ltimer = full;
    }
    if res.leader {
        res.ltimer = full;
    } else {
        res.ltimer = ini.ltimer.max(res.ltimer).saturating_sub(1);
        if res.ltimer == 0 {
            res.leader = true;
            res.ltimer = full;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProtocolParams {
        ProtocolParams::new(64, 4).unwrap()
    }

    #[test]
    fn epidemic_takes_max() {
        assert_eq!(epidemic_step(5, 3), 5);
        assert_eq!(epidemic_step(3, 3), 3);
        assert_eq!(epidemic_step(1, 3), 3);
    }

    #[test]
    fn leader_ticks_on_equal_clocks() {
        assert_eq!(clock_update(7, 7, true, 240), 8);
        assert_eq!(clock_update(240, 240, true, 240), 240);
    }

    #[test]
    fn follower_copies_larger_clock() {
        assert_eq!(clock_update(9, 4, false, 240), 9);
        assert_eq!(clock_update(4, 9, false, 240), 9);
        // a leader behind the initiator also just catches up
        assert_eq!(clock_update(9, 4, true, 240), 9);
    }

    #[test]
    fn phase_clock_touches_only_responder() {
        let p = params();
        let ini = AgentState {
            clock: 12,
            ..Default::default()
        };
        let mut res = AgentState {
            clock: 3,
            ..Default::default()
        };
        phase_clock_step(&ini, &mut res, &p);
        assert_eq!((ini.clock, res.clock), (12, 12));
    }

    #[test]
    fn two_leaders_demote_responder() {
        let p = params();
        let mut a = AgentState {
            leader: true,
            ..Default::default()
        };
        let mut b = a.clone();
        lsle_step(&mut a, &mut b, &p);
        assert!(a.leader);
        assert!(!b.leader);
        assert_eq!(a.ltimer, p.lsle_timer_max);
        assert_eq!(b.ltimer, p.lsle_timer_max - 1);
    }

    #[test]
    fn exhausted_timer_promotes() {
        let p = params();
        let mut a = AgentState {
            ltimer: 1,
            ..Default::default()
        };
        let mut b = AgentState {
            ltimer: 0,
            ..Default::default()
        };
        lsle_step(&mut a, &mut b, &p);
        assert!(b.leader);
        assert_eq!(b.ltimer, p.lsle_timer_max);
        assert!(!a.leader);
        assert_eq!(a.ltimer, 1);
    }

    #[test]
    fn leader_responder_refreshes() {
        let p = params();
        let mut a = AgentState::default();
        let mut b = AgentState {
            leader: true,
            ltimer: 3,
            ..Default::default()
        };
        lsle_step(&mut a, &mut b, &p);
        assert_eq!(b.ltimer, p.lsle_timer_max);
    }

    #[test]
    fn follower_decrements_from_max() {
        let p = params();
        let mut a = AgentState {
            ltimer: 50,
            ..Default::default()
        };
        let mut b = AgentState {
            ltimer: 20,
            ..Default::default()
        };
        lsle_step(&mut a, &mut b, &p);
        assert_eq!((a.ltimer, b.ltimer), (50, 49));
    }
}
