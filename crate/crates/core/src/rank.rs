//! Rank reassignment.
//!
//! Part one hands out `[1, n-m]` in parallel: a ranked initiator meeting a
//! null responder fixes one more bit of its `(rank - 1, index)` prefix and
//! passes the sibling prefix to the responder. Part two awards
//! `[n-m+1, n]` one per round of `c_T` phases through a max-nonce lottery
//! among the remaining null agents.

use crate::params::ProtocolParams;
use crate::rng::RngStream;
use crate::state::{phase, AgentState};

/// Reset on entry into mode R: the leader restarts at rank 1, everyone else
/// is null.
pub fn rank_init(a: &mut AgentState, params: &ProtocolParams) {
    a.index = 0;
    a.rank = if a.leader { Some(1) } else { None };
    a.nonce = 0;
    a.parity = (params.t3_5 % 2) as u8;
    a.cand = false;
}

/// Rank awarded at the `k`-th lottery boundary, if it is in range.
#[inline]
pub fn lottery_rank(params: &ProtocolParams, k: u32) -> Option<u32> {
    (1..=params.m).contains(&k).then(|| params.n - params.m + k)
}

/// One interaction of the ranking sub-protocol. Callers guarantee both agents
/// are in mode R and inside the ranking window.
pub fn rank_step(
    ini: &mut AgentState,
    res: &mut AgentState,
    params: &ProtocolParams,
    rng: &mut RngStream,
) {
    let p1 = phase(ini, params);
    let p2 = phase(res, params);
    let lgn = params.lgn;

    if p2 < params.t3_5 {
        if let Some(base) = ini.rank {
            if ini.index < lgn && res.rank.is_none() {
                ini.index += 1;
                let r_new = base as u64 + (1u64 << (lgn - ini.index));
                if r_new <= (params.n - params.m) as u64 {
                    res.rank = Some(r_new as u32);
                    res.index = ini.index;
                }
            }
        }
    }

    if p2 >= params.t3_5 && (p2 % 2) as u8 == res.parity {
        res.parity ^= 1;
        let h = p2 - params.t3_5;
        if h.is_multiple_of(params.c_t) {
            if res.cand {
                if let Some(r) = lottery_rank(params, h / params.c_t) {
                    res.rank = Some(r);
                }
            }
            res.cand = res.rank.is_none();
        }
        res.nonce = if res.cand {
            rng.range_inclusive(1, params.nonce_max())
        } else {
            0
        };
    }

    if p1 == p2 && p2 >= params.t3_5 && res.nonce < ini.nonce {
        res.cand = false;
        res.nonce = ini.nonce;
    }
}

/// `(rank - 1)` is a multiple of `2^(lgn - index)` for every ranked agent.
pub fn split_aligned(a: &AgentState, params: &ProtocolParams) -> bool {
    match a.rank {
        None => true,
        Some(r) => {
            let shift = params.lgn.saturating_sub(a.index);
            (r as u64 - 1).is_multiple_of(1u64 << shift)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Constants;
    use crate::state::Mode;

    fn params16() -> ProtocolParams {
        let c = Constants {
            c_t: Some(2),
            c_m: Some(4),
            ..Default::default()
        };
        ProtocolParams::with_constants(16, 2, &c).unwrap()
    }

    fn at_phase(p: &ProtocolParams, ph: u32, rank: Option<u32>) -> AgentState {
        AgentState {
            rank,
            mode: Mode::R,
            clock: ph * p.c_m,
            parity: (p.t3_5 % 2) as u8,
            ..Default::default()
        }
    }

    #[test]
    fn init_for_leader_and_follower() {
        let p = params16();
        let mut a = AgentState {
            leader: true,
            rank: Some(9),
            index: 3,
            cand: true,
            nonce: 40,
            ..Default::default()
        };
        rank_init(&mut a, &p);
        assert_eq!((a.rank, a.index, a.nonce, a.cand), (Some(1), 0, 0, false));
        assert_eq!(a.parity, 1); // t3_5 = 19
        let mut b = AgentState {
            rank: Some(4),
            ..Default::default()
        };
        rank_init(&mut b, &p);
        assert_eq!(b.rank, None);
    }

    #[test]
    fn binary_split_first_levels() {
        let p = params16();
        let mut rng = RngStream::new(0);
        let mut ini = at_phase(&p, p.t3, Some(1));
        let mut res = at_phase(&p, p.t3, None);
        rank_step(&mut ini, &mut res, &p, &mut rng);
        assert_eq!(ini.index, 1);
        assert_eq!((res.rank, res.index), (Some(9), 1));

        let mut res2 = at_phase(&p, p.t3, None);
        rank_step(&mut ini, &mut res2, &p, &mut rng);
        assert_eq!(res2.rank, Some(5));
    }

    #[test]
    fn overflowing_split_leaves_responder_null() {
        let p = params16();
        let mut rng = RngStream::new(0);
        // 5 + 2^3 = 13 > n - m = 12
        let mut ini = at_phase(&p, p.t3, Some(5));
        let mut res = at_phase(&p, p.t3, None);
        rank_step(&mut ini, &mut res, &p, &mut rng);
        assert_eq!(ini.index, 1);
        assert_eq!(res.rank, None);
    }

    #[test]
    fn first_award_is_n_minus_m_plus_one() {
        let p = params16();
        assert_eq!(p.t3_5, 19);
        let mut rng = RngStream::new(0);
        let ini = at_phase(&p, 21, Some(3));
        let mut res = at_phase(&p, 21, None);
        res.cand = true;
        res.nonce = 77;
        rank_step(&mut ini.clone(), &mut res, &p, &mut rng);
        assert_eq!(res.rank, Some(13));
        assert!(!res.cand);
        assert_eq!(res.nonce, 0);
    }

    #[test]
    fn duel_copies_larger_nonce() {
        let p = params16();
        let mut rng = RngStream::new(0);
        let mut ini = at_phase(&p, 20, None);
        ini.nonce = 200;
        let mut res = at_phase(&p, 20, None);
        // already arrived in phase 20
        res.parity = 1;
        res.nonce = 50;
        res.cand = true;
        rank_step(&mut ini, &mut res, &p, &mut rng);
        assert!(!res.cand);
        assert_eq!(res.nonce, 200);
    }

    #[test]
    fn arrival_draws_nonce_for_candidates() {
        let p = params16();
        let mut rng = RngStream::new(4);
        let mut ini = at_phase(&p, 19, Some(2));
        let mut res = at_phase(&p, 19, None);
        rank_step(&mut ini, &mut res, &p, &mut rng);
        assert!(res.cand);
        assert!((1..=256).contains(&res.nonce));
        assert_eq!(res.parity, 0);
    }

    #[test]
    fn out_of_range_round_awards_nothing() {
        let p = params16();
        assert_eq!(lottery_rank(&p, 0), None);
        assert_eq!(lottery_rank(&p, 1), Some(13));
        assert_eq!(lottery_rank(&p, 4), Some(16));
        assert_eq!(lottery_rank(&p, 5), None);
    }

    #[test]
    fn alignment_check() {
        let p = params16();
        let a = AgentState {
            rank: Some(9),
            index: 1,
            ..Default::default()
        };
        assert!(split_aligned(&a, &p));
        let b = AgentState {
            rank: Some(10),
            index: 1,
            ..Default::default()
        };
        assert!(!split_aligned(&b, &p));
    }
}
