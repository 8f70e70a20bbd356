use proptest::prelude::*;
use ssrk_core::detect::{detect_step, list_of};
use ssrk_core::harness::generators::{random_agent, random_configuration};
use ssrk_core::harness::{generate_config, GenOptions};
use ssrk_core::protocol::{interact_agents, safe_set_violation, SafeViolation};
use ssrk_core::state::phase;
use ssrk_core::target::target_step;
use ssrk_core::{
    in_safe_set, interact, AgentState, BaselineFinder, Configuration, Mode, ProtocolParams,
    RngStream,
};

fn small_params() -> impl Strategy<Value = ProtocolParams> {
    (4u32..=40).prop_flat_map(|n| {
        let m = (n as f64).sqrt().ceil() as u32;
        (Just(n), 1..=m).prop_map(|(n, rho)| ProtocolParams::new(n, rho).unwrap())
    })
}

#[test]
fn interact_is_total() {
    let mut rng = RngStream::new(2024);
    for k in 0..1_000_000u64 {
        let n = 4 + (k % 6) as u32;
        let rho = 1 + (k / 6 % 2) as u32;
        let p = ProtocolParams::new(n, rho).unwrap();
        let mut c = random_configuration(&p, &mut rng);
        let (i, j) = rng.sample_ordered_pair(c.len());
        interact(&mut c, i, j, &p, &mut rng, &BaselineFinder);
        c.agents[i].check_domain(&p).unwrap();
        c.agents[j].check_domain(&p).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn reset_is_shared_after_interaction(p in small_params(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let mut ini = random_agent(&p, &mut rng);
        let mut res = random_agent(&p, &mut rng);
        let fresh_max = ini.reset.saturating_sub(1).max(res.reset.saturating_sub(1)) == 0;
        interact_agents(&mut ini, &mut res, &p, &mut rng, &BaselineFinder);
        // The responder may raise a fresh reset after the joint decrement.
        if res.reset != p.reset_max() || !fresh_max {
            prop_assert_eq!(ini.reset, res.reset);
        }
    }

    #[test]
    fn ranks_are_permanent_inside_safe_set(p in small_params(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let c = generate_config("safe_fuzzed", &p, &mut rng, &GenOptions::default()).unwrap();
        let (i, j) = rng.sample_ordered_pair(c.len());
        let mut post = c.clone();
        interact(&mut post, i, j, &p, &mut rng, &BaselineFinder);
        prop_assert_eq!(c.ranks(), post.ranks());
        prop_assert!(post.agents.iter().all(|a| a.mode != Mode::R && !a.det));
    }

    #[test]
    fn detect_step_keeps_frame_fields(p in small_params(), seed in any::<u64>(), r in 1u32..=40) {
        let mut rng = RngStream::new(seed);
        let mut ini = random_agent(&p, &mut rng);
        let mut res = random_agent(&p, &mut rng);
        ini.rank = ini.rank.or(Some(1));
        res.rank = res.rank.or(Some(2));
        let before = (ini.clone(), res.clone());
        detect_step(&mut ini, &mut res, r, p.rho);
        for (a, b) in [(&before.0, &ini), (&before.1, &res)] {
            prop_assert_eq!((a.rank, a.mode, a.target, a.clock), (b.rank, b.mode, b.target, b.clock));
            prop_assert!(b.list.len() <= p.rho as usize);
        }
        prop_assert!(!before.1.det || res.det);
        prop_assert_eq!(before.0.det, ini.det);
    }

    #[test]
    fn target_step_keeps_frame_fields(p in small_params(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let mut ini = random_agent(&p, &mut rng);
        let mut res = random_agent(&p, &mut rng);
        let before = (ini.clone(), res.clone());
        target_step(&mut ini, &mut res);
        for (a, b) in [(&before.0, &ini), (&before.1, &res)] {
            prop_assert_eq!((a.rank, a.det, a.mode, a.clock), (b.rank, b.det, b.mode, b.clock));
        }
        if before.0.rank != before.1.rank || before.0.rank.is_none() {
            prop_assert!((res.ft_found, res.target) >= (before.1.ft_found, before.1.target));
        }
    }

    #[test]
    fn safe_fuzzed_always_safe(p in small_params(), seed in any::<u64>()) {
        let c = generate_config("safe_fuzzed", &p, &mut RngStream::new(seed), &GenOptions::default()).unwrap();
        prop_assert!(in_safe_set(&c, &p));
    }
}

#[test]
fn find_never_targets_without_duplicates() {
    let mut rng = RngStream::new(8);
    let mut c = Configuration::new((1..=36).map(AgentState::initialized).collect());
    for a in &mut c.agents {
        a.mode = Mode::F;
    }
    for _ in 0..200_000 {
        let (i, j) = rng.sample_ordered_pair(36);
        let (ini, res) = c.pair_mut(i, j);
        target_step(ini, res);
    }
    assert!(c.agents.iter().all(|a| !a.ft_found && a.target == Some(1)));
}

/// A king that adopts a ronin as initiator grows its list without looking at
/// existing vassals. A vassal whose list becomes covered but who still holds
/// `susp = 1` then breaks the vassal clause of the safe set, even though the
/// configuration before the interaction was safe.
#[test]
fn king_adoption_can_uncover_a_stale_vassal() {
    let p = ProtocolParams::new(4, 2).unwrap();
    let clock = p.c_m * (p.t2 + 1);
    let agent = |rank: u32, list: &[u32], kid: Option<u32>, susp: bool| AgentState {
        rank: Some(rank),
        clock,
        mode: Mode::D,
        target: Some(4),
        list: list_of(list),
        kid,
        susp,
        ..Default::default()
    };
    let mut c = Configuration::new(vec![
        agent(4, &[1], Some(1), false),
        agent(1, &[1, 2], Some(1), true),
        agent(2, &[], None, false),
        agent(3, &[], None, false),
    ]);
    assert!(phase(&c.agents[0], &p) >= p.t2);
    assert!(in_safe_set(&c, &p));
    interact(&mut c, 0, 2, &p, &mut RngStream::new(0), &BaselineFinder);
    assert_eq!(c.agents[0].list, list_of(&[1, 2]));
    assert_eq!(
        safe_set_violation(&c, &p),
        Some(SafeViolation::InconsistentVassal { king: 0, vassal: 1 })
    );
}
