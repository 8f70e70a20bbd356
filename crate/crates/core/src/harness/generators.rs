//! Starting-configuration generators, selected by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::detect::{is_king, is_ronin, is_vassal, RNameView};
use crate::error::Error;
use crate::params::ProtocolParams;
use crate::protocol::{in_initialized_set, in_safe_set};
use crate::rng::RngStream;
use crate::state::{AgentState, Configuration, Mode, RankList};

/// Knobs that only some generators read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    /// `initialized`: distinct ranks, or ranks with at least one collision.
    pub distinct_ranks: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            distinct_ranks: true,
        }
    }
}

pub trait ConfigGenerator: Send + Sync {
    fn name(&self) -> &'static str;

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        opts: &GenOptions,
    ) -> Configuration;
}

/// The generators that start from arbitrary, typically broken, states.
pub const ADVERSARIAL: [&str; 5] = [
    "uniform_random",
    "all_same_rank",
    "clocks_near_t4",
    "det_all_one",
    "mode_R_all_null",
];

fn pick<T: Copy>(rng: &mut RngStream, items: &[T]) -> T {
    items[rng.below(items.len() as u64) as usize]
}

fn maybe(rng: &mut RngStream, lo: u32, hi: u32) -> Option<u32> {
    // NULL gets one slot next to the hi - lo + 1 values.
    let v = rng.range_inclusive(lo as u64, hi as u64 + 1) as u32;
    (v <= hi).then_some(v)
}

/// A list of at most `rho` distinct names, size uniform in `[0, rho]`.
pub fn random_list(params: &ProtocolParams, rng: &mut RngStream) -> RankList {
    let size = rng.range_inclusive(0, params.rho as u64) as usize;
    let mut names: Vec<u32> = (1..=params.name_space()).collect();
    rng.shuffle(&mut names);
    RankList::from(names[..size].to_vec())
}

/// Every field drawn uniformly from its domain.
pub fn random_agent(params: &ProtocolParams, rng: &mut RngStream) -> AgentState {
    let n = params.n;
    let mode = pick(rng, &Mode::ALL);
    let rank = if mode == Mode::R {
        maybe(rng, 1, n)
    } else {
        Some(rng.range_inclusive(1, n as u64) as u32)
    };
    AgentState {
        rank,
        clock: rng.range_inclusive(0, params.clock_cap() as u64) as u32,
        mode,
        target: maybe(rng, 1, n),
        det: rng.coin(),
        reset: rng.range_inclusive(0, params.reset_max() as u64) as u32,
        delay: rng.range_inclusive(0, params.delay_max() as u64) as u32,
        list: random_list(params, rng),
        kid: maybe(rng, 1, params.name_space()),
        susp: rng.coin(),
        index: rng.range_inclusive(0, params.lgn as u64) as u32,
        nonce: rng.range_inclusive(0, params.nonce_max()),
        cand: rng.coin(),
        parity: rng.coin() as u8,
        leader: rng.coin(),
        ltimer: rng.range_inclusive(0, params.lsle_timer_max as u64) as u32,
        ft_found: rng.coin(),
    }
}

pub fn random_configuration(params: &ProtocolParams, rng: &mut RngStream) -> Configuration {
    Configuration::new((0..params.n).map(|_| random_agent(params, rng)).collect())
}

fn shuffled_ranks(params: &ProtocolParams, rng: &mut RngStream) -> Vec<u32> {
    let mut ranks: Vec<u32> = (1..=params.n).collect();
    rng.shuffle(&mut ranks);
    ranks
}

pub struct UniformRandom;

impl ConfigGenerator for UniformRandom {
    fn name(&self) -> &'static str {
        "uniform_random"
    }

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        _: &GenOptions,
    ) -> Configuration {
        random_configuration(params, rng)
    }
}

/// Uniform fields, then one rank value shared by everybody.
pub struct AllSameRank;

impl ConfigGenerator for AllSameRank {
    fn name(&self) -> &'static str {
        "all_same_rank"
    }

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        _: &GenOptions,
    ) -> Configuration {
        let mut c = random_configuration(params, rng);
        let v = rng.range_inclusive(1, params.n as u64) as u32;
        for a in &mut c.agents {
            a.rank = Some(v);
        }
        c
    }
}

/// Uniform fields with every clock in the last phase before the reset
/// trigger and no reset pending.
pub struct ClocksNearT4;

impl ConfigGenerator for ClocksNearT4 {
    fn name(&self) -> &'static str {
        "clocks_near_t4"
    }

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        _: &GenOptions,
    ) -> Configuration {
        let mut c = random_configuration(params, rng);
        let lo = params.c_m * (params.t4 - 1);
        for a in &mut c.agents {
            a.clock = rng.range_inclusive(lo as u64, params.clock_cap() as u64 - 1) as u32;
            a.reset = 0;
        }
        c
    }
}

pub struct DetAllOne;

impl ConfigGenerator for DetAllOne {
    fn name(&self) -> &'static str {
        "det_all_one"
    }

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        _: &GenOptions,
    ) -> Configuration {
        let mut c = random_configuration(params, rng);
        for a in &mut c.agents {
            a.det = true;
        }
        c
    }
}

pub struct ModeRAllNull;

impl ConfigGenerator for ModeRAllNull {
    fn name(&self) -> &'static str {
        "mode_R_all_null"
    }

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        _: &GenOptions,
    ) -> Configuration {
        let mut c = random_configuration(params, rng);
        for a in &mut c.agents {
            a.mode = Mode::R;
            a.rank = None;
        }
        c
    }
}

/// Random members of the safe set.
///
/// Ranks are a random permutation and modes avoid R. Clocks either scatter
/// over the whole cycle or cluster inside one window so that the
/// sub-protocols actually run on the sample. Mode-D agents mostly share one
/// target and carry random lists, kingdom ids and suspicion; the two
/// suspicion clauses are then repaired in place.
pub struct SafeFuzzed;

impl SafeFuzzed {
    fn clock_band(params: &ProtocolParams, rng: &mut RngStream) -> Option<(u32, u32)> {
        let cm = params.c_m;
        let band = |lo_phase: u32, hi_phase: u32| (cm * lo_phase, cm * (hi_phase + 1) - 1);
        match rng.below(5) {
            0 => None,
            1 => Some(band(params.t2, params.t3 - 2)),
            2 => Some(band(params.t2 - 1, params.t2)),
            3 => Some(band(params.t3 - 2, params.t3 - 1)),
            _ => Some(band(params.t1 - 1, params.t2 - 1)),
        }
    }

    fn repair(c: &mut Configuration, params: &ProtocolParams) {
        let n = params.n as usize;
        let mut king_of = vec![usize::MAX; n + 1];
        for (i, a) in c.agents.iter_mut().enumerate() {
            if a.mode != Mode::D {
                continue;
            }
            let r = a.target.unwrap_or(0);
            let king = is_king(a, r);
            if king || is_ronin(a, RNameView::new(params.rho, r)) {
                a.susp = false;
            }
            if king {
                king_of[r as usize] = i;
            }
        }
        for j in 0..c.agents.len() {
            let b = &c.agents[j];
            if b.mode != Mode::D || !is_vassal(b) {
                continue;
            }
            let Some(k) = b
                .target
                .map(|r| king_of[r as usize])
                .filter(|&k| k != usize::MAX)
            else {
                continue;
            };
            let (king_list, king_kid) = (c.agents[k].list.clone(), c.agents[k].kid);
            let b = &mut c.agents[j];
            if b.list.is_subset(&king_list) {
                b.susp = false;
                b.kid = king_kid;
            }
        }
    }
}

impl ConfigGenerator for SafeFuzzed {
    fn name(&self) -> &'static str {
        "safe_fuzzed"
    }

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        _: &GenOptions,
    ) -> Configuration {
        let ranks = shuffled_ranks(params, rng);
        let band = Self::clock_band(params, rng);
        let common_target = rng.range_inclusive(1, params.n as u64) as u32;
        let mode_d_share = rng.range_inclusive(1, 4) as f64 / 4.0;
        let any_reset = rng.chance(0.1);
        let mut agents = Vec::with_capacity(params.n as usize);
        for rank in ranks {
            let mut a = random_agent(params, rng);
            a.rank = Some(rank);
            a.det = false;
            a.mode = if rng.chance(mode_d_share) {
                Mode::D
            } else {
                pick(rng, &[Mode::Bot, Mode::F])
            };
            if let Some((lo, hi)) = band {
                a.clock = rng.range_inclusive(lo as u64, hi as u64) as u32;
            }
            if !any_reset {
                a.reset = 0;
            }
            if a.mode == Mode::D && rng.chance(0.9) {
                a.target = Some(common_target);
            }
            agents.push(a);
        }
        let mut c = Configuration::new(agents);
        Self::repair(&mut c, params);
        debug_assert!(in_safe_set(&c, params));
        c
    }
}

/// Members of the initialized set with a single leader (agent 0) holding a
/// full timer.
pub struct Initialized;

impl ConfigGenerator for Initialized {
    fn name(&self) -> &'static str {
        "initialized"
    }

    fn generate(
        &self,
        params: &ProtocolParams,
        rng: &mut RngStream,
        opts: &GenOptions,
    ) -> Configuration {
        let ranks = if opts.distinct_ranks {
            shuffled_ranks(params, rng)
        } else {
            let mut r: Vec<u32> = (0..params.n)
                .map(|_| rng.range_inclusive(1, params.n as u64) as u32)
                .collect();
            let (i, j) = rng.sample_ordered_pair(r.len());
            r[j] = r[i];
            r
        };
        let mut agents: Vec<AgentState> = ranks.into_iter().map(AgentState::initialized).collect();
        for (i, a) in agents.iter_mut().enumerate() {
            a.leader = i == 0;
            a.ltimer = if a.leader {
                params.lsle_timer_max
            } else {
                rng.range_inclusive(1, params.lsle_timer_max as u64) as u32
            };
        }
        let c = Configuration::new(agents);
        debug_assert!(in_initialized_set(&c));
        c
    }
}

/// Name-indexed set of generators.
#[derive(Clone)]
pub struct GeneratorRegistry {
    generators: BTreeMap<&'static str, Arc<dyn ConfigGenerator>>,
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        let mut r = GeneratorRegistry {
            generators: BTreeMap::new(),
        };
        r.register(Arc::new(UniformRandom));
        r.register(Arc::new(AllSameRank));
        r.register(Arc::new(ClocksNearT4));
        r.register(Arc::new(DetAllOne));
        r.register(Arc::new(ModeRAllNull));
        r.register(Arc::new(SafeFuzzed));
        r.register(Arc::new(Initialized));
        r
    }
}

impl GeneratorRegistry {
    pub fn register(&mut self, g: Arc<dyn ConfigGenerator>) {
        self.generators.insert(g.name(), g);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ConfigGenerator>, Error> {
        self.generators
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.generators.keys().copied().collect()
    }
}

/// Looks `kind` up in the default registry and runs it.
pub fn generate_config(
    kind: &str,
    params: &ProtocolParams,
    rng: &mut RngStream,
    opts: &GenOptions,
) -> Result<Configuration, Error> {
    let g = GeneratorRegistry::default().get(kind)?;
    Ok(g.generate(params, rng, opts))
}
