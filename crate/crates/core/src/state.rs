//! Per-agent state, the population configuration, and the phase helper.

use serde::{Deserialize, Serialize};

use crate::params::ProtocolParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    Bot,
    F,
    D,
    R,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Bot, Mode::F, Mode::D, Mode::R];
}

/// A set of at most `rho` ranks, stored sorted and without repetition.
///
/// Subset and union are exact; trust between agents depends on exact
/// containment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct RankList(Vec<u32>);

impl From<Vec<u32>> for RankList {
    fn from(mut v: Vec<u32>) -> Self {
        v.sort_unstable();
        v.dedup();
        RankList(v)
    }
}

impl From<RankList> for Vec<u32> {
    fn from(l: RankList) -> Self {
        l.0
    }
}

impl<const N: usize> From<[u32; N]> for RankList {
    fn from(a: [u32; N]) -> Self {
        RankList::from(a.to_vec())
    }
}

impl RankList {
    pub fn new() -> Self {
        RankList(Vec::new())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn insert(&mut self, x: u32) {
        if let Err(pos) = self.0.binary_search(&x) {
            self.0.insert(pos, x);
        }
    }

    pub fn clear(&mut self) {
        self.0.clear();
    }

    pub fn is_subset(&self, other: &RankList) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for x in &self.0 {
            for y in it.by_ref() {
                if y == x {
                    continue 'outer;
                }
                if y > x {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &RankList) -> RankList {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        RankList(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// The full variable bundle carried by one agent.
///
/// `None` encodes the null value for `rank`, `target` and `kid`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentState {
    pub rank: Option<u32>,
    pub clock: u32,
    pub mode: Mode,
    pub target: Option<u32>,
    pub det: bool,
    pub reset: u32,
    pub delay: u32,
    // collision detection
    pub list: RankList,
    pub kid: Option<u32>,
    pub susp: bool,
    // ranking
    pub index: u32,
    pub nonce: u64,
    pub cand: bool,
    pub parity: u8,
    // leader election
    pub leader: bool,
    pub ltimer: u32,
    // target finder
    pub ft_found: bool,
}

/// `floor(a.clock / c_M)`.
#[inline]
pub fn phase(a: &AgentState, params: &ProtocolParams) -> u32 {
    params.phase_of(a.clock)
}

impl AgentState {
    /// An agent in the initialized set with the given rank.
    pub fn initialized(rank: u32) -> Self {
        AgentState {
            rank: Some(rank),
            target: Some(1),
            ..Default::default()
        }
    }

    /// Checks that every field lies in its declared domain.
    pub fn check_domain(&self, p: &ProtocolParams) -> Result<(), String> {
        let in_ranks = |v: u32| (1..=p.n).contains(&v);
        match self.rank {
            Some(r) if !in_ranks(r) => return Err(format!("rank {r} outside [1,{}]", p.n)),
            None if self.mode != Mode::R => return Err("null rank outside mode R".into()),
            _ => {}
        }
        if let Some(t) = self.target {
            if !in_ranks(t) {
                return Err(format!("target {t} outside [1,{}]", p.n));
            }
        }
        let bounded = [
            ("clock", self.clock, p.clock_cap()),
            ("reset", self.reset, p.reset_max()),
            ("delay", self.delay, p.delay_max()),
            ("index", self.index, p.lgn),
            ("parity", self.parity as u32, 1),
            ("ltimer", self.ltimer, p.lsle_timer_max),
        ];
        for (name, v, max) in bounded {
            if v > max {
                return Err(format!("{name} {v} exceeds {max}"));
            }
        }
        if self.nonce > p.nonce_max() {
            return Err(format!("nonce {} exceeds {}", self.nonce, p.nonce_max()));
        }
        if self.list.len() > p.rho as usize {
            return Err(format!(
                "list size {} exceeds rho={}",
                self.list.len(),
                p.rho
            ));
        }
        let names = 1..=p.name_space();
        if let Some(x) = self.list.iter().find(|x| !names.contains(x)) {
            return Err(format!("list entry {x} outside [1,{}]", p.name_space()));
        }
        if let Some(k) = self.kid {
            if !names.contains(&k) {
                return Err(format!("kid {k} outside [1,{}]", p.name_space()));
            }
        }
        Ok(())
    }
}

/// The population's global state, indexed by simulator-only agent ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    pub agents: Vec<AgentState>,
}

impl Configuration {
    pub fn new(agents: Vec<AgentState>) -> Self {
        Configuration { agents }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Mutable access to two distinct agents.
    #[inline]
    pub fn pair_mut(&mut self, i: usize, j: usize) -> (&mut AgentState, &mut AgentState) {
        assert_ne!(i, j, "an agent cannot interact with itself");
        if i < j {
            let (lo, hi) = self.agents.split_at_mut(j);
            (&mut lo[i], &mut hi[0])
        } else {
            let (lo, hi) = self.agents.split_at_mut(i);
            (&mut hi[0], &mut lo[j])
        }
    }

    pub fn ranks(&self) -> Vec<Option<u32>> {
        self.agents.iter().map(|a| a.rank).collect()
    }

    pub fn validate(&self, p: &ProtocolParams) -> Result<(), String> {
        if self.len() != p.n as usize {
            return Err(format!(
                "configuration has {} agents, expected {}",
                self.len(),
                p.n
            ));
        }
        for (i, a) in self.agents.iter().enumerate() {
            a.check_domain(p).map_err(|e| format!("agent {i}: {e}"))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
