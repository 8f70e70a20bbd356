//! Careful collision detection focused on a single target rank `r`.
//!
//! Kings (holders of `r`) adopt up to `rho` vassals out of the ronins whose
//! ranks lie in `[1, rho^2] \ {r}`. A vassal that meets a foreign king turns
//! suspicious, suspicion spreads only between mutually trusting saturated
//! agents, and a king that becomes suspicious raises `det`. Two agents of equal
//! rank raise `det` directly.

use crate::state::{AgentState, RankList};

/// Membership in `R_name = [1, rho^2] \ {r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RNameView {
    pub rho: u32,
    pub r: u32,
}

impl RNameView {
    pub fn new(rho: u32, r: u32) -> Self {
        RNameView { rho, r }
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        x >= 1 && x <= self.rho * self.rho && x != self.r
    }

    pub fn len(&self) -> u32 {
        let total = self.rho * self.rho;
        if (1..=total).contains(&self.r) {
            total - 1
        } else {
            total
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reset on entry into mode D. Rank and target are left alone.
pub fn detect_init(a: &mut AgentState) {
    a.det = false;
    a.list.clear();
    a.kid = None;
    a.susp = false;
}

#[inline]
pub fn is_king(a: &AgentState, r: u32) -> bool {
    a.rank == Some(r)
}

#[inline]
pub fn is_vassal(a: &AgentState) -> bool {
    a.rank.is_some_and(|x| a.list.contains(x))
}

#[inline]
pub fn is_ronin(a: &AgentState, names: RNameView) -> bool {
    a.rank
        .is_some_and(|x| names.contains(x) && !a.list.contains(x))
}

/// `a` trusts `b`: same kingdom id, `a.list ⊆ b.list`, and `b` is a saturated
/// king or vassal.
pub fn trust(a: &AgentState, b: &AgentState, r: u32, rho: u32) -> bool {
    a.kid == b.kid
        && b.list.len() == rho as usize
        && (is_king(b, r) || is_vassal(b))
        && a.list.is_subset(&b.list)
}

/// One interaction of the detector. Callers guarantee both agents are in mode
/// D with target `r`.
pub fn detect_step(ini: &mut AgentState, res: &mut AgentState, r: u32, rho: u32) {
    let names = RNameView::new(rho, r);
    let ini_king = is_king(ini, r);
    let res_rank = res.rank;

    if ini_king
        && ini.list.len() < rho as usize
        && res_rank.is_some_and(|x| !ini.list.contains(x))
        && is_ronin(res, names)
    {
        let x = res_rank.expect("ronin has a rank");
        ini.list.insert(x);
        res.list = ini.list.clone();
        let kid = ini.kid.unwrap_or(x);
        ini.kid = Some(kid);
        res.kid = Some(kid);
    } else if is_vassal(res) && trust(res, ini, r, rho) {
        res.list = ini.list.union(&res.list);
    } else if ini_king && is_vassal(res) && ini.kid != res.kid {
        res.susp = true;
    } else if trust(ini, res, r, rho) && trust(res, ini, r, rho) {
        res.susp = ini.susp || res.susp;
    }

    let same_rank = ini.rank.is_some() && ini.rank == res.rank;
    res.det = (is_king(res, r) && res.susp) || same_rank || ini.det || res.det;
}

/// Convenience for tests and probes: `list` built from a slice.
pub fn list_of(xs: &[u32]) -> RankList {
    RankList::from(xs.to_vec())
}
