//! Target finders: pick one duplicated rank for the detector to focus on.
//!
//! A finder is selected by name at runtime. The built-in `baseline` finder
//! notices a collision when two agents of equal rank meet and then spreads
//! `(ft_found, target)` by a lexicographic-max epidemic.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Error;
use crate::state::AgentState;

pub trait TargetFinder: Send + Sync {
    fn name(&self) -> &'static str;

    /// Runs when an agent switches into mode F.
    fn init(&self, a: &mut AgentState);

    /// Runs when two mode-F agents meet inside the search window.
    fn step(&self, ini: &mut AgentState, res: &mut AgentState);
}

/// Sets `target = 1` and clears the baseline's found flag.
pub fn target_init(a: &mut AgentState) {
    a.target = Some(1);
    a.ft_found = false;
}

pub fn target_step(ini: &mut AgentState, res: &mut AgentState) {
    if let Some(r) = ini.rank {
        if ini.rank == res.rank {
            ini.ft_found = true;
            ini.target = Some(r);
            res.ft_found = true;
            res.target = Some(r);
        }
    }
    if (ini.ft_found, ini.target) > (res.ft_found, res.target) {
        res.ft_found = ini.ft_found;
        res.target = ini.target;
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BaselineFinder;

impl TargetFinder for BaselineFinder {
    fn name(&self) -> &'static str {
        "baseline"
    }

    fn init(&self, a: &mut AgentState) {
        target_init(a);
    }

    fn step(&self, ini: &mut AgentState, res: &mut AgentState) {
        target_step(ini, res);
    }
}

/// Name-indexed set of target finders.
#[derive(Clone)]
pub struct FinderRegistry {
    finders: BTreeMap<&'static str, Arc<dyn TargetFinder>>,
}

impl Default for FinderRegistry {
    fn default() -> Self {
        let mut r = FinderRegistry {
            finders: BTreeMap::new(),
        };
        r.register(Arc::new(BaselineFinder));
        r
    }
}

impl FinderRegistry {
    pub fn register(&mut self, finder: Arc<dyn TargetFinder>) {
        self.finders.insert(finder.name(), finder);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn TargetFinder>, Error> {
        self.finders
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownTargetFinder(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.finders.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(rank: u32, found: bool, target: u32) -> AgentState {
        AgentState {
            rank: Some(rank),
            ft_found: found,
            target: Some(target),
            ..Default::default()
        }
    }

    #[test]
    fn init_resets_target() {
        let mut a = agent(4, true, 9);
        target_init(&mut a);
        assert_eq!((a.target, a.ft_found), (Some(1), false));
        let once = a.clone();
        target_init(&mut a);
        assert_eq!(a, once);
    }

    #[test]
    fn equal_ranks_found() {
        let mut a = agent(7, false, 1);
        let mut b = agent(7, false, 1);
        target_step(&mut a, &mut b);
        assert_eq!((a.ft_found, a.target), (true, Some(7)));
        assert_eq!((b.ft_found, b.target), (true, Some(7)));
    }

    #[test]
    fn found_pair_spreads() {
        let mut a = agent(1, true, 7);
        let mut b = agent(2, false, 1);
        target_step(&mut a, &mut b);
        assert_eq!((b.ft_found, b.target), (true, Some(7)));
    }

    #[test]
    fn larger_target_kept() {
        let mut a = agent(1, true, 3);
        let mut b = agent(2, true, 9);
        target_step(&mut a, &mut b);
        assert_eq!(b.target, Some(9));
    }

    #[test]
    fn registry_lookup() {
        let reg = FinderRegistry::default();
        assert_eq!(reg.names(), vec!["baseline"]);
        assert_eq!(reg.get("baseline").unwrap().name(), "baseline");
        assert!(matches!(
            reg.get("cdwb"),
            Err(Error::UnknownTargetFinder(_))
        ));
    }
}
