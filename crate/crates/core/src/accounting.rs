//! Bits needed to encode one agent state.

use serde::Serialize;

use crate::params::ProtocolParams;

/// `lg` of each variable domain's cardinality.
#[derive(Clone, Debug, Serialize)]
pub struct StateSpace {
    pub entries: Vec<(&'static str, f64)>,
}

impl StateSpace {
    pub fn total_bits(&self) -> f64 {
        self.entries.iter().map(|(_, b)| b).sum()
    }

    pub fn bits_of(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, b)| *b)
    }

    /// Everything except the collision-detection list.
    pub fn non_list_bits(&self) -> f64 {
        self.total_bits() - self.bits_of("list").unwrap_or(0.0)
    }
}

fn lg(count: f64) -> f64 {
    count.log2()
}

/// `lg sum_{i=0}^{k} C(n, i)`, evaluated in the log domain.
pub fn lg_binomial_prefix_sum(n: u64, k: u64) -> f64 {
    let top = k.min(n);
    let mut ln_terms = Vec::with_capacity(top as usize + 1);
    let mut ln_c = 0.0f64;
    ln_terms.push(0.0);
    for i in 1..=top {
        ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        ln_terms.push(ln_c);
    }
    let max = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ln_terms.iter().map(|t| (t - max).exp()).sum();
    (max + sum.ln()) / std::f64::consts::LN_2
}

/// Bits contributed by `list`: subsets of `R_name` (size `rho^2 - 1`) with at most `rho` elements.
pub fn list_domain_bits(rho: u32) -> f64 {
    let names = (rho as u64) * (rho as u64) - 1;
    lg_binomial_prefix_sum(names, rho as u64)
}

pub fn state_space(p: &ProtocolParams) -> StateSpace {
    let n = p.n as f64;
    let entries = vec![
        ("rank", lg(n + 1.0)),
        ("clock", lg(p.clock_cap() as f64 + 1.0)),
        ("mode", 2.0),
        ("target", lg(n + 1.0)),
        ("det", 1.0),
        ("reset", lg(p.reset_max() as f64 + 1.0)),
        ("delay", lg(p.delay_max() as f64 + 1.0)),
        ("list", list_domain_bits(p.rho)),
        // rho^2 - 1 names plus null
        ("kid", lg(p.name_space() as f64)),
        ("susp", 1.0),
        ("index", lg(p.lgn as f64 + 1.0)),
        ("nonce", lg(p.nonce_max() as f64 + 1.0)),
        ("cand", 1.0),
        ("parity", 1.0),
        ("leader", 1.0),
        ("ltimer", lg(p.lsle_timer_max as f64 + 1.0)),
        ("ft_found", 1.0),
    ];
    StateSpace { entries }
}

/// `lg` of the number of agent states.
pub fn state_space_bits(p: &ProtocolParams) -> f64 {
    state_space(p).total_bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_two_list_has_seven_subsets() {
        assert!((list_domain_bits(2) - 7f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn rho_one_list_is_empty_set_only() {
        assert_eq!(list_domain_bits(1), 0.0);
    }

    #[test]
    fn prefix_sum_small_cases() {
        // sum_{i<=2} C(5,i) = 1 + 5 + 10
        assert!((lg_binomial_prefix_sum(5, 2) - 16f64.log2()).abs() < 1e-12);
        // k beyond n sums the whole row
        assert!((lg_binomial_prefix_sum(3, 10) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let p = ProtocolParams::new(64, 4).unwrap();
        let s = state_space(&p);
        assert!((s.total_bits() - state_space_bits(&p)).abs() < 1e-12);
        assert!((s.non_list_bits() + list_domain_bits(4) - s.total_bits()).abs() < 1e-9);
    }
}
