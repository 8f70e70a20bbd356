//! Protocol parameters and the derived phase boundaries of one main cycle.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

pub const DEFAULT_C_M: u32 = 8;
pub const DEFAULT_C_T: u32 = 4;
pub const DEFAULT_C_R: u32 = 4;
pub const DEFAULT_C_D: u32 = 32;
pub const DEFAULT_C_L: u32 = 4;
pub const DEFAULT_C_MIN: u32 = 4;

/// How the length of the collision-detection window is derived.
///
/// The window is `c_T * ceil(n * lg(rho) / (rho * lg n))` phases. At `rho = 1`
/// the logarithm vanishes and the two rules disagree:
/// `ClampOnePhase` keeps a single phase, while `UnitLogFloor`
/// evaluates the formula with `max(lg rho, 1)`, which leaves direct collision
/// detection (the only mechanism available at `rho = 1`) a quadratic budget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectWindowRule {
    ClampOnePhase,
    #[default]
    UnitLogFloor,
}

/// User-facing overrides. Every field is optional; missing ones take defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_t: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_min: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lsle_timer_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub find_window_multiplier: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detect_window_multiplier: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detect_window_rule: Option<DetectWindowRule>,
}

impl Constants {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Validated parameter set for a population of `n` agents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: u32,
    pub rho: u32,
    pub c_m: u32,
    pub c_t: u32,
    pub c_r: u32,
    pub c_d: u32,
    pub c_l: u32,
    pub c_min: u32,
    pub t1: u32,
    pub t2: u32,
    pub t3: u32,
    pub t3_5: u32,
    pub t4: u32,
    /// `ceil(sqrt(n))`, the number of ranks handed out sequentially.
    pub m: u32,
    /// `ceil(lg n)`.
    pub lgn: u32,
    pub lsle_timer_max: u32,
    pub find_window_multiplier: u32,
    pub detect_window_multiplier: u32,
    pub detect_window_rule: DetectWindowRule,
}

pub fn ceil_sqrt(n: u32) -> u32 {
    let mut r = (n as f64).sqrt() as u32;
    while (r as u64) * (r as u64) < n as u64 {
        r += 1;
    }
    while r > 0 && ((r - 1) as u64) * ((r - 1) as u64) >= n as u64 {
        r -= 1;
    }
    r
}

pub fn ceil_lg(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// `ceil(x)` that ignores rounding noise just above an integer.
fn ceil_tolerant(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as u64
    } else {
        x.ceil() as u64
    }
}

fn require(name: &'static str, value: u32, min: u32) -> Result<u32, ParamError> {
    if value < min {
        Err(ParamError::ConstantTooSmall { name, value, min })
    } else {
        Ok(value)
    }
}

impl ProtocolParams {
    /// Builds a parameter set with all defaults.
    pub fn new(n: u32, rho: u32) -> Result<Self, ParamError> {
        Self::with_constants(n, rho, &Constants::default())
    }

    pub fn with_constants(n: u32, rho: u32, c: &Constants) -> Result<Self, ParamError> {
        if n < 4 {
            return Err(ParamError::PopulationTooSmall { n });
        }
        // n^2 nonces and the clock cap must fit comfortably in machine words.
        if n > 1 << 20 {
            return Err(ParamError::PopulationTooLarge { n });
        }
        let m = ceil_sqrt(n);
        if rho < 1 || rho > m {
            return Err(ParamError::RhoOutOfRange { rho, n, max: m });
        }
        let c_m = require("c_m", c.c_m.unwrap_or(DEFAULT_C_M), 1)?;
        let c_t = require("c_t", c.c_t.unwrap_or(DEFAULT_C_T), 2)?;
        let c_r = require("c_r", c.c_r.unwrap_or(DEFAULT_C_R), 1)?;
        let c_d = require("c_d", c.c_d.unwrap_or(DEFAULT_C_D), 1)?;
        let c_l = require("c_l", c.c_l.unwrap_or(DEFAULT_C_L), 1)?;
        let c_min = require("c_min", c.c_min.unwrap_or(DEFAULT_C_MIN), 1)?;
        let find_mult = require(
            "find_window_multiplier",
            c.find_window_multiplier.unwrap_or(1),
            1,
        )?;
        let detect_mult = require(
            "detect_window_multiplier",
            c.detect_window_multiplier.unwrap_or(1),
            1,
        )?;
        let rule = c.detect_window_rule.unwrap_or_default();
        let lgn = ceil_lg(n);
        let lsle_timer_max = require(
            "lsle_timer_max",
            c.lsle_timer_max.unwrap_or(8 * c_l * lgn),
            1,
        )?;

        let t1 = 2;
        let t2 = t1 + find_mult * c_t * m;
        let lg_rho = (rho as f64).log2();
        let lg_rho = match rule {
            DetectWindowRule::ClampOnePhase => lg_rho,
            DetectWindowRule::UnitLogFloor => lg_rho.max(1.0),
        };
        let rounds = ceil_tolerant(n as f64 * lg_rho / (rho as f64 * (n as f64).log2())) as u32;
        let t3 = t2 + detect_mult * (c_t * rounds).max(1);
        let t4 = t3 + 2 * c_t * m;
        let t3_5 = t4 - 1 - c_t * (m + 1);
        debug_assert!(t1 < t2 && t2 < t3 && t3 < t3_5 && t3_5 < t4);

        Ok(Self {
            n,
            rho,
            c_m,
            c_t,
            c_r,
            c_d,
            c_l,
            c_min,
            t1,
            t2,
            t3,
            t3_5,
            t4,
            m,
            lgn,
            lsle_timer_max,
            find_window_multiplier: find_mult,
            detect_window_multiplier: detect_mult,
            detect_window_rule: rule,
        })
    }

    /// Phase of a clock value: `floor(clock / c_M)`.
    #[inline]
    pub fn phase_of(&self, clock: u32) -> u32 {
        clock / self.c_m
    }

    #[inline]
    pub fn clock_cap(&self) -> u32 {
        self.c_m * self.t4
    }

    #[inline]
    pub fn reset_max(&self) -> u32 {
        self.c_r * self.lgn
    }

    #[inline]
    pub fn delay_max(&self) -> u32 {
        self.c_d * self.lgn
    }

    #[inline]
    pub fn nonce_max(&self) -> u64 {
        (self.n as u64) * (self.n as u64)
    }

    /// `rho^2`, the upper end of the name space used by collision detection.
    #[inline]
    pub fn name_space(&self) -> u32 {
        self.rho * self.rho
    }
}
