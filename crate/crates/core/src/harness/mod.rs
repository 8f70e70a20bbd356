//! Run engine, starting-configuration generators, probes, and sweeps.

pub mod fuzz;
pub mod generators;
pub mod probes;
pub mod run;
pub mod scenarios;
pub mod sweep;

pub use generators::{
    generate_config, ConfigGenerator, GenOptions, GeneratorRegistry, ADVERSARIAL,
};
pub use run::{run, RunOptions, RunReport, DEFAULT_TAIL};
