//! Library side of the CLI: experiment runners and the worked-example
//! report, kept callable so integration tests drive the same code paths
//! as the binary.

pub mod experiments;
pub mod streams;
pub mod tas_example;

pub use experiments::{ExperimentName, ExperimentSpec, SaltRow, SpecOverrides};
pub use tas_example::{run_tas_example, TasExampleReport};
