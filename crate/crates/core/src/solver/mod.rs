//! The angle map, Newton refinement, and the stochastic search.

pub mod angle_map;
pub mod newton;
pub mod search;

pub use angle_map::{angle_map, jacobian, AngleMapSample, JacobianMode, JacobianReport};
pub use newton::{newton_refine, newton_refine_traced, NewtonOutcome};
pub use search::{
    hill_climb, random_embedded_config, run_chains, SearchSpec, StepSchedule, TraceRow,
};
