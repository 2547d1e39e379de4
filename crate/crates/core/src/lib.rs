//! Parking-slot allocation for cars arriving through gates.
//!
//! Every car enters through a gate, can afford a limited parking duration,
//! and carries a resilience weight in `[0, 1]` measuring how well it absorbs
//! wasted time. Parking on a slot costs the weighted slack
//! `resilience * (time_limit - reach)`; the cost turns infinite when the slot
//! is out of reach within the limit or when a less resilient car claims the
//! same slot in time. Less resilient cars therefore hold priority on every
//! slot they can reach.
//!
//! The crate provides:
//!
//! - [`allocation`]: the priority allocator, whose outcome is stable against
//!   unilateral deviations, and a nearest-slot greedy baseline;
//! - [`oracle`]: independent checks — deviation search, exhaustive
//!   enumeration of stable profiles, and an exact social optimum;
//! - [`stages`]: batched arrivals sharing one slot inventory;
//! - [`gen`]: seed-deterministic instance generation;
//! - [`experiments`]: parked-count comparisons and scaling benchmarks;
//! - [`json`]: canonical, byte-deterministic file formats.

pub mod allocation;
pub mod cost;
pub mod experiments;
pub mod gen;
pub mod json;
pub mod model;
pub mod oracle;
pub mod projection;
pub mod stages;

#[cfg(test)]
pub(crate) mod fixtures;

pub use allocation::{
    greedy_allocate, nash_allocate, Allocation, AllocationConfig, GreedyOrder, Objective,
};
pub use cost::{profile_costs, residual_cost, Cost, CostVector, PayoffSummary};
pub use gen::{generate, GenSpec, GenSpecError, SplitMix64};
pub use model::{
    priority_cmp, Car, CarId, GateId, ReachMatrix, Scenario, SlotId, StrategyProfile,
    ValidateOptions, ValidationError,
};
pub use oracle::{
    enumerate_nash, find_allocation_deviation, find_improving_deviation, is_nash, social_optimum,
    BudgetExceeded, DeviationWitness, SocialOptimum, DEFAULT_BUDGET,
};
pub use projection::ProjectedScenario;
pub use stages::{run_stages, StagePlan, StagePlanError, StagedAllocation};
