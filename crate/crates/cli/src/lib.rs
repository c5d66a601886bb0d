//! Scenario runner around `isac_core`.
//!
//! Three pipelines are exposed, each driven by a flat `key = value` file:
//! sensing ([`simulate::run_sensing`]), resource allocation
//! ([`run_allocation`]) and the ghost-spacing table
//! ([`table::run_ambiguity_table`]).

pub mod config;
pub mod output;
pub mod presets;
pub mod simulate;
pub mod table;

use isac_core::allocator::{self, AllocPlan, Surface};

use crate::config::AllocScenario;

#[derive(Debug, Clone)]
pub struct AllocationReport {
    pub plan: AllocPlan,
    /// Only for single-target problems.
    pub surface: Option<Surface>,
}

pub fn run_allocation(scenario: &AllocScenario) -> isac_core::Result<AllocationReport> {
    let plan = allocator::solve(&scenario.problem)?;
    let surface = if scenario.problem.n_targets() == 1 {
        Some(allocator::surface(&scenario.problem)?)
    } else {
        None
    };
    Ok(AllocationReport { plan, surface })
}
