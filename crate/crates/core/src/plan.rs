//! Planner output shared by all five methods, plus replay.

use alloc::vec::Vec;

use crate::geometry::{Configuration, Point, Workspace};
use crate::push_sim::{self, PushAction, PushFailure};

/// One step of a plan. All homology-informed planners emit cluster sweeps;
/// the randomized baseline emits straight-line pushes of single obstacles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlanStep {
    Sweep(PushAction),
    Line { obstacle: usize, goal: Point },
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlanStats {
    pub iterations: u64,
    pub seconds: f64,
}

/// An ordered action sequence with the configuration after each action.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub actions: Vec<PlanStep>,
    pub states: Vec<Configuration>,
    pub success: bool,
    pub stats: PlanStats,
}

impl Plan {
    pub fn empty(stats: PlanStats) -> Self {
        Plan { actions: Vec::new(), states: Vec::new(), success: false, stats }
    }
}

/// Replay `actions` from `config`. Sweep steps re-derive the path region and
/// cluster from the current (possibly perturbed) configuration; a sweep that
/// finds the region already empty is a no-op. Returns the final
/// configuration, or the first push failure.
pub fn replay_plan(
    config: &Configuration,
    ws: &Workspace,
    actions: &[PlanStep],
) -> Result<Configuration, PushFailure> {
    let mut current = config.clone();
    for step in actions {
        match step {
            PlanStep::Sweep(a) => match push_sim::simulate_push(&current, ws, *a) {
                Ok(out) => current = out.next,
                Err(PushFailure::EmptyRegion { .. }) => {}
                Err(e) => return Err(e),
            },
            PlanStep::Line { obstacle, goal } => {
                let out = push_sim::push_to_goal(&current, ws, *obstacle, *goal)?;
                current = out.next;
            }
        }
    }
    Ok(current)
}
