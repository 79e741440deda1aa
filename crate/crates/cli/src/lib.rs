//! File formats, benchmark harness, and rendering around the planner core.

pub mod bench;
pub mod plantext;
pub mod render;
pub mod scene;

use std::time::Instant;

use pushplan_core::Clock;

/// Wall-clock time source for real planning runs.
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
