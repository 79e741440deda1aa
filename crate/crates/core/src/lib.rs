//! Planning core for planar object retrieval in clutter.
//!
//! The workspace is a rectangular shelf seen from above. Obstacles and the
//! target are disks; the robot clears a rectangular path region between the
//! gripper and the target by sweeping whole clusters of obstacles up or down.
//! Clusters are chosen at radii where the 0-dimensional persistence of the
//! obstacle centers is stable, and the sweep sequence is searched with UCT.
//!
//! The crate is `no_std` (with `alloc`); wall-clock time enters only through
//! the [`clock::Clock`] trait so planners stay deterministic under test.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod baselines;
pub mod clock;
pub mod geometry;
pub mod homology;
pub mod mcts;
pub mod path_region;
pub mod plan;
pub mod push_sim;
pub mod rng;

pub use clock::{Clock, FixedClock};
pub use geometry::{Configuration, Disk, GripperPose, Point, Rect, Workspace};
pub use homology::{MergeEvent, Partition, PersistenceDiagram};
pub use path_region::{ClusterSelection, PathRegion};
pub use plan::{Plan, PlanStats, PlanStep};
pub use push_sim::{Direction, PushAction, PushFailure, PushOutcome};
