//! The four comparison planners. All of them run on the same sweep
//! simulator and path-region machinery as the UCT planner, so differences in
//! the benchmark reflect the strategies and not the physics.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::clock::Clock;
use crate::geometry::{is_feasible, Configuration, Disk, Point, Workspace};
use crate::mcts::{PlanError, PlannerParams};
use crate::path_region::{self, ClusterSelection};
use crate::plan::{Plan, PlanStats, PlanStep};
use crate::push_sim::{self, Direction, PushAction};
use crate::rng;

fn check_start(config: &Configuration, ws: &Workspace) -> Result<(), PlanError> {
    if !is_feasible(config, ws) || push_sim::is_goal(config, ws) {
        return Err(PlanError::InvalidStart);
    }
    Ok(())
}

/// Greedy baseline: always act at the minimal persistent radius, trying the
/// up sweep before the down sweep.
pub fn plan_phia(
    config: &Configuration,
    ws: &Workspace,
    params: &PlannerParams,
    clock: &dyn Clock,
) -> Result<Plan, PlanError> {
    check_start(config, ws)?;
    let t0 = clock.seconds();
    let mut current = config.clone();
    let mut actions = Vec::new();
    let mut states = Vec::new();
    let mut sims = 0u64;
    while actions.len() < params.max_depth {
        if push_sim::is_goal(&current, ws) {
            let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
            return Ok(Plan { actions, states, success: true, stats });
        }
        if clock.seconds() - t0 > params.time_limit_s {
            break;
        }
        let available = push_sim::available_actions(&current, ws, params.nu, params.h)
            .map_err(|_| PlanError::InvalidStart)?;
        let min_radius = available[0].radius;
        let mut applied = false;
        for dir in [Direction::Up, Direction::Down] {
            sims += 1;
            let a = PushAction { radius: min_radius, direction: dir };
            if let Ok(out) = push_sim::simulate_push(&current, ws, a) {
                current = out.next;
                actions.push(PlanStep::Sweep(a));
                states.push(current.clone());
                applied = true;
                break;
            }
        }
        if !applied {
            break;
        }
    }
    let success = push_sim::is_goal(&current, ws);
    let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
    let plan = Plan { actions, states, success, stats };
    if plan.success {
        Ok(plan)
    } else {
        Err(PlanError::NoPlanFound(Box::new(plan)))
    }
}

/// Exhaustive baseline: builds the full breadth-first tree over all
/// persistent-radius actions down to the depth bound, then selects the
/// shallowest success, ties broken by the enumeration order (ascending
/// radius, up before down). The whole tree is built even after a success is
/// known; only the time budget cuts the construction short.
pub fn plan_phis(
    config: &Configuration,
    ws: &Workspace,
    params: &PlannerParams,
    clock: &dyn Clock,
) -> Result<Plan, PlanError> {
    check_start(config, ws)?;
    let t0 = clock.seconds();
    let mut sims = 0u64;
    let mut queue: VecDeque<(Configuration, Vec<PushAction>, Vec<Configuration>)> =
        VecDeque::new();
    queue.push_back((config.clone(), Vec::new(), Vec::new()));
    let mut best: Option<(Vec<PushAction>, Vec<Configuration>)> = None;
    'build: while let Some((state, actions, states)) = queue.pop_front() {
        if actions.len() >= params.max_depth {
            continue;
        }
        let available = match push_sim::available_actions(&state, ws, params.nu, params.h) {
            Ok(a) => a,
            Err(_) => continue,
        };
        for a in available {
            if clock.seconds() - t0 > params.time_limit_s {
                if best.is_none() {
                    let stats =
                        PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
                    return Err(PlanError::TimeBudgetExceeded(Box::new(Plan::empty(stats))));
                }
                // a success is already known to be the shallowest; keep it
                break 'build;
            }
            sims += 1;
            let out = match push_sim::simulate_push(&state, ws, a) {
                Ok(o) => o,
                Err(_) => continue,
            };
            let mut child_actions = actions.clone();
            child_actions.push(a);
            let mut child_states = states.clone();
            child_states.push(out.next.clone());
            if push_sim::is_goal(&out.next, ws) {
                if best.is_none() {
                    best = Some((child_actions, child_states));
                }
            } else {
                queue.push_back((out.next, child_actions, child_states));
            }
        }
    }
    let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
    match best {
        Some((actions, states)) => Ok(Plan {
            actions: actions.into_iter().map(PlanStep::Sweep).collect(),
            states,
            success: true,
            stats,
        }),
        None => Err(PlanError::NoPlanFound(Box::new(Plan::empty(stats)))),
    }
}

/// One-object-at-a-time baseline: push each obstacle of the initial path
/// region individually toward the nearer side of the band. The region is
/// never recomputed, so chain contacts can silently re-block the path.
pub fn plan_ooa(
    config: &Configuration,
    ws: &Workspace,
    params: &PlannerParams,
    clock: &dyn Clock,
) -> Result<Plan, PlanError> {
    check_start(config, ws)?;
    let t0 = clock.seconds();
    let region = path_region::compute_path_region(config, ws)
        .map_err(|_| PlanError::InvalidStart)?;
    let mut order = path_region::obstacles_in_region(config, &region);
    let gripper = config.gripper.position;
    order.sort_by(|&a, &b| {
        let da = gripper.distance(config.obstacles[a].center);
        let db = gripper.distance(config.obstacles[b].center);
        da.total_cmp(&db).then(a.cmp(&b))
    });
    let midline = (region.rect.y_min + region.rect.y_max) / 2.0;
    let mut current = config.clone();
    let mut actions = Vec::new();
    let mut states = Vec::new();
    let mut sims = 0u64;
    for &i in &order {
        let c = region.to_frame(current.obstacles[i].center);
        let preferred = if c.y > midline { Direction::Up } else { Direction::Down };
        let mut applied = false;
        for dir in [preferred, opposite(preferred)] {
            sims += 1;
            let disk = current.obstacles[i];
            let frame_disk =
                Disk { center: region.to_frame(disk.center), radius: disk.radius };
            let cluster = ClusterSelection {
                member_indices: alloc::vec![i],
                bounding_rect: frame_disk.bbox(),
                radius_used: params.h,
            };
            if let Ok(out) = push_sim::sweep_cluster(&current, ws, &region, &cluster, dir) {
                current = out.next;
                actions.push(PlanStep::Sweep(PushAction { radius: params.h, direction: dir }));
                states.push(current.clone());
                applied = true;
                break;
            }
        }
        if !applied {
            let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
            let plan = Plan { actions, states, success: false, stats };
            return Err(PlanError::NoPlanFound(Box::new(plan)));
        }
    }
    let success = push_sim::is_goal(&current, ws);
    let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
    let plan = Plan { actions, states, success, stats };
    if plan.success {
        Ok(plan)
    } else {
        Err(PlanError::NoPlanFound(Box::new(plan)))
    }
}

fn opposite(d: Direction) -> Direction {
    match d {
        Direction::Up => Direction::Down,
        Direction::Down => Direction::Up,
    }
}

const GOAL_SAMPLES: usize = 50;
const PUSH_RETRIES: usize = 5;

/// Randomized baseline: push each initially blocking obstacle in a straight
/// line to a sampled goal outside the initial path region.
pub fn plan_grtc(
    config: &Configuration,
    ws: &Workspace,
    params: &PlannerParams,
    clock: &dyn Clock,
    seed: u64,
) -> Result<Plan, PlanError> {
    check_start(config, ws)?;
    let t0 = clock.seconds();
    let region = path_region::compute_path_region(config, ws)
        .map_err(|_| PlanError::InvalidStart)?;
    let mut order = path_region::obstacles_in_region(config, &region);
    let mut rng = rng::seeded(seed);
    rng::shuffle(&mut rng, &mut order);
    let mut current = config.clone();
    let mut actions = Vec::new();
    let mut states = Vec::new();
    let mut sims = 0u64;
    for &i in &order {
        let mut applied = false;
        'retries: for _ in 0..PUSH_RETRIES {
            if clock.seconds() - t0 > params.time_limit_s {
                let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
                return Err(PlanError::TimeBudgetExceeded(Box::new(Plan {
                    actions,
                    states,
                    success: false,
                    stats,
                })));
            }
            let radius = current.obstacles[i].radius;
            let goal = match sample_goal(&mut rng, &current, ws, &region, i, radius) {
                Some(g) => g,
                None => continue 'retries,
            };
            sims += 1;
            if let Ok(out) = push_sim::push_to_goal(&current, ws, i, goal) {
                current = out.next;
                actions.push(PlanStep::Line { obstacle: i, goal });
                states.push(current.clone());
                applied = true;
                break 'retries;
            }
        }
        if !applied {
            let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
            let plan = Plan { actions, states, success: false, stats };
            return Err(PlanError::NoPlanFound(Box::new(plan)));
        }
    }
    let success = push_sim::is_goal(&current, ws);
    let stats = PlanStats { iterations: sims, seconds: clock.seconds() - t0 };
    let plan = Plan { actions, states, success, stats };
    if plan.success {
        Ok(plan)
    } else {
        Err(PlanError::NoPlanFound(Box::new(plan)))
    }
}

fn sample_goal(
    rng: &mut rng::ChaCha8Rng,
    config: &Configuration,
    ws: &Workspace,
    region: &path_region::PathRegion,
    obstacle: usize,
    radius: f64,
) -> Option<Point> {
    for _ in 0..GOAL_SAMPLES {
        let x = rng::uniform_in(rng, 0.0, ws.depth_x - radius);
        let y = rng::uniform_in(rng, radius, ws.width_y - radius);
        let candidate = Disk::new(x, y, radius);
        let frame = Disk { center: region.to_frame(candidate.center), radius };
        if crate::geometry::disk_rect_intersect(&frame, &region.rect) {
            continue;
        }
        if candidate.overlaps(&config.target) {
            continue;
        }
        let clash = config
            .obstacles
            .iter()
            .enumerate()
            .any(|(j, d)| j != obstacle && candidate.overlaps(d));
        if !clash {
            return Some(candidate.center);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FixedClock;
    use crate::geometry::GripperPose;
    use crate::plan::replay_plan;
    use alloc::vec;

    fn ws() -> Workspace {
        Workspace { depth_x: 0.8, width_y: 0.7, arm_width: 0.16, gripper_width: 0.05 }
    }

    fn config(obstacles: Vec<Disk>) -> Configuration {
        Configuration {
            obstacles,
            target: Disk::new(0.6, 0.35, 0.035),
            gripper: GripperPose { position: Point::new(0.0, 0.35), heading: 0.0 },
        }
    }

    fn params() -> PlannerParams {
        PlannerParams::default()
    }

    #[test]
    fn phia_single_obstacle_one_action() {
        let c = config(vec![Disk::new(0.3, 0.35, 0.035)]);
        let plan = plan_phia(&c, &ws(), &params(), &FixedClock(0.0)).unwrap();
        assert!(plan.success);
        assert_eq!(plan.actions.len(), 1);
        match plan.actions[0] {
            PlanStep::Sweep(a) => assert!((a.radius - 0.05).abs() < 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn phia_fails_when_both_directions_press_walls() {
        // narrow shelf: any sweep forces the obstacle through a wall
        let w = Workspace { depth_x: 0.8, width_y: 0.26, arm_width: 0.13, gripper_width: 0.05 };
        let c = Configuration {
            obstacles: vec![Disk::new(0.3, 0.13, 0.035)],
            target: Disk::new(0.6, 0.13, 0.035),
            gripper: GripperPose { position: Point::new(0.0, 0.13), heading: 0.0 },
        };
        let err = plan_phia(&c, &w, &params(), &FixedClock(0.0)).unwrap_err();
        assert!(matches!(err, PlanError::NoPlanFound(_)), "{err:?}");
    }

    #[test]
    fn phis_depth_one_when_one_push_suffices() {
        let c = config(vec![Disk::new(0.3, 0.35, 0.035)]);
        let plan = plan_phis(&c, &ws(), &params(), &FixedClock(0.0)).unwrap();
        assert!(plan.success);
        assert_eq!(plan.actions.len(), 1);
    }

    #[test]
    fn phis_never_longer_than_phia() {
        let scenes = [
            vec![Disk::new(0.3, 0.30, 0.035), Disk::new(0.25, 0.42, 0.035)],
            vec![Disk::new(0.3, 0.35, 0.035), Disk::new(0.45, 0.28, 0.035)],
            vec![
                Disk::new(0.2, 0.32, 0.035),
                Disk::new(0.35, 0.40, 0.035),
                Disk::new(0.5, 0.30, 0.035),
            ],
        ];
        for obstacles in scenes {
            let c = config(obstacles);
            let phia = plan_phia(&c, &ws(), &params(), &FixedClock(0.0));
            let phis = plan_phis(&c, &ws(), &params(), &FixedClock(0.0));
            if let (Ok(a), Ok(s)) = (phia, phis) {
                assert!(s.actions.len() <= a.actions.len());
            }
        }
    }

    #[test]
    fn ooa_one_action_per_obstacle() {
        let c = config(vec![
            Disk::new(0.2, 0.30, 0.035),
            Disk::new(0.35, 0.42, 0.035),
            Disk::new(0.5, 0.30, 0.035),
        ]);
        let plan = plan_ooa(&c, &ws(), &params(), &FixedClock(0.0)).unwrap();
        assert!(plan.success);
        assert_eq!(plan.actions.len(), 3);
    }

    #[test]
    fn ooa_pushes_toward_nearer_wall() {
        // single obstacle above the band midline is pushed up
        let c = config(vec![Disk::new(0.3, 0.42, 0.035)]);
        let plan = plan_ooa(&c, &ws(), &params(), &FixedClock(0.0)).unwrap();
        match plan.actions[0] {
            PlanStep::Sweep(a) => assert_eq!(a.direction, Direction::Up),
            _ => panic!(),
        }
    }

    #[test]
    fn grtc_counts_one_action_per_blocking_obstacle() {
        let c = config(vec![Disk::new(0.2, 0.30, 0.035), Disk::new(0.4, 0.40, 0.035)]);
        let plan = plan_grtc(&c, &ws(), &params(), &FixedClock(0.0), 9).unwrap();
        assert!(plan.success);
        assert_eq!(plan.actions.len(), 2);
    }

    #[test]
    fn grtc_is_deterministic_per_seed() {
        let c = config(vec![Disk::new(0.2, 0.30, 0.035), Disk::new(0.4, 0.40, 0.035)]);
        let a = plan_grtc(&c, &ws(), &params(), &FixedClock(0.0), 4).unwrap();
        let b = plan_grtc(&c, &ws(), &params(), &FixedClock(0.0), 4).unwrap();
        assert_eq!(a.actions, b.actions);
    }

    #[test]
    fn successful_plans_replay() {
        let c = config(vec![Disk::new(0.2, 0.30, 0.035), Disk::new(0.4, 0.40, 0.035)]);
        for plan in [
            plan_phia(&c, &ws(), &params(), &FixedClock(0.0)).unwrap(),
            plan_phis(&c, &ws(), &params(), &FixedClock(0.0)).unwrap(),
            plan_grtc(&c, &ws(), &params(), &FixedClock(0.0), 1).unwrap(),
        ] {
            let end = replay_plan(&c, &ws(), &plan.actions).unwrap();
            assert!(push_sim::is_goal(&end, &ws()));
        }
    }
}
