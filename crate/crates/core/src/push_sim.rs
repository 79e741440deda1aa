//! Deterministic quasi-static simulation of rectangular sweep pushes, the
//! goal predicate, sensing-noise injection, and action enumeration.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geometry::{
    disk_rect_intersect, is_feasible, Configuration, Disk, Point, Rect, Workspace, EPS_OVERLAP,
};
use crate::homology;
use crate::path_region::{self, ClusterSelection, PathRegion, RegionError};
use crate::rng;

/// Clearance kept between the gripper front and pushed disks, and between a
/// pushed disk and the region boundary it must clear.
pub const CLEARANCE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

/// A cluster sweep: pick the closest component at `radius` and sweep it out
/// of the path region along `direction`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PushAction {
    pub radius: f64,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PushOutcome {
    pub next: Configuration,
    pub moved_indices: Vec<usize>,
    /// All cluster members ended outside the path region rectangle.
    pub cleared_component: bool,
    /// Fixpoint passes used by the contact resolution (bounded by the number
    /// of obstacles).
    pub resolution_passes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PushFailure {
    /// Some pushed disk would be forced through a wall.
    WallPress { detail: String },
    /// The gripper cannot be placed at the sweep start line.
    EntryBlocked { detail: String },
    /// The target would be contacted.
    TargetDisturbed { detail: String },
    /// No obstacle intersects the path region (or no region exists).
    EmptyRegion { detail: String },
}

impl core::fmt::Display for PushFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PushFailure::WallPress { detail } => write!(f, "wall press: {detail}"),
            PushFailure::EntryBlocked { detail } => write!(f, "entry blocked: {detail}"),
            PushFailure::TargetDisturbed { detail } => write!(f, "target disturbed: {detail}"),
            PushFailure::EmptyRegion { detail } => write!(f, "empty region: {detail}"),
        }
    }
}

/// Slack added to the clustering radius when a sweep picks its cluster.
/// For a persistent radius r no component merges in (r, r + 0.015], so the
/// selected cluster is the same one the diagram reported; off the nominal
/// configuration (replays of a fixed plan on a perturbed scene) the slack
/// keeps marginally linked clusters together instead of splitting them at
/// the exact merge distance.
pub const MERGE_SLACK: f64 = 0.015;

/// Sweep the closest cluster at `a.radius` out of the path region.
pub fn simulate_push(
    config: &Configuration,
    ws: &Workspace,
    a: PushAction,
) -> Result<PushOutcome, PushFailure> {
    let region = path_region::compute_path_region(config, ws).map_err(|e| {
        PushFailure::EmptyRegion { detail: format!("{e}") }
    })?;
    let cluster = path_region::closest_component(config, &region, a.radius + MERGE_SLACK)
        .map_err(|e| PushFailure::EmptyRegion { detail: format!("{e}") })?;
    sweep_cluster(config, ws, &region, &cluster, a.direction)
}

/// Sweep a given cluster along `direction`. Exposed separately so planners
/// that fix the region or the cluster (one-object-at-a-time) reuse the same
/// contact model.
pub fn sweep_cluster(
    config: &Configuration,
    ws: &Workspace,
    region: &PathRegion,
    cluster: &ClusterSelection,
    direction: Direction,
) -> Result<PushOutcome, PushFailure> {
    let sign = direction.sign();
    let h = ws.gripper_width;
    let b = cluster.bounding_rect.inflate(CLEARANCE);
    let corridor = (b.x_min, b.x_max);

    // Start line just outside the expanded box on the trailing side; the
    // front advances to the region boundary so every member fully exits.
    let (start_center, front_end) = match direction {
        Direction::Up => (b.y_min - h / 2.0 - CLEARANCE, region.rect.y_max),
        Direction::Down => (b.y_max + h / 2.0 + CLEARANCE, region.rect.y_min),
    };

    // region-frame positions
    let centers: Vec<Point> =
        config.obstacles.iter().map(|d| region.to_frame(d.center)).collect();
    let target_c = region.to_frame(config.target.center);

    // entry check: gripper rectangle at the start line
    let entry = Rect::new(corridor.0, start_center - h / 2.0, corridor.1, start_center + h / 2.0);
    if !rect_inside_walls(&entry, region, ws) {
        return Err(PushFailure::EntryBlocked {
            detail: String::from("start pose outside workspace walls"),
        });
    }
    for (i, c) in centers.iter().enumerate() {
        if disk_rect_intersect(&Disk { center: *c, radius: config.obstacles[i].radius }, &entry) {
            return Err(PushFailure::EntryBlocked { detail: format!("obstacle {i} at start line") });
        }
    }
    if disk_rect_intersect(&Disk { center: target_c, radius: config.target.radius }, &entry) {
        return Err(PushFailure::EntryBlocked { detail: String::from("target at start line") });
    }

    // full swept rectangle of the gripper
    let swept = match direction {
        Direction::Up => Rect::new(corridor.0, start_center - h / 2.0, corridor.1, front_end),
        Direction::Down => Rect::new(corridor.0, front_end, corridor.1, start_center + h / 2.0),
    };
    if disk_rect_intersect(&Disk { center: target_c, radius: config.target.radius }, &swept) {
        return Err(PushFailure::TargetDisturbed { detail: String::from("target in sweep path") });
    }

    // push resolution to fixpoint; motion is monotone along the sweep
    let n = config.obstacles.len();
    let mut ys: Vec<f64> = centers.iter().map(|c| c.y).collect();
    let mut moved = alloc::vec![false; n];
    let mut passes = 0usize;
    loop {
        let mut changed = false;
        for i in 0..n {
            let r = config.obstacles[i].radius;
            let d = Disk { center: Point::new(centers[i].x, ys[i]), radius: r };
            if disk_rect_intersect(&d, &swept) {
                let required = front_end + sign * (CLEARANCE + r);
                if sign * (required - ys[i]) > 1e-12 {
                    ys[i] = required;
                    moved[i] = true;
                    changed = true;
                }
            }
        }
        for i in 0..n {
            if !moved[i] {
                continue;
            }
            for j in 0..n {
                if j == i {
                    continue;
                }
                let (ri, rj) = (config.obstacles[i].radius, config.obstacles[j].radius);
                let dx = centers[j].x - centers[i].x;
                let dy = ys[j] - ys[i];
                let sum = ri + rj;
                if dx * dx + dy * dy < sum * sum - 1e-12 {
                    // minimal translation of j along the sweep direction
                    let sep = libm::sqrt(sum * sum - dx * dx);
                    let required = ys[i] + sign * sep;
                    if sign * (required - ys[j]) > 1e-12 {
                        ys[j] = required;
                        moved[j] = true;
                        changed = true;
                    }
                }
            }
        }
        passes += 1;
        if !changed {
            break;
        }
        if passes > n + 2 {
            // monotone displacement makes this unreachable; bail rather than spin
            return Err(PushFailure::WallPress {
                detail: String::from("contact resolution did not converge"),
            });
        }
    }

    // target contact by any moved disk, checked over its straight path
    for i in 0..n {
        if !moved[i] {
            continue;
        }
        let r = config.obstacles[i].radius + config.target.radius;
        if segment_hits(centers[i].x, centers[i].y, ys[i], target_c, r) {
            return Err(PushFailure::TargetDisturbed { detail: format!("obstacle {i} hit target") });
        }
    }

    // wall check on final world-frame positions
    let mut next = config.clone();
    let mut moved_indices = Vec::new();
    for i in 0..n {
        if moved[i] {
            let world = region.from_frame(Point::new(centers[i].x, ys[i]));
            next.obstacles[i].center = world;
            moved_indices.push(i);
            if !ws.disk_in_bounds(&next.obstacles[i]) {
                return Err(PushFailure::WallPress { detail: format!("obstacle {i} into wall") });
            }
        }
    }

    let cleared = cluster.member_indices.iter().all(|&i| {
        let c = region.to_frame(next.obstacles[i].center);
        !disk_rect_intersect(&Disk { center: c, radius: next.obstacles[i].radius }, &region.rect)
    });
    debug_assert!(is_feasible(&next, ws));
    Ok(PushOutcome { next, moved_indices, cleared_component: cleared, resolution_passes: passes })
}

/// Straight-line push of one obstacle to a goal point, with the same chain
/// contact, wall, and target rules as the sweep model. Used by the
/// randomized baseline and by plan replay.
pub fn push_to_goal(
    config: &Configuration,
    ws: &Workspace,
    obstacle: usize,
    goal: Point,
) -> Result<PushOutcome, PushFailure> {
    let n = config.obstacles.len();
    if obstacle >= n {
        return Err(PushFailure::EmptyRegion { detail: format!("no obstacle {obstacle}") });
    }
    let start = config.obstacles[obstacle].center;
    let travel = start.distance(goal);
    if travel < 1e-12 {
        return Ok(PushOutcome {
            next: config.clone(),
            moved_indices: Vec::new(),
            cleared_component: true,
            resolution_passes: 0,
        });
    }
    let dir = Point::new((goal.x - start.x) / travel, (goal.y - start.y) / travel);

    let mut pos: Vec<Point> = config.obstacles.iter().map(|d| d.center).collect();
    let mut shift = alloc::vec![0.0f64; n];
    let mut moved = alloc::vec![false; n];
    shift[obstacle] = travel;
    moved[obstacle] = true;
    pos[obstacle] = goal;

    let mut passes = 0usize;
    loop {
        let mut changed = false;
        for i in 0..n {
            if !moved[i] {
                continue;
            }
            for j in 0..n {
                if j == i {
                    continue;
                }
                let sum = config.obstacles[i].radius + config.obstacles[j].radius;
                let ux = pos[j].x - pos[i].x;
                let uy = pos[j].y - pos[i].y;
                if ux * ux + uy * uy < sum * sum - 1e-12 {
                    // smallest t >= 0 with |u + t*dir| = sum
                    let along = ux * dir.x + uy * dir.y;
                    let disc = along * along - (ux * ux + uy * uy) + sum * sum;
                    let t = -along + libm::sqrt(disc.max(0.0));
                    if t > 1e-12 {
                        pos[j] = Point::new(pos[j].x + t * dir.x, pos[j].y + t * dir.y);
                        shift[j] += t;
                        moved[j] = true;
                        changed = true;
                    }
                }
            }
        }
        passes += 1;
        if !changed {
            break;
        }
        if passes > n + 2 {
            return Err(PushFailure::WallPress {
                detail: String::from("contact resolution did not converge"),
            });
        }
    }

    for i in 0..n {
        if !moved[i] {
            continue;
        }
        let r = config.obstacles[i].radius + config.target.radius;
        let from = config.obstacles[i].center;
        // path of disk i is the segment from its old to new position
        if point_segment_distance(config.target.center, from, pos[i]) < r - EPS_OVERLAP {
            return Err(PushFailure::TargetDisturbed { detail: format!("obstacle {i} hit target") });
        }
    }

    let mut next = config.clone();
    let mut moved_indices = Vec::new();
    for i in 0..n {
        if moved[i] {
            next.obstacles[i].center = pos[i];
            moved_indices.push(i);
            if !ws.disk_in_bounds(&next.obstacles[i]) {
                return Err(PushFailure::WallPress { detail: format!("obstacle {i} into wall") });
            }
        }
    }
    debug_assert!(is_feasible(&next, ws));
    Ok(PushOutcome {
        next,
        moved_indices,
        cleared_component: true,
        resolution_passes: passes,
    })
}

/// True iff the path region holds no obstacles, i.e. the target is
/// reachable. A configuration whose region cannot be constructed is not a
/// goal.
pub fn is_goal(config: &Configuration, ws: &Workspace) -> bool {
    match path_region::compute_path_region(config, ws) {
        Ok(region) => path_region::obstacles_in_region(config, &region).is_empty(),
        Err(_) => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoiseError {
    /// Rejection budget exhausted while keeping the noisy scene feasible.
    NoisyInfeasible,
}

impl core::fmt::Display for NoiseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NoiseError::NoisyInfeasible => write!(f, "could not keep noisy configuration feasible"),
        }
    }
}

/// Displace every obstacle and the target by an independent uniform draw
/// from the disk of radius `bound`, re-sampling each object until the scene
/// stays feasible. Deterministic for a given seed.
pub fn apply_noise(
    config: &Configuration,
    ws: &Workspace,
    bound: f64,
    seed: u64,
) -> Result<Configuration, NoiseError> {
    if bound == 0.0 {
        return Ok(config.clone());
    }
    let mut rng = rng::seeded(seed);
    let mut noisy = config.clone();
    let n = noisy.obstacles.len();
    for k in 0..=n {
        let original = if k < n { config.obstacles[k].center } else { config.target.center };
        let mut placed = false;
        for _ in 0..100 {
            let (dx, dy) = rng::in_disk(&mut rng, bound);
            let candidate = Point::new(original.x + dx, original.y + dy);
            if k < n {
                noisy.obstacles[k].center = candidate;
            } else {
                noisy.target.center = candidate;
            }
            if is_feasible(&noisy, ws) {
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(NoiseError::NoisyInfeasible);
        }
    }
    Ok(noisy)
}

/// All sweep actions available in the configuration: the persistent radii of
/// the in-region obstacle centers crossed with both directions, ascending
/// radius with up before down.
pub fn available_actions(
    config: &Configuration,
    ws: &Workspace,
    nu: f64,
    h: f64,
) -> Result<Vec<PushAction>, RegionError> {
    let region = path_region::compute_path_region(config, ws)
        .map_err(|_| RegionError::EmptyRegion)?;
    let in_region = path_region::obstacles_in_region(config, &region);
    if in_region.is_empty() {
        return Err(RegionError::EmptyRegion);
    }
    let centers: Vec<Point> =
        in_region.iter().map(|&i| region.to_frame(config.obstacles[i].center)).collect();
    let diagram = homology::persistence_diagram(&centers).expect("non-empty centers");
    let radii = homology::persistent_radii(&diagram, nu, h);
    let mut actions = Vec::with_capacity(radii.len() * 2);
    for r in radii {
        actions.push(PushAction { radius: r, direction: Direction::Up });
        actions.push(PushAction { radius: r, direction: Direction::Down });
    }
    Ok(actions)
}

// The open face (x = 0) is the entry side, so only the back wall and the
// two side walls constrain the gripper rectangle.
fn rect_inside_walls(rect: &Rect, region: &PathRegion, ws: &Workspace) -> bool {
    rect.corners().iter().all(|&c| {
        let w = region.from_frame(c);
        w.x <= ws.depth_x + 1e-9 && w.y >= -1e-9 && w.y <= ws.width_y + 1e-9
    })
}

/// Distance from disk path {x} x [y0, y1] (vertical segment) to `p` below
/// the combined radius `r`.
fn segment_hits(x: f64, y0: f64, y1: f64, p: Point, r: f64) -> bool {
    let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
    let qy = p.y.clamp(lo, hi);
    let dx = p.x - x;
    let dy = p.y - qy;
    dx * dx + dy * dy < r * r - EPS_OVERLAP
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len_sq = abx * abx + aby * aby;
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len_sq;
    let t = t.clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * abx, a.y + t * aby))
}
