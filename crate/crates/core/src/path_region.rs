//! The path region between gripper and target, the obstacles blocking it,
//! and the closest cluster the arm should sweep next.

use alloc::vec::Vec;

use crate::geometry::{
    disk_rect_intersect, rotate_about, Configuration, Disk, Point, Rect, Workspace,
};
use crate::homology::{self, Partition};

/// Rectangle the arm must clear, possibly expressed in a frame rotated by
/// the incidence angle `phi` about the target center. With `phi == 0` the
/// frame maps are exact identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathRegion {
    pub rect: Rect,
    pub phi: f64,
    pub pivot: Point,
}

impl PathRegion {
    /// World point into the region frame.
    pub fn to_frame(&self, p: Point) -> Point {
        rotate_about(p, self.pivot, -self.phi)
    }

    /// Region-frame point back into the world.
    pub fn from_frame(&self, p: Point) -> Point {
        rotate_about(p, self.pivot, self.phi)
    }
}

/// Cluster of in-region obstacles selected for a sweep. Indices are global
/// obstacle indices; the bounding rectangle is tight over the member disks
/// in the region frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSelection {
    pub member_indices: Vec<usize>,
    pub bounding_rect: Rect,
    pub radius_used: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionError {
    /// No incidence angle in the search grid makes the band fit the walls.
    NoValidRegion,
    /// No obstacle intersects the path region.
    EmptyRegion,
}

impl core::fmt::Display for RegionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RegionError::NoValidRegion => write!(f, "no incidence angle fits the path region"),
            RegionError::EmptyRegion => write!(f, "no obstacles in the path region"),
        }
    }
}

const EPS: f64 = 1e-9;
const DEG: f64 = core::f64::consts::PI / 180.0;

fn band_rect(gripper_x: f64, target: Point, arm_width: f64) -> Rect {
    Rect::new(
        gripper_x.min(target.x),
        target.y - arm_width,
        gripper_x.max(target.x),
        target.y + arm_width,
    )
}

/// Path region of the configuration: the rectangle between the gripper's x
/// and the target, spanning `arm_width` on both sides of the target's y.
///
/// When that band does not fit between the walls, the smallest-magnitude
/// incidence angle from {+5°, -5°, +10°, ..., ±45°} is searched. For each
/// candidate the band is expressed in the frame rotated by that angle about
/// the target center and its y-extent is clipped against the walls; the
/// first angle whose clipped band keeps a height of at least `arm_width`
/// while still containing the target row wins. The returned rectangle then
/// lives in the rotated frame and all consumers must map coordinates
/// through [`PathRegion::to_frame`].
pub fn compute_path_region(
    config: &Configuration,
    ws: &Workspace,
) -> Result<PathRegion, RegionError> {
    let target = config.target.center;
    let band = band_rect(config.gripper.position.x, target, ws.arm_width);
    if band.y_min >= -EPS && band.y_max <= ws.width_y + EPS {
        return Ok(PathRegion { rect: band.clip_to(&ws.bounds()), phi: 0.0, pivot: target });
    }
    for step in 1..=9 {
        for sign in [1.0, -1.0] {
            let phi = sign * (step as f64) * 5.0 * DEG;
            if let Some(region) = rotated_region(config, ws, phi) {
                return Ok(region);
            }
        }
    }
    Err(RegionError::NoValidRegion)
}

/// Band in the frame rotated by `phi` about the target, with its y-extent
/// clipped so every corner maps inside the walls. `None` when the clipped
/// band is thinner than the arm or loses the target row.
fn rotated_region(config: &Configuration, ws: &Workspace, phi: f64) -> Option<PathRegion> {
    let pivot = config.target.center;
    let probe = PathRegion { rect: ws.bounds(), phi, pivot };
    let g = probe.to_frame(config.gripper.position);
    let x_min = g.x.min(pivot.x).clamp(0.0, ws.depth_x);
    let x_max = g.x.max(pivot.x).clamp(0.0, ws.depth_x);
    let (s, c) = (libm::sin(phi), libm::cos(phi));
    // world coords of a frame point (x, y) are linear in dy = y - pivot.y:
    //   wx = px + c*dx - s*dy,  wy = py + s*dx + c*dy
    // so wall containment of the corners becomes an interval for dy.
    let mut dy_lo = -ws.arm_width;
    let mut dy_hi = ws.arm_width;
    for dx in [x_min - pivot.x, x_max - pivot.x] {
        // 0 <= wy <= width_y
        dy_lo = dy_lo.max((-pivot.y - s * dx) / c);
        dy_hi = dy_hi.min((ws.width_y - pivot.y - s * dx) / c);
        // 0 <= wx <= depth_x
        if s > EPS {
            dy_lo = dy_lo.max((pivot.x + c * dx - ws.depth_x) / s);
            dy_hi = dy_hi.min((pivot.x + c * dx) / s);
        } else if s < -EPS {
            dy_lo = dy_lo.max((pivot.x + c * dx) / s);
            dy_hi = dy_hi.min((pivot.x + c * dx - ws.depth_x) / s);
        }
    }
    if dy_hi - dy_lo < ws.arm_width - EPS || dy_lo > EPS || dy_hi < -EPS {
        return None;
    }
    let rect = Rect::new(x_min, pivot.y + dy_lo, x_max, pivot.y + dy_hi);
    Some(PathRegion { rect, phi, pivot })
}

/// Indices of obstacles whose disk intersects the region rectangle, in
/// ascending index order. The target is never included.
pub fn obstacles_in_region(config: &Configuration, region: &PathRegion) -> Vec<usize> {
    config
        .obstacles
        .iter()
        .enumerate()
        .filter(|(_, d)| {
            let c = region.to_frame(d.center);
            disk_rect_intersect(&Disk { center: c, radius: d.radius }, &region.rect)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Partition of the in-region obstacles (given by global indices) at cluster
/// radius `r`, computed over their region-frame centers.
pub fn in_region_components(
    config: &Configuration,
    region: &PathRegion,
    indices: &[usize],
    r: f64,
) -> Partition {
    let centers: Vec<Point> =
        indices.iter().map(|&i| region.to_frame(config.obstacles[i].center)).collect();
    homology::components_at(&centers, r)
}

/// The cluster of in-region obstacles closest to the gripper at radius `r`,
/// with its tight bounding rectangle in the region frame.
pub fn closest_component(
    config: &Configuration,
    region: &PathRegion,
    r: f64,
) -> Result<ClusterSelection, RegionError> {
    let in_region = obstacles_in_region(config, region);
    if in_region.is_empty() {
        return Err(RegionError::EmptyRegion);
    }
    let partition = in_region_components(config, region, &in_region, r);
    let gripper = region.to_frame(config.gripper.position);
    let mut best: Option<(f64, usize, usize)> = None; // (dist, min_global_idx, block)
    for (b, block) in partition.blocks.iter().enumerate() {
        let mut dist = f64::INFINITY;
        let mut min_idx = usize::MAX;
        for &local in block {
            let global = in_region[local];
            let c = region.to_frame(config.obstacles[global].center);
            dist = dist.min(gripper.distance(c));
            min_idx = min_idx.min(global);
        }
        let better = match best {
            None => true,
            Some((bd, bi, _)) => dist < bd || (dist == bd && min_idx < bi),
        };
        if better {
            best = Some((dist, min_idx, b));
        }
    }
    let (_, _, block_idx) = best.expect("non-empty partition");
    let mut members: Vec<usize> =
        partition.blocks[block_idx].iter().map(|&l| in_region[l]).collect();
    members.sort_unstable();
    let mut rect: Option<Rect> = None;
    for &i in &members {
        let d = &config.obstacles[i];
        let b = Disk { center: region.to_frame(d.center), radius: d.radius }.bbox();
        rect = Some(match rect {
            None => b,
            Some(r) => Rect::new(
                r.x_min.min(b.x_min),
                r.y_min.min(b.y_min),
                r.x_max.max(b.x_max),
                r.y_max.max(b.y_max),
            ),
        });
    }
    Ok(ClusterSelection {
        member_indices: members,
        bounding_rect: rect.expect("members non-empty"),
        radius_used: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GripperPose;
    use alloc::vec;

    fn ws() -> Workspace {
        Workspace { depth_x: 0.8, width_y: 0.7, arm_width: 0.16, gripper_width: 0.05 }
    }

    fn config_at(target_y: f64, obstacles: Vec<Disk>) -> Configuration {
        Configuration {
            obstacles,
            target: Disk::new(0.6, target_y, 0.035),
            gripper: GripperPose { position: Point::new(0.0, 0.35), heading: 0.0 },
        }
    }

    #[test]
    fn straight_band() {
        let c = config_at(0.35, vec![]);
        let r = compute_path_region(&c, &ws()).unwrap();
        assert_eq!(r.phi, 0.0);
        assert!((r.rect.x_min - 0.0).abs() < 1e-12);
        assert!((r.rect.x_max - 0.6).abs() < 1e-12);
        assert!((r.rect.y_min - 0.19).abs() < 1e-12);
        assert!((r.rect.y_max - 0.51).abs() < 1e-12);
    }

    #[test]
    fn band_exactly_spanning_walls_is_unrotated() {
        let mut w = ws();
        w.arm_width = 0.35;
        let c = config_at(0.35, vec![]);
        let r = compute_path_region(&c, &w).unwrap();
        assert_eq!(r.phi, 0.0);
    }

    #[test]
    fn target_near_wall_rotates_band() {
        let c = config_at(0.06, vec![]);
        let r = compute_path_region(&c, &ws()).unwrap();
        assert!(r.phi != 0.0);
        // fit verified by corner containment in world coordinates
        for corner in r.rect.corners() {
            let w = r.from_frame(corner);
            assert!(w.x >= -1e-9 && w.x <= 0.8 + 1e-9, "x {}", w.x);
            assert!(w.y >= -1e-9 && w.y <= 0.7 + 1e-9, "y {}", w.y);
        }
    }

    #[test]
    fn empty_obstacles_give_empty_region() {
        let c = config_at(0.35, vec![]);
        let r = compute_path_region(&c, &ws()).unwrap();
        assert!(obstacles_in_region(&c, &r).is_empty());
    }

    #[test]
    fn obstacle_outside_band_is_excluded() {
        let c = config_at(0.35, vec![Disk::new(0.3, 0.6, 0.035), Disk::new(0.3, 0.35, 0.035)]);
        let r = compute_path_region(&c, &ws()).unwrap();
        assert_eq!(obstacles_in_region(&c, &r), vec![1]);
    }

    #[test]
    fn membership_matches_per_disk_intersection() {
        // grid straddling the band
        let mut obstacles = Vec::new();
        for i in 0..7 {
            obstacles.push(Disk::new(0.1 + 0.05 * i as f64, 0.12 + 0.08 * i as f64, 0.03));
        }
        let c = config_at(0.35, obstacles.clone());
        let r = compute_path_region(&c, &ws()).unwrap();
        let got = obstacles_in_region(&c, &r);
        for (i, d) in obstacles.iter().enumerate() {
            assert_eq!(got.contains(&i), disk_rect_intersect(d, &r.rect), "obstacle {i}");
        }
    }

    #[test]
    fn singleton_cluster() {
        let c = config_at(0.35, vec![Disk::new(0.3, 0.35, 0.035)]);
        let r = compute_path_region(&c, &ws()).unwrap();
        let sel = closest_component(&c, &r, 0.05).unwrap();
        assert_eq!(sel.member_indices, vec![0]);
        let b = sel.bounding_rect;
        assert!((b.x_min - 0.265).abs() < 1e-12 && (b.x_max - 0.335).abs() < 1e-12);
    }

    #[test]
    fn closer_of_two_clusters_wins() {
        let c = config_at(
            0.35,
            vec![Disk::new(0.5, 0.35, 0.035), Disk::new(0.2, 0.35, 0.035)],
        );
        let r = compute_path_region(&c, &ws()).unwrap();
        let sel = closest_component(&c, &r, 0.05).unwrap();
        assert_eq!(sel.member_indices, vec![1]);
    }

    #[test]
    fn empty_region_is_an_error() {
        let c = config_at(0.35, vec![]);
        let r = compute_path_region(&c, &ws()).unwrap();
        assert_eq!(closest_component(&c, &r, 0.05), Err(RegionError::EmptyRegion));
    }

    #[test]
    fn two_cluster_partition_and_distance_rule() {
        // six obstacles forming two groups along x
        let group_a = [(0.15, 0.30), (0.18, 0.36), (0.21, 0.30)];
        let group_b = [(0.45, 0.40), (0.48, 0.34), (0.51, 0.40)];
        let obstacles: Vec<Disk> = group_a
            .iter()
            .chain(group_b.iter())
            .map(|&(x, y)| Disk::new(x, y, 0.02))
            .collect();
        let c = config_at(0.35, obstacles);
        let r = compute_path_region(&c, &ws()).unwrap();
        let sel = closest_component(&c, &r, 0.05).unwrap();
        assert_eq!(sel.member_indices, vec![0, 1, 2]);
        // at a radius beyond the largest death, everything is one cluster
        let sel_all = closest_component(&c, &r, 0.5).unwrap();
        assert_eq!(sel_all.member_indices, vec![0, 1, 2, 3, 4, 5]);
    }
}
