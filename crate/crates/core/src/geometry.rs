//! Workspace, disk, and configuration types plus the feasibility predicates
//! everything downstream relies on.

use alloc::vec::Vec;

/// Absolute slack allowed on disk separation before two disks count as
/// overlapping. Pure float-noise guard, far below actuation scale.
pub const EPS_OVERLAP: f64 = 1e-9;

/// Planar point in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::sqrt(self.distance_sq(other))
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Axis-aligned rectangle, closed on all sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Rect { x_min, y_min, x_max, y_max }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Closest point of the rectangle to `p`.
    pub fn closest_point(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.x_min, self.x_max), p.y.clamp(self.y_min, self.y_max))
    }

    /// Grow by `d` on every side.
    pub fn inflate(&self, d: f64) -> Rect {
        Rect::new(self.x_min - d, self.y_min - d, self.x_max + d, self.y_max + d)
    }

    /// Intersection with `other`; extents may collapse to zero.
    pub fn clip_to(&self, other: &Rect) -> Rect {
        Rect::new(
            self.x_min.max(other.x_min),
            self.y_min.max(other.y_min),
            self.x_max.min(other.x_max).max(self.x_min.max(other.x_min)),
            self.y_max.min(other.y_max).max(self.y_min.max(other.y_min)),
        )
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_min, self.y_min),
            Point::new(self.x_max, self.y_min),
            Point::new(self.x_max, self.y_max),
            Point::new(self.x_min, self.y_max),
        ]
    }
}

/// Rectangular shelf seen from above. The open face is the x = 0 edge; the
/// south wall S is y = 0 and the north wall N is y = `width_y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Workspace {
    /// Extent along shelf depth, x in [0, depth_x].
    pub depth_x: f64,
    /// Extent between the side walls, y in [0, width_y].
    pub width_y: f64,
    /// Width of the arm; the path region spans this far on both sides of the
    /// target's y.
    pub arm_width: f64,
    /// Width of the gripper used as the sweep tool footprint.
    pub gripper_width: f64,
}

impl Workspace {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.depth_x > 0.0 && self.width_y > 0.0) {
            return Err(GeometryError::BadWorkspace);
        }
        if !(self.gripper_width > 0.0 && self.gripper_width < self.width_y) {
            return Err(GeometryError::BadWorkspace);
        }
        if !(self.arm_width > 0.0 && self.arm_width <= self.width_y) {
            return Err(GeometryError::BadWorkspace);
        }
        Ok(())
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0.0, 0.0, self.depth_x, self.width_y)
    }

    /// A disk center is in bounds when the disk pokes through no wall; the
    /// open face is exempt, so x may go down to 0 on the center.
    pub fn disk_in_bounds(&self, d: &Disk) -> bool {
        d.center.x >= -EPS_OVERLAP
            && d.center.x <= self.depth_x - d.radius + EPS_OVERLAP
            && d.center.y >= d.radius - EPS_OVERLAP
            && d.center.y <= self.width_y - d.radius + EPS_OVERLAP
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(x: f64, y: f64, radius: f64) -> Self {
        Disk { center: Point::new(x, y), radius }
    }

    /// Tight axis-aligned bounding box.
    pub fn bbox(&self) -> Rect {
        Rect::new(
            self.center.x - self.radius,
            self.center.y - self.radius,
            self.center.x + self.radius,
            self.center.y + self.radius,
        )
    }

    pub fn overlaps(&self, other: &Disk) -> bool {
        self.center.distance(other.center) < self.radius + other.radius - EPS_OVERLAP
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GripperPose {
    pub position: Point,
    pub heading: f64,
}

/// The planner's state: obstacle disks, the target disk, and the gripper.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub obstacles: Vec<Disk>,
    pub target: Disk,
    pub gripper: GripperPose,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryError {
    BadWorkspace,
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GeometryError::BadWorkspace => write!(f, "workspace dimensions are invalid"),
        }
    }
}

/// True iff no two disks overlap (slack [`EPS_OVERLAP`]), the target clears
/// every obstacle, every disk is inside the walls, and the gripper position
/// is inside the workspace.
pub fn is_feasible(config: &Configuration, ws: &Workspace) -> bool {
    if ws.validate().is_err() {
        return false;
    }
    if !ws.bounds().contains(config.gripper.position) {
        return false;
    }
    if !ws.disk_in_bounds(&config.target) {
        return false;
    }
    for (i, a) in config.obstacles.iter().enumerate() {
        if !ws.disk_in_bounds(a) {
            return false;
        }
        if a.overlaps(&config.target) {
            return false;
        }
        for b in &config.obstacles[i + 1..] {
            if a.overlaps(b) {
                return false;
            }
        }
    }
    true
}

/// Closed disk vs. closed rectangle intersection via the closest-point test.
pub fn disk_rect_intersect(d: &Disk, rect: &Rect) -> bool {
    let q = rect.closest_point(d.center);
    d.center.distance_sq(q) <= d.radius * d.radius
}

/// Planar rotation of `p` about `pivot` by `angle` (counter-clockwise).
pub fn rotate_about(p: Point, pivot: Point, angle: f64) -> Point {
    if angle == 0.0 {
        return p;
    }
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    let dx = p.x - pivot.x;
    let dy = p.y - pivot.y;
    Point::new(pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy)
}
