//! SVG 1.1 rendering of scenes, path regions, and plans.
//!
//! Output bytes are a pure function of the inputs: floats are written with
//! Rust's default formatting and no timestamps or ids leak in.

use pushplan_core::geometry::{Configuration, Point, Workspace};
use pushplan_core::path_region::PathRegion;
use pushplan_core::plan::PlanStep;
use pushplan_core::push_sim::{self, PushFailure};

const SCALE: f64 = 1000.0;
const MARGIN: f64 = 20.0;

struct Canvas {
    body: String,
    width_y: f64,
}

impl Canvas {
    fn x(&self, x: f64) -> f64 {
        MARGIN + x * SCALE
    }

    fn y(&self, y: f64) -> f64 {
        // scene y grows away from the south wall; svg y grows downward
        MARGIN + (self.width_y - y) * SCALE
    }

    fn push(&mut self, s: &str) {
        self.body.push_str(s);
        self.body.push('\n');
    }
}

fn arrow(c: &mut Canvas, from: Point, to: Point) {
    c.push(&format!(
        "<line class=\"arrow\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
         stroke=\"#d62728\" stroke-width=\"4\" marker-end=\"url(#tip)\"/>",
        c.x(from.x),
        c.y(from.y),
        c.x(to.x),
        c.y(to.y)
    ));
}

fn centroid(config: &Configuration, indices: &[usize]) -> Point {
    let n = indices.len().max(1) as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &i in indices {
        sx += config.obstacles[i].center.x;
        sy += config.obstacles[i].center.y;
    }
    Point::new(sx / n, sy / n)
}

/// Draw the scene with an optional path-region overlay and one arrow per
/// plan step (sweeps are replayed so the arrow tracks the pushed cluster).
pub fn render_svg(
    ws: &Workspace,
    config: &Configuration,
    plan: Option<&[PlanStep]>,
    region: Option<&PathRegion>,
) -> String {
    let w = ws.depth_x * SCALE + 2.0 * MARGIN;
    let h = ws.width_y * SCALE + 2.0 * MARGIN;
    let mut c = Canvas { body: String::new(), width_y: ws.width_y };
    c.push(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    ));
    c.push(
        "<defs><marker id=\"tip\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" \
         orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#d62728\"/></marker></defs>",
    );
    // shelf walls; the x=0 edge is the open face, drawn dashed
    c.push(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#fafafa\" \
         stroke=\"none\"/>",
        MARGIN,
        MARGIN,
        ws.depth_x * SCALE,
        ws.width_y * SCALE
    ));
    let (x0, x1) = (MARGIN, MARGIN + ws.depth_x * SCALE);
    let (y0, y1) = (MARGIN, MARGIN + ws.width_y * SCALE);
    for (ax, ay, bx, by) in
        [(x0, y0, x1, y0), (x1, y0, x1, y1), (x0, y1, x1, y1)]
    {
        c.push(&format!(
            "<line x1=\"{ax}\" y1=\"{ay}\" x2=\"{bx}\" y2=\"{by}\" stroke=\"#333\" \
             stroke-width=\"5\"/>"
        ));
    }
    c.push(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"#999\" \
         stroke-width=\"2\" stroke-dasharray=\"10 8\"/>"
    ));

    if let Some(region) = region {
        let r = &region.rect;
        let corners = [
            Point::new(r.x_min, r.y_min),
            Point::new(r.x_max, r.y_min),
            Point::new(r.x_max, r.y_max),
            Point::new(r.x_min, r.y_max),
        ];
        let pts: Vec<String> = corners
            .iter()
            .map(|&p| {
                let q = region.from_frame(p);
                format!("{},{}", c.x(q.x), c.y(q.y))
            })
            .collect();
        c.push(&format!(
            "<polygon points=\"{}\" fill=\"#1f77b4\" fill-opacity=\"0.15\" \
             stroke=\"#1f77b4\" stroke-width=\"1\"/>",
            pts.join(" ")
        ));
    }

    for d in &config.obstacles {
        c.push(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#8c8c8c\" stroke=\"#333\" \
             stroke-width=\"1.5\"/>",
            c.x(d.center.x),
            c.y(d.center.y),
            d.radius * SCALE
        ));
    }
    c.push(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#2ca02c\" stroke=\"#145214\" \
         stroke-width=\"2\"/>",
        c.x(config.target.center.x),
        c.y(config.target.center.y),
        config.target.radius * SCALE
    ));
    c.push(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"6\" fill=\"#1f77b4\"/>",
        c.x(config.gripper.position.x),
        c.y(config.gripper.position.y)
    ));

    if let Some(steps) = plan {
        let mut current = config.clone();
        for step in steps {
            match step {
                PlanStep::Sweep(a) => match push_sim::simulate_push(&current, ws, *a) {
                    Ok(out) => {
                        let from = centroid(&current, &out.moved_indices);
                        let to = centroid(&out.next, &out.moved_indices);
                        arrow(&mut c, from, to);
                        current = out.next;
                    }
                    Err(PushFailure::EmptyRegion { .. }) => {
                        let p = config.target.center;
                        arrow(&mut c, p, Point::new(p.x, p.y + 0.02 * a.direction.sign()));
                    }
                    Err(_) => {
                        let p = config.target.center;
                        arrow(&mut c, p, Point::new(p.x, p.y + 0.02 * a.direction.sign()));
                    }
                },
                PlanStep::Line { obstacle, goal } => {
                    let from = current
                        .obstacles
                        .get(*obstacle)
                        .map(|d| d.center)
                        .unwrap_or(config.target.center);
                    arrow(&mut c, from, *goal);
                    if let Ok(out) = push_sim::push_to_goal(&current, ws, *obstacle, *goal) {
                        current = out.next;
                    }
                }
            }
        }
    }

    c.push("</svg>");
    c.body
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{generate_scene, SceneSpec};
    use pushplan_core::geometry::{Disk, GripperPose};
    use pushplan_core::path_region::compute_path_region;
    use pushplan_core::push_sim::{Direction, PushAction};

    #[test]
    fn empty_scene_renders_walls_only() {
        let ws = Workspace { depth_x: 0.8, width_y: 0.7, arm_width: 0.16, gripper_width: 0.05 };
        let config = Configuration {
            obstacles: Vec::new(),
            target: Disk::new(0.7, 0.35, 0.035),
            gripper: GripperPose { position: Point::new(0.0, 0.35), heading: 0.0 },
        };
        let svg = render_svg(&ws, &config, None, None);
        assert!(svg.starts_with("<svg"));
        assert!(!svg.contains("arrow"));
        assert_eq!(svg.matches("<line").count(), 4);
    }

    #[test]
    fn two_action_plan_gets_two_arrows() {
        let (ws, config) = generate_scene(&SceneSpec::standard(1)).unwrap();
        let steps = [
            PlanStep::Sweep(PushAction { radius: 0.05, direction: Direction::Up }),
            PlanStep::Sweep(PushAction { radius: 0.05, direction: Direction::Down }),
        ];
        let region = compute_path_region(&config, &ws).unwrap();
        let svg = render_svg(&ws, &config, Some(&steps), Some(&region));
        assert_eq!(svg.matches("class=\"arrow\"").count(), 2);
        assert!(svg.contains("<polygon"));
    }

    #[test]
    fn output_is_deterministic() {
        let (ws, config) = generate_scene(&SceneSpec::standard(2)).unwrap();
        let a = render_svg(&ws, &config, None, None);
        let b = render_svg(&ws, &config, None, None);
        assert_eq!(a, b);
    }
}
