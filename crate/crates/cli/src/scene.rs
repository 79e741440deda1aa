//! Line-oriented scene files.
//!
//! Line 1: `workspace depth_x width_y arm_width gripper_width`. Then one
//! line per entity: `obstacle x y radius`, exactly one `target x y radius`,
//! exactly one `gripper x y heading`. `#` starts a comment. All numbers are
//! meters or radians, written with Rust's shortest round-trip formatting so
//! write/parse is lossless.

use std::fmt;

use pushplan_core::geometry::{is_feasible, Configuration, Disk, GripperPose, Point, Workspace};

#[derive(Clone, Debug, PartialEq)]
pub enum SceneError {
    Parse { line: usize, message: String },
    Infeasible(String),
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneError::Parse { line, message } => write!(f, "line {line}: {message}"),
            SceneError::Infeasible(m) => write!(f, "infeasible scene: {m}"),
        }
    }
}

impl std::error::Error for SceneError {}

fn parse_fields(line_no: usize, fields: &[&str], n: usize) -> Result<Vec<f64>, SceneError> {
    if fields.len() != n {
        return Err(SceneError::Parse {
            line: line_no,
            message: format!("expected {n} numeric fields, got {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|s| {
            s.parse::<f64>().map_err(|_| SceneError::Parse {
                line: line_no,
                message: format!("not a number: {s}"),
            })
        })
        .collect()
}

pub fn parse_scene(text: &str) -> Result<(Workspace, Configuration), SceneError> {
    let mut ws: Option<Workspace> = None;
    let mut obstacles = Vec::new();
    let mut target: Option<Disk> = None;
    let mut gripper: Option<GripperPose> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let keyword = it.next().unwrap();
        let rest: Vec<&str> = it.collect();
        match keyword {
            "workspace" => {
                if ws.is_some() {
                    return Err(SceneError::Parse {
                        line: line_no,
                        message: "duplicate workspace line".into(),
                    });
                }
                let v = parse_fields(line_no, &rest, 4)?;
                ws = Some(Workspace {
                    depth_x: v[0],
                    width_y: v[1],
                    arm_width: v[2],
                    gripper_width: v[3],
                });
            }
            "obstacle" => {
                let v = parse_fields(line_no, &rest, 3)?;
                obstacles.push(Disk::new(v[0], v[1], v[2]));
            }
            "target" => {
                if target.is_some() {
                    return Err(SceneError::Parse {
                        line: line_no,
                        message: "duplicate target line".into(),
                    });
                }
                let v = parse_fields(line_no, &rest, 3)?;
                target = Some(Disk::new(v[0], v[1], v[2]));
            }
            "gripper" => {
                if gripper.is_some() {
                    return Err(SceneError::Parse {
                        line: line_no,
                        message: "duplicate gripper line".into(),
                    });
                }
                let v = parse_fields(line_no, &rest, 3)?;
                gripper = Some(GripperPose { position: Point::new(v[0], v[1]), heading: v[2] });
            }
            other => {
                return Err(SceneError::Parse {
                    line: line_no,
                    message: format!("unknown keyword: {other}"),
                });
            }
        }
    }

    let ws = ws.ok_or(SceneError::Parse { line: 1, message: "missing workspace line".into() })?;
    let target =
        target.ok_or(SceneError::Parse { line: 1, message: "missing target line".into() })?;
    let gripper =
        gripper.ok_or(SceneError::Parse { line: 1, message: "missing gripper line".into() })?;

    if ws.validate().is_err() {
        return Err(SceneError::Infeasible("workspace dimensions out of range".into()));
    }
    let config = Configuration { obstacles, target, gripper };
    if !is_feasible(&config, &ws) {
        return Err(SceneError::Infeasible("objects overlap or protrude through walls".into()));
    }
    Ok((ws, config))
}

pub fn write_scene(ws: &Workspace, config: &Configuration) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "workspace {} {} {} {}\n",
        ws.depth_x, ws.width_y, ws.arm_width, ws.gripper_width
    ));
    for d in &config.obstacles {
        out.push_str(&format!("obstacle {} {} {}\n", d.center.x, d.center.y, d.radius));
    }
    out.push_str(&format!(
        "target {} {} {}\n",
        config.target.center.x, config.target.center.y, config.target.radius
    ));
    out.push_str(&format!(
        "gripper {} {} {}\n",
        config.gripper.position.x, config.gripper.position.y, config.gripper.heading
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Workspace, Configuration) {
        let ws = Workspace { depth_x: 0.8, width_y: 0.7, arm_width: 0.16, gripper_width: 0.05 };
        let config = Configuration {
            obstacles: vec![Disk::new(0.3, 0.3, 0.035), Disk::new(0.5, 0.42, 0.035)],
            target: Disk::new(0.7, 0.35, 0.035),
            gripper: GripperPose { position: Point::new(0.0, 0.35), heading: 0.0 },
        };
        (ws, config)
    }

    #[test]
    fn round_trip_is_identity() {
        let (ws, config) = sample();
        let text = write_scene(&ws, &config);
        let (ws2, config2) = parse_scene(&text).unwrap();
        assert_eq!(ws, ws2);
        assert_eq!(config, config2);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let (ws, config) = sample();
        let text = format!("# header\n\n{}# trailer\n", write_scene(&ws, &config));
        assert!(parse_scene(&text).is_ok());
    }

    #[test]
    fn missing_target_is_a_parse_error() {
        let text = "workspace 0.8 0.7 0.16 0.05\ngripper 0.0 0.35 0.0\n";
        assert!(matches!(parse_scene(text), Err(SceneError::Parse { .. })));
    }

    #[test]
    fn overlapping_disks_are_infeasible_not_parse() {
        let text = "workspace 0.8 0.7 0.16 0.05\n\
                    obstacle 0.3 0.3 0.035\n\
                    obstacle 0.3 0.36 0.035\n\
                    target 0.7 0.35 0.035\n\
                    gripper 0.0 0.35 0.0\n";
        assert!(matches!(parse_scene(text), Err(SceneError::Infeasible(_))));
    }

    #[test]
    fn garbage_number_reports_its_line() {
        let text = "workspace 0.8 0.7 0.16 0.05\nobstacle 0.3 oops 0.035\n";
        match parse_scene(text) {
            Err(SceneError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
