//! Plan text format.
//!
//! One line per action, then a summary line:
//!
//! ```text
//! push r=0.062 dir=up
//! push obstacle=3 gx=0.41 gy=0.6
//! success=true actions=2 iters=57 seconds=0.004
//! ```
//!
//! Cluster sweeps carry the radius and direction; straight-line pushes carry
//! the obstacle index and goal point.

use std::fmt;

use pushplan_core::geometry::Point;
use pushplan_core::push_sim::{Direction, PushAction};
use pushplan_core::{Plan, PlanStep};

pub fn format_step(step: &PlanStep) -> String {
    match step {
        PlanStep::Sweep(a) => {
            format!("push r={} dir={}", a.radius, a.direction.as_str())
        }
        PlanStep::Line { obstacle, goal } => {
            format!("push obstacle={} gx={} gy={}", obstacle, goal.x, goal.y)
        }
    }
}

pub fn format_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for step in &plan.actions {
        out.push_str(&format_step(step));
        out.push('\n');
    }
    out.push_str(&format!(
        "success={} actions={} iters={} seconds={}\n",
        plan.success,
        plan.actions.len(),
        plan.stats.iterations,
        plan.stats.seconds
    ));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedPlan {
    pub steps: Vec<PlanStep>,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for PlanParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for PlanParseError {}

fn field<'a>(line_no: usize, token: &'a str, key: &str) -> Result<&'a str, PlanParseError> {
    token.strip_prefix(key).and_then(|t| t.strip_prefix('=')).ok_or_else(|| PlanParseError {
        line: line_no,
        message: format!("expected {key}=<value>, got {token}"),
    })
}

fn number(line_no: usize, text: &str) -> Result<f64, PlanParseError> {
    text.parse()
        .map_err(|_| PlanParseError { line: line_no, message: format!("not a number: {text}") })
}

pub fn parse_plan(text: &str) -> Result<ParsedPlan, PlanParseError> {
    let mut steps = Vec::new();
    let mut success = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] == "push" {
            if success.is_some() {
                return Err(PlanParseError {
                    line: line_no,
                    message: "action after summary line".into(),
                });
            }
            match tokens.get(1) {
                Some(t) if t.starts_with("r=") => {
                    if tokens.len() != 3 {
                        return Err(PlanParseError {
                            line: line_no,
                            message: "sweep takes r= and dir=".into(),
                        });
                    }
                    let radius = number(line_no, field(line_no, tokens[1], "r")?)?;
                    let direction = match field(line_no, tokens[2], "dir")? {
                        "up" => Direction::Up,
                        "down" => Direction::Down,
                        other => {
                            return Err(PlanParseError {
                                line: line_no,
                                message: format!("unknown direction: {other}"),
                            });
                        }
                    };
                    steps.push(PlanStep::Sweep(PushAction { radius, direction }));
                }
                Some(t) if t.starts_with("obstacle=") => {
                    if tokens.len() != 4 {
                        return Err(PlanParseError {
                            line: line_no,
                            message: "line push takes obstacle=, gx=, gy=".into(),
                        });
                    }
                    let obstacle: usize = field(line_no, tokens[1], "obstacle")?
                        .parse()
                        .map_err(|_| PlanParseError {
                            line: line_no,
                            message: "obstacle index must be an integer".into(),
                        })?;
                    let gx = number(line_no, field(line_no, tokens[2], "gx")?)?;
                    let gy = number(line_no, field(line_no, tokens[3], "gy")?)?;
                    steps.push(PlanStep::Line { obstacle, goal: Point::new(gx, gy) });
                }
                _ => {
                    return Err(PlanParseError {
                        line: line_no,
                        message: "push needs r= or obstacle=".into(),
                    });
                }
            }
        } else if tokens[0].starts_with("success=") {
            let v = field(line_no, tokens[0], "success")?;
            success = Some(v.parse().map_err(|_| PlanParseError {
                line: line_no,
                message: format!("success must be true or false, got {v}"),
            })?);
        } else {
            return Err(PlanParseError {
                line: line_no,
                message: format!("unknown line: {line}"),
            });
        }
    }
    let success = success.ok_or(PlanParseError { line: 1, message: "missing summary line".into() })?;
    Ok(ParsedPlan { steps, success })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pushplan_core::PlanStats;

    #[test]
    fn round_trip_mixed_plan() {
        let plan = Plan {
            actions: vec![
                PlanStep::Sweep(PushAction { radius: 0.062, direction: Direction::Up }),
                PlanStep::Line { obstacle: 3, goal: Point::new(0.41, 0.6) },
            ],
            states: Vec::new(),
            success: true,
            stats: PlanStats { iterations: 57, seconds: 0.004 },
        };
        let text = format_plan(&plan);
        let parsed = parse_plan(&text).unwrap();
        assert_eq!(parsed.steps, plan.actions);
        assert!(parsed.success);
    }

    #[test]
    fn summary_line_is_required() {
        assert!(parse_plan("push r=0.05 dir=up\n").is_err());
    }

    #[test]
    fn bad_direction_is_rejected() {
        assert!(parse_plan("push r=0.05 dir=left\nsuccess=true actions=1 iters=0 seconds=0\n")
            .is_err());
    }
}
