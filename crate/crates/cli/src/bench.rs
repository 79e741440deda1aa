//! Scene generation and the multi-planner benchmark harness.

use std::fmt;

use pushplan_core::baselines::{plan_grtc, plan_ooa, plan_phia, plan_phis};
use pushplan_core::geometry::{is_feasible, Configuration, Disk, GripperPose, Point, Workspace};
use pushplan_core::mcts::{plan_phim, PlanError, PlannerParams};
use pushplan_core::plan::replay_plan;
use pushplan_core::push_sim::{apply_noise, is_goal};
use pushplan_core::rng;
use pushplan_core::Plan;

use crate::WallClock;

/// Parameters of one generated scene.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneSpec {
    pub obstacle_count: usize,
    pub radius_min: f64,
    pub radius_max: f64,
    pub workspace: Workspace,
    pub seed: u64,
}

impl SceneSpec {
    /// The benchmark default: 7 obstacles of radius 0.035 m on a
    /// 0.8 m x 0.7 m shelf.
    pub fn standard(seed: u64) -> Self {
        SceneSpec {
            obstacle_count: 7,
            radius_min: 0.035,
            radius_max: 0.035,
            workspace: Workspace {
                depth_x: 0.8,
                width_y: 0.7,
                arm_width: 0.16,
                gripper_width: 0.05,
            },
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenerationError {
    /// Rejection sampling budget exhausted; the spec is too dense.
    GenerationFailed,
}

impl fmt::Display for GenerationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scene generation failed: rejection budget exhausted")
    }
}

impl std::error::Error for GenerationError {}

const PLACEMENT_TRIES: usize = 400;
/// Fraction of scenes built with the multi-scale ladder layout; the rest use
/// the single-clump layout.
const DEEP_FRACTION: f64 = 0.30;
/// Clearance kept between the path band and obstacles that are not meant to
/// block: survives a 0.03 m perturbation of both the obstacle and the target.
const BAND_SAFETY: f64 = 0.075;
/// Free depth wanted on each side of the band so swept clusters have
/// somewhere to go.
const EXIT_ROOM: f64 = 0.17;

fn place(
    rng: &mut rng::ChaCha8Rng,
    config: &mut Configuration,
    ws: &Workspace,
    x_range: (f64, f64),
    y_range: (f64, f64),
    radius: f64,
) -> bool {
    for _ in 0..PLACEMENT_TRIES {
        let d = Disk::new(
            rng::uniform_in(rng, x_range.0, x_range.1),
            rng::uniform_in(rng, y_range.0, y_range.1),
            radius,
        );
        config.obstacles.push(d);
        if is_feasible(config, ws) {
            return true;
        }
        config.obstacles.pop();
    }
    false
}

/// Seeded scene construction. Two layout families keep the benchmark
/// non-trivial without making noisy replays a lottery:
///
/// * clump (default): a tight obstacle pair straddles the gripper-to-target
///   band mid-depth; all remaining obstacles sit behind the target.
/// * ladder (a `DEEP_FRACTION` share of seeds, when the spec allows it):
///   clusters along the band whose pairwise gaps form several well-separated
///   merge scales, so planners face a full radius ladder.
pub fn generate_scene(spec: &SceneSpec) -> Result<(Workspace, Configuration), GenerationError> {
    let ws = spec.workspace;
    if ws.validate().is_err() || spec.radius_min <= 0.0 || spec.radius_max < spec.radius_min {
        return Err(GenerationError::GenerationFailed);
    }
    let mut rng = rng::seeded(spec.seed);
    let deep = spec.obstacle_count >= 5 && rng::uniform(&mut rng) < DEEP_FRACTION;
    if deep {
        // the ladder needs a roomy shelf; fall through when it does not fit
        if let Some(scene) = generate_ladder(spec, &mut rng) {
            return Ok(scene);
        }
    }
    generate_clump(spec, &mut rng)
}

fn generate_clump(
    spec: &SceneSpec,
    rng: &mut rng::ChaCha8Rng,
) -> Result<(Workspace, Configuration), GenerationError> {
    let ws = spec.workspace;
    let sample_radius = |rng: &mut rng::ChaCha8Rng| -> f64 {
        rng::uniform_in(rng, spec.radius_min, spec.radius_max)
    };
    let target_radius = sample_radius(rng);
    // keep exit room on both sides of the band when the shelf allows it
    let (mut y_lo, mut y_hi) =
        (ws.arm_width + EXIT_ROOM, ws.width_y - ws.arm_width - EXIT_ROOM);
    if y_lo >= y_hi {
        y_lo = ws.arm_width.max(target_radius);
        y_hi = (ws.width_y - y_lo).max(y_lo + 1e-6);
    }
    let tx_lo = ws.depth_x * 0.72;
    let tx_hi = (ws.depth_x * 0.77).min(ws.depth_x - target_radius).max(tx_lo + 1e-6);
    let target = Disk::new(
        rng::uniform_in(rng, tx_lo, tx_hi),
        rng::uniform_in(rng, y_lo, y_hi),
        target_radius,
    );
    let gripper = GripperPose { position: Point::new(0.0, target.center.y), heading: 0.0 };
    let mut config = Configuration { obstacles: Vec::new(), target, gripper };
    let (tx, ty) = (target.center.x, target.center.y);

    // blockers: a tight pair (or a single disk) straddling the band, short
    // of the target so its sweep corridor never reaches the target disk
    let forced = spec.obstacle_count.min(2);
    if forced == 1 {
        let r = sample_radius(rng);
        let x_hi = (tx - 0.14).max(0.14);
        if !place(rng, &mut config, &ws, (0.13, x_hi), (ty - 0.06, ty + 0.06), r) {
            return Err(GenerationError::GenerationFailed);
        }
    } else if forced == 2 {
        let mut ok = false;
        for _ in 0..PLACEMENT_TRIES {
            let r1 = sample_radius(rng);
            let r2 = sample_radius(rng);
            let base = Point::new(
                rng::uniform_in(rng, 0.13, (tx - 0.16).max(0.131)),
                ty + rng::uniform_in(rng, -0.05, 0.05),
            );
            let angle = rng::uniform_in(rng, 0.0, core::f64::consts::TAU);
            let link = rng::uniform_in(rng, r1 + r2 + 0.002, r1 + r2 + 0.012);
            let mate =
                Point::new(base.x + link * angle.cos(), base.y + link * angle.sin());
            if mate.x < 0.10 || mate.x > tx - 0.14 || (mate.y - ty).abs() > 0.105 {
                continue;
            }
            config.obstacles.push(Disk { center: base, radius: r1 });
            config.obstacles.push(Disk { center: mate, radius: r2 });
            if is_feasible(&config, &ws) {
                ok = true;
                break;
            }
            config.obstacles.pop();
            config.obstacles.pop();
        }
        if !ok {
            return Err(GenerationError::GenerationFailed);
        }
    }
    // the rest go behind the target (or far outside the band on shelves with
    // no room behind) so noisy replays do not conjure new blockers
    for _ in forced..spec.obstacle_count {
        let r = sample_radius(rng);
        let mut placed = false;
        for _ in 0..PLACEMENT_TRIES {
            let d = Disk::new(
                rng::uniform_in(rng, 0.05, ws.depth_x - r),
                rng::uniform_in(rng, r, ws.width_y - r),
                r,
            );
            let behind = d.center.x - tx >= r + BAND_SAFETY;
            let far_aside = (d.center.y - ty).abs() >= ws.arm_width + r + 0.145;
            if !behind && !far_aside {
                continue;
            }
            config.obstacles.push(d);
            if is_feasible(&config, &ws) {
                placed = true;
                break;
            }
            config.obstacles.pop();
        }
        if !placed {
            return Err(GenerationError::GenerationFailed);
        }
    }
    Ok((ws, config))
}

/// Ladder layout: a vertical pair plus three singles along the band whose
/// consecutive gaps (0.151, 0.186, 0.221 m) merge at clearly separated
/// radii, giving planners four actionable clustering scales. Obstacles
/// beyond the first five are parked far outside the band where neither the
/// sweeps nor their noisy replays can reach them.
fn generate_ladder(
    spec: &SceneSpec,
    rng: &mut rng::ChaCha8Rng,
) -> Option<(Workspace, Configuration)> {
    let ws = spec.workspace;
    let r_mid = (spec.radius_min + spec.radius_max) / 2.0;
    if !(7..=9).contains(&spec.obstacle_count) || !(0.03..=0.04).contains(&r_mid) {
        return None;
    }
    let sample_radius = |rng: &mut rng::ChaCha8Rng| -> f64 {
        rng::uniform_in(rng, spec.radius_min, spec.radius_max)
    };
    let target_radius = sample_radius(rng);
    let y_lo = (ws.arm_width + EXIT_ROOM).max(0.3415);
    let y_hi = (ws.width_y - ws.arm_width - EXIT_ROOM).min(0.3585);
    if y_lo >= y_hi {
        return None;
    }
    let ty = rng::uniform_in(rng, y_lo, y_hi);
    let tx_lo = ws.depth_x * 0.925;
    let tx_hi = (ws.depth_x * 0.95).min(ws.depth_x - target_radius);
    if tx_lo >= tx_hi {
        return None;
    }
    let tx = rng::uniform_in(rng, tx_lo, tx_hi);
    let target = Disk::new(tx, ty, target_radius);
    let gripper = GripperPose { position: Point::new(0.0, ty), heading: 0.0 };
    let mut config = Configuration { obstacles: Vec::new(), target, gripper };
    // six-disk chain across five columns: a vertical pair in the first
    // column, then a zigzag with strictly growing link lengths, giving five
    // well-separated merge scales inside the retrieval band
    let band = [
        (0.050, ty - 0.0741),
        (0.050, ty + 0.0279),
        (0.182, ty + 0.0606),
        (0.314, ty - 0.0449),
        (0.446, ty + 0.1080),
        (0.578, ty - 0.0876),
    ];
    for &(x, y) in &band {
        let jx = rng::uniform_in(rng, -0.0005, 0.0005);
        let jy = rng::uniform_in(rng, -0.0005, 0.0005);
        config.obstacles.push(Disk::new(x + jx, y + jy, sample_radius(rng)));
    }
    for k in 0..spec.obstacle_count - band.len() {
        let x = 0.63 + 0.075 * (k / 2) as f64;
        let y = if k % 2 == 0 { ty + 0.305 } else { ty - 0.305 };
        let jx = rng::uniform_in(rng, -0.0005, 0.0005);
        let jy = rng::uniform_in(rng, -0.0005, 0.0005);
        config.obstacles.push(Disk::new(x + jx, y + jy, sample_radius(rng)));
    }
    for d in &config.obstacles {
        let inside = d.center.x >= d.radius
            && d.center.x <= ws.depth_x - d.radius
            && d.center.y >= d.radius
            && d.center.y <= ws.width_y - d.radius;
        if !inside {
            return None;
        }
    }
    if !is_feasible(&config, &ws) || is_goal(&config, &ws) {
        return None;
    }
    Some((ws, config))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Phim,
    Phia,
    Phis,
    Ooa,
    Grtc,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::Phim, Method::Phia, Method::Phis, Method::Ooa, Method::Grtc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Phim => "phim",
            Method::Phia => "phia",
            Method::Phis => "phis",
            Method::Ooa => "ooa",
            Method::Grtc => "grtc",
        }
    }

    pub fn parse(name: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.name() == name)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Run one planner on one scene under wall-clock timing.
pub fn plan_with(
    method: Method,
    config: &Configuration,
    ws: &Workspace,
    params: &PlannerParams,
) -> Result<Plan, PlanError> {
    let clock = WallClock::start();
    match method {
        Method::Phim => plan_phim(config, ws, params, &clock),
        Method::Phia => plan_phia(config, ws, params, &clock),
        Method::Phis => plan_phis(config, ws, params, &clock),
        Method::Ooa => plan_ooa(config, ws, params, &clock),
        Method::Grtc => plan_grtc(config, ws, params, &clock, params.seed),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub scene_id: usize,
    pub method: Method,
    pub planning_success: bool,
    pub execution_success: bool,
    pub action_count: usize,
    pub planning_seconds: f64,
}

fn noise_seed(scene_seed: u64, trial: u64) -> u64 {
    scene_seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(trial + 1)
}

/// Replay a fixed plan on noise-perturbed copies of the scene; true only if
/// every replay reaches the goal.
pub fn replays_succeed(
    config: &Configuration,
    ws: &Workspace,
    plan: &Plan,
    noise_bound: f64,
    noise_trials: u64,
    scene_seed: u64,
) -> bool {
    (0..noise_trials).all(|t| {
        let Ok(noisy) = apply_noise(config, ws, noise_bound, noise_seed(scene_seed, t)) else {
            return false;
        };
        match replay_plan(&noisy, ws, &plan.actions) {
            Ok(end) => is_goal(&end, ws),
            Err(_) => false,
        }
    })
}

/// Plan every (scene, method) pair and score noise-replay robustness.
/// Planner failures become records with planning_success=false, they are
/// never raised. Records come out sorted by scene id then method order.
pub fn run_benchmark(
    specs: &[SceneSpec],
    methods: &[Method],
    params: &PlannerParams,
    noise_bound: f64,
    noise_trials: u64,
) -> Result<Vec<BenchRecord>, GenerationError> {
    let mut records = Vec::with_capacity(specs.len() * methods.len());
    for (scene_id, spec) in specs.iter().enumerate() {
        let (ws, config) = generate_scene(spec)?;
        for &method in methods {
            let mut params = *params;
            params.seed = spec.seed;
            let (plan, planning_success) = match plan_with(method, &config, &ws, &params) {
                Ok(p) => (p, true),
                Err(PlanError::NoPlanFound(p)) | Err(PlanError::TimeBudgetExceeded(p)) => {
                    (*p, false)
                }
                Err(PlanError::InvalidStart) => {
                    records.push(BenchRecord {
                        scene_id,
                        method,
                        planning_success: false,
                        execution_success: false,
                        action_count: 0,
                        planning_seconds: 0.0,
                    });
                    continue;
                }
            };
            let execution_success = planning_success
                && replays_succeed(&config, &ws, &plan, noise_bound, noise_trials, spec.seed);
            records.push(BenchRecord {
                scene_id,
                method,
                planning_success,
                execution_success,
                action_count: plan.actions.len(),
                planning_seconds: plan.stats.seconds,
            });
        }
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "scene_id,method,planning_success,execution_success,actions,seconds";

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.scene_id,
            r.method,
            r.planning_success,
            r.execution_success,
            r.action_count,
            r.planning_seconds
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    /// Mean action count over successful plans; None when nothing succeeded.
    pub mean_actions: Option<f64>,
    pub mean_seconds: f64,
    pub planning_rate: f64,
    pub execution_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptyRecords;

impl fmt::Display for EmptyRecords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no records to summarize")
    }
}

impl std::error::Error for EmptyRecords {}

/// Per-method means and rates; permutation-invariant over the record order.
pub fn summarize(records: &[BenchRecord]) -> Result<Vec<MethodSummary>, EmptyRecords> {
    if records.is_empty() {
        return Err(EmptyRecords);
    }
    let mut out = Vec::new();
    for method in Method::ALL {
        let mut rows: Vec<&BenchRecord> = records.iter().filter(|r| r.method == method).collect();
        if rows.is_empty() {
            continue;
        }
        // fixed summation order keeps the means bit-identical under record
        // permutations
        rows.sort_by_key(|r| r.scene_id);
        let n = rows.len() as f64;
        let wins: Vec<&&BenchRecord> = rows.iter().filter(|r| r.planning_success).collect();
        let mean_actions = if wins.is_empty() {
            None
        } else {
            Some(wins.iter().map(|r| r.action_count as f64).sum::<f64>() / wins.len() as f64)
        };
        out.push(MethodSummary {
            method,
            mean_actions,
            mean_seconds: rows.iter().map(|r| r.planning_seconds).sum::<f64>() / n,
            planning_rate: wins.len() as f64 / n,
            execution_rate: rows.iter().filter(|r| r.execution_success).count() as f64 / n,
        });
    }
    Ok(out)
}

pub fn summary_table(summaries: &[MethodSummary]) -> String {
    let mut out =
        String::from("method  mean_actions  mean_seconds  planning_rate  execution_rate\n");
    for s in summaries {
        let actions = match s.mean_actions {
            Some(a) => format!("{a:.2}"),
            None => String::new(),
        };
        out.push_str(&format!(
            "{:<7} {:>12} {:>13.4} {:>14.2} {:>15.2}\n",
            s.method, actions, s.mean_seconds, s.planning_rate, s.execution_rate
        ));
    }
    out
}
