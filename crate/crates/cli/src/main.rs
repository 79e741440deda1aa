use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pushplan::bench::{
    self, records_to_csv, run_benchmark, summarize, summary_table, Method, SceneSpec,
};
use pushplan::plantext::{format_plan, parse_plan};
use pushplan::render::render_svg;
use pushplan::scene::{parse_scene, write_scene};
use pushplan_core::homology::persistence_diagram;
use pushplan_core::mcts::{PlanError, PlannerParams};
use pushplan_core::path_region::compute_path_region;
use pushplan_core::push_sim::is_goal;
use pushplan_core::{Plan, PlanStats};

#[derive(Parser)]
#[command(name = "pushplan", about = "Shelf clutter push planning and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Persistence gap below which a clustering radius is discarded
    #[arg(long, default_value_t = 0.015)]
    nu: f64,
    /// Minimal actionable radius (gripper half-clearance), meters
    #[arg(long = "h", default_value_t = 0.05)]
    h: f64,
    /// UCB exploration constant
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    c: f64,
    /// Search iteration budget
    #[arg(long = "iters", default_value_t = 400)]
    iters: u64,
    /// Planning wall-clock cap, seconds
    #[arg(long = "time-limit", default_value_t = 500.0)]
    time_limit: f64,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ParamArgs {
    fn to_params(&self) -> PlannerParams {
        PlannerParams {
            nu: self.nu,
            h: self.h,
            c: self.c,
            max_iterations: self.iters,
            time_limit_s: self.time_limit,
            seed: self.seed,
            ..PlannerParams::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Plan a retrieval push sequence for one scene
    Plan {
        #[arg(long)]
        scene: PathBuf,
        /// phim | phia | phis | ooa | grtc
        #[arg(long)]
        method: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Also write the plan text to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate scenes and compare planners
    Bench {
        /// Number of scenes
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Comma-separated subset of phim,phia,phis,ooa,grtc
        #[arg(long)]
        methods: Option<String>,
        /// Uniform per-object replay perturbation bound, meters
        #[arg(long, default_value_t = 0.03)]
        noise: f64,
        /// Noise replays per plan
        #[arg(long, default_value_t = 5)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        csv: PathBuf,
        /// Write each generated scene as <id>.scene in this directory
        #[arg(long = "scenes-dir")]
        scenes_dir: Option<PathBuf>,
    },
    /// Emit the merge events of a scene's obstacle centers as CSV
    Diagram {
        #[arg(long)]
        scene: PathBuf,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Draw a scene (and optionally a plan) as SVG
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_NO_PLAN: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("pushplan: {message}");
    ExitCode::from(code)
}

fn load_scene(
    path: &PathBuf,
) -> Result<(pushplan_core::Workspace, pushplan_core::Configuration), ExitCode> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    parse_scene(&text).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, everything else is usage
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Plan { scene, method, params, out } => cmd_plan(&scene, &method, &params, out),
        Command::Bench { count, methods, noise, trials, seed, csv, scenes_dir } => {
            cmd_bench(count, methods.as_deref(), noise, trials, seed, &csv, scenes_dir)
        }
        Command::Diagram { scene, csv } => cmd_diagram(&scene, csv),
        Command::Render { scene, plan, out } => cmd_render(&scene, plan, &out),
    }
}

fn cmd_plan(scene: &PathBuf, method: &str, args: &ParamArgs, out: Option<PathBuf>) -> ExitCode {
    let Some(method) = Method::parse(method) else {
        return fail(EXIT_USAGE, format!("unknown method: {method}"));
    };
    let (ws, config) = match load_scene(scene) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let params = args.to_params();
    let (plan, code) = if is_goal(&config, &ws) {
        let mut plan = Plan::empty(PlanStats::default());
        plan.success = true;
        (plan, ExitCode::SUCCESS)
    } else {
        match bench::plan_with(method, &config, &ws, &params) {
            Ok(p) => (p, ExitCode::SUCCESS),
            Err(PlanError::NoPlanFound(p)) | Err(PlanError::TimeBudgetExceeded(p)) => {
                (*p, ExitCode::from(EXIT_NO_PLAN))
            }
            Err(PlanError::InvalidStart) => {
                return fail(EXIT_USAGE, "scene is not plannable (invalid start)");
            }
        }
    };
    let text = format_plan(&plan);
    print!("{text}");
    if let Some(out) = out {
        if let Err(e) = fs::write(&out, &text) {
            return fail(EXIT_USAGE, format!("{}: {e}", out.display()));
        }
    }
    code
}

fn cmd_bench(
    count: usize,
    methods: Option<&str>,
    noise: f64,
    trials: u64,
    seed: u64,
    csv: &PathBuf,
    scenes_dir: Option<PathBuf>,
) -> ExitCode {
    let methods: Vec<Method> = match methods {
        None => Method::ALL.to_vec(),
        Some(list) => {
            let mut parsed = Vec::new();
            for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match Method::parse(name) {
                    Some(m) => parsed.push(m),
                    None => return fail(EXIT_USAGE, format!("unknown method: {name}")),
                }
            }
            if parsed.is_empty() {
                return fail(EXIT_USAGE, "empty method list");
            }
            parsed
        }
    };
    let specs: Vec<SceneSpec> =
        (0..count).map(|i| SceneSpec::standard(seed.wrapping_add(i as u64))).collect();
    if let Some(dir) = &scenes_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            return fail(EXIT_USAGE, format!("{}: {e}", dir.display()));
        }
        for (id, spec) in specs.iter().enumerate() {
            match bench::generate_scene(spec) {
                Ok((ws, config)) => {
                    let path = dir.join(format!("{id}.scene"));
                    if let Err(e) = fs::write(&path, write_scene(&ws, &config)) {
                        return fail(EXIT_USAGE, format!("{}: {e}", path.display()));
                    }
                }
                Err(e) => return fail(EXIT_USAGE, e),
            }
        }
    }
    let params = PlannerParams::default();
    let records = match run_benchmark(&specs, &methods, &params, noise, trials) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    if let Err(e) = fs::write(csv, records_to_csv(&records)) {
        return fail(EXIT_USAGE, format!("{}: {e}", csv.display()));
    }
    match summarize(&records) {
        Ok(s) => print!("{}", summary_table(&s)),
        Err(e) => return fail(EXIT_USAGE, e),
    }
    ExitCode::SUCCESS
}

fn cmd_diagram(scene: &PathBuf, csv: Option<PathBuf>) -> ExitCode {
    let (_ws, config) = match load_scene(scene) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let points: Vec<_> = config.obstacles.iter().map(|d| d.center).collect();
    let mut out = String::from("death_radius,component_size_a,component_size_b\n");
    match persistence_diagram(&points) {
        Ok(diagram) => {
            for e in &diagram.events {
                out.push_str(&format!(
                    "{},{},{}\n",
                    e.death_radius,
                    e.component_a.len(),
                    e.component_b.len()
                ));
            }
        }
        Err(_) => {} // no obstacles: header only
    }
    match csv {
        Some(path) => {
            if let Err(e) = fs::write(&path, out) {
                return fail(EXIT_USAGE, format!("{}: {e}", path.display()));
            }
        }
        None => print!("{out}"),
    }
    ExitCode::SUCCESS
}

fn cmd_render(scene: &PathBuf, plan: Option<PathBuf>, out: &PathBuf) -> ExitCode {
    let (ws, config) = match load_scene(scene) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let steps = match plan {
        Some(path) => {
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", path.display())),
            };
            match parse_plan(&text) {
                Ok(p) => Some(p.steps),
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", path.display())),
            }
        }
        None => None,
    };
    let region = compute_path_region(&config, &ws).ok();
    let svg = render_svg(&ws, &config, steps.as_deref(), region.as_ref());
    if let Err(e) = fs::write(out, svg) {
        return fail(EXIT_USAGE, format!("{}: {e}", out.display()));
    }
    ExitCode::SUCCESS
}
