//! UCT search over push configurations with homology-informed actions and
//! rewards.
//!
//! No rollout stage is needed: the sweep simulator yields the child
//! configuration exactly, so the reward of an action is known at expansion
//! time. A child whose sweep fails is marked as a failure, consumes one
//! visit with zero reward, and is never descended into.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::clock::Clock;
use crate::geometry::{is_feasible, Configuration, Workspace};
use crate::path_region::{self};
use crate::plan::{Plan, PlanStats, PlanStep};
use crate::push_sim::{self, Direction, PushAction};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerParams {
    /// Persistence gap below which a clustering scale is considered noise.
    pub nu: f64,
    /// Gripper width; cluster radii below it are not actionable.
    pub h: f64,
    /// UCB exploration constant.
    pub c: f64,
    pub max_iterations: u64,
    pub time_limit_s: f64,
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            nu: 0.015,
            h: 0.05,
            c: core::f64::consts::SQRT_2,
            max_iterations: 400,
            time_limit_s: 500.0,
            max_depth: 12,
            seed: 0,
        }
    }
}

/// Iterations a discovered shortest plan must stay unchanged before the
/// search stops early.
pub const STABILIZATION_WINDOW: u64 = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    TerminalSuccess,
    Failure,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChildState {
    Unexpanded,
    Expanded(usize),
    /// Push failed; the entry keeps its one backpropagated visit but holds
    /// no subtree.
    Failure { visits: u64 },
}

#[derive(Clone, Debug)]
pub struct ChildEntry {
    pub action: PushAction,
    pub state: ChildState,
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub config: Configuration,
    pub depth: usize,
    pub visits: u64,
    pub cumulative_reward: f64,
    /// Reward of the edge that created this node.
    pub own_reward: f64,
    pub action_from_parent: Option<PushAction>,
    pub parent: Option<usize>,
    pub children: Vec<ChildEntry>,
    pub status: NodeStatus,
    /// Nothing below this node can be expanded anymore.
    pub exhausted: bool,
    /// Cached obstacle count of this node's own path region.
    region_obstacles: i64,
    /// The node's path region and its member obstacle indices, kept so the
    /// reward counts of all children reuse one region computation.
    region: Option<path_region::PathRegion>,
    in_region: Vec<usize>,
    /// Death radii of the node's in-region persistence diagram when one was
    /// built; the cluster count at radius r is then members − #{deaths ≤ r}.
    deaths: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlanError {
    /// Start configuration infeasible or already at the goal.
    InvalidStart,
    /// No success node found; carries the best-effort plan and stats.
    NoPlanFound(Box<Plan>),
    /// Exhaustive search ran out of its time budget.
    TimeBudgetExceeded(Box<Plan>),
}

impl core::fmt::Display for PlanError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PlanError::InvalidStart => write!(f, "start configuration invalid for planning"),
            PlanError::NoPlanFound(_) => write!(f, "no plan found"),
            PlanError::TimeBudgetExceeded(_) => write!(f, "time budget exceeded"),
        }
    }
}

/// Obstacle count of the configuration's own path region; 0 when no region
/// can be constructed.
fn region_count(config: &Configuration, ws: &Workspace) -> i64 {
    match path_region::compute_path_region(config, ws) {
        Ok(region) => path_region::obstacles_in_region(config, &region).len() as i64,
        Err(_) => 0,
    }
}

fn component_count(config: &Configuration, ws: &Workspace, r: f64) -> i64 {
    match path_region::compute_path_region(config, ws) {
        Ok(region) => {
            let idx = path_region::obstacles_in_region(config, &region);
            path_region::in_region_components(config, &region, &idx, r).block_count() as i64
        }
        Err(_) => 0,
    }
}

/// Reward of a push: obstacles removed from the path region, plus the
/// clusters created at the used radius when at least one obstacle left.
///
///   b = #region(parent) - #region(child)
///   m = max(#clusters(child) - #clusters(parent), 0)
///   t = 1 if b > 0 else 0
///   reward = b + t * m
pub fn reward(
    parent: &Configuration,
    child: &Configuration,
    ws: &Workspace,
    r_used: f64,
) -> f64 {
    let b = region_count(parent, ws) - region_count(child, ws);
    let m = (component_count(child, ws, r_used) - component_count(parent, ws, r_used)).max(0);
    let t = if b > 0 { 1 } else { 0 };
    (b + t * m) as f64
}

/// Upper confidence bound of a child with the given statistics.
pub fn ucb(parent_visits: u64, child_visits: u64, child_cum_reward: f64, c: f64) -> f64 {
    child_cum_reward / child_visits as f64
        + c * libm::sqrt(2.0 * libm::log(parent_visits as f64) / child_visits as f64)
}

/// The search tree, kept accessible so statistics invariants can be audited
/// after a run.
pub struct Mcts<'a> {
    pub ws: &'a Workspace,
    pub params: PlannerParams,
    pub nodes: Vec<SearchNode>,
    pub iterations: u64,
    /// Number of nodes whose status is `TerminalSuccess`.
    pub success_nodes: u64,
    /// Terminal node of the best success path found so far (fewest actions,
    /// then highest summed edge reward, then lexicographic action order).
    best_success: Option<usize>,
    rng: rng::ChaCha8Rng,
    /// Scratch buffer for the selection path, reused across iterations.
    path_buf: Vec<usize>,
}

impl<'a> Mcts<'a> {
    pub fn new(
        config: &Configuration,
        ws: &'a Workspace,
        params: PlannerParams,
    ) -> Result<Self, PlanError> {
        if !is_feasible(config, ws) || push_sim::is_goal(config, ws) {
            return Err(PlanError::InvalidStart);
        }
        let rng = rng::seeded(params.seed);
        let mut search = Mcts {
            ws,
            params,
            nodes: Vec::new(),
            iterations: 0,
            success_nodes: 0,
            best_success: None,
            rng,
            path_buf: Vec::new(),
        };
        search.add_node(config.clone(), 0, None, None, 0.0);
        Ok(search)
    }

    fn add_node(
        &mut self,
        config: Configuration,
        depth: usize,
        parent: Option<usize>,
        action: Option<PushAction>,
        own_reward: f64,
    ) -> usize {
        // one region computation serves the goal test, the child action
        // list, and the cached reward counts
        let (region, in_region) = match path_region::compute_path_region(&config, self.ws) {
            Ok(r) => {
                let members = path_region::obstacles_in_region(&config, &r);
                (Some(r), members)
            }
            Err(_) => (None, Vec::new()),
        };
        let goal = region.is_some() && in_region.is_empty();
        let mut deaths = None;
        let children = if goal || depth >= self.params.max_depth || in_region.is_empty() {
            Vec::new()
        } else {
            let r = region.as_ref().expect("members imply a region");
            let centers: Vec<crate::geometry::Point> =
                in_region.iter().map(|&i| r.to_frame(config.obstacles[i].center)).collect();
            let diagram =
                crate::homology::persistence_diagram(&centers).expect("non-empty centers");
            let radii = crate::homology::persistent_radii(&diagram, self.params.nu, self.params.h);
            deaths = Some(diagram.deaths());
            let mut children = Vec::with_capacity(radii.len() * 2);
            for radius in radii {
                for direction in [Direction::Up, Direction::Down] {
                    children.push(ChildEntry {
                        action: PushAction { radius, direction },
                        state: ChildState::Unexpanded,
                    });
                }
            }
            children
        };
        let status = if goal { NodeStatus::TerminalSuccess } else { NodeStatus::Open };
        if goal {
            self.success_nodes += 1;
        }
        let exhausted = children.is_empty();
        let region_obstacles = in_region.len() as i64;
        let idx = self.nodes.len();
        self.nodes.push(SearchNode {
            config,
            depth,
            visits: if parent.is_some() { 1 } else { 0 },
            cumulative_reward: own_reward,
            own_reward,
            action_from_parent: action,
            parent,
            children,
            status,
            exhausted,
            region_obstacles,
            region,
            in_region,
            deaths,
        });
        idx
    }

    /// Cluster count of a node's region at the given radius. Single-linkage
    /// components under the closed rule are exactly points minus the merges
    /// at or below that radius, so when the node's diagram is on hand the
    /// count is a death tally; distances and deaths are related by an exact
    /// binary scaling, so the tally matches the union-find result bit for bit.
    fn components_cached(&mut self, node: usize, r: f64) -> i64 {
        let n = &self.nodes[node];
        if n.region.is_none() || n.in_region.is_empty() {
            return 0;
        }
        if let Some(deaths) = &n.deaths {
            let merged = deaths.iter().filter(|&&d| d <= r).count();
            return (n.in_region.len() - merged) as i64;
        }
        // no diagram was built for this node (depth-capped leaf)
        let region = n.region.as_ref().expect("checked above");
        path_region::in_region_components(&n.config, region, &n.in_region, r).block_count() as i64
    }

    pub fn root_exhausted(&self) -> bool {
        self.nodes[0].exhausted
    }

    /// Runs one selection + expansion + backpropagation pass. Returns false
    /// when the tree is exhausted and nothing could be expanded.
    pub fn step(&mut self) -> bool {
        if self.root_exhausted() {
            return false;
        }
        // selection: descend through fully expanded nodes by UCB; the path
        // buffer is owned by the tree and reused across iterations
        let mut path = core::mem::take(&mut self.path_buf);
        path.clear();
        path.push(0);
        let mut node = 0usize;
        loop {
            let n = &self.nodes[node];
            let unexpanded =
                n.children.iter().filter(|ch| matches!(ch.state, ChildState::Unexpanded)).count();
            if unexpanded > 0 {
                let wanted = rng::index(&mut self.rng, unexpanded);
                let pick = self
                    .nodes[node]
                    .children
                    .iter()
                    .enumerate()
                    .filter(|(_, ch)| matches!(ch.state, ChildState::Unexpanded))
                    .nth(wanted)
                    .map(|(k, _)| k)
                    .expect("counted above");
                self.expand(node, pick, &path);
                self.path_buf = path;
                break;
            }
            let parent_visits = self.nodes[node].visits.max(1);
            // same score as `ucb`, with log(parent_visits) hoisted out
            let log_pv = libm::log(parent_visits as f64);
            let mut best: Option<(f64, usize, usize)> = None; // (score, order, child idx)
            for (k, ch) in self.nodes[node].children.iter().enumerate() {
                if let ChildState::Expanded(ci) = ch.state {
                    let c = &self.nodes[ci];
                    if c.exhausted || c.status == NodeStatus::Failure {
                        continue;
                    }
                    let score = c.cumulative_reward / c.visits as f64
                        + self.params.c * libm::sqrt(2.0 * log_pv / c.visits as f64);
                    if best.map_or(true, |(s, _, _)| score > s) {
                        best = Some((score, k, ci));
                    }
                }
            }
            match best {
                Some((_, _, ci)) => {
                    path.push(ci);
                    node = ci;
                }
                None => {
                    // selection dead-ended; flags were maintained after each
                    // expansion so this only happens at a freshly exhausted
                    // node — refresh and retry from the root
                    self.refresh_flags(node);
                    if self.root_exhausted() {
                        return false;
                    }
                    path.clear();
                    path.push(0);
                    node = 0;
                }
            }
        }
        self.iterations += 1;
        true
    }

    fn expand(&mut self, node: usize, child_idx: usize, path: &[usize]) {
        let action = self.nodes[node].children[child_idx].action;
        let result = push_sim::simulate_push(&self.nodes[node].config, self.ws, action);
        let reward_value = match result {
            Ok(outcome) => {
                let depth = self.nodes[node].depth + 1;
                let ci = self.add_node(outcome.next, depth, Some(node), Some(action), 0.0);
                // same value as `reward`, via the per-node caches; the
                // cluster term is skipped when it is provably zero (nothing
                // removed, or the child region is empty)
                let b = self.nodes[node].region_obstacles - self.nodes[ci].region_obstacles;
                let m = if b > 0 && self.nodes[ci].region_obstacles > 0 {
                    (self.components_cached(ci, action.radius)
                        - self.components_cached(node, action.radius))
                    .max(0)
                } else {
                    0
                };
                let r = (b + if b > 0 { 1 } else { 0 } * m) as f64;
                self.nodes[ci].own_reward = r;
                self.nodes[ci].cumulative_reward = r;
                self.nodes[node].children[child_idx].state = ChildState::Expanded(ci);
                if self.nodes[ci].status == NodeStatus::TerminalSuccess {
                    self.update_best(ci);
                }
                r
            }
            Err(_) => {
                self.nodes[node].children[child_idx].state = ChildState::Failure { visits: 1 };
                0.0
            }
        };
        for &p in path {
            self.nodes[p].visits += 1;
            self.nodes[p].cumulative_reward += reward_value;
        }
        self.refresh_flags(node);
    }

    /// Re-derive exhausted/failure flags from `node` up to the root. A
    /// parent's flags depend only on its children's flags, so the walk stops
    /// as soon as a node's flags come out unchanged.
    fn refresh_flags(&mut self, mut node: usize) {
        loop {
            let n = &self.nodes[node];
            let before = (n.exhausted, n.status);
            if n.status != NodeStatus::TerminalSuccess {
                let mut all_failure = !n.children.is_empty();
                let mut exhausted = true;
                for ch in &n.children {
                    match ch.state {
                        ChildState::Unexpanded => {
                            all_failure = false;
                            exhausted = false;
                        }
                        ChildState::Failure { .. } => {}
                        ChildState::Expanded(ci) => {
                            let c = &self.nodes[ci];
                            if c.status != NodeStatus::Failure {
                                all_failure = false;
                            }
                            if !c.exhausted {
                                exhausted = false;
                            }
                        }
                    }
                }
                let n = &mut self.nodes[node];
                if n.children.is_empty() {
                    // dead end (depth cap or no actions); keep status
                    n.exhausted = true;
                } else {
                    n.exhausted = exhausted;
                    if all_failure {
                        n.status = NodeStatus::Failure;
                    }
                }
            }
            let n = &self.nodes[node];
            if (n.exhausted, n.status) == before {
                break;
            }
            match n.parent {
                Some(p) => node = p,
                None => break,
            }
        }
    }

    pub fn success_exists(&self) -> bool {
        self.success_nodes > 0
    }

    /// Summed edge reward of the root-to-node path.
    fn path_reward(&self, mut node: usize) -> f64 {
        let mut sum = self.nodes[node].own_reward;
        while let Some(p) = self.nodes[node].parent {
            sum += self.nodes[p].own_reward;
            node = p;
        }
        sum
    }

    /// Keep `best_success` current as success nodes appear. A path never
    /// mutates after creation, so this comparison at creation time is
    /// equivalent to rescanning all success nodes.
    fn update_best(&mut self, ci: usize) {
        let better = match self.best_success {
            None => true,
            Some(b) => {
                let (cd, bd) = (self.nodes[ci].depth, self.nodes[b].depth);
                if cd != bd {
                    cd < bd
                } else {
                    let (cr, br) = (self.path_reward(ci), self.path_reward(b));
                    if cr != br {
                        cr > br
                    } else {
                        action_seq_less(
                            &self.actions_of(&self.path_to(ci)),
                            &self.actions_of(&self.path_to(b)),
                        )
                    }
                }
            }
        };
        if better {
            self.best_success = Some(ci);
        }
    }

    /// Deterministic extraction of the best root-to-success path: fewest
    /// actions, then highest summed edge reward, then lexicographic action
    /// order. Without a success node, the most-visited prefix is returned
    /// with `success = false`.
    pub fn extract_best_path(&self, stats: PlanStats) -> Plan {
        match self.best_success.map(|i| self.path_to(i)) {
            Some(path) => {
                let actions: Vec<PlanStep> =
                    self.actions_of(&path).into_iter().map(PlanStep::Sweep).collect();
                let states: Vec<Configuration> =
                    path[1..].iter().map(|&k| self.nodes[k].config.clone()).collect();
                Plan { actions, states, success: true, stats }
            }
            None => {
                // best-effort prefix along most-visited children
                let mut actions = Vec::new();
                let mut states = Vec::new();
                let mut node = 0usize;
                loop {
                    let mut next: Option<(u64, usize)> = None;
                    for ch in &self.nodes[node].children {
                        if let ChildState::Expanded(ci) = ch.state {
                            if self.nodes[ci].status == NodeStatus::Failure {
                                continue;
                            }
                            let v = self.nodes[ci].visits;
                            if next.map_or(true, |(bv, _)| v > bv) {
                                next = Some((v, ci));
                            }
                        }
                    }
                    match next {
                        Some((_, ci)) => {
                            actions.push(PlanStep::Sweep(
                                self.nodes[ci].action_from_parent.expect("non-root"),
                            ));
                            states.push(self.nodes[ci].config.clone());
                            node = ci;
                        }
                        None => break,
                    }
                }
                Plan { actions, states, success: false, stats }
            }
        }
    }

    fn path_to(&self, mut node: usize) -> Vec<usize> {
        let mut path = alloc::vec![node];
        while let Some(p) = self.nodes[node].parent {
            path.push(p);
            node = p;
        }
        path.reverse();
        path
    }

    fn actions_of(&self, path: &[usize]) -> Vec<PushAction> {
        path[1..]
            .iter()
            .map(|&k| self.nodes[k].action_from_parent.expect("non-root"))
            .collect()
    }
}

fn action_less(a: &PushAction, b: &PushAction) -> bool {
    a.radius < b.radius
        || (a.radius == b.radius
            && a.direction == Direction::Up
            && b.direction == Direction::Down)
}

fn action_seq_less(a: &[PushAction], b: &[PushAction]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if action_less(x, y) {
            return true;
        }
        if action_less(y, x) {
            return false;
        }
    }
    a.len() < b.len()
}

/// Full PHIM planning run: UCT iterations until a discovered shortest plan
/// is stable, the iteration or time budget runs out, or the tree is
/// exhausted.
pub fn plan_phim(
    config: &Configuration,
    ws: &Workspace,
    params: &PlannerParams,
    clock: &dyn Clock,
) -> Result<Plan, PlanError> {
    let t0 = clock.seconds();
    let mut search = Mcts::new(config, ws, *params)?;
    let mut last_best: Option<usize> = None;
    let mut stable_for: u64 = 0;
    while search.iterations < params.max_iterations {
        if clock.seconds() - t0 > params.time_limit_s {
            break;
        }
        if !search.step() {
            break;
        }
        // a success path is immutable once found, so the discovered shortest
        // plan changes exactly when the best terminal node changes
        if search.best_success.is_some() {
            if search.best_success == last_best {
                stable_for += 1;
                if stable_for >= STABILIZATION_WINDOW {
                    break;
                }
            } else {
                last_best = search.best_success;
                stable_for = 1;
            }
        }
    }
    let stats = PlanStats { iterations: search.iterations, seconds: clock.seconds() - t0 };
    let plan = search.extract_best_path(stats);
    if plan.success {
        Ok(plan)
    } else {
        Err(PlanError::NoPlanFound(Box::new(plan)))
    }
}
