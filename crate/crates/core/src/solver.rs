//! Interval branch-and-bound over the rotation-matrix system.
//!
//! The vanilla solver pops boxes from a LIFO buffer, contracts them, discards
//! empty ones, accepts boxes narrower than ε and bisects the rest. The
//! heuristic solver interleaves this with exploration: random-restart local IK
//! proposes a configuration not covered by any accepted box, the search
//! descends straight to the leaf holding it, and the region around it is
//! explored either depth-first or by following the tangent of the solution
//! manifold. Processing a box depends only on the box and its depth, so every
//! mode run to exhaustion accepts the same set of boxes.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contractor::{ContractionOperator, DEFAULT_MAX_ROUNDS, DEFAULT_MIN_RELATIVE_REDUCTION};
use crate::error::{Error, Result};
use crate::interval::{BisectionRule, Interval, IntervalBox};
use crate::local_ik::{
    calc_new_sol, random_configuration, solve_local, task_jacobian, LocalIkConfig,
};
use crate::paving::CurveSet;
use crate::recovery::{recover_joint_box, JointIntervalVector};
use crate::robot::{PoseTarget, RobotModel};
use crate::solution::{SolutionBox, SolutionSet};
use crate::system::ConstraintSystem;

// rotation points within this distance of a box count as inside it
const SEED_TOL: f64 = 1e-5;
// tangent is unreliable when the second null direction is this weak
const TANGENT_RANK_TOL: f64 = 1e-4;
// cap on the number of loop iterations skipped after local IK failures
const MAX_BACKOFF: usize = 256;

// pose residual for refined roots used to anchor clusters
const ROOT_POSE_TOL: f64 = 1e-10;
// refined roots closer than this (radians, per joint) are one solution
const ROOT_MERGE_TOL: f64 = 1e-4;

/// Default slack on each equation of the system.
pub const DEFAULT_EQUALITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    Vanilla,
    #[default]
    Heuristic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationStrategy {
    #[default]
    Dfs,
    #[serde(rename = "mc")]
    ManifoldContinuation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Boxes narrower than this (largest component) are accepted.
    pub epsilon: f64,
    pub mode: SolverMode,
    pub strategy: ExplorationStrategy,
    pub bisection: BisectionRule,
    /// Wall-clock budget in seconds; `None` runs to exhaustion.
    pub time_budget: Option<f64>,
    pub max_rounds: usize,
    pub min_relative_reduction: f64,
    /// Slack allowed on every equation, absorbing rounding in the target.
    pub equality_tolerance: f64,
    pub rng_seed: u64,
    pub local_ik: LocalIkConfig,
    /// Stop manifold continuation once local IK and every curve end fail.
    pub stop_early: bool,
    /// Add redundant orthonormality constraints to the contractor.
    pub implied_constraints: bool,
    /// Discard boxes whose joint enclosure misses the joint limits.
    pub limit_pruning: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 0.01,
            mode: SolverMode::Heuristic,
            strategy: ExplorationStrategy::Dfs,
            bisection: BisectionRule::RoundRobin,
            time_budget: None,
            max_rounds: DEFAULT_MAX_ROUNDS,
            min_relative_reduction: DEFAULT_MIN_RELATIVE_REDUCTION,
            equality_tolerance: DEFAULT_EQUALITY_TOLERANCE,
            rng_seed: 0,
            local_ik: LocalIkConfig::default(),
            stop_early: false,
            implied_constraints: true,
            limit_pruning: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let Some(t) = self.time_budget {
            if !(t >= 0.0) || t.is_nan() {
                return Err(Error::InvalidConfig(format!(
                    "time budget must be non-negative, got {t}"
                )));
            }
        }
        if !(self.equality_tolerance >= 0.0 && self.equality_tolerance < 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "equality tolerance must lie in [0, 1e-3), got {}",
                self.equality_tolerance
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.min_relative_reduction) {
            return Err(Error::InvalidConfig(
                "min_relative_reduction must lie in [0, 1)".into(),
            ));
        }
        self.local_ik.validate()
    }
}

/// A box awaiting processing.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    pub id: u64,
    pub depth: usize,
    pub bx: IntervalBox,
}

/// LIFO store of pending nodes with removal by position.
#[derive(Clone, Debug, Default)]
pub struct BoxBuffer {
    nodes: Vec<SearchNode>,
}

impl BoxBuffer {
    pub fn push(&mut self, n: SearchNode) {
        self.nodes.push(n);
    }

    pub fn pop(&mut self) -> Option<SearchNode> {
        self.nodes.pop()
    }

    pub fn top(&self) -> Option<&SearchNode> {
        self.nodes.last()
    }

    pub fn remove(&mut self, pos: usize) -> SearchNode {
        self.nodes.remove(pos)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SearchNode> {
        self.nodes.iter()
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Buffer emptied: the paving is complete.
    Exhausted,
    #[serde(rename = "budget")]
    BudgetExhausted,
    /// Manifold continuation found nothing more to follow.
    #[serde(rename = "early_mc")]
    EarlyTermination,
}

/// Counters of one run. Every created node is accepted, discarded, bisected
/// or still buffered.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub nodes_created: u64,
    pub contractions: u64,
    pub bisections: u64,
    pub accepted: u64,
    pub discarded_empty: u64,
    pub discarded_limits: u64,
    pub remaining: u64,
    pub local_ik_calls: u64,
    pub local_ik_restarts: u64,
    pub local_ik_converged: u64,
    pub local_ik_new: u64,
    pub explorations: u64,
    pub stale_seeds: u64,
    pub continuation_steps: u64,
    pub unreliable_tangents: u64,
    pub max_depth: usize,
}

impl RunStats {
    pub fn balanced(&self) -> bool {
        self.nodes_created
            == self.accepted
                + self.discarded_empty
                + self.discarded_limits
                + self.bisections
                + self.remaining
    }
}

/// Timestamps (seconds from the start of the solve).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub setup_s: f64,
    pub search_s: f64,
    pub finalize_s: f64,
    pub first_solution_s: Option<f64>,
    pub early_termination_s: Option<f64>,
}

/// Everything a solve produces.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solutions: SolutionSet,
    pub curves: CurveSet,
    pub cluster_ids: Vec<usize>,
    pub cluster_count: usize,
    /// For finite solution sets, clusters holding a configuration that local
    /// refinement converged to; the rest are boxes the contractor could not
    /// refute but that hold no root refinement could find.
    pub root_count: Option<usize>,
    pub stats: RunStats,
    pub termination: Termination,
    pub timings: Timings,
    /// Dimension of the self-motion manifold (joints minus task rank).
    pub redundancy: Option<usize>,
}

enum Expanded {
    Empty,
    Accepted(usize),
    Split(SearchNode, SearchNode),
}

enum Continuation {
    Node(usize),
    Exhausted,
    Unreliable,
}

/// Degree of redundancy of a target, from the task Jacobian rank at a few
/// random configurations.
pub fn redundancy(model: &RobotModel, target: &PoseTarget, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut rank = 0;
    for _ in 0..5 {
        let th = random_configuration(model, &mut rng);
        let j = task_jacobian(model, target, &th);
        let sv = j.singular_values();
        let top = sv.max();
        rank = rank.max(sv.iter().filter(|&&s| s > 1e-9 * top.max(1.0)).count());
    }
    model.dof().saturating_sub(rank)
}

/// Solve `system` (built from `model` and `target` when given).
pub fn solve(
    system: &ConstraintSystem,
    robot: Option<(&RobotModel, &PoseTarget)>,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    Solver::new(system, robot, cfg.clone())?.run()
}

/// Paves the solution set of `model` reaching `target`.
pub fn solve_target(
    model: &RobotModel,
    target: &PoseTarget,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    let mut sys = ConstraintSystem::build(model, target)?;
    if cfg.implied_constraints {
        sys = sys.with_implied_constraints();
    }
    solve(&sys, Some((model, target)), cfg)
}

/// Branch-and-bound state.
pub struct Solver<'a> {
    system: &'a ConstraintSystem,
    robot: Option<(&'a RobotModel, &'a PoseTarget)>,
    op: ContractionOperator,
    cfg: SolverConfig,
    buffer: BoxBuffer,
    solutions: SolutionSet,
    curves: CurveSet,
    stats: RunStats,
    rng: ChaCha8Rng,
    next_id: u64,
    start: Instant,
    deadline: Option<Instant>,
    prune: bool,
    redundancy: Option<usize>,
    tangents: HashMap<usize, Option<Vec<f64>>>,
    dead_ends: HashSet<usize>,
    first_solution: Option<f64>,
    early_termination: Option<f64>,
    setup_s: f64,
}

impl<'a> Solver<'a> {
    pub fn new(
        system: &'a ConstraintSystem,
        robot: Option<(&'a RobotModel, &'a PoseTarget)>,
        cfg: SolverConfig,
    ) -> Result<Self> {
        let start = Instant::now();
        cfg.validate()?;
        if let Some((m, _)) = robot {
            if !system.has_robot() || system.links().len() != m.dof() + 1 {
                return Err(Error::InvalidConfig(
                    "system was not built for this robot".into(),
                ));
            }
        }
        let op = system
            .operator()?
            .with_fixed_point(cfg.max_rounds, cfg.min_relative_reduction)
            .with_tolerance(cfg.equality_tolerance);
        let prune = cfg.limit_pruning
            && robot.is_some_and(|(m, _)| m.joints().iter().any(|j| !j.is_unbounded()));
        let redundancy = robot.map(|(m, t)| redundancy(m, t, cfg.rng_seed));
        let mut buffer = BoxBuffer::default();
        let mut stats = RunStats::default();
        if !system.is_infeasible() {
            buffer.push(SearchNode {
                id: 0,
                depth: 0,
                bx: system.initial_box().clone(),
            });
            stats.nodes_created = 1;
        }
        let deadline = cfg
            .time_budget
            .map(|t| start + Duration::from_secs_f64(t.min(1e9)));
        Ok(Solver {
            system,
            robot,
            op,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            solutions: SolutionSet::for_epsilon(cfg.epsilon),
            curves: CurveSet::new(cfg.epsilon),
            cfg,
            buffer,
            stats,
            next_id: 1,
            start,
            deadline,
            prune,
            redundancy,
            tangents: HashMap::new(),
            dead_ends: HashSet::new(),
            first_solution: None,
            early_termination: None,
            setup_s: start.elapsed().as_secs_f64(),
        })
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn joints_of(&self, b: &IntervalBox) -> JointIntervalVector {
        match self.robot {
            Some((m, _)) => recover_joint_box(self.system, m, b),
            None => JointIntervalVector {
                theta: b.components().to_vec(),
                wrapped: vec![false; b.dim()],
            },
        }
    }

    fn child(&mut self, bx: IntervalBox, depth: usize) -> SearchNode {
        let id = self.next_id;
        self.next_id += 1;
        self.stats.nodes_created += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        SearchNode { id, depth, bx }
    }

    // Contract, prune, then accept or split. A pure function of the node.
    fn expand(&mut self, node: SearchNode) -> Expanded {
        self.stats.contractions += 1;
        let mut b = node.bx;
        if !self.op.contract_in_place(&mut b) {
            self.stats.discarded_empty += 1;
            return Expanded::Empty;
        }
        let mut joints = None;
        if self.prune {
            let (m, _) = self.robot.expect("pruning needs a robot");
            let jb = recover_joint_box(self.system, m, &b);
            if m.joints()
                .iter()
                .zip(&jb.theta)
                .any(|(j, t)| !j.admits_interval(t))
            {
                self.stats.discarded_limits += 1;
                return Expanded::Empty;
            }
            joints = Some(jb);
        }
        if b.max_width() < self.cfg.epsilon {
            let joints = joints.unwrap_or_else(|| self.joints_of(&b));
            let idx = self.solutions.push(SolutionBox {
                rotation_box: b,
                joints,
                depth: node.depth,
            });
            self.curves.insert_box(&self.solutions, idx);
            self.stats.accepted += 1;
            if self.first_solution.is_none() {
                self.first_solution = Some(self.elapsed());
            }
            return Expanded::Accepted(idx);
        }
        let (l, r) = b
            .bisect_min_width(self.cfg.bisection, node.depth, self.cfg.epsilon)
            .expect("a box wider than epsilon can be split");
        self.stats.bisections += 1;
        let l = self.child(l, node.depth + 1);
        let r = self.child(r, node.depth + 1);
        Expanded::Split(l, r)
    }

    fn push_children(&mut self, l: SearchNode, r: SearchNode) {
        self.buffer.push(r);
        self.buffer.push(l);
    }

    /// One vanilla step: pop the top node and process it.
    fn search_buffer(&mut self) -> Option<usize> {
        let node = self.buffer.pop()?;
        match self.expand(node) {
            Expanded::Empty => None,
            Expanded::Accepted(i) => Some(i),
            Expanded::Split(l, r) => {
                self.push_children(l, r);
                None
            }
        }
    }

    fn run_vanilla(&mut self) -> Termination {
        while !self.buffer.is_empty() {
            if self.expired() {
                return Termination::BudgetExhausted;
            }
            self.search_buffer();
        }
        Termination::Exhausted
    }

    fn is_known(&self, theta: &[f64]) -> bool {
        let (m, _) = self.robot.expect("heuristic search needs a robot");
        let x = self.system.point_from_theta(m, theta);
        self.solutions
            .find_containing(&x, theta, SEED_TOL)
            .is_some()
    }

    fn run_heuristic(&mut self) -> Termination {
        let Some((model, target)) = self.robot else {
            return self.run_vanilla();
        };
        let mc = self.cfg.strategy == ExplorationStrategy::ManifoldContinuation
            && self.redundancy == Some(1);
        let mut skip = 0usize;
        let mut failures = 0u32;
        loop {
            if self.buffer.is_empty() {
                return Termination::Exhausted;
            }
            if self.expired() {
                return Termination::BudgetExhausted;
            }
            let mut ik_failed = false;
            if skip == 0 {
                self.stats.local_ik_calls += 1;
                let cfg = self.cfg.local_ik.clone();
                let mut rng = self.rng.clone();
                let (sol, st) = calc_new_sol(model, target, &cfg, &mut rng, |th| self.is_known(th));
                self.rng = rng;
                self.stats.local_ik_restarts += st.restarts as u64;
                self.stats.local_ik_converged += st.converged as u64;
                if let Some(theta) = sol {
                    self.stats.local_ik_new += 1;
                    if self.explore_manifold(&theta, mc) > 0 {
                        failures = 0;
                        continue;
                    }
                    self.stats.stale_seeds += 1;
                }
                ik_failed = true;
                failures += 1;
                skip = (1usize << failures.min(16)).min(MAX_BACKOFF);
            } else {
                skip -= 1;
            }
            if mc {
                if self.continue_from_ends() {
                    continue;
                }
                if ik_failed && self.early_termination.is_none() {
                    self.early_termination = Some(self.elapsed());
                    if self.cfg.stop_early {
                        return Termination::EarlyTermination;
                    }
                }
            }
            self.search_buffer();
        }
    }

    /// Descend to the leaf holding `theta` and explore around it. Returns the
    /// number of nodes processed (0 when the seed is stale).
    fn explore_manifold(&mut self, theta: &[f64], mc: bool) -> usize {
        let (m, _) = self.robot.expect("exploration needs a robot");
        self.stats.explorations += 1;
        let x = self.system.point_from_theta(m, theta);
        if self
            .solutions
            .find_containing(&x, theta, SEED_TOL)
            .is_some()
        {
            return 0;
        }
        // Step I: buffered leaf holding the seed, most recent first
        let Some(pos) = self
            .buffer
            .iter()
            .rposition(|n| distance(&n.bx, &x) <= SEED_TOL)
        else {
            return 0;
        };
        let mut node = self.buffer.remove(pos);
        let mut processed = 0;
        let mut patch = Vec::new();
        // Step II: follow the seed down the tree
        loop {
            processed += 1;
            match self.expand(node) {
                Expanded::Empty => break,
                Expanded::Accepted(i) => {
                    patch.push(i);
                    break;
                }
                Expanded::Split(l, r) => {
                    if distance(&r.bx, &x) < distance(&l.bx, &x) {
                        self.buffer.push(l);
                        node = r;
                    } else {
                        self.buffer.push(r);
                        node = l;
                    }
                }
            }
            if self.expired() {
                // keep the carried child pending so the anytime set stays resumable
                self.buffer.push(node);
                return processed;
            }
        }
        if patch.is_empty() {
            return processed;
        }
        // Step III
        processed
            + if mc {
                self.follow_manifold(patch)
            } else {
                self.explore_neighborhood(&patch)
            }
    }

    // Keep processing the top of the stack while it touches the explored patch.
    fn explore_neighborhood(&mut self, patch: &[usize]) -> usize {
        let mut hull = self.solutions.get(patch[0]).rotation_box.clone();
        for &i in &patch[1..] {
            hull = hull
                .hull(&self.solutions.get(i).rotation_box)
                .expect("same dimension");
        }
        let eps = self.cfg.epsilon;
        let mut reach = hull.inflate(eps);
        let mut processed = 0;
        while let Some(top) = self.buffer.top() {
            if !top.bx.intersects(&reach) || self.expired() {
                break;
            }
            let node = self.buffer.pop().unwrap();
            processed += 1;
            match self.expand(node) {
                Expanded::Empty => {}
                Expanded::Accepted(i) => {
                    hull = hull
                        .hull(&self.solutions.get(i).rotation_box)
                        .expect("same dimension");
                    reach = hull.inflate(eps);
                }
                Expanded::Split(l, r) => self.push_children(l, r),
            }
        }
        processed
    }

    // Continue along the manifold from the newest frontier box.
    fn follow_manifold(&mut self, mut frontier: Vec<usize>) -> usize {
        let mut processed = 0;
        while let Some(&s) = frontier.last() {
            if self.expired() {
                break;
            }
            match self.continue_manifold(s) {
                Continuation::Node(pos) => {
                    self.stats.continuation_steps += 1;
                    let node = self.buffer.remove(pos);
                    processed += 1;
                    match self.expand(node) {
                        Expanded::Empty => {}
                        Expanded::Accepted(i) => frontier.push(i),
                        Expanded::Split(l, r) => self.push_children(l, r),
                    }
                }
                Continuation::Exhausted => {
                    frontier.pop();
                }
                Continuation::Unreliable => {
                    frontier.pop();
                    processed += self.explore_neighborhood(&[s]);
                }
            }
        }
        processed
    }

    // Resume continuation from curve ends that still have somewhere to go.
    fn continue_from_ends(&mut self) -> bool {
        let ends = self.curves.open_ends();
        for (_, b) in ends {
            if self.dead_ends.contains(&b) {
                continue;
            }
            match self.continue_manifold(b) {
                Continuation::Node(_) => {
                    self.follow_manifold(vec![b]);
                    return true;
                }
                Continuation::Exhausted | Continuation::Unreliable => {
                    self.dead_ends.insert(b);
                }
            }
        }
        false
    }

    fn tangent(&mut self, s: usize) -> Option<Vec<f64>> {
        if let Some(t) = self.tangents.get(&s) {
            return t.clone();
        }
        let mid = self.solutions.get(s).rotation_box.midpoint();
        let t = null_direction(self.system, &mid);
        self.tangents.insert(s, t.clone());
        t
    }

    /// Pick the buffered node to process next when walking from accepted box
    /// `s` along the manifold tangent.
    fn continue_manifold(&mut self, s: usize) -> Continuation {
        if self.dead_ends.contains(&s) {
            return Continuation::Exhausted;
        }
        let Some(t) = self.tangent(s) else {
            self.stats.unreliable_tangents += 1;
            return Continuation::Unreliable;
        };
        let eps = self.cfg.epsilon;
        let b = &self.solutions.get(s).rotation_box;
        let fwd: Vec<f64> = t.iter().map(|v| v * eps).collect();
        let back: Vec<f64> = t.iter().map(|v| -v * eps).collect();
        let shifted = [
            b.shift(&fwd).expect("dimension"),
            b.shift(&back).expect("dimension"),
        ];
        // the way forward is the side with fewer accepted boxes
        let crowd: Vec<usize> = shifted
            .iter()
            .map(|sb| {
                let jb = self.joints_of(sb);
                self.solutions
                    .intersecting(sb, &jb)
                    .into_iter()
                    .filter(|&i| i != s)
                    .count()
            })
            .collect();
        let order: &[usize] = match crowd[0].cmp(&crowd[1]) {
            std::cmp::Ordering::Less => &[0],
            std::cmp::Ordering::Greater => &[1],
            std::cmp::Ordering::Equal => &[0, 1],
        };
        for &d in order {
            let best = self
                .buffer
                .iter()
                .enumerate()
                .filter(|(_, n)| n.bx.intersects(&shifted[d]))
                .max_by_key(|(i, n)| (n.depth, *i));
            if let Some((pos, _)) = best {
                return Continuation::Node(pos);
            }
        }
        // buffered nodes only shrink, so nothing will meet these boxes later
        self.dead_ends.insert(s);
        Continuation::Exhausted
    }

    /// Local refinement from each box's joint midpoint, kept only when it
    /// converges onto a configuration some accepted box covers.
    fn refined_roots(&self, model: &RobotModel, target: &PoseTarget) -> Vec<Option<Vec<f64>>> {
        let cfg = LocalIkConfig {
            pose_tolerance: ROOT_POSE_TOL,
            ..Default::default()
        };
        self.solutions
            .iter()
            .map(|b| {
                let th = solve_local(model, target, &b.joints.midpoint(), &cfg).ok()?;
                let x = self.system.point_from_theta(model, &th);
                self.solutions
                    .find_containing(&x, &th, SEED_TOL)
                    .map(|_| th)
            })
            .collect()
    }

    pub fn run(mut self) -> Result<SolveOutcome> {
        let search_start = Instant::now();
        let termination = match self.deadline {
            Some(d) if Instant::now() >= d => Termination::BudgetExhausted,
            _ => match self.cfg.mode {
                SolverMode::Vanilla => self.run_vanilla(),
                SolverMode::Heuristic => self.run_heuristic(),
            },
        };
        let search_s = search_start.elapsed().as_secs_f64();
        let fin = Instant::now();
        self.stats.remaining = self.buffer.len() as u64;
        debug_assert!(self.stats.balanced(), "{:?}", self.stats);
        let eps = self.cfg.epsilon;
        let curves = match (self.robot, self.redundancy) {
            (Some((m, _)), Some(1)) => {
                let limits: Vec<Option<Interval>> = m
                    .joints()
                    .iter()
                    .map(|j| (!j.is_unbounded()).then_some(j.limits))
                    .collect();
                CurveSet::finalize(&self.solutions, eps, &limits)
            }
            _ => CurveSet::pooled(&self.solutions, eps),
        };
        let (cluster_ids, cluster_count, root_count) = match (self.robot, self.redundancy) {
            (Some((m, t)), Some(0)) => {
                let roots = self.refined_roots(m, t);
                let (ids, n, anchored) =
                    self.solutions
                        .anchored_clusters(eps, &roots, ROOT_MERGE_TOL);
                (ids, n, Some(anchored))
            }
            _ => {
                let (ids, n) = self.solutions.clusters(eps);
                (ids, n, None)
            }
        };
        Ok(SolveOutcome {
            solutions: self.solutions,
            curves,
            cluster_ids,
            cluster_count,
            root_count,
            stats: self.stats,
            termination,
            timings: Timings {
                setup_s: self.setup_s,
                search_s,
                finalize_s: fin.elapsed().as_secs_f64(),
                first_solution_s: self.first_solution,
                early_termination_s: self.early_termination,
            },
            redundancy: self.redundancy,
        })
    }
}

/// Largest per-component distance from `x` to `b` (0 inside).
fn distance(b: &IntervalBox, x: &[f64]) -> f64 {
    b.iter()
        .zip(x)
        .map(|(c, &v)| (c.lo() - v).max(v - c.hi()).max(0.0))
        .fold(0.0, f64::max)
}

/// Unit direction spanning the null space of the constraint Jacobian at `x`,
/// or `None` when the Jacobian does not have a clear one-dimensional null
/// space there.
pub fn null_direction(system: &ConstraintSystem, x: &[f64]) -> Option<Vec<f64>> {
    let dim = system.dim();
    let jac = system.core_jacobian(x);
    let jtj = jac.transpose() * &jac;
    let eig = jtj.symmetric_eigen();
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if dim < 2 {
        return None;
    }
    let sv = |k: usize| eig.eigenvalues[idx[k]].max(0.0).sqrt();
    let (smallest, second, top) = (sv(0), sv(1), sv(dim - 1));
    // a second weak direction, or none at all
    if second < TANGENT_RANK_TOL * top.max(1e-300) || smallest > 0.1 * second {
        return None;
    }
    // numerically zero entries would push pinned components off their value
    let v = eig.eigenvectors.column(idx[0]);
    Some(
        v.iter()
            .map(|&c| if c.abs() < 1e-9 { 0.0 } else { c })
            .collect(),
    )
}
