//! Variable depth local search.
//!
//! The outer loop walks a random permutation of the items cyclically. Each
//! item whose flip is feasible becomes the root of a depth-first tree of
//! flips whose width is capped at `max_width` and whose depth is capped at
//! `max_depth`. A tree stops at the first solution strictly better than the
//! one it started from. The run ends at the cut-off, or after a full pass
//! over the permutation without improvement.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::greedy::greedy_construct;
use crate::instance::Instance;
use crate::neighbours::NeighbourGraph;
use crate::solution::Solution;

/// Time checks inside a tree happen once per this many node expansions.
const CLOCK_CHECK_INTERVAL: u64 = 1024;

/// Where the children of a tree node are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPool {
    /// Items sharing an element with the item just flipped.
    Neighbours,
    /// Every other item.
    AllItems,
}

/// How the at most `max_width` children are picked from the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPick {
    /// Largest gain first, ties to the smaller index.
    TopGain,
    /// Uniformly random subset in random order.
    RandomK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    Greedy,
    Empty,
    /// Random items are added until one does not fit; that one is dropped.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_depth: usize,
    pub max_width: usize,
    pub cutoff: Duration,
    pub seed: u64,
    pub branch_pool: BranchPool,
    pub branch_pick: BranchPick,
    pub init: InitStrategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 8,
            max_width: 7,
            cutoff: Duration::from_secs(600),
            seed: 0,
            branch_pool: BranchPool::Neighbours,
            branch_pick: BranchPick::TopGain,
            init: InitStrategy::Greedy,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_depth == 0 {
            return Err("max_depth must be at least 1".into());
        }
        if self.max_width == 0 {
            return Err("max_width must be at least 1".into());
        }
        if self.cutoff.is_zero() {
            return Err("cutoff must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Cutoff,
    Stagnation,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Cutoff => "cutoff",
            Termination::Stagnation => "stagnation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub best_weight: i64,
    pub best_cost: i64,
    pub initial_weight: i64,
    /// Seconds from the start of the run until the returned solution was found.
    pub time_to_best: f64,
    pub elapsed: f64,
    /// Passes of the root loop, including skipped infeasible roots.
    pub root_iterations: u64,
    /// Number of accepted improving solutions.
    pub improvements: u64,
    pub nodes_expanded: u64,
    pub terminated_by: Termination,
}

/// Set of items visited in the current tree. Clearing is O(1).
#[derive(Debug, Clone)]
pub struct VisitedSet {
    stamp: Vec<u32>,
    current: u32,
}

impl VisitedSet {
    pub fn new(n: usize) -> Self {
        VisitedSet {
            stamp: vec![0; n],
            current: 1,
        }
    }

    pub fn clear(&mut self) {
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.fill(0);
            self.current = 1;
        }
    }

    pub fn insert(&mut self, item: usize) {
        self.stamp[item] = self.current;
    }

    pub fn contains(&self, item: usize) -> bool {
        self.stamp[item] == self.current
    }
}

/// State for the depth-first trees of one run.
pub struct TreeSearch<'a> {
    inst: &'a Instance,
    graph: &'a NeighbourGraph,
    cfg: &'a SearchConfig,
    rng: ChaCha8Rng,
    pub visited: VisitedSet,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
    // one candidate buffer per depth level
    buffers: Vec<Vec<(i64, usize)>>,
}

impl<'a> TreeSearch<'a> {
    pub fn new(
        inst: &'a Instance,
        graph: &'a NeighbourGraph,
        cfg: &'a SearchConfig,
        rng: ChaCha8Rng,
    ) -> Self {
        TreeSearch {
            inst,
            graph,
            cfg,
            rng,
            visited: VisitedSet::new(inst.n()),
            nodes: 0,
            deadline: None,
            timed_out: false,
            buffers: vec![Vec::new(); cfg.max_depth + 1],
        }
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub fn nodes_expanded(&self) -> u64 {
        self.nodes
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    /// Runs one tree rooted at `root` on `sol`. The visited set is reset and
    /// seeded with the root.
    ///
    /// On success `sol` holds a solution strictly better than `target`
    /// and `true` is returned. Otherwise `sol` is left exactly as it was.
    pub fn search_from_root(&mut self, sol: &mut Solution, target: i64, root: usize) -> bool {
        self.visited.clear();
        self.visited.insert(root);
        self.descend(sol, target, root, 0)
    }

    /// One node of the tree: flip `item`, stop on improvement over `target`,
    /// otherwise branch while `depth < max_depth`. Undoes its own flip on
    /// failure.
    pub fn descend(&mut self, sol: &mut Solution, target: i64, item: usize, depth: usize) -> bool {
        self.nodes += 1;
        if self.nodes % CLOCK_CHECK_INTERVAL == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        sol.flip(self.inst, item);
        if sol.weight() > target {
            return true;
        }
        if depth >= self.cfg.max_depth || self.timed_out {
            sol.flip(self.inst, item);
            return false;
        }

        let mut children = std::mem::take(&mut self.buffers[depth]);
        self.branch_candidates_into(sol, item, &mut children);
        let mut found = false;
        for &(_, child) in children.iter() {
            self.visited.insert(child);
            if self.descend(sol, target, child, depth + 1) {
                found = true;
                break;
            }
            if self.timed_out {
                break;
            }
        }
        self.buffers[depth] = children;
        if !found {
            sol.flip(self.inst, item);
        }
        found
    }

    /// Children of the node that just flipped `item`, in visiting order.
    pub fn branch_candidates(&mut self, sol: &Solution, item: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.branch_candidates_into(sol, item, &mut out);
        out.into_iter().map(|(_, i)| i).collect()
    }

    fn branch_candidates_into(&mut self, sol: &Solution, item: usize, out: &mut Vec<(i64, usize)>) {
        out.clear();
        let inst = self.inst;
        let visited = &self.visited;
        let admissible = |i: usize| !visited.contains(i) && sol.flip_feasible(inst, i);
        let width = self.cfg.max_width;
        match self.cfg.branch_pick {
            BranchPick::TopGain => {
                let mut push = |i: usize| {
                    if admissible(i) {
                        out.push((sol.gain(inst, i), i));
                    }
                };
                match self.cfg.branch_pool {
                    BranchPool::Neighbours => self.graph.neighbours(item).iter().for_each(|&i| push(i)),
                    BranchPool::AllItems => (0..inst.n()).filter(|&i| i != item).for_each(push),
                }
                let by_gain = |a: &(i64, usize), b: &(i64, usize)| b.0.cmp(&a.0).then(a.1.cmp(&b.1));
                if out.len() > width {
                    out.select_nth_unstable_by(width - 1, by_gain);
                    out.truncate(width);
                }
                out.sort_unstable_by(by_gain);
            }
            BranchPick::RandomK => {
                match self.cfg.branch_pool {
                    BranchPool::Neighbours => out.extend(
                        self.graph
                            .neighbours(item)
                            .iter()
                            .filter(|&&i| admissible(i))
                            .map(|&i| (0, i)),
                    ),
                    BranchPool::AllItems => out.extend(
                        (0..inst.n())
                            .filter(|&i| i != item && admissible(i))
                            .map(|i| (0, i)),
                    ),
                }
                let take = width.min(out.len());
                out.partial_shuffle(&mut self.rng, take);
                out.truncate(take);
            }
        }
    }
}

/// One tree search from `root` on a copy of `start`, accepting anything
/// strictly better than `input`. Returns the improving solution, if any.
pub fn local_search(
    inst: &Instance,
    graph: &NeighbourGraph,
    cfg: &SearchConfig,
    input: &Solution,
    start: &Solution,
    root: usize,
) -> Option<Solution> {
    let mut tree = TreeSearch::new(inst, graph, cfg, ChaCha8Rng::seed_from_u64(cfg.seed));
    let mut sol = start.clone();
    tree.search_from_root(&mut sol, input.weight(), root)
        .then_some(sol)
}

/// Initial solution for a run.
pub fn initial_solution<R: Rng>(inst: &Instance, init: InitStrategy, rng: &mut R) -> Solution {
    match init {
        InitStrategy::Greedy => greedy_construct(inst),
        InitStrategy::Empty => Solution::empty(inst),
        InitStrategy::Random => {
            let mut order: Vec<usize> = (0..inst.n()).collect();
            order.shuffle(rng);
            let mut sol = Solution::empty(inst);
            for i in order {
                if sol.cost() + inst.cost(i) > inst.budget() {
                    break;
                }
                sol.flip(inst, i);
            }
            sol
        }
    }
}

/// Runs the full search and returns the final solution with its report.
pub fn run_vdls(
    inst: &Instance,
    graph: &NeighbourGraph,
    cfg: &SearchConfig,
) -> (Solution, RunReport) {
    let start = Instant::now();
    let deadline = start + cfg.cutoff;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut sol = initial_solution(inst, cfg.init, &mut rng);
    let initial_weight = sol.weight();
    let mut time_to_best = start.elapsed().as_secs_f64();

    let n = inst.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut tree = TreeSearch::new(inst, graph, cfg, rng).with_deadline(deadline);
    let mut root_iterations = 0u64;
    let mut improvements = 0u64;
    let mut pos = 0usize;
    let mut step = 0usize;
    let terminated_by = loop {
        if n == 0 {
            break Termination::Stagnation;
        }
        if tree.timed_out() || Instant::now() >= deadline {
            break Termination::Cutoff;
        }
        let root = order[pos];
        let improved = sol.flip_feasible(inst, root) && {
            let target = sol.weight();
            tree.search_from_root(&mut sol, target, root)
        };
        root_iterations += 1;
        pos = (pos + 1) % n;
        // step counts consecutive failed roots, so every root (the last
        // improving one included) is retried on the current solution
        if improved {
            improvements += 1;
            step = 0;
            time_to_best = start.elapsed().as_secs_f64();
        } else {
            step += 1;
        }
        if step >= n {
            break Termination::Stagnation;
        }
    };

    let report = RunReport {
        best_weight: sol.weight(),
        best_cost: sol.cost(),
        initial_weight,
        time_to_best,
        elapsed: start.elapsed().as_secs_f64(),
        root_iterations,
        improvements,
        nodes_expanded: tree.nodes_expanded(),
        terminated_by,
    };
    (sol, report)
}
