//! Exact optimum for small instances by depth-first branch and bound.
//!
//! Items are decided one at a time (include, then exclude). The bound adds
//! to the current weight every still-uncovered element that some undecided
//! item could cover, ignoring costs.

use crate::instance::Instance;
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub weight: i64,
    /// Ascending item indices of one optimal (or best found) solution.
    pub items: Vec<usize>,
    /// False when the node budget ran out before the search finished.
    pub exact: bool,
    pub nodes: u64,
}

struct BranchAndBound<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    sol: Solution,
    undecided: Vec<u32>,
    potential: i64,
    best_weight: i64,
    best_items: Vec<usize>,
    nodes: u64,
    limit: u64,
    truncated: bool,
}

impl BranchAndBound<'_> {
    fn run(&mut self, pos: usize) {
        if self.truncated {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.truncated = true;
            return;
        }
        if self.sol.weight() > self.best_weight {
            self.best_weight = self.sol.weight();
            self.best_items = self.sol.items();
        }
        if pos == self.order.len() || self.sol.weight() + self.potential <= self.best_weight {
            return;
        }
        let inst = self.inst;
        let item = self.order[pos];

        for &j in inst.cover(item) {
            self.undecided[j] -= 1;
            if self.undecided[j] == 0 && self.sol.coverage(j) == 0 {
                self.potential -= inst.weight(j);
            }
        }

        // a zero-gain item cannot raise the objective, so only the exclude
        // branch is needed for it
        if self.sol.cost() + inst.cost(item) <= inst.budget() && self.sol.gain(inst, item) > 0 {
            let newly_covered = self.reachable_uncovered(item);
            self.potential -= newly_covered;
            self.sol.flip(inst, item);
            self.run(pos + 1);
            self.sol.flip(inst, item);
            self.potential += newly_covered;
        }
        self.run(pos + 1);

        for &j in inst.cover(item) {
            if self.undecided[j] == 0 && self.sol.coverage(j) == 0 {
                self.potential += inst.weight(j);
            }
            self.undecided[j] += 1;
        }
    }

    /// Weight of elements of `item` that are uncovered and still counted in
    /// the potential.
    fn reachable_uncovered(&self, item: usize) -> i64 {
        self.inst
            .cover(item)
            .iter()
            .filter(|&&j| self.sol.coverage(j) == 0 && self.undecided[j] > 0)
            .map(|&j| self.inst.weight(j))
            .sum()
    }
}

/// Maximizes the covered weight within budget, visiting at most `limit`
/// search nodes.
pub fn exact_opt(inst: &Instance, limit: u64) -> OracleResult {
    let empty = Solution::empty(inst);
    let mut order: Vec<usize> = (0..inst.n()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(empty.gain(inst, i)), i));
    let undecided: Vec<u32> = (0..inst.m())
        .map(|j| inst.covered_by(j).len() as u32)
        .collect();
    let potential = (0..inst.m())
        .filter(|&j| undecided[j] > 0)
        .map(|j| inst.weight(j))
        .sum();
    let mut bnb = BranchAndBound {
        inst,
        order,
        sol: empty,
        undecided,
        potential,
        best_weight: 0,
        best_items: Vec::new(),
        nodes: 0,
        limit,
        truncated: false,
    };
    bnb.run(0);
    OracleResult {
        weight: bnb.best_weight,
        items: bnb.best_items,
        exact: !bnb.truncated,
        nodes: bnb.nodes,
    }
}
