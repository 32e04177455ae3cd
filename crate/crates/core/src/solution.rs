use crate::instance::Instance;

/// A selected item set with incrementally maintained coverage counts,
/// objective `W(S)` and cost `C(S)`.
///
/// Every mutation goes through [`Solution::flip`], which touches only the
/// elements covered by the flipped item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    selected: Vec<bool>,
    len: usize,
    cov_count: Vec<u32>,
    total_weight: i64,
    total_cost: i64,
}

impl Solution {
    pub fn empty(inst: &Instance) -> Self {
        Solution {
            selected: vec![false; inst.n()],
            len: 0,
            cov_count: vec![0; inst.m()],
            total_weight: 0,
            total_cost: 0,
        }
    }

    /// Builds a solution from a list of distinct items.
    pub fn from_items(inst: &Instance, items: &[usize]) -> Self {
        let mut sol = Solution::empty(inst);
        for &i in items {
            if !sol.contains(i) {
                sol.flip(inst, i);
            }
        }
        sol
    }

    pub fn contains(&self, item: usize) -> bool {
        self.selected[item]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Selected items in ascending order.
    pub fn items(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }

    pub fn weight(&self) -> i64 {
        self.total_weight
    }

    pub fn cost(&self) -> i64 {
        self.total_cost
    }

    /// Number of selected items covering `element`.
    pub fn coverage(&self, element: usize) -> u32 {
        self.cov_count[element]
    }

    pub fn is_feasible(&self, inst: &Instance) -> bool {
        self.total_cost <= inst.budget()
    }

    /// Toggles `item` in place.
    pub fn flip(&mut self, inst: &Instance, item: usize) {
        if self.selected[item] {
            self.selected[item] = false;
            self.len -= 1;
            self.total_cost -= inst.cost(item);
            for &j in inst.cover(item) {
                self.cov_count[j] -= 1;
                if self.cov_count[j] == 0 {
                    self.total_weight -= inst.weight(j);
                }
            }
        } else {
            self.selected[item] = true;
            self.len += 1;
            self.total_cost += inst.cost(item);
            for &j in inst.cover(item) {
                if self.cov_count[j] == 0 {
                    self.total_weight += inst.weight(j);
                }
                self.cov_count[j] += 1;
            }
        }
    }

    /// Returns a copy with `item` toggled.
    pub fn flipped(&self, inst: &Instance, item: usize) -> Self {
        let mut next = self.clone();
        next.flip(inst, item);
        next
    }

    /// Objective change caused by flipping `item`, without flipping it.
    pub fn gain(&self, inst: &Instance, item: usize) -> i64 {
        if self.selected[item] {
            -inst
                .cover(item)
                .iter()
                .filter(|&&j| self.cov_count[j] == 1)
                .map(|&j| inst.weight(j))
                .sum::<i64>()
        } else {
            inst.cover(item)
                .iter()
                .filter(|&&j| self.cov_count[j] == 0)
                .map(|&j| inst.weight(j))
                .sum()
        }
    }

    /// Whether flipping `item` keeps the solution within budget. Removals
    /// always do.
    pub fn flip_feasible(&self, inst: &Instance, item: usize) -> bool {
        self.selected[item] || self.total_cost + inst.cost(item) <= inst.budget()
    }
}
